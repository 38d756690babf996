//! Dormand–Prince 5(4) embedded Runge–Kutta integrator with adaptive step
//! size control, plus cubic Hermite interpolation between accepted steps.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

pub type State = [f64; 2];

#[inline]
fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

/// One accepted step: the state and its derivative at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub t0: f64,
    pub y0: State,
    pub f0: State,
    pub t1: f64,
    pub y1: State,
    pub f1: State,
}

impl Step {
    /// Cubic Hermite interpolant of the state at `t ∈ [t0, t1]`.
    pub fn interpolate(&self, t: f64) -> State {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let out: State = std::array::from_fn(|i| {
            h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i]
        });
        out
    }
}

/// Adaptive Dormand–Prince integrator for a two-component autonomous or
/// non-autonomous system `y′ = rhs(t, y)`.
pub struct Dopri5<F>
where
    F: Fn(f64, &State) -> State,
{
    rhs: F,
    tol: Tolerances,
    t: f64,
    y: State,
    k1: State,
    h: f64,
    h_max: f64,
    pub evaluations: usize,
}

impl<F> Dopri5<F>
where
    F: Fn(f64, &State) -> State,
{
    pub fn new(rhs: F, t0: f64, y0: State, h0: f64, h_max: f64, tol: Tolerances) -> Self {
        let k1 = rhs(t0, &y0);
        Dopri5 {
            rhs,
            tol,
            t: t0,
            y: y0,
            k1,
            h: h0,
            h_max,
            evaluations: 1,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> State {
        self.y
    }

    /// Takes one accepted step, shrinking the step size as often as needed.
    pub fn advance(&mut self) -> Result<Step> {
        loop {
            let h = self.h.min(self.h_max);
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::Integration(format!(
                    "step size underflow at t = {} (h = {h})",
                    self.t
                )));
            }
            let (y1, k7, err) = self.trial(h);
            if !err.is_finite() {
                self.h = h * FAC_MIN;
                continue;
            }
            let fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            if err <= 1.0 {
                let step = Step {
                    t0: self.t,
                    y0: self.y,
                    f0: self.k1,
                    t1: self.t + h,
                    y1,
                    f1: k7,
                };
                self.t += h;
                self.y = y1;
                self.k1 = k7;
                self.h = h * fac;
                return Ok(step);
            }
            self.h = h * fac.min(1.0);
        }
    }

    fn trial(&mut self, h: f64) -> (State, State, f64) {
        let (t, y, k1) = (self.t, self.y, self.k1);
        let f = &self.rhs;
        let k2 = f(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = f(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(t + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = f(
            t + h,
            &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
        );
        let y1 = axpy(&y, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], h);
        let k7 = f(t + h, &y1);
        self.evaluations += 6;

        let mut sum = 0.0;
        for i in 0..2 {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.tol.atol + self.tol.rtol * y[i].abs().max(y1[i].abs());
            sum += (e / scale) * (e / scale);
        }
        (y1, k7, (sum / 2.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIGHT: Tolerances = Tolerances {
        rtol: 1e-10,
        atol: 1e-12,
    };

    #[test]
    fn harmonic_oscillator_full_period() {
        let mut ode = Dopri5::new(|_, y| [y[1], -y[0]], 0.0, [1.0, 0.0], 1e-3, 0.5, TIGHT);
        let end = 2.0 * std::f64::consts::PI;
        let mut last = None;
        while ode.t() < end {
            let s = ode.advance().unwrap();
            if s.t1 >= end {
                last = Some(s);
            }
        }
        let y = last.unwrap().interpolate(end);
        assert!((y[0] - 1.0).abs() < 1e-7, "{y:?}");
        assert!(y[1].abs() < 1e-7);
    }

    #[test]
    fn exponential_growth_accuracy() {
        let mut ode = Dopri5::new(|_, y| [y[0], 0.0], 0.0, [1.0, 0.0], 1e-3, 1.0, TIGHT);
        while ode.t() < 5.0 {
            ode.advance().unwrap();
        }
        let rel = (ode.state()[0] - ode.t().exp()).abs() / ode.t().exp();
        assert!(rel < 1e-8, "{rel}");
    }

    #[test]
    fn hermite_reproduces_cubic() {
        // y = t³ with exact derivative data at both ends.
        let s = Step {
            t0: 1.0,
            y0: [1.0, 0.0],
            f0: [3.0, 0.0],
            t1: 2.0,
            y1: [8.0, 0.0],
            f1: [12.0, 0.0],
        };
        assert!((s.interpolate(1.5)[0] - 3.375).abs() < 1e-14);
    }
}
