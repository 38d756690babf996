//! The double-power nonlinearity
//!
//! ```text
//! f(u) = −ωu + u^p − u^{2p−1},        F(u) = ∫₀ᵘ f(s) ds
//! ```
//!
//! together with its first two derivatives and the closed-form critical
//! constants: the existence threshold `ω_p`, the uniqueness threshold `a_p`,
//! the inflection point `α` of `f`, the zeros `b < c` of `f` and the first
//! zero `β` of `F`.
//!
//! All functions here are pure. Values that only exist for part of the
//! parameter range (`b`, `c`, `β`) are `Option`s, never NaN.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible exponent. Every constant carries a `1/(p−1)` power.
pub const P_FLOOR: f64 = 1.0 + 1e-9;

/// Number of uniform samples used by [`Params::potential_zero_count`].
pub const ZERO_SCAN_POINTS: usize = 10_000;

/// `u^e` for `u ≥ 0`, evaluated as `exp(e·ln u)` with `0^e = 0`.
///
/// Callers must not pass `u = 0` with `e ≤ 0`.
#[inline]
pub(crate) fn pos_pow(u: f64, e: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        (e * u.ln()).exp()
    }
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || p <= P_FLOOR {
        return Err(Error::InvalidParams(format!(
            "p must be finite and > 1 (got {p})"
        )));
    }
    Ok(())
}

/// Existence threshold `ω_p = p/(p+1)²`.
pub fn omega_p(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(p / ((p + 1.0) * (p + 1.0)))
}

/// Uniqueness threshold `a_p = p(7p−5) / (4(p+1)(2p−1)²)`.
pub fn a_p(p: f64) -> Result<f64> {
    check_p(p)?;
    let q = 2.0 * p - 1.0;
    Ok(p * (7.0 * p - 5.0) / (4.0 * (p + 1.0) * q * q))
}

/// Inflection point `α = [p/(2(2p−1))]^{1/(p−1)}`, the only zero of `f″`.
/// Independent of `ω`.
pub fn alpha(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(pos_pow(p / (2.0 * (2.0 * p - 1.0)), 1.0 / (p - 1.0)))
}

/// Problem parameters `(n, p, ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    n: u32,
    p: f64,
    omega: f64,
}

impl Params {
    pub fn new(n: u32, p: f64, omega: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParams("n must be >= 1".into()));
        }
        check_p(p)?;
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega must be finite and > 0 (got {omega})"
            )));
        }
        Ok(Params { n, p, omega })
    }

    /// Parameters for the one-dimensional problem, useful when only `(p, ω)`
    /// matter (everything except the shooting solver).
    pub fn planar(p: f64, omega: f64) -> Result<Self> {
        Self::new(1, p, omega)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_p(&self) -> f64 {
        self.p / ((self.p + 1.0) * (self.p + 1.0))
    }

    pub fn a_p(&self) -> f64 {
        let q = 2.0 * self.p - 1.0;
        self.p * (7.0 * self.p - 5.0) / (4.0 * (self.p + 1.0) * q * q)
    }

    pub fn alpha(&self) -> f64 {
        pos_pow(self.p / (2.0 * (2.0 * self.p - 1.0)), 1.0 / (self.p - 1.0))
    }

    /// `f(u) = −ωu + u^p − u^{2p−1}`.
    pub fn f(&self, u: f64) -> Result<f64> {
        nonneg(u)?;
        Ok(self.f_raw(u))
    }

    /// `F(u) = −(ω/2)u² + u^{p+1}/(p+1) − u^{2p}/(2p)`.
    pub fn potential(&self, u: f64) -> Result<f64> {
        nonneg(u)?;
        Ok(self.potential_raw(u))
    }

    /// `F(u)` through the factored form
    /// `u²/(2p(p+1)) · [−ωp(p+1) + 2p·u^{p−1} − (p+1)·u^{2(p−1)}]`.
    pub fn potential_factored(&self, u: f64) -> Result<f64> {
        nonneg(u)?;
        let p = self.p;
        let t = pos_pow(u, p - 1.0);
        let bracket = -self.omega * p * (p + 1.0) + 2.0 * p * t - (p + 1.0) * t * t;
        Ok(u * u / (2.0 * p * (p + 1.0)) * bracket)
    }

    /// `f′(u) = −ω + p·u^{p−1} − (2p−1)·u^{2(p−1)}`.
    pub fn df(&self, u: f64) -> Result<f64> {
        positive(u)?;
        Ok(self.df_raw(u))
    }

    /// `f″(u) = 2(p−1)(2p−1)·u^{p−2}·[p/(2(2p−1)) − u^{p−1}]`.
    pub fn d2f(&self, u: f64) -> Result<f64> {
        positive(u)?;
        Ok(self.d2f_raw(u))
    }

    #[inline]
    pub(crate) fn f_raw(&self, u: f64) -> f64 {
        let t = pos_pow(u, self.p - 1.0);
        u * (-self.omega + t - t * t)
    }

    #[inline]
    pub(crate) fn potential_raw(&self, u: f64) -> f64 {
        let p = self.p;
        let t = pos_pow(u, p - 1.0);
        let u2 = u * u;
        -0.5 * self.omega * u2 + u2 * t / (p + 1.0) - u2 * t * t / (2.0 * p)
    }

    #[inline]
    pub(crate) fn df_raw(&self, u: f64) -> f64 {
        let p = self.p;
        let t = pos_pow(u, p - 1.0);
        -self.omega + p * t - (2.0 * p - 1.0) * t * t
    }

    #[inline]
    pub(crate) fn d2f_raw(&self, u: f64) -> f64 {
        let p = self.p;
        let q = 2.0 * p - 1.0;
        2.0 * (p - 1.0) * q * pos_pow(u, p - 2.0) * (p / (2.0 * q) - pos_pow(u, p - 1.0))
    }

    /// The closed-form critical constants for these parameters.
    pub fn critical_points(&self) -> CriticalPoints {
        let p = self.p;
        let w = self.omega;
        let inv = 1.0 / (p - 1.0);
        // 1 − √(1−x) is written as x/(1+√(1−x)) to avoid cancellation at small ω.
        let (b, c) = if w < 0.25 {
            let s = (1.0 - 4.0 * w).sqrt();
            let t_b = 2.0 * w / (1.0 + s);
            let t_c = 0.5 * (1.0 + s);
            (Some(pos_pow(t_b, inv)), Some(pos_pow(t_c, inv)))
        } else {
            (None, None)
        };
        let omega_p = self.omega_p();
        let beta = if w < omega_p {
            let x = (p + 1.0) * (p + 1.0) / p * w;
            let t = p / (p + 1.0) * x / (1.0 + (1.0 - x).sqrt());
            Some(pos_pow(t, inv))
        } else {
            None
        };
        CriticalPoints {
            omega_p,
            a_p: self.a_p(),
            alpha: self.alpha(),
            b,
            c,
            beta,
        }
    }

    /// Number of sign changes of `F` on `(0, ∞)`, found by a scan of
    /// [`ZERO_SCAN_POINTS`] points.
    ///
    /// The points are uniform in `t = u^{p−1}` over `(0, 1.1·2p/(p+1)]`.
    /// Beyond `t = 2p/(p+1)` the potential is negative, so no zero is missed,
    /// and the first zero `β` stays resolved even when it is tiny in `u`
    /// (`p` close to 1).
    pub fn potential_zero_count(&self) -> usize {
        let p = self.p;
        let t_max = 1.1 * 2.0 * p / (p + 1.0);
        let step = t_max / ZERO_SCAN_POINTS as f64;
        let inv = 1.0 / (p - 1.0);
        let mut count = 0;
        let mut last_sign = 0.0_f64;
        for i in 1..=ZERO_SCAN_POINTS {
            let v = self.potential_raw(pos_pow(step * i as f64, inv));
            if v == 0.0 {
                continue;
            }
            let s = v.signum();
            if last_sign != 0.0 && s != last_sign {
                count += 1;
            }
            last_sign = s;
        }
        count
    }
}

fn nonneg(u: f64) -> Result<()> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::Domain(format!("u must be >= 0 (got {u})")));
    }
    Ok(())
}

fn positive(u: f64) -> Result<()> {
    if u.is_nan() || u <= 0.0 {
        return Err(Error::Domain(format!("u must be > 0 (got {u})")));
    }
    Ok(())
}

/// Critical constants for one `(p, ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoints {
    pub omega_p: f64,
    pub a_p: f64,
    /// Zero of `f″`.
    pub alpha: f64,
    /// First zero of `f`; absent when `ω ≥ 1/4`.
    pub b: Option<f64>,
    /// Last zero of `f`; absent when `ω ≥ 1/4`.
    pub c: Option<f64>,
    /// First zero of `F`; absent when `ω ≥ ω_p`.
    pub beta: Option<f64>,
}

/// Absolute residuals of the defining equations of the critical constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub f_at_b: Option<f64>,
    pub f_at_c: Option<f64>,
    pub potential_at_beta: Option<f64>,
    pub d2f_at_alpha: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        [self.f_at_b, self.f_at_c, self.potential_at_beta]
            .into_iter()
            .flatten()
            .fold(self.d2f_at_alpha, f64::max)
    }
}

impl CriticalPoints {
    pub fn residuals(&self, params: &Params) -> Residuals {
        Residuals {
            f_at_b: self.b.map(|b| params.f_raw(b).abs()),
            f_at_c: self.c.map(|c| params.f_raw(c).abs()),
            potential_at_beta: self.beta.map(|beta| params.potential_raw(beta).abs()),
            d2f_at_alpha: params.d2f_raw(self.alpha).abs(),
        }
    }

    /// A concrete point where `F > 0`: the midpoint of `(β, c)`.
    pub fn h2_witness(&self) -> Option<f64> {
        match (self.beta, self.c) {
            (Some(beta), Some(c)) => Some(0.5 * (beta + c)),
            _ => None,
        }
    }
}
