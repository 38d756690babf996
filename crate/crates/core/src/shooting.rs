//! Shooting solver for the radial ground-state problem
//!
//! ```text
//! u″ + ((n−1)/r)·u′ + f(u) = 0,   u′(0) = 0,   u(r) → 0 as r → ∞
//! ```
//!
//! The initial value problem is integrated from `u(0) = d`. A trajectory
//! either reaches `u = 0` (a *crossing*, `d` too large) or turns around at a
//! positive height below `β` (a *rebound*, `d` too small): below `β` the
//! energy `u′²/2 + F(u)` is negative and cannot increase, so such a
//! trajectory never reaches zero. The ground state height `d*` is the
//! boundary between the two, found by bisection on `d`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::existence_check;
use crate::error::{Error, Result};
use crate::nonlinearity::Params;
use crate::ode::{Dopri5, State, Step, Tolerances};

/// Length of the series start step away from the singular point `r = 0`.
pub const SERIES_STEP: f64 = 1e-6;

/// Relative offset of the bracket endpoints from `b` and `c`.
pub const BRACKET_INSET: f64 = 1e-6;

/// Number of rows in an exported profile.
pub const PROFILE_ROWS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverControls {
    /// Integration horizon; `None` means `200/√ω`.
    pub r_max: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Final bracket width of the bisection on `d`.
    pub d_tol: f64,
    /// Extra attempts granted to unresolved cells in a multiplicity scan.
    pub retry_budget: usize,
}

impl Default for SolverControls {
    fn default() -> Self {
        SolverControls {
            r_max: None,
            rtol: 1e-10,
            atol: 1e-12,
            max_step: 0.5,
            max_steps: 2_000_000,
            d_tol: 1e-10,
            retry_budget: 2,
        }
    }
}

impl SolverControls {
    pub fn horizon(&self, params: &Params) -> f64 {
        self.r_max.unwrap_or(200.0 / params.omega().sqrt())
    }
}

/// Outcome of one shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum ShotClass {
    /// `u` reached zero at radius `r`.
    Crossing { r: f64 },
    /// `u′` reached zero at radius `r` with `0 < u < β`.
    Rebound { r: f64 },
    Unresolved,
}

impl ShotClass {
    pub fn event_r(&self) -> Option<f64> {
        match *self {
            ShotClass::Crossing { r } | ShotClass::Rebound { r } => Some(r),
            ShotClass::Unresolved => None,
        }
    }

    pub fn is_crossing(&self) -> bool {
        matches!(self, ShotClass::Crossing { .. })
    }

    pub fn is_rebound(&self) -> bool {
        matches!(self, ShotClass::Rebound { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub u: f64,
    pub du: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub d: f64,
    pub samples: Vec<Sample>,
    pub classification: ShotClass,
    /// Why the shot is unresolved, if it is.
    pub diagnostic: Option<String>,
}

impl Trajectory {
    /// `E = u′²/2 + F(u)` at every sample.
    pub fn energies(&self, params: &Params) -> Vec<f64> {
        self.samples.iter().map(|s| energy(params, s)).collect()
    }
}

pub fn energy(params: &Params, s: &Sample) -> f64 {
    // F is even under the odd extension of f.
    0.5 * s.du * s.du + params.potential_raw(s.u.abs())
}

/// `f` extended oddly to negative arguments, for the short overshoot past
/// `u = 0` before a crossing is detected.
#[inline]
fn f_odd(params: &Params, u: f64) -> f64 {
    if u >= 0.0 {
        params.f_raw(u)
    } else {
        -params.f_raw(-u)
    }
}

/// Right-hand side of the first-order system for `(u, u′)`.
///
/// At `r = 0` the term `((n−1)/r)·u′` is replaced by its limit, which gives
/// `u″(0) = −f(u)/n`.
pub fn ode_rhs(r: f64, state: &State, params: &Params) -> State {
    let [u, du] = *state;
    let n = params.n() as f64;
    if r == 0.0 {
        return [du, -f_odd(params, u) / n];
    }
    [du, -((n - 1.0) / r) * du - f_odd(params, u)]
}

enum Event {
    Crossing(f64, State),
    Rebound(f64, State),
}

fn locate(step: &Step, hit: impl Fn(&State) -> bool) -> (f64, State) {
    let (_, hi) = crate::root::bisect_predicate(
        step.t0,
        step.t1,
        1e-15 * step.t1.max(1.0),
        |t| hit(&step.interpolate(t)),
    );
    let y = if hi == step.t1 { step.y1 } else { step.interpolate(hi) };
    (hi, y)
}

fn detect(step: &Step, beta: f64) -> Option<Event> {
    let crossing = (step.y1[0] <= 0.0).then(|| locate(step, |y| y[0] <= 0.0));
    let rebound = if step.y0[1] < 0.0 && step.y1[1] >= 0.0 {
        let (r, y) = locate(step, |y| y[1] >= 0.0);
        (y[0] > 0.0 && y[0] < beta).then_some((r, y))
    } else {
        None
    };
    match (crossing, rebound) {
        (Some(c), Some(b)) if b.0 < c.0 => Some(Event::Rebound(b.0, b.1)),
        (Some(c), _) => Some(Event::Crossing(c.0, c.1)),
        (None, Some(b)) => Some(Event::Rebound(b.0, b.1)),
        (None, None) => None,
    }
}

fn integrate_once(d: f64, params: &Params, controls: &SolverControls, r_max: f64) -> Trajectory {
    let n = params.n() as f64;
    let beta = params.critical_points().beta.unwrap_or(d);
    let h = SERIES_STEP;
    let fd = f_odd(params, d);
    let start = [d - fd * h * h / (2.0 * n), -fd * h / n];
    let mut samples = vec![
        Sample { r: 0.0, u: d, du: 0.0 },
        Sample { r: h, u: start[0], du: start[1] },
    ];
    let tol = Tolerances {
        rtol: controls.rtol,
        atol: controls.atol,
    };
    let mut ode = Dopri5::new(|r, y| ode_rhs(r, y, params), h, start, h, controls.max_step, tol);

    let unresolved = |samples: Vec<Sample>, why: String| Trajectory {
        d,
        samples,
        classification: ShotClass::Unresolved,
        diagnostic: Some(why),
    };

    for _ in 0..controls.max_steps {
        let step = match ode.advance() {
            Ok(s) => s,
            Err(e) => return unresolved(samples, e.to_string()),
        };
        if let Some(event) = detect(&step, beta) {
            let (classification, r, y) = match event {
                Event::Crossing(r, y) => (ShotClass::Crossing { r }, r, y),
                Event::Rebound(r, y) => (ShotClass::Rebound { r }, r, y),
            };
            samples.push(Sample { r, u: y[0], du: y[1] });
            return Trajectory {
                d,
                samples,
                classification,
                diagnostic: None,
            };
        }
        samples.push(Sample {
            r: step.t1,
            u: step.y1[0],
            du: step.y1[1],
        });
        if step.t1 >= r_max {
            return unresolved(samples, format!("no event before r_max = {r_max}"));
        }
    }
    unresolved(samples, format!("step budget of {} exhausted", controls.max_steps))
}

/// Integrates one shot from `u(0) = d`, `u′(0) = 0` until the first event.
///
/// A shot that reaches the horizon unresolved is retried once with the
/// horizon doubled.
pub fn integrate_shot(d: f64, params: &Params, controls: &SolverControls) -> Result<Trajectory> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Domain(format!("initial height must be > 0 (got {d})")));
    }
    if let Some(c) = params.critical_points().c {
        if d >= c {
            return Err(Error::Domain(format!("initial height {d} must be below c = {c}")));
        }
    }
    let r_max = controls.horizon(params);
    let first = integrate_once(d, params, controls, r_max);
    if first.classification == ShotClass::Unresolved {
        return Ok(integrate_once(d, params, controls, 2.0 * r_max));
    }
    Ok(first)
}

/// The shooting bracket `[b(1+ε), c(1−ε)]`.
pub fn shooting_bracket(params: &Params) -> Result<(f64, f64)> {
    if !existence_check(params) {
        return Err(Error::NoSolution {
            omega: params.omega(),
            omega_p: params.omega_p(),
        });
    }
    let cp = params.critical_points();
    // Both exist whenever ω < ω_p < 1/4.
    let (b, c) = (cp.b.unwrap(), cp.c.unwrap());
    Ok((b * (1.0 + BRACKET_INSET), c * (1.0 - BRACKET_INSET)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub d_star: f64,
    /// Final bisection bracket on `d`.
    pub bracket: (f64, f64),
    /// Shot at `d_star`, truncated to the samples with `u > 0`.
    pub profile: Trajectory,
    pub residual_sup: f64,
}

/// Finds the ground state by bisection between a rebound and a crossing.
pub fn find_ground_state(params: &Params, controls: &SolverControls) -> Result<GroundState> {
    let (mut lo, mut hi) = shooting_bracket(params)?;
    let classify = |d: f64| -> Result<ShotClass> {
        let t = integrate_shot(d, params, controls)?;
        match t.classification {
            ShotClass::Unresolved => Err(Error::Integration(format!(
                "shot at d = {d} unresolved: {}",
                t.diagnostic.unwrap_or_default()
            ))),
            c => Ok(c),
        }
    };
    let (c_lo, c_hi) = (classify(lo)?, classify(hi)?);
    if !(c_lo.is_rebound() && c_hi.is_crossing()) {
        return Err(Error::BracketInvalid(format!(
            "expected (Rebound, Crossing) at d = ({lo}, {hi}), got ({c_lo:?}, {c_hi:?})"
        )));
    }
    while hi - lo > controls.d_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if classify(mid)?.is_crossing() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let d_star = 0.5 * (lo + hi);
    let mut profile = integrate_shot(d_star, params, controls)?;
    profile.samples.retain(|s| s.u > 0.0);
    let residual_sup = residual_sup(&profile, params);
    Ok(GroundState {
        d_star,
        bracket: (lo, hi),
        profile,
        residual_sup,
    })
}

/// Local reconstruction on `[r0, r1]` from `(u, u′, u″)` at both ends,
/// evaluated at the midpoint. `u` comes from the quintic Hermite
/// interpolant; `u′` and `u″` from the cubic Hermite interpolant of `u′`,
/// which avoids dividing differences of `u` by `h²` on the tiny steps near
/// `r = 0`. Returns `(u, u′, u″)`.
fn midpoint_reconstruction(a: &Sample, a2: f64, b: &Sample, b2: f64) -> (f64, f64, f64) {
    let h = b.r - a.r;
    let (c0, c1, c2) = (a.u, h * a.du, 0.5 * h * h * a2);
    let big_a = b.u - c0 - c1 - c2;
    let big_b = h * b.du - c1 - 2.0 * c2;
    let big_c = h * h * b2 - 2.0 * c2;
    let c3 = 10.0 * big_a - 4.0 * big_b + 0.5 * big_c;
    let c4 = -15.0 * big_a + 7.0 * big_b - big_c;
    let c5 = 6.0 * big_a - 3.0 * big_b + 0.5 * big_c;
    let t = 0.5;
    let u = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
    let du = 0.5 * (a.du + b.du) + h * (a2 - b2) / 8.0;
    let ddu = 1.5 * (b.du - a.du) / h - 0.25 * (a2 + b2);
    (u, du, ddu)
}

/// `sup |u″ + ((n−1)/r)u′ + f(u)|` over the midpoints between consecutive
/// samples, with `(u, u′, u″)` reconstructed by local Hermite
/// interpolation.
pub fn residual_sup(traj: &Trajectory, params: &Params) -> f64 {
    let n = params.n() as f64;
    let accel = |s: &Sample| ode_rhs(s.r, &[s.u, s.du], params)[1];
    traj.samples
        .windows(2)
        .map(|w| {
            let (u, du, ddu) = midpoint_reconstruction(&w[0], accel(&w[0]), &w[1], accel(&w[1]));
            let r = 0.5 * (w[0].r + w[1].r);
            (ddu + (n - 1.0) / r * du + f_odd(params, u)).abs()
        })
        .fold(0.0, f64::max)
}

/// Resamples a trajectory on `rows` uniform radii spanning its samples,
/// using cubic Hermite interpolation of `(u, u′)`.
pub fn resample(traj: &Trajectory, params: &Params, rows: usize) -> Vec<Sample> {
    let s = &traj.samples;
    if s.is_empty() || rows == 0 {
        return Vec::new();
    }
    let r_end = s[s.len() - 1].r;
    let step_of = |i: usize| {
        let (a, b) = (&s[i], &s[i + 1]);
        Step {
            t0: a.r,
            y0: [a.u, a.du],
            f0: ode_rhs(a.r, &[a.u, a.du], params),
            t1: b.r,
            y1: [b.u, b.du],
            f1: ode_rhs(b.r, &[b.u, b.du], params),
        }
    };
    let mut out = Vec::with_capacity(rows);
    let mut i = 0;
    for j in 0..rows {
        let r = if rows == 1 {
            0.0
        } else if j == rows - 1 {
            r_end
        } else {
            r_end * j as f64 / (rows - 1) as f64
        };
        while i + 2 < s.len() && s[i + 1].r < r {
            i += 1;
        }
        if s.len() == 1 {
            out.push(s[0]);
            continue;
        }
        let y = if r == s[i + 1].r {
            [s[i + 1].u, s[i + 1].du]
        } else if r == s[i].r {
            [s[i].u, s[i].du]
        } else {
            step_of(i).interpolate(r)
        };
        out.push(Sample { r, u: y[0], du: y[1] });
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Multiplicity {
    /// Number of Rebound → Crossing transitions along the `d` grid.
    pub count: usize,
    pub grid: Vec<f64>,
    pub classes: Vec<ShotClass>,
    /// Cells still unresolved after the retry budget.
    pub unresolved: usize,
    pub warnings: Vec<String>,
}

/// Classifies shots on `grid_size` uniform heights across the shooting
/// bracket and counts Rebound → Crossing transitions, each of which brackets
/// one positive solution.
///
/// Unresolved cells are retried with tolerances tightened tenfold per
/// attempt, up to `controls.retry_budget` times; remaining ones are skipped
/// in the count and reported as warnings.
pub fn multiplicity_scan(
    params: &Params,
    grid_size: usize,
    controls: &SolverControls,
) -> Result<Multiplicity> {
    if grid_size < 2 {
        return Err(Error::InvalidParams("grid must have at least 2 points".into()));
    }
    let (lo, hi) = shooting_bracket(params)?;
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| lo + (hi - lo) * i as f64 / (grid_size - 1) as f64)
        .collect();
    let results: Vec<(ShotClass, Option<String>)> = grid
        .par_iter()
        .map(|&d| {
            let mut c = *controls;
            let mut last = None;
            for _ in 0..=controls.retry_budget {
                match integrate_shot(d, params, &c) {
                    Ok(t) if t.classification != ShotClass::Unresolved => {
                        return Ok((t.classification, None))
                    }
                    Ok(t) => last = t.diagnostic,
                    Err(e) => return Err(e),
                }
                c.rtol *= 0.1;
                c.atol *= 0.1;
            }
            Ok((
                ShotClass::Unresolved,
                Some(format!(
                    "d = {d}: unresolved after {} retries ({})",
                    controls.retry_budget,
                    last.unwrap_or_default()
                )),
            ))
        })
        .collect::<Result<_>>()?;

    let classes: Vec<ShotClass> = results.iter().map(|r| r.0).collect();
    let warnings: Vec<String> = results.into_iter().filter_map(|r| r.1).collect();
    let mut count = 0;
    let mut prev: Option<ShotClass> = None;
    for c in classes.iter().filter(|c| **c != ShotClass::Unresolved) {
        if prev.is_some_and(|p| p.is_rebound()) && c.is_crossing() {
            count += 1;
        }
        prev = Some(*c);
    }
    Ok(Multiplicity {
        count,
        grid,
        unresolved: warnings.len(),
        classes,
        warnings,
    })
}
