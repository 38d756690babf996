//! Existence and uniqueness criteria.
//!
//! A positive ground state exists exactly when `0 < ω < ω_p`. Uniqueness is
//! certified through the monotonicity hypothesis
//!
//! ```text
//! G(u) = f(u)/(u − β) nonincreasing on (β, c)
//! ```
//!
//! which is equivalent to `k(u) = f′(u)(u − β) − f(u) ≤ 0` on `(β, c)`.
//! Since `k′(u) = f″(u)(u − β)` and `f″` changes sign only at `α`, `k` is
//! decreasing on `(β, c)` whenever `α ≤ β`, i.e. whenever `ω ≥ a_p` (the
//! *basic* criterion). For `α > β` the maximum of `k` on `(β, c)` sits at
//! `α`, and `k(α) ≤ 0` (the *extended* criterion) still certifies
//! uniqueness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::{pos_pow, CriticalPoints, Params};
use crate::root::bisect_root;

/// Grid size used by [`classify`] for the numeric cross-checks.
pub const REPORT_SCAN_POINTS: usize = 1000;

/// Relative margin kept away from `β` when sampling `G`.
pub const G_SCAN_MARGIN: f64 = 1e-8;

/// Largest increase between consecutive `G` samples still read as
/// nonincreasing.
pub const G_SCAN_SLACK: f64 = 1e-10;

/// Default bracket width for [`find_omega_star`].
pub const OMEGA_STAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    NoSolution,
    UniqueByBasic,
    UniqueByExtended,
    Undetermined,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::NoSolution => "NoSolution",
            Classification::UniqueByBasic => "UniqueByBasic",
            Classification::UniqueByExtended => "UniqueByExtended",
            Classification::Undetermined => "Undetermined",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Classification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NoSolution" => Ok(Classification::NoSolution),
            "UniqueByBasic" => Ok(Classification::UniqueByBasic),
            "UniqueByExtended" => Ok(Classification::UniqueByExtended),
            "Undetermined" => Ok(Classification::Undetermined),
            other => Err(Error::InvalidParams(format!("unknown classification {other:?}"))),
        }
    }
}

/// `true` iff `0 < ω < ω_p`.
pub fn existence_check(params: &Params) -> bool {
    params.omega() > 0.0 && params.omega() < params.omega_p()
}

/// `lim_{u→0⁺} f(u)/u`, which is `−ω`.
pub fn h1_limit(params: &Params) -> f64 {
    -params.omega()
}

fn require_beta(params: &Params) -> Result<f64> {
    params.critical_points().beta.ok_or_else(|| {
        Error::Precondition(format!(
            "beta is undefined for omega = {} >= omega_p = {}",
            params.omega(),
            params.omega_p()
        ))
    })
}

fn k_with_beta(params: &Params, beta: f64, u: f64) -> f64 {
    params.df_raw(u) * (u - beta) - params.f_raw(u)
}

/// `k(u) = f′(u)(u − β) − f(u)`.
pub fn k(params: &Params, u: f64) -> Result<f64> {
    let beta = require_beta(params)?;
    params.df(u)?;
    Ok(k_with_beta(params, beta, u))
}

/// `k′(u) = f″(u)(u − β)`.
pub fn k_prime(params: &Params, u: f64) -> Result<f64> {
    let beta = require_beta(params)?;
    Ok(params.d2f(u)? * (u - beta))
}

/// `ω ≥ a_p`.
pub fn basic_criterion(params: &Params) -> bool {
    params.omega() >= params.a_p()
}

/// The geometric form of the basic criterion, `α ≤ β`, computed from the
/// closed forms. `None` when `β` does not exist.
pub fn alpha_le_beta(params: &Params) -> Option<bool> {
    let cp = params.critical_points();
    cp.beta.map(|beta| cp.alpha <= beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedCriterion {
    /// `k(α) ≤ 0`.
    pub holds: bool,
    pub k_alpha: f64,
    /// `α − f(α)/f′(α)`, present when `f′(α) > 0`.
    pub newton_point: Option<f64>,
}

/// Extended criterion `k(α) ≤ 0`, equivalently `α − f(α)/f′(α) ≤ β`.
///
/// Only meaningful when `α > β`; otherwise the basic criterion applies and a
/// precondition error is returned.
pub fn extended_criterion(params: &Params) -> Result<ExtendedCriterion> {
    let beta = require_beta(params)?;
    let alpha = params.alpha();
    if alpha <= beta {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} <= beta = {beta}; use the basic criterion"
        )));
    }
    let k_alpha = k_with_beta(params, beta, alpha);
    let df_alpha = params.df_raw(alpha);
    let newton_point = (df_alpha > 0.0).then(|| alpha - params.f_raw(alpha) / df_alpha);
    Ok(ExtendedCriterion {
        holds: k_alpha <= 0.0,
        k_alpha,
        newton_point,
    })
}

/// `(p−1)α^p(1−2α^{p−1}) / f′(α)`: the Newton point `α − f(α)/f′(α)`
/// rewritten without `ω` in the numerator.
pub fn newton_point_factored(params: &Params) -> f64 {
    let p = params.p();
    let a = params.alpha();
    (p - 1.0) * pos_pow(a, p) * (1.0 - 2.0 * pos_pow(a, p - 1.0)) / params.df_raw(a)
}

/// `ω`-free lower bound of the Newton point,
/// `(p−1)α^p(1−2α^{p−1}) / (pα^{p−1} − (2p−1)α^{2(p−1)})`, which is positive
/// for every `p > 1`.
pub fn newton_point_lower_bound(p: f64) -> Result<f64> {
    let params = Params::planar(p, 0.5 * crate::nonlinearity::omega_p(p)?)?;
    let a = params.alpha();
    let t = pos_pow(a, p - 1.0);
    Ok((p - 1.0) * pos_pow(a, p) * (1.0 - 2.0 * t) / (p * t - (2.0 * p - 1.0) * t * t))
}

fn interior_grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let h = (hi - lo) / (points + 1) as f64;
    (1..=points).map(move |i| lo + h * i as f64)
}

/// Samples `G(u) = f(u)/(u − β)` at `grid_size` interior points of `(β, c)`
/// (keeping a relative margin from `β`) and reports whether consecutive
/// samples never increase by more than [`G_SCAN_SLACK`].
///
/// `None` when `β` or `c` does not exist.
pub fn g_monotone_scan(params: &Params, grid_size: usize) -> Option<bool> {
    let cp = params.critical_points();
    let (beta, c) = (cp.beta?, cp.c?);
    let lo = beta * (1.0 + G_SCAN_MARGIN);
    let mut prev = f64::INFINITY;
    for u in interior_grid(lo, c, grid_size) {
        let g = params.f_raw(u) / (u - beta);
        if g - prev > G_SCAN_SLACK {
            return Some(false);
        }
        prev = g;
    }
    Some(true)
}

/// Maximum of `k` over `grid_size` interior points of `(β, c)`.
pub fn k_grid_max(params: &Params, grid_size: usize) -> Option<f64> {
    let cp = params.critical_points();
    let (beta, c) = (cp.beta?, cp.c?);
    interior_grid(beta, c, grid_size)
        .map(|u| k_with_beta(params, beta, u))
        .reduce(f64::max)
}

/// Everything the criteria pipeline computes for one `(p, ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub p: f64,
    pub omega: f64,
    #[serde(flatten)]
    pub critical: CriticalPoints,
    pub exists: bool,
    /// `lim f(u)/u` as `u → 0⁺`.
    pub h1_limit: f64,
    /// Point with `F > 0`.
    pub h2_witness: Option<f64>,
    pub basic_holds: bool,
    pub extended_holds: Option<bool>,
    pub k_alpha: Option<f64>,
    pub newton_point: Option<f64>,
    pub g_scan_monotone: bool,
    pub k_grid_max: Option<f64>,
    pub classification: Classification,
}

/// Runs the full pipeline. The `G` scan and the `k` grid maximum are
/// recorded but do not influence the classification.
pub fn classify(params: &Params) -> CriterionReport {
    let critical = params.critical_points();
    let exists = existence_check(params);
    let basic_holds = basic_criterion(params);
    let extended = if exists && !basic_holds {
        extended_criterion(params).ok()
    } else {
        None
    };
    let classification = if !exists {
        Classification::NoSolution
    } else if basic_holds {
        Classification::UniqueByBasic
    } else if extended.is_some_and(|e| e.holds) {
        Classification::UniqueByExtended
    } else {
        Classification::Undetermined
    };
    CriterionReport {
        p: params.p(),
        omega: params.omega(),
        critical,
        exists,
        h1_limit: h1_limit(params),
        h2_witness: critical.h2_witness(),
        basic_holds,
        extended_holds: extended.map(|e| e.holds),
        k_alpha: extended.map(|e| e.k_alpha),
        newton_point: extended.and_then(|e| e.newton_point),
        g_scan_monotone: exists && g_monotone_scan(params, REPORT_SCAN_POINTS).unwrap_or(false),
        k_grid_max: if exists { k_grid_max(params, REPORT_SCAN_POINTS) } else { None },
        classification,
    }
}

/// `k(α)` as a function of `ω` at fixed `p`.
fn k_alpha_at(p: f64, omega: f64) -> Result<f64> {
    let params = Params::planar(p, omega)?;
    let beta = require_beta(&params)?;
    Ok(k_with_beta(&params, beta, params.alpha()))
}

/// Locates `ω* ∈ (0, a_p)` where `k(α) = 0`, the lower edge of the region
/// certified by the extended criterion.
///
/// The bracket `[10⁻³·a_p, a_p(1 − 10⁻⁶)]` is validated first (`k(α) > 0`
/// at the low end, `< 0` at the high end); a failed validation is reported,
/// never widened.
pub fn find_omega_star(p: f64, tol: f64) -> Result<f64> {
    let ap = crate::nonlinearity::a_p(p)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tol must be > 0 (got {tol})")));
    }
    let lo = 1e-3 * ap;
    let hi = ap * (1.0 - 1e-6);
    let (k_lo, k_hi) = (k_alpha_at(p, lo)?, k_alpha_at(p, hi)?);
    if !(k_lo > 0.0 && k_hi < 0.0) {
        return Err(Error::BracketInvalid(format!(
            "k(alpha) must be > 0 at omega = {lo} and < 0 at omega = {hi}; got {k_lo}, {k_hi}"
        )));
    }
    bisect_root(lo, hi, tol, |w| k_alpha_at(p, w).unwrap_or(f64::NAN))
}
