//! Ground states of the double-power semilinear elliptic equation
//!
//! ```text
//! Δu − ωu + u^p − u^{2p−1} = 0  in ℝⁿ,   u(x) → 0 as |x| → ∞
//! ```
//!
//! * [`nonlinearity`]: `f`, `F`, `f′`, `f″` and the closed-form constants
//!   `ω_p`, `a_p`, `α`, `b`, `c`, `β`.
//! * [`criteria`]: existence, the uniqueness criteria and the classification
//!   of a parameter point.
//! * [`shooting`]: the radial shooting solver, ground-state profiles and the
//!   numeric count of positive solutions.
//! * [`sweep`]: `(p, ω)` grid sweeps and CSV/JSON output.
//!
//! The `book/` directory in the repository walks through the same material
//! with runnable examples; its code blocks are compiled as doc-tests of this
//! crate.

pub mod criteria;
pub mod error;
pub mod nonlinearity;
pub mod ode;
pub mod root;
pub mod shooting;
pub mod sweep;

pub use criteria::{classify, Classification, CriterionReport};
pub use error::{Error, Result};
pub use nonlinearity::{CriticalPoints, Params};
pub use shooting::{find_ground_state, integrate_shot, multiplicity_scan, SolverControls};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/nonlinearity.md")]
    mod nonlinearity {}
    #[doc = include_str!("../../../book/src/criteria.md")]
    mod criteria {}
    #[doc = include_str!("../../../book/src/shooting.md")]
    mod shooting {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
