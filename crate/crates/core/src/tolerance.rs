use serde::{Deserialize, Serialize};

/// Tolerances shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative tolerance for equality tests (equilateral sets, distance clustering).
    pub equality: f64,
    /// Absolute residual allowed in the Radon weight system, relative to coordinate scale.
    pub residual: f64,
    /// Relative slack allowed on each audited inequality.
    pub slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { equality: 1e-9, residual: 1e-10, slack: 1e-9 }
    }
}

impl Tolerances {
    /// The same value for every tolerance; this is what `--tol` sets.
    pub fn uniform(tol: f64) -> Self {
        Tolerances { equality: tol, residual: tol, slack: tol }
    }
}
