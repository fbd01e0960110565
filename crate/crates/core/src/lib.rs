//! Distance-ratio geometry in `l_p^n`.
//!
//! The crate is organised around a handful of modules:
//!
//! * [`lpgeom`]: points, p-norms, distance ratios and equilateral tests.
//! * [`bounds`]: closed-form lower bounds on the max/min distance ratio of
//!   `n + 2` points in `l_2^n` and `l_4^n`, and the exponent windows around
//!   `p = 2` and `p = 4` in which no `n + 2` point equilateral set exists.
//! * [`radon`]: Radon partitions of `n + 2` points and the per-instance
//!   fourth-power certificate, plus a numerical audit of every inequality the
//!   certificate is derived from.
//! * [`construct`]: the explicit `n + 2` point sets in `l_4^n` built from two
//!   blocks of permuted vectors, and the scalar root solves behind them.
//! * [`search`]: seeded derivative-free minimisation of the `l_4` distance
//!   ratio, used to probe how far the lower bound is from being attained.

pub mod bounds;
pub mod construct;
mod error;
pub mod format;
pub mod linalg;
pub mod lpgeom;
pub mod radon;
pub mod roots;
pub mod search;
pub mod sum;
mod tolerance;

pub use bounds::{epsilon_threshold, norm_equivalence_factor, schuette_bound, BoundRow, BoundTable};
pub use construct::{
    build_configuration, build_configuration_with, solve_system, solve_system_with, BuiltConfiguration,
    ConstructionSolution,
};
pub use error::{Error, Result};
pub use lpgeom::{distance, is_equilateral, p_norm, ratio_report, Configuration, EquilateralCheck, Point, RatioReport};
pub use radon::{
    audit_chain, audit_chain_with, certificate_bound, radon_partition, radon_partition_with, ChainAudit,
    RadonCertificate,
};
pub use search::{minimize_ratio, SearchResult, Seeds};
pub use tolerance::Tolerances;
