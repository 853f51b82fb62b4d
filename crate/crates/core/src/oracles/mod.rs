//! Finite-dimensional ground truth: entropies of density matrices, relative
//! entropy, Kosaki's variational lower bound, and randomized checks of the
//! matrix trace inequalities.

pub mod audit;
pub mod density;
pub mod inequalities;
pub mod kosaki;

pub use audit::{run_audit, run_audits, AuditRow, Inequality};
pub use density::{
    mutual_information_density, relative_entropy, von_neumann_entropy, DensityMatrix,
    PositiveMatrix,
};
pub use inequalities::{
    dominance_bound_check, dominance_constant, lieb_concavity_gap, lieb_convexity_gap,
    monotonicity_gap, sherman_davis_gap, ssa_gap, theorem_ab_gap,
};
pub use kosaki::{kosaki_lower_bound, StepPath};
