//! Norms, executable property checks and the dense reference solution.

mod checks;
mod norms;
mod oracle;
mod report;

pub use checks::{
    check_comparison, check_contraction, check_contraction_within, check_convergence, difference_series, stationary_target,
    Check, CheckContext, CheckRegistry, CONVERGENCE_TOL, EQUALITY_TOL, MONOTONE_SLACK, ORDER_TOL,
    SIGN_FLOOR, STRICT_RATIO, STRICT_WINDOW,
};
pub use norms::{species_l1, species_min, weighted_l1_distance, weighted_mass};
pub use oracle::{fitted_order, oracle_compare, oracle_expm, EXACT_AGREEMENT, MIN_ORDER, ORACLE_CAP};
pub use report::{CheckReport, Criterion, DifferenceSeries};
