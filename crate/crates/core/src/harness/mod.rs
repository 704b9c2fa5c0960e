//! Statistical comparison of simulations with exact formulas.

pub mod checks;
pub mod ldp;
pub mod report;
pub mod smoke;
pub mod stats;

pub use checks::{
    com_forms_agreement, compare_change_of_measure, coupling_check, delta_law, dirichlet_annealed_check,
    validate_local_time_formula, CouplingSummary, CylinderEvent, DeltaLawReport, DirichletCheck, KEventRow,
    LocalTimeCheck, LocalTimeTarget, TargetCounts,
};
pub use ldp::{ldp_empirical_check, occupation_probability, range_trend, tilt_for_profile, LdpReport, OccupationWindow, RangeTrend};
pub use report::{config_hash, verdict_for_error, EstimateReport, Thresholds, Verdict};
pub use smoke::{q_summary, tree_return_smoke, QSummary, ReturnPoint};
pub use stats::{chi_square_test, ks_test, lag1_autocorrelation, ChiSquareResult, KsResult, Tally};
