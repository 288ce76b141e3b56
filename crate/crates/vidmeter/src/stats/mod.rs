//! Significance testing, correlation, and rating standardization.
//!
//! - [`randomization_test`] — paired sign-flip test on per-topic score
//!   differences, exact for small topic sets and seeded Monte Carlo
//!   otherwise;
//! - [`significance_matrix`] / [`significance_groups`] — all-pairs tests
//!   over a set of runs and the indentation layout that groups runs no
//!   test can tell apart;
//! - [`pearson_matrix`] — correlation between metric score vectors;
//! - [`da_worker_qc`] / [`da_standardize`] — crowd rating quality control
//!   and per-worker z-standardization into system scoreboards.

mod da;
mod groups;
mod pearson;
mod randomization;

pub use da::{
    da_standardize, da_worker_qc, DaError, DaScoreboard, SystemDaScore, WorkerQc, WorkerStats,
};
pub use groups::{
    layout_text, significance_groups, significance_matrix, SignificanceGroup,
    SignificanceMatrix,
};
pub use pearson::{pearson, pearson_matrix, CorrelationMatrix, PearsonError};
pub use randomization::{
    exact_randomization_p, monte_carlo_randomization_p, randomization_test, RandomizationError,
    EXACT_ENUMERATION_LIMIT,
};
