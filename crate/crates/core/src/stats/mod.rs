//! Statistical utilities: five-number summaries, rank correlation with a
//! bootstrap interval, probit regression and the German-tank estimator.

mod probit;
mod spearman;
mod summary;
mod tank;

pub use probit::{probit_fit, probit_fit_with, probit_gradient, probit_hessian, probit_log_likelihood, ProbitFit, ProbitOptions};
pub use spearman::{bootstrap_ci, midranks, pearson, spearman_rho, BootstrapInterval};
pub use summary::{five_number_summary, mean, median, quantile_sorted, FiveNumberSummary};
pub use tank::{german_tank, german_tank_ci, german_tank_point, TankEstimate};

use serde::Serialize;

/// One statistic as emitted in JSON result files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatRecord {
    pub statistic: String,
    pub group: Option<String>,
    pub value: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub n: usize,
    pub seed: Option<u64>,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}
