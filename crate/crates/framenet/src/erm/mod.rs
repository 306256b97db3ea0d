//! Empirical risks, approximate empirical risk minimization, error metrics,
//! rate studies and closed-form rate calculators.

mod metrics;
mod rates;
mod regression;
mod risk;
mod study;
mod train;

pub use metrics::{l2_gamma_error, mean_and_stderr, TestSet};
pub use rates::{kappa_general, predict_delta_n, torus_rate, DeltaRegime, TorusPipeline, TorusRate};
pub use regression::{regression_study, sieve_terms, FourierSieve, RegressionConfig};
pub use risk::{empirical_norm, empirical_risk, empirical_risk_ls, FnPredictor, Predictor};
pub use study::{
    budget_schedule, fit_loglog_slope, rate_study, surrogate_study, RateStudy, StudyConfig, StudyRow, StudySummary,
    SurrogatePoint, SurrogateStudyConfig,
};
pub use train::{train_erm, RestartReport, TrainConfig, TrainReport, TrainedModel};
