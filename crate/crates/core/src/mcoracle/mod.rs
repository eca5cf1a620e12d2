//! Exact Monte Carlo oracle for finite-activity drivers.

mod importance;
mod sim;
mod stats;

pub use importance::{density_weights, importance_weighted, ImportanceEstimate};
pub use sim::{
    pathwise_stoch_exp, simulate, simulate_with_poisson_arrivals, PathRecord, SimConfig, StochExpEvaluator,
};
pub use stats::{empirical_char_fn, estimate, estimate_real, histogram, sign_frequency, Estimate, HistogramBin};
