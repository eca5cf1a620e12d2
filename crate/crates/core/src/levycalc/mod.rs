//! Lévy triplets, representing functions and their compensators.

pub mod calculus;
pub mod measure;
pub mod repfn;
pub mod schedule;

pub use calculus::{
    check_special, compensator, dp_drift, drift_rate, expected_exp_utility, expected_stoch_exp,
    exponential_compensator, is_special, levy_khintchin, mult_compensator, pushforward_triplet, Compensator,
    UtilityParams,
};
pub use measure::{Atom, JumpMeasure, LevyTriplet, Truncation, GAUSSIAN_WINDOW};
pub use repfn::{Jet, RepresentingFunction};
pub use schedule::{JumpDistribution, PredictableJumpSchedule, ScheduledJump};
