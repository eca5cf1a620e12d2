//! Canned models used by `verify` and the acceptance suite.

use levykit::levycalc::{
    JumpDistribution, JumpMeasure, LevyTriplet, PredictableJumpSchedule, RepresentingFunction, ScheduledJump,
    Truncation,
};
use levykit::Result;

#[derive(Debug, Clone)]
pub struct CannedModel {
    pub name: &'static str,
    pub triplet: LevyTriplet,
    pub sched: PredictableJumpSchedule,
}

fn schedule() -> Result<PredictableJumpSchedule> {
    PredictableJumpSchedule::new(vec![
        ScheduledJump {
            time: 0.3,
            law: JumpDistribution::atoms([(-0.4, 0.25), (0.2, 0.75)])?,
        },
        ScheduledJump {
            time: 0.9,
            law: JumpDistribution::gaussian(0.0, 0.09)?,
        },
        ScheduledJump {
            time: 1.6,
            law: JumpDistribution::gaussian(0.05, 0.04)?,
        },
    ])
}

/// Brownian motion plus Gaussian compound Poisson jumps, and a pure-atom
/// model, each with and without scheduled jumps.
pub fn canned_models() -> Result<Vec<CannedModel>> {
    let cpp = LevyTriplet::new(0.05, 0.04, JumpMeasure::gaussian(1.0, -0.05, 0.04)?, Truncation::Bounded(1.0))?;
    let atoms = LevyTriplet::new(
        0.02,
        0.0225,
        JumpMeasure::atoms([(0.1, 2.0), (-0.15, 1.0)])?,
        Truncation::Zero,
    )?;
    Ok(vec![
        CannedModel {
            name: "bm_cpp",
            triplet: cpp.clone(),
            sched: PredictableJumpSchedule::empty(),
        },
        CannedModel {
            name: "bm_cpp_scheduled",
            triplet: cpp,
            sched: schedule()?,
        },
        CannedModel {
            name: "atoms",
            triplet: atoms.clone(),
            sched: PredictableJumpSchedule::empty(),
        },
        CannedModel {
            name: "atoms_scheduled",
            triplet: atoms,
            sched: schedule()?,
        },
    ])
}

/// Returns of three density processes `Z = 𝓔(ψ∘X)`.
pub fn canned_returns() -> Vec<(&'static str, RepresentingFunction)> {
    vec![
        ("esscher", RepresentingFunction::esscher(0.5)),
        ("exp_return", RepresentingFunction::ExpReturn(-0.8)),
        ("char_exp", RepresentingFunction::char_exp(2.0)),
    ]
}
