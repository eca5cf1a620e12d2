//! Jumps at deterministic predictable times.

use num_complex::Complex64;

use super::measure::{Atom, JumpMeasure};
use super::repfn::RepresentingFunction;
use crate::error::{invalid, Result};
use crate::numkernel::QuadratureSpec;

/// Law of a single scheduled jump, stored as a unit-mass jump measure.
#[derive(Debug, Clone)]
pub struct JumpDistribution(JumpMeasure);

impl JumpDistribution {
    pub fn gaussian(mean: f64, var: f64) -> Result<Self> {
        Ok(Self(JumpMeasure::gaussian(1.0, mean, var)?))
    }

    /// Atoms given as `(size, probability)`; a zero size means "no jump".
    pub fn atoms(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(size, weight)| Atom { size, weight })
            .collect();
        let m = JumpMeasure::Atoms(atoms.clone());
        m.validate()?;
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("atom probabilities must sum to 1, got {total}")));
        }
        Ok(Self(m))
    }

    /// Wraps a measure that is known to have unit mass.
    pub(crate) fn from_measure(m: JumpMeasure) -> Self {
        Self(m)
    }

    pub fn measure(&self) -> &JumpMeasure {
        &self.0
    }

    /// `E[f(ΔX)]`.
    pub fn expect(&self, f: &dyn Fn(Complex64) -> Complex64, breaks: &[f64], spec: &QuadratureSpec) -> Result<Complex64> {
        self.0.integrate(f, breaks, spec)
    }

    pub fn pushforward(&self, map: &RepresentingFunction) -> Self {
        Self(self.0.clone().transformed(map.clone()))
    }
}

#[derive(Debug, Clone)]
pub struct ScheduledJump {
    pub time: f64,
    pub law: JumpDistribution,
}

#[derive(Debug, Clone, Default)]
pub struct PredictableJumpSchedule {
    entries: Vec<ScheduledJump>,
}

impl PredictableJumpSchedule {
    pub fn new(entries: Vec<ScheduledJump>) -> Result<Self> {
        let mut prev = 0.0;
        for e in &entries {
            if !(e.time.is_finite() && e.time > prev) {
                return Err(invalid(format!(
                    "scheduled times must be positive and strictly increasing, got {} after {prev}",
                    e.time
                )));
            }
            prev = e.time;
        }
        Ok(Self { entries })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[ScheduledJump] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn up_to(&self, t_end: f64) -> impl Iterator<Item = &ScheduledJump> {
        self.entries.iter().take_while(move |e| e.time <= t_end)
    }

    pub fn pushforward(&self, map: &RepresentingFunction) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| ScheduledJump {
                    time: e.time,
                    law: e.law.pushforward(map),
                })
                .collect(),
        }
    }
}
