//! Expectations under a Girsanov measure by reweighting `P`-paths.

use num_complex::Complex64;

use super::sim::{simulate, PathRecord, SimConfig, StochExpEvaluator};
use super::stats::{estimate, Estimate};
use crate::error::Result;
use crate::measurechange::GirsanovTilt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImportanceEstimate {
    /// `E_P[M_T·f]`.
    pub estimate: Estimate,
    /// `E_P[M_T]`, which should be 1.
    pub mass: Estimate,
}

/// Weights `M_T = 𝓔(ψ∘X)_T / 𝓔(B^{ψ∘X})_T` for the given paths.
pub fn density_weights(tilt: &GirsanovTilt, paths: &[PathRecord], horizon: f64) -> Result<Vec<f64>> {
    let norm = tilt.normaliser(horizon)?;
    let z = StochExpEvaluator::new(&tilt.psi, &tilt.underlying)?.evaluate_all(paths, horizon)?;
    Ok(z.iter().map(|v| v.re / norm).collect())
}

/// `E_Q[f]` estimated as `E_P[M_T·f]` over `cfg.n_paths` paths simulated under `P`.
pub fn importance_weighted<F>(tilt: &GirsanovTilt, functional: F, cfg: &SimConfig) -> Result<ImportanceEstimate>
where
    F: Fn(&PathRecord) -> Result<Complex64>,
{
    let paths = simulate(&tilt.underlying, &tilt.sched, cfg)?;
    let w = density_weights(tilt, &paths, cfg.horizon)?;
    let weighted = paths
        .iter()
        .zip(&w)
        .map(|(p, w)| Ok(functional(p)? * *w))
        .collect::<Result<Vec<_>>>()?;
    let mass: Vec<Complex64> = w.iter().map(|w| Complex64::new(*w, 0.0)).collect();
    Ok(ImportanceEstimate {
        estimate: estimate(&weighted)?,
        mass: estimate(&mass)?,
    })
}
