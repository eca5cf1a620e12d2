//! Mellin transforms of a signed stochastic exponential `𝓔(Y)_T`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::levycalc::{
    check_special, compensator, pushforward_triplet, LevyTriplet, PredictableJumpSchedule, RepresentingFunction,
    Truncation,
};
use crate::numkernel::{check_characteristic, invert_samples, DensityGrid, GridSpec, InversionSpec};

/// Sign probabilities below this are treated as zero when conditioning.
const NULL_PROBABILITY: f64 = 1e-15;
/// `ln(1e-300)`: compensators below this modulus are reported as zero.
const LOG_UNDERFLOW: f64 = -690.0;

/// Sign branch of `𝓔(Y)_T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `ξ₁ = |1 + id|^α 1{id ≠ −1} − 1`
    Modulus,
    /// `ξ₂ = |1 + id|^α (1{id > −1} − 1{id < −1}) − 1`
    Signed,
}

impl Branch {
    pub fn function(self, alpha: Complex64) -> RepresentingFunction {
        match self {
            Branch::Modulus => RepresentingFunction::ModulusPower(alpha),
            Branch::Signed => RepresentingFunction::SignedPower(alpha),
        }
    }
}

/// `Y = ξ∘X` over a Lévy driver with scheduled jumps, observed at `T`.
#[derive(Debug, Clone)]
pub struct SignedMellinModel {
    pub underlying: LevyTriplet,
    pub rep: RepresentingFunction,
    pub sched: PredictableJumpSchedule,
    pub horizon: f64,
    y: LevyTriplet,
    y_sched: PredictableJumpSchedule,
    y_intensity: f64,
    g0: (f64, f64),
}

/// Default grids for log-modulus subdensities and terminal wealth.
pub fn default_log_grid() -> GridSpec {
    GridSpec {
        x_min: -12.0,
        x_max: 3.0,
        n: 2048,
    }
}

pub fn default_wealth_grid() -> GridSpec {
    GridSpec {
        x_min: -20.0,
        x_max: 3.0,
        n: 4096,
    }
}

impl SignedMellinModel {
    pub fn new(
        underlying: LevyTriplet,
        rep: RepresentingFunction,
        sched: PredictableJumpSchedule,
        horizon: f64,
    ) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        let base = underlying.with_truncation(Truncation::Bounded(1.0))?;
        let y = pushforward_triplet(&rep, &base)?;
        let y_sched = sched.pushforward(&rep);
        let y_intensity = y.jumps.total_intensity()?;
        let mut model = Self {
            underlying,
            rep,
            sched,
            horizon,
            y,
            y_sched,
            y_intensity,
            g0: (0.0, 0.0),
        };
        let (gp, gm) = model.g_pair(Complex64::new(0.0, 0.0))?;
        model.g0 = (gp.re, gm.re);
        Ok(model)
    }

    /// Triplet of `Y`, quoted with `h = id·1{|id| ≤ 1}`.
    pub fn y_triplet(&self) -> &LevyTriplet {
        &self.y
    }

    pub fn y_schedule(&self) -> &PredictableJumpSchedule {
        &self.y_sched
    }

    /// Continuous-part drift rate `B^{ξ_j∘Y}` of branch `j`.
    pub fn mellin_drift(&self, alpha: Complex64, branch: Branch) -> Result<Complex64> {
        let xi = branch.function(alpha);
        check_special(&xi, &self.y)?;
        crate::levycalc::drift_rate(&xi, &self.y)
    }

    /// `E[f_j(𝓔(Y)_T; α)] = 𝓔(B^{ξ_j∘Y})_T`.
    pub fn branch_transform(&self, alpha: Complex64, branch: Branch) -> Result<Complex64> {
        let b = compensator(&branch.function(alpha), &self.y, &self.y_sched, self.horizon)?;
        if b.first_degenerate(self.horizon).is_some() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(b.stoch_exp(self.horizon))
    }

    /// Upper bound on `ln|𝓔(B^{ξ_j∘Y})_T|` valid on the imaginary axis.
    fn log_modulus_bound(&self, alpha: Complex64) -> Option<f64> {
        if alpha.re != 0.0 {
            return None;
        }
        let gauss = alpha * self.y.b + alpha * (alpha - 1.0) * (0.5 * self.y.sigma2);
        Some((gauss.re + (2.0 + alpha.norm()) * self.y_intensity) * self.horizon)
    }

    /// `(g₊(α), g₋(α))`.
    pub fn g_pair(&self, alpha: Complex64) -> Result<(Complex64, Complex64)> {
        if let Some(bound) = self.log_modulus_bound(alpha) {
            if bound < LOG_UNDERFLOW {
                return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
            }
        }
        let e1 = self.branch_transform(alpha, Branch::Modulus)?;
        let e2 = self.branch_transform(alpha, Branch::Signed)?;
        Ok(((e1 + e2) * 0.5, (e1 - e2) * 0.5))
    }

    /// `E[|𝓔(Y)_T|^α 1{𝓔(Y)_T > 0}]`.
    pub fn g_plus(&self, alpha: Complex64) -> Result<Complex64> {
        Ok(self.g_pair(alpha)?.0)
    }

    /// `E[|𝓔(Y)_T|^α 1{𝓔(Y)_T < 0}]`.
    pub fn g_minus(&self, alpha: Complex64) -> Result<Complex64> {
        Ok(self.g_pair(alpha)?.1)
    }

    /// `(P[𝓔(Y)_T > 0], P[𝓔(Y)_T < 0])`.
    pub fn sign_probabilities(&self) -> (f64, f64) {
        self.g0
    }

    /// Conditional characteristic function of `log|𝓔(Y)_T|` given `𝓔(Y)_T > 0`.
    pub fn phi_plus(&self, u: f64) -> Result<Complex64> {
        if self.g0.0 <= NULL_PROBABILITY {
            return Err(Error::ConditioningOnNull("positive sign"));
        }
        Ok(self.g_plus(Complex64::new(0.0, u))? / self.g0.0)
    }

    /// Conditional characteristic function of `log|𝓔(Y)_T|` given `𝓔(Y)_T < 0`.
    pub fn phi_minus(&self, u: f64) -> Result<Complex64> {
        if self.g0.1 <= NULL_PROBABILITY {
            return Err(Error::ConditioningOnNull("negative sign"));
        }
        Ok(self.g_minus(Complex64::new(0.0, u))? / self.g0.1)
    }

    /// Subdensities `(p₋, p₊)` of `log|𝓔(Y)_T|` on the events `𝓔(Y)_T < 0`
    /// and `𝓔(Y)_T > 0`; they integrate to `g₋(0)` and `g₊(0)`.
    pub fn subdensities(&self, spec: &InversionSpec) -> Result<(DensityGrid, DensityGrid)> {
        let (gp0, gm0) = self.g0;
        let us = spec.frequencies();
        // Frequencies where both conditional transforms are provably below
        // 1e-20 contribute nothing visible to the trapezoid sum.
        let smallest = [gp0, gm0].into_iter().filter(|g| *g > NULL_PROBABILITY).fold(1.0, f64::min);
        let negligible = (1e-20 * smallest).ln();
        let pairs: Vec<(Complex64, Complex64)> = us
            .par_iter()
            .map(|&u| {
                let alpha = Complex64::new(0.0, u);
                match self.log_modulus_bound(alpha) {
                    Some(bound) if bound < negligible => Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))),
                    _ => self.g_pair(alpha),
                }
            })
            .collect::<Result<_>>()?;
        let side = |g0: f64, pick: fn(&(Complex64, Complex64)) -> Complex64| -> Result<DensityGrid> {
            if g0 <= NULL_PROBABILITY {
                let x = spec.grid.points();
                let p = vec![0.0; x.len()];
                return Ok(DensityGrid::from_values(x, p));
            }
            let phi = |u: f64| -> Result<Complex64> {
                let (gp, gm) = self.g_pair(Complex64::new(0.0, u))?;
                Ok(pick(&(gp, gm)) / g0)
            };
            check_characteristic(&phi, spec.half_width)?;
            let values: Vec<Complex64> = pairs.iter().map(|p| pick(p) / g0).collect();
            Ok(invert_samples(&values, spec.half_width, &spec.grid)?.scaled(g0))
        };
        let minus = side(gm0, |p| p.1)?;
        let plus = side(gp0, |p| p.0)?;
        Ok((minus, plus))
    }

    /// Density of `1 − 𝓔(Y)_T` on `wealth`, from subdensities computed with `spec`.
    pub fn terminal_wealth_density(&self, spec: &InversionSpec, wealth: &GridSpec) -> Result<DensityGrid> {
        let (minus, plus) = self.subdensities(spec)?;
        wealth_from_subdensities(&minus, &plus, wealth)
    }
}

/// Change of variables `w = 1 − s·eˣ` applied to the two log-modulus
/// subdensities and summed.
pub fn wealth_from_subdensities(minus: &DensityGrid, plus: &DensityGrid, wealth: &GridSpec) -> Result<DensityGrid> {
    wealth.validate()?;
    let w = wealth.points();
    let p = w
        .iter()
        .map(|&w| {
            let d = 1.0 - w;
            if d > 0.0 {
                plus.interpolate(d.ln()) / d
            } else if d < 0.0 {
                minus.interpolate((-d).ln()) / -d
            } else {
                0.0
            }
        })
        .collect();
    Ok(DensityGrid::from_values(w, p))
}
