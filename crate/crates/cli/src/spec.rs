//! JSON model specification.

use anyhow::{bail, ensure, Context, Result};
use levykit::levycalc::{
    JumpDistribution, JumpMeasure, LevyTriplet, PredictableJumpSchedule, RepresentingFunction, ScheduledJump,
    Truncation, UtilityParams,
};
use levykit::numkernel::{GridSpec, InversionSpec};
use levykit::signedexp::{default_log_grid, default_wealth_grid};
use levykit::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub levy: LevySpec,
    #[serde(default)]
    pub schedule: Vec<ScheduleEntrySpec>,
    #[serde(default)]
    pub representation: Option<RepSpec>,
    #[serde(default)]
    pub tilt: Option<RepSpec>,
    pub horizon: f64,
    #[serde(default)]
    pub grids: Option<GridsSpec>,
    #[serde(default)]
    pub sim: Option<SimSpec>,
    #[serde(default)]
    pub utility: Option<UtilitySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevySpec {
    /// Drift rate relative to `truncation`.
    pub mu: f64,
    pub sigma: f64,
    #[serde(default)]
    pub jump: JumpSpec,
    #[serde(default)]
    pub truncation: TruncationSpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpSpec {
    #[default]
    None,
    GaussianCpp { intensity: f64, mean: f64, var: f64 },
    Atoms { atoms: Vec<AtomSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub size: f64,
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TruncationSpec {
    #[default]
    Identity,
    Zero,
    Bounded { c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntrySpec {
    pub time: f64,
    pub law: LawSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    Gaussian { mean: f64, var: f64 },
    Atoms { atoms: Vec<LawAtomSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawAtomSpec {
    pub size: f64,
    pub prob: f64,
}

/// Catalog entry of a representing function. Complex parameters default to
/// a zero imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum RepSpec {
    Identity,
    Affine {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    ExpReturn { a: f64 },
    Exponential {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    CharExp { u: f64 },
    Esscher { theta: f64 },
    PrincipalLog,
    ModulusPower {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    SignedPower {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    IndicatorMinusOne,
    Reciprocal,
    ExpUtility { lambda: f64 },
    Sum { f: Box<RepSpec>, g: Box<RepSpec> },
    Product { f: Box<RepSpec>, g: Box<RepSpec> },
    Yor { f: Box<RepSpec>, g: Box<RepSpec> },
    Compose { outer: Box<RepSpec>, inner: Box<RepSpec> },
    Scale {
        re: f64,
        #[serde(default)]
        im: f64,
        f: Box<RepSpec>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    #[serde(rename = "U")]
    pub half_width: f64,
    pub n_u: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub n_paths: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilitySpec {
    pub lambda_l: f64,
    pub lambda_v: f64,
    pub theta: f64,
    pub law: LawSpec,
}

fn finite(name: &str, v: f64) -> Result<()> {
    ensure!(v.is_finite(), "{name} must be finite, got {v}");
    Ok(())
}

impl RepSpec {
    fn check(&self) -> Result<()> {
        match self {
            RepSpec::Identity | RepSpec::PrincipalLog | RepSpec::IndicatorMinusOne | RepSpec::Reciprocal => Ok(()),
            RepSpec::Affine { re, im }
            | RepSpec::Exponential { re, im }
            | RepSpec::ModulusPower { re, im }
            | RepSpec::SignedPower { re, im } => {
                finite("re", *re)?;
                finite("im", *im)
            }
            RepSpec::ExpReturn { a } => finite("a", *a),
            RepSpec::CharExp { u } => finite("u", *u),
            RepSpec::Esscher { theta } => finite("theta", *theta),
            RepSpec::ExpUtility { lambda } => finite("lambda", *lambda),
            RepSpec::Sum { f, g } | RepSpec::Product { f, g } | RepSpec::Yor { f, g } => {
                f.check()?;
                g.check()
            }
            RepSpec::Compose { outer, inner } => {
                outer.check()?;
                inner.check()
            }
            RepSpec::Scale { re, im, f } => {
                finite("re", *re)?;
                finite("im", *im)?;
                f.check()
            }
        }
    }

    pub fn build(&self) -> RepresentingFunction {
        type R = RepresentingFunction;
        let z = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            RepSpec::Identity => R::Identity,
            RepSpec::Affine { re, im } => R::Affine(z(*re, *im)),
            RepSpec::ExpReturn { a } => R::ExpReturn(*a),
            RepSpec::Exponential { re, im } => R::Exponential(z(*re, *im)),
            RepSpec::CharExp { u } => R::char_exp(*u),
            RepSpec::Esscher { theta } => R::esscher(*theta),
            RepSpec::PrincipalLog => R::PrincipalLog,
            RepSpec::ModulusPower { re, im } => R::ModulusPower(z(*re, *im)),
            RepSpec::SignedPower { re, im } => R::SignedPower(z(*re, *im)),
            RepSpec::IndicatorMinusOne => R::IndicatorMinusOne,
            RepSpec::Reciprocal => R::Reciprocal,
            RepSpec::ExpUtility { lambda } => R::exp_utility(*lambda),
            RepSpec::Sum { f, g } => R::sum(f.build(), g.build()),
            RepSpec::Product { f, g } => R::product(f.build(), g.build()),
            RepSpec::Yor { f, g } => R::yor(f.build(), g.build()),
            RepSpec::Compose { outer, inner } => R::compose(outer.build(), inner.build()),
            RepSpec::Scale { re, im, f } => R::scale(z(*re, *im), f.build()),
        }
    }
}

impl LawSpec {
    pub fn build(&self) -> Result<JumpDistribution> {
        Ok(match self {
            LawSpec::Gaussian { mean, var } => JumpDistribution::gaussian(*mean, *var)?,
            LawSpec::Atoms { atoms } => JumpDistribution::atoms(atoms.iter().map(|a| (a.size, a.prob)))?,
        })
    }
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text).context("model specification does not match the schema")?;
        spec.validate()?;
        Ok(spec)
    }

    /// Schema-level checks plus construction of every library object.
    pub fn validate(&self) -> Result<()> {
        finite("levy.mu", self.levy.mu)?;
        finite("levy.sigma", self.levy.sigma)?;
        ensure!(self.levy.sigma >= 0.0, "levy.sigma must be non-negative");
        finite("horizon", self.horizon)?;
        ensure!(self.horizon > 0.0, "horizon must be positive");
        for r in self.representation.iter().chain(&self.tilt) {
            r.check()?;
        }
        if let Some(g) = &self.grids {
            finite("grids.x_min", g.x_min)?;
            finite("grids.x_max", g.x_max)?;
            finite("grids.U", g.half_width)?;
            ensure!(g.half_width > 0.0, "grids.U must be positive");
            ensure!(g.n_u >= 2, "grids.n_u must be at least 2");
        }
        if let Some(s) = &self.sim {
            ensure!(s.n_paths >= 2, "sim.n_paths must be at least 2");
        }
        self.triplet()?;
        self.schedule()?;
        self.inversion()?;
        if let Some(u) = &self.utility {
            self.utility_params(u)?.validate()?;
        }
        Ok(())
    }

    pub fn triplet(&self) -> Result<LevyTriplet> {
        let jumps = match &self.levy.jump {
            JumpSpec::None => JumpMeasure::none(),
            JumpSpec::GaussianCpp { intensity, mean, var } => JumpMeasure::gaussian(*intensity, *mean, *var)?,
            JumpSpec::Atoms { atoms } => JumpMeasure::atoms(atoms.iter().map(|a| (a.size, a.intensity)))?,
        };
        let trunc = match self.levy.truncation {
            TruncationSpec::Identity => Truncation::Identity,
            TruncationSpec::Zero => Truncation::Zero,
            TruncationSpec::Bounded { c } => Truncation::Bounded(c),
        };
        Ok(LevyTriplet::new(self.levy.mu, self.levy.sigma * self.levy.sigma, jumps, trunc)?)
    }

    pub fn schedule(&self) -> Result<PredictableJumpSchedule> {
        let entries = self
            .schedule
            .iter()
            .map(|e| {
                Ok(ScheduledJump {
                    time: e.time,
                    law: e.law.build()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PredictableJumpSchedule::new(entries)?)
    }

    pub fn representation(&self) -> Result<RepresentingFunction> {
        match &self.representation {
            Some(r) => Ok(r.build()),
            None => bail!("this command needs a \"representation\" section"),
        }
    }

    pub fn tilt(&self) -> Result<RepresentingFunction> {
        match &self.tilt {
            Some(r) => Ok(r.build()),
            None => bail!("this command needs a \"tilt\" section"),
        }
    }

    /// Inversion settings for log-modulus subdensities.
    pub fn inversion(&self) -> Result<InversionSpec> {
        let Some(g) = &self.grids else {
            return Ok(InversionSpec::new(default_log_grid()));
        };
        let grid = GridSpec::new(g.x_min, g.x_max, g.n)?;
        Ok(InversionSpec {
            half_width: g.half_width,
            n_points: 2 * g.n_u,
            ..InversionSpec::new(grid)
        })
    }

    /// Wealth grid; widened proportionally to the log grid when `grids` is set.
    pub fn wealth_grid(&self) -> Result<GridSpec> {
        match &self.grids {
            None => Ok(default_wealth_grid()),
            Some(g) => Ok(GridSpec::new(1.0 - g.x_max.exp(), 1.0 + g.x_max.exp(), 2 * g.n)?),
        }
    }

    /// `u`-grid from `grids` or `[-20, 20]` with 101 points.
    pub fn u_grid(&self) -> Vec<f64> {
        let (half, n) = self.grids.map_or((20.0, 101), |g| (g.half_width, g.n_u));
        (0..n).map(|k| -half + 2.0 * half * k as f64 / (n - 1) as f64).collect()
    }

    pub fn utility_params(&self, u: &UtilitySpec) -> Result<UtilityParams> {
        Ok(UtilityParams {
            lambda_l: u.lambda_l,
            lambda_v: u.lambda_v,
            levy: self.triplet()?,
            theta: u.theta,
            law: u.law.build()?,
            horizon: self.horizon,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_nested_representation() {
        let spec = ModelSpec::parse(
            r#"{"levy": {"mu": 0.1, "sigma": 0.2},
                "representation": {"id": "yor", "f": {"id": "exp_return", "a": 2}, "g": {"id": "char_exp", "u": 1}},
                "horizon": 2}"#,
        )
        .unwrap();
        let t = spec.triplet().unwrap();
        assert_eq!(t.trunc, Truncation::Identity);
        assert!(t.jumps.is_zero());
        assert!((t.sigma2 - 0.04).abs() < 1e-17);
        assert!(spec.schedule().unwrap().is_empty());
        assert_eq!(spec.representation().unwrap().to_string(), RepresentingFunction::yor(
            RepresentingFunction::ExpReturn(2.0),
            RepresentingFunction::char_exp(1.0),
        )
        .to_string());
        assert!(spec.tilt().is_err());
        assert_eq!(spec.u_grid().len(), 101);
    }

    #[test]
    fn grids_map_to_inversion_settings() {
        let spec = ModelSpec::parse(
            r#"{"levy": {"mu": 0, "sigma": 0.2}, "horizon": 1,
                "grids": {"x_min": -4, "x_max": 2, "n": 64, "U": 50, "n_u": 512}}"#,
        )
        .unwrap();
        let inv = spec.inversion().unwrap();
        assert_eq!(inv.half_width, 50.0);
        assert_eq!(inv.half_nodes(), 512);
        assert_eq!(inv.grid.n, 64);
        assert_eq!(spec.u_grid()[0], -50.0);
    }

    #[test]
    fn rejects_invalid_values() {
        assert!(ModelSpec::parse(r#"{"levy": {"mu": 0, "sigma": 0.2}, "horizon": 0}"#).is_err());
        assert!(ModelSpec::parse(
            r#"{"levy": {"mu": 0, "sigma": 0.2, "jump": {"type": "atoms", "atoms": [{"size": 0, "intensity": 1}]}}, "horizon": 1}"#
        )
        .is_err());
        assert!(ModelSpec::parse(r#"{"levy": {"mu": 0, "sigma": 0.2}, "horizon": 1, "sim": {"n_paths": 1, "seed": 0}}"#).is_err());
    }
}
