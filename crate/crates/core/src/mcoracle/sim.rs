//! Exact simulation of finite-activity Lévy paths with scheduled jumps.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::levycalc::{Atom, JumpDistribution, JumpMeasure, LevyTriplet, PredictableJumpSchedule, RepresentingFunction};
use crate::numkernel::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_paths: usize,
    pub seed: u64,
    pub horizon: f64,
    /// Pair paths `2k` and `2k+1` with opposite Brownian draws.
    pub antithetic: bool,
}

impl SimConfig {
    pub fn new(n_paths: usize, seed: u64, horizon: f64) -> Self {
        Self {
            n_paths,
            seed,
            horizon,
            antithetic: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(invalid("n_paths must be at least 1"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(invalid(format!("horizon must be positive, got {}", self.horizon)));
        }
        Ok(())
    }
}

/// Everything needed to evaluate terminal functionals of one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    /// `σW_T`.
    pub brownian_terminal: f64,
    pub jump_times: Vec<f64>,
    pub jump_sizes: Vec<f64>,
    pub scheduled_times: Vec<f64>,
    pub scheduled_jumps: Vec<f64>,
}

impl PathRecord {
    /// `X_T − X_0` given the drift under `h = 0`.
    pub fn terminal_value(&self, pure_drift: f64, horizon: f64) -> f64 {
        pure_drift * horizon
            + self.brownian_terminal
            + self.jump_sizes.iter().sum::<f64>()
            + self.scheduled_jumps.iter().sum::<f64>()
    }

    pub fn all_jumps(&self) -> impl Iterator<Item = f64> + '_ {
        self.jump_sizes.iter().chain(&self.scheduled_jumps).copied()
    }
}

enum Sampler<'a> {
    None,
    Gaussian { rate: f64, mean: f64, sd: f64 },
    Atoms { rate: f64, atoms: &'a [Atom] },
}

fn sampler(m: &JumpMeasure) -> Result<Sampler<'_>> {
    match m {
        JumpMeasure::GaussianCpp { intensity, mean, var } => Ok(if *intensity == 0.0 {
            Sampler::None
        } else {
            Sampler::Gaussian {
                rate: *intensity,
                mean: *mean,
                sd: var.sqrt(),
            }
        }),
        JumpMeasure::Atoms(atoms) => {
            let rate: f64 = atoms.iter().map(|a| a.weight).sum();
            Ok(if rate == 0.0 { Sampler::None } else { Sampler::Atoms { rate, atoms } })
        }
        other => Err(Error::UnsupportedJumpMeasure(format!(
            "only Gaussian and atomic jump laws can be sampled, got {}",
            kind(other)
        ))),
    }
}

fn kind(m: &JumpMeasure) -> &'static str {
    match m {
        JumpMeasure::GaussianCpp { .. } => "gaussian",
        JumpMeasure::Atoms(_) => "atoms",
        JumpMeasure::Transformed { .. } => "transformed",
        JumpMeasure::Tilted { .. } => "tilted",
    }
}

fn pick_atom(atoms: &[Atom], total: f64, rng: &mut RngStream) -> f64 {
    let target = rng.uniform() * total;
    let mut acc = 0.0;
    for a in atoms {
        acc += a.weight;
        if target < acc {
            return a.size;
        }
    }
    atoms.iter().rev().find(|a| a.weight > 0.0).map_or(0.0, |a| a.size)
}

impl Sampler<'_> {
    fn draw(&self, rng: &mut RngStream) -> f64 {
        match self {
            Sampler::None => 0.0,
            Sampler::Gaussian { mean, sd, .. } => mean + sd * rng.normal(),
            Sampler::Atoms { rate, atoms } => pick_atom(atoms, *rate, rng),
        }
    }

    fn rate(&self) -> f64 {
        match self {
            Sampler::None => 0.0,
            Sampler::Gaussian { rate, .. } | Sampler::Atoms { rate, .. } => *rate,
        }
    }
}

fn law_sampler(law: &JumpDistribution) -> Result<Sampler<'_>> {
    sampler(law.measure())
}

/// Randomly timed jumps of `X` on `(0, T]`: Poisson count, uniform times,
/// i.i.d. sizes.
fn poisson_jumps(s: &Sampler<'_>, horizon: f64, rng: &mut RngStream) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = rng.poisson(s.rate() * horizon)? as usize;
    let mut times: Vec<f64> = (0..n).map(|_| horizon * (1.0 - rng.uniform())).collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sizes = (0..n).map(|_| s.draw(rng)).collect();
    Ok((times, sizes))
}

struct PathPlan<'a> {
    sigma: f64,
    jumps: Sampler<'a>,
    scheduled: Vec<(f64, Sampler<'a>)>,
    extra: Option<(f64, Sampler<'a>)>,
}

impl PathPlan<'_> {
    fn path(&self, cfg: &SimConfig, index: usize) -> Result<PathRecord> {
        let (stream, sign) = if cfg.antithetic {
            ((index / 2) as u64, if index.is_multiple_of(2) { 1.0 } else { -1.0 })
        } else {
            (index as u64, 1.0)
        };
        let mut rng = RngStream::new(cfg.seed, stream);
        let brownian_terminal = sign * self.sigma * cfg.horizon.sqrt() * rng.normal();
        let (jump_times, jump_sizes) = poisson_jumps(&self.jumps, cfg.horizon, &mut rng)?;
        let mut scheduled_times = Vec::new();
        let mut scheduled_jumps = Vec::new();
        for (time, law) in &self.scheduled {
            scheduled_times.push(*time);
            scheduled_jumps.push(law.draw(&mut rng));
        }
        if let Some((theta, law)) = &self.extra {
            let arrivals = Sampler::Atoms {
                rate: *theta,
                atoms: &[Atom { size: 0.0, weight: 1.0 }],
            };
            let (times, _) = poisson_jumps(&arrivals, cfg.horizon, &mut rng)?;
            for t in times {
                scheduled_times.push(t);
                scheduled_jumps.push(law.draw(&mut rng));
            }
        }
        Ok(PathRecord {
            brownian_terminal,
            jump_times,
            jump_sizes,
            scheduled_times,
            scheduled_jumps,
        })
    }

    fn run(&self, cfg: &SimConfig) -> Result<Vec<PathRecord>> {
        cfg.validate()?;
        (0..cfg.n_paths).into_par_iter().map(|i| self.path(cfg, i)).collect()
    }
}

/// Simulates `n_paths` independent paths on `[0, T]`; path `i` depends only
/// on `(seed, i)`.
pub fn simulate(t: &LevyTriplet, sched: &PredictableJumpSchedule, cfg: &SimConfig) -> Result<Vec<PathRecord>> {
    let scheduled = sched
        .up_to(cfg.horizon)
        .map(|e| Ok((e.time, law_sampler(&e.law)?)))
        .collect::<Result<Vec<_>>>()?;
    PathPlan {
        sigma: t.sigma2.sqrt(),
        jumps: sampler(&t.jumps)?,
        scheduled,
        extra: None,
    }
    .run(cfg)
}

/// As [`simulate`], but the extra jumps arrive at the times of an independent
/// Poisson process with rate `theta` and are recorded as scheduled jumps.
pub fn simulate_with_poisson_arrivals(
    t: &LevyTriplet,
    theta: f64,
    law: &JumpDistribution,
    cfg: &SimConfig,
) -> Result<Vec<PathRecord>> {
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(invalid(format!("arrival rate must be non-negative, got {theta}")));
    }
    PathPlan {
        sigma: t.sigma2.sqrt(),
        jumps: sampler(&t.jumps)?,
        scheduled: Vec::new(),
        extra: Some((theta, law_sampler(law)?)),
    }
    .run(cfg)
}

/// Pathwise `𝓔(ξ∘X)_T = exp(ξ′(0)(μ₀T + σW_T) + ½ξ″(0)σ²T − ½ξ′(0)²σ²T) ∏(1 + ξ(ΔX))`,
/// with `μ₀` the drift under `h = 0`. Scheduled jumps may use their own `ξ`.
#[derive(Debug, Clone)]
pub struct StochExpEvaluator {
    xi: RepresentingFunction,
    xi_dp: Option<RepresentingFunction>,
    d0: Complex64,
    d20: Complex64,
    mu0: f64,
    sigma2: f64,
}

impl StochExpEvaluator {
    pub fn new(xi: &RepresentingFunction, t: &LevyTriplet) -> Result<Self> {
        Ok(Self {
            xi: xi.clone(),
            xi_dp: None,
            d0: xi.d0(),
            d20: xi.d20(),
            mu0: t.pure_drift()?,
            sigma2: t.sigma2,
        })
    }

    pub fn with_scheduled(mut self, xi_dp: &RepresentingFunction) -> Self {
        self.xi_dp = Some(xi_dp.clone());
        self
    }

    pub fn evaluate(&self, path: &PathRecord, horizon: f64) -> Result<Complex64> {
        let continuous = self.d0 * (self.mu0 * horizon + path.brownian_terminal)
            + (self.d20 - self.d0 * self.d0) * (0.5 * self.sigma2 * horizon);
        let mut v = continuous.exp();
        let dp = self.xi_dp.as_ref().unwrap_or(&self.xi);
        let factors = path
            .jump_sizes
            .iter()
            .map(|x| (*x, &self.xi))
            .chain(path.scheduled_jumps.iter().map(|x| (*x, dp)));
        for (x, xi) in factors {
            let f = Complex64::new(1.0, 0.0) + xi.eval_real(x);
            if f.re.is_nan() || f.im.is_nan() {
                return Err(Error::IncompatibleJump { jump: x });
            }
            if f == Complex64::new(0.0, 0.0) {
                return Ok(f);
            }
            v *= f;
        }
        Ok(v)
    }

    pub fn evaluate_all(&self, paths: &[PathRecord], horizon: f64) -> Result<Vec<Complex64>> {
        paths.par_iter().map(|p| self.evaluate(p, horizon)).collect()
    }
}

pub fn pathwise_stoch_exp(
    xi: &RepresentingFunction,
    t: &LevyTriplet,
    path: &PathRecord,
    horizon: f64,
) -> Result<Complex64> {
    StochExpEvaluator::new(xi, t)?.evaluate(path, horizon)
}
