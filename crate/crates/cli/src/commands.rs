//! Command implementations; each returns a populated envelope.

use anyhow::{ensure, Result};
use levykit::levycalc::{
    expected_exp_utility, expected_stoch_exp, levy_khintchin, mult_compensator, LevyTriplet,
    PredictableJumpSchedule, RepresentingFunction,
};
use levykit::mcoracle::{
    estimate, histogram, importance_weighted, sign_frequency, simulate, simulate_with_poisson_arrivals, Estimate,
    PathRecord, SimConfig, StochExpEvaluator,
};
use levykit::measurechange::{q_characteristics, q_expected_stoch_exp, q_mult_compensator, unit_mass, GirsanovTilt};
use levykit::numkernel::DensityGrid;
use levykit::signedexp::{
    default_log_grid, mv_optimal_fraction, wealth_from_subdensities, MvParams, SignedMellinModel,
};
use levykit::Complex64;

use crate::canned::canned_models;
use crate::envelope::{Check, ResultEnvelope, Scalar, Table};
use crate::spec::ModelSpec;

/// Relative tolerance quoted for quadrature-based outputs.
pub const QUAD_TOL: f64 = 1e-10;
/// Statistical acceptance threshold in standard errors.
pub const Z_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    /// Emit per-path tables.
    pub raw: bool,
}

const DEFAULT_SEED: u64 = 20240601;

fn sim_config(spec: Option<&ModelSpec>, opts: &Options, default_paths: usize, horizon: f64) -> SimConfig {
    let from_spec = spec.and_then(|s| s.sim);
    SimConfig::new(
        opts.paths.or(from_spec.map(|s| s.n_paths)).unwrap_or(default_paths),
        opts.seed.or(from_spec.map(|s| s.seed)).unwrap_or(DEFAULT_SEED),
        horizon,
    )
}

fn stat_check(env: &mut ResultEnvelope, name: &str, e: &Estimate, target: Complex64) {
    env.checks.push(Check::new(format!("{name} (z-score)"), e.z_score(target), Z_LIMIT));
}

pub fn charfn(env: &mut ResultEnvelope, spec: &ModelSpec, us: Option<&[f64]>) -> Result<()> {
    let t = spec.triplet()?;
    let sched = spec.schedule()?;
    let grid = spec.u_grid();
    let explicit = us.is_some();
    let mut table = Table::new("charfn", "characteristic function of X_T", &["u", "re", "im"]);
    for &u in us.unwrap_or(&grid) {
        let v = levy_khintchin(u, &t, &sched, spec.horizon)?;
        table.push(vec![u, v.re, v.im]);
        if explicit {
            env.output(format!("phi(u={u})"), Scalar::computed(v, QUAD_TOL));
        }
    }
    env.table(table);
    Ok(())
}

fn mellin_model(spec: &ModelSpec) -> Result<SignedMellinModel> {
    Ok(SignedMellinModel::new(
        spec.triplet()?,
        spec.representation()?,
        spec.schedule()?,
        spec.horizon,
    )?)
}

pub fn mellin(env: &mut ResultEnvelope, spec: &ModelSpec, alphas: &[Complex64]) -> Result<()> {
    let model = mellin_model(spec)?;
    let (gp0, gm0) = model.sign_probabilities();
    env.output("g_plus(0)", Scalar::real(gp0, QUAD_TOL));
    env.output("g_minus(0)", Scalar::real(gm0, QUAD_TOL));
    for &alpha in alphas {
        let (gp, gm) = model.g_pair(alpha)?;
        env.output(format!("g_plus({alpha})"), Scalar::computed(gp, QUAD_TOL));
        env.output(format!("g_minus({alpha})"), Scalar::computed(gm, QUAD_TOL));
    }
    let mut table = Table::new(
        "mellin",
        "g_plus(iu), g_minus(iu) and conditional characteristic functions of log|E|",
        &[
            "u",
            "g_plus_re",
            "g_plus_im",
            "g_minus_re",
            "g_minus_im",
            "phi_plus_re",
            "phi_plus_im",
            "phi_minus_re",
            "phi_minus_im",
        ],
    );
    for u in spec.u_grid() {
        let (gp, gm) = model.g_pair(Complex64::new(0.0, u))?;
        let cond = |g: Complex64, g0: f64| if g0 > 0.0 { g / g0 } else { Complex64::new(f64::NAN, f64::NAN) };
        let (pp, pm) = (cond(gp, gp0), cond(gm, gm0));
        table.push(vec![u, gp.re, gp.im, gm.re, gm.im, pp.re, pp.im, pm.re, pm.im]);
    }
    env.table(table);
    Ok(())
}

fn density_table(name: &str, panel: &str, d: &DensityGrid) -> Table {
    let mut t = Table::new(name, panel, &["x", "density"]);
    for (x, p) in d.x.iter().zip(&d.p) {
        t.push(vec![*x, *p]);
    }
    t
}

/// One histogram bin of `log|E|` on one sign, with the inverted subdensity
/// averaged over the same bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayBin {
    pub sign: f64,
    pub lo: f64,
    pub hi: f64,
    pub mc_density: f64,
    pub mc_se: f64,
    pub inverted: f64,
}

/// Histograms of `log|v|` split by the sign of `v`, against the inverted
/// subdensities.
pub fn subdensity_overlay(
    values: &[f64],
    minus: &DensityGrid,
    plus: &DensityGrid,
    edges_minus: &[f64],
    edges_plus: &[f64],
) -> Result<Vec<OverlayBin>> {
    let n = values.len();
    let mut out = Vec::new();
    for (sign, d, edges) in [(-1.0, minus, edges_minus), (1.0, plus, edges_plus)] {
        let logs: Vec<f64> = values
            .iter()
            .filter(|v| v.signum() == sign && **v != 0.0)
            .map(|v| v.abs().ln())
            .collect();
        for b in histogram(&logs, edges, n)? {
            out.push(OverlayBin {
                sign,
                lo: b.lo,
                hi: b.hi,
                mc_density: b.density,
                mc_se: b.se,
                inverted: d.mass_between(b.lo, b.hi) / (b.hi - b.lo),
            });
        }
    }
    Ok(out)
}

fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect()
}

pub fn density(env: &mut ResultEnvelope, spec: &ModelSpec, opts: &Options) -> Result<()> {
    let model = mellin_model(spec)?;
    let (gp0, gm0) = model.sign_probabilities();
    let inversion = spec.inversion()?;
    let (minus, plus) = model.subdensities(&inversion)?;
    let wealth = wealth_from_subdensities(&minus, &plus, &spec.wealth_grid()?)?;
    env.output("g_minus(0)", Scalar::real(gm0, QUAD_TOL));
    env.output("g_plus(0)", Scalar::real(gp0, QUAD_TOL));
    env.output("mass_negative", Scalar::real(minus.mass, 1e-3));
    env.output("mass_positive", Scalar::real(plus.mass, 1e-3));
    env.output("wealth_mass", Scalar::real(wealth.mass, 1e-3));
    env.diagnostic("max_imag_residue", minus.max_imag_residue.max(plus.max_imag_residue));
    env.checks.push(Check::new("mass_negative vs g_minus(0)", (minus.mass - gm0).abs(), 1e-3));
    env.checks.push(Check::new("mass_positive vs g_plus(0)", (plus.mass - gp0).abs(), 1e-3));
    env.checks.push(Check::new("wealth mass vs 1", (wealth.mass - 1.0).abs(), 1e-3));
    env.table(density_table("subdensity_negative", "subdensity of log|E_T| on {E_T < 0}", &minus));
    env.table(density_table("subdensity_positive", "subdensity of log|E_T| on {E_T > 0}", &plus));
    env.table(density_table("wealth_density", "density of terminal wealth 1 - E_T", &wealth));
    if opts.paths.is_some() || spec.sim.is_some() {
        let cfg = sim_config(Some(spec), opts, 100_000, spec.horizon);
        let t = spec.triplet()?;
        let paths = simulate(&t, &spec.schedule()?, &cfg)?;
        let values: Vec<f64> = StochExpEvaluator::new(&spec.representation()?, &t)?
            .evaluate_all(&paths, spec.horizon)?
            .iter()
            .map(|v| v.re)
            .collect();
        let g = &inversion.grid;
        let edges = uniform_edges(g.x_min, g.x_max, 60);
        let mut table = Table::new(
            "mc_overlay",
            "Monte Carlo histogram of log|E_T| by sign against inverted subdensities",
            &["sign", "lo", "hi", "mc_density", "mc_se", "inverted_density"],
        );
        for b in subdensity_overlay(&values, &minus, &plus, &edges, &edges)? {
            table.push(vec![b.sign, b.lo, b.hi, b.mc_density, b.mc_se, b.inverted]);
        }
        env.table(table);
        let (_, neg) = sign_frequency(&values)?;
        env.output("mc_p_negative", Scalar::estimate(&neg));
    }
    Ok(())
}

pub fn mv_demo(env: &mut ResultEnvelope, opts: &Options, figures: bool) -> Result<()> {
    let p = MvParams::reference();
    let a = mv_optimal_fraction(&p)?;
    let model = p.model()?;
    let (gp0, gm0) = model.sign_probabilities();
    env.output("a", Scalar::real(a, 1e-15));
    env.output("g_minus(0)", Scalar::real(gm0, QUAD_TOL));
    env.output("g_plus(0)", Scalar::real(gp0, QUAD_TOL));
    env.checks.push(Check::new("|a - 4.48|", (a - 4.48).abs(), 0.01));
    env.checks.push(Check::new("|g_minus(0) - 0.022|", (gm0 - 0.022).abs(), 0.002));
    if figures {
        let spec = levykit::numkernel::InversionSpec::new(default_log_grid());
        let (minus, plus) = model.subdensities(&spec)?;
        let wealth = wealth_from_subdensities(&minus, &plus, &levykit::signedexp::default_wealth_grid())?;
        env.output("mass_negative", Scalar::real(minus.mass, 1e-3));
        env.output("mass_positive", Scalar::real(plus.mass, 1e-3));
        env.output("wealth_mass", Scalar::real(wealth.mass, 1e-3));
        env.table(density_table("figure1_negative", "subdensity of log|E_T| on {E_T < 0}", &minus));
        env.table(density_table("figure1_positive", "subdensity of log|E_T| on {E_T > 0}", &plus));
        env.table(density_table("figure2_wealth", "density of terminal wealth 1 - E_T", &wealth));
    }
    if let Some(n) = opts.paths {
        let cfg = SimConfig::new(n, opts.seed.unwrap_or(DEFAULT_SEED), p.horizon);
        let t = p.triplet()?;
        let paths = simulate(&t, &PredictableJumpSchedule::empty(), &cfg)?;
        let values: Vec<f64> = StochExpEvaluator::new(&RepresentingFunction::ExpReturn(a), &t)?
            .evaluate_all(&paths, p.horizon)?
            .iter()
            .map(|v| v.re)
            .collect();
        let (_, neg) = sign_frequency(&values)?;
        env.output("mc_p_negative", Scalar::estimate(&neg));
        stat_check(env, "g_minus(0) vs MC sign frequency", &neg, Complex64::new(gm0, 0.0));
    }
    Ok(())
}

pub fn utility(env: &mut ResultEnvelope, spec: &ModelSpec, opts: &Options) -> Result<()> {
    let Some(u) = &spec.utility else {
        anyhow::bail!("this command needs a \"utility\" section");
    };
    let params = spec.utility_params(u)?;
    let value = expected_exp_utility(&params)?;
    env.output("expected_utility", Scalar::real(value, QUAD_TOL));
    env.diagnostic("qc_drift", params.qc_drift()?);
    env.diagnostic("jump_factor", params.jump_factor()?);
    if opts.paths.is_some() || spec.sim.is_some() {
        let cfg = sim_config(Some(spec), opts, 100_000, spec.horizon);
        let paths = simulate_with_poisson_arrivals(&params.levy, params.theta, &params.law, &cfg)?;
        let eval = StochExpEvaluator::new(&RepresentingFunction::exp_utility(params.lambda_l), &params.levy)?
            .with_scheduled(&RepresentingFunction::exp_utility(params.lambda_v));
        let e = estimate(&eval.evaluate_all(&paths, spec.horizon)?)?;
        env.output("mc_expected_utility", Scalar::estimate(&e));
        stat_check(env, "closed form vs MC", &e, Complex64::new(value, 0.0));
    }
    Ok(())
}

pub fn girsanov(env: &mut ResultEnvelope, spec: &ModelSpec, opts: &Options) -> Result<()> {
    let t = spec.triplet()?;
    let tilt = GirsanovTilt::new(spec.tilt()?, t.clone(), spec.schedule()?)?;
    let xi = spec.representation.as_ref().map_or(RepresentingFunction::Identity, |r| r.build());
    let horizon = spec.horizon;
    let q = q_characteristics(&xi, &tilt)?;
    env.output("q_drift", Scalar::computed(q.drift, QUAD_TOL));
    env.output("q_diffusion", Scalar::computed(q.diffusion, QUAD_TOL));
    env.output("q_jump_intensity", Scalar::real(q.q_jumps.total_intensity()?, QUAD_TOL));
    env.output("normaliser", Scalar::real(tilt.normaliser(horizon)?, QUAD_TOL));
    env.output("unit_mass", Scalar::real(unit_mass(&tilt, horizon)?, QUAD_TOL));
    env.output("q_mult_compensator", Scalar::computed(q_mult_compensator(&xi, &tilt, horizon)?, QUAD_TOL));
    let target = q_expected_stoch_exp(&xi, &tilt, horizon)?;
    env.output("q_expected_stoch_exp", Scalar::computed(target, QUAD_TOL));
    let mut table = Table::new(
        "q_schedule",
        "scheduled jumps under Q: expected increment of V",
        &["time", "increment_re", "increment_im"],
    );
    for j in &q.q_schedule {
        table.push(vec![j.time, j.increment.re, j.increment.im]);
    }
    env.table(table);
    if opts.paths.is_some() || spec.sim.is_some() {
        let cfg = sim_config(Some(spec), opts, 100_000, horizon);
        let eval = StochExpEvaluator::new(&xi, &t)?;
        let r = importance_weighted(&tilt, |p| eval.evaluate(p, horizon), &cfg)?;
        env.output("mc_q_expected_stoch_exp", Scalar::estimate(&r.estimate));
        env.output("mc_weight_mean", Scalar::estimate(&r.mass));
        stat_check(env, "q_expected_stoch_exp vs importance MC", &r.estimate, target);
        stat_check(env, "weight mean vs 1", &r.mass, Complex64::new(1.0, 0.0));
    }
    Ok(())
}

pub fn simulate_cmd(env: &mut ResultEnvelope, spec: &ModelSpec, opts: &Options) -> Result<()> {
    let t = spec.triplet()?;
    let sched = spec.schedule()?;
    let xi = spec.representation()?;
    let cfg = sim_config(Some(spec), opts, 10_000, spec.horizon);
    let paths = simulate(&t, &sched, &cfg)?;
    let values = StochExpEvaluator::new(&xi, &t)?.evaluate_all(&paths, spec.horizon)?;
    let e = estimate(&values)?;
    let target = expected_stoch_exp(&xi, &t, &sched, spec.horizon)?;
    env.output("mc_mean", Scalar::estimate(&e));
    env.output("expected_stoch_exp", Scalar::computed(target, QUAD_TOL));
    env.diagnostic("n_paths", cfg.n_paths as f64);
    stat_check(env, "expected_stoch_exp vs MC", &e, target);
    if opts.raw {
        let mut table = Table::new("paths", "pathwise stochastic exponential at T", &["path_id", "value_re", "value_im"]);
        for (i, v) in values.iter().enumerate() {
            table.push(vec![i as f64, v.re, v.im]);
        }
        env.table(table);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Yor,
    Modulus,
    PiiMean,
    Martingale,
}

struct VerifyModel {
    triplet: LevyTriplet,
    sched: PredictableJumpSchedule,
    horizon: f64,
    xi: RepresentingFunction,
    psi: RepresentingFunction,
}

fn verify_model(spec: Option<&ModelSpec>) -> Result<VerifyModel> {
    match spec {
        Some(s) => Ok(VerifyModel {
            triplet: s.triplet()?,
            sched: s.schedule()?,
            horizon: s.horizon,
            xi: s.representation.as_ref().map_or(RepresentingFunction::ExpReturn(1.0), |r| r.build()),
            psi: s.tilt.as_ref().map_or(RepresentingFunction::esscher(0.5), |r| r.build()),
        }),
        None => {
            let m = canned_models()?.swap_remove(1);
            Ok(VerifyModel {
                triplet: m.triplet,
                sched: m.sched,
                horizon: 1.0,
                xi: RepresentingFunction::ExpReturn(1.0),
                psi: RepresentingFunction::esscher(0.5),
            })
        }
    }
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn max_pathwise_error(paths: &[PathRecord], f: impl Fn(&PathRecord) -> Result<f64>) -> Result<f64> {
    paths.iter().map(f).try_fold(0.0f64, |m, e| Ok(m.max(e?)))
}

pub fn verify(env: &mut ResultEnvelope, spec: Option<&ModelSpec>, suite: Suite, opts: &Options) -> Result<()> {
    let m = verify_model(spec)?;
    let horizon = m.horizon;
    match suite {
        Suite::Yor | Suite::Modulus => {
            let cfg = sim_config(spec, opts, 1_000, horizon);
            let paths = simulate(&m.triplet, &m.sched, &cfg)?;
            let xi = StochExpEvaluator::new(&m.xi, &m.triplet)?;
            let err = if suite == Suite::Yor {
                let psi = StochExpEvaluator::new(&m.psi, &m.triplet)?;
                let joint = StochExpEvaluator::new(&RepresentingFunction::yor(m.xi.clone(), m.psi.clone()), &m.triplet)?;
                max_pathwise_error(&paths, |p| {
                    Ok(relative(xi.evaluate(p, horizon)? * psi.evaluate(p, horizon)?, joint.evaluate(p, horizon)?))
                })?
            } else {
                ensure!(m.xi.is_real_on_reals(), "the modulus suite needs a real-valued representation");
                let modulus = RepresentingFunction::compose(RepresentingFunction::modulus_minus_one(), m.xi.clone());
                let modulus = StochExpEvaluator::new(&modulus, &m.triplet)?;
                max_pathwise_error(&paths, |p| {
                    let v = xi.evaluate(p, horizon)?;
                    Ok(relative(Complex64::new(v.norm(), 0.0), modulus.evaluate(p, horizon)?))
                })?
            };
            env.diagnostic("n_paths", cfg.n_paths as f64);
            env.checks.push(Check::new("max relative pathwise error", err, 1e-10));
        }
        Suite::PiiMean => {
            let cfg = sim_config(spec, opts, 100_000, horizon);
            let paths = simulate(&m.triplet, &m.sched, &cfg)?;
            let values = StochExpEvaluator::new(&m.xi, &m.triplet)?.evaluate_all(&paths, horizon)?;
            let e = estimate(&values)?;
            let target = expected_stoch_exp(&m.xi, &m.triplet, &m.sched, horizon)?;
            env.output("mc_mean", Scalar::estimate(&e));
            env.output("expected_stoch_exp", Scalar::computed(target, QUAD_TOL));
            stat_check(env, "expected_stoch_exp vs MC", &e, target);
        }
        Suite::Martingale => {
            for (label, t_end) in [("T/4", 0.25 * horizon), ("T/2", 0.5 * horizon), ("T", horizon)] {
                let cfg = sim_config(spec, opts, 100_000, t_end);
                let e = martingale_ratio(&m.psi, &m.triplet, &m.sched, &cfg)?;
                env.output(format!("mean Z/E(B) at {label}"), Scalar::estimate(&e));
                stat_check(env, &format!("martingale surrogate at {label}"), &e, Complex64::new(1.0, 0.0));
            }
        }
    }
    Ok(())
}

/// MC estimate of `E[Z_t / 𝓔(B^{𝓛(Z)})_t]` with `𝓛(Z) = ψ∘X` and `t = cfg.horizon`.
pub fn martingale_ratio(
    psi: &RepresentingFunction,
    t: &LevyTriplet,
    sched: &PredictableJumpSchedule,
    cfg: &SimConfig,
) -> Result<Estimate> {
    let norm = mult_compensator(psi, t, sched, cfg.horizon)?;
    let paths = simulate(t, sched, cfg)?;
    let values: Vec<Complex64> = StochExpEvaluator::new(psi, t)?
        .evaluate_all(&paths, cfg.horizon)?
        .iter()
        .map(|z| z / norm)
        .collect();
    Ok(estimate(&values)?)
}
