use levykit::levycalc::*;
use levykit::mcoracle::*;
use levykit::measurechange::*;
use levykit::signedexp::MvParams;
use levykit::Complex64;
use proptest::prelude::*;

type R = RepresentingFunction;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn jump_diffusion() -> (LevyTriplet, PredictableJumpSchedule) {
    let t = LevyTriplet::new(0.05, 0.04, JumpMeasure::gaussian(1.5, -0.05, 0.04).unwrap(), Truncation::Bounded(1.0)).unwrap();
    let sched = PredictableJumpSchedule::new(vec![
        ScheduledJump {
            time: 0.3,
            law: JumpDistribution::atoms([(-0.4, 0.25), (0.2, 0.75)]).unwrap(),
        },
        ScheduledJump {
            time: 0.8,
            law: JumpDistribution::gaussian(0.0, 0.09).unwrap(),
        },
    ])
    .unwrap();
    (t, sched)
}

#[test]
fn poisson_mean_jump_count() {
    let t = LevyTriplet::new(0.0, 0.0, JumpMeasure::atoms([(1.0, 1.0)]).unwrap(), Truncation::Zero).unwrap();
    let paths = simulate(&t, &PredictableJumpSchedule::empty(), &SimConfig::new(100_000, 5, 1.0)).unwrap();
    let counts: Vec<f64> = paths.iter().map(|p| p.jump_sizes.len() as f64).collect();
    let e = estimate_real(&counts).unwrap();
    assert!(e.within(c(1.0, 0.0), 3.0), "{e:?}");
}

#[test]
fn mv_terminal_mean() {
    let p = MvParams::reference();
    let t = p.triplet().unwrap();
    let cfg = SimConfig::new(100_000, 11, p.horizon);
    let paths = simulate(&t, &PredictableJumpSchedule::empty(), &cfg).unwrap();
    let mu0 = t.pure_drift().unwrap();
    let x: Vec<f64> = paths.iter().map(|q| q.terminal_value(mu0, p.horizon)).collect();
    assert!(estimate_real(&x).unwrap().within(c(p.mu * p.horizon, 0.0), 3.0));
}

#[test]
fn exp_return_pathwise_formula() {
    let p = MvParams::reference();
    let t = p.triplet().unwrap();
    let a = 4.0;
    let paths = simulate(&t, &PredictableJumpSchedule::empty(), &SimConfig::new(200, 2, 1.0)).unwrap();
    for path in &paths {
        let v = pathwise_stoch_exp(&R::ExpReturn(a), &t, path, 1.0).unwrap();
        let s2 = p.sigma * p.sigma;
        let jumps: f64 = path.jump_sizes.iter().map(|x| 1.0 - a * x.exp_m1()).product();
        let exact = (-a * (p.mu + 0.5 * s2) - a * path.brownian_terminal - 0.5 * a * a * s2).exp() * jumps;
        assert!((v.re - exact).abs() <= 1e-12 * exact.abs().max(1e-300), "{v} vs {exact}");
    }
}

#[test]
fn pii_mean_matches_compensator() {
    let (t, sched) = jump_diffusion();
    let horizon = 1.0;
    let paths = simulate(&t, &sched, &SimConfig::new(20_000, 17, horizon)).unwrap();
    for xi in [R::Identity, R::ExpReturn(2.0), R::char_exp(1.0), R::char_exp(5.0)] {
        let values = StochExpEvaluator::new(&xi, &t).unwrap().evaluate_all(&paths, horizon).unwrap();
        let target = expected_stoch_exp(&xi, &t, &sched, horizon).unwrap();
        let e = estimate(&values).unwrap();
        assert!(e.within(target, 3.5), "{xi}: {e:?} vs {target}");
    }
}

#[test]
fn simulation_is_independent_of_thread_count() {
    let (t, sched) = jump_diffusion();
    let cfg = SimConfig::new(2_000, 99, 1.0);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let paths = simulate(&t, &sched, &cfg).unwrap();
            let v = StochExpEvaluator::new(&R::char_exp(2.0), &t).unwrap().evaluate_all(&paths, 1.0).unwrap();
            (paths, estimate(&v).unwrap())
        })
    };
    let (p1, e1) = run(1);
    let (p4, e4) = run(4);
    assert_eq!(p1, p4);
    assert_eq!(e1.mean.re.to_bits(), e4.mean.re.to_bits());
    assert_eq!(e1.se_im.to_bits(), e4.se_im.to_bits());
}

#[test]
fn esscher_tilted_jump_count() {
    let (lam, m, v, theta, horizon) = (2.0, 0.1, 0.04, 0.8, 1.0);
    let t = LevyTriplet::new(0.0, 0.04, JumpMeasure::gaussian(lam, m, v).unwrap(), Truncation::Zero).unwrap();
    let tilt = GirsanovTilt::esscher(theta, t, PredictableJumpSchedule::empty()).unwrap();
    let r = importance_weighted(
        &tilt,
        |p| Ok(c(p.jump_sizes.len() as f64, 0.0)),
        &SimConfig::new(50_000, 23, horizon),
    )
    .unwrap();
    let tilted = lam * (theta * m + 0.5 * theta * theta * v).exp() * horizon;
    assert!(r.estimate.within(c(tilted, 0.0), 3.0), "{:?} vs {tilted}", r.estimate);
    assert!(r.mass.within(c(1.0, 0.0), 3.0), "{:?}", r.mass);
}

#[test]
fn importance_weights_match_q_expectation() {
    let (t, sched) = jump_diffusion();
    let tilt = GirsanovTilt::new(R::ExpReturn(-0.5), t.clone(), sched).unwrap();
    let xi = R::char_exp(1.5);
    let horizon = 1.0;
    let eval = StochExpEvaluator::new(&xi, &t).unwrap();
    let r = importance_weighted(&tilt, |p| eval.evaluate(p, horizon), &SimConfig::new(20_000, 31, horizon)).unwrap();
    let target = q_expected_stoch_exp(&xi, &tilt, horizon).unwrap();
    assert!(r.estimate.within(target, 3.5), "{:?} vs {target}", r.estimate);
}

fn path_strategy() -> impl Strategy<Value = PathRecord> {
    (
        -1.0f64..1.0,
        prop::collection::vec(-0.9f64..2.0, 0..6),
        prop::collection::vec(-3.0f64..0.5, 0..3),
    )
        .prop_map(|(w, jumps, sched)| PathRecord {
            brownian_terminal: w,
            jump_times: (1..=jumps.len()).map(|k| k as f64 / (jumps.len() + 1) as f64).collect(),
            jump_sizes: jumps,
            scheduled_times: (1..=sched.len()).map(|k| k as f64 / (sched.len() + 1) as f64).collect(),
            scheduled_jumps: sched,
        })
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn yor_product_identity(path in path_strategy(), p in -1.0f64..1.0, q in -2.0f64..2.0, u in -5.0f64..5.0) {
        let t = LevyTriplet::new(0.1, 0.09, JumpMeasure::gaussian(1.0, 0.0, 0.04).unwrap(), Truncation::Bounded(1.0)).unwrap();
        let xi = R::ExpReturn(p);
        let psi = R::sum(R::char_exp(u), R::Affine(c(q, 0.0)));
        let lhs = pathwise_stoch_exp(&xi, &t, &path, 1.0).unwrap() * pathwise_stoch_exp(&psi, &t, &path, 1.0).unwrap();
        let rhs = pathwise_stoch_exp(&R::yor(xi, psi), &t, &path, 1.0).unwrap();
        prop_assert!(rel(lhs, rhs) <= 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn modulus_identity(path in path_strategy(), a in -6.0f64..6.0) {
        let t = LevyTriplet::new(0.1, 0.09, JumpMeasure::gaussian(1.0, 0.0, 0.04).unwrap(), Truncation::Identity).unwrap();
        let xi = R::ExpReturn(a);
        let v = pathwise_stoch_exp(&xi, &t, &path, 1.0).unwrap();
        let m = pathwise_stoch_exp(&R::compose(R::modulus_minus_one(), xi), &t, &path, 1.0).unwrap();
        prop_assert!((v.norm() - m.re).abs() <= 1e-10 * v.norm().max(1e-300) && m.im == 0.0);
    }
}
