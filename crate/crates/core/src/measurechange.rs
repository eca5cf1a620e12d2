//! Characteristics and compensators under the measure `Q` with density
//! `M = 𝓔(ψ∘X) / 𝓔(B^{ψ∘X})`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::levycalc::{
    calculus::law_expectation, check_special, compensator, dp_drift, drift_rate, expected_stoch_exp, mult_compensator,
    JumpDistribution, JumpMeasure, LevyTriplet, PredictableJumpSchedule, RepresentingFunction, GAUSSIAN_WINDOW,
};

const NEGATIVITY_SLACK: f64 = 1e-12;
const PROBES_PER_SIDE: i32 = 850;

/// Density process driver `Z = 𝓔(ψ∘X)`.
#[derive(Debug, Clone)]
pub struct GirsanovTilt {
    pub psi: RepresentingFunction,
    pub underlying: LevyTriplet,
    pub sched: PredictableJumpSchedule,
}

impl GirsanovTilt {
    pub fn new(psi: RepresentingFunction, underlying: LevyTriplet, sched: PredictableJumpSchedule) -> Result<Self> {
        if !psi.is_real_on_reals() {
            return Err(Error::InvalidTilt(format!("{psi} is not real-valued")));
        }
        check_nonnegative(&psi, &underlying.jumps)?;
        for e in sched.entries() {
            check_nonnegative(&psi, e.law.measure())?;
        }
        check_special(&psi, &underlying).map_err(|e| Error::InvalidTilt(e.to_string()))?;
        for (time, inc) in dp_drift(&psi, &sched, f64::INFINITY)? {
            if (Complex64::new(1.0, 0.0) + inc).norm() <= 1e-14 {
                return Err(Error::InvalidTilt(format!("1 + E[ψ(ΔX)] vanishes at scheduled time {time}")));
            }
        }
        Ok(Self { psi, underlying, sched })
    }

    /// Esscher tilt `ψ = e^{θ·id} − 1`.
    pub fn esscher(theta: f64, underlying: LevyTriplet, sched: PredictableJumpSchedule) -> Result<Self> {
        Self::new(RepresentingFunction::esscher(theta), underlying, sched)
    }

    /// `𝓔(B^{ψ∘X})_t`, the normaliser of `Z`.
    pub fn normaliser(&self, t: f64) -> Result<f64> {
        Ok(mult_compensator(&self.psi, &self.underlying, &self.sched, t)?.re)
    }
}

fn check_nonnegative(psi: &RepresentingFunction, m: &JumpMeasure) -> Result<()> {
    let bad = |x: f64| (1.0 + psi.eval_real(x).re) < -NEGATIVITY_SLACK;
    let probes: Vec<f64> = match m {
        JumpMeasure::GaussianCpp { intensity, .. } if *intensity == 0.0 => Vec::new(),
        JumpMeasure::GaussianCpp { mean, var, .. } => {
            let sd = var.sqrt();
            let step = GAUSSIAN_WINDOW * sd / PROBES_PER_SIDE as f64;
            let mut v: Vec<f64> = (-PROBES_PER_SIDE..=PROBES_PER_SIDE).map(|k| mean + k as f64 * step).collect();
            for b in psi.breakpoints() {
                v.extend([b - 1e-9 * sd, b + 1e-9 * sd]);
            }
            v
        }
        JumpMeasure::Atoms(atoms) => atoms.iter().filter(|a| a.weight > 0.0).map(|a| a.size).collect(),
        _ => {
            return Err(Error::InvalidTilt(
                "tilts are only defined over Gaussian or atomic jump laws".into(),
            ))
        }
    };
    match probes.into_iter().find(|x| bad(*x)) {
        Some(x) => Err(Error::InvalidTilt(format!("1 + ψ is negative at jump size {x}"))),
        None => Ok(()),
    }
}

/// A scheduled jump of `V = ξ∘X` under `Q`.
#[derive(Debug, Clone)]
pub struct QScheduledJump {
    pub time: f64,
    pub law: JumpDistribution,
    /// `E_Q[ΔV_τ]`.
    pub increment: Complex64,
}

/// Characteristics of `V = ξ∘X` under `Q`.
#[derive(Debug, Clone)]
pub struct QCharacteristics {
    pub drift: Complex64,
    /// `[V, V]^c` rate, `ξ′(0)²σ²`.
    pub diffusion: Complex64,
    pub q_jumps: JumpMeasure,
    pub q_schedule: Vec<QScheduledJump>,
}

impl QCharacteristics {
    /// `E_Q[𝓔(V)_t]` from the Q-characteristics.
    pub fn stoch_exp(&self, t: f64) -> Complex64 {
        let mut v = (self.drift * t).exp();
        for j in self.q_schedule.iter().filter(|j| j.time <= t) {
            v *= Complex64::new(1.0, 0.0) + j.increment;
        }
        v
    }
}

/// `ξ(1 + ψ) = ξ + ξψ`.
fn weighted(xi: &RepresentingFunction, psi: &RepresentingFunction) -> RepresentingFunction {
    RepresentingFunction::sum(xi.clone(), RepresentingFunction::product(xi.clone(), psi.clone()))
}

pub fn q_characteristics(xi: &RepresentingFunction, tilt: &GirsanovTilt) -> Result<QCharacteristics> {
    let t = &tilt.underlying;
    let psi = &tilt.psi;
    // The product entry's second derivative carries ξ′(0)ψ′(0)σ², the
    // continuous covariation of V with the return of Z.
    let drift = drift_rate(&weighted(xi, psi), t)?;
    let d0 = xi.d0();
    let q_jumps = t.jumps.clone().tilted(psi.clone(), 1.0).transformed(xi.clone());
    let mut q_schedule = Vec::new();
    for e in tilt.sched.entries() {
        let norm = 1.0 + law_expectation(psi, &e.law)?.re;
        let tilted = JumpDistribution::from_measure(e.law.measure().clone().tilted(psi.clone(), norm));
        let increment = law_expectation(&weighted(xi, psi), &e.law)? / norm;
        q_schedule.push(QScheduledJump {
            time: e.time,
            law: tilted.pushforward(xi),
            increment,
        });
    }
    Ok(QCharacteristics {
        drift,
        diffusion: d0 * d0 * t.sigma2,
        q_jumps,
        q_schedule,
    })
}

/// `𝓔(B^{ψ∘X} + B^{(ξ_W + ξ_Wψ)∘X})_t / 𝓔(B^{ψ∘X})_t`.
pub fn q_mult_compensator(xi_w: &RepresentingFunction, tilt: &GirsanovTilt, t_end: f64) -> Result<Complex64> {
    let joint = RepresentingFunction::yor(tilt.psi.clone(), xi_w.clone());
    let num = mult_compensator(&joint, &tilt.underlying, &tilt.sched, t_end)?;
    let den = mult_compensator(&tilt.psi, &tilt.underlying, &tilt.sched, t_end)?;
    Ok(num / den)
}

/// `E_Q[𝓔(ξ_V∘X)_t]`; zero from the first scheduled time where the
/// Q-expected factor `1 + ΔB_Q` vanishes.
pub fn q_expected_stoch_exp(xi_v: &RepresentingFunction, tilt: &GirsanovTilt, t_end: f64) -> Result<Complex64> {
    let joint = RepresentingFunction::yor(tilt.psi.clone(), xi_v.clone());
    let num = compensator(&joint, &tilt.underlying, &tilt.sched, t_end)?;
    if num.first_degenerate(t_end).is_some() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let den = mult_compensator(&tilt.psi, &tilt.underlying, &tilt.sched, t_end)?;
    Ok(num.stoch_exp(t_end) / den)
}

/// `E_P[M_t]` computed as `E[𝓔(ψ∘X)_t] / 𝓔(B^{ψ∘X})_t`.
pub fn unit_mass(tilt: &GirsanovTilt, t_end: f64) -> Result<f64> {
    let e = expected_stoch_exp(&tilt.psi, &tilt.underlying, &tilt.sched, t_end)?;
    Ok(e.re / tilt.normaliser(t_end)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levycalc::{ScheduledJump, Truncation};
    use crate::numkernel::QuadratureSpec;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn jump_diffusion() -> LevyTriplet {
        LevyTriplet::new(0.1, 0.09, JumpMeasure::gaussian(1.5, -0.05, 0.04).unwrap(), Truncation::Zero).unwrap()
    }

    fn schedule() -> PredictableJumpSchedule {
        let law = JumpDistribution::atoms([(0.2, 0.3), (-0.1, 0.7)]).unwrap();
        PredictableJumpSchedule::new(vec![ScheduledJump { time: 0.5, law }]).unwrap()
    }

    #[test]
    fn zero_tilt_is_identity() {
        let tilt = GirsanovTilt::new(RepresentingFunction::Affine(c(0.0)), jump_diffusion(), schedule()).unwrap();
        let xi = RepresentingFunction::esscher(0.7);
        let q = q_characteristics(&xi, &tilt).unwrap();
        let p = drift_rate(&xi, &tilt.underlying).unwrap();
        assert!((q.drift - p).norm() < 1e-12);
        let direct = mult_compensator(&xi, &tilt.underlying, &tilt.sched, 1.0).unwrap();
        assert!((q_mult_compensator(&xi, &tilt, 1.0).unwrap() - direct).norm() < 1e-12);
        assert!((q.stoch_exp(1.0) - direct).norm() < 1e-12);
    }

    #[test]
    fn negative_density_is_rejected() {
        let err = GirsanovTilt::new(RepresentingFunction::Affine(c(-3.0)), jump_diffusion(), PredictableJumpSchedule::empty())
            .unwrap_err();
        assert!(matches!(err, Error::InvalidTilt(_)));
        let err = GirsanovTilt::new(RepresentingFunction::char_exp(1.0), jump_diffusion(), PredictableJumpSchedule::empty())
            .unwrap_err();
        assert!(matches!(err, Error::InvalidTilt(_)));
    }

    #[test]
    fn killing_scheduled_tilt_is_rejected() {
        let law = JumpDistribution::atoms([(-1.0, 1.0)]).unwrap();
        let sched = PredictableJumpSchedule::new(vec![ScheduledJump { time: 0.5, law }]).unwrap();
        let err = GirsanovTilt::new(RepresentingFunction::Identity, LevyTriplet::brownian(0.0, 0.01).unwrap(), sched)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidTilt(_)));
    }

    #[test]
    fn esscher_closed_forms() {
        let theta = 1.3;
        let (lam, m, v, s2, mu0) = (1.5, -0.05, 0.04, 0.09, 0.1);
        let tilt = GirsanovTilt::esscher(theta, jump_diffusion(), PredictableJumpSchedule::empty()).unwrap();
        let q = q_characteristics(&RepresentingFunction::Identity, &tilt).unwrap();
        let lam_q = lam * (theta * m + 0.5 * theta * theta * v).exp();
        let m_q = m + theta * v;
        assert!((q.q_jumps.total_intensity().unwrap() - lam_q).abs() < 1e-10);
        let spec = QuadratureSpec::default();
        let mean = q.q_jumps.integrate(&|z| z, &[], &spec).unwrap().re / lam_q;
        assert!((mean - m_q).abs() < 1e-10);
        let var = q.q_jumps.integrate(&|z| (z - m_q) * (z - m_q), &[], &spec).unwrap().re / lam_q;
        assert!((var - v).abs() < 1e-10);
        assert!((q.drift.re - (mu0 + theta * s2 + lam_q * m_q)).abs() < 1e-10);
    }

    #[test]
    fn self_compensator_cross_route() {
        let tilt = GirsanovTilt::esscher(0.8, jump_diffusion(), schedule()).unwrap();
        let psi = tilt.psi.clone();
        let ratio = q_mult_compensator(&psi, &tilt, 1.0).unwrap();
        let q = q_characteristics(&psi, &tilt).unwrap();
        assert!((ratio - q.stoch_exp(1.0)).norm() < 1e-10 * ratio.norm());
    }

    #[test]
    fn unit_mass_holds() {
        let tilt = GirsanovTilt::esscher(-0.6, jump_diffusion(), schedule()).unwrap();
        assert!((unit_mass(&tilt, 1.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scheduled_law_is_renormalised() {
        let tilt = GirsanovTilt::esscher(2.0, jump_diffusion(), schedule()).unwrap();
        let q = q_characteristics(&RepresentingFunction::Identity, &tilt).unwrap();
        let spec = QuadratureSpec::default();
        let mass = q.q_schedule[0].law.expect(&|_| c(1.0), &[], &spec).unwrap();
        assert!((mass.re - 1.0).abs() < 1e-14);
        let w1 = 0.3 * (2.0f64 * 0.2).exp();
        let w2 = 0.7 * (2.0f64 * -0.1).exp();
        let mean = (0.2 * w1 - 0.1 * w2) / (w1 + w2);
        assert!((q.q_schedule[0].increment.re - mean).abs() < 1e-14);
    }
}
