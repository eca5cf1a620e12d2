//! Drifts of represented processes and their stochastic exponentials.

use num_complex::Complex64;

use super::measure::{LevyTriplet, Truncation};
use super::repfn::RepresentingFunction;
use super::schedule::{JumpDistribution, PredictableJumpSchedule};
use crate::error::{invalid, Error, Result};
use crate::numkernel::QuadratureSpec;

const DEGENERATE: f64 = 1e-14;

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// Checks `∫ (|ξ|² ∧ |ξ|) dν < ∞`.
pub fn check_special(xi: &RepresentingFunction, t: &LevyTriplet) -> Result<()> {
    t.jumps.special_check(xi)
}

pub fn is_special(xi: &RepresentingFunction, t: &LevyTriplet) -> bool {
    check_special(xi, t).is_ok()
}

/// Drift rate of the special process `ξ∘X` (quoted with `h = id`):
/// `ξ′(0)b + ½ξ″(0)σ² + ∫(ξ − ξ′(0)h) dν`.
pub fn drift_rate(xi: &RepresentingFunction, t: &LevyTriplet) -> Result<Complex64> {
    check_special(xi, t)?;
    let d0 = xi.d0();
    let d20 = xi.d20();
    let h = t.trunc;
    let mut breaks = xi.breakpoints();
    breaks.extend(h.breakpoints());
    let jump_part = t.jumps.integrate(&|z| xi.eval(z) - d0 * h.h(z.re), &breaks, &quad())?;
    let v = d0 * t.b + d20 * (0.5 * t.sigma2) + jump_part;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NotSpecial(format!("drift of {xi} is not finite")));
    }
    Ok(v)
}

/// Triplet of `Y = ξ∘X`, quoted under the same truncation as `t`.
pub fn pushforward_triplet(xi: &RepresentingFunction, t: &LevyTriplet) -> Result<LevyTriplet> {
    if xi.is_identity() {
        return Ok(t.clone());
    }
    if !xi.is_real_on_reals() {
        return Err(Error::ComplexRepresentation(format!(
            "{xi} is complex-valued; use drift_rate for its cumulant"
        )));
    }
    check_special(xi, t)?;
    let d0 = xi.d0().re;
    let d20 = xi.d20().re;
    let h = t.trunc;
    let mut breaks = xi.breakpoints();
    breaks.extend(h.breakpoints());
    for y in h.breakpoints() {
        breaks.extend(xi.preimage(y));
    }
    let jump_part = t
        .jumps
        .integrate(&|z| Complex64::new(h.h(xi.eval(z).re) - d0 * h.h(z.re), 0.0), &breaks, &quad())?;
    LevyTriplet::new(
        d0 * t.b + 0.5 * d20 * t.sigma2 + jump_part.re,
        d0 * d0 * t.sigma2,
        t.jumps.clone().transformed(xi.clone()),
        h,
    )
}

/// `E[ξ(ΔX_τ)]` for every scheduled time `τ ≤ t_end`.
pub fn dp_drift(
    xi: &RepresentingFunction,
    sched: &PredictableJumpSchedule,
    t_end: f64,
) -> Result<Vec<(f64, Complex64)>> {
    sched
        .up_to(t_end)
        .map(|e| Ok((e.time, law_expectation(xi, &e.law)?)))
        .collect()
}

pub(crate) fn law_expectation(xi: &RepresentingFunction, law: &JumpDistribution) -> Result<Complex64> {
    law.measure().special_check(xi).map_err(|e| match e {
        Error::NotSpecial(msg) => Error::NonIntegrable(msg),
        other => other,
    })?;
    law.expect(&|z| xi.eval(z), &xi.breakpoints(), &quad())
}

/// A deterministic finite-variation process: a continuous drift rate plus
/// jumps at fixed times. `stoch_exp` is its stochastic exponential.
#[derive(Debug, Clone, PartialEq)]
pub struct Compensator {
    pub qc_rate: Complex64,
    pub jumps: Vec<(f64, Complex64)>,
}

impl Compensator {
    pub fn value(&self, t: f64) -> Complex64 {
        let jumps: Complex64 = self.jumps.iter().filter(|(s, _)| *s <= t).map(|(_, d)| d).sum();
        self.qc_rate * t + jumps
    }

    /// `e^{qc_rate·t} ∏_{τ ≤ t} (1 + ΔB_τ)`.
    pub fn stoch_exp(&self, t: f64) -> Complex64 {
        let mut v = (self.qc_rate * t).exp();
        for (_, d) in self.jumps.iter().filter(|(s, _)| *s <= t) {
            v *= Complex64::new(1.0, 0.0) + d;
        }
        v
    }

    /// First time with `1 + ΔB = 0`.
    pub fn first_degenerate(&self, t: f64) -> Option<f64> {
        self.jumps
            .iter()
            .find(|(s, d)| *s <= t && (Complex64::new(1.0, 0.0) + d).norm() <= DEGENERATE)
            .map(|(s, _)| *s)
    }
}

/// Additive compensator `B^{ξ∘X}` on `[0, t_end]`.
pub fn compensator(
    xi: &RepresentingFunction,
    t: &LevyTriplet,
    sched: &PredictableJumpSchedule,
    t_end: f64,
) -> Result<Compensator> {
    check_horizon(t_end)?;
    Ok(Compensator {
        qc_rate: drift_rate(xi, t)?,
        jumps: dp_drift(xi, sched, t_end)?,
    })
}

/// Multiplicative compensator `𝓔(B^{ξ∘X})_{t_end}`.
pub fn mult_compensator(
    xi: &RepresentingFunction,
    t: &LevyTriplet,
    sched: &PredictableJumpSchedule,
    t_end: f64,
) -> Result<Complex64> {
    let b = compensator(xi, t, sched, t_end)?;
    if let Some(time) = b.first_degenerate(t_end) {
        return Err(Error::DegenerateJump { time });
    }
    Ok(b.stoch_exp(t_end))
}

/// `E[𝓔(ξ∘X)_{t_end}]`, which vanishes from the first scheduled time with
/// `E[1 + ξ(ΔX_τ)] = 0` on.
pub fn expected_stoch_exp(
    xi: &RepresentingFunction,
    t: &LevyTriplet,
    sched: &PredictableJumpSchedule,
    t_end: f64,
) -> Result<Complex64> {
    let b = compensator(xi, t, sched, t_end)?;
    if b.first_degenerate(t_end).is_some() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(b.stoch_exp(t_end))
}

/// Characteristic function `E[e^{iuX_{t_end}}]`.
pub fn levy_khintchin(u: f64, t: &LevyTriplet, sched: &PredictableJumpSchedule, t_end: f64) -> Result<Complex64> {
    expected_stoch_exp(&RepresentingFunction::char_exp(u), t, sched, t_end)
}

/// `𝓔(B^{(e^{ζ·id}−1)∘X})_{t_end}`, the exponential compensator of `ζX`.
pub fn exponential_compensator(
    zeta: f64,
    t: &LevyTriplet,
    sched: &PredictableJumpSchedule,
    t_end: f64,
) -> Result<Complex64> {
    mult_compensator(&RepresentingFunction::esscher(zeta), t, sched, t_end)
}

/// Exponential-utility model: a Lévy log-price `L` (drift quoted with
/// `h = id`) plus jumps with law `F` at the arrival times of an independent
/// Poisson process with rate `θ`; position `λ_L` between and `λ_V` at those
/// times.
#[derive(Debug, Clone)]
pub struct UtilityParams {
    pub lambda_l: f64,
    pub lambda_v: f64,
    pub levy: LevyTriplet,
    pub theta: f64,
    pub law: JumpDistribution,
    pub horizon: f64,
}

impl UtilityParams {
    pub fn validate(&self) -> Result<()> {
        check_horizon(self.horizon)?;
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return Err(invalid(format!("arrival rate must be non-negative, got {}", self.theta)));
        }
        if !(self.lambda_l.is_finite() && self.lambda_v.is_finite()) {
            return Err(invalid("positions must be finite"));
        }
        Ok(())
    }

    /// Drift rate of the return of `Z` away from the scheduled times.
    pub fn qc_drift(&self) -> Result<f64> {
        let levy = self.levy.with_truncation(Truncation::Identity)?;
        Ok(drift_rate(&RepresentingFunction::exp_utility(self.lambda_l), &levy)?.re)
    }

    /// `∫ e^{−λ_V(e^x − 1)} F(dx)`.
    pub fn jump_factor(&self) -> Result<f64> {
        let xi = RepresentingFunction::exp_utility(self.lambda_v);
        Ok(1.0 + law_expectation(&xi, &self.law)?.re)
    }
}

/// `E[e^{−λ·R_T}] = e^{b T} e^{θT(c − 1)}` with `c` the expected jump factor.
pub fn expected_exp_utility(p: &UtilityParams) -> Result<f64> {
    p.validate()?;
    let b = p.qc_drift()?;
    let c = p.jump_factor()?;
    let v = (b * p.horizon + p.theta * p.horizon * (c - 1.0)).exp();
    if !v.is_finite() {
        return Err(Error::NonIntegrable("expected utility overflows".into()));
    }
    Ok(v)
}

fn check_horizon(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("time must be finite and non-negative, got {t}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levycalc::measure::JumpMeasure;
    use crate::levycalc::schedule::ScheduledJump;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_drift_is_special_drift() {
        let t = LevyTriplet::new(0.1, 0.04, JumpMeasure::gaussian(2.0, 0.3, 0.04).unwrap(), Truncation::Zero).unwrap();
        let d = drift_rate(&RepresentingFunction::Identity, &t).unwrap();
        assert!((d.re - (0.1 + 2.0 * 0.3)).abs() < 1e-12);
        assert!(pushforward_triplet(&RepresentingFunction::Identity, &t).unwrap().b == t.b);
    }

    #[test]
    fn linear_scaling_of_atoms() {
        let t = LevyTriplet::new(0.5, 0.0, JumpMeasure::atoms([(1.0, 2.0)]).unwrap(), Truncation::Bounded(1.0)).unwrap();
        let y = pushforward_triplet(&RepresentingFunction::Affine(c(3.0)), &t).unwrap();
        // The image jump 3 lies outside the truncation window.
        assert!((y.b - (1.5 - 3.0 * 2.0)).abs() < 1e-14);
        let img = y.jumps.integrate(&|z| z, &[], &QuadratureSpec::default()).unwrap();
        assert_eq!(img.re, 6.0);
    }

    #[test]
    fn brownian_exponential_drift() {
        let t = LevyTriplet::brownian(0.2, 0.09).unwrap();
        for zeta in [-2.0, 0.5, 3.0] {
            let d = drift_rate(&RepresentingFunction::esscher(zeta), &t).unwrap();
            assert!((d.re - (zeta * 0.2 + 0.5 * 0.09 * zeta * zeta)).abs() < 1e-14);
            let e = exponential_compensator(zeta, &t, &PredictableJumpSchedule::empty(), 2.0).unwrap();
            assert!((e.re - ((zeta * 0.2 + 0.5 * 0.09 * zeta * zeta) * 2.0).exp()).abs() < 1e-12);
        }
        assert_eq!(exponential_compensator(0.0, &t, &PredictableJumpSchedule::empty(), 1.0).unwrap(), c(1.0));
    }

    #[test]
    fn dp_increments() {
        let law = JumpDistribution::atoms([(1.0, 0.5), (-1.0, 0.5)]).unwrap();
        let sched = PredictableJumpSchedule::new(vec![ScheduledJump { time: 0.5, law }]).unwrap();
        let v = dp_drift(&RepresentingFunction::Identity, &sched, 1.0).unwrap();
        assert_eq!(v, vec![(0.5, c(0.0))]);
        let p = 0.3;
        let law = JumpDistribution::atoms([(-1.0, p), (1.0, 1.0 - p)]).unwrap();
        let sched = PredictableJumpSchedule::new(vec![ScheduledJump { time: 0.5, law }]).unwrap();
        let v = dp_drift(&RepresentingFunction::IndicatorMinusOne, &sched, 1.0).unwrap();
        assert!((v[0].1.re - p).abs() < 1e-15);
        assert!(dp_drift(&RepresentingFunction::IndicatorMinusOne, &sched, 0.4).unwrap().is_empty());
    }

    #[test]
    fn killing_jump_zeroes_expectation() {
        let law = JumpDistribution::atoms([(-1.0, 1.0)]).unwrap();
        let sched = PredictableJumpSchedule::new(vec![ScheduledJump { time: 0.5, law }]).unwrap();
        let t = LevyTriplet::brownian(0.0, 0.04).unwrap();
        let xi = RepresentingFunction::Identity;
        assert!(matches!(mult_compensator(&xi, &t, &sched, 1.0), Err(Error::DegenerateJump { .. })));
        assert_eq!(expected_stoch_exp(&xi, &t, &sched, 1.0).unwrap(), c(0.0));
        assert_eq!(expected_stoch_exp(&xi, &t, &sched, 0.25).unwrap(), c(1.0));
    }

    #[test]
    fn poisson_characteristic_function() {
        let t = LevyTriplet::new(0.0, 0.0, JumpMeasure::atoms([(1.0, 1.0)]).unwrap(), Truncation::Zero).unwrap();
        let v = levy_khintchin(1.0, &t, &PredictableJumpSchedule::empty(), 1.0).unwrap();
        let exact = (Complex64::new(0.0, 1.0).exp() - 1.0).exp();
        assert!((v - exact).norm() < 1e-14);
    }

    #[test]
    fn utility_reductions() {
        let levy = LevyTriplet::new(0.2, 0.04, JumpMeasure::gaussian(1.0, 0.0, 0.01).unwrap(), Truncation::Identity).unwrap();
        let law = JumpDistribution::gaussian(0.0, 0.01).unwrap();
        let mut p = UtilityParams {
            lambda_l: 0.0,
            lambda_v: 0.0,
            levy: levy.clone(),
            theta: 2.0,
            law,
            horizon: 1.0,
        };
        assert!((expected_exp_utility(&p).unwrap() - 1.0).abs() < 1e-14);
        p.lambda_l = 1.0;
        p.lambda_v = 0.7;
        p.theta = 0.0;
        let direct = mult_compensator(&RepresentingFunction::exp_utility(1.0), &levy, &PredictableJumpSchedule::empty(), 1.0).unwrap();
        assert!((expected_exp_utility(&p).unwrap() - direct.re).abs() < 1e-14);
    }

    #[test]
    fn complex_pushforward_is_rejected() {
        let t = LevyTriplet::brownian(0.0, 1.0).unwrap();
        assert!(matches!(
            pushforward_triplet(&RepresentingFunction::char_exp(1.0), &t),
            Err(Error::ComplexRepresentation(_))
        ));
    }
}
