//! Mean–variance case study: wealth `1 − 𝓔(−a(e^{id} − 1)∘X)_T` for a
//! jump-diffusion log-price `X` with Gaussian jumps.

use num_complex::Complex64;

use super::mellin::SignedMellinModel;
use crate::error::{invalid, Error, Result};
use crate::levycalc::{drift_rate, JumpMeasure, LevyTriplet, PredictableJumpSchedule, RepresentingFunction, Truncation};
use crate::numkernel::{gaussian_pdf, integrate, normal_sf, QuadratureSpec};

const WINDOW: f64 = 8.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvParams {
    pub mu: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub horizon: f64,
}

impl MvParams {
    /// `(μ, σ, λ, γ, T) = (0.2, 0.2, 1, 0.1, 1)`.
    pub fn reference() -> Self {
        Self {
            mu: 0.2,
            sigma: 0.2,
            lambda: 1.0,
            gamma: 0.1,
            horizon: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.mu, self.sigma, self.lambda, self.gamma, self.horizon]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.sigma < 0.0 || self.lambda < 0.0 || self.gamma <= 0.0 || self.horizon <= 0.0 {
            return Err(invalid(format!("invalid mean-variance parameters {self:?}")));
        }
        Ok(())
    }

    /// Triplet of `X`: drift `μ`, variance `σ²`, jumps `λ·N(0, γ²)`.
    pub fn triplet(&self) -> Result<LevyTriplet> {
        self.validate()?;
        LevyTriplet::new(
            self.mu,
            self.sigma * self.sigma,
            JumpMeasure::gaussian(self.lambda, 0.0, self.gamma * self.gamma)?,
            Truncation::Identity,
        )
    }

    pub fn model(&self) -> Result<SignedMellinModel> {
        let a = mv_optimal_fraction(self)?;
        SignedMellinModel::new(
            self.triplet()?,
            RepresentingFunction::ExpReturn(a),
            PredictableJumpSchedule::empty(),
            self.horizon,
        )
    }
}

/// `a = (μ + σ²/2 + λ(e^{γ²/2} − 1)) / (σ² + λ(e^{2γ²} − 2e^{γ²/2} + 1))`.
pub fn mv_optimal_fraction(p: &MvParams) -> Result<f64> {
    p.validate()?;
    let s2 = p.sigma * p.sigma;
    let g2 = p.gamma * p.gamma;
    let num = p.mu + 0.5 * s2 + p.lambda * (0.5 * g2).exp_m1();
    let den = s2 + p.lambda * ((2.0 * g2).exp() - 2.0 * (0.5 * g2).exp() + 1.0);
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok(num / den)
}

/// The same ratio as drifts of `(e^{id} − 1)∘X` and `(e^{id} − 1)²∘X`.
pub fn mv_optimal_fraction_via_drift(p: &MvParams) -> Result<f64> {
    let t = p.triplet()?;
    let ret = RepresentingFunction::esscher(1.0);
    let num = drift_rate(&ret, &t)?.re;
    let den = drift_rate(&RepresentingFunction::product(ret.clone(), ret), &t)?.re;
    if !(den > 0.0) {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok(num / den)
}

/// Jump sizes `x` with `a(eˣ − 1) > 1`, i.e. jumps flipping the sign of the
/// exponential. `None` when there are none.
fn sign_flip_region(a: f64) -> Option<(f64, f64)> {
    let xstar = (1.0 + 1.0 / a).ln();
    if a > 0.0 {
        Some((xstar, f64::INFINITY))
    } else if a < -1.0 {
        Some((f64::NEG_INFINITY, xstar))
    } else {
        None
    }
}

fn jump_window(p: &MvParams) -> (f64, f64) {
    (-WINDOW * p.gamma, WINDOW * p.gamma)
}

fn clip(region: (f64, f64), window: (f64, f64)) -> Option<(f64, f64)> {
    let lo = region.0.max(window.0);
    let hi = region.1.min(window.1);
    (lo < hi).then_some((lo, hi))
}

/// `|1 − a(eˣ − 1)|^α`, zero where the base vanishes.
fn modulus_power(a: f64, x: f64, alpha: Complex64) -> Complex64 {
    let m = (1.0 - a * x.exp_m1()).abs();
    if m == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        (alpha * m.ln()).exp()
    }
}

/// `I₁(α) = −αa(μ + ½(1+a)σ²) + ½α²(aσ)² + ∫(|1 − a(eˣ−1)|^α 1{a(eˣ−1) ≠ 1} − 1) Π(dx)`.
pub fn mv_i1(p: &MvParams, alpha: Complex64, spec: &QuadratureSpec) -> Result<Complex64> {
    let a = mv_optimal_fraction(p)?;
    let s2 = p.sigma * p.sigma;
    let g2 = p.gamma * p.gamma;
    let (lo, hi) = jump_window(p);
    let mut spec = spec.clone();
    let xstar = (1.0 + 1.0 / a).ln();
    if xstar.is_finite() {
        spec.split_points.push(xstar);
    }
    let jumps = if p.lambda == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        integrate(
            |x| (modulus_power(a, x, alpha) - 1.0) * gaussian_pdf(x, 0.0, g2),
            lo,
            hi,
            &spec,
        )? * p.lambda
    };
    Ok(-alpha * a * (p.mu + 0.5 * (1.0 + a) * s2) + alpha * alpha * (0.5 * a * a * s2) + jumps)
}

/// `I₂(α) = ∫ |1 − a(eˣ−1)|^α 1{a(eˣ−1) > 1} Π(dx)`.
pub fn mv_i2(p: &MvParams, alpha: Complex64, spec: &QuadratureSpec) -> Result<Complex64> {
    let a = mv_optimal_fraction(p)?;
    let g2 = p.gamma * p.gamma;
    let Some((lo, hi)) = sign_flip_region(a).and_then(|r| clip(r, jump_window(p))) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    if p.lambda == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(integrate(|x| modulus_power(a, x, alpha) * gaussian_pdf(x, 0.0, g2), lo, hi, spec)? * p.lambda)
}

/// `I₂(0) = λ·P[N(0, γ²) falls in the sign-flip region]` from the normal CDF.
pub fn mv_i2_at_zero(p: &MvParams) -> Result<f64> {
    let a = mv_optimal_fraction(p)?;
    let xstar = (1.0 + 1.0 / a).ln();
    Ok(match sign_flip_region(a) {
        Some((_, hi)) if hi.is_infinite() => p.lambda * normal_sf(xstar / p.gamma),
        Some(_) => p.lambda * normal_sf(-xstar / p.gamma),
        None => 0.0,
    })
}

/// `g±(α) = e^{I₁(α)T}(1 ± e^{−2I₂(α)T})/2`.
pub fn mv_g_closed_form(p: &MvParams, alpha: Complex64, spec: &QuadratureSpec) -> Result<(Complex64, Complex64)> {
    let i1 = mv_i1(p, alpha, spec)?;
    let i2 = mv_i2(p, alpha, spec)?;
    let t = p.horizon;
    let lead = (i1 * t).exp() * 0.5;
    let decay = (-2.0 * i2 * t).exp();
    Ok((lead * (1.0 + decay), lead * (1.0 - decay)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jump_free_fraction() {
        let p = MvParams {
            mu: 0.04,
            sigma: 0.2,
            lambda: 0.0,
            gamma: 0.1,
            horizon: 1.0,
        };
        assert!((mv_optimal_fraction(&p).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn reference_fraction_two_routes() {
        let p = MvParams::reference();
        let a = mv_optimal_fraction(&p).unwrap();
        assert!((a - 4.48).abs() < 0.01, "{a}");
        let b = mv_optimal_fraction_via_drift(&p).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn degenerate_denominator() {
        let p = MvParams {
            sigma: 0.0,
            lambda: 0.0,
            ..MvParams::reference()
        };
        assert!(matches!(mv_optimal_fraction(&p), Err(Error::DegenerateDenominator(_))));
    }

    #[test]
    fn indicator_integrals_at_zero() {
        let p = MvParams::reference();
        let spec = QuadratureSpec::default();
        let i1 = mv_i1(&p, Complex64::new(0.0, 0.0), &spec).unwrap();
        assert!(i1.norm() < 1e-14);
        let i2 = mv_i2(&p, Complex64::new(0.0, 0.0), &spec).unwrap();
        assert!((i2.re - mv_i2_at_zero(&p).unwrap()).abs() < 1e-12);
    }
}
