//! Finite-activity jump measures, truncation functions and Lévy triplets.

use num_complex::Complex64;

use super::repfn::RepresentingFunction;
use crate::error::{invalid, Error, Result};
use crate::numkernel::{gaussian_pdf, integrate, QuadratureSpec};

/// Half-width, in standard deviations, of the window used for Gaussian jump
/// laws. The mass outside is below 1e-16.
pub const GAUSSIAN_WINDOW: f64 = 8.5;

const OVERFLOW: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub size: f64,
    /// Rate per unit time for a Lévy measure, probability for a jump law.
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub enum JumpMeasure {
    /// `λ·N(m, γ²)`.
    GaussianCpp { intensity: f64, mean: f64, var: f64 },
    Atoms(Vec<Atom>),
    /// Image of `base` under `map`, integrated as `∫ f(map(x)) base(dx)`.
    Transformed {
        base: Box<JumpMeasure>,
        map: RepresentingFunction,
    },
    /// `(1 + ψ(x)) / norm · base(dx)`.
    Tilted {
        base: Box<JumpMeasure>,
        psi: RepresentingFunction,
        norm: f64,
    },
}

impl JumpMeasure {
    pub fn none() -> Self {
        JumpMeasure::Atoms(Vec::new())
    }

    pub fn gaussian(intensity: f64, mean: f64, var: f64) -> Result<Self> {
        let m = JumpMeasure::GaussianCpp { intensity, mean, var };
        m.validate()?;
        Ok(m)
    }

    /// Atoms given as `(size, intensity)` pairs; sizes must be nonzero.
    pub fn atoms(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(size, weight)| Atom { size, weight })
            .collect();
        if let Some(a) = atoms.iter().find(|a| a.size == 0.0) {
            return Err(invalid(format!("jump atoms must have nonzero size, got {a:?}")));
        }
        let m = JumpMeasure::Atoms(atoms);
        m.validate()?;
        Ok(m)
    }

    pub fn transformed(self, map: RepresentingFunction) -> Self {
        if map.is_identity() {
            return self;
        }
        JumpMeasure::Transformed {
            base: Box::new(self),
            map,
        }
    }

    pub fn tilted(self, psi: RepresentingFunction, norm: f64) -> Self {
        JumpMeasure::Tilted {
            base: Box::new(self),
            psi,
            norm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            JumpMeasure::GaussianCpp { intensity, mean, var } => {
                if !(intensity.is_finite() && *intensity >= 0.0) {
                    return Err(invalid(format!("jump intensity must be finite and non-negative, got {intensity}")));
                }
                if !mean.is_finite() || !(var.is_finite() && *var > 0.0) {
                    return Err(invalid(format!("Gaussian jump law needs finite mean and positive variance, got ({mean}, {var})")));
                }
                Ok(())
            }
            JumpMeasure::Atoms(atoms) => {
                for a in atoms {
                    if !a.size.is_finite() || !(a.weight.is_finite() && a.weight >= 0.0) {
                        return Err(invalid(format!("invalid jump atom {a:?}")));
                    }
                }
                Ok(())
            }
            JumpMeasure::Transformed { base, .. } => base.validate(),
            JumpMeasure::Tilted { base, norm, .. } => {
                if !(norm.is_finite() && *norm > 0.0) {
                    return Err(invalid(format!("tilt normalization must be positive, got {norm}")));
                }
                base.validate()
            }
        }
    }

    /// True when the measure is a plain Gaussian or atomic law that can be
    /// sampled directly.
    pub fn is_elementary(&self) -> bool {
        matches!(self, JumpMeasure::GaussianCpp { .. } | JumpMeasure::Atoms(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            JumpMeasure::GaussianCpp { intensity, .. } => *intensity == 0.0,
            JumpMeasure::Atoms(atoms) => atoms.iter().all(|a| a.weight == 0.0),
            JumpMeasure::Transformed { base, .. } | JumpMeasure::Tilted { base, .. } => base.is_zero(),
        }
    }

    /// `∫ f(z) ν(dz)`. `breaks` lists real jump values where `f` is not
    /// smooth; they become quadrature split points after pulling back
    /// through any transformations.
    pub fn integrate(
        &self,
        f: &dyn Fn(Complex64) -> Complex64,
        breaks: &[f64],
        spec: &QuadratureSpec,
    ) -> Result<Complex64> {
        match self {
            JumpMeasure::GaussianCpp { intensity, mean, var } => {
                if *intensity == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let sd = var.sqrt();
                let (lo, hi) = (mean - GAUSSIAN_WINDOW * sd, mean + GAUSSIAN_WINDOW * sd);
                let spec = spec.clone().with_split_points(breaks.iter().copied());
                let v = integrate(
                    |x| f(Complex64::new(x, 0.0)) * gaussian_pdf(x, *mean, *var),
                    lo,
                    hi,
                    &spec,
                )
                .map_err(incompatible)?;
                Ok(v * *intensity)
            }
            JumpMeasure::Atoms(atoms) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in atoms.iter().filter(|a| a.weight > 0.0) {
                    let v = f(Complex64::new(a.size, 0.0));
                    if v.re.is_nan() || v.im.is_nan() {
                        return Err(Error::Incompatible(format!("integrand undefined at jump atom {}", a.size)));
                    }
                    acc += v * a.weight;
                }
                Ok(acc)
            }
            JumpMeasure::Transformed { base, map } => {
                let mut pulled = map.breakpoints();
                for y in breaks {
                    pulled.extend(map.preimage(*y));
                }
                base.integrate(&|x| f(map.eval(x)), &pulled, spec)
            }
            JumpMeasure::Tilted { base, psi, norm } => {
                let mut all = breaks.to_vec();
                all.extend(psi.breakpoints());
                base.integrate(&|x| f(x) * (Complex64::new(1.0, 0.0) + psi.eval(x)) / *norm, &all, spec)
            }
        }
    }

    /// Mass of the jumps that are not mapped to zero.
    pub fn total_intensity(&self) -> Result<f64> {
        let spec = QuadratureSpec::default();
        let v = self.integrate(
            &|z| {
                if z == Complex64::new(0.0, 0.0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            },
            &[],
            &spec,
        )?;
        Ok(v.re)
    }

    /// Decides whether `∫ (|ξ|² ∧ |ξ|) dν` is finite.
    pub fn special_check(&self, xi: &RepresentingFunction) -> Result<()> {
        self.tail_check(xi)?;
        // Only finiteness matters here, so a coarse tolerance suffices and a
        // finite estimate from an exhausted budget is accepted.
        let spec = QuadratureSpec::with_tolerances(1e-4, 1e-10);
        let v = self.integrate(
            &|z| {
                let m = xi.eval(z).norm();
                Complex64::new(m.min(m * m), 0.0)
            },
            &xi.breakpoints(),
            &spec,
        );
        match v {
            Ok(v) if v.re.is_finite() && v.re < OVERFLOW => Ok(()),
            Ok(v) => Err(Error::NotSpecial(format!("∫(|{xi}|²∧|{xi}|)dν = {}", v.re))),
            Err(Error::NonConvergent { estimate, .. }) => {
                if estimate.is_finite() && estimate < OVERFLOW {
                    Ok(())
                } else {
                    Err(Error::NotSpecial(format!("∫(|{xi}|²∧|{xi}|)dν diverges")))
                }
            }
            Err(e) => Err(e),
        }
    }

    /// Analytic divergence test for `|ξ|` against the measure: poles with
    /// non-integrable order, and Gaussian tails overwhelmed by `ξ`.
    fn tail_check(&self, xi: &RepresentingFunction) -> Result<()> {
        match self {
            JumpMeasure::GaussianCpp { intensity, mean, var } => {
                if *intensity == 0.0 {
                    return Ok(());
                }
                let sd = var.sqrt();
                for (x0, e) in xi.blowups() {
                    if e <= -1.0 && (x0 - mean).abs() < 40.0 * sd {
                        return Err(Error::NotSpecial(format!("{xi} has a pole of order {} at {x0}", -e)));
                    }
                }
                for side in [-1.0, 1.0] {
                    let mut prev = f64::NEG_INFINITY;
                    let mut rising = 0;
                    for k in [16.0, 32.0, 64.0, 128.0, 256.0] {
                        let x = mean + side * k * sd;
                        let m = xi.eval_real(x).norm();
                        if m.is_infinite() {
                            return Err(Error::NotSpecial(format!("{xi} overflows in the tail at {x}")));
                        }
                        let logv = m.min(m * m).ln() - 0.5 * k * k;
                        if logv >= prev {
                            rising += 1;
                        }
                        prev = logv;
                    }
                    if rising == 5 && prev > f64::NEG_INFINITY {
                        return Err(Error::NotSpecial(format!("{xi} outgrows the Gaussian tail")));
                    }
                }
                Ok(())
            }
            JumpMeasure::Atoms(atoms) => {
                for a in atoms.iter().filter(|a| a.weight > 0.0) {
                    let v = xi.eval_real(a.size);
                    if v.re.is_nan() || v.im.is_nan() {
                        return Err(Error::Incompatible(format!("{xi} undefined at jump atom {}", a.size)));
                    }
                    if !v.norm().is_finite() {
                        return Err(Error::NotSpecial(format!("{xi} infinite at jump atom {}", a.size)));
                    }
                }
                Ok(())
            }
            JumpMeasure::Transformed { base, map } => {
                base.tail_check(&RepresentingFunction::compose(xi.clone(), map.clone()))
            }
            JumpMeasure::Tilted { base, psi, .. } => {
                base.tail_check(xi)?;
                base.tail_check(&RepresentingFunction::product(xi.clone(), psi.clone()))
            }
        }
    }
}

fn incompatible(e: Error) -> Error {
    match e {
        Error::NaNEncountered { at } => Error::Incompatible(format!("integrand undefined at jump size {at}")),
        other => other,
    }
}

/// Truncation function `h` under which drifts are quoted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Identity,
    Zero,
    /// `h(x) = x·1{|x| ≤ c}`.
    Bounded(f64),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Bounded(1.0)
    }
}

impl Truncation {
    pub fn h(&self, x: f64) -> f64 {
        match *self {
            Truncation::Identity => x,
            Truncation::Zero => 0.0,
            Truncation::Bounded(c) => {
                if x.abs() <= c {
                    x
                } else {
                    0.0
                }
            }
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Truncation::Bounded(c) => vec![-c, c],
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Truncation::Bounded(c) if !(c.is_finite() && c > 0.0) => {
                Err(invalid(format!("truncation bound must be positive, got {c}")))
            }
            _ => Ok(()),
        }
    }
}

/// Characteristics of a real Lévy process: drift rate `b` relative to
/// `trunc`, diffusion variance rate and jump measure.
#[derive(Debug, Clone)]
pub struct LevyTriplet {
    pub b: f64,
    pub sigma2: f64,
    pub jumps: JumpMeasure,
    pub trunc: Truncation,
}

impl LevyTriplet {
    pub fn new(b: f64, sigma2: f64, jumps: JumpMeasure, trunc: Truncation) -> Result<Self> {
        if !b.is_finite() {
            return Err(invalid(format!("drift must be finite, got {b}")));
        }
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(invalid(format!("diffusion variance must be non-negative, got {sigma2}")));
        }
        jumps.validate()?;
        trunc.validate()?;
        Ok(Self { b, sigma2, jumps, trunc })
    }

    pub fn brownian(mu: f64, sigma2: f64) -> Result<Self> {
        Self::new(mu, sigma2, JumpMeasure::none(), Truncation::Identity)
    }

    /// `∫ (h'(x) − h(x)) ν(dx)` for real jumps.
    fn truncation_shift(&self, to: Truncation) -> Result<f64> {
        if to == self.trunc || self.jumps.is_zero() {
            return Ok(0.0);
        }
        let from = self.trunc;
        let mut breaks = from.breakpoints();
        breaks.extend(to.breakpoints());
        let spec = QuadratureSpec::with_tolerances(1e-12, 1e-14);
        let v = self.jumps.integrate(
            &|z| Complex64::new(to.h(z.re) - from.h(z.re), 0.0),
            &breaks,
            &spec,
        )?;
        Ok(v.re)
    }

    /// Same process with its drift re-expressed under another truncation.
    pub fn with_truncation(&self, to: Truncation) -> Result<Self> {
        to.validate()?;
        let shift = self.truncation_shift(to)?;
        Ok(Self {
            b: self.b + shift,
            sigma2: self.sigma2,
            jumps: self.jumps.clone(),
            trunc: to,
        })
    }

    /// Drift under `h = 0`, i.e. the drift of the continuous part.
    pub fn pure_drift(&self) -> Result<f64> {
        Ok(self.with_truncation(Truncation::Zero)?.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::normal_sf;

    #[test]
    fn gaussian_integrals() {
        let m = JumpMeasure::gaussian(2.0, 0.1, 0.04).unwrap();
        let spec = QuadratureSpec::default();
        let mass = m.integrate(&|_| Complex64::new(1.0, 0.0), &[], &spec).unwrap();
        assert!((mass.re - 2.0).abs() < 1e-12);
        let mean = m.integrate(&|z| z, &[], &spec).unwrap();
        assert!((mean.re - 0.2).abs() < 1e-12);
        let tail = m
            .integrate(&|z| Complex64::new(if z.re > 0.3 { 1.0 } else { 0.0 }, 0.0), &[0.3], &spec)
            .unwrap();
        assert!((tail.re - 2.0 * normal_sf(1.0)).abs() < 1e-12);
    }

    #[test]
    fn transformed_pulls_back_breaks() {
        let a = 4.0;
        let base = JumpMeasure::gaussian(1.0, 0.0, 0.01).unwrap();
        let y = base.clone().transformed(RepresentingFunction::ExpReturn(a));
        let spec = QuadratureSpec::default();
        let below = y
            .integrate(&|z| Complex64::new(if z.re < -1.0 { 1.0 } else { 0.0 }, 0.0), &[-1.0], &spec)
            .unwrap();
        let xstar = (1.0 + 1.0 / a).ln();
        assert!((below.re - normal_sf(xstar / 0.1)).abs() < 1e-12);
    }

    #[test]
    fn atoms_sum() {
        let m = JumpMeasure::atoms([(1.0, 0.5), (-2.0, 0.25)]).unwrap();
        let v = m.integrate(&|z| z * z, &[], &QuadratureSpec::default()).unwrap();
        assert_eq!(v.re, 0.5 + 1.0);
        assert!(JumpMeasure::atoms([(0.0, 1.0)]).is_err());
        assert!(JumpMeasure::atoms([(1.0, -1.0)]).is_err());
    }

    #[test]
    fn retruncation_round_trip() {
        let t = LevyTriplet::new(0.3, 0.04, JumpMeasure::gaussian(1.5, 0.4, 0.81).unwrap(), Truncation::Bounded(1.0)).unwrap();
        for to in [Truncation::Identity, Truncation::Zero, Truncation::Bounded(0.5)] {
            let back = t.with_truncation(to).unwrap().with_truncation(t.trunc).unwrap();
            assert!((back.b - t.b).abs() < 1e-12);
        }
        let ident = t.with_truncation(Truncation::Identity).unwrap();
        let zero = t.with_truncation(Truncation::Zero).unwrap();
        assert!((ident.b - zero.b - 1.5 * 0.4).abs() < 1e-12);
    }

    #[test]
    fn special_checks() {
        let g = JumpMeasure::gaussian(1.0, 0.0, 0.01).unwrap();
        assert!(g.special_check(&RepresentingFunction::Identity).is_ok());
        assert!(g.special_check(&RepresentingFunction::exp_utility(2.0)).is_ok());
        assert!(matches!(
            g.special_check(&RepresentingFunction::exp_utility(-2.0)),
            Err(Error::NotSpecial(_))
        ));
        let shifted = JumpMeasure::gaussian(1.0, -1.0, 0.01).unwrap();
        assert!(matches!(
            shifted.special_check(&RepresentingFunction::Reciprocal),
            Err(Error::NotSpecial(_))
        ));
        let atoms = JumpMeasure::atoms([(50.0, 0.1)]).unwrap();
        assert!(atoms.special_check(&RepresentingFunction::Exponential(Complex64::new(1.0, 0.0))).is_ok());
    }

    #[test]
    fn total_intensity_of_images() {
        let m = JumpMeasure::atoms([(1.0, 0.5), (-1.0, 0.25)]).unwrap();
        assert_eq!(m.total_intensity().unwrap(), 0.75);
        let img = m.transformed(RepresentingFunction::IndicatorMinusOne);
        assert_eq!(img.total_intensity().unwrap(), 0.25);
    }
}
