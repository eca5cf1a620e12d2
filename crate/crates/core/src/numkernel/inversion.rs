//! Fourier inversion of characteristic functions on a uniform grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Uniform abscissae `x_min, ..., x_max` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        let g = Self { x_min, x_max, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(invalid(format!("grid bounds must be finite with x_min < x_max, got [{}, {}]", self.x_min, self.x_max)));
        }
        if self.n < 2 {
            return Err(invalid("grid needs at least two points"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n).map(|i| self.x_min + i as f64 * h).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionSpec {
    /// Truncation `U` of the frequency integral to `[-U, U]`.
    pub half_width: f64,
    /// Number of trapezoid nodes on `[-U, U]`; the rule uses `2⌊n/2⌋ + 1`
    /// nodes so that `u = 0` is one of them.
    pub n_points: usize,
    pub grid: GridSpec,
    /// Re-invert with `2U` and fail if any density value moves by more than 1e-6.
    pub check_aliasing: bool,
}

impl InversionSpec {
    pub fn new(grid: GridSpec) -> Self {
        Self {
            half_width: 200.0,
            n_points: 1 << 14,
            grid,
            check_aliasing: false,
        }
    }

    /// Number of frequency steps on `[0, U]`.
    pub fn half_nodes(&self) -> usize {
        (self.n_points / 2).max(1)
    }

    /// Frequencies `u_k = k·U/m`, `k = 0..=m`, at which `φ` is sampled.
    pub fn frequencies(&self) -> Vec<f64> {
        let m = self.half_nodes();
        let du = self.half_width / m as f64;
        (0..=m).map(|k| k as f64 * du).collect()
    }

    fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(invalid("inversion half-width must be positive"));
        }
        if self.n_points < 3 {
            return Err(invalid("inversion needs at least three frequency nodes"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    /// Trapezoid integral of `p` over the grid.
    pub mass: f64,
    /// Largest imaginary part dropped when returning real densities.
    pub max_imag_residue: f64,
}

impl DensityGrid {
    pub fn from_values(x: Vec<f64>, p: Vec<f64>) -> Self {
        let mass = trapezoid(&x, &p);
        Self {
            x,
            p,
            mass,
            max_imag_residue: 0.0,
        }
    }

    pub fn step(&self) -> f64 {
        if self.x.len() < 2 {
            0.0
        } else {
            self.x[1] - self.x[0]
        }
    }

    /// Piecewise-linear interpolation, zero outside the grid.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.x.len();
        if n < 2 || x < self.x[0] || x > self.x[n - 1] {
            return 0.0;
        }
        let h = self.step();
        let pos = (x - self.x[0]) / h;
        let i = (pos.floor() as usize).min(n - 2);
        let w = pos - i as f64;
        self.p[i] * (1.0 - w) + self.p[i + 1] * w
    }

    /// Integral of the linear interpolant over `[a, b]` intersected with the grid.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let n = self.x.len();
        if n < 2 {
            return 0.0;
        }
        let (lo, hi) = (a.max(self.x[0]), b.min(self.x[n - 1]));
        if !(lo < hi) {
            return 0.0;
        }
        let mut xs = vec![lo];
        xs.extend(self.x.iter().copied().filter(|x| *x > lo && *x < hi));
        xs.push(hi);
        let ps: Vec<f64> = xs.iter().map(|x| self.interpolate(*x)).collect();
        trapezoid(&xs, &ps)
    }

    pub fn scaled(mut self, c: f64) -> Self {
        for v in &mut self.p {
            *v *= c;
        }
        self.mass *= c;
        self.max_imag_residue *= c.abs();
        self
    }
}

pub fn trapezoid(x: &[f64], p: &[f64]) -> f64 {
    x.windows(2)
        .zip(p.windows(2))
        .map(|(xw, pw)| 0.5 * (xw[1] - xw[0]) * (pw[0] + pw[1]))
        .sum()
}

const NEGATIVE_CLIP: f64 = 1e-8;
const DECAY_THRESHOLD: f64 = 1e-8;

/// Recovers the density of a real random variable from its characteristic
/// function by the trapezoid rule on `[-U, U]`.
///
/// `phi` is only called at `u >= 0` (plus a few negative probes for the
/// symmetry check); negative frequencies use `phi(-u) = conj(phi(u))`.
pub fn invert_characteristic<F>(phi: F, spec: &InversionSpec) -> Result<DensityGrid>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    spec.validate()?;
    let asymmetry = check_characteristic(&phi, spec.half_width)?;
    let values = sample_half_line(&phi, spec.half_width, spec.half_nodes())?;
    let mut density = invert_samples(&values, spec.half_width, &spec.grid)?;
    density.max_imag_residue = asymmetry * spec.half_width / PI;

    if spec.check_aliasing {
        let wide_values = sample_half_line(&phi, 2.0 * spec.half_width, spec.half_nodes())?;
        let wide = trapezoid_inverse(&wide_values, 2.0 * spec.half_width, &spec.grid)?;
        let max_change = density
            .p
            .iter()
            .zip(&wide.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if max_change > 1e-6 {
            return Err(Error::AliasingSuspected { max_change });
        }
    }
    Ok(density)
}

/// Inverts values `φ(u_k)` sampled at `u_k = k·U/m`, `k = 0..=m`.
pub fn invert_samples(values: &[Complex64], half_width: f64, grid: &GridSpec) -> Result<DensityGrid> {
    grid.validate()?;
    if values.len() < 2 {
        return Err(invalid("need at least two frequency samples"));
    }
    let tail = values[values.len() - 1].norm();
    if tail > DECAY_THRESHOLD {
        return Err(Error::NonDecayingCharFn { modulus: tail });
    }
    trapezoid_inverse(values, half_width, grid)
}

/// Checks `φ(0) = 1` and `φ(−u) = conj(φ(u))` on a few probes in `(0, u_max)`;
/// returns the largest symmetry defect seen.
pub fn check_characteristic<F>(phi: &F, u_max: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let at_zero = phi(0.0)?;
    if (at_zero - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::AsymmetricCharFn(format!("phi(0) = {at_zero}, expected 1")));
    }
    let mut worst: f64 = 0.0;
    for frac in [0.003_7, 0.021, 0.13, 0.41, 0.77] {
        let u = frac * u_max;
        let plus = phi(u)?;
        let minus = phi(-u)?;
        let gap = (minus - plus.conj()).norm();
        if gap > 1e-10 {
            return Err(Error::AsymmetricCharFn(format!(
                "phi(-u) differs from conj(phi(u)) by {gap:e} at u = {u}"
            )));
        }
        worst = worst.max(gap);
    }
    Ok(worst)
}

fn sample_half_line<F>(phi: &F, u_max: f64, half: usize) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let du = u_max / half as f64;
    (0..=half)
        .into_par_iter()
        .map(|k| {
            let u = k as f64 * du;
            let v = phi(u)?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NaNEncountered { at: u });
            }
            Ok(v)
        })
        .collect()
}

fn trapezoid_inverse(values: &[Complex64], u_max: f64, grid: &GridSpec) -> Result<DensityGrid> {
    let half = values.len() - 1;
    let du = u_max / half as f64;
    let xs = grid.points();
    let p: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            // Σ_{k=-m}^{m} w_k e^{-i u_k x} φ(u_k) folded onto k ≥ 0.
            let rot = Complex64::new(0.0, -du * x).exp();
            let mut e = Complex64::new(1.0, 0.0);
            let mut acc = 0.5 * values[0].re;
            for (k, v) in values.iter().enumerate().skip(1) {
                if k % 256 == 0 {
                    e = Complex64::new(0.0, -(k as f64) * du * x).exp();
                } else {
                    e *= rot;
                }
                let term = (e * v).re;
                acc += if k == half { 0.5 * term } else { term };
            }
            acc * du / PI
        })
        .collect();
    let mut clipped = Vec::with_capacity(p.len());
    for (x, v) in xs.iter().zip(p) {
        if v < -NEGATIVE_CLIP {
            return Err(Error::NegativeDensity { x: *x, value: v });
        }
        clipped.push(v.max(0.0));
    }
    Ok(DensityGrid::from_values(xs, clipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::special::normal_pdf;

    #[test]
    fn gaussian_pair() {
        let grid = GridSpec::new(-8.0, 8.0, 401).unwrap();
        let spec = InversionSpec {
            half_width: 40.0,
            ..InversionSpec::new(grid)
        };
        let d = invert_characteristic(|u| Ok(Complex64::new((-0.5 * u * u).exp(), 0.0)), &spec).unwrap();
        let err = d
            .x
            .iter()
            .zip(&d.p)
            .map(|(x, p)| (p - normal_pdf(*x)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-8, "{err}");
        assert!((d.mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn point_mass_is_flagged() {
        let spec = InversionSpec::new(GridSpec::new(-1.0, 1.0, 11).unwrap());
        let err = invert_characteristic(|_| Ok(Complex64::new(1.0, 0.0)), &spec).unwrap_err();
        assert!(matches!(err, Error::NonDecayingCharFn { .. }));
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let spec = InversionSpec::new(GridSpec::new(-1.0, 1.0, 11).unwrap());
        let err = invert_characteristic(
            |u| Ok(Complex64::new((-0.5 * u * u).exp(), 0.0) * Complex64::new(0.0, u.abs()).exp()),
            &spec,
        )
        .unwrap_err();
        assert!(matches!(err, Error::AsymmetricCharFn(_)));
        let err = invert_characteristic(|_| Ok(Complex64::new(0.5, 0.0)), &spec).unwrap_err();
        assert!(matches!(err, Error::AsymmetricCharFn(_)));
    }

    #[test]
    fn shifted_gaussian_with_aliasing_check() {
        let grid = GridSpec::new(-6.0, 8.0, 281).unwrap();
        let spec = InversionSpec {
            half_width: 30.0,
            check_aliasing: true,
            ..InversionSpec::new(grid)
        };
        let d = invert_characteristic(
            |u| Ok(Complex64::new(-0.5 * u * u, u).exp()),
            &spec,
        )
        .unwrap();
        for (x, p) in d.x.iter().zip(&d.p) {
            assert!((p - normal_pdf(x - 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn interpolation_and_partial_mass() {
        let d = DensityGrid::from_values(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]);
        assert_eq!(d.mass, 1.0);
        assert_eq!(d.interpolate(0.5), 0.5);
        assert_eq!(d.interpolate(3.0), 0.0);
        assert_eq!(d.mass_between(0.0, 1.0), 0.5);
        assert!((d.mass_between(0.5, 1.5) - 0.75).abs() < 1e-15);
        assert!((d.mass_between(-1.0, 0.5) - 0.125).abs() < 1e-15);
        assert_eq!(d.mass_between(2.5, 3.0), 0.0);
    }
}
