//! Monte Carlo estimators with standard errors.

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Sample mean of complex values with separate real/imaginary standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: Complex64,
    pub se_re: f64,
    pub se_im: f64,
    pub n: usize,
}

impl Estimate {
    /// `|mean − target| ≤ k·se` componentwise, with an absolute floor for
    /// zero-variance components.
    pub fn within(&self, target: Complex64, k: f64) -> bool {
        let ok = |d: f64, se: f64| d.abs() <= k * se + 1e-12 * (1.0 + target.norm());
        ok(self.mean.re - target.re, self.se_re) && ok(self.mean.im - target.im, self.se_im)
    }

    /// Largest componentwise deviation from `target` in units of the
    /// standard error.
    pub fn z_score(&self, target: Complex64) -> f64 {
        let z = |d: f64, se: f64| if se > 0.0 { d.abs() / se } else if d == 0.0 { 0.0 } else { f64::INFINITY };
        z(self.mean.re - target.re, self.se_re).max(z(self.mean.im - target.im, self.se_im))
    }
}

pub fn estimate(values: &[Complex64]) -> Result<Estimate> {
    let n = values.len();
    if n < 2 {
        return Err(invalid("an estimate needs at least two samples"));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<Complex64>() / nf;
    let (mut ss_re, mut ss_im) = (0.0, 0.0);
    for v in values {
        let d = v - mean;
        ss_re += d.re * d.re;
        ss_im += d.im * d.im;
    }
    let se = |ss: f64| (ss / (nf - 1.0) / nf).sqrt();
    if !(mean.re.is_finite() && mean.im.is_finite()) {
        return Err(crate::Error::NaNEncountered { at: f64::NAN });
    }
    Ok(Estimate {
        mean,
        se_re: se(ss_re),
        se_im: se(ss_im),
        n,
    })
}

pub fn estimate_real(values: &[f64]) -> Result<Estimate> {
    let v: Vec<Complex64> = values.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    estimate(&v)
}

/// `(P[v > 0], P[v < 0])` with binomial standard errors.
pub fn sign_frequency(values: &[f64]) -> Result<(Estimate, Estimate)> {
    let pos: Vec<f64> = values.iter().map(|v| f64::from(*v > 0.0)).collect();
    let neg: Vec<f64> = values.iter().map(|v| f64::from(*v < 0.0)).collect();
    Ok((estimate_real(&pos)?, estimate_real(&neg)?))
}

/// `E[e^{iu·s}]` for each `u`.
pub fn empirical_char_fn(samples: &[f64], us: &[f64]) -> Result<Vec<Estimate>> {
    us.iter()
        .map(|&u| {
            let v: Vec<Complex64> = samples.iter().map(|s| Complex64::new(0.0, u * s).exp()).collect();
            estimate(&v)
        })
        .collect()
}

/// One histogram bin with a density estimate and its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub density: f64,
    pub se: f64,
}

/// Density histogram over `edges`, normalised by `n_total` (which may exceed
/// `samples.len()` when estimating a subdensity).
pub fn histogram(samples: &[f64], edges: &[f64], n_total: usize) -> Result<Vec<HistogramBin>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("histogram edges must be strictly increasing with at least two entries"));
    }
    if n_total == 0 || n_total < samples.len() {
        return Err(invalid("n_total must be at least the number of samples"));
    }
    let mut counts = vec![0usize; edges.len() - 1];
    for &s in samples {
        if s < edges[0] || s >= edges[edges.len() - 1] {
            continue;
        }
        let k = edges.partition_point(|e| *e <= s) - 1;
        counts[k] += 1;
    }
    let n = n_total as f64;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(k, &count)| {
            let width = edges[k + 1] - edges[k];
            let p = count as f64 / n;
            HistogramBin {
                lo: edges[k],
                hi: edges[k + 1],
                count,
                density: p / width,
                se: (p * (1.0 - p) / n).sqrt() / width,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_standard_error() {
        let e = estimate_real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(e.mean.re, 2.5);
        assert!((e.se_re - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(e.se_im, 0.0);
        assert!(e.within(Complex64::new(2.5, 0.0), 0.0));
        assert!(!e.within(Complex64::new(2.5, 1.0), 5.0));
    }

    #[test]
    fn too_few_samples() {
        assert!(estimate_real(&[1.0]).is_err());
    }

    #[test]
    fn signs() {
        let (p, m) = sign_frequency(&[1.0, -1.0, 2.0, 0.0]).unwrap();
        assert_eq!(p.mean.re, 0.5);
        assert_eq!(m.mean.re, 0.25);
    }

    #[test]
    fn histogram_counts_and_density() {
        let bins = histogram(&[0.1, 0.2, 0.6, 1.5, -1.0], &[0.0, 0.5, 1.0], 10).unwrap();
        assert_eq!(bins[0].count, 2);
        assert_eq!(bins[1].count, 1);
        assert!((bins[0].density - 0.4).abs() < 1e-15);
        assert!(histogram(&[0.0], &[1.0, 0.0], 1).is_err());
    }

    #[test]
    fn char_fn_of_point_mass() {
        let e = empirical_char_fn(&[0.5, 0.5], &[2.0]).unwrap();
        assert!((e[0].mean - Complex64::new(0.0, 1.0).exp()).norm() < 1e-15);
    }
}
