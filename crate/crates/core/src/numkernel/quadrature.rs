//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex-valued
//! integrands on the real line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and split points for [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Points strictly inside the interval where the integrand may be
    /// singular or discontinuous. They are never evaluated.
    pub split_points: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            split_points: Vec::new(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_split_points(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.split_points.extend(points);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(invalid("quadrature tolerances must be strictly positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(invalid("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

/// Integral value together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Integrates `f` over `(a, b)`; either endpoint may be infinite.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    integrate_with_error(f, a, b, spec).map(|r| r.value)
}

pub fn integrate_with_error<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(invalid(format!("integration bounds must satisfy a < b, got ({a}, {b})")));
    }
    let mut breaks: Vec<f64> = spec
        .split_points
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > a && *p < b)
        .collect();
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    breaks.dedup();

    // Infinite pieces are mapped onto finite t-intervals.
    let mut pieces: Vec<Piece> = Vec::new();
    let mut knots = Vec::with_capacity(breaks.len() + 2);
    knots.push(a);
    knots.extend(breaks);
    knots.push(b);
    if !a.is_finite() && !b.is_finite() && knots.len() == 2 {
        knots.insert(1, 0.0);
    }
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => pieces.push(Piece::Finite(lo, hi)),
            (true, false) => pieces.push(Piece::Upper(lo)),
            (false, true) => pieces.push(Piece::Lower(hi)),
            (false, false) => unreachable!(),
        }
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for piece in &pieces {
        let (lo, hi) = piece.t_range();
        let seg = gk15(&|t| piece.eval(&f, t), lo, hi, *piece)?;
        evaluations += 15;
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }

    let mut subdivisions = 0;
    let mut frozen: Vec<Segment> = Vec::new();
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.norm());
        if total_err <= tol {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergent {
                estimate: total.norm(),
                error: total_err,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::NonConvergent {
                estimate: total.norm(),
                error: total_err,
            });
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        let scale = worst.lo.abs().max(worst.hi.abs()).max(f64::MIN_POSITIVE);
        if worst.hi - worst.lo <= 256.0 * f64::EPSILON * scale {
            // Interval at floating-point resolution: stop refining it.
            frozen.push(worst);
            continue;
        }
        let piece = worst.piece;
        let left = gk15(&|t| piece.eval(&f, t), worst.lo, mid, piece)?;
        let right = gk15(&|t| piece.eval(&f, t), mid, worst.hi, piece)?;
        evaluations += 30;
        subdivisions += 1;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to drop cancellation accumulated by the running updates.
    let value: Complex64 = heap.iter().chain(frozen.iter()).map(|s| s.value).sum();
    let error: f64 = heap.iter().chain(frozen.iter()).map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Finite(f64, f64),
    /// `[a, ∞)` via `x = a + t/(1-t)`.
    Upper(f64),
    /// `(-∞, b]` via `x = b - t/(1-t)`.
    Lower(f64),
}

impl Piece {
    fn t_range(&self) -> (f64, f64) {
        match *self {
            Piece::Finite(a, b) => (a, b),
            Piece::Upper(_) | Piece::Lower(_) => (0.0, 1.0),
        }
    }

    fn eval<F: Fn(f64) -> Complex64>(&self, f: &F, t: f64) -> (f64, Complex64) {
        match *self {
            Piece::Finite(..) => (t, f(t)),
            Piece::Upper(a) => {
                let s = 1.0 - t;
                let x = a + t / s;
                (x, f(x) / (s * s))
            }
            Piece::Lower(b) => {
                let s = 1.0 - t;
                let x = b - t / s;
                (x, f(x) / (s * s))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
    piece: Piece,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<G>(g: &G, lo: f64, hi: f64, piece: Piece) -> Result<Segment>
where
    G: Fn(f64) -> (f64, Complex64),
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    let eval = |t: f64| -> Result<Complex64> {
        let (x, v) = g(t);
        if v.re.is_nan() || v.im.is_nan() {
            return Err(Error::NaNEncountered { at: x });
        }
        Ok(v)
    };
    fv[7] = eval(center)?;
    for j in 0..7 {
        let dx = half * XGK[j];
        fv[j] = eval(center - dx)?;
        fv[14 - j] = eval(center + dx)?;
    }
    let mut kronrod = fv[7] * WGK[7];
    let mut gauss = fv[7] * WG[3];
    let mut resabs = fv[7].norm() * WGK[7];
    for j in 0..7 {
        let pair = fv[j] + fv[14 - j];
        kronrod += pair * WGK[j];
        resabs += (fv[j].norm() + fv[14 - j].norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fv[7] - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm());
    }
    let value = kronrod * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((kronrod - gauss) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    if !error.is_finite() || !value.re.is_finite() || !value.im.is_finite() {
        let (x, _) = g(center);
        return Err(Error::NaNEncountered { at: x });
    }
    Ok(Segment {
        lo,
        hi,
        value,
        error,
        piece,
    })
}
