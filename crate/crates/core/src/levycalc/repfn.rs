//! Representing functions `ξ` with `ξ(0) = 0`.
//!
//! Each catalog entry evaluates on complex arguments (so that entries can be
//! chained after complex-valued ones) and supplies exact first and second
//! derivatives at the origin through a two-variable jet.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

const FD_STEP: f64 = 1e-5;

type GenericFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum RepresentingFunction {
    /// `id`
    Identity,
    /// `ζ·id`
    Affine(Complex64),
    /// `−a(e^{id} − 1)`
    ExpReturn(f64),
    /// `e^{ζ·id} − 1`
    Exponential(Complex64),
    /// `log(1 + id)` on the principal branch.
    PrincipalLog,
    /// `|1 + id|^α 1{id ≠ −1} − 1`
    ModulusPower(Complex64),
    /// `|1 + id|^α (1{id > −1} − 1{id < −1}) − 1`
    SignedPower(Complex64),
    /// `1{id = −1}`
    IndicatorMinusOne,
    /// `1/(1 + id) − 1`
    Reciprocal,
    Scale(Complex64, Box<RepresentingFunction>),
    /// `outer ∘ inner`
    Compose {
        outer: Box<RepresentingFunction>,
        inner: Box<RepresentingFunction>,
    },
    Sum(Box<RepresentingFunction>, Box<RepresentingFunction>),
    Product(Box<RepresentingFunction>, Box<RepresentingFunction>),
    /// `f + g + f·g`, the return of a product of stochastic exponentials.
    Yor(Box<RepresentingFunction>, Box<RepresentingFunction>),
    /// User-supplied function; derivatives at 0 by central differences and
    /// assumed holomorphic when chained after complex-valued entries.
    Generic {
        label: String,
        f: GenericFn,
        real_valued: bool,
    },
}

use RepresentingFunction as R;

/// First and second partial derivatives at the origin with respect to the
/// real (`r`) and imaginary (`i`) parts of the argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub r: Complex64,
    pub i: Complex64,
    pub rr: Complex64,
    pub ri: Complex64,
    pub ii: Complex64,
}

impl Jet {
    const ZERO: Jet = Jet {
        r: C0,
        i: C0,
        rr: C0,
        ri: C0,
        ii: C0,
    };

    fn holomorphic(d1: Complex64, d2: Complex64) -> Jet {
        Jet {
            r: d1,
            i: I * d1,
            rr: d2,
            ri: I * d2,
            ii: -d2,
        }
    }

    fn scale(self, c: Complex64) -> Jet {
        Jet {
            r: c * self.r,
            i: c * self.i,
            rr: c * self.rr,
            ri: c * self.ri,
            ii: c * self.ii,
        }
    }

    fn add(self, o: Jet) -> Jet {
        Jet {
            r: self.r + o.r,
            i: self.i + o.i,
            rr: self.rr + o.rr,
            ri: self.ri + o.ri,
            ii: self.ii + o.ii,
        }
    }

    /// Jet of `f·g` when `f(0) = g(0) = 0`.
    fn product(f: Jet, g: Jet) -> Jet {
        Jet {
            r: C0,
            i: C0,
            rr: f.r * g.r * 2.0,
            ri: f.r * g.i + f.i * g.r,
            ii: f.i * g.i * 2.0,
        }
    }

    /// Jet of `G∘F` where `F(0) = 0`; `G` is treated as a function of the real
    /// and imaginary parts `(u, v)` of `F`.
    fn compose(g: Jet, f: Jet) -> Jet {
        let (ur, vr) = (f.r.re, f.r.im);
        let (ui, vi) = (f.i.re, f.i.im);
        let (urr, vrr) = (f.rr.re, f.rr.im);
        let (uri, vri) = (f.ri.re, f.ri.im);
        let (uii, vii) = (f.ii.re, f.ii.im);
        let second = |up: f64, vp: f64, uq: f64, vq: f64, upq: f64, vpq: f64| {
            g.rr * (up * uq) + g.ri * (up * vq + vp * uq) + g.ii * (vp * vq) + g.r * upq + g.i * vpq
        };
        Jet {
            r: g.r * ur + g.i * vr,
            i: g.r * ui + g.i * vi,
            rr: second(ur, vr, ur, vr, urr, vrr),
            ri: second(ur, vr, ui, vi, uri, vri),
            ii: second(ui, vi, ui, vi, uii, vii),
        }
    }
}

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
const NAN: Complex64 = Complex64::new(f64::NAN, f64::NAN);

/// `e^z − 1` without cancellation for small `z`.
pub(crate) fn cexpm1(z: Complex64) -> Complex64 {
    if z.re.abs() < 0.5 && z.im.abs() < 0.5 {
        let em1 = z.re.exp_m1();
        let half = (0.5 * z.im).sin();
        Complex64::new(em1 * z.im.cos() - 2.0 * half * half, z.re.exp() * z.im.sin())
    } else {
        z.exp() - C1
    }
}

/// `log|1 + w|` without cancellation for small `w`.
fn log_modulus_1p(w: Complex64) -> f64 {
    let (p, q) = (w.re, w.im);
    if p.abs() < 0.5 && q.abs() < 0.5 {
        0.5 * (2.0 * p + p * p + q * q).ln_1p()
    } else {
        Complex64::new(1.0 + p, q).norm().ln()
    }
}

impl RepresentingFunction {
    pub fn exp_utility(lambda: f64) -> Self {
        R::Compose {
            outer: Box::new(R::Exponential(Complex64::new(-lambda, 0.0))),
            inner: Box::new(R::ExpReturn(-1.0)),
        }
    }

    /// `e^{iu·id} − 1`.
    pub fn char_exp(u: f64) -> Self {
        R::Exponential(Complex64::new(0.0, u))
    }

    pub fn esscher(theta: f64) -> Self {
        R::Exponential(Complex64::new(theta, 0.0))
    }

    /// `|1 + id| − 1`.
    pub fn modulus_minus_one() -> Self {
        R::ModulusPower(C1)
    }

    pub fn compose(outer: Self, inner: Self) -> Self {
        R::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn sum(f: Self, g: Self) -> Self {
        R::Sum(Box::new(f), Box::new(g))
    }

    pub fn product(f: Self, g: Self) -> Self {
        R::Product(Box::new(f), Box::new(g))
    }

    pub fn yor(f: Self, g: Self) -> Self {
        R::Yor(Box::new(f), Box::new(g))
    }

    pub fn scale(c: Complex64, f: Self) -> Self {
        R::Scale(c, Box::new(f))
    }

    pub fn generic<F>(label: impl Into<String>, real_valued: bool, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        R::Generic {
            label: label.into(),
            f: Arc::new(f),
            real_valued,
        }
    }

    /// Evaluates `ξ(w)`; NaN marks arguments outside the domain.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        if w.re.is_nan() || w.im.is_nan() {
            return NAN;
        }
        match self {
            R::Identity => w,
            R::Affine(z) => z * w,
            R::ExpReturn(a) => -cexpm1(w) * *a,
            R::Exponential(z) => cexpm1(z * w),
            R::PrincipalLog => {
                if w == -C1 {
                    NAN
                } else {
                    Complex64::new(log_modulus_1p(w), w.im.atan2(1.0 + w.re))
                }
            }
            R::ModulusPower(alpha) => {
                if w == -C1 {
                    -C1
                } else {
                    cexpm1(alpha * log_modulus_1p(w))
                }
            }
            R::SignedPower(alpha) => {
                let side = 1.0 + w.re;
                if w == -C1 {
                    -C1
                } else if side > 0.0 || (side == 0.0 && w.im != 0.0) {
                    cexpm1(alpha * log_modulus_1p(w))
                } else {
                    -(alpha * log_modulus_1p(w)).exp() - C1
                }
            }
            R::IndicatorMinusOne => {
                if w == -C1 {
                    C1
                } else {
                    C0
                }
            }
            R::Reciprocal => {
                if w == -C1 {
                    NAN
                } else {
                    -w / (C1 + w)
                }
            }
            R::Scale(c, f) => c * f.eval(w),
            R::Compose { outer, inner } => outer.eval(inner.eval(w)),
            R::Sum(f, g) => f.eval(w) + g.eval(w),
            R::Product(f, g) => f.eval(w) * g.eval(w),
            R::Yor(f, g) => {
                let (a, b) = (f.eval(w), g.eval(w));
                a + b + a * b
            }
            R::Generic { f, .. } => f(w),
        }
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }

    pub fn jet(&self) -> Jet {
        match self {
            R::Identity => Jet::holomorphic(C1, C0),
            R::Affine(z) => Jet::holomorphic(*z, C0),
            R::ExpReturn(a) => Jet::holomorphic(Complex64::from(-a), Complex64::from(-a)),
            R::Exponential(z) => Jet::holomorphic(*z, z * z),
            R::PrincipalLog => Jet::holomorphic(C1, -C1),
            R::Reciprocal => Jet::holomorphic(-C1, Complex64::from(2.0)),
            // Real-analytic but not holomorphic: |1+w|^α = 1 + αp + α(α−1)p²/2 + αq²/2 + …
            R::ModulusPower(alpha) | R::SignedPower(alpha) => Jet {
                r: *alpha,
                i: C0,
                rr: alpha * (alpha - 1.0),
                ri: C0,
                ii: *alpha,
            },
            R::IndicatorMinusOne => Jet::ZERO,
            R::Scale(c, f) => f.jet().scale(*c),
            R::Compose { outer, inner } => Jet::compose(outer.jet(), inner.jet()),
            R::Sum(f, g) => f.jet().add(g.jet()),
            R::Product(f, g) => Jet::product(f.jet(), g.jet()),
            R::Yor(f, g) => {
                let (a, b) = (f.jet(), g.jet());
                a.add(b).add(Jet::product(a, b))
            }
            R::Generic { f, .. } => {
                let h = FD_STEP;
                let plus = f(Complex64::from(h));
                let minus = f(Complex64::from(-h));
                let zero = f(C0);
                let d1 = (plus - minus) / (2.0 * h);
                let d2 = (plus - zero * 2.0 + minus) / (h * h);
                Jet::holomorphic(d1, d2)
            }
        }
    }

    /// `ξ′(0)` along the real axis.
    pub fn d0(&self) -> Complex64 {
        self.jet().r
    }

    /// `ξ″(0)` along the real axis.
    pub fn d20(&self) -> Complex64 {
        self.jet().rr
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, R::Identity)
    }

    pub fn is_real_on_reals(&self) -> bool {
        match self {
            R::Identity | R::ExpReturn(_) | R::IndicatorMinusOne | R::Reciprocal => true,
            R::PrincipalLog => false,
            R::Affine(z) | R::Exponential(z) | R::ModulusPower(z) | R::SignedPower(z) => z.im == 0.0,
            R::Scale(c, f) => c.im == 0.0 && f.is_real_on_reals(),
            R::Compose { outer, inner } => outer.is_real_on_reals() && inner.is_real_on_reals(),
            R::Sum(f, g) | R::Product(f, g) | R::Yor(f, g) => f.is_real_on_reals() && g.is_real_on_reals(),
            R::Generic { real_valued, .. } => *real_valued,
        }
    }

    /// Real points where `ξ` is not smooth (kinks, jumps or poles); used as
    /// quadrature split points.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match self {
            R::Identity | R::Affine(_) | R::ExpReturn(_) | R::Exponential(_) | R::Generic { .. } => Vec::new(),
            R::PrincipalLog | R::ModulusPower(_) | R::SignedPower(_) | R::IndicatorMinusOne | R::Reciprocal => {
                vec![-1.0]
            }
            R::Scale(_, f) => f.breakpoints(),
            R::Compose { outer, inner } => {
                let mut v = inner.breakpoints();
                for y in outer.breakpoints() {
                    v.extend(inner.preimage(y));
                }
                v
            }
            R::Sum(f, g) | R::Product(f, g) | R::Yor(f, g) => {
                let mut v = f.breakpoints();
                v.extend(g.breakpoints());
                v
            }
        };
        out.retain(|x| x.is_finite());
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// Real solutions of `ξ(x) = y` for entries that are invertible on the
    /// real line; empty when unknown.
    pub fn preimage(&self, y: f64) -> Vec<f64> {
        let real = |z: Complex64| (z.im == 0.0).then_some(z.re);
        match self {
            R::Identity => vec![y],
            R::Affine(z) => real(*z).filter(|z| *z != 0.0).map(|z| vec![y / z]).unwrap_or_default(),
            R::ExpReturn(a) => {
                let arg = 1.0 - y / a;
                if *a != 0.0 && arg > 0.0 {
                    vec![arg.ln()]
                } else {
                    Vec::new()
                }
            }
            R::Exponential(z) => match real(*z) {
                Some(z) if z != 0.0 && y > -1.0 => vec![y.ln_1p() / z],
                _ => Vec::new(),
            },
            R::PrincipalLog => vec![y.exp_m1()],
            R::Reciprocal => {
                if y == -1.0 {
                    Vec::new()
                } else {
                    vec![1.0 / (1.0 + y) - 1.0]
                }
            }
            R::ModulusPower(alpha) | R::SignedPower(alpha) => match real(*alpha) {
                Some(a) if a != 0.0 => {
                    let signed = matches!(self, R::SignedPower(_));
                    let target = 1.0 + y;
                    let mut v = Vec::new();
                    if target > 0.0 {
                        let m = target.powf(1.0 / a);
                        v.push(m - 1.0);
                        if !signed {
                            v.push(-m - 1.0);
                        }
                    } else if target < 0.0 && signed {
                        v.push(-(-target).powf(1.0 / a) - 1.0);
                    }
                    v
                }
                _ => Vec::new(),
            },
            R::Scale(c, f) => match real(*c) {
                Some(c) if c != 0.0 => f.preimage(y / c),
                _ => Vec::new(),
            },
            R::Compose { outer, inner } => outer
                .preimage(y)
                .into_iter()
                .flat_map(|m| inner.preimage(m))
                .collect(),
            R::IndicatorMinusOne | R::Sum(..) | R::Product(..) | R::Yor(..) | R::Generic { .. } => Vec::new(),
        }
    }

    /// Points `x₀` near which `|ξ(x)|` grows like `|x − x₀|^e` with `e < 0`.
    pub fn blowups(&self) -> Vec<(f64, f64)> {
        match self {
            R::Reciprocal => vec![(-1.0, -1.0)],
            R::ModulusPower(alpha) | R::SignedPower(alpha) if alpha.re < 0.0 => vec![(-1.0, alpha.re)],
            R::Scale(_, f) => f.blowups(),
            R::Compose { outer, inner } => {
                let mut v = inner.blowups();
                for (y, e) in outer.blowups() {
                    v.extend(inner.preimage(y).into_iter().map(|x| (x, e)));
                }
                v
            }
            R::Sum(f, g) | R::Yor(f, g) => {
                let mut v = f.blowups();
                v.extend(g.blowups());
                v
            }
            R::Product(f, g) => {
                let mut v = f.blowups();
                for (x, e) in g.blowups() {
                    match v.iter_mut().find(|(x0, _)| *x0 == x) {
                        Some(slot) => slot.1 += e,
                        None => v.push((x, e)),
                    }
                }
                v
            }
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for RepresentingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            R::Identity => write!(f, "id"),
            R::Affine(z) => write!(f, "affine({z})"),
            R::ExpReturn(a) => write!(f, "exp_return({a})"),
            R::Exponential(z) => write!(f, "exponential({z})"),
            R::PrincipalLog => write!(f, "log1p"),
            R::ModulusPower(a) => write!(f, "modulus_power({a})"),
            R::SignedPower(a) => write!(f, "signed_power({a})"),
            R::IndicatorMinusOne => write!(f, "indicator_minus_one"),
            R::Reciprocal => write!(f, "reciprocal"),
            R::Scale(c, g) => write!(f, "scale({c}, {g})"),
            R::Compose { outer, inner } => write!(f, "compose({outer}, {inner})"),
            R::Sum(a, b) => write!(f, "sum({a}, {b})"),
            R::Product(a, b) => write!(f, "product({a}, {b})"),
            R::Yor(a, b) => write!(f, "yor({a}, {b})"),
            R::Generic { label, .. } => write!(f, "generic({label})"),
        }
    }
}

impl fmt::Debug for RepresentingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
