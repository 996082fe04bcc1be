//! Periods of `φ·ω` over the compact 6-cycle `γ_λ = {k·M_λ(t)}` in the
//! complement of `f1·f2·f3 = 0`, where `ω = dX11 ∧ ... ∧ dX23`.
//!
//! The cycle is parametrized by `t_j = exp(iθ_j)` and
//! `k = (u, −v̄; v, ū) ∈ SU(2)` with `u = cos α·e^{iβ}`, `v = sin α·e^{iδ}`,
//! and
//!
//! ```text
//! M_λ(t) = ( −(1−λ)·t2   1   −λ·t1·t2/t3 )
//!          ( −t3         0    t1         )
//! ```
//!
//! On every `γ_λ` one has `f1 = t1`, `f2 = t1·t2`, `f3 = t3`. The pulled-back
//! form is `det(∂X/∂p)·dθ1 dθ2 dθ3 dα dβ dδ`; at `λ = 0` the determinant is
//! `−2i·sin α·cos α·t1²·t2·t3`, so the period of `ω/(f1·f2·f3)` is
//! `−i·(2π)^5` in these coordinates.

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumCast, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyring::{CoefficientDomain, SparsePolynomial};
use crate::weights::ExponentMatrix;

/// Scalars the verifier can run in.
pub trait Real: Float + FloatConst + Send + Sync + std::fmt::Debug + 'static {}

impl<T: Float + FloatConst + Send + Sync + std::fmt::Debug + 'static> Real for T {}

pub type Mat23<T> = [[Complex<T>; 3]; 2];
type Mat22<T> = [[Complex<T>; 2]; 2];

/// `|f_S|` below this at a node poisons the evaluation.
pub const POLE_THRESHOLD: f64 = 1e-9;

/// Relative tolerance for homotopy invariance and grid refinement.
pub const INVARIANCE_TOLERANCE: f64 = 1e-4;

/// `|I(φ)| / |I(1/(f1f2f3))|` below this classifies `φ` as vanishing.
pub const VANISHING_RATIO: f64 = 1e-3;

/// Default nodes per dimension for the product rule.
pub const DEFAULT_GRID: usize = 16;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed_2003;

/// `|∫_γ ω/(f1f2f3)|` in the coordinates above.
pub fn analytic_period_magnitude<T: Real>() -> T {
    let two_pi = T::PI() + T::PI();
    two_pi.powi(5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleParams<T> {
    pub theta: [T; 3],
    pub alpha: T,
    pub beta: T,
    pub delta: T,
    pub lambda: T,
}

impl<T: Real> CycleParams<T> {
    pub fn new(theta: [T; 3], alpha: T, beta: T, delta: T, lambda: T) -> Self {
        CycleParams { theta, alpha, beta, delta, lambda }
    }

    /// Parameters in the order `(θ1, θ2, θ3, α, β, δ)`.
    pub fn coords(&self) -> [T; 6] {
        [self.theta[0], self.theta[1], self.theta[2], self.alpha, self.beta, self.delta]
    }

    pub fn with_coords(&self, c: [T; 6]) -> Self {
        CycleParams { theta: [c[0], c[1], c[2]], alpha: c[3], beta: c[4], delta: c[5], lambda: self.lambda }
    }

    pub fn t(&self) -> [Complex<T>; 3] {
        self.theta.map(|th| Complex::from_polar(T::one(), th))
    }

    /// `(u, v)`, with `|u|² + |v|² = 1`.
    pub fn uv(&self) -> (Complex<T>, Complex<T>) {
        (
            Complex::from_polar(self.alpha.cos(), self.beta),
            Complex::from_polar(self.alpha.sin(), self.delta),
        )
    }
}

fn su2<T: Real>(u: Complex<T>, v: Complex<T>) -> Mat22<T> {
    [[u, -v.conj()], [v, u.conj()]]
}

fn mul22x23<T: Real>(k: &Mat22<T>, m: &Mat23<T>) -> Mat23<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| k[i][0] * m[0][j] + k[i][1] * m[1][j]))
}

fn flatten<T: Real>(m: &Mat23<T>) -> [Complex<T>; 6] {
    [m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2]]
}

/// `M_λ(t)` and its `θ`-derivatives.
fn torus_part<T: Real>(t: [Complex<T>; 3], lambda: T) -> (Mat23<T>, [Mat23<T>; 3]) {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let [t1, t2, t3] = t;
    let mu = Complex::new(T::one() - lambda, T::zero());
    let lam = Complex::new(lambda, T::zero());
    let corner = lam * t1 * t2 / t3;
    let m = [[-(mu * t2), one, -corner], [-t3, zero, t1]];
    let d1 = [[zero, zero, -(i * corner)], [zero, zero, i * t1]];
    let d2 = [[-(i * mu * t2), zero, -(i * corner)], [zero, zero, zero]];
    let d3 = [[zero, zero, i * corner], [-(i * t3), zero, zero]];
    (m, [d1, d2, d3])
}

/// `k` and its derivatives in `(α, β, δ)`.
fn group_part<T: Real>(p: &CycleParams<T>) -> (Mat22<T>, [Mat22<T>; 3]) {
    let (u, v) = p.uv();
    let i = Complex::new(T::zero(), T::one());
    let zero = Complex::new(T::zero(), T::zero());
    let u_alpha = Complex::from_polar(-p.alpha.sin(), p.beta);
    let v_alpha = Complex::from_polar(p.alpha.cos(), p.delta);
    let dk = |du: Complex<T>, dv: Complex<T>| su2(du, dv);
    (su2(u, v), [dk(u_alpha, v_alpha), dk(i * u, zero), dk(zero, i * v)])
}

/// The point `X = k·M_λ(t)` of the cycle.
pub fn cycle_point<T: Real>(p: &CycleParams<T>) -> Mat23<T> {
    let (m, _) = torus_part(p.t(), p.lambda);
    let (k, _) = group_part(p);
    mul22x23(&k, &m)
}

/// `(f1, f2, f3)` at a 2x3 complex matrix.
pub fn minors<T: Real>(x: &Mat23<T>) -> [Complex<T>; 3] {
    let det = |a: usize, b: usize| x[0][a] * x[1][b] - x[0][b] * x[1][a];
    [det(1, 2), det(2, 0), det(0, 1)]
}

/// Determinant of an `n x n` complex matrix by partial-pivot elimination.
pub fn complex_det<T: Real, const N: usize>(mut a: [[Complex<T>; N]; N]) -> Complex<T> {
    let mut det = Complex::new(T::one(), T::zero());
    for c in 0..N {
        let mut p = c;
        for r in c + 1..N {
            if a[r][c].norm_sqr() > a[p][c].norm_sqr() {
                p = r;
            }
        }
        if a[p][c].norm_sqr() == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let pivot = a[c][c];
        det = det * pivot;
        for r in c + 1..N {
            let f = a[r][c] / pivot;
            for k in c..N {
                let s = f * a[c][k];
                a[r][k] = a[r][k] - s;
            }
        }
    }
    det
}

fn jacobian_from_parts<T: Real>(k: &Mat22<T>, dk: &[Mat22<T>; 3], m: &Mat23<T>, dm: &[Mat23<T>; 3]) -> Complex<T> {
    let cols: [[Complex<T>; 6]; 6] = [
        flatten(&mul22x23(k, &dm[0])),
        flatten(&mul22x23(k, &dm[1])),
        flatten(&mul22x23(k, &dm[2])),
        flatten(&mul22x23(&dk[0], m)),
        flatten(&mul22x23(&dk[1], m)),
        flatten(&mul22x23(&dk[2], m)),
    ];
    // det(A) = det(Aᵀ): the columns go in as rows
    complex_det(cols)
}

/// `det(∂X_m/∂p_l)` with `X` in the order `X11..X23` and `p` in the order
/// `(θ1, θ2, θ3, α, β, δ)`, from closed-form derivatives.
pub fn pullback_jacobian<T: Real>(p: &CycleParams<T>) -> Complex<T> {
    let (m, dm) = torus_part(p.t(), p.lambda);
    let (k, dk) = group_part(p);
    jacobian_from_parts(&k, &dk, &m, &dm)
}

/// The integrand `φ`.
#[derive(Debug, Clone, PartialEq)]
pub enum IntegrandSelector {
    InvF123,
    InvF12,
    InvF13,
    InvF23,
    /// `X11·X23/(f2·f3)²`.
    PolyOverF23Sq,
    /// `numerator / (f1^e1·f2^e2·f3^e3)`.
    Custom { numerator: SparsePolynomial, denominator: [u32; 3] },
}

impl IntegrandSelector {
    pub const NAMED: [&'static str; 5] = ["inv_f123", "inv_f12", "inv_f13", "inv_f23", "poly_over_f23_sq"];

    pub fn name(&self) -> String {
        match self {
            IntegrandSelector::InvF123 => "inv_f123".into(),
            IntegrandSelector::InvF12 => "inv_f12".into(),
            IntegrandSelector::InvF13 => "inv_f13".into(),
            IntegrandSelector::InvF23 => "inv_f23".into(),
            IntegrandSelector::PolyOverF23Sq => "poly_over_f23_sq".into(),
            IntegrandSelector::Custom { numerator, denominator } => {
                let [a, b, c] = denominator;
                format!("custom:{numerator}:{a},{b},{c}")
            }
        }
    }

    /// Numerator and denominator exponents.
    pub fn parts(&self) -> (SparsePolynomial, [u32; 3]) {
        let one = SparsePolynomial::one(CoefficientDomain::Integer);
        match self {
            IntegrandSelector::InvF123 => (one, [1, 1, 1]),
            IntegrandSelector::InvF12 => (one, [1, 1, 0]),
            IntegrandSelector::InvF13 => (one, [1, 0, 1]),
            IntegrandSelector::InvF23 => (one, [0, 1, 1]),
            IntegrandSelector::PolyOverF23Sq => (
                SparsePolynomial::monomial(
                    ExponentMatrix::from_flat([1, 0, 0, 0, 0, 1]),
                    1.into(),
                    CoefficientDomain::Integer,
                ),
                [0, 2, 2],
            ),
            IntegrandSelector::Custom { numerator, denominator } => (numerator.clone(), *denominator),
        }
    }

    /// Parses a named selector, or `custom:<polynomial>:<e1>,<e2>,<e3>` where
    /// the polynomial is a sum of terms like `3*X11^2*X23` or `-X12`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "inv_f123" => Ok(IntegrandSelector::InvF123),
            "inv_f12" => Ok(IntegrandSelector::InvF12),
            "inv_f13" => Ok(IntegrandSelector::InvF13),
            "inv_f23" => Ok(IntegrandSelector::InvF23),
            "poly_over_f23_sq" => Ok(IntegrandSelector::PolyOverF23Sq),
            _ => {
                let rest = s
                    .strip_prefix("custom:")
                    .ok_or_else(|| Error::Parse(format!("unknown integrand {s:?}")))?;
                let (num, den) = rest
                    .rsplit_once(':')
                    .ok_or_else(|| Error::Parse(format!("custom integrand needs numerator:e1,e2,e3, got {s:?}")))?;
                let exps: Vec<u32> = den
                    .split(',')
                    .map(|e| e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent {e:?}"))))
                    .collect::<Result<_>>()?;
                let denominator: [u32; 3] =
                    exps.try_into().map_err(|_| Error::Parse("need three denominator exponents".into()))?;
                Ok(IntegrandSelector::Custom { numerator: parse_polynomial(num)?, denominator })
            }
        }
    }

    /// Name of the partial localization `φ` lives in, if any.
    pub fn localization(&self) -> Option<&'static str> {
        let (_, e) = self.parts();
        match (e[0] > 0, e[1] > 0, e[2] > 0) {
            (true, true, true) => None,
            (_, _, false) if e[0] > 0 || e[1] > 0 => Some("R[(f1f2)^-1]"),
            (_, false, _) => Some("R[(f1f3)^-1]"),
            _ => Some("R[(f2f3)^-1]"),
        }
    }
}

/// Parses `c*X11^a*X12 + ... - X23`.
pub fn parse_polynomial(s: &str) -> Result<SparsePolynomial> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms = Vec::new();
    let mut rest = cleaned.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let (term, tail) = body.split_at(end);
        rest = tail;
        let mut coeff = num_bigint::BigInt::from(sign);
        let mut mono = ExponentMatrix::ONE;
        for factor in term.split('*').filter(|f| !f.is_empty()) {
            if let Some(var) = factor.strip_prefix('X') {
                let (idx, exp) = var.split_once('^').unwrap_or((var, "1"));
                let b = idx.as_bytes();
                let ok = b.len() == 2 && (b'1'..=b'2').contains(&b[0]) && (b'1'..=b'3').contains(&b[1]);
                if !ok {
                    return Err(Error::Parse(format!("bad variable {factor:?}")));
                }
                let e: u32 = exp.parse().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?;
                mono.0[(b[0] - b'1') as usize][(b[1] - b'1') as usize] += e;
            } else {
                let c: num_bigint::BigInt =
                    factor.parse().map_err(|_| Error::Parse(format!("bad factor {factor:?}")))?;
                coeff *= c;
            }
        }
        terms.push((mono, coeff));
    }
    Ok(SparsePolynomial::from_terms(terms, CoefficientDomain::Integer))
}

/// `φ` prepared for fast evaluation in `T`.
#[derive(Debug, Clone)]
pub struct CompiledIntegrand<T> {
    terms: Vec<([[u32; 3]; 2], T)>,
    denominator: [u32; 3],
}

impl<T: Real> CompiledIntegrand<T> {
    pub fn new(phi: &IntegrandSelector) -> Self {
        let (num, denominator) = phi.parts();
        let terms = num
            .terms()
            .map(|(a, c)| (a.0, <T as NumCast>::from(c.to_f64().unwrap_or(f64::NAN)).unwrap()))
            .collect();
        CompiledIntegrand { terms, denominator }
    }

    /// `φ(X)` given the minors at `X`; `Err` carries the smallest offending `|f_i|`.
    pub fn eval(&self, x: &Mat23<T>, f: &[Complex<T>; 3]) -> std::result::Result<Complex<T>, T> {
        let threshold = <T as NumCast>::from(POLE_THRESHOLD).unwrap();
        let mut den = Complex::new(T::one(), T::zero());
        for (fi, &e) in f.iter().zip(&self.denominator) {
            if e > 0 {
                if fi.norm() < threshold {
                    return Err(fi.norm());
                }
                den = den * fi.powu(e);
            }
        }
        let mut num = Complex::new(T::zero(), T::zero());
        for (a, c) in &self.terms {
            let mut m = Complex::new(*c, T::zero());
            for i in 0..2 {
                for j in 0..3 {
                    if a[i][j] > 0 {
                        m = m * x[i][j].powu(a[i][j]);
                    }
                }
            }
            num = num + m;
        }
        Ok(num / den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quad,
    Mc,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad" => Ok(Method::Quad),
            "mc" => Ok(Method::Mc),
            _ => Err(Error::Parse(format!("unknown method {s:?} (quad|mc)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub method: Method,
    /// Nodes per dimension for the product rule.
    pub nodes: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { method: Method::Quad, nodes: DEFAULT_GRID, samples: DEFAULT_MC_SAMPLES, seed: DEFAULT_SEED }
    }
}

impl GridSpec {
    pub fn quad(nodes: usize) -> Self {
        GridSpec { method: Method::Quad, nodes, ..Default::default() }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        GridSpec { method: Method::Mc, samples, seed, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral<T> {
    pub value: Complex<T>,
    /// `|I_N − I_{N/2}|` for the product rule, the standard error for Monte Carlo.
    pub error_estimate: T,
    pub evaluations: u64,
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre<T: Real>(n: usize, a: T, b: T) -> Vec<(T, T)> {
    let c = |x: f64| <T as NumCast>::from(x).unwrap();
    let half = (b - a) / c(2.0);
    let mid = (a + b) / c(2.0);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (T::PI() * c(i as f64 + 0.75) / c(n as f64 + 0.5)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            // P_n and P_n' by the three-term recurrence
            let (mut p0, mut p1) = (T::one(), x);
            for k in 2..=n {
                let kf = c(k as f64);
                let p2 = ((c(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { T::one() } else { p1 };
            let pn1 = if n == 0 { T::zero() } else { p0 };
            dp = c(n as f64) * (x * pn - pn1) / (x * x - T::one());
            let dx = pn / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * c(4.0) {
                break;
            }
        }
        let w = c(2.0) / ((T::one() - x * x) * dp * dp);
        out.push((mid - half * x, half * w));
    }
    out
}

fn trapezoid_periodic<T: Real>(n: usize) -> Vec<(T, T)> {
    let two_pi = T::PI() + T::PI();
    let nf = <T as NumCast>::from(n).unwrap();
    (0..n).map(|k| (two_pi * <T as NumCast>::from(k).unwrap() / nf, two_pi / nf)).collect()
}

struct GroupNode<T> {
    weight: T,
    k: Mat22<T>,
    dk: [Mat22<T>; 3],
}

struct TorusNode<T> {
    weight: T,
    theta: [T; 3],
    m: Mat23<T>,
    dm: [Mat23<T>; 3],
}

/// A partial sum, or the smallest `|f_i|` and the torus node where it occurred.
type NodeSum<T> = std::result::Result<Complex<T>, (T, [T; 3])>;

fn product_rule<T: Real>(phi: &CompiledIntegrand<T>, lambda: T, nodes: usize) -> Result<Complex<T>> {
    let periodic = trapezoid_periodic::<T>(nodes);
    let alphas = gauss_legendre::<T>(nodes, T::zero(), T::FRAC_PI_2());
    let mut group = Vec::with_capacity(nodes.pow(3));
    for &(alpha, wa) in &alphas {
        for &(beta, wb) in &periodic {
            for &(delta, wd) in &periodic {
                let p = CycleParams::new([T::zero(); 3], alpha, beta, delta, lambda);
                let (k, dk) = group_part(&p);
                group.push(GroupNode { weight: wa * wb * wd, k, dk });
            }
        }
    }
    let mut torus = Vec::with_capacity(nodes.pow(3));
    for &(t1, w1) in &periodic {
        for &(t2, w2) in &periodic {
            for &(t3, w3) in &periodic {
                let p = CycleParams::new([t1, t2, t3], T::zero(), T::zero(), T::zero(), lambda);
                let (m, dm) = torus_part(p.t(), lambda);
                torus.push(TorusNode { weight: w1 * w2 * w3, theta: [t1, t2, t3], m, dm });
            }
        }
    }
    // partial sums per group node, reduced in a fixed order
    let partial: Vec<NodeSum<T>> = group
        .par_iter()
        .map(|g| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for tn in &torus {
                let x = mul22x23(&g.k, &tn.m);
                let f = minors(&x);
                let val = phi.eval(&x, &f).map_err(|v| (v, tn.theta))?;
                let jac = jacobian_from_parts(&g.k, &g.dk, &tn.m, &tn.dm);
                acc = acc + val * jac * tn.weight;
            }
            Ok(acc * g.weight)
        })
        .collect();
    let mut total = Complex::new(T::zero(), T::zero());
    for p in partial {
        match p {
            Ok(v) => total = total + v,
            Err((v, th)) => {
                return Err(Error::PoisonedEvaluation {
                    value: v.to_f64().unwrap_or(0.0),
                    node: format!("theta={:?}", th.map(|x| x.to_f64().unwrap_or(f64::NAN))),
                })
            }
        }
    }
    Ok(total)
}

const MC_CHUNK: usize = 1 << 14;

fn monte_carlo<T: Real>(phi: &CompiledIntegrand<T>, lambda: T, samples: usize, seed: u64) -> Result<(Complex<T>, T)> {
    let two_pi = std::f64::consts::TAU;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let volume = two_pi.powi(5) * half_pi;
    let chunks = samples.div_ceil(MC_CHUNK);
    let cast = |x: f64| <T as NumCast>::from(x).unwrap();
    // each chunk draws from its own stream, so the result does not depend on scheduling
    let sums: Vec<Result<(Complex<f64>, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut s = Complex::new(0.0, 0.0);
            let mut s2 = 0.0;
            for _ in 0..count {
                let th = [rng.gen::<f64>() * two_pi, rng.gen::<f64>() * two_pi, rng.gen::<f64>() * two_pi];
                let (a, b, d) = (rng.gen::<f64>() * half_pi, rng.gen::<f64>() * two_pi, rng.gen::<f64>() * two_pi);
                let p = CycleParams::new(th.map(cast), cast(a), cast(b), cast(d), lambda);
                let x = cycle_point(&p);
                let val = phi.eval(&x, &minors(&x)).map_err(|v| Error::PoisonedEvaluation {
                    value: v.to_f64().unwrap_or(0.0),
                    node: format!("theta={th:?} alpha={a} beta={b} delta={d}"),
                })?;
                let y = val * pullback_jacobian(&p);
                let y = Complex::new(y.re.to_f64().unwrap(), y.im.to_f64().unwrap());
                s += y;
                s2 += y.norm_sqr();
            }
            Ok((s, s2))
        })
        .collect();
    let mut s = Complex::new(0.0, 0.0);
    let mut s2 = 0.0;
    for r in sums {
        let (a, b) = r?;
        s += a;
        s2 += b;
    }
    let n = samples as f64;
    let mean = s / n;
    let var = (s2 / n - mean.norm_sqr()).max(0.0);
    let value = mean * volume;
    let err = volume * (var / n).sqrt();
    Ok((Complex::new(cast(value.re), cast(value.im)), cast(err)))
}

/// `∫_{γ_λ} φ·ω`.
pub fn integrate<T: Real>(phi: &IntegrandSelector, lambda: T, grid: &GridSpec) -> Result<Integral<T>> {
    let compiled = CompiledIntegrand::<T>::new(phi);
    match grid.method {
        Method::Quad => {
            if grid.nodes == 0 {
                return Err(Error::InvalidRange("grid needs at least one node".into()));
            }
            let fine = product_rule(&compiled, lambda, grid.nodes)?;
            let coarse_nodes = (grid.nodes / 2).max(1);
            let coarse = product_rule(&compiled, lambda, coarse_nodes)?;
            Ok(Integral {
                value: fine,
                error_estimate: (fine - coarse).norm(),
                evaluations: (grid.nodes.pow(6) + coarse_nodes.pow(6)) as u64,
            })
        }
        Method::Mc => {
            if grid.samples == 0 {
                return Err(Error::InvalidRange("Monte Carlo needs at least one sample".into()));
            }
            let (value, err) = monte_carlo(&compiled, lambda, grid.samples, grid.seed)?;
            Ok(Integral { value, error_estimate: err, evaluations: grid.samples as u64 })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyPoint<T> {
    pub lambda: T,
    pub integral: Integral<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyReport<T> {
    pub integrand: String,
    pub points: Vec<HomotopyPoint<T>>,
    pub max_abs_deviation: T,
    /// Deviation relative to `max |I|`, or to the period of `1/(f1f2f3)`
    /// when every value is classified as vanishing.
    pub max_rel_deviation: T,
    pub tolerance: T,
    pub passes: bool,
}

/// Integrates `φ` over `γ_λ` for each `λ` and compares against the first value.
pub fn homotopy_invariance_check<T: Real>(
    phi: &IntegrandSelector,
    lambdas: &[T],
    grid: &GridSpec,
    tolerance: T,
) -> Result<HomotopyReport<T>> {
    let points = lambdas
        .iter()
        .map(|&lambda| Ok(HomotopyPoint { lambda, integral: integrate(phi, lambda, grid)? }))
        .collect::<Result<Vec<_>>>()?;
    let base = points.first().map(|p| p.integral.value);
    let max_abs_deviation = points
        .iter()
        .map(|p| (p.integral.value - base.unwrap()).norm())
        .fold(T::zero(), T::max);
    let max_mag = points.iter().map(|p| p.integral.value.norm()).fold(T::zero(), T::max);
    let period = analytic_period_magnitude::<T>();
    let scale = if max_mag >= <T as NumCast>::from(VANISHING_RATIO).unwrap() * period { max_mag } else { period };
    let max_rel_deviation = if points.is_empty() { T::zero() } else { max_abs_deviation / scale };
    Ok(HomotopyReport {
        integrand: phi.name(),
        passes: max_rel_deviation <= tolerance,
        points,
        max_abs_deviation,
        max_rel_deviation,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_params(rng: &mut ChaCha8Rng, lambda: f64) -> CycleParams<f64> {
        let tau = std::f64::consts::TAU;
        CycleParams::new(
            [rng.gen::<f64>() * tau, rng.gen::<f64>() * tau, rng.gen::<f64>() * tau],
            rng.gen::<f64>() * std::f64::consts::FRAC_PI_2,
            rng.gen::<f64>() * tau,
            rng.gen::<f64>() * tau,
            lambda,
        )
    }

    #[test]
    fn base_point() {
        let p = CycleParams::new([0.0; 3], 0.0, 0.0, 0.7, 0.0);
        let x = cycle_point(&p);
        let expect = [[-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]];
        for i in 0..2 {
            for j in 0..3 {
                assert!((x[i][j] - Complex::new(expect[i][j], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn minors_on_cycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let lambda: f64 = rng.gen();
            let p = random_params(&mut rng, lambda);
            let t = p.t();
            let expect = [t[0], t[0] * t[1], t[2]];
            let f = minors(&cycle_point(&p));
            let f0 = minors(&cycle_point(&CycleParams { lambda: 0.0, ..p }));
            for i in 0..3 {
                assert!((f[i] - expect[i]).norm() < 1e-10);
                assert!((f[i] - f0[i]).norm() < 1e-10);
            }
            let (u, v) = p.uv();
            assert!((u.norm_sqr() + v.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    // det of central finite differences of cycle_point
    fn fd_jacobian(p: &CycleParams<f64>, h: f64) -> Complex<f64> {
        let c = p.coords();
        let cols: [[Complex<f64>; 6]; 6] = std::array::from_fn(|l| {
            let mut plus = c;
            let mut minus = c;
            plus[l] += h;
            minus[l] -= h;
            let xp = flatten(&cycle_point(&p.with_coords(plus)));
            let xm = flatten(&cycle_point(&p.with_coords(minus)));
            std::array::from_fn(|m| (xp[m] - xm[m]) / (2.0 * h))
        });
        complex_det(cols)
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..100 {
            let p = random_params(&mut rng, (i % 5) as f64 / 4.0);
            let a = pullback_jacobian(&p);
            let b = fd_jacobian(&p, 1e-5);
            assert!((a - b).norm() <= 1e-6 * a.norm().max(1e-12), "{a} vs {b} at {p:?}");
        }
    }

    #[test]
    fn jacobian_closed_form_at_lambda_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = random_params(&mut rng, 0.0);
            let t = p.t();
            let s = p.alpha.sin() * p.alpha.cos();
            let expect = Complex::new(0.0, -2.0 * s) * t[0] * t[0] * t[1] * t[2];
            assert!((pullback_jacobian(&p) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn jacobian_at_pole_of_coordinates() {
        let p = CycleParams::new([0.3, 1.1, 2.0], 0.0, 0.4, 0.9, 0.0);
        let a = pullback_jacobian(&p);
        assert!(a.re.is_finite() && a.im.is_finite());
        assert!((a - fd_jacobian(&p, 1e-5)).norm() < 1e-8);
    }

    #[test]
    fn jacobian_continuous_in_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_params(&mut rng, 0.0);
        let mut prev = pullback_jacobian(&p);
        for k in 1..=100 {
            let cur = pullback_jacobian(&CycleParams { lambda: k as f64 / 100.0, ..p });
            assert!((cur - prev).norm() < 0.2);
            prev = cur;
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        let rule = gauss_legendre::<f64>(8, 0.0, 1.0);
        let w: f64 = rule.iter().map(|r| r.1).sum();
        assert!((w - 1.0).abs() < 1e-14);
        let x15: f64 = rule.iter().map(|(x, w)| w * x.powi(15)).sum();
        assert!((x15 - 1.0 / 16.0).abs() < 1e-14);
        let s: f64 = gauss_legendre::<f64>(16, 0.0, std::f64::consts::FRAC_PI_2)
            .iter()
            .map(|(x, w)| w * x.sin() * x.cos())
            .sum();
        assert!((s - 0.5).abs() < 1e-14);
        let r32 = gauss_legendre::<f32>(6, -1.0, 1.0);
        assert!((r32.iter().map(|r| r.1).sum::<f32>() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn period_of_inverse_product() {
        let i = integrate::<f64>(&IntegrandSelector::InvF123, 0.0, &GridSpec::quad(6)).unwrap();
        let expect = Complex::new(0.0, -analytic_period_magnitude::<f64>());
        assert!((i.value - expect).norm() < 1e-8 * expect.norm(), "{:?}", i);
        assert!(i.error_estimate < 1e-3 * expect.norm());
        let i32 = integrate::<f32>(&IntegrandSelector::InvF123, 0.0, &GridSpec::quad(4)).unwrap();
        assert!((i32.value.norm() / analytic_period_magnitude::<f32>() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn partial_localizations_vanish() {
        let big = analytic_period_magnitude::<f64>();
        for phi in [
            IntegrandSelector::InvF12,
            IntegrandSelector::InvF13,
            IntegrandSelector::InvF23,
            IntegrandSelector::PolyOverF23Sq,
        ] {
            for lambda in [0.0, 1.0] {
                let i = integrate::<f64>(&phi, lambda, &GridSpec::quad(6)).unwrap();
                assert!(i.value.norm() <= VANISHING_RATIO * big, "{phi:?} at {lambda}: {:?}", i.value);
            }
        }
    }

    #[test]
    fn linear_in_integrand() {
        // a/(f1f2f3) + b·X11X23/(f2f3)² = (a·f2f3 + b·X11X23·f1)/(f1·f2²·f3²)
        let [f1, f2, f3] = crate::polyring::generators(CoefficientDomain::Integer);
        let x11x23 = parse_polynomial("X11*X23").unwrap();
        let (a, b) = (3, -2);
        let num = f2
            .multiply(&f3)
            .unwrap()
            .scale(&a.into())
            .add(&x11x23.multiply(&f1).unwrap().scale(&b.into()))
            .unwrap();
        let combo = IntegrandSelector::Custom { numerator: num, denominator: [1, 2, 2] };
        let g = GridSpec::quad(6);
        for lambda in [0.0, 0.5] {
            let lhs = integrate::<f64>(&combo, lambda, &g).unwrap().value;
            let rhs = integrate::<f64>(&IntegrandSelector::InvF123, lambda, &g).unwrap().value * a as f64
                + integrate::<f64>(&IntegrandSelector::PolyOverF23Sq, lambda, &g).unwrap().value * b as f64;
            assert!((lhs - rhs).norm() < 1e-9 * analytic_period_magnitude::<f64>());
        }
    }

    #[test]
    fn homotopy_invariance_small_grid() {
        let lambdas = [0.0, 0.25, 0.5, 0.75, 1.0];
        let r = homotopy_invariance_check(&IntegrandSelector::InvF123, &lambdas, &GridSpec::quad(6), 1e-4).unwrap();
        assert!(r.passes, "{r:?}");
        let r = homotopy_invariance_check(&IntegrandSelector::InvF23, &lambdas, &GridSpec::quad(6), 1e-4).unwrap();
        assert!(r.passes, "{r:?}");
        let r = homotopy_invariance_check(&IntegrandSelector::InvF23, &[0.3], &GridSpec::quad(4), 1e-4).unwrap();
        assert!(r.passes);
        assert_eq!(r.max_abs_deviation, 0.0);
    }

    #[test]
    fn pole_on_cycle_is_reported() {
        // f1 - 1 vanishes at t1 = 1, which is a trapezoid node
        let num = parse_polynomial("1").unwrap();
        let phi = IntegrandSelector::Custom { numerator: num, denominator: [0, 0, 0] };
        assert!(integrate::<f64>(&phi, 0.0, &GridSpec::quad(2)).is_ok());
        let mut f = CompiledIntegrand::<f64>::new(&IntegrandSelector::InvF123);
        f.denominator = [1, 0, 0];
        let x = [[Complex::new(0.0, 0.0); 3]; 2];
        assert!(f.eval(&x, &minors(&x)).is_err());
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let g = GridSpec::monte_carlo(20_000, 7);
        let a = integrate::<f64>(&IntegrandSelector::InvF123, 0.0, &g).unwrap();
        let b = integrate::<f64>(&IntegrandSelector::InvF123, 0.0, &g).unwrap();
        assert_eq!(a, b);
        let exact = analytic_period_magnitude::<f64>();
        assert!((a.value.norm() - exact).abs() < 5.0 * a.error_estimate + 0.05 * exact);
    }

    #[test]
    fn selector_parsing() {
        for name in IntegrandSelector::NAMED {
            assert_eq!(IntegrandSelector::parse(name).unwrap().name(), name);
        }
        let c = IntegrandSelector::parse("custom:2*X11^2*X23 - X12:0,1,1").unwrap();
        let (num, den) = c.parts();
        assert_eq!(den, [0, 1, 1]);
        assert_eq!(num.len(), 2);
        assert_eq!(c.localization(), Some("R[(f2f3)^-1]"));
        assert_eq!(IntegrandSelector::InvF12.localization(), Some("R[(f1f2)^-1]"));
        assert_eq!(IntegrandSelector::InvF13.localization(), Some("R[(f1f3)^-1]"));
        assert_eq!(IntegrandSelector::InvF123.localization(), None);
        assert!(IntegrandSelector::parse("inv_f99").is_err());
        assert!(IntegrandSelector::parse("custom:X31:1,1,1").is_err());
    }
}
