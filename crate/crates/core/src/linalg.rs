//! Exact dense linear algebra over ℤ, ℚ and 𝔽_p.
//!
//! Matrices always hold integer representatives. Over 𝔽_p the entries are
//! kept reduced to `0..p`; over ℚ only integral matrices ever arise, so
//! ranks are computed by fraction-free (Bareiss) elimination and rational
//! arithmetic is confined to back-substitution in [`solve_over_field`] and
//! [`nullspace_over_field`].

use std::fmt::{self, Debug, Write as _};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::polyring::CoefficientDomain;

#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
    domain: CoefficientDomain,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize, domain: CoefficientDomain) -> Self {
        ExactMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols], domain }
    }

    pub fn identity(n: usize, domain: CoefficientDomain) -> Self {
        let mut m = Self::zeros(n, n, domain);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds from integer rows, reducing into `domain`.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>], domain: CoefficientDomain) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(nrows, ncols, domain);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), ncols, "ragged rows");
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone().into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> CoefficientDomain {
        self.domain
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = self.domain.normalize(x);
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.domain);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    /// Same integer entries read in another domain (reduced mod p if needed).
    pub fn reduce(&self, domain: CoefficientDomain) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| domain.normalize(x.clone())).collect(),
            domain,
        }
    }

    pub fn matmul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let domain = self.domain.common(other.domain)?;
        let mut out = Self::zeros(self.rows, other.cols, domain);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        for x in &mut out.data {
            *x = domain.normalize(std::mem::take(x));
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("{}x{} times vector of length {}", self.rows, self.cols, v.len())));
        }
        Ok((0..self.rows)
            .map(|i| {
                let s: BigInt = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
                self.domain.normalize(s)
            })
            .collect())
    }

    /// Copies `block` into position `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &ExactMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> ExactMatrix {
        let mut b = Self::zeros(rows, cols, self.domain);
        for i in 0..rows {
            for j in 0..cols {
                b.data[i * cols + j] = self.get(r0 + i, c0 + j).clone();
            }
        }
        b
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!("hconcat of {} and {} rows", self.rows, other.rows)));
        }
        let domain = self.domain.common(other.domain)?;
        let mut out = Self::zeros(self.rows, self.cols + other.cols, domain);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        Ok(out)
    }

    pub fn column_vector(v: &[BigInt], domain: CoefficientDomain) -> ExactMatrix {
        let mut m = Self::zeros(v.len(), 1, domain);
        for (i, x) in v.iter().enumerate() {
            m.set(i, 0, x.clone());
        }
        m
    }

    /// Triple-list dump: a header line then one `row col value` line per nonzero entry.
    pub fn to_triples(&self, header: &str) -> String {
        let mut s = String::new();
        writeln!(s, "{header}").unwrap();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                if !x.is_zero() {
                    writeln!(s, "{i} {j} {x}").unwrap();
                }
            }
        }
        s
    }

    /// Determinant over ℤ (Bareiss). Panics on non-square input.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let mut a = self.to_rows();
        let n = self.rows;
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        if n == 0 {
            BigInt::one()
        } else {
            sign * &a[n - 1][n - 1]
        }
    }
}

impl Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} over {}", self.rows, self.cols, self.domain)?;
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        Ok(())
    }
}

/// Exact field arithmetic, carried by a context value so the modulus of
/// 𝔽_p can be chosen at run time.
pub trait Field {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_integer(&self, x: &BigInt) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse of a nonzero element.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Canonical rational representative (𝔽_p elements map to `0..p`).
    fn to_rational(&self, a: &Self::Elem) -> BigRational;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_integer(&self, x: &BigInt) -> BigRational {
        BigRational::from_integer(x.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn to_rational(&self, a: &BigRational) -> BigRational {
        a.clone()
    }
}

/// 𝔽_p with `p < 2^32`, elements stored as `u64` in `0..p`.
#[derive(Debug, Clone, Copy)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !crate::polyring::is_prime(p) || p >= 1 << 32 {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_integer(&self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        // Fermat
        let (mut base, mut e, mut acc) = (*a % self.p, self.p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }
    fn to_rational(&self, a: &u64) -> BigRational {
        BigRational::from_integer(BigInt::from(*a))
    }
}

fn lift<F: Field>(field: &F, m: &ExactMatrix) -> Vec<Vec<F::Elem>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| field.from_integer(x)).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(field: &F, a: &mut [Vec<F::Elem>]) -> Vec<usize> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !field.is_zero(&a[i][c])) else {
            continue;
        };
        a.swap(r, p);
        let inv = field.inv(&a[r][c]);
        for x in a[r].iter_mut().skip(c) {
            *x = field.mul(x, &inv);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || field.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for j in c..ncols {
                if !field.is_zero(&pivot_row[j]) {
                    row[j] = field.sub(&row[j], &field.mul(&factor, &pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_generic<F: Field>(field: &F, m: &ExactMatrix) -> usize {
    let mut a = lift(field, m);
    rref(field, &mut a).len()
}

/// Rank of an integer matrix over ℚ by fraction-free elimination.
pub fn bareiss_rank(m: &ExactMatrix) -> usize {
    let mut a = m.to_rows();
    let (nrows, ncols) = (m.rows(), m.cols());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = &a[i][j] * &a[r][c] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

pub fn rank_over_field(m: &ExactMatrix, domain: CoefficientDomain) -> Result<usize> {
    match domain {
        CoefficientDomain::Integer => Err(Error::NotAField(domain.to_string())),
        CoefficientDomain::Rational => Ok(bareiss_rank(m)),
        CoefficientDomain::PrimeField(p) => Ok(rank_generic(&PrimeField::new(p)?, &m.reduce(domain))),
    }
}

fn solve_generic<F: Field>(field: &F, m: &ExactMatrix, v: &[BigInt]) -> Option<Vec<F::Elem>> {
    let mut aug = lift(field, m);
    for (row, x) in aug.iter_mut().zip(v) {
        row.push(field.from_integer(x));
    }
    let n = m.cols();
    let pivots = rref(field, &mut aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![field.zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

/// A solution of `m·x = v` over a field, or `None` when `v` is outside the
/// column space. Entries are returned as rationals; over 𝔽_p they are the
/// canonical representatives in `0..p`.
pub fn solve_over_field(
    m: &ExactMatrix,
    v: &[BigInt],
    domain: CoefficientDomain,
) -> Result<Option<Vec<BigRational>>> {
    if v.len() != m.rows() {
        return Err(Error::Dimension(format!("matrix has {} rows, vector has length {}", m.rows(), v.len())));
    }
    match domain {
        CoefficientDomain::Integer => Err(Error::NotAField(domain.to_string())),
        CoefficientDomain::Rational => {
            let f = Rationals;
            Ok(solve_generic(&f, m, v).map(|x| x.iter().map(|e| f.to_rational(e)).collect()))
        }
        CoefficientDomain::PrimeField(p) => {
            let f = PrimeField::new(p)?;
            Ok(solve_generic(&f, &m.reduce(domain), v).map(|x| x.iter().map(|e| f.to_rational(e)).collect()))
        }
    }
}

/// Basis of the right kernel of `m`, as columns scaled to integer vectors
/// (over 𝔽_p: canonical representatives).
pub fn nullspace_over_field(m: &ExactMatrix, domain: CoefficientDomain) -> Result<Vec<Vec<BigInt>>> {
    fn kernel<F: Field>(field: &F, m: &ExactMatrix) -> Vec<Vec<BigRational>> {
        let n = m.cols();
        let mut a = lift(field, m);
        let pivots = rref(field, &mut a);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![field.zero(); n];
                v[fc] = field.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = field.sub(&field.zero(), &a[r][fc]);
                }
                v.iter().map(|e| field.to_rational(e)).collect()
            })
            .collect()
    }
    let vecs = match domain {
        CoefficientDomain::Integer => return Err(Error::NotAField(domain.to_string())),
        CoefficientDomain::Rational => kernel(&Rationals, m),
        CoefficientDomain::PrimeField(p) => kernel(&PrimeField::new(p)?, &m.reduce(domain)),
    };
    Ok(vecs.into_iter().map(|v| clear_denominators(&v)).collect())
}

fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    /// Nonzero diagonal entries `d1 | d2 | ... | dr`, all positive.
    pub invariant_factors: Vec<BigInt>,
    /// Unimodular row transform.
    pub u: ExactMatrix,
    /// Unimodular column transform.
    pub v: ExactMatrix,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn diagonal(&self) -> ExactMatrix {
        let mut d = ExactMatrix::zeros(self.u.rows(), self.v.cols(), CoefficientDomain::Integer);
        for (i, x) in self.invariant_factors.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }
}

struct SnfState {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
}

impl SnfState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.a.iter_mut().chain(self.v.iter_mut()) {
            r.swap(i, j);
        }
    }

    // row_dst -= q * row_src
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let (s, d) = if src < dst {
                let (lo, hi) = m.split_at_mut(dst);
                (&lo[src], &mut hi[0])
            } else {
                let (lo, hi) = m.split_at_mut(src);
                (&hi[0], &mut lo[dst])
            };
            for (x, y) in d.iter_mut().zip(s) {
                if !y.is_zero() {
                    *x -= q * y;
                }
            }
        }
    }

    // col_dst -= q * col_src
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for r in self.a.iter_mut().chain(self.v.iter_mut()) {
            if !r[src].is_zero() {
                let t = q * &r[src];
                r[dst] -= t;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -std::mem::take(x);
        }
    }
}

/// Smith normal form `U·M·V = diag(d1, ..., dr, 0, ...)` over ℤ.
///
/// Classical elimination: the smallest-magnitude nonzero entry of the
/// trailing block is moved to the pivot, its row and column are cleared by
/// Euclidean steps, and an offending row is folded in whenever the pivot
/// does not divide the remaining block.
pub fn smith_normal_form(m: &ExactMatrix) -> SnfResult {
    let (nr, nc) = (m.rows(), m.cols());
    let ident = |n: usize| -> Vec<Vec<BigInt>> {
        (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect()).collect()
    };
    let mut s = SnfState { a: m.reduce(CoefficientDomain::Integer).to_rows(), u: ident(nr), v: ident(nc) };
    let mut factors = Vec::new();

    for t in 0..nr.min(nc) {
        let smallest = |a: &Vec<Vec<BigInt>>| {
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            best
        };
        let Some((pi, pj)) = smallest(&s.a) else {
            break;
        };
        s.swap_rows(t, pi);
        s.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..nr {
                if !s.a[i][t].is_zero() {
                    let q = s.a[i][t].div_floor(&s.a[t][t]);
                    s.row_axpy(i, t, &q);
                    if !s.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..nc {
                if !s.a[t][j].is_zero() {
                    let q = s.a[t][j].div_floor(&s.a[t][t]);
                    s.col_axpy(j, t, &q);
                    if !s.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // a remainder smaller than the pivot survives in row or column t
                let mut best = (t, t);
                for i in t + 1..nr {
                    if !s.a[i][t].is_zero() && s.a[i][t].abs() < s.a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..nc {
                    if !s.a[t][j].is_zero() && s.a[t][j].abs() < s.a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                s.swap_rows(t, best.0);
                s.swap_cols(t, best.1);
                continue;
            }
            let pivot = s.a[t][t].clone();
            let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !s.a[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => s.row_axpy(t, i, &BigInt::from(-1)),
                None => break,
            }
        }
        if s.a[t][t].is_negative() {
            s.negate_row(t);
        }
        factors.push(s.a[t][t].clone());
    }

    let to_mat = |rows: Vec<Vec<BigInt>>, n: usize| {
        if n == 0 {
            ExactMatrix::zeros(0, 0, CoefficientDomain::Integer)
        } else {
            ExactMatrix::from_rows(&rows, CoefficientDomain::Integer)
        }
    };
    SnfResult { invariant_factors: factors, u: to_mat(s.u, nr), v: to_mat(s.v, nc) }
}

/// Smallest `k >= 1` with `k·v` in the integer column span of `m`; `None`
/// when `m·x = v` has no rational solution.
pub fn divisibility_index(m: &ExactMatrix, v: &[BigInt]) -> Result<Option<BigInt>> {
    if v.len() != m.rows() {
        return Err(Error::Dimension(format!("matrix has {} rows, vector has length {}", m.rows(), v.len())));
    }
    let snf = smith_normal_form(m);
    let uv = if m.rows() == 0 { Vec::new() } else { snf.u.mul_vec(v)? };
    let r = snf.rank();
    if uv[r..].iter().any(|x| !x.is_zero()) {
        return Ok(None);
    }
    let k = snf
        .invariant_factors
        .iter()
        .zip(&uv)
        .fold(BigInt::one(), |acc, (d, y)| acc.lcm(&(d / d.gcd(y))));
    Ok(Some(k))
}

/// Finitely generated abelian group `ℤ^free_rank ⊕ ⨁ ℤ/t`.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct IntegerCohomology {
    pub free_rank: usize,
    #[serde(with = "bigint_strings")]
    pub torsion: Vec<BigInt>,
}

impl IntegerCohomology {
    /// Number of torsion summands whose order is divisible by `p`.
    pub fn p_torsion_count(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.torsion.iter().filter(|t| t.is_multiple_of(&p)).count()
    }
}

/// Cohomology at `B` of `ℤ^a --d_in--> ℤ^b --d_out--> ℤ^c`.
pub fn integer_cohomology(d_in: &ExactMatrix, d_out: &ExactMatrix) -> Result<IntegerCohomology> {
    if d_in.rows() != d_out.cols() {
        return Err(Error::Dimension(format!(
            "d_in lands in rank {}, d_out starts from rank {}",
            d_in.rows(),
            d_out.cols()
        )));
    }
    let zd_in = d_in.reduce(CoefficientDomain::Integer);
    let zd_out = d_out.reduce(CoefficientDomain::Integer);
    if !zd_out.matmul(&zd_in)?.is_zero() {
        return Err(Error::NonzeroComposition);
    }
    let snf_in = smith_normal_form(&zd_in);
    let rank_out = smith_normal_form(&zd_out).rank();
    let b = d_in.rows();
    Ok(IntegerCohomology {
        free_rank: b - rank_out - snf_in.rank(),
        torsion: snf_in.invariant_factors.into_iter().filter(|d| !d.is_one()).collect(),
    })
}

pub(crate) mod bigint_strings {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(ToString::to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| s.parse().map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CoefficientDomain::*;

    fn int(rows: &[Vec<i64>]) -> ExactMatrix {
        ExactMatrix::from_rows(rows, Integer)
    }

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_over_field(&ExactMatrix::identity(2, Rational), Rational).unwrap(), 2);
        assert_eq!(rank_over_field(&int(&[vec![2]]), PrimeField(2)).unwrap(), 0);
        assert_eq!(rank_over_field(&int(&[vec![2]]), Integer), Err(Error::NotAField("Z".into())));
        assert_eq!(rank_over_field(&ExactMatrix::zeros(0, 5, Rational), Rational).unwrap(), 0);
        assert_eq!(rank_over_field(&ExactMatrix::zeros(4, 0, Rational), PrimeField(3)).unwrap(), 0);
    }

    #[test]
    fn snf_examples() {
        let f = |m: ExactMatrix| smith_normal_form(&m).invariant_factors;
        assert_eq!(f(int(&[vec![2, 0], vec![0, 3]])), bi(&[1, 6]));
        assert_eq!(f(int(&[vec![2, 4], vec![6, 8]])), bi(&[2, 4]));
        assert!(f(ExactMatrix::zeros(3, 2, Integer)).is_empty());
        assert!(f(ExactMatrix::zeros(0, 2, Integer)).is_empty());
    }

    #[test]
    fn solve_examples() {
        let v = bi(&[4, -7]);
        assert_eq!(
            solve_over_field(&ExactMatrix::identity(2, Integer), &v, Rational).unwrap(),
            Some(v.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        );
        let two = int(&[vec![2]]);
        assert_eq!(
            solve_over_field(&two, &bi(&[1]), Rational).unwrap(),
            Some(vec![BigRational::new(1.into(), 2.into())])
        );
        assert_eq!(solve_over_field(&two, &bi(&[1]), PrimeField(2)).unwrap(), None);
        assert!(matches!(solve_over_field(&two, &bi(&[1, 2]), Rational), Err(Error::Dimension(_))));
    }

    #[test]
    fn divisibility_examples() {
        assert_eq!(divisibility_index(&int(&[vec![2]]), &bi(&[1])).unwrap(), Some(BigInt::from(2)));
        assert_eq!(
            divisibility_index(&ExactMatrix::identity(3, Integer), &bi(&[5, -1, 9])).unwrap(),
            Some(BigInt::from(1))
        );
        assert_eq!(divisibility_index(&int(&[vec![1], vec![1]]), &bi(&[1, 0])).unwrap(), None);
        assert_eq!(divisibility_index(&ExactMatrix::zeros(2, 0, Integer), &bi(&[0, 0])).unwrap(), Some(BigInt::from(1)));
    }

    #[test]
    fn integer_cohomology_examples() {
        // 0 -> Z --x7--> Z -> 0 at the target
        let h = integer_cohomology(&int(&[vec![7]]), &ExactMatrix::zeros(0, 1, Integer)).unwrap();
        assert_eq!(h, IntegerCohomology { free_rank: 0, torsion: bi(&[7]) });
        let h = integer_cohomology(&ExactMatrix::zeros(3, 0, Integer), &ExactMatrix::zeros(0, 3, Integer)).unwrap();
        assert_eq!(h.free_rank, 3);
        assert!(h.torsion.is_empty());
        assert_eq!(
            integer_cohomology(&int(&[vec![1]]), &int(&[vec![1]])),
            Err(Error::NonzeroComposition)
        );
    }

    #[test]
    fn determinant_and_triples() {
        assert_eq!(int(&[vec![2, 4], vec![6, 8]]).determinant(), BigInt::from(-8));
        let t = int(&[vec![0, 3], vec![-1, 0]]).to_triples("2 2 0,0,0,0,0 1 0");
        assert_eq!(t, "2 2 0,0,0,0,0 1 0\n0 1 3\n1 0 -1\n");
    }

    #[test]
    fn nullspace_is_kernel() {
        let m = int(&[vec![1, 2, 3], vec![2, 4, 6]]);
        for dom in [Rational, PrimeField(5)] {
            let k = nullspace_over_field(&m, dom).unwrap();
            assert_eq!(k.len(), 2);
            for v in k {
                assert!(m.reduce(dom).mul_vec(&v).unwrap().iter().all(Zero::is_zero));
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = ExactMatrix> {
            (0usize..6, 0usize..6).prop_flat_map(|(r, c)| {
                proptest::collection::vec(proptest::collection::vec(-9i64..=9, c), r).prop_map(move |rows| {
                    if r == 0 {
                        ExactMatrix::zeros(0, c, Integer)
                    } else {
                        int(&rows)
                    }
                })
            })
        }

        proptest! {
            #[test]
            fn snf_identity(m in small_matrix()) {
                let s = smith_normal_form(&m);
                let d = s.u.matmul(&m).unwrap().matmul(&s.v).unwrap();
                prop_assert_eq!(d, s.diagonal());
                prop_assert!(s.invariant_factors.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
                prop_assert_eq!(s.rank(), rank_over_field(&m, Rational).unwrap());
                if m.rows() > 0 {
                    prop_assert!(s.u.determinant().abs().is_one());
                }
                if m.cols() > 0 {
                    prop_assert!(s.v.determinant().abs().is_one());
                }
            }

            #[test]
            fn solve_certificate(m in small_matrix(), seed in proptest::collection::vec(-5i64..5, 6)) {
                let v: Vec<BigInt> = seed.iter().take(m.rows()).map(|&x| BigInt::from(x)).collect();
                prop_assume!(v.len() == m.rows());
                for dom in [Rational, PrimeField(3)] {
                    let aug = m.hconcat(&ExactMatrix::column_vector(&v, Integer)).unwrap();
                    match solve_over_field(&m, &v, dom).unwrap() {
                        Some(x) => {
                            for i in 0..m.rows() {
                                let s: BigRational = m.row(i).iter().zip(&x)
                                    .map(|(a, b)| BigRational::from_integer(a.clone()) * b).sum();
                                let diff = s - BigRational::from_integer(v[i].clone());
                                match dom {
                                    PrimeField(p) => prop_assert!((diff.to_integer() % BigInt::from(p)).is_zero()),
                                    _ => prop_assert!(diff.is_zero()),
                                }
                            }
                        }
                        None => prop_assert!(rank_over_field(&aug, dom).unwrap() > rank_over_field(&m, dom).unwrap()),
                    }
                }
            }
        }
    }
}
