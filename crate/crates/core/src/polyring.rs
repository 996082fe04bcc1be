//! Sparse polynomials in `X11, ..., X23` and the three 2x2 minors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ExactMatrix;
use crate::weights::{basis_index, enumerate_basis, weight_of_monomial, ExponentMatrix, Weight};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Where coefficients live: ℤ, ℚ or 𝔽_p.
///
/// Every polynomial and matrix in this crate has integral entries, so all
/// three domains share the `BigInt` representation; over 𝔽_p it is reduced
/// into `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientDomain {
    Integer,
    Rational,
    PrimeField(u64),
}

impl CoefficientDomain {
    pub fn prime_field(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(CoefficientDomain::PrimeField(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, CoefficientDomain::Integer)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoefficientDomain::PrimeField(p) => *p,
            _ => 0,
        }
    }

    pub fn normalize(&self, x: BigInt) -> BigInt {
        match self {
            CoefficientDomain::PrimeField(p) => x.mod_floor(&BigInt::from(*p)),
            _ => x,
        }
    }

    /// Domain of a result combining values from `self` and `other`.
    ///
    /// ℤ embeds into both ℚ and 𝔽_p; ℚ and 𝔽_p (or two different primes)
    /// do not mix.
    pub fn common(self, other: CoefficientDomain) -> Result<CoefficientDomain> {
        use CoefficientDomain::*;
        match (self, other) {
            (a, b) if a == b => Ok(a),
            (Integer, b) => Ok(b),
            (a, Integer) => Ok(a),
            (a, b) => Err(Error::DomainMismatch(a.to_string(), b.to_string())),
        }
    }
}

impl fmt::Display for CoefficientDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientDomain::Integer => f.write_str("Z"),
            CoefficientDomain::Rational => f.write_str("Q"),
            CoefficientDomain::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for CoefficientDomain {
    type Err = Error;

    /// Accepts `Z`/`z`, `Q`/`q`, or `F<p>`/`fp<p>`/`fp:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "z" => Ok(CoefficientDomain::Integer),
            "q" => Ok(CoefficientDomain::Rational),
            _ => {
                let digits = t
                    .strip_prefix("fp:")
                    .or_else(|| t.strip_prefix("fp"))
                    .or_else(|| t.strip_prefix('f'))
                    .ok_or_else(|| Error::Parse(format!("unknown coefficient domain {s:?}")))?;
                let p: u64 = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("unknown coefficient domain {s:?}")))?;
                CoefficientDomain::prime_field(p)
            }
        }
    }
}

impl Serialize for CoefficientDomain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CoefficientDomain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SparsePolynomial {
    terms: BTreeMap<ExponentMatrix, BigInt>,
    domain: CoefficientDomain,
}

impl SparsePolynomial {
    pub fn zero(domain: CoefficientDomain) -> Self {
        SparsePolynomial { terms: BTreeMap::new(), domain }
    }

    pub fn one(domain: CoefficientDomain) -> Self {
        Self::monomial(ExponentMatrix::ONE, BigInt::one(), domain)
    }

    pub fn monomial(a: ExponentMatrix, c: BigInt, domain: CoefficientDomain) -> Self {
        Self::from_terms([(a, c)], domain)
    }

    /// Sums repeated monomials and drops zero coefficients.
    pub fn from_terms<I>(terms: I, domain: CoefficientDomain) -> Self
    where
        I: IntoIterator<Item = (ExponentMatrix, BigInt)>,
    {
        let mut map: BTreeMap<ExponentMatrix, BigInt> = BTreeMap::new();
        for (a, c) in terms {
            *map.entry(a).or_default() += c;
        }
        let terms = map
            .into_iter()
            .map(|(a, c)| (a, domain.normalize(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        SparsePolynomial { terms, domain }
    }

    pub fn domain(&self) -> CoefficientDomain {
        self.domain
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentMatrix, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: &ExponentMatrix) -> BigInt {
        self.terms.get(a).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common weight of all monomials, `None` for the zero polynomial.
    pub fn weight(&self) -> Result<Option<Weight>> {
        let mut it = self.terms.keys().map(weight_of_monomial);
        let Some(w) = it.next() else {
            return Ok(None);
        };
        if it.all(|u| u == w) {
            Ok(Some(w))
        } else {
            Err(Error::NotHomogeneous)
        }
    }

    pub fn reduce(&self, domain: CoefficientDomain) -> Self {
        Self::from_terms(self.terms.iter().map(|(a, c)| (*a, c.clone())), domain)
    }

    pub fn add(&self, other: &SparsePolynomial) -> Result<SparsePolynomial> {
        let domain = self.domain.common(other.domain)?;
        let all = self.terms.iter().chain(other.terms.iter()).map(|(a, c)| (*a, c.clone()));
        Ok(Self::from_terms(all, domain))
    }

    pub fn scale(&self, k: &BigInt) -> SparsePolynomial {
        Self::from_terms(self.terms.iter().map(|(a, c)| (*a, c * k)), self.domain)
    }

    pub fn multiply(&self, other: &SparsePolynomial) -> Result<SparsePolynomial> {
        let domain = self.domain.common(other.domain)?;
        let mut out: BTreeMap<ExponentMatrix, BigInt> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                *out.entry(a.mul(b)).or_default() += x * y;
            }
        }
        Ok(Self::from_terms(out, domain))
    }

    pub fn pow(&self, e: u32) -> SparsePolynomial {
        let mut acc = Self::one(self.domain);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base).expect("same domain");
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base).expect("same domain");
            }
        }
        acc
    }

    /// Coordinates in the monomial basis of `w` (zero if `self` has other weights).
    pub fn coordinates(&self, w: &Weight) -> Vec<BigInt> {
        enumerate_basis(w).iter().map(|a| self.coefficient(a)).collect()
    }
}

impl fmt::Display for SparsePolynomial {
    /// `+c·X11^2·X22 -c·...` in basis order; `0` for the zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (a, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let sign = if c.is_negative() { '-' } else { '+' };
            write!(f, "{sign}{}·{a}", c.abs())?;
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePolynomial[{}]({self})", self.domain)
    }
}

fn x(i: usize, j: usize) -> ExponentMatrix {
    let mut a = ExponentMatrix::ONE;
    a.0[i - 1][j - 1] = 1;
    a
}

fn minor(pos: (ExponentMatrix, ExponentMatrix), neg: (ExponentMatrix, ExponentMatrix), d: CoefficientDomain) -> SparsePolynomial {
    SparsePolynomial::from_terms(
        [(pos.0.mul(&pos.1), BigInt::one()), (neg.0.mul(&neg.1), -BigInt::one())],
        d,
    )
}

/// `f1 = X12·X23 − X13·X22`, `f2 = X13·X21 − X11·X23`, `f3 = X11·X22 − X12·X21`.
pub fn generators(domain: CoefficientDomain) -> [SparsePolynomial; 3] {
    [
        minor((x(1, 2), x(2, 3)), (x(1, 3), x(2, 2)), domain),
        minor((x(1, 3), x(2, 1)), (x(1, 1), x(2, 3)), domain),
        minor((x(1, 1), x(2, 2)), (x(1, 2), x(2, 1)), domain),
    ]
}

/// Weights of `f1, f2, f3`.
pub const GENERATOR_WEIGHTS: [Weight; 3] = [
    Weight::new(1, 1, 0, 1, 1),
    Weight::new(1, 1, 1, 0, 1),
    Weight::new(1, 1, 1, 1, 0),
];

/// Matrix of `m ↦ g·m` from `R_w` to `R_{w+wt(g)}` in the enumerated bases.
pub fn multiplication_matrix(g: &SparsePolynomial, w: &Weight) -> Result<ExactMatrix> {
    let source = enumerate_basis(w);
    let Some(u) = g.weight()? else {
        // zero map; the target weight is ambiguous, so only the source is sized
        return Ok(ExactMatrix::zeros(0, source.len(), g.domain()));
    };
    let target = enumerate_basis(&(*w + u));
    let mut m = ExactMatrix::zeros(target.len(), source.len(), g.domain());
    for (col, a) in source.iter().enumerate() {
        for (b, c) in g.terms() {
            let row = basis_index(&target, &a.mul(b)).expect("product lies in the target weight space");
            let cur = m.get(row, col).clone();
            m.set(row, col, cur + c);
        }
    }
    Ok(m)
}
