//! Torus weights of monomials in the six entries of a 2x3 matrix.
//!
//! A monomial `X11^a11 ... X23^a23` is recorded by its exponent matrix; the
//! diagonal torus of `GL2 x GL3` grades it by the row sums and the column
//! sums of that matrix.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Multidegree `(r1, r2; c1, c2, c3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Weight {
    pub rows: [i64; 2],
    pub cols: [i64; 3],
}

impl Weight {
    pub const ZERO: Weight = Weight { rows: [0, 0], cols: [0, 0, 0] };

    pub const fn new(r1: i64, r2: i64, c1: i64, c2: i64, c3: i64) -> Self {
        Weight { rows: [r1, r2], cols: [c1, c2, c3] }
    }

    /// Row degree equals column degree.
    pub fn is_consistent(&self) -> bool {
        self.rows[0] + self.rows[1] == self.cols.iter().sum::<i64>()
    }

    pub fn total_degree(&self) -> i64 {
        self.rows[0] + self.rows[1]
    }

    pub fn as_array(&self) -> [i64; 5] {
        [self.rows[0], self.rows[1], self.cols[0], self.cols[1], self.cols[2]]
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, o: Weight) -> Weight {
        Weight::new(
            self.rows[0] + o.rows[0],
            self.rows[1] + o.rows[1],
            self.cols[0] + o.cols[0],
            self.cols[1] + o.cols[1],
            self.cols[2] + o.cols[2],
        )
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, o: Weight) -> Weight {
        self + (-o)
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        -1 * self
    }
}

impl Mul<Weight> for i64 {
    type Output = Weight;
    fn mul(self, w: Weight) -> Weight {
        Weight::new(
            self * w.rows[0],
            self * w.rows[1],
            self * w.cols[0],
            self * w.cols[1],
            self * w.cols[2],
        )
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.as_array();
        write!(f, "{},{},{},{},{}", a[0], a[1], a[2], a[3], a[4])
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// Parses `"r1,r2,c1,c2,c3"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!(
                "weight needs 5 comma-separated integers, got {s:?}"
            )));
        }
        let mut v = [0i64; 5];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad weight entry {p:?} in {s:?}")))?;
        }
        Ok(Weight::new(v[0], v[1], v[2], v[3], v[4]))
    }
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exponents `a[i][j]` of `X_{i+1, j+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExponentMatrix(pub [[u32; 3]; 2]);

impl ExponentMatrix {
    pub const ONE: ExponentMatrix = ExponentMatrix([[0; 3]; 2]);

    /// Builds from the flattened tuple `(a11, a12, a13, a21, a22, a23)`.
    pub const fn from_flat(a: [u32; 6]) -> Self {
        ExponentMatrix([[a[0], a[1], a[2]], [a[3], a[4], a[5]]])
    }

    pub fn flat(&self) -> [u32; 6] {
        let [r, s] = self.0;
        [r[0], r[1], r[2], s[0], s[1], s[2]]
    }

    pub fn degree(&self) -> u64 {
        self.flat().iter().map(|&e| e as u64).sum()
    }

    /// Exponent matrix of a product of monomials.
    pub fn mul(&self, other: &ExponentMatrix) -> ExponentMatrix {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..3 {
                out.0[i][j] += other.0[i][j];
            }
        }
        out
    }
}

impl fmt::Display for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in 0..2 {
            for j in 0..3 {
                let e = self.0[i][j];
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("·")?;
                }
                first = false;
                write!(f, "X{}{}", i + 1, j + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

pub fn weight_of_monomial(a: &ExponentMatrix) -> Weight {
    let m = &a.0;
    let r = |i: usize| m[i].iter().map(|&e| e as i64).sum::<i64>();
    let c = |j: usize| m[0][j] as i64 + m[1][j] as i64;
    Weight::new(r(0), r(1), c(0), c(1), c(2))
}

/// Monomial basis of `R_w`, lexicographically decreasing in
/// `(a11, a12, a13, a21, a22, a23)` (so `X11·X22` precedes `X12·X21`).
///
/// The first row determines the second, so this walks the compositions of
/// `r1` bounded above by the column degrees. Empty when `w` is inconsistent
/// or has a negative entry.
pub fn enumerate_basis(w: &Weight) -> Vec<ExponentMatrix> {
    if !w.is_consistent() || w.as_array().iter().any(|&x| x < 0) {
        return Vec::new();
    }
    let r1 = w.rows[0];
    let [c1, c2, c3] = w.cols;
    let mut out = Vec::new();
    for a11 in (0..=c1.min(r1)).rev() {
        for a12 in (0..=c2.min(r1 - a11)).rev() {
            let a13 = r1 - a11 - a12;
            if a13 > c3 {
                continue;
            }
            out.push(ExponentMatrix::from_flat([
                a11 as u32,
                a12 as u32,
                a13 as u32,
                (c1 - a11) as u32,
                (c2 - a12) as u32,
                (c3 - a13) as u32,
            ]));
        }
    }
    out
}

pub fn weight_dim(w: &Weight) -> usize {
    enumerate_basis(w).len()
}

/// Position of a monomial inside `enumerate_basis(weight_of_monomial(a))`.
pub(crate) fn basis_index(basis: &[ExponentMatrix], a: &ExponentMatrix) -> Option<usize> {
    basis.binary_search_by(|probe| a.cmp(probe)).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    // #{(a, b, c) : a + b + c = r, 0 <= a <= c1, 0 <= b <= c2, 0 <= c <= c3}
    fn inclusion_exclusion(w: &Weight) -> usize {
        if !w.is_consistent() || w.as_array().iter().any(|&x| x < 0) {
            return 0;
        }
        let r = w.rows[0];
        let c = w.cols;
        let choose2 = |n: i64| if n < 2 { 0 } else { n * (n - 1) / 2 };
        let mut total = 0i64;
        for mask in 0u32..8 {
            let mut shift = 0;
            for (j, cj) in c.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    shift += cj + 1;
                }
            }
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            total += sign * choose2(r - shift + 2);
        }
        total as usize
    }

    fn x(i: usize, j: usize) -> ExponentMatrix {
        let mut a = ExponentMatrix::ONE;
        a.0[i - 1][j - 1] = 1;
        a
    }

    #[test]
    fn weights_of_monomials() {
        assert_eq!(weight_of_monomial(&x(1, 2).mul(&x(2, 3))), Weight::new(1, 1, 0, 1, 1));
        assert_eq!(weight_of_monomial(&ExponentMatrix::ONE), Weight::ZERO);
        let a = x(1, 1).mul(&x(1, 1)).mul(&x(2, 2));
        assert_eq!(weight_of_monomial(&a), Weight::new(2, 1, 2, 1, 0));
    }

    #[test]
    fn small_bases() {
        assert_eq!(
            enumerate_basis(&Weight::new(1, 1, 0, 1, 1)),
            vec![x(1, 2).mul(&x(2, 3)), x(1, 3).mul(&x(2, 2))]
        );
        assert_eq!(enumerate_basis(&Weight::ZERO), vec![ExponentMatrix::ONE]);
        assert!(enumerate_basis(&Weight::new(-1, 0, -1, 0, 0)).is_empty());
        assert!(enumerate_basis(&Weight::new(1, 1, 1, 0, 0)).is_empty());
        assert_eq!(weight_dim(&Weight::new(1, 1, 1, 1, 0)), 2);
    }

    #[test]
    fn dims_match_brute_force() {
        // all first rows (a11, a12, a13) with a1j <= cj
        let brute = |w: &Weight| {
            let mut n = 0;
            for a in 0..=w.cols[0].max(0) {
                for b in 0..=w.cols[1].max(0) {
                    for c in 0..=w.cols[2].max(0) {
                        if a + b + c == w.rows[0] && w.is_consistent() && w.rows[1] >= 0 {
                            n += 1;
                        }
                    }
                }
            }
            n
        };
        for w in [Weight::new(3, 3, 2, 2, 2), Weight::new(2, 2, 1, 1, 2), Weight::new(12, 12, 8, 8, 8)] {
            assert_eq!(weight_dim(&w), brute(&w));
        }
        assert_eq!(weight_dim(&Weight::new(3, 3, 2, 2, 2)), 7);
        assert_eq!(weight_dim(&Weight::new(2, 2, 1, 1, 2)), 4);
        assert_eq!(inclusion_exclusion(&Weight::new(12, 12, 8, 8, 8)), 61);
        assert_eq!(weight_dim(&Weight::new(12, 12, 8, 8, 8)), 61);
    }

    #[test]
    fn weight_string_roundtrip() {
        let w: Weight = "-3,-3,-2,-2,-2".parse().unwrap();
        assert_eq!(w, Weight::new(-3, -3, -2, -2, -2));
        assert_eq!(w.to_string(), "-3,-3,-2,-2,-2");
        assert!("1,2,3".parse::<Weight>().is_err());
        assert!("1,2,x,4,5".parse::<Weight>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_weight() -> impl Strategy<Value = Weight> {
            (0i64..7, 0i64..7, 0i64..7, 0i64..7).prop_map(|(r1, c1, c2, c3)| {
                let r2 = c1 + c2 + c3 - r1;
                Weight::new(r1, r2, c1, c2, c3)
            })
        }

        proptest! {
            #[test]
            fn dim_matches_inclusion_exclusion(w in small_weight()) {
                prop_assert_eq!(weight_dim(&w), inclusion_exclusion(&w));
            }

            #[test]
            fn basis_strictly_increasing_and_homogeneous(w in small_weight()) {
                let b = enumerate_basis(&w);
                prop_assert!(b.windows(2).all(|p| p[0].flat() > p[1].flat()));
                prop_assert!(b.iter().all(|a| weight_of_monomial(a) == w));
            }

            #[test]
            fn monomial_weight_consistent(a in proptest::array::uniform6(0u32..6)) {
                let m = ExponentMatrix::from_flat(a);
                let w = weight_of_monomial(&m);
                prop_assert!(w.is_consistent());
                prop_assert!(enumerate_basis(&w).contains(&m));
            }

            #[test]
            fn weight_group_laws(a in proptest::array::uniform5(-9i64..9),
                                 b in proptest::array::uniform5(-9i64..9),
                                 k in -4i64..4) {
                let w = |v: [i64; 5]| Weight::new(v[0], v[1], v[2], v[3], v[4]);
                let (u, v) = (w(a), w(b));
                prop_assert_eq!(k * (u + v), k * u + k * v);
                prop_assert_eq!((u + v) - v, u);
            }
        }
    }
}
