//! Weight slices of the Čech complex on `f1, f2, f3`, truncated at a common
//! denominator exponent.
//!
//! At level `n` the term for a subset `S` is `f_S^{-n}·R_{w + n·wt(f_S)}`
//! inside `R[f_S^{-1}]`, so the coordinates are those of the numerator. The
//! localization map to `S ∪ {i}` multiplies the numerator by `f_i^n`, and
//! the level-`n` complex maps into the level-`n+1` one by multiplying the
//! term of `S` by `f_S`. The union over `n` is the full weight-`w` slice.

use crate::error::Result;
use crate::linalg::ExactMatrix;
use crate::polyring::{generators, multiplication_matrix, CoefficientDomain, SparsePolynomial, GENERATOR_WEIGHTS};
use crate::weights::{enumerate_basis, ExponentMatrix, Weight};

/// A subset of `{1, 2, 3}` as a bitmask (bit `i-1` stands for `f_i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset(pub u8);

impl Subset {
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << (i - 1)) != 0
    }

    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | (1 << (i - 1)))
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        (1..=3).filter(move |&i| self.contains(i))
    }

    /// `sum of wt(f_i)` over `i ∈ S`.
    pub fn weight(self) -> Weight {
        self.members().fold(Weight::ZERO, |acc, i| acc + GENERATOR_WEIGHTS[i - 1])
    }

    /// Čech sign `(-1)^{#{j ∈ S : j < i}}` of the map `S → S ∪ {i}`.
    pub fn sign(self, i: usize) -> i64 {
        if self.members().filter(|&j| j < i).count() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl std::fmt::Display for Subset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let m: Vec<String> = self.members().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

/// Subsets of each cardinality, in the fixed term order.
pub const SUBSETS: [&[Subset]; 4] = [
    &[Subset(0b000)],
    &[Subset(0b001), Subset(0b010), Subset(0b100)],
    &[Subset(0b011), Subset(0b101), Subset(0b110)],
    &[Subset(0b111)],
];

/// `w* = −wt(f1·f2·f3)`, the weight of `1/(f1·f2·f3)`.
pub const W_STAR: Weight = Weight::new(-3, -3, -2, -2, -2);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub subset: Subset,
    /// Weight of the numerator, `w + n·wt(f_S)`.
    pub weight: Weight,
    pub basis: Vec<ExponentMatrix>,
    /// First coordinate of this term inside its degree.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedComplex {
    pub weight: Weight,
    pub level: u32,
    pub domain: CoefficientDomain,
    /// Terms grouped by degree, each group in [`SUBSETS`] order.
    pub terms: [Vec<Term>; 4],
    /// `d[j] : C_j → C_{j+1}`.
    pub differentials: [ExactMatrix; 3],
}

fn product_power(subset: Subset, n: u32, gens: &[SparsePolynomial; 3], domain: CoefficientDomain) -> SparsePolynomial {
    subset
        .members()
        .fold(SparsePolynomial::one(domain), |acc, i| acc.multiply(&gens[i - 1].pow(n)).expect("same domain"))
}

fn terms_at(w: Weight, n: u32) -> [Vec<Term>; 4] {
    std::array::from_fn(|j| {
        let mut offset = 0;
        SUBSETS[j]
            .iter()
            .map(|&s| {
                let weight = w + (n as i64) * s.weight();
                let basis = enumerate_basis(&weight);
                let t = Term { subset: s, weight, basis, offset };
                offset += t.basis.len();
                t
            })
            .collect()
    })
}

fn degree_dim(terms: &[Term]) -> usize {
    terms.iter().map(|t| t.basis.len()).sum()
}

impl TruncatedComplex {
    /// Builds the level-`n` truncation in weight `w` over `domain`. Panics if `n == 0`.
    pub fn build(w: Weight, n: u32, domain: CoefficientDomain) -> Self {
        assert!(n >= 1, "truncation level starts at 1");
        let gens = generators(domain);
        let powers: Vec<SparsePolynomial> = gens.iter().map(|g| g.pow(n)).collect();
        let terms = terms_at(w, n);
        let differentials = std::array::from_fn(|j| {
            let (src, dst) = (&terms[j], &terms[j + 1]);
            let mut d = ExactMatrix::zeros(degree_dim(dst), degree_dim(src), domain);
            for s in src {
                for i in (1..=3).filter(|&i| !s.subset.contains(i)) {
                    let target = dst.iter().find(|t| t.subset == s.subset.with(i)).expect("subset present");
                    let block = multiplication_matrix(&powers[i - 1], &s.weight).expect("generators are homogeneous");
                    let block = if s.subset.sign(i) < 0 { negate(&block) } else { block };
                    d.set_block(target.offset, s.offset, &block);
                }
            }
            d
        });
        TruncatedComplex { weight: w, level: n, domain, terms, differentials }
    }

    pub fn dims(&self) -> [usize; 4] {
        std::array::from_fn(|j| degree_dim(&self.terms[j]))
    }

    /// Chain map to the level-`n+1` complex: the term of `S` is multiplied by `f_S`.
    pub fn transition_map(&self) -> ChainMap {
        let gens = generators(self.domain);
        let next = terms_at(self.weight, self.level + 1);
        let maps = std::array::from_fn(|j| {
            let mut m = ExactMatrix::zeros(degree_dim(&next[j]), degree_dim(&self.terms[j]), self.domain);
            for (src, dst) in self.terms[j].iter().zip(&next[j]) {
                let f_s = product_power(src.subset, 1, &gens, self.domain);
                let block = multiplication_matrix(&f_s, &src.weight).expect("homogeneous");
                m.set_block(dst.offset, src.offset, &block);
            }
            m
        });
        ChainMap { from_level: self.level, to_level: self.level + 1, maps }
    }

    /// Same complex with every matrix read in another domain.
    pub fn reduce(&self, domain: CoefficientDomain) -> Self {
        TruncatedComplex {
            domain,
            differentials: std::array::from_fn(|j| self.differentials[j].reduce(domain)),
            ..self.clone()
        }
    }

    /// Triple-list dump of `d_j` with header `rows cols weight level degree`.
    pub fn dump_differential(&self, j: usize) -> String {
        let d = &self.differentials[j];
        d.to_triples(&format!("{} {} {} {} {}", d.rows(), d.cols(), self.weight, self.level, j))
    }
}

fn negate(m: &ExactMatrix) -> ExactMatrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, -m.get(i, j).clone());
        }
    }
    out
}

pub fn build_truncated_complex(w: Weight, n: u32, domain: CoefficientDomain) -> TruncatedComplex {
    TruncatedComplex::build(w, n, domain)
}

/// Per-degree matrices of a map between truncations of the same weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    pub from_level: u32,
    pub to_level: u32,
    pub maps: [ExactMatrix; 4],
}

impl ChainMap {
    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        let maps: Vec<ExactMatrix> =
            (0..4).map(|j| other.maps[j].matmul(&self.maps[j])).collect::<Result<_>>()?;
        Ok(ChainMap {
            from_level: self.from_level,
            to_level: other.to_level,
            maps: maps.try_into().expect("four degrees"),
        })
    }

    pub fn identity(x: &TruncatedComplex) -> ChainMap {
        let dims = x.dims();
        ChainMap {
            from_level: x.level,
            to_level: x.level,
            maps: std::array::from_fn(|j| ExactMatrix::identity(dims[j], x.domain)),
        }
    }
}

/// Composite of transition maps from level `from` to level `to` in weight `w`.
pub fn composed_transition(w: Weight, from: u32, to: u32, domain: CoefficientDomain) -> ChainMap {
    let x = TruncatedComplex::build(w, from, domain);
    let mut acc = ChainMap::identity(&x);
    for n in from..to {
        let t = TruncatedComplex::build(w, n, domain).transition_map();
        acc = acc.then(&t).expect("compatible dimensions");
    }
    acc
}

/// Coordinates of `1/(f1·f2·f3)` in `C_3` of the level-`n` complex at
/// [`W_STAR`]: the numerator `(f1·f2·f3)^{n-1}` over the denominator
/// `(f1·f2·f3)^n`.
pub fn canonical_class_vector(n: u32, domain: CoefficientDomain) -> Vec<num_bigint::BigInt> {
    assert!(n >= 1, "truncation level starts at 1");
    let gens = generators(domain);
    let numerator = product_power(Subset(0b111), n - 1, &gens, domain);
    numerator.coordinates(&(W_STAR + (n as i64) * Subset(0b111).weight()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::weight_dim;
    use num_bigint::BigInt;
    use CoefficientDomain::*;

    #[test]
    fn signs_and_order() {
        assert_eq!(Subset(0).sign(2), 1);
        assert_eq!(Subset(0b001).sign(2), -1);
        assert_eq!(Subset(0b010).sign(1), 1);
        assert_eq!(Subset(0b011).sign(3), 1);
        assert_eq!(Subset(0b101).sign(2), -1);
        let order: Vec<String> = SUBSETS.iter().flat_map(|d| d.iter().map(|s| s.to_string())).collect();
        assert_eq!(order, ["{}", "{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]);
    }

    #[test]
    fn dims_match_weight_dims() {
        // independent recount per term from weight_dim
        let oracle = |w: Weight, n: i64| -> [usize; 4] {
            std::array::from_fn(|j| SUBSETS[j].iter().map(|s| weight_dim(&(w + n * s.weight()))).sum())
        };
        assert_eq!(TruncatedComplex::build(W_STAR, 1, Rational).dims(), [0, 0, 0, 1]);
        assert_eq!(oracle(W_STAR, 1), [0, 0, 0, 1]);
        assert_eq!(TruncatedComplex::build(Weight::ZERO, 1, Rational).dims(), [1, 6, 12, 7]);
        assert_eq!(oracle(Weight::ZERO, 1), [1, 6, 12, 7]);
        assert_eq!(TruncatedComplex::build(W_STAR, 2, Rational).dims(), [0, 0, 3, 7]);
        assert_eq!(oracle(W_STAR, 2), [0, 0, 3, 7]);
        let x = TruncatedComplex::build(W_STAR, 1, Integer);
        assert_eq!(x.terms[3][0].basis, vec![ExponentMatrix::ONE]);
    }

    #[test]
    fn differentials_square_to_zero() {
        for w in [W_STAR, Weight::ZERO, Weight::new(-1, -2, -1, -1, -1), Weight::new(1, 0, 0, 0, 1)] {
            for n in 1..=3 {
                for dom in [Integer, Rational, PrimeField(2), PrimeField(3)] {
                    let x = TruncatedComplex::build(w, n, dom);
                    for j in 0..2 {
                        assert!(x.differentials[j + 1].matmul(&x.differentials[j]).unwrap().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn transition_is_chain_map() {
        for w in [W_STAR, Weight::ZERO, Weight::new(-2, -1, -1, -1, -1)] {
            let x = TruncatedComplex::build(w, 1, Integer);
            let y = TruncatedComplex::build(w, 2, Integer);
            let t = x.transition_map();
            for j in 0..3 {
                let lhs = y.differentials[j].matmul(&t.maps[j]).unwrap();
                let rhs = t.maps[j + 1].matmul(&x.differentials[j]).unwrap();
                assert_eq!(lhs, rhs, "degree {j} at {w}");
            }
        }
        // f_∅ = 1
        let x = TruncatedComplex::build(Weight::ZERO, 2, Integer);
        assert_eq!(x.transition_map().maps[0], ExactMatrix::identity(1, Integer));
    }

    #[test]
    fn top_transition_is_f123() {
        let t = TruncatedComplex::build(W_STAR, 1, Integer).transition_map();
        assert_eq!((t.maps[3].rows(), t.maps[3].cols()), (7, 1));
        let col: Vec<BigInt> = t.maps[3].to_rows().into_iter().map(|r| r[0].clone()).collect();
        assert_eq!(col, canonical_class_vector(2, Integer));
    }

    #[test]
    fn canonical_vectors() {
        assert_eq!(canonical_class_vector(1, Rational), vec![BigInt::from(1)]);
        // sympy expansion of f1*f2*f3 in the basis of (3,3;2,2,2)
        let v2: Vec<BigInt> = [-1, 1, 1, 0, -1, -1, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(canonical_class_vector(2, Integer), v2);
        let v2_mod2: Vec<BigInt> = [1, 1, 1, 0, 1, 1, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(canonical_class_vector(2, PrimeField(2)), v2_mod2);
        for n in 1..4 {
            let t = TruncatedComplex::build(W_STAR, n, Integer).transition_map();
            assert_eq!(t.maps[3].mul_vec(&canonical_class_vector(n, Integer)).unwrap(), canonical_class_vector(n + 1, Integer));
        }
    }

    #[test]
    fn integer_build_reduces_to_prime_build() {
        for w in [W_STAR, Weight::ZERO, Weight::new(0, -1, -1, 0, 0)] {
            for n in 1..=3 {
                let z = TruncatedComplex::build(w, n, Integer);
                for p in [2, 3] {
                    assert_eq!(z.reduce(PrimeField(p)), TruncatedComplex::build(w, n, PrimeField(p)));
                }
            }
        }
    }

    #[test]
    fn dump_header() {
        let x = TruncatedComplex::build(Weight::ZERO, 1, Integer);
        let s = x.dump_differential(0);
        assert!(s.starts_with("6 1 0,0,0,0,0 1 0\n"));
        assert_eq!(s.lines().count(), 1 + 6);
    }
}
