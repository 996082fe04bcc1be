//! Cohomology of the truncated Čech complexes: dimension tables, membership
//! of the class of `1/(f1·f2·f3)`, its death level in characteristic `p`,
//! colimit ranks, universal-coefficient checks and the `H^6_J` comparison.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cech::{canonical_class_vector, TruncatedComplex, W_STAR};
use crate::error::{Error, Result};
use crate::linalg::{
    divisibility_index, integer_cohomology, nullspace_over_field, rank_over_field, solve_over_field, ExactMatrix,
    IntegerCohomology,
};
use crate::polyring::{is_prime, CoefficientDomain};
use crate::weights::{weight_dim, Weight};

/// Cohomology in one degree: a dimension over a field, or a finitely
/// generated abelian group over ℤ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DegreeCohomology {
    Field { dim: usize },
    Integer(IntegerCohomology),
}

impl DegreeCohomology {
    /// Field dimension, or free rank over ℤ.
    pub fn rank(&self) -> usize {
        match self {
            DegreeCohomology::Field { dim } => *dim,
            DegreeCohomology::Integer(h) => h.free_rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyResult {
    pub weight: Weight,
    pub level: u32,
    pub domain: CoefficientDomain,
    pub dims: [usize; 4],
    pub cohomology: Vec<DegreeCohomology>,
}

impl CohomologyResult {
    /// Field dimensions (free ranks over ℤ) by degree.
    pub fn h(&self) -> [usize; 4] {
        std::array::from_fn(|j| self.cohomology[j].rank())
    }
}

fn check_level(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidRange("truncation level must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn require_field(domain: CoefficientDomain) -> Result<()> {
    if domain.is_field() {
        Ok(())
    } else {
        Err(Error::NotAField(domain.to_string()))
    }
}

/// `d_j` for `j ∈ -1..=3`, with the zero maps at both ends.
fn differential(x: &TruncatedComplex, j: isize) -> ExactMatrix {
    let dims = x.dims();
    match j {
        -1 => ExactMatrix::zeros(dims[0], 0, x.domain),
        3 => ExactMatrix::zeros(0, dims[3], x.domain),
        _ => x.differentials[j as usize].clone(),
    }
}

pub fn cohomology_of(x: &TruncatedComplex) -> Result<CohomologyResult> {
    let dims = x.dims();
    let cohomology = if x.domain.is_field() {
        let ranks = x
            .differentials
            .iter()
            .map(|d| rank_over_field(d, x.domain))
            .collect::<Result<Vec<_>>>()?;
        (0..4)
            .map(|j| {
                let out = if j < 3 { ranks[j] } else { 0 };
                let inn = if j > 0 { ranks[j - 1] } else { 0 };
                DegreeCohomology::Field { dim: dims[j] - out - inn }
            })
            .collect()
    } else {
        (0..4isize)
            .map(|j| integer_cohomology(&differential(x, j - 1), &differential(x, j)).map(DegreeCohomology::Integer))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(CohomologyResult { weight: x.weight, level: x.level, domain: x.domain, dims, cohomology })
}

pub fn cohomology(w: Weight, n: u32, domain: CoefficientDomain) -> Result<CohomologyResult> {
    check_level(n)?;
    cohomology_of(&TruncatedComplex::build(w, n, domain))
}

/// `cohomology` for every level in `lo..=hi`, in level order.
pub fn sweep(w: Weight, lo: u32, hi: u32, domain: CoefficientDomain) -> Result<Vec<CohomologyResult>> {
    check_level(lo)?;
    if lo > hi {
        return Err(Error::InvalidRange(format!("empty level range {lo}..{hi}")));
    }
    (lo..=hi).into_par_iter().map(|n| cohomology(w, n, domain)).collect()
}

/// Whether `1/(f1·f2·f3)` is a boundary in the level-`n` complex at `w*`,
/// i.e. whether `(f1·f2·f3)^{n-1}` lies in the image of `d_2` over a field.
pub fn class_in_image(n: u32, domain: CoefficientDomain) -> Result<bool> {
    check_level(n)?;
    require_field(domain)?;
    let x = TruncatedComplex::build(W_STAR, n, domain);
    let v = canonical_class_vector(n, domain);
    Ok(solve_over_field(&x.differentials[2], &v, domain)?.is_some())
}

/// Same question over ℤ: is there an integral preimage?
pub fn class_in_integer_image(n: u32) -> Result<bool> {
    Ok(class_divisibility_index(n)?.is_some_and(|m| m.is_one()))
}

/// Minimal `m` with `m/(f1·f2·f3)` an integral boundary at level `n`, or
/// `None` when the class is not even a rational boundary.
pub fn class_divisibility_index(n: u32) -> Result<Option<BigInt>> {
    check_level(n)?;
    let x = TruncatedComplex::build(W_STAR, n, CoefficientDomain::Integer);
    divisibility_index(&x.differentials[2], &canonical_class_vector(n, CoefficientDomain::Integer))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeathReport {
    pub prime: u64,
    /// First level at which the class is a boundary.
    pub death_level: Option<u32>,
    pub probed: [u32; 2],
    /// Membership at each probed level, starting from level 1.
    pub membership: Vec<bool>,
}

impl DeathReport {
    /// Membership never reverts once attained.
    pub fn is_monotone(&self) -> bool {
        self.membership.windows(2).all(|w| !w[0] || w[1])
    }
}

/// Probes levels `1..=n_max` over `𝔽_p` for the class of `1/(f1·f2·f3)`.
pub fn death_level(p: u64, n_max: u32) -> Result<DeathReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n_max == 0 {
        return Err(Error::InvalidRange("n_max must be at least 1".into()));
    }
    let domain = CoefficientDomain::PrimeField(p);
    let membership = (1..=n_max)
        .into_par_iter()
        .map(|n| class_in_image(n, domain))
        .collect::<Result<Vec<bool>>>()?;
    let death_level = membership.iter().position(|&b| b).map(|i| i as u32 + 1);
    Ok(DeathReport { prime: p, death_level, probed: [1, n_max], membership })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColimitRow {
    pub level: u32,
    /// Rank of `H^j(lo) → H^j(level)`: how much of the bottom level survives.
    pub survival_rank: usize,
    /// Rank of `H^j(level) → H^j(hi)`.
    pub rank_to_top: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColimitTable {
    pub weight: Weight,
    pub degree: usize,
    pub domain: CoefficientDomain,
    pub window: usize,
    pub rows: Vec<ColimitRow>,
    /// The last `window` survival ranks agree.
    pub stabilized: bool,
    pub stable_value: Option<usize>,
}

pub const DEFAULT_STABILIZATION_WINDOW: usize = 3;

/// Ranks of the maps induced on `H^j` by the transition maps between levels
/// `lo..=hi`.
///
/// The survival ranks `H^j(lo) → H^j(n)` are nonincreasing in `n`; their
/// stable value is the rank of the image of `H^j(lo)` in the colimit, a
/// lower bound for `dim H^j_I(R)_w`. The ranks into the top level are
/// reported alongside.
pub fn colimit_rank(w: Weight, j: usize, lo: u32, hi: u32, domain: CoefficientDomain) -> Result<ColimitTable> {
    colimit_rank_with_window(w, j, lo, hi, domain, DEFAULT_STABILIZATION_WINDOW)
}

/// Rank of the classes spanned by the columns of `cycles` modulo the column
/// span of `boundaries`.
fn rank_mod(cycles: &ExactMatrix, boundaries: &ExactMatrix, boundary_rank: usize, domain: CoefficientDomain) -> Result<usize> {
    Ok(rank_over_field(&cycles.hconcat(boundaries)?, domain)? - boundary_rank)
}

fn cycle_matrix(x: &TruncatedComplex, j: usize, domain: CoefficientDomain) -> Result<ExactMatrix> {
    let kernel = nullspace_over_field(&differential(x, j as isize), domain)?;
    let mut cycles = ExactMatrix::zeros(x.dims()[j], kernel.len(), domain);
    for (c, v) in kernel.iter().enumerate() {
        for (r, e) in v.iter().enumerate() {
            cycles.set(r, c, e.clone());
        }
    }
    Ok(cycles)
}

pub fn colimit_rank_with_window(
    w: Weight,
    j: usize,
    lo: u32,
    hi: u32,
    domain: CoefficientDomain,
    window: usize,
) -> Result<ColimitTable> {
    check_level(lo)?;
    require_field(domain)?;
    if lo >= hi {
        return Err(Error::InvalidRange(format!("need lo < hi, got {lo}..{hi}")));
    }
    if j > 3 {
        return Err(Error::InvalidRange(format!("degree {j} outside 0..=3")));
    }
    let complexes: Vec<TruncatedComplex> =
        (lo..=hi).into_par_iter().map(|n| TruncatedComplex::build(w, n, domain)).collect();
    let transitions: Vec<ExactMatrix> =
        complexes[..complexes.len() - 1].par_iter().map(|x| x.transition_map().maps[j].clone()).collect();
    let boundaries: Vec<ExactMatrix> = complexes.iter().map(|x| differential(x, j as isize - 1)).collect();
    let boundary_ranks =
        boundaries.par_iter().map(|b| rank_over_field(b, domain)).collect::<Result<Vec<usize>>>()?;
    let top = complexes.len() - 1;

    // push the bottom cycles up one level at a time
    let mut survival = Vec::with_capacity(complexes.len());
    let mut pushed = cycle_matrix(&complexes[0], j, domain)?;
    for k in 0..complexes.len() {
        if k > 0 {
            pushed = transitions[k - 1].matmul(&pushed)?;
        }
        survival.push(rank_mod(&pushed, &boundaries[k], boundary_ranks[k], domain)?);
    }

    let to_top = complexes
        .par_iter()
        .enumerate()
        .map(|(k, x)| {
            let mut pushed = cycle_matrix(x, j, domain)?;
            for t in &transitions[k..] {
                pushed = t.matmul(&pushed)?;
            }
            rank_mod(&pushed, &boundaries[top], boundary_ranks[top], domain)
        })
        .collect::<Result<Vec<usize>>>()?;

    let rows: Vec<ColimitRow> = complexes
        .iter()
        .zip(survival.iter().zip(&to_top))
        .map(|(x, (&s, &t))| ColimitRow { level: x.level, survival_rank: s, rank_to_top: t })
        .collect();
    let tail: Vec<usize> = survival.iter().rev().take(window).copied().collect();
    let stabilized = window > 0 && tail.len() == window && tail.windows(2).all(|p| p[0] == p[1]);
    Ok(ColimitTable {
        weight: w,
        degree: j,
        domain,
        window,
        stable_value: stabilized.then(|| tail[0]),
        rows,
        stabilized,
    })
}

/// A cochain complex of free abelian groups `ℤ^{dims[0]} → ... → ℤ^{dims[k]}`.
#[derive(Debug, Clone)]
pub struct IntegerCochainComplex {
    pub differentials: Vec<ExactMatrix>,
}

impl IntegerCochainComplex {
    pub fn new(differentials: Vec<ExactMatrix>) -> Result<Self> {
        for (a, b) in differentials.iter().zip(differentials.iter().skip(1)) {
            if a.rows() != b.cols() {
                return Err(Error::Dimension(format!("{}x{} followed by {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
            }
            if !b.matmul(a)?.is_zero() {
                return Err(Error::NonzeroComposition);
            }
        }
        Ok(IntegerCochainComplex {
            differentials: differentials.iter().map(|d| d.reduce(CoefficientDomain::Integer)).collect(),
        })
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.differentials.iter().map(ExactMatrix::cols).collect();
        d.push(self.differentials.last().map_or(0, ExactMatrix::rows));
        d
    }

    fn padded(&self, j: isize) -> ExactMatrix {
        let dims = self.dims();
        let z = CoefficientDomain::Integer;
        if j < 0 {
            ExactMatrix::zeros(dims[0], 0, z)
        } else if j as usize >= self.differentials.len() {
            ExactMatrix::zeros(0, dims[dims.len() - 1], z)
        } else {
            self.differentials[j as usize].clone()
        }
    }

    pub fn integer_cohomology(&self) -> Result<Vec<IntegerCohomology>> {
        (0..self.dims().len() as isize)
            .map(|j| integer_cohomology(&self.padded(j - 1), &self.padded(j)))
            .collect()
    }

    pub fn field_dims(&self, domain: CoefficientDomain) -> Result<Vec<usize>> {
        let ranks = self
            .differentials
            .iter()
            .map(|d| rank_over_field(d, domain))
            .collect::<Result<Vec<_>>>()?;
        let dims = self.dims();
        Ok((0..dims.len())
            .map(|j| {
                let out = ranks.get(j).copied().unwrap_or(0);
                let inn = if j > 0 { ranks[j - 1] } else { 0 };
                dims[j] - out - inn
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UcDegree {
    pub degree: usize,
    /// `dim H^j(C ⊗ 𝔽_p)`.
    pub mod_p_dim: usize,
    pub free_rank: usize,
    pub p_torsion: usize,
    pub p_torsion_next: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UcReport {
    pub prime: u64,
    pub integer_cohomology: Vec<IntegerCohomology>,
    pub degrees: Vec<UcDegree>,
    pub holds: bool,
}

/// Checks `dim H^j(C⊗𝔽_p) = rank H^j + #p-torsion(H^j) + #p-torsion(H^{j+1})`.
///
/// The left side comes from `mod_p`, an independently built complex over
/// `𝔽_p`; the right side from Smith forms of `integral`.
pub fn universal_coefficients_between(
    integral: &IntegerCochainComplex,
    mod_p: &IntegerCochainComplex,
    p: u64,
) -> Result<UcReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let h = integral.integer_cohomology()?;
    let lhs = mod_p.field_dims(CoefficientDomain::PrimeField(p))?;
    let degrees: Vec<UcDegree> = (0..h.len())
        .map(|j| {
            let p_torsion = h[j].p_torsion_count(p);
            let p_torsion_next = h.get(j + 1).map_or(0, |g| g.p_torsion_count(p));
            UcDegree {
                degree: j,
                mod_p_dim: lhs[j],
                free_rank: h[j].free_rank,
                p_torsion,
                p_torsion_next,
                holds: lhs[j] == h[j].free_rank + p_torsion + p_torsion_next,
            }
        })
        .collect();
    let holds = degrees.iter().all(|d| d.holds);
    Ok(UcReport { prime: p, integer_cohomology: h, degrees, holds })
}

pub fn universal_coefficients_check(w: Weight, n: u32, p: u64) -> Result<UcReport> {
    check_level(n)?;
    let domain = CoefficientDomain::prime_field(p)?;
    let z = TruncatedComplex::build(w, n, CoefficientDomain::Integer);
    let fp = TruncatedComplex::build(w, n, domain);
    let integral = IntegerCochainComplex::new(z.differentials.to_vec())?;
    // the 𝔽_p build stores reduced representatives, which are valid integer lifts
    let mod_p = IntegerCochainComplex { differentials: fp.differentials.to_vec() };
    universal_coefficients_between(&integral, &mod_p, p)
}

/// `dim H^6_J(R)_w`: exponent matrices with all entries ≥ 1 and weight `-w`.
pub fn h6j_weight_dim(w: Weight) -> usize {
    weight_dim(&(-w - Weight::new(3, 3, 2, 2, 2)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct H6jRow {
    pub weight: Weight,
    pub h6j_dim: usize,
    /// Survival ranks of `H^3(lo)` by level.
    pub survival: Vec<usize>,
    /// Ranks of `H^3(n) → H^3(hi)` by level.
    pub rank_to_top: Vec<usize>,
    /// `rank_to_top` at the middle level `max(lo, hi/2)`.
    pub h3_estimate: usize,
    pub agree: bool,
}

/// Side-by-side weight dimensions of `H^6_J(R)` and colimit estimates of
/// `H^3_I(R)`. Exploratory: nothing here is asserted.
pub fn h6j_comparison(weights: &[Weight], lo: u32, hi: u32, domain: CoefficientDomain) -> Result<Vec<H6jRow>> {
    weights
        .par_iter()
        .map(|&w| {
            let t = colimit_rank(w, 3, lo, hi, domain)?;
            let h6j_dim = h6j_weight_dim(w);
            let mid = lo.max(hi / 2);
            let h3_estimate = t.rows.iter().find(|r| r.level == mid).map_or(0, |r| r.rank_to_top);
            Ok(H6jRow {
                weight: w,
                h6j_dim,
                survival: t.rows.iter().map(|r| r.survival_rank).collect(),
                rank_to_top: t.rows.iter().map(|r| r.rank_to_top).collect(),
                h3_estimate,
                agree: h3_estimate == h6j_dim,
            })
        })
        .collect()
}

/// Weights near `w*` used by the default comparison table.
pub fn default_h6j_weights() -> Vec<Weight> {
    vec![
        W_STAR,
        Weight::new(-4, -3, -3, -2, -2),
        Weight::new(-3, -4, -2, -3, -2),
        Weight::new(-4, -4, -3, -3, -2),
        Weight::new(-4, -4, -2, -3, -3),
        Weight::new(-5, -3, -3, -3, -2),
        Weight::new(-4, -3, -2, -2, -3),
        Weight::new(-2, -3, -2, -2, -1),
        Weight::new(-3, -3, -4, -1, -1),
        Weight::ZERO,
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityRow {
    pub level: u32,
    /// Smallest `m` with `m/(f1·f2·f3)` an integral boundary; `None` if not a rational boundary.
    pub index: Option<String>,
    pub prime_factors: Vec<u64>,
}

fn prime_factors(m: &BigInt) -> Vec<u64> {
    use num_traits::ToPrimitive;
    let mut m = m.clone();
    let mut out = Vec::new();
    let mut d = 2u64;
    while !m.is_one() && !m.is_zero() && d < 1_000_000 {
        let bd = BigInt::from(d);
        if (&m % &bd).is_zero() {
            out.push(d);
            while (&m % &bd).is_zero() {
                m /= &bd;
            }
        }
        d += 1;
    }
    if !m.is_one() && !m.is_zero() {
        // leftover cofactor beyond trial division
        out.push(m.to_u64().unwrap_or(u64::MAX));
    }
    out
}

pub fn divisibility_trace(lo: u32, hi: u32) -> Result<Vec<DivisibilityRow>> {
    check_level(lo)?;
    if lo > hi {
        return Err(Error::InvalidRange(format!("empty level range {lo}..{hi}")));
    }
    (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let idx = class_divisibility_index(n)?;
            Ok(DivisibilityRow {
                level: n,
                prime_factors: idx.as_ref().map(prime_factors).unwrap_or_default(),
                index: idx.map(|m| m.to_string()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank_over_field;
    use CoefficientDomain::*;

    #[test]
    fn witness_weight_level_one() {
        let q = cohomology(W_STAR, 1, Rational).unwrap();
        assert_eq!(q.dims, [0, 0, 0, 1]);
        assert_eq!(q.h(), [0, 0, 0, 1]);
        let z = cohomology(W_STAR, 1, Integer).unwrap();
        assert_eq!(z.cohomology[3], DegreeCohomology::Integer(IntegerCohomology { free_rank: 1, torsion: vec![] }));
        assert!(matches!(cohomology(W_STAR, 0, Rational), Err(Error::InvalidRange(_))));
    }

    #[test]
    fn h0_vanishes_and_euler_characteristic() {
        for w in [W_STAR, Weight::ZERO, Weight::new(-2, -1, -1, -1, -1), Weight::new(-1, -1, -1, -1, 0)] {
            for n in 1..=3 {
                for dom in [Rational, PrimeField(2), PrimeField(3)] {
                    let r = cohomology(w, n, dom).unwrap();
                    let h = r.h();
                    assert_eq!(h[0], 0);
                    let chi_h: i64 = (0..4).map(|j| if j % 2 == 0 { h[j] as i64 } else { -(h[j] as i64) }).sum();
                    let chi_c: i64 = (0..4).map(|j| if j % 2 == 0 { r.dims[j] as i64 } else { -(r.dims[j] as i64) }).sum();
                    assert_eq!(chi_h, chi_c);
                }
            }
        }
    }

    #[test]
    fn class_membership_small_levels() {
        assert!(!class_in_image(1, PrimeField(2)).unwrap());
        assert!(!class_in_image(1, Rational).unwrap());
        assert!(matches!(class_in_image(1, Integer), Err(Error::NotAField(_))));
        for n in 2..=3 {
            let x = TruncatedComplex::build(W_STAR, n, Rational);
            let v = canonical_class_vector(n, Rational);
            let d2 = &x.differentials[2];
            let aug = d2.hconcat(&ExactMatrix::column_vector(&v, Rational)).unwrap();
            let independent = rank_over_field(d2, Rational).unwrap() < rank_over_field(&aug, Rational).unwrap();
            assert_eq!(class_in_image(n, Rational).unwrap(), !independent);
            assert!(!class_in_integer_image(n).unwrap());
        }
    }

    #[test]
    fn death_level_preconditions() {
        assert_eq!(death_level(4, 3), Err(Error::NotPrime(4)));
        assert!(matches!(death_level(2, 0), Err(Error::InvalidRange(_))));
    }

    #[test]
    fn colimit_degree_zero_vanishes() {
        for dom in [Rational, PrimeField(2)] {
            let t = colimit_rank(Weight::ZERO, 0, 1, 4, dom).unwrap();
            assert!(t.rows.iter().all(|r| r.survival_rank == 0 && r.rank_to_top == 0));
            assert!(t.stabilized);
        }
        assert!(matches!(colimit_rank(W_STAR, 3, 3, 3, Rational), Err(Error::InvalidRange(_))));
    }

    #[test]
    fn uc_on_multiplication_by_p() {
        let z = |rows: &[Vec<i64>]| ExactMatrix::from_rows(rows, Integer);
        // 0 -> Z --x5--> Z -> 0
        let c = IntegerCochainComplex::new(vec![z(&[vec![5]])]).unwrap();
        let r = universal_coefficients_between(&c, &c, 5).unwrap();
        assert!(r.holds);
        assert_eq!(r.degrees.iter().map(|d| d.mod_p_dim).collect::<Vec<_>>(), vec![1, 1]);
        assert_eq!(r.integer_cohomology[1].torsion, vec![BigInt::from(5)]);
        assert_eq!(r.integer_cohomology[0].free_rank, 0);
        let r = universal_coefficients_between(&c, &c, 2).unwrap();
        assert!(r.holds);
        assert_eq!(r.degrees.iter().map(|d| d.mod_p_dim).collect::<Vec<_>>(), vec![0, 0]);
    }

    #[test]
    fn uc_at_witness_weight() {
        let r = universal_coefficients_check(W_STAR, 1, 2).unwrap();
        assert!(r.holds);
        assert_eq!(r.degrees[3].mod_p_dim, 1);
        assert_eq!(r.degrees[3].free_rank, 1);
    }

    #[test]
    fn h6j_dims() {
        assert_eq!(h6j_weight_dim(W_STAR), 1);
        assert_eq!(h6j_weight_dim(Weight::ZERO), 0);
        // -w - (3,3;2,2,2) = (1,0;1,0,0): only X11
        assert_eq!(h6j_weight_dim(Weight::new(-4, -3, -3, -2, -2)), 1);
    }

    #[test]
    fn factorization() {
        assert_eq!(prime_factors(&BigInt::from(360)), vec![2, 3, 5]);
        assert!(prime_factors(&BigInt::from(1)).is_empty());
    }
}
