//! Brute-force counting of form-preserving maps `L → M` over truncated rings,
//! the independent ground truth for densities at tiny parameters.
//!
//! A map is a matrix `A` with coordinates in `O_F/(π^e)`, `e = 2d + c`, where
//! `c = max(0, -min val(M))` absorbs a non-integral target such as
//! `M ⊥ H^k`. After scaling both forms by `p^s`, `s = ceil(c/2)`, the form
//! is integral and a map is counted when `p^s A^T G_M conj(A) ≡ p^s G_L`
//! modulo `p^{d+s}`; this refines "equal modulo `p^d`" to the full hermitian
//! Gram (trace and `π` parts). The normalized count is
//! `count / q^{e·m·n - d·n² - n(n-1)/2}`: the volume of the solution set
//! divided by the volume of `p^d Herm_n`, where `Herm_n` carries the measure
//! whose off-diagonal entries are normalized on `π O_F`. For `c = 0` the
//! depth-dependent part of the exponent is `d·n(2m - n)`.

mod fourier;
pub mod modular;
pub mod truncated;

use crate::arith::{ipow, Int, Rat};
use crate::error::{Error, Result};
use crate::hermitian_lattice::{FElement, GramMatrix};
use crate::q_combinatorics::QValue;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

pub use truncated::{TruncatedElement, TruncatedRing};

/// Refuse enumerations (or Fourier work estimates) above this size.
pub const CANDIDATE_LIMIT: u64 = 1 << 34;

/// Largest column list kept in memory by the enumeration.
pub const MATERIALIZE_LIMIT: u64 = 1 << 22;

/// `x mod p^k` for `x ∈ Z_(p)`; `None` when the denominator is divisible by `p`.
fn rat_residue(x: &Rat, p: u64, modulus: u64) -> Option<u64> {
    let m = BigInt::from(modulus);
    let den = x.denom().mod_floor(&m);
    if (x.denom() % p).is_zero() {
        return None;
    }
    // modulus is a power of p, so the unit group has order φ(modulus)
    let phi = modulus / p * (p - 1);
    let inv = den.modpow(&BigInt::from(phi - 1), &m);
    (x.numer() * inv).mod_floor(&m).to_u64()
}

fn felement_residue(x: &FElement, p: u64, modulus: u64) -> Option<(u64, u64)> {
    Some((rat_residue(&x.a, p, modulus)?, rat_residue(&x.b, p, modulus)?))
}

/// Arithmetic in `O_F/(p^D)` on raw residue pairs.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RawRing {
    pub p: u64,
    pub modulus: u64,
}

impl RawRing {
    #[inline]
    pub fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let m = self.modulus as u128;
        let (a1, b1, a2, b2) = (x.0 as u128, x.1 as u128, y.0 as u128, y.1 as u128);
        let a = (a1 * a2 + self.p as u128 * (b1 * b2 % m)) % m;
        let b = (a1 * b2 + a2 * b1) % m;
        (a as u64, b as u64)
    }

    #[inline]
    pub fn add(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        ((x.0 + y.0) % self.modulus, (x.1 + y.1) % self.modulus)
    }

    #[inline]
    pub fn conj(&self, x: (u64, u64)) -> (u64, u64) {
        (x.0, (self.modulus - x.1) % self.modulus)
    }
}

/// A counting problem `L → M` at depth `d`, after scaling and reduction.
#[derive(Clone, Debug)]
pub struct CountSetup {
    pub p: u64,
    pub n: usize,
    pub m: usize,
    pub d: u32,
    /// Extra coordinate precision for a non-integral target.
    pub c: u32,
    /// Scaling exponent: both forms are multiplied by `p^s`.
    pub s: u32,
    /// Coordinate precision `e = 2d + c`.
    pub e: u32,
    pub(crate) ring: RawRing,
    /// `p^s G_M` as residues mod `p^{d+s}`.
    pub(crate) gram: Vec<Vec<(u64, u64)>>,
    /// `p^s G_L` as residues, or `None` if it is not integral.
    pub(crate) target: Option<Vec<Vec<(u64, u64)>>>,
    pub(crate) zero_pattern: Vec<Vec<bool>>,
    pub(crate) vals: Vec<Vec<Option<i64>>>,
}

impl CountSetup {
    pub fn new(l: &GramMatrix, m: &GramMatrix, d: u32, q: QValue) -> Result<Self> {
        let p = q.get();
        if !q.is_prime() {
            return Err(Error::InvalidInput(format!("the oracle needs q prime, got {p}")));
        }
        if l.p() != p || m.p() != p {
            return Err(Error::InvalidInput("Gram matrices were built for a different q".into()));
        }
        if d == 0 {
            return Err(Error::InvalidInput("depth must be positive".into()));
        }
        let min_val = m.min_entry_val().ok_or(Error::Degenerate)?;
        let c = (-min_val).max(0) as u32;
        let s = c.div_ceil(2);
        let big_d = d + s;
        let modulus = p.checked_pow(big_d).filter(|&x| x < (1 << 40)).ok_or(Error::Budget {
            needed: format!("{p}^{big_d}"),
            limit: "2^40 residue modulus".into(),
        })?;
        let scale = FElement::pi_pow(2 * s as i64, p);
        let scaled = |g: &GramMatrix| -> Vec<Vec<Option<(u64, u64)>>> {
            g.rows().iter().map(|r| r.iter().map(|x| felement_residue(&(x * &scale), p, modulus)).collect()).collect()
        };
        let gram: Vec<Vec<(u64, u64)>> = scaled(m)
            .into_iter()
            .map(|r| r.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Consistency("scaled target Gram is not integral".into()))?;
        let target = scaled(l).into_iter().map(|r| r.into_iter().collect::<Option<Vec<_>>>()).collect::<Option<Vec<_>>>();
        let zero_pattern = m.rows().iter().map(|r| r.iter().map(|x| x.is_zero()).collect()).collect();
        let vals = m.rows().iter().map(|r| r.iter().map(|x| x.val().map(|v| v + 2 * s as i64)).collect()).collect();
        Ok(CountSetup {
            p,
            n: l.dim(),
            m: m.dim(),
            d,
            c,
            s,
            e: 2 * d + c,
            ring: RawRing { p, modulus },
            gram,
            target,
            zero_pattern,
            vals,
        })
    }

    /// Size of the coordinate ring `O_F/(π^e)`.
    pub fn coord_size(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// Number of candidate matrices, saturating.
    pub fn candidates(&self) -> Option<u64> {
        self.coord_size().checked_pow((self.m * self.n) as u32)
    }

    /// Exponent `N` with `normalized = count / q^N`.
    pub fn normalization_exponent(&self) -> i64 {
        let (m, n) = (self.m as i64, self.n as i64);
        self.e as i64 * m * n - self.d as i64 * n * n - n * (n - 1) / 2
    }

    pub fn normalize(&self, count: &Int) -> Rat {
        Rat::new(count.clone(), Int::from(1)) / crate::arith::qpow(self.p, self.normalization_exponent())
    }

    /// Coordinate of `O_F/(π^e)` with index `i`, lifted to residues mod `p^{d+s}`.
    #[inline]
    pub(crate) fn coord(&self, i: u64) -> (u64, u64) {
        let ma = self.p.pow(self.e.div_ceil(2));
        (i % ma, i / ma)
    }

    /// `p^s (x, y)` for coordinate vectors restricted to the index set `idx`.
    #[inline]
    pub(crate) fn pair_on(&self, idx: &[usize], x: &[(u64, u64)], y: &[(u64, u64)]) -> (u64, u64) {
        let r = self.ring;
        let mut acc = (0, 0);
        for (u, &k) in idx.iter().enumerate() {
            for (v, &l) in idx.iter().enumerate() {
                if self.zero_pattern[k][l] {
                    continue;
                }
                acc = r.add(acc, r.mul(r.mul(x[u], self.gram[k][l]), r.conj(y[v])));
            }
        }
        acc
    }

    fn residue_vector(&self, x: &[(u64, u64)]) -> Vec<u64> {
        x.iter().map(|c| c.0 % self.p).collect()
    }
}

/// Rank over `F_p` of a list of vectors.
fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] % p != 0) else { continue };
        rows.swap(rank, piv);
        let inv = modular::pow_mod(rows[rank][col], p - 2, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] % p != 0 {
                let f = rows[r][col] * inv % p;
                for c2 in 0..cols {
                    rows[r][c2] = (rows[r][c2] + p * p - f * rows[rank][c2] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exhaustive enumeration, column by column with pruning on the diagonal.
pub fn herm_count_enumerate(setup: &CountSetup, primitive: bool) -> Result<Int> {
    let needed = setup.candidates();
    if needed.map_or(true, |x| x > CANDIDATE_LIMIT) {
        return Err(Error::Budget {
            needed: needed.map_or_else(|| format!("{}^{}", setup.coord_size(), setup.m * setup.n), |x| x.to_string()),
            limit: CANDIDATE_LIMIT.to_string(),
        });
    }
    let Some(target) = &setup.target else { return Ok(Int::zero()) };
    let (n, m) = (setup.n, setup.m);
    let all: Vec<usize> = (0..m).collect();
    let per_vec = setup.coord_size().pow(m as u32);
    let decode = |mut idx: u64| -> Vec<(u64, u64)> {
        (0..m)
            .map(|_| {
                let c = setup.coord(idx % setup.coord_size());
                idx /= setup.coord_size();
                c
            })
            .collect()
    };
    // later columns are materialized, the first one is streamed
    if n > 1 && per_vec > MATERIALIZE_LIMIT {
        return Err(Error::Budget { needed: format!("{per_vec} stored vectors"), limit: MATERIALIZE_LIMIT.to_string() });
    }
    let columns: Vec<Vec<Vec<(u64, u64)>>> = (1..n)
        .map(|j| {
            (0..per_vec)
                .into_par_iter()
                .map(decode)
                .filter(|x| setup.pair_on(&all, x, x) == target[j][j])
                .collect()
        })
        .collect();
    fn extend(
        setup: &CountSetup,
        all: &[usize],
        target: &[Vec<(u64, u64)>],
        columns: &[Vec<Vec<(u64, u64)>>],
        chosen: &mut Vec<Vec<(u64, u64)>>,
        primitive: bool,
    ) -> u64 {
        let j = chosen.len();
        if j == columns.len() + 1 {
            if primitive {
                let rows = chosen.iter().map(|x| setup.residue_vector(x)).collect();
                return (rank_mod_p(rows, setup.p) == j) as u64;
            }
            return 1;
        }
        let mut total = 0;
        for y in &columns[j - 1] {
            if (0..j).all(|i| setup.pair_on(all, &chosen[i], y) == target[i][j]) {
                chosen.push(y.clone());
                total += extend(setup, all, target, columns, chosen, primitive);
                chosen.pop();
            }
        }
        total
    }
    if n == 0 {
        return Ok(Int::from(1));
    }
    let total: u64 = (0..per_vec)
        .into_par_iter()
        .map(decode)
        .filter(|x| setup.pair_on(&all, x, x) == target[0][0])
        .map(|x| {
            let mut chosen = vec![x];
            extend(setup, &all, target, &columns, &mut chosen, primitive)
        })
        .sum();
    Ok(Int::from(total))
}

/// Number of form-preserving maps `L → M` at depth `d` (see the module docs
/// for the precision convention), optionally restricted to primitive maps.
pub fn herm_count(l: &GramMatrix, m: &GramMatrix, d: u32, primitive: bool, q: QValue) -> Result<Int> {
    let setup = CountSetup::new(l, m, d, q)?;
    if primitive {
        herm_count_enumerate(&setup, true)
    } else {
        fourier::herm_count_fourier(&setup)
    }
}

/// One depth of an oracle run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleRecord {
    pub d: u32,
    #[serde(serialize_with = "crate::arith::serialize_int")]
    pub count: Int,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub normalized: Rat,
}

/// A stabilized oracle value with its trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub value: Rat,
    pub trace: Vec<OracleRecord>,
}

/// `H = H_{-1}`: Gram `[[0, π^{-1}], [-π^{-1}, 0]]`.
pub fn hyperbolic_minus_one(p: u64) -> GramMatrix {
    let x = FElement::pi_pow(-1, p);
    let z = FElement::zero(p);
    GramMatrix::new(vec![vec![z.clone(), x.clone()], vec![x.conj(), z]], p).expect("hermitian")
}

/// `M ⊥ H^k`.
pub fn with_hyperbolic(m: &GramMatrix, k: u32) -> GramMatrix {
    (0..k).fold(m.clone(), |acc, _| acc.orthogonal_sum(&hyperbolic_minus_one(m.p())))
}

fn stabilize(
    l: &GramMatrix,
    target: &GramMatrix,
    max_depth: u32,
    q: QValue,
    primitive: bool,
) -> Result<OracleResult> {
    let mut trace: Vec<OracleRecord> = Vec::new();
    for d in 1..=max_depth {
        let setup = CountSetup::new(l, target, d, q)?;
        let count = if primitive { herm_count_enumerate(&setup, true)? } else { fourier::herm_count_fourier(&setup)? };
        let normalized = setup.normalize(&count);
        let stable = trace.last().is_some_and(|r| r.normalized == normalized);
        trace.push(OracleRecord { d, count, normalized: normalized.clone() });
        if stable {
            return Ok(OracleResult { value: normalized, trace });
        }
    }
    let text = trace.iter().map(|r| format!("d={}:{}", r.d, crate::arith::rat_string(&r.normalized))).collect::<Vec<_>>();
    Err(Error::NoStabilization { depth: max_depth, trace: text.join(",") })
}

/// `Den(M ⊥ H^k, L)` as the stabilized normalized count over depths `1..=max_depth`.
pub fn den_oracle(m: &GramMatrix, l: &GramMatrix, k: u32, max_depth: u32, q: QValue) -> Result<OracleResult> {
    if k > 2 {
        return Err(Error::InvalidInput("the oracle supports k <= 2".into()));
    }
    stabilize(l, &with_hyperbolic(m, k), max_depth, q, false)
}

/// Primitive version: only maps whose reduction mod `π` has full rank.
pub fn pden_oracle(m: &GramMatrix, l: &GramMatrix, k: u32, max_depth: u32, q: QValue) -> Result<OracleResult> {
    stabilize(l, &with_hyperbolic(m, k), max_depth, q, true)
}

/// `q^e` as an integer; used by callers that report candidate sizes.
pub fn candidate_space(q: u64, e: u32) -> Int {
    ipow(q, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian_lattice::GenusSymbol;

    fn q3() -> QValue {
        QValue::new(3).unwrap()
    }

    fn gram(s: &str) -> GramMatrix {
        s.parse::<GenusSymbol>().unwrap().gram(3)
    }

    #[test]
    fn rank_one_counts() {
        let one = gram("0^1+");
        assert_eq!(herm_count(&one, &one, 1, false, q3()).unwrap(), Int::from(6));
        // a² - 3b² ≡ 1 mod 9 has 2 solutions in a for each of the 9 values of b
        assert_eq!(herm_count(&one, &one, 2, false, q3()).unwrap(), Int::from(18));
        let s = CountSetup::new(&one, &one, 2, q3()).unwrap();
        assert_eq!(herm_count_enumerate(&s, false).unwrap(), Int::from(18));
    }

    #[test]
    fn budget_guard() {
        let big = gram("0^4+");
        let s = CountSetup::new(&big, &big, 3, q3()).unwrap();
        assert!(matches!(herm_count_enumerate(&s, false), Err(Error::Budget { .. })));
    }

    #[test]
    fn self_density_of_rank_one() {
        let one = gram("0^1+");
        let r = den_oracle(&one, &one, 0, 3, q3()).unwrap();
        assert_eq!(r.value, crate::arith::rat(2));
    }
}
