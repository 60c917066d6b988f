//! Concrete lattices inside a hermitian space and finite enumerations over them.
//!
//! Overlattices are enumerated in a Jordan ("normal") basis `e_i` of the base
//! lattice `L`, where `L^♯ = ⊕ π^{-a_i} O_F e_i`. Every overlattice has a unique
//! row Hermite normal form: upper triangular, pivot `π^{-k_i}` in row `i`, and
//! entry `(i, j)` a digit expansion reduced modulo `π^{-k_j}`. Rows are chosen
//! bottom-up and pruned as soon as a pairing violates the constraint.

use super::felement::FElement;
use super::genus::GenusSymbol;
use super::gram::GramMatrix;
use super::jordan::{jordan_decompose, JordanDecomposition};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// A lattice given by basis rows in the coordinates of an ambient Gram matrix.
#[derive(Clone, Debug)]
pub struct AmbientLattice {
    pub gram: GramMatrix,
    pub basis: Vec<Vec<FElement>>,
    pub symbol: GenusSymbol,
}

impl AmbientLattice {
    /// The lattice spanned by the coordinate basis of `gram`.
    pub fn from_gram(gram: GramMatrix) -> Result<Self> {
        let p = gram.p();
        let n = gram.dim();
        let basis = identity(n, p);
        let symbol = jordan_decompose(&gram)?.symbol;
        Ok(AmbientLattice { gram, basis, symbol })
    }

    /// Realizes a genus symbol by its normal form Gram over `F_p`.
    pub fn from_symbol(symbol: &GenusSymbol, p: u64) -> Self {
        let gram = symbol.gram(p);
        let n = gram.dim();
        AmbientLattice { gram, basis: identity(n, p), symbol: symbol.clone() }
    }

    pub fn from_basis(gram: GramMatrix, basis: Vec<Vec<FElement>>) -> Result<Self> {
        let symbol = jordan_decompose(&gram.restrict(&basis))?.symbol;
        Ok(AmbientLattice { gram, basis, symbol })
    }

    pub fn p(&self) -> u64 {
        self.gram.p()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Gram matrix of the lattice's own basis.
    pub fn lattice_gram(&self) -> GramMatrix {
        self.gram.restrict(&self.basis)
    }

    pub fn frame(&self) -> Result<NormalFrame> {
        NormalFrame::new(self)
    }
}

pub(crate) fn identity(n: usize, p: u64) -> Vec<Vec<FElement>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { FElement::one(p) } else { FElement::zero(p) }).collect())
        .collect()
}

/// Jordan basis of a lattice together with its block diagonal Gram.
#[derive(Clone, Debug)]
pub struct NormalFrame {
    pub p: u64,
    /// Scale of each coordinate.
    pub scales: Vec<i64>,
    /// First index of the Jordan piece containing each coordinate.
    pub piece_start: Vec<usize>,
    pub gram: GramMatrix,
    /// Normal basis vectors in ambient coordinates.
    pub to_ambient: Vec<Vec<FElement>>,
    pub symbol: GenusSymbol,
}

impl NormalFrame {
    pub fn new(l: &AmbientLattice) -> Result<Self> {
        let d = jordan_decompose(&l.lattice_gram())?;
        Ok(Self::from_decomposition(d, &l.basis, l.p()))
    }

    fn from_decomposition(d: JordanDecomposition, lattice_basis: &[Vec<FElement>], p: u64) -> Self {
        let scales = d.coordinate_scales();
        let mut piece_start = vec![0; scales.len()];
        for pc in &d.pieces {
            for &i in &pc.indices {
                piece_start[i] = pc.indices[0];
            }
        }
        let to_ambient = d.basis.iter().map(|row| combine(row, lattice_basis, p)).collect();
        NormalFrame { p, scales, piece_start, gram: d.gram, to_ambient, symbol: d.symbol }
    }

    pub fn dim(&self) -> usize {
        self.scales.len()
    }

    /// Convert frame coordinates to ambient coordinates.
    pub fn to_ambient_coords(&self, v: &[FElement]) -> Vec<FElement> {
        combine(v, &self.to_ambient, self.p)
    }
}

/// `Σ v_i rows_i`.
pub(crate) fn combine(v: &[FElement], rows: &[Vec<FElement>], p: u64) -> Vec<FElement> {
    let m = rows.first().map_or(0, |r| r.len());
    let mut out = vec![FElement::zero(p); m];
    for (c, r) in v.iter().zip(rows) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(r) {
            if !x.is_zero() {
                *o = &*o + &(c * x);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OverlatticeConstraint {
    /// `L' ⊆ L'^♯`.
    Integral,
    /// All fundamental invariants `>= -1`; the support of primitive densities.
    MinInvariantMinusOne,
    /// `L ⊆ L' ⊆ π^{-1} L`.
    InsidePiInverse,
}

/// An overlattice in frame coordinates.
#[derive(Clone, Debug)]
pub struct FrameOverlattice {
    pub rows: Vec<Vec<FElement>>,
    /// `ℓ(L'/L)`, the `O_F`-length of the quotient.
    pub length: u32,
    pub symbol: GenusSymbol,
}

/// All overlattices of the frame's lattice satisfying the constraint.
pub fn enumerate_overlattices(frame: &NormalFrame, constraint: OverlatticeConstraint) -> Vec<FrameOverlattice> {
    let n = frame.dim();
    let (bounds, gram_bound): (Vec<i64>, Option<i64>) = match constraint {
        OverlatticeConstraint::Integral => (frame.scales.clone(), Some(0)),
        OverlatticeConstraint::MinInvariantMinusOne => (frame.scales.iter().map(|a| a + 1).collect(), Some(-1)),
        OverlatticeConstraint::InsidePiInverse => (vec![1; n], None),
    };
    if bounds.iter().any(|&b| b < 0) {
        return Vec::new();
    }
    let mut state = Search {
        frame,
        bounds,
        gram_bound,
        rows: vec![Vec::new(); n],
        ks: vec![0; n],
        reps: HashMap::new(),
        out: Vec::new(),
    };
    if n > 0 {
        state.row(n - 1);
    } else {
        state.out.push(FrameOverlattice { rows: Vec::new(), length: 0, symbol: GenusSymbol::empty() });
    }
    state.out
}

struct Search<'a> {
    frame: &'a NormalFrame,
    bounds: Vec<i64>,
    gram_bound: Option<i64>,
    rows: Vec<Vec<FElement>>,
    ks: Vec<i64>,
    reps: HashMap<(i64, i64), Arc<Vec<FElement>>>,
    out: Vec<FrameOverlattice>,
}

impl Search<'_> {
    fn reps(&mut self, lo: i64, hi: i64) -> Arc<Vec<FElement>> {
        let p = self.frame.p;
        self.reps
            .entry((lo, hi))
            .or_insert_with(|| Arc::new(FElement::digit_representatives(lo, hi, p)))
            .clone()
    }

    fn ok(&self, x: &FElement) -> bool {
        self.gram_bound.map_or(true, |b| x.val_at_least(b))
    }

    fn row(&mut self, i: usize) {
        let n = self.frame.dim();
        let p = self.frame.p;
        for k in 0..=self.bounds[i] {
            let mut r = vec![FElement::zero(p); n];
            r[i] = FElement::pi_pow(-k, p);
            self.ks[i] = k;
            self.fill(i, n, r);
        }
    }

    /// Choose entries `(i, l)` for `l` from the right; `upto` is the last filled index.
    fn fill(&mut self, i: usize, upto: usize, r: Vec<FElement>) {
        let n = self.frame.dim();
        if upto == i + 1 {
            self.finish_row(i, r);
            return;
        }
        let l = upto - 1;
        let reps = self.reps(-self.bounds[l], -self.ks[l]);
        for x in reps.iter() {
            let mut r2 = r.clone();
            r2[l] = x.clone();
            // pairings with rows j whose support only meets filled coordinates
            let mut good = true;
            if self.gram_bound.is_some() {
                for j in (i + 1)..n {
                    let need = self.frame.piece_start[j].max(i + 1);
                    if need == l {
                        let v = self.frame.gram.pair(&r2, &self.rows[j]);
                        if !self.ok(&v) {
                            good = false;
                            break;
                        }
                    }
                }
            }
            if good {
                self.fill(i, l, r2);
            }
        }
    }

    fn finish_row(&mut self, i: usize, r: Vec<FElement>) {
        let n = self.frame.dim();
        let p = self.frame.p;
        if !self.ok(&self.frame.gram.pair(&r, &r)) {
            return;
        }
        // e_i must lie in the lattice: π^{k_i} r - e_i ∈ span of lower rows
        let pk = FElement::pi_pow(self.ks[i], p);
        let mut y: Vec<FElement> = r.iter().map(|x| &pk * x).collect();
        y[i] = FElement::zero(p);
        for j in (i + 1)..n {
            if y[j].is_zero() {
                continue;
            }
            let c = &y[j] * &FElement::pi_pow(self.ks[j], p);
            if !c.is_integral() {
                return;
            }
            for t in j..n {
                if !self.rows[j][t].is_zero() {
                    y[t] = &y[t] - &(&c * &self.rows[j][t]);
                }
            }
        }
        self.rows[i] = r;
        if i == 0 {
            self.record();
        } else {
            self.row(i - 1);
        }
    }

    fn record(&mut self) {
        let g = self.frame.gram.restrict(&self.rows);
        let symbol = jordan_decompose(&g).expect("overlattice of a nondegenerate lattice").symbol;
        let length = self.ks.iter().sum::<i64>() as u32;
        self.out.push(FrameOverlattice { rows: self.rows.clone(), length, symbol });
    }
}

/// An overlattice in ambient coordinates.
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: AmbientLattice,
    pub length: u32,
}

/// Overlattices of `l` under the constraint, optionally only those isometric to `iso_filter`.
pub fn overlattices(
    l: &AmbientLattice,
    constraint: OverlatticeConstraint,
    iso_filter: Option<&GenusSymbol>,
) -> Result<Vec<Overlattice>> {
    let frame = l.frame()?;
    let found = enumerate_overlattices(&frame, constraint);
    Ok(found
        .into_iter()
        .filter(|o| iso_filter.map_or(true, |s| &o.symbol == s))
        .map(|o| {
            let basis = o.rows.iter().map(|r| frame.to_ambient_coords(r)).collect();
            Overlattice {
                lattice: AmbientLattice { gram: l.gram.clone(), basis, symbol: o.symbol },
                length: o.length,
            }
        })
        .collect())
}

/// Multiset of `(symbol, length)` over overlattices; depends only on the symbol of `L`.
pub type OverlatticeProfile = Vec<(GenusSymbol, u32, u64)>;

type ProfileKey = (GenusSymbol, OverlatticeConstraint, u64);

fn profile_cache() -> &'static Mutex<HashMap<ProfileKey, Arc<OverlatticeProfile>>> {
    static CACHE: OnceLock<Mutex<HashMap<ProfileKey, Arc<OverlatticeProfile>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached overlattice profile of a genus symbol, realized over `F_p`.
pub fn overlattice_profile(symbol: &GenusSymbol, constraint: OverlatticeConstraint, p: u64) -> Arc<OverlatticeProfile> {
    let key = (symbol.clone(), constraint, p);
    if let Some(v) = profile_cache().lock().unwrap().get(&key) {
        return v.clone();
    }
    let l = AmbientLattice::from_symbol(symbol, p);
    let frame = l.frame().expect("normal form is nondegenerate");
    let mut counts: HashMap<(GenusSymbol, u32), u64> = HashMap::new();
    for o in enumerate_overlattices(&frame, constraint) {
        *counts.entry((o.symbol, o.length)).or_default() += 1;
    }
    let mut prof: OverlatticeProfile = counts.into_iter().map(|((s, l), c)| (s, l, c)).collect();
    prof.sort();
    let prof = Arc::new(prof);
    profile_cache().lock().unwrap().insert(key, prof.clone());
    prof
}

/// `n(M, L)`: number of overlattices of `L` isometric to `M`.
pub fn count_isometric_overlattices(m: &GenusSymbol, l: &GenusSymbol, p: u64) -> u64 {
    let constraint = if m.is_integral() {
        OverlatticeConstraint::Integral
    } else if m.invariants().first().is_some_and(|&a| a >= -1) {
        OverlatticeConstraint::MinInvariantMinusOne
    } else {
        // Generic bound: M ⊆ M^♯·π^{-a}; not needed for the lattices used here.
        panic!("n(M, L) implemented for invariants >= -1 only");
    };
    overlattice_profile(l, constraint, p)
        .iter()
        .filter(|(s, _, _)| s == m)
        .map(|(_, _, c)| c)
        .sum()
}

/// Row echelon form over `O_F` (pivot of minimal valuation in each column).
/// Rows that become zero are dropped.
pub fn echelon(mut rows: Vec<Vec<FElement>>) -> Vec<Vec<FElement>> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    for c in 0..cols {
        let best = rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r[c].val().map(|v| (v, i)))
            .min();
        let Some((_, bi)) = best else { continue };
        let piv = rows.swap_remove(bi);
        let inv = piv[c].inv();
        for r in rows.iter_mut() {
            if r[c].is_zero() {
                continue;
            }
            let f = &r[c] * &inv;
            for t in c..cols {
                if !piv[t].is_zero() {
                    r[t] = &r[t] - &(&f * &piv[t]);
                }
            }
        }
        out.push(piv);
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    out
}

/// Basis of `L ∩ span(e_j : j != col)` for a full rank lattice given by `rows`.
pub fn intersect_coordinate_hyperplane(rows: &[Vec<FElement>], col: usize) -> Vec<Vec<FElement>> {
    let n = rows.first().map_or(0, |r| r.len());
    let perm: Vec<usize> = std::iter::once(col).chain((0..n).filter(|&j| j != col)).collect();
    let permuted: Vec<Vec<FElement>> = rows.iter().map(|r| perm.iter().map(|&j| r[j].clone()).collect()).collect();
    let ech = echelon(permuted);
    ech.into_iter()
        .filter(|r| r[0].is_zero())
        .map(|r| {
            let mut back = vec![FElement::zero(r[0].p()); n];
            for (pos, &j) in perm.iter().enumerate() {
                back[j] = r[pos].clone();
            }
            back
        })
        .collect()
}

/// Coset representatives of `π^{shift} L^♯ / L` in frame coordinates.
pub fn dual_coset_representatives(frame: &NormalFrame, shift: i64) -> Result<Vec<Vec<FElement>>> {
    if frame.scales.iter().any(|&a| a < 0) {
        return Err(Error::NonIntegral);
    }
    let p = frame.p;
    let mut out = vec![Vec::new()];
    for &a in &frame.scales {
        let reps = FElement::digit_representatives(shift - a, 0, p);
        out = out
            .into_iter()
            .flat_map(|v: Vec<FElement>| {
                reps.iter().map(move |x| {
                    let mut w = v.clone();
                    w.push(x.clone());
                    w
                })
            })
            .collect();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian_lattice::genus::enumerate_symbols;

    fn sym(s: &str) -> GenusSymbol {
        s.parse().unwrap()
    }

    #[test]
    fn unimodular_has_no_proper_integral_overlattice() {
        for n in 1..=4 {
            for e in [1, -1] {
                let prof = overlattice_profile(&GenusSymbol::unimodular(n, e), OverlatticeConstraint::Integral, 3);
                assert_eq!(prof.len(), 1);
                assert_eq!(prof[0].1, 0);
            }
        }
    }

    #[test]
    fn rank_one_unimodular_overlattice() {
        for p in [3, 5] {
            for e in [1, -1] {
                // scaling by π^{-1} multiplies the form by -1/p
                let l = sym(if e == 1 { "2^1+" } else { "2^1-" });
                let e2 = e * crate::arith::legendre_minus_one(p);
                assert_eq!(count_isometric_overlattices(&GenusSymbol::unimodular(1, e2), &l, p), 1);
                assert_eq!(count_isometric_overlattices(&GenusSymbol::unimodular(1, -e2), &l, p), 0);
            }
        }
    }

    #[test]
    fn inside_pi_inverse_counts_subspaces() {
        use crate::q_combinatorics::{q_binomial, QValue};
        for s in enumerate_symbols(3, 0, 2) {
            let prof = overlattice_profile(&s, OverlatticeConstraint::InsidePiInverse, 3);
            for len in 0..=3u32 {
                let c: u64 = prof.iter().filter(|x| x.1 == len).map(|x| x.2).sum();
                assert_eq!(c.to_string(), q_binomial(3, len as i64, QValue::new(3).unwrap()).to_string());
            }
            let top: Vec<_> = prof.iter().filter(|x| x.1 == 3).collect();
            let inv: Vec<i64> = s.invariants().iter().map(|a| a - 2).collect();
            assert_eq!(top[0].0.invariants(), inv);
        }
    }

    #[test]
    fn overlattices_are_superlattices() {
        let l = AmbientLattice::from_symbol(&sym("0^1+,1H^1,2^1-"), 3);
        for o in overlattices(&l, OverlatticeConstraint::Integral, None).unwrap() {
            assert!(o.lattice.symbol.is_integral());
            let len_from_val = (l.symbol.stats().val - o.lattice.symbol.stats().val) / 2;
            assert_eq!(len_from_val, o.length as i64);
        }
    }

    #[test]
    fn hyperplane_intersection() {
        let p = 3;
        let z = FElement::zero(p);
        let o = FElement::one(p);
        let h = FElement::pi_pow(-1, p);
        // span of (1, π^{-1}) and (0, 1) meets the first axis in O_F·(π, 0)
        let rows = vec![vec![o.clone(), h.clone()], vec![z.clone(), o.clone()]];
        let b = intersect_coordinate_hyperplane(&rows, 1);
        assert_eq!(b.len(), 1);
        assert!(b[0][1].is_zero());
        assert_eq!(b[0][0].val(), Some(1));
    }
}
