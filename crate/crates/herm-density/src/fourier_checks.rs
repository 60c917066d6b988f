//! Horizontal lattices, the vertical part of `∂Den` along a rank `n-1`
//! lattice, and the finite D-sum whose vanishing makes the partial Fourier
//! transform of the vertical part constant on `W^{>=0} - {0}`.
//!
//! Throughout, the ambient space is `V = L♭_F ⊥ W` in adapted coordinates:
//! the first `n-1` coordinates span `L♭_F` and the last spans the line `W`.
//! For a vector, `val(x)` is the `p`-adic valuation of `(x, x)`.
//!
//! Only `L^♯` is used. The quadratic dual relevant to the Fourier transform
//! is `L^∨ = π^{-1} L^♯`, so statements about `L^∨` translate by one shift.

use crate::arith::{nonresidue, rat, vp, Rat};
use crate::error::{Error, Result};
use crate::hermitian_lattice::lattice::{dual_coset_representatives, intersect_coordinate_hyperplane};
use crate::hermitian_lattice::{
    chi_from_gram, mu_counts, overlattices, AmbientLattice, BlockKind, FElement, GenusSymbol, GramMatrix,
    MuCounts, OverlatticeConstraint,
};
use crate::local_density::{dden, pdden_closed};
use crate::q_combinatorics::QValue;
use num_traits::Zero;
use serde::Serialize;

/// Rank of the scale-0 Jordan block.
fn unimodular_rank(l: &GenusSymbol) -> u32 {
    l.blocks().iter().filter(|b| b.scale == 0).map(|b| b.rank()).sum()
}

/// Whether a rank `n-1` lattice is horizontal inside an `n`-dimensional space of sign `chi_v`.
///
/// Horizontal means integral and either unimodular, or `M ⊥ ⟨y⟩` with `M`
/// unimodular of rank `n-2` and `(M_F)^⊥` nonsplit. The plane `(M_F)^⊥`
/// has sign `chi_v · χ(M)`, and a plane is split iff its sign is `+1`.
pub fn is_horizontal(lb: &GenusSymbol, chi_v: i32, _q: u64) -> bool {
    if !lb.is_integral() {
        return false;
    }
    if lb.is_unimodular() {
        return true;
    }
    let r = lb.rank();
    if r == 0 || unimodular_rank(lb) != r - 1 {
        return false;
    }
    // the remaining rank-1 block has even positive scale; χ(M) is its unimodular sign
    debug_assert!(lb.blocks().iter().all(|b| b.scale == 0 || matches!(b.kind, BlockKind::Diagonal { .. })));
    chi_v * lb.unimodular_sign() == -1
}

/// All horizontal integral overlattices of `lb` inside `(lb)_F`.
pub fn horizontal_set(lb: &AmbientLattice, chi_v: i32) -> Result<Vec<AmbientLattice>> {
    if !lb.symbol.is_integral() {
        return Ok(Vec::new());
    }
    let p = lb.p();
    let found = overlattices(lb, OverlatticeConstraint::Integral, None)?;
    Ok(found
        .into_iter()
        .map(|o| o.lattice)
        .filter(|m| is_horizontal(&m.symbol, chi_v, p))
        .collect())
}

/// `L♭` of rank `n-1` and a vector `x ∉ L♭_F` in `V = L♭_F ⊥ W`.
#[derive(Clone, Debug)]
pub struct FlatConfiguration {
    /// Gram matrix of `V` in adapted coordinates.
    pub ambient: GramMatrix,
    /// `L♭`, spanned by the first `n-1` coordinate vectors.
    pub flat: AmbientLattice,
    pub x: Vec<FElement>,
    pub chi_v: i32,
}

impl FlatConfiguration {
    /// `V = flat_gram ⊥ ⟨w_norm⟩`, `L♭` the coordinate lattice of `flat_gram`.
    pub fn new(flat_gram: &GramMatrix, w_norm: FElement, x: Vec<FElement>) -> Result<Self> {
        let p = flat_gram.p();
        let n = flat_gram.dim() + 1;
        if w_norm.is_zero() || !w_norm.b.is_zero() {
            return Err(Error::InvalidInput("the complement line needs a nonzero norm in F_0".into()));
        }
        if x.len() != n {
            return Err(Error::InvalidInput(format!("x has {} coordinates, expected {n}", x.len())));
        }
        if x[n - 1].is_zero() {
            return Err(Error::InvalidInput("x lies in the span of the flat lattice".into()));
        }
        let ambient = flat_gram.orthogonal_sum(&GramMatrix::diagonal(&[w_norm], p));
        let chi_v = chi_from_gram(&ambient)?;
        let basis = (0..n - 1)
            .map(|i| (0..n).map(|j| if i == j { FElement::one(p) } else { FElement::zero(p) }).collect())
            .collect();
        let flat = AmbientLattice::from_basis(ambient.clone(), basis)?;
        Ok(FlatConfiguration { ambient, flat, x, chi_v })
    }

    /// The normal form of `flat` inside a space of sign `chi_v`, with `x = π^{val_x} w`
    /// for a unit-norm complement vector `w`, so `val(x) = val_x`.
    pub fn standard(flat: &GenusSymbol, chi_v: i32, val_x: u32, p: u64) -> Result<Self> {
        let g = flat.gram(p);
        let n = g.dim() + 1;
        for beta in [1, nonresidue(p)] {
            let w_norm = FElement::from_int(beta, p);
            let trial = g.orthogonal_sum(&GramMatrix::diagonal(std::slice::from_ref(&w_norm), p));
            if chi_from_gram(&trial)? == chi_v {
                let mut x = vec![FElement::zero(p); n];
                x[n - 1] = FElement::pi_pow(val_x as i64, p);
                return Self::new(&g, w_norm, x);
            }
        }
        Err(Error::InvalidInput(format!("no ambient space of sign {chi_v}")))
    }

    pub fn rank(&self) -> usize {
        self.ambient.dim()
    }

    pub fn p(&self) -> u64 {
        self.ambient.p()
    }

    /// The unit coordinate vector spanning `W`.
    pub fn complement(&self) -> Vec<FElement> {
        let n = self.rank();
        let p = self.p();
        (0..n).map(|j| if j + 1 == n { FElement::one(p) } else { FElement::zero(p) }).collect()
    }

    /// `val(x)`; `x` is anisotropic in general, so `None` only for isotropic `x`.
    pub fn val_x(&self) -> Option<i64> {
        vp(&self.ambient.pair(&self.x, &self.x).a, self.p())
    }

    /// The rank `n` lattice `L♭ + ⟨x⟩`.
    pub fn lattice(&self) -> Result<AmbientLattice> {
        let mut basis = self.flat.basis.clone();
        basis.push(self.x.clone());
        AmbientLattice::from_basis(self.ambient.clone(), basis)
    }

    /// `L' ∩ L♭_F` for a full rank lattice `L'` of `V`.
    pub fn flat_part(&self, l: &AmbientLattice) -> Result<AmbientLattice> {
        let rows = intersect_coordinate_hyperplane(&l.basis, self.rank() - 1);
        AmbientLattice::from_basis(self.ambient.clone(), rows)
    }
}

/// `∂Den(L♭ + ⟨x⟩)` split by whether `L' ∩ L♭_F` is horizontal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DdenSplit {
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub vertical: Rat,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub horizontal: Rat,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub total: Rat,
}

/// Both halves of the overlattice sum for `∂Den(L♭ + ⟨x⟩)`; their sum is
/// checked against [`dden`].
pub fn dden_split(cfg: &FlatConfiguration, q: QValue) -> Result<DdenSplit> {
    let l = cfg.lattice()?;
    let p = cfg.p();
    let mut split = DdenSplit { vertical: Rat::zero(), horizontal: Rat::zero(), total: Rat::zero() };
    for o in overlattices(&l, OverlatticeConstraint::Integral, None)? {
        let v = pdden_closed(&o.lattice.symbol, q);
        if v.is_zero() {
            continue;
        }
        let flat = cfg.flat_part(&o.lattice)?;
        if is_horizontal(&flat.symbol, cfg.chi_v, p) {
            split.horizontal += v;
        } else {
            split.vertical += v;
        }
    }
    split.total = &split.vertical + &split.horizontal;
    let expected = Rat::from_integer(dden(&l.symbol, q)?);
    if split.total != expected {
        return Err(Error::Consistency(format!(
            "vertical + horizontal = {} but ∂Den({}) = {}",
            crate::arith::rat_string(&split.total),
            l.symbol,
            crate::arith::rat_string(&expected)
        )));
    }
    Ok(split)
}

/// `∂Den_{L♭,V}(x)`: overlattices whose flat part is not horizontal.
pub fn dden_vertical(cfg: &FlatConfiguration, q: QValue) -> Result<Rat> {
    Ok(dden_split(cfg, q)?.vertical)
}

/// `∂Den_{L♭,H}(x)`: overlattices whose flat part is horizontal.
pub fn dden_horizontal(cfg: &FlatConfiguration, q: QValue) -> Result<Rat> {
    Ok(dden_split(cfg, q)?.horizontal)
}

/// Number of vertex lattices of `V` containing the flat lattice of `cfg`.
///
/// A vertex lattice `Λ ⊇ L♭` meets `W` in `⟨π^k w⟩` with `0 <= k <= 1 + ⌈a/2⌉`,
/// `a` the largest invariant of `L♭`, so it is an integral overlattice of
/// `L♭ ⊥ ⟨π^K w⟩` for `K = a + 2`.
pub fn containing_vertex_lattices(cfg: &FlatConfiguration) -> Result<usize> {
    let p = cfg.p();
    let a = cfg.flat.symbol.invariants().last().copied().unwrap_or(0).max(0);
    let mut basis = cfg.flat.basis.clone();
    let w = cfg.complement();
    basis.push(w.iter().map(|c| c * &FElement::pi_pow(a + 2, p)).collect());
    let base = AmbientLattice::from_basis(cfg.ambient.clone(), basis)?;
    Ok(overlattices(&base, OverlatticeConstraint::Integral, None)?
        .iter()
        .filter(|o| o.lattice.symbol.stats().vertex)
        .count())
}

/// Position of a dual coset `u` of `L♭` in the partition `S^+ ⊔ S^0 ⊔ S^-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CosetClass {
    Plus,
    /// `S^0`, with `χ((u, u)) = +1` or `-1`.
    ZeroPlus,
    ZeroMinus,
    Minus,
}

impl CosetClass {
    /// Change of type `t(L') - t(L♭)`.
    pub fn type_shift(self) -> i64 {
        match self {
            CosetClass::Plus => 1,
            CosetClass::ZeroPlus | CosetClass::ZeroMinus => 0,
            CosetClass::Minus => -1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ClassTally {
    pub count: u64,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub sum: Rat,
}

/// Result of one D-sum evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DSumReport {
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub value: Rat,
    /// `t(L'♭)`.
    pub t: u32,
    /// Rank and sign of the unimodular part of `L'♭`.
    pub n1: u32,
    pub eps1: i32,
    /// `χ(V)`.
    pub eps: i32,
    pub val_x: i64,
    pub plus: ClassTally,
    pub zero_plus: ClassTally,
    pub zero_minus: ClassTally,
    pub minus: ClassTally,
    /// Every summand changes the type by the amount its class predicts.
    pub type_arithmetic_ok: bool,
    /// Every summand equals the class value predicted from `t, n1, ε1, ε`.
    pub summands_match_classes: bool,
    /// The class counts equal `μ` of the full type part.
    pub counts_match_mu: bool,
    /// The value equals the `μ`-weighted combination from the counting propositions.
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub grouped: Rat,
}

impl DSumReport {
    pub fn all_consistent(&self) -> bool {
        self.type_arithmetic_ok && self.summands_match_classes && self.counts_match_mu && self.grouped == self.value
    }
}

fn prod_one_minus(top: i64, q: QValue) -> Rat {
    (1..=top).fold(rat(1), |acc, l| acc * (rat(1) - q.pow(2 * l)))
}

/// Predicted `∂Pden(L'♭ + ⟨u + x⟩)` for a coset of the given class.
pub fn predicted_summand(class: CosetClass, t: u32, n1: u32, eps1: i32, eps: i32, q: QValue) -> Rat {
    let t = t as i64;
    let s = rat((eps * eps1) as i64);
    if t % 2 == 1 {
        if t == 1 {
            return match class {
                CosetClass::Plus => rat(1) - q.pow(1),
                CosetClass::ZeroPlus | CosetClass::ZeroMinus => rat(1),
                CosetClass::Minus => Rat::zero(),
            };
        }
        let lo = q.pow((t - 1) / 2);
        let hi = q.pow((t + 1) / 2);
        let a = (rat(1) - &s * &lo) * prod_one_minus((t - 1) / 2 - 1, q);
        match class {
            CosetClass::Plus => a * (rat(1) - &s * hi) * (rat(1) + &s * lo),
            CosetClass::ZeroPlus | CosetClass::ZeroMinus => a * (rat(1) + &s * lo),
            CosetClass::Minus => a,
        }
    } else {
        let b = prod_one_minus(t / 2 - 1, q);
        let sigma = if n1 % 2 == 0 { s } else { -s };
        match class {
            CosetClass::Plus => b * (rat(1) - q.pow(t)),
            CosetClass::ZeroPlus => b * (rat(1) - sigma * q.pow(t / 2)),
            CosetClass::ZeroMinus => b * (rat(1) + sigma * q.pow(t / 2)),
            CosetClass::Minus => b,
        }
    }
}

/// `D(L'♭)(x) = Σ_{u ∈ (L'♭)^♯/L'♭, val(u) >= 0} ∂Pden(L'♭ + ⟨u + x⟩)`.
///
/// `lpb` has rank `n-1` in an `n`-dimensional space, is integral and not
/// horizontal; `x` is orthogonal to it with `val(x) > 0`.
pub fn d_sum(lpb: &AmbientLattice, x: &[FElement], q: QValue) -> Result<DSumReport> {
    let g = &lpb.gram;
    let p = g.p();
    if q.get() != p {
        return Err(Error::InvalidInput(format!("q = {} must equal the residue prime {p}", q.get())));
    }
    let n = g.dim();
    if lpb.rank() + 1 != n {
        return Err(Error::InvalidInput(format!("flat lattice of rank {} in a space of dimension {n}", lpb.rank())));
    }
    if !lpb.symbol.is_integral() {
        return Err(Error::NonIntegral);
    }
    let eps = chi_from_gram(g)?;
    if is_horizontal(&lpb.symbol, eps, p) {
        return Err(Error::InvalidInput("D-sum undefined for horizontal lattices in this check".into()));
    }
    if lpb.basis.iter().any(|b| !g.pair(b, x).is_zero()) {
        return Err(Error::InvalidInput("x is not orthogonal to the flat lattice".into()));
    }
    let val_x = vp(&g.pair(x, x).a, p).ok_or(Error::Degenerate)?;
    if val_x <= 0 {
        return Err(Error::InvalidInput(format!("val(x) = {val_x} must be positive")));
    }
    let st = lpb.symbol.stats();
    let (t, n1, eps1) = (st.t, unimodular_rank(&lpb.symbol), lpb.symbol.unimodular_sign());

    let frame = lpb.frame()?;
    let mut report = DSumReport {
        value: Rat::zero(),
        t,
        n1,
        eps1,
        eps,
        val_x,
        plus: ClassTally::default(),
        zero_plus: ClassTally::default(),
        zero_minus: ClassTally::default(),
        minus: ClassTally::default(),
        type_arithmetic_ok: true,
        summands_match_classes: true,
        counts_match_mu: true,
        grouped: Rat::zero(),
    };
    for rep in dual_coset_representatives(&frame, 0)? {
        let norm = frame.gram.pair(&rep, &rep);
        let v = vp(&norm.a, p);
        if v.is_some_and(|v| v < 0) {
            continue;
        }
        let in_pi_dual = rep.iter().zip(&frame.scales).all(|(c, &a)| c.val_at_least(1 - a));
        let class = match (in_pi_dual, v) {
            (false, _) => CosetClass::Minus,
            (true, Some(0)) if norm.unit_legendre() == 1 => CosetClass::ZeroPlus,
            (true, Some(0)) => CosetClass::ZeroMinus,
            (true, _) => CosetClass::Plus,
        };
        let u = frame.to_ambient_coords(&rep);
        let gen: Vec<FElement> = u.iter().zip(x).map(|(a, b)| a + b).collect();
        let mut basis = lpb.basis.clone();
        basis.push(gen);
        let lp = AmbientLattice::from_basis(g.clone(), basis)?;
        let value = pdden_closed(&lp.symbol, q);
        if lp.symbol.stats().t as i64 != t as i64 + class.type_shift() {
            report.type_arithmetic_ok = false;
        }
        if value != predicted_summand(class, t, n1, eps1, eps, q) {
            report.summands_match_classes = false;
        }
        let tally = match class {
            CosetClass::Plus => &mut report.plus,
            CosetClass::ZeroPlus => &mut report.zero_plus,
            CosetClass::ZeroMinus => &mut report.zero_minus,
            CosetClass::Minus => &mut report.minus,
        };
        tally.count += 1;
        tally.sum += &value;
        report.value += value;
    }

    let l2 = lpb.symbol.filter_scales(|a| a > 0);
    let mu = mu_counts(&AmbientLattice::from_symbol(&l2, p))?;
    report.counts_match_mu = (report.plus.count, report.zero_plus.count, report.zero_minus.count, report.minus.count)
        == (mu.plus, mu.zero_plus, mu.zero_minus, mu.minus);
    let pred = |c| predicted_summand(c, t, n1, eps1, eps, q);
    report.grouped = pred(CosetClass::Plus) * rat(mu.plus as i64)
        + pred(CosetClass::ZeroPlus) * rat(mu.zero_plus as i64)
        + pred(CosetClass::ZeroMinus) * rat(mu.zero_minus as i64)
        + pred(CosetClass::Minus) * rat(mu.minus as i64);
    Ok(report)
}

/// `D` for the standard configuration of a flat symbol, `val(x)` given.
pub fn d_sum_standard(flat: &GenusSymbol, chi_v: i32, val_x: u32, q: QValue) -> Result<DSumReport> {
    let cfg = FlatConfiguration::standard(flat, chi_v, val_x, q.get())?;
    d_sum(&cfg.flat, &cfg.x, q)
}

/// Residuals of the `μ`-identities for one full type lattice; all should vanish.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuIdentityReport {
    pub t: u32,
    pub mu: MuCounts,
    /// `μ^+ + μ^0 + μ^- - q^t μ^+`.
    pub total_residual: i128,
    /// The odd or even counting identity at `χ = +1` and `χ = -1`.
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub residual_plus: Rat,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub residual_minus: Rat,
}

impl MuIdentityReport {
    pub fn holds(&self) -> bool {
        self.total_residual == 0 && self.residual_plus.is_zero() && self.residual_minus.is_zero()
    }
}

/// Left-hand side of the odd/even counting identity with sign `chi`.
pub fn mu_identity_lhs(mu: &MuCounts, t: u32, chi: i32, q: QValue) -> Rat {
    let t = t as i64;
    let c = rat(chi as i64);
    let r = |x: u64| rat(x as i64);
    if t % 2 == 1 {
        let lo = q.pow((t - 1) / 2);
        let hi = q.pow((t + 1) / 2);
        (rat(1) - &c * hi) * (rat(1) + &c * &lo) * r(mu.plus) + (rat(1) + &c * lo) * r(mu.zero) + r(mu.minus)
    } else {
        let h = q.pow(t / 2);
        (rat(1) - q.pow(t)) * r(mu.plus)
            + (rat(1) - &c * &h) * r(mu.zero_plus)
            + (rat(1) + &c * h) * r(mu.zero_minus)
            + r(mu.minus)
    }
}

/// Checks the `μ`-identities for a full type genus (realized over `F_p`).
pub fn mu_identities(l: &GenusSymbol, q: QValue) -> Result<MuIdentityReport> {
    let t = l.rank();
    if t == 0 || l.invariants().first().is_some_and(|&a| a < 1) {
        return Err(Error::NotFullType);
    }
    let mu = mu_counts(&AmbientLattice::from_symbol(l, q.get()))?;
    let qt = (q.get() as i128).pow(t);
    let total_residual = (mu.plus + mu.zero + mu.minus) as i128 - qt * mu.plus as i128;
    Ok(MuIdentityReport {
        t,
        mu,
        total_residual,
        residual_plus: mu_identity_lhs(&mu, t, 1, q),
        residual_minus: mu_identity_lhs(&mu, t, -1, q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> GenusSymbol {
        s.parse().unwrap()
    }

    fn q3() -> QValue {
        QValue::new(3).unwrap()
    }

    #[test]
    fn horizontality_examples() {
        assert!(is_horizontal(&GenusSymbol::unimodular(2, 1), 1, 3));
        assert!(!is_horizontal(&sym("2^1+"), 1, 3));
        assert!(is_horizontal(&sym("2^1+"), -1, 3));
        assert!(!is_horizontal(&sym("1H^1"), -1, 3));
        assert!(!is_horizontal(&sym("-1H^1"), 1, 3));
    }

    #[test]
    fn horizontal_chain_in_nonsplit_plane() {
        for a in 0..=3i64 {
            let s = GenusSymbol::diagonal(2 * a, 1, 1);
            let cfg = FlatConfiguration::standard(&s, -1, 1, 3).unwrap();
            assert_eq!(horizontal_set(&cfg.flat, -1).unwrap().len() as i64, a + 1);
        }
    }

    #[test]
    fn d_sum_examples() {
        for k in 1..=3 {
            let r = d_sum_standard(&sym("2^1+"), 1, k, q3()).unwrap();
            assert!(r.value.is_zero() && r.all_consistent(), "{r:?}");
        }
        let r = d_sum_standard(&sym("0^1+,2^1+"), 1, 1, q3()).unwrap();
        assert!(r.value.is_zero() && r.all_consistent(), "{r:?}");
        assert!(d_sum_standard(&sym("0^1+"), 1, 1, q3()).is_err());
    }

    #[test]
    fn vertical_part_examples() {
        let cfg = FlatConfiguration::standard(&sym("2^1+"), 1, 1, 3).unwrap();
        assert!(!dden_vertical(&cfg, q3()).unwrap().is_zero());
        let cfg = FlatConfiguration::standard(&sym("0^2+"), 1, 2, 3).unwrap();
        assert!(dden_vertical(&cfg, q3()).unwrap().is_zero());
    }

    #[test]
    fn maximal_mu_identities() {
        for s in ["2^1+", "1H^1", "1H^1,2^1-", "2^2-"] {
            assert!(mu_identities(&sym(s), q3()).unwrap().holds(), "{s}");
        }
    }
}
