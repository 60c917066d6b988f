//! Local density polynomials `Den(I_m, L, X)`, primitive densities `Pden`,
//! derived densities, the coefficients `c_t` and the modified derived
//! density `∂Den`.
//!
//! Conventions: `ε = χ(L)`, and derived densities always use the target
//! `I_n = I_n^{-ε}`, for which `Den(I_n, L, 1) = 0`. The unnormalized
//! derivative is `-2 d/dX|_{X=1}`; the normalized one divides by
//! `Den(I_n, I_n)`.

use crate::arith::{rat, rat_string, sign_pow, Int, Rat};
use crate::error::{Error, Result};
use crate::fq_spaces::{isometry_count, orthogonal_group_order, subspace_count, FqQuadSpace};
use crate::hermitian_lattice::{
    count_isometric_overlattices, overlattice_profile, t_max, GenusSymbol, OverlatticeConstraint,
};
use crate::poly::Poly;
use crate::q_combinatorics::QValue;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

/// Dense polynomial in `X` with rational coefficients.
pub type DensityPolynomial = Poly;

type PolyKey = (u32, i32, GenusSymbol, u64);

fn pden_cache() -> &'static Mutex<HashMap<PolyKey, Poly>> {
    static C: OnceLock<Mutex<HashMap<PolyKey, Poly>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn den_cache() -> &'static Mutex<HashMap<PolyKey, Poly>> {
    static C: OnceLock<Mutex<HashMap<PolyKey, Poly>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// `1 - c X`.
fn one_minus(c: Rat) -> Poly {
    Poly::linear(rat(1), -c)
}

/// `sum_{V_1 ⊆ L̄, dim V_1 = i} |O(V_1, U_m^eps)|`, grouped by the isometry class of `V_1`.
pub fn grassmann_weight(i: u32, lbar: FqQuadSpace, m: u32, eps_target: i32, q: QValue) -> Int {
    let target = FqQuadSpace::nondeg(m, eps_target);
    let mut total = Int::zero();
    for j in 0..=i {
        let k = i - j;
        let signs: &[i32] = if k == 0 { &[1] } else { &[1, -1] };
        for &e2 in signs {
            let v1 = FqQuadSpace::new(j, k, e2);
            let cnt = subspace_count(v1, lbar, q);
            if cnt.is_zero() {
                continue;
            }
            total += cnt * isometry_count(v1, target, q);
        }
    }
    total
}

/// `Pden^{n-i}(I_m^{eps_target}, L, X)` for integral `L`: the `i`-th summand of the
/// Grassmannian expansion.
pub fn pden_piece(m: u32, eps_target: i32, l: &GenusSymbol, i: u32, q: QValue) -> Result<Poly> {
    let lbar = l.reduction_mod_pi()?;
    let n = l.rank();
    if i > n {
        return Err(Error::InvalidInput(format!("piece index {i} exceeds rank {n}")));
    }
    let w = grassmann_weight(i, lbar, m, eps_target, q);
    if w.is_zero() {
        return Ok(Poly::zero());
    }
    let shift = n as i64 - m as i64;
    let lead = Poly::monomial(q.pow(shift * i as i64), i as usize);
    let prod = Poly::product((0..(n - i) as i64).map(|l| one_minus(q.pow(2 * l))));
    Ok((&lead * &prod).scale(&Rat::from_integer(w)))
}

fn pden_integral(m: u32, eps_target: i32, l: &GenusSymbol, q: QValue) -> Poly {
    Poly::sum((0..=l.rank()).map(|i| pden_piece(m, eps_target, l, i, q).expect("integral lattice")))
}

/// `Pden(I_m^{eps_target}, L, X)`.
///
/// Lattices with an invariant `<= -2` give zero; scale `-1` hyperbolic planes are
/// peeled off via `Pden(I_m, H^j ⊥ L_1, X) = prod_{l<j}(1 - q^{2l}X) Pden(I_m, L_1, q^{2j}X)`.
pub fn pden_poly(m: u32, eps_target: i32, l: &GenusSymbol, q: QValue) -> Poly {
    let key = (m, eps_target, l.clone(), q.get());
    if let Some(p) = pden_cache().lock().unwrap().get(&key) {
        return p.clone();
    }
    let result = if l.invariants().first().is_some_and(|&a| a <= -2) {
        Poly::zero()
    } else {
        let (j, l1) = l.split_hyperbolic_minus_one();
        if !l1.is_integral() {
            Poly::zero()
        } else if j == 0 {
            pden_integral(m, eps_target, &l1, q)
        } else {
            let prod = Poly::product((0..j as i64).map(|k| one_minus(q.pow(2 * k))));
            &prod * &pden_integral(m, eps_target, &l1, q).scale_var(&q.pow(2 * j as i64))
        }
    };
    pden_cache().lock().unwrap().insert(key, result.clone());
    result
}

fn require_prime(q: QValue) -> Result<u64> {
    if q.is_prime() && q.get() % 2 == 1 {
        Ok(q.get())
    } else {
        Err(Error::InvalidInput(format!(
            "q = {} must be an odd prime for overlattice enumeration",
            q.get()
        )))
    }
}

/// `Den(I_m^{eps_target}, L, X) = sum_{L ⊆ L'} (q^{n-m}X)^{ℓ(L'/L)} Pden(I_m, L', X)`.
///
/// Overlattices with an invariant `<= -2` have vanishing `Pden` and are skipped
/// by the enumeration itself.
pub fn den_poly(m: u32, eps_target: i32, l: &GenusSymbol, q: QValue) -> Result<Poly> {
    let p = require_prime(q)?;
    let key = (m, eps_target, l.clone(), p);
    if let Some(v) = den_cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let shift = l.rank() as i64 - m as i64;
    let profile = overlattice_profile(l, OverlatticeConstraint::MinInvariantMinusOne, p);
    let mut total = Poly::zero();
    for (sym, len, count) in profile.iter() {
        let pd = pden_poly(m, eps_target, sym, q);
        if pd.is_zero() {
            continue;
        }
        let lead = Poly::monomial(q.pow(shift * *len as i64) * rat(*count as i64), *len as usize);
        total = &total + &(&lead * &pd);
    }
    den_cache().lock().unwrap().insert(key, total.clone());
    Ok(total)
}

/// `Den(I_n, I_n) = |O(U_n^sign, U_n^sign)|` for the unimodular lattice of sign `sign`.
pub fn den_unimodular_self(n: u32, sign: i32, q: QValue) -> Rat {
    Rat::from_integer(orthogonal_group_order(n, sign, q))
}

/// Closed form for `Den(I_n, I_n)` where `I_n` has sign `-eps`.
pub fn den_unimodular_self_closed(n: u32, eps: i32, q: QValue) -> Rat {
    let n = n as i64;
    let mut x = rat(2) * q.pow(n * (n - 1) / 2);
    let top = if n % 2 == 1 { (n - 1) / 2 } else { n / 2 - 1 };
    for s in 1..=top {
        x *= rat(1) - q.pow(-2 * s);
    }
    if n % 2 == 0 {
        x *= rat(1) + rat(eps as i64) * q.pow(-n / 2);
    }
    x
}

/// `-2 P'(1)`.
pub fn minus_two_derivative_at_one(p: &Poly) -> Rat {
    rat(-2) * p.derivative().eval(&rat(1))
}

/// Unnormalized `Den'(I_n, L) = -2 d/dX Den(I_n^{-ε}, L, X)|_{X=1}`.
pub fn den_prime_unnormalized(l: &GenusSymbol, q: QValue) -> Result<Rat> {
    let eps = l.chi(q.get());
    Ok(minus_two_derivative_at_one(&den_poly(l.rank(), -eps, l, q)?))
}

/// Normalized `Den'(L)`.
pub fn den_prime(l: &GenusSymbol, q: QValue) -> Result<Rat> {
    let eps = l.chi(q.get());
    Ok(den_prime_unnormalized(l, q)? / den_unimodular_self(l.rank(), -eps, q))
}

/// Unnormalized `Pden'(I_n, L)`.
pub fn pden_prime_unnormalized(l: &GenusSymbol, q: QValue) -> Rat {
    let eps = l.chi(q.get());
    minus_two_derivative_at_one(&pden_poly(l.rank(), -eps, l, q))
}

/// Normalized `Pden'(L)`.
pub fn pden_prime(l: &GenusSymbol, q: QValue) -> Rat {
    let eps = l.chi(q.get());
    pden_prime_unnormalized(l, q) / den_unimodular_self(l.rank(), -eps, q)
}

/// `c_t = -Pden'(Λ_t^♯)` for even `0 < t <= t_max(n, eps)`.
pub fn coefficients_c(n: u32, eps: i32, q: QValue) -> BTreeMap<u32, Rat> {
    let mut out = BTreeMap::new();
    if n == 0 {
        return out;
    }
    let tm = t_max(n, eps);
    for t in (2..=tm).step_by(2) {
        let lam = GenusSymbol::lambda_sharp(n, t, eps, q.get()).expect("t within range");
        out.insert(t, -pden_prime(&lam, q));
    }
    out
}

/// Checks `∂Den(Λ_{2i}^♯) = 0` for `0 < 2i <= t_max` and `∂Den(I_n) = δ_odd(n)`
/// through the direct route `Den' + sum c Den_t`.
pub fn verify_coefficient_system(n: u32, eps: i32, q: QValue) -> Result<bool> {
    let mut ok = true;
    for t in (0..=t_max(n, eps)).step_by(2) {
        let lam = GenusSymbol::lambda_sharp(n, t, eps, q.get())?;
        let expected = if t == 0 && n % 2 == 1 { Int::one() } else { Int::zero() };
        ok &= dden_direct(&lam, q)? == Rat::from_integer(expected);
    }
    Ok(ok)
}

/// Closed form of `∂Pden(L)`.
pub fn pdden_closed(l: &GenusSymbol, q: QValue) -> Rat {
    if !l.is_integral() {
        return Rat::zero();
    }
    let st = l.stats();
    let t = st.t as i64;
    if t == 0 {
        return rat((st.rank % 2) as i64);
    }
    let l2 = l.filter_scales(|a| a > 0);
    let prod = |top: i64| (1..=top).fold(rat(1), |acc, k| acc * (rat(1) - q.pow(2 * k)));
    if t % 2 == 1 {
        prod((t - 1) / 2)
    } else {
        (rat(1) - rat(l2.chi(q.get()) as i64) * q.pow(t / 2)) * prod(t / 2 - 1)
    }
}

/// `Λ_t^♯`-indicator sum `sum_j c_{2j} [L ≅ Λ_{2j}^♯]`.
fn lambda_correction(l: &GenusSymbol, q: QValue) -> Rat {
    let n = l.rank();
    let eps = l.chi(q.get());
    let coeffs = coefficients_c(n, eps, q);
    coeffs
        .iter()
        .filter(|(&t, _)| GenusSymbol::lambda_sharp(n, t, eps, q.get()).ok().as_ref() == Some(l))
        .map(|(_, c)| c.clone())
        .fold(Rat::zero(), |a, b| a + b)
}

/// `∂Pden(L) = Pden'(L) + sum_j c_{2j} Pden_{2j}(L)`, with `Pden_{2j}(L) = [L ≅ Λ_{2j}^♯]`.
pub fn pdden_machine(l: &GenusSymbol, q: QValue) -> Rat {
    if l.rank() == 0 {
        return Rat::zero();
    }
    pden_prime(l, q) + lambda_correction(l, q)
}

/// `Den_t(L) = n(Λ_t^♯, L)`.
pub fn den_t(l: &GenusSymbol, t: u32, q: QValue) -> Result<u64> {
    let p = require_prime(q)?;
    let lam = GenusSymbol::lambda_sharp(l.rank(), t, l.chi(p), p)?;
    Ok(count_isometric_overlattices(&lam, l, p))
}

/// `∂Den(L) = Den'(L) + sum_j c_{2j} Den_{2j}(L)`.
pub fn dden_direct(l: &GenusSymbol, q: QValue) -> Result<Rat> {
    let n = l.rank();
    let mut total = den_prime(l, q)?;
    for (t, c) in coefficients_c(n, l.chi(q.get()), q) {
        let d = den_t(l, t, q)?;
        total += c * rat(d as i64);
    }
    Ok(total)
}

/// `∂Den(L) = sum over integral overlattices L' of ∂Pden(L')`.
pub fn dden_via_overlattices(l: &GenusSymbol, q: QValue) -> Result<Rat> {
    let p = require_prime(q)?;
    let profile = overlattice_profile(l, OverlatticeConstraint::Integral, p);
    Ok(profile
        .iter()
        .map(|(s, _, c)| pdden_closed(s, q) * rat(*c as i64))
        .fold(Rat::zero(), |a, b| a + b))
}

/// `∂Den(L)` computed both ways; a mismatch is an internal-consistency error.
pub fn dden(l: &GenusSymbol, q: QValue) -> Result<Int> {
    let a = dden_via_overlattices(l, q)?;
    let b = dden_direct(l, q)?;
    if a != b {
        return Err(Error::Consistency(format!(
            "∂Den({l}) at q = {}: overlattice sum {} but Den' + c·Den_t = {}",
            q.get(),
            rat_string(&a),
            rat_string(&b)
        )));
    }
    if !a.is_integer() {
        return Err(Error::Consistency(format!("∂Den({l}) = {} is not an integer", rat_string(&a))));
    }
    Ok(a.to_integer())
}

/// Recomputes `Pden(I_m, L, X)` as
/// `sum_i (-1)^i q^{i(i-1)/2 + i(n-m)} X^i sum_{L ⊆ L' ⊆ π^{-1}L, ℓ = i} Den(I_m, L', X)`
/// and compares with [`pden_poly`]. Returns the difference on mismatch.
pub fn pden_from_den(m: u32, eps_target: i32, l: &GenusSymbol, q: QValue) -> Result<Poly> {
    let p = require_prime(q)?;
    let n = l.rank() as i64;
    let profile = overlattice_profile(l, OverlatticeConstraint::InsidePiInverse, p);
    let mut total = Poly::zero();
    for (sym, len, count) in profile.iter() {
        let i = *len as i64;
        let w = rat(sign_pow(i) as i64) * q.pow(i * (i - 1) / 2 + i * (n - m as i64)) * rat(*count as i64);
        let term = &Poly::monomial(w, i as usize) * &den_poly(m, eps_target, sym, q)?;
        total = &total + &term;
    }
    Ok(total)
}

/// Round trip through [`pden_from_den`]; the target is `I_n^{-χ(L)}` and `I_{n+1}^{±}`.
pub fn pden_from_den_roundtrip(l: &GenusSymbol, q: QValue) -> Result<bool> {
    let n = l.rank();
    let eps = l.chi(q.get());
    for (m, e) in [(n, -eps), (n, eps), (n + 1, 1), (n + 1, -1)] {
        if pden_from_den(m, e, l, q)? != pden_poly(m, e, l, q) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Everything computed about one lattice.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    #[serde(rename = "L")]
    pub lattice: GenusSymbol,
    pub n: u32,
    pub eps: i32,
    pub q: u64,
    pub den_poly: Poly,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub den_prime: Rat,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub den_prime_norm: Rat,
    pub den_t: BTreeMap<u32, u64>,
    #[serde(serialize_with = "crate::arith::serialize_rat_map")]
    pub c: BTreeMap<u32, Rat>,
    #[serde(serialize_with = "crate::arith::serialize_int")]
    pub dden: Int,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub pdden: Rat,
}

impl DensityReport {
    pub fn compute(l: &GenusSymbol, q: QValue) -> Result<Self> {
        let n = l.rank();
        let eps = l.chi(q.get());
        let c = coefficients_c(n, eps, q);
        let mut dt = BTreeMap::new();
        for t in (0..=t_max(n, eps)).step_by(2) {
            dt.insert(t, den_t(l, t, q)?);
        }
        Ok(DensityReport {
            lattice: l.clone(),
            n,
            eps,
            q: q.get(),
            den_poly: den_poly(n, -eps, l, q)?,
            den_prime: den_prime_unnormalized(l, q)?,
            den_prime_norm: den_prime(l, q)?,
            den_t: dt,
            c,
            dden: dden(l, q)?,
            pdden: pdden_machine(l, q),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac;

    fn q3() -> QValue {
        QValue::new(3).unwrap()
    }

    fn sym(s: &str) -> GenusSymbol {
        s.parse().unwrap()
    }

    #[test]
    fn rank_one_opposite_sign() {
        for e in [1, -1] {
            let l = GenusSymbol::unimodular(1, e);
            assert_eq!(pden_poly(1, -e, &l, q3()), Poly::linear(rat(1), rat(-1)));
            assert_eq!(den_poly(1, -e, &l, q3()).unwrap(), Poly::linear(rat(1), rat(-1)));
            assert_eq!(pdden_machine(&l, q3()), rat(1));
        }
    }

    #[test]
    fn self_density_closed_form() {
        for n in 1..=6 {
            for eps in [1, -1] {
                assert_eq!(den_unimodular_self(n, -eps, q3()), den_unimodular_self_closed(n, eps, q3()));
                let l = GenusSymbol::unimodular(n, -eps);
                assert_eq!(den_poly(n, -eps, &l, q3()).unwrap().eval(&rat(1)), den_unimodular_self(n, -eps, q3()));
            }
        }
        assert_eq!(den_unimodular_self(1, 1, q3()), rat(2));
        assert_eq!(den_unimodular_self(2, 1, q3()), rat(4));
        assert_eq!(den_unimodular_self(2, -1, q3()), rat(8));
    }

    #[test]
    fn small_coefficients() {
        let c = coefficients_c(2, 1, q3());
        assert_eq!(c[&2], frac(-1, 4));
        let c = coefficients_c(4, 1, q3());
        assert_eq!(c[&2], frac(-1, 36));
        assert_eq!(c[&4], frac(1, 90));
    }

    #[test]
    fn closed_examples() {
        assert_eq!(pdden_closed(&GenusSymbol::unimodular(3, 1), q3()), rat(1));
        assert_eq!(pdden_closed(&sym("-2^1+"), q3()), rat(0));
        assert_eq!(pdden_closed(&sym("1H^1"), q3()), rat(1) - rat(3));
    }

    #[test]
    fn vanishing_at_one() {
        for s in ["0^1+,2^1-", "1H^1", "0^2-,1H^1", "2^2+"] {
            let l = sym(s);
            let eps = l.chi(3);
            assert!(den_poly(l.rank(), -eps, &l, q3()).unwrap().eval(&rat(1)).is_zero(), "{s}");
        }
    }

    #[test]
    fn hyperbolic_minus_one_factorization() {
        let l = sym("-1H^1,0^1+");
        let l1 = sym("0^1+");
        for (m, e) in [(3, 1), (3, -1), (4, 1)] {
            let lhs = den_poly(m, e, &l, q3()).unwrap();
            let rhs = &one_minus(rat(1)) * &den_poly(m, e, &l1, q3()).unwrap().scale_var(&rat(9));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pieces_sum_to_whole() {
        let l = sym("0^1+,1H^1");
        let total = Poly::sum((0..=3).map(|i| pden_piece(3, -l.chi(3), &l, i, q3()).unwrap()));
        assert_eq!(total, pden_poly(3, -l.chi(3), &l, q3()));
        assert!(pden_piece(3, -l.chi(3), &l, 3, q3()).unwrap().is_zero());
    }
}
