//! The polynomial families `f`, `h`, `g`, `F` behind the derivative of the
//! primitive density, and executable checks of the identities relating them.
//!
//! `eps` is always the ambient sign `χ(L)`; `e1`, `e2` are block signs.
//! All checks compare exact coefficient vectors at a fixed `q`.

use crate::arith::{rat, sign_pow, Rat};
use crate::error::{Error, Result};
use crate::fq_spaces::{alpha, beta, delta_sign, isometry_count, subspace_count, FqQuadSpace};
use crate::hermitian_lattice::GenusSymbol;
use crate::local_density::{minus_two_derivative_at_one, pden_piece};
use crate::poly::Poly;
use crate::q_combinatorics::{q_binomial_rat, QValue};

fn ratio(x: crate::arith::Int) -> Rat {
    Rat::from_integer(x)
}

/// `prod_{l=lo}^{hi} term(l)`, empty when `lo > hi`.
fn prod_range(lo: i64, hi: i64, term: impl Fn(i64) -> Poly) -> Poly {
    Poly::product((lo..=hi).map(term))
}

/// `q^{2l} X^2`.
fn sq_mono(l: i64, q: QValue) -> Poly {
    Poly::monomial(q.pow(2 * l), 2)
}

/// `q^{2l} X^2 - 1`.
fn sq_minus_one(l: i64, q: QValue) -> Poly {
    Poly::new(vec![rat(-1), Rat::from_integer(0.into()), q.pow(2 * l)])
}

/// `a X + b`.
fn lin(a: Rat, b: Rat) -> Poly {
    Poly::linear(b, a)
}

/// `m(U_k^{e2}, U_m^{e1})` as a rational.
fn m_nd(k: i64, e2: i32, m: i64, e1: i32, q: QValue) -> Rat {
    ratio(subspace_count(FqQuadSpace::nondeg(k as u32, e2), FqQuadSpace::nondeg(m as u32, e1), q))
}

fn m_rad(j: i64, m: i64, e: i32, q: QValue) -> Rat {
    ratio(subspace_count(FqQuadSpace::radical(j as u32), FqQuadSpace::nondeg(m as u32, e), q))
}

fn signs_for(k: i64) -> &'static [i32] {
    if k == 0 {
        &[1]
    } else {
        &[1, -1]
    }
}

/// `f_{e2}(n, s, X)`, a polynomial of degree `n - 1`.
pub fn f_poly(n: i64, s: i64, e2: i32, eps: i32, q: QValue) -> Result<Poly> {
    if n < 1 || s < 0 || s >= n {
        return Err(Error::InvalidInput(format!("f needs 0 <= s < n, got n={n}, s={s}")));
    }
    let e2 = if s == 0 { 1 } else { e2 };
    let ee = rat((eps * e2) as i64);
    let p = if n % 2 == 1 {
        if s % 2 == 1 {
            let c = q.pow((n + s) / 2);
            prod_range((n + 1) / 2, (n + s - 2) / 2, |l| sq_mono(l, q))
                * Poly::monomial(c.clone(), 1)
                * lin(c, -ee)
                * prod_range((n + s + 2) / 2, n - 1, |l| sq_minus_one(l, q))
        } else {
            prod_range((n + 1) / 2, (n - 1) / 2 + s / 2, |l| sq_mono(l, q))
                * prod_range((n + 1 + s) / 2, n - 1, |l| sq_minus_one(l, q))
        }
    } else if s % 2 == 1 {
        prod_range(n / 2, (n + s - 3) / 2, |l| sq_mono(l, q))
            * Poly::monomial(q.pow(n / 2 + s - 1), 1)
            * prod_range((n + s + 1) / 2, n - 1, |l| sq_minus_one(l, q))
    } else {
        prod_range(n / 2, (n + s - 2) / 2, |l| sq_mono(l, q))
            * lin(q.pow(n / 2 + s), -(q.pow(s / 2) * ee))
            * prod_range((n + s + 2) / 2, n - 1, |l| sq_minus_one(l, q))
    };
    Ok(p)
}

/// `h_{e1}(n, s, X)`, degree `n - s - 1`.
pub fn h_poly(n: i64, s: i64, e1: i32, eps: i32, q: QValue) -> Result<Poly> {
    if s < 0 || s > n - 1 {
        return Err(Error::InvalidInput(format!("h needs 0 <= s <= n-1, got n={n}, s={s}")));
    }
    let p = if (n - s) % 2 == 1 {
        prod_range((n + s + 1) / 2, n - 1, |l| sq_minus_one(l, q))
    } else {
        lin(q.pow((n + s) / 2), rat(-(eps * e1) as i64))
            * prod_range((n + s + 2) / 2, n - 1, |l| sq_minus_one(l, q))
    };
    Ok(p)
}

fn check_grm(n: i64, m: i64, r: i64) -> Result<()> {
    if r < 0 || r > m || m > n || n < 1 {
        return Err(Error::InvalidInput(format!("g needs 0 <= r <= m <= n, got ({n},{m},{r})")));
    }
    Ok(())
}

/// `g_{e1}(n, m, r, X)` by its defining triple sum over `k`, `e2`, `j`.
pub fn g_poly(n: i64, m: i64, r: i64, e1: i32, eps: i32, q: QValue) -> Result<Poly> {
    check_grm(n, m, r)?;
    let e1 = if m == 0 { 1 } else { e1 };
    let mut total = Poly::zero();
    for k in 0..=r.min(n - 1) {
        for &e2 in signs_for(k) {
            let mk = m_nd(k, e2, m, e1, q);
            if mk == rat(0) {
                continue;
            }
            let delta = delta_sign(m, k, e1, e2);
            let inner = (0..=r - k)
                .map(|j| {
                    rat(sign_pow(j) as i64)
                        * q.pow(j * (j - 1) / 2)
                        * q_binomial_rat(m - j - k, r - j - k, q)
                        * m_rad(j, m - k, delta, q)
                })
                .fold(rat(0), |a, b| a + b);
            let c = rat(sign_pow(k) as i64) * q.pow(k * (k - 1) / 2) * mk * inner;
            if c != rat(0) {
                total = &total + &f_poly(n, k, e2, eps, q)?.scale(&c);
            }
        }
    }
    Ok(total)
}

/// `g` through the alternate form
/// `sum_s (-1)^{r-s} binom(m-s, r-s) sum_{k,e2} q^{s(s-1)/2} m(0_{s-k} ⊥ U_k^{e2}, U_m^{e1}) f_{e2}(n,k,X)`.
pub fn g_poly_alt(n: i64, m: i64, r: i64, e1: i32, eps: i32, q: QValue) -> Result<Poly> {
    check_grm(n, m, r)?;
    let e1 = if m == 0 { 1 } else { e1 };
    let mut total = Poly::zero();
    for s in 0..=r {
        let outer = rat(sign_pow(r - s) as i64) * q_binomial_rat(m - s, r - s, q) * q.pow(s * (s - 1) / 2);
        for k in 0..=s.min(n - 1) {
            for &e2 in signs_for(k) {
                let cnt = subspace_count(
                    FqQuadSpace::new((s - k) as u32, k as u32, e2),
                    FqQuadSpace::nondeg(m as u32, e1),
                    q,
                );
                let c = &outer * ratio(cnt);
                if c != rat(0) {
                    total = &total + &f_poly(n, k, e2, eps, q)?.scale(&c);
                }
            }
        }
    }
    Ok(total)
}

/// The alternate sum differs from the defining one by exactly `(-1)^r`.
pub fn check_g_forms(n: i64, m: i64, r: i64, e1: i32, eps: i32, q: QValue) -> Result<bool> {
    let g = g_poly(n, m, r, e1, eps, q)?;
    Ok(g_poly_alt(n, m, r, e1, eps, q)? == g.scale(&rat(sign_pow(r) as i64)))
}

/// The right side of the summation identity for `g`.
pub fn big_f_poly(n: i64, m: i64, e1: i32, eps: i32, q: QValue) -> Result<Poly> {
    if m == n {
        let a = rat(sign_pow(n - 1) as i64) * ratio(alpha(n, q));
        let geom = Poly::sum((0..n).map(|l| Poly::monomial(rat(sign_pow(l) as i64) * q.pow(n * l), l as usize)));
        Ok(geom.scale(&a))
    } else {
        Ok(f_poly(n, m, e1, eps, q)?.scale(&q.pow(n * (n - 1) / 2)))
    }
}

/// `I_ε(n)`.
pub fn i_eps(n: i64, eps: i32, q: QValue) -> Rat {
    let prod = |lo: i64, hi: i64| (lo..=hi).fold(rat(1), |a, l| a * (q.pow(2 * l) - rat(1)));
    if n % 2 == 1 {
        prod(1, (n - 1) / 2)
    } else {
        (q.pow(n / 2) + rat(eps as i64)) * prod(1, n / 2 - 1)
    }
}

/// `I_ε(n', n)` for `n' - n` positive and even.
pub fn i_eps_pair(n2: i64, n: i64, eps: i32, q: QValue) -> Rat {
    let prod = |lo: i64, hi: i64| (lo..=hi).fold(rat(1), |a, l| a * (q.pow(2 * l) - rat(1)));
    if n % 2 == 1 {
        prod((n2 - n) / 2, (n2 - 1) / 2)
    } else {
        (q.pow(n2 / 2) + rat(eps as i64)) * prod((n2 - n) / 2, n2 / 2 - 1)
    }
}

/// `m(n, t) = min(n - t, n - 1)`.
pub fn m_bound(n: i64, t: i64) -> i64 {
    (n - t).min(n - 1)
}

/// `h(n, j, qX) = h(n+1, j+1, X)`.
pub fn check_h_shift(n: i64, j: i64, e1: i32, eps: i32, q: QValue) -> Result<bool> {
    let lhs = h_poly(n, j, e1, eps, q)?.scale_var(&rat(q.get() as i64));
    Ok(lhs == h_poly(n + 1, j + 1, e1, eps, q)?)
}

/// `q^{floor((n+j+2)/2)} X h(n+1, j+1, X) = h(n+1, j, X) + (-1)^{n+j+1} ε e1 h(n+1, j+1, X)`.
pub fn check_h_recursion(n: i64, j: i64, e1: i32, eps: i32, q: QValue) -> Result<bool> {
    let h1 = h_poly(n + 1, j + 1, e1, eps, q)?;
    let lhs = &Poly::monomial(q.pow((n + j + 2).div_euclid(2)), 1) * &h1;
    let c = rat((sign_pow(n + j + 1) * eps * e1) as i64);
    let rhs = &h_poly(n + 1, j, e1, eps, q)? + &h1.scale(&c);
    Ok(lhs == rhs)
}

/// `g_{e1}(n, r, r, X) = (-1)^{r(n-1)} e1^n ε^r α(r) h_{e1}(n, r, X)` for `0 < r <= n-1`.
pub fn check_g_rr_closed(n: i64, r: i64, e1: i32, eps: i32, q: QValue) -> Result<bool> {
    let g = g_poly(n, r, r, e1, eps, q)?;
    let c = rat((sign_pow(r * (n - 1)) * e1.pow(n as u32) * eps.pow(r as u32)) as i64) * ratio(alpha(r, q));
    let h = h_poly(n, r, e1, eps, q)?;
    Ok(g == h.scale(&c) && g.degree() == Some((n - r - 1) as usize))
}

/// `g(n, r, r, X)` against the closed `α β` form of its inner sum.
pub fn check_g_rr_expansion(n: i64, r: i64, e1: i32, eps: i32, q: QValue) -> Result<bool> {
    let g = g_poly(n, r, r, e1, eps, q)?;
    let e1 = if r == 0 { 1 } else { e1 };
    let mut rhs = Poly::zero();
    for k in 0..=r.min(n - 1) {
        for &e2 in signs_for(k) {
            let d = delta_sign(r, k, e1, e2);
            let c = rat(sign_pow(k) as i64)
                * q.pow(k * (k - 1) / 2)
                * m_nd(k, e2, r, e1, q)
                * ratio(alpha(r - k, q))
                * rat(beta(r - k, d) as i64);
            if c != rat(0) {
                rhs = &rhs + &f_poly(n, k, e2, eps, q)?.scale(&c);
            }
        }
    }
    Ok(g == rhs)
}

/// `g_{e1}(n, m, r, X) = sum_{e3} m(U_r^{e3}, U_m^{e1}) g_{e3}(n, r, r, X)`, `0 <= r <= m < n`.
pub fn check_ind_of_g(n: i64, m: i64, r: i64, e1: i32, eps: i32, q: QValue) -> Result<bool> {
    let lhs = g_poly(n, m, r, e1, eps, q)?;
    let e1n = if m == 0 { 1 } else { e1 };
    let mut rhs = Poly::zero();
    for &e3 in signs_for(r) {
        let c = m_nd(r, e3, m, e1n, q);
        if c != rat(0) {
            rhs = &rhs + &g_poly(n, r, r, e3, eps, q)?.scale(&c);
        }
    }
    Ok(lhs == rhs)
}

/// `sum_{r=0}^{m(n,t)} (-1)^r q^{(n-r)(n-r-1)/2} q^{rt} g(n, m, r, X) = F_{e1}(n, m, X)`.
pub fn check_sum_of_g(n: i64, t: i64, e1: i32, eps: i32, q: QValue) -> Result<bool> {
    let m = n - t;
    if t == 0 && e1 != eps {
        return Err(Error::InvalidInput("for t = 0 the block sign is the ambient sign".into()));
    }
    let e1 = if m == 0 { 1 } else { e1 };
    let mut lhs = Poly::zero();
    for r in 0..=m_bound(n, t) {
        let c = rat(sign_pow(r) as i64) * q.pow((n - r) * (n - r - 1) / 2 + r * t);
        lhs = &lhs + &g_poly(n, m, r, e1, eps, q)?.scale(&c);
    }
    Ok(lhs == big_f_poly(n, m, e1, eps, q)?)
}

fn iso_count(i: i64, s: i64, e2: i32, target_dim: i64, target_sign: i32, q: QValue) -> Rat {
    ratio(isometry_count(
        FqQuadSpace::new((i - s) as u32, s as u32, e2),
        FqQuadSpace::nondeg(target_dim as u32, target_sign),
        q,
    ))
}

/// `prod_{l=1}^{n-i-1}(1-q^{2l}) |O(0_{i-s} ⊥ U_s^{e2}, U_n^{-ε})| = (-1)^{n-i-1} q^{i(i-1)/2} I_ε(n) f_{e2}(n,s,q^{-i})`.
pub fn check_tran_to_poly(n: i64, i: i64, s: i64, e2: i32, eps: i32, q: QValue) -> Result<bool> {
    if !(0 <= s && s <= i && i < n) {
        return Err(Error::InvalidInput(format!("need 0 <= s <= i < n, got ({n},{i},{s})")));
    }
    let e2 = if s == 0 { 1 } else { e2 };
    let prod = (1..=n - i - 1).fold(rat(1), |a, l| a * (rat(1) - q.pow(2 * l)));
    let lhs = prod * iso_count(i, s, e2, n, -eps, q);
    let rhs = rat(sign_pow(n - i - 1) as i64)
        * q.pow(i * (i - 1) / 2)
        * i_eps(n, eps, q)
        * f_poly(n, s, e2, eps, q)?.eval(&q.pow(-i));
    Ok(lhs == rhs)
}

/// Second translation: target `U_{n'}^{-ε}` with `n' - n > 0` even, `0 <= s <= i <= n`, `s < n`.
pub fn check_tran_to_poly_pair(n2: i64, n: i64, i: i64, s: i64, e2: i32, eps: i32, q: QValue) -> Result<bool> {
    if !(n2 > n && (n2 - n) % 2 == 0 && 0 <= s && s <= i && i <= n && s < n) {
        return Err(Error::InvalidInput(format!("bad indices ({n2},{n},{i},{s})")));
    }
    let e2 = if s == 0 { 1 } else { e2 };
    let prod = (0..=n - i - 1).fold(rat(1), |a, l| a * (rat(1) - q.pow(2 * l + n2 - n)));
    let lhs = prod * iso_count(i, s, e2, n2, -eps, q);
    let rhs = rat(sign_pow(n - i) as i64)
        * q.pow(i * (i - 1) / 2)
        * i_eps_pair(n2, n, eps, q)
        * f_poly(n, s, e2, eps, q)?.eval(&q.pow((n2 - n) / 2 - i));
    Ok(lhs == rhs)
}

/// Data of `L = I_{n-t}^{e1} ⊥ L_2` with `L_2` of full type `t`.
fn split_type(l: &GenusSymbol, q: QValue) -> Result<(i64, i64, i32, i32)> {
    if !l.is_integral() {
        return Err(Error::NonIntegral);
    }
    let st = l.stats();
    Ok((st.rank as i64, st.t as i64, l.unimodular_sign(), l.chi(q.get())))
}

/// The `g`-expansion of `(Pden^{n-i})'(I_n, L)`:
/// `2 I_ε(n) sum_{r=0}^{m(n,t)} binom(n-r, i-r) (-1)^{i-r+n-1} q^{(i-r)(i-r-1)/2} q^{r(n-m)} g(n,m,r,q^{-i})`.
pub fn pden_prime_piece_via_g(l: &GenusSymbol, i: i64, q: QValue) -> Result<Rat> {
    let (n, t, e1, eps) = split_type(l, q)?;
    let m = n - t;
    let x = q.pow(-i);
    let mut sum = rat(0);
    for r in 0..=m_bound(n, t) {
        let b = q_binomial_rat(n - r, i - r, q);
        if b == rat(0) {
            continue;
        }
        sum += b
            * rat(sign_pow(i - r + n - 1) as i64)
            * q.pow((i - r) * (i - r - 1) / 2 + r * (n - m))
            * g_poly(n, m, r, e1, eps, q)?.eval(&x);
    }
    Ok(rat(2) * i_eps(n, eps, q) * sum)
}

/// Compares `-2 d/dX Pden^{n-i}(I_n^{-ε}, L, X)|_{X=1}` with the `g`-expansion for `0 <= i <= n-1`.
pub fn check_pden_prime_to_g(l: &GenusSymbol, q: QValue) -> Result<bool> {
    let (n, _, _, eps) = split_type(l, q)?;
    for i in 0..n {
        let piece = pden_piece(n as u32, -eps, l, i as u32, q)?;
        if minus_two_derivative_at_one(&piece) != pden_prime_piece_via_g(l, i, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Second bridge: `Pden^{n-i}(I_{n'}^{-ε}, L, q^{n'-n})` against the `g`-expansion with `I_ε(n', n)`,
/// for `t > 0` and `n' - n > 0` even.
pub fn check_pden_to_g_pair(l: &GenusSymbol, n2: i64, q: QValue) -> Result<bool> {
    let (n, t, e1, eps) = split_type(l, q)?;
    let m = n - t;
    if t == 0 || n2 <= n || (n2 - n) % 2 != 0 {
        return Err(Error::InvalidInput("needs t > 0 and n' - n positive even".into()));
    }
    for i in 0..=n {
        let piece = pden_piece(n2 as u32, -eps, l, i as u32, q)?;
        let lhs = piece.eval(&q.pow(n2 - n));
        let x = q.pow((n2 - n) / 2 - i);
        let mut sum = rat(0);
        for r in 0..=m {
            let b = q_binomial_rat(n - r, i - r, q);
            if b == rat(0) {
                continue;
            }
            sum += b
                * rat(sign_pow(i - r + n) as i64)
                * q.pow((i - r) * (i - r - 1) / 2 + r * (n - m))
                * g_poly(n, m, r, e1, eps, q)?.eval(&x);
        }
        if lhs != i_eps_pair(n2, n, eps, q) * sum {
            return Ok(false);
        }
    }
    Ok(true)
}
