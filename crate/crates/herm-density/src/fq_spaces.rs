//! Quadratic spaces over `F_q`: isometric embedding counts `|O(U,V)|`,
//! subspace counts `m(U,V)`, and the sign bookkeeping `delta`, `alpha`, `beta`.

use crate::arith::{ipow, rat, sign_pow, Int, Rat};
use crate::q_combinatorics::{gl_order, q_binomial, q_binomial_rat, QValue};
use num_traits::{One, Zero};
use serde::Serialize;
use std::fmt;

/// `0_j ⊥ U_k^sign`; the sign is normalized to `+1` when `k = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FqQuadSpace {
    pub radical_dim: u32,
    pub nondeg_dim: u32,
    pub sign: i32,
}

impl FqQuadSpace {
    pub fn new(radical_dim: u32, nondeg_dim: u32, sign: i32) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be ±1");
        let sign = if nondeg_dim == 0 { 1 } else { sign };
        FqQuadSpace { radical_dim, nondeg_dim, sign }
    }

    /// Nondegenerate `U_k^sign`.
    pub fn nondeg(k: u32, sign: i32) -> Self {
        Self::new(0, k, sign)
    }

    /// Totally isotropic `0_j`.
    pub fn radical(j: u32) -> Self {
        Self::new(j, 0, 1)
    }

    pub fn dim(&self) -> u32 {
        self.radical_dim + self.nondeg_dim
    }
}

impl fmt::Display for FqQuadSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign > 0 { '+' } else { '-' };
        write!(f, "0_{} ⊥ U_{}^{}", self.radical_dim, self.nondeg_dim, s)
    }
}

fn to_int(x: Rat) -> Int {
    assert!(x.is_integer(), "count {x} is not integral");
    x.to_integer()
}

/// `|O(0_j ⊥ U_k^{e1}, U_m^e)|` for a nondegenerate target.
fn isometry_into_nondeg(j: i64, k: i64, e1: i32, m: i64, e: i32, q: QValue) -> Int {
    if j + k > m {
        return Int::zero();
    }
    if j + k == 0 {
        return Int::one();
    }
    let e1 = if k == 0 { 1 } else { e1 };
    let s = j + k;
    let mut x = q.pow(s * (2 * m - s - 1) / 2);
    let lo = (m - k).div_euclid(2) + 1 - j;
    let hi = (m - 1).div_euclid(2);
    for l in lo..=hi {
        x *= rat(1) - q.pow(-2 * l);
    }
    let ee1 = rat((e * e1) as i64);
    let ev = rat(e as i64);
    let case = match (m.rem_euclid(2), k.rem_euclid(2)) {
        (1, 1) => rat(1) + ee1 * q.pow(-(m - k) / 2 + j),
        (1, 0) => rat(1),
        (0, 1) => rat(1) - ev * q.pow(-m / 2),
        _ => (rat(1) - ev * q.pow(-m / 2)) * (rat(1) + ee1 * q.pow(-(m - k) / 2 + j)),
    };
    to_int(x * case)
}

/// `|O(U_k^e, U_k^e)|`, the order of the orthogonal group.
pub fn orthogonal_group_order(k: u32, sign: i32, q: QValue) -> Int {
    isometry_into_nondeg(0, k as i64, sign, k as i64, sign, q)
}

/// `|O(U,V)|`, the number of isometric embeddings of `U` into `V`.
pub fn isometry_count(u: FqQuadSpace, v: FqQuadSpace, q: QValue) -> Int {
    let (j, k) = (u.radical_dim as i64, u.nondeg_dim as i64);
    if v.radical_dim == 0 {
        return isometry_into_nondeg(j, k, u.sign, v.nondeg_dim as i64, v.sign, q);
    }
    let stab = ipow(q.get(), (j * k) as u32)
        * orthogonal_group_order(k as u32, u.sign, q)
        * gl_order(j as u32, q);
    stab * subspace_count(u, v, q)
}

/// `m(U,V)`, the number of subspaces of `V` isometric to `U`.
pub fn subspace_count(u: FqQuadSpace, v: FqQuadSpace, q: QValue) -> Int {
    let (j, k) = (u.radical_dim as i64, u.nondeg_dim as i64);
    if v.radical_dim == 0 {
        let emb = isometry_into_nondeg(j, k, u.sign, v.nondeg_dim as i64, v.sign, q);
        let stab = ipow(q.get(), (j * k) as u32)
            * orthogonal_group_order(k as u32, u.sign, q)
            * gl_order(j as u32, q);
        debug_assert!((&emb % &stab).is_zero());
        return emb / stab;
    }
    // Stratify by the dimension of the intersection with the radical.
    let t = v.radical_dim as i64;
    let base = FqQuadSpace::nondeg(v.nondeg_dim, v.sign);
    let mut total = Int::zero();
    for l in 0..=t.min(j) {
        let inner = FqQuadSpace::new((j - l) as u32, k as u32, u.sign);
        total += q_binomial(t, l, q)
            * ipow(q.get(), ((t - l) * (j + k - l)) as u32)
            * subspace_count(inner, base, q);
    }
    total
}

/// The sign of the orthogonal complement bookkeeping.
pub fn delta_sign(n: i64, k: i64, eps: i32, eps2: i32) -> i32 {
    assert!(0 <= k && k <= n, "delta requires 0 <= k <= n");
    if k == 0 {
        eps
    } else if k % 2 == 1 && (n - k) % 2 == 1 {
        -eps * eps2
    } else {
        eps * eps2
    }
}

/// `alpha(n) = q^{floor(n/2) floor((n-1)/2)}`.
pub fn alpha(n: i64, q: QValue) -> Int {
    if n <= 0 {
        return Int::one();
    }
    ipow(q.get(), ((n / 2) * ((n - 1) / 2)) as u32)
}

/// `beta_eps(n)`.
pub fn beta(n: i64, eps: i32) -> i32 {
    if n == 0 {
        1
    } else if n % 2 == 1 {
        sign_pow((n - 1) / 2)
    } else {
        eps * sign_pow(n / 2)
    }
}

pub fn alpha_beta(n: i64, eps: i32, q: QValue) -> (Int, i32) {
    (alpha(n, q), beta(n, eps))
}

/// Closed form for the number of totally isotropic `j`-subspaces of `U_n^eps`.
pub fn isotropic_count_closed(j: i64, n: i64, eps: i32, q: QValue) -> Int {
    let (d, e) = if n % 2 == 1 {
        ((n - 1) / 2, 1)
    } else {
        (n / 2 - (1 - eps as i64) / 2, 1 - eps as i64)
    };
    if j > d {
        return Int::zero();
    }
    let mut x = q_binomial(d, j, q);
    for l in 1..=j {
        x *= ipow(q.get(), (d + e - l) as u32) + 1;
    }
    x
}

fn m_nd(k: i64, sign: i32, n: i64, eps: i32, q: QValue) -> Rat {
    Rat::from_integer(subspace_count(
        FqQuadSpace::nondeg(k as u32, sign),
        FqQuadSpace::nondeg(n as u32, eps),
        q,
    ))
}

fn m_rad(j: i64, n: i64, eps: i32, q: QValue) -> Rat {
    Rat::from_integer(subspace_count(
        FqQuadSpace::radical(j as u32),
        FqQuadSpace::nondeg(n as u32, eps),
        q,
    ))
}

/// `sum_j (-1)^j q^{j(j-1)/2} m(0_j, U_n^eps) = alpha(n) beta_eps(n)`.
pub fn check_isotropic_weighted_sum(n: i64, eps: i32, q: QValue) -> bool {
    let lhs = (0..=n)
        .map(|j| rat(sign_pow(j) as i64) * q.pow(j * (j - 1) / 2) * m_rad(j, n, eps, q))
        .fold(Rat::zero(), |a, b| a + b);
    let rhs = Rat::from_integer(alpha(n, q)) * rat(beta(n, eps) as i64);
    lhs == rhs
}

/// Binomial-weighted isotropic sum against `sum_tau m(U_r^tau, U_n^eps) alpha(r) beta_tau(r)`.
pub fn check_binom_times_m_sum(r: i64, n: i64, eps: i32, q: QValue) -> bool {
    let lhs = (0..=r)
        .map(|j| {
            rat(sign_pow(j) as i64)
                * q.pow(j * (j - 1) / 2)
                * q_binomial_rat(n - j, r - j, q)
                * m_rad(j, n, eps, q)
        })
        .fold(Rat::zero(), |a, b| a + b);
    let taus: &[i32] = if r == 0 { &[1] } else { &[1, -1] };
    let rhs = taus
        .iter()
        .map(|&t| {
            m_nd(r, t, n, eps, q) * Rat::from_integer(alpha(r, q)) * rat(beta(r, t) as i64)
        })
        .fold(Rat::zero(), |a, b| a + b);
    lhs == rhs
}

/// Counting flags `U_i ⊂ U_r ⊂ U_n` in both orders.
pub fn check_flag_identity(i: i64, r: i64, n: i64, sigma: i32, dp: i32, eps: i32, q: QValue) -> bool {
    let sigma = if i == 0 { 1 } else { sigma };
    let dp = if r == 0 { 1 } else { dp };
    // a zero-dimensional space has sign +1; the sign data may demand -1
    let inner = delta_sign(r, i, dp, sigma);
    let lhs = if r == i && inner != 1 {
        Rat::zero()
    } else {
        m_nd(i, sigma, n, eps, q) * m_nd(r - i, inner, n - i, delta_sign(n, i, eps, sigma), q)
    };
    let rhs = m_nd(r, dp, n, eps, q) * m_nd(i, sigma, r, dp, q);
    lhs == rhs
}

/// The two ratio formulas for `m(U_r^{±}, U_n^eps)`; vacuous when a denominator vanishes.
pub fn check_quotient_ratios(r: i64, n: i64, eps: i32, e1: i32, q: QValue) -> bool {
    let one = rat(1);
    let ee1 = rat((eps * e1) as i64);
    let e1r = rat(e1 as i64);
    let mut ok = true;
    let den = m_nd(r, e1, n, eps, q);
    if r >= 1 && !den.is_zero() {
        // only the ratios the parity case needs; the others may have zero denominators
        let a = || (&one - &ee1 * q.pow(-(n - r) / 2)) / (&one + &ee1 * q.pow(-(n - r) / 2));
        let b = || (&one - &e1r * q.pow(-r / 2)) / (&one + &e1r * q.pow(-r / 2));
        let expected = match (r % 2, n % 2) {
            (1, 0) => one.clone(),
            (1, 1) => a(),
            (0, 1) => b(),
            _ => a() * b(),
        };
        ok &= m_nd(r, -e1, n, eps, q) / &den == expected;
    }
    if r >= 1 && r < n && !den.is_zero() {
        let num = &one - rat((sign_pow(n - r) * eps * e1) as i64) * q.pow(-((n - r) / 2));
        let dd = &one - rat((sign_pow(r + 1) * e1) as i64) * q.pow(-((r + 1) / 2));
        if !dd.is_zero() {
            let expected = q.pow(n - 2 * r - 1) * num / dd;
            ok &= m_nd(r + 1, e1, n, eps, q) / &den == expected;
        }
    }
    ok
}

/// `m(0_j ⊥ U_k^{e2}, U_n^eps) = q^{-jk} m(0_j, U_{n-k}^delta) m(U_k^{e2}, U_n^eps)`.
pub fn check_splitting(j: i64, k: i64, n: i64, eps: i32, e2: i32, q: QValue) -> bool {
    let e2 = if k == 0 { 1 } else { e2 };
    let lhs = Rat::from_integer(subspace_count(
        FqQuadSpace::new(j as u32, k as u32, e2),
        FqQuadSpace::nondeg(n as u32, eps),
        q,
    ));
    let rhs = q.pow(-j * k) * m_rad(j, n - k, delta_sign(n, k, eps, e2), q) * m_nd(k, e2, n, eps, q);
    lhs == rhs
}

/// Explicit enumeration over a prime field; the test oracle for the closed forms.
pub mod enumerate {
    use super::FqQuadSpace;
    use crate::arith::{int, legendre_int, nonresidue, sign_pow};

    /// Diagonal Gram realizing `0_j ⊥ U_k^sign` over `F_p`.
    pub fn diagonal_gram(s: FqQuadSpace, p: u64) -> Vec<i64> {
        let mut g = vec![0; s.radical_dim as usize];
        let k = s.nondeg_dim as usize;
        if k > 0 {
            // sign = legendre((-1)^{k(k-1)/2} det) and det is the last entry
            let twist = legendre_int(&int(sign_pow((k * (k - 1) / 2) as i64) as i64), p);
            let last = if twist == s.sign { 1 } else { nonresidue(p) };
            g.extend(std::iter::repeat(1).take(k - 1));
            g.push(last);
        }
        g
    }

    fn all_vectors(dim: usize, p: u64) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for _ in 0..dim {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..p as i64).map(move |a| {
                        let mut w = v.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn form(g: &[i64], x: &[i64], y: &[i64], p: i64) -> i64 {
        g.iter().zip(x).zip(y).map(|((a, b), c)| a * b * c).sum::<i64>().rem_euclid(p)
    }

    fn inv(a: i64, p: i64) -> i64 {
        (1..p).find(|b| (a * b).rem_euclid(p) == 1).unwrap()
    }

    /// Rank of a list of vectors over `F_p`.
    pub fn rank(rows: &[Vec<i64>], p: i64) -> usize {
        let mut m: Vec<Vec<i64>> = rows.to_vec();
        let cols = m.first().map_or(0, |r| r.len());
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..m.len()).find(|&i| m[i][c].rem_euclid(p) != 0) else {
                continue;
            };
            m.swap(r, piv);
            let iv = inv(m[r][c].rem_euclid(p), p);
            for i in 0..m.len() {
                if i != r && m[i][c].rem_euclid(p) != 0 {
                    let f = m[i][c] * iv;
                    for cc in 0..cols {
                        m[i][cc] = (m[i][cc] - f * m[r][cc]).rem_euclid(p);
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Isometry class of the symmetric form with Gram `gram` over `F_p`.
    pub fn classify(gram: &[Vec<i64>], p: u64) -> FqQuadSpace {
        let pi = p as i64;
        let n = gram.len();
        let mut a: Vec<Vec<i64>> = gram.iter().map(|r| r.iter().map(|x| x.rem_euclid(pi)).collect()).collect();
        let mut diag = Vec::new();
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            // find a vector with nonzero norm among basis vectors or sums
            let mut pivot = active.iter().copied().find(|&i| a[i][i] != 0);
            if pivot.is_none() {
                let pair = active.iter().flat_map(|&i| active.iter().map(move |&j| (i, j))).find(|&(i, j)| i < j && a[i][j] != 0);
                let Some((i, j)) = pair else { break };
                // e_i <- e_i + e_j has norm 2 a_ij != 0
                for c in 0..n {
                    a[i][c] = (a[i][c] + a[j][c]).rem_euclid(pi);
                }
                for r in 0..n {
                    a[r][i] = (a[r][i] + a[r][j]).rem_euclid(pi);
                }
                pivot = Some(i);
            }
            let i = pivot.unwrap();
            let d = a[i][i];
            let iv = inv(d, pi);
            active.retain(|&x| x != i);
            for &r in &active {
                let f = a[r][i] * iv % pi;
                for c in 0..n {
                    a[r][c] = (a[r][c] - f * a[i][c]).rem_euclid(pi);
                }
                for c in 0..n {
                    a[c][r] = (a[c][r] - f * a[c][i]).rem_euclid(pi);
                }
            }
            diag.push(d);
        }
        let k = diag.len();
        let det: i64 = diag.iter().fold(1, |acc, &x| acc * x % pi);
        let twist = sign_pow((k * (k.saturating_sub(1)) / 2) as i64) as i64;
        let sign = if k == 0 { 1 } else { legendre_int(&int(twist * det), p) };
        FqQuadSpace::new((n - k) as u32, k as u32, sign)
    }

    /// Number of injective isometric maps `U -> V` by backtracking.
    pub fn isometry_count(u: FqQuadSpace, v: FqQuadSpace, p: u64) -> u64 {
        let gu = diagonal_gram(u, p);
        let gv = diagonal_gram(v, p);
        let vecs = all_vectors(gv.len(), p);
        let pi = p as i64;
        let s = gu.len();
        fn rec(idx: usize, s: usize, chosen: &mut Vec<Vec<i64>>, vecs: &[Vec<i64>], gu: &[i64], gv: &[i64], p: i64) -> u64 {
            if idx == s {
                return (rank(chosen, p) == s) as u64;
            }
            let mut total = 0;
            for w in vecs {
                if form(gv, w, w, p) != gu[idx].rem_euclid(p) {
                    continue;
                }
                if chosen.iter().any(|c| form(gv, c, w, p) != 0) {
                    continue;
                }
                chosen.push(w.clone());
                if rank(chosen, p) == chosen.len() {
                    total += rec(idx + 1, s, chosen, vecs, gu, gv, p);
                }
                chosen.pop();
            }
            total
        }
        rec(0, s, &mut Vec::new(), &vecs, &gu, &gv, pi)
    }

    /// All subspaces of `F_p^dim` of dimension `s`, as reduced row echelon bases.
    pub fn subspaces(dim: usize, s: usize, p: u64) -> Vec<Vec<Vec<i64>>> {
        let pi = p as i64;
        let mut out = Vec::new();
        let pivots_sets = combinations(dim, s);
        for piv in pivots_sets {
            // free positions: for row r, columns c > piv[r] not in piv
            let mut free = Vec::new();
            for (r, &pc) in piv.iter().enumerate() {
                for c in pc + 1..dim {
                    if !piv.contains(&c) {
                        free.push((r, c));
                    }
                }
            }
            let total = (pi as u64).pow(free.len() as u32);
            for mut code in 0..total {
                let mut rows = vec![vec![0i64; dim]; s];
                for (r, &pc) in piv.iter().enumerate() {
                    rows[r][pc] = 1;
                }
                for &(r, c) in &free {
                    rows[r][c] = (code % p) as i64;
                    code /= p;
                }
                out.push(rows);
            }
        }
        out
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = combinations(n - 1, k);
        for mut c in combinations(n - 1, k - 1) {
            c.push(n - 1);
            out.push(c);
        }
        out
    }

    /// Number of subspaces of `V` isometric to `U`, by listing all subspaces.
    pub fn subspace_count(u: FqQuadSpace, v: FqQuadSpace, p: u64) -> u64 {
        let gv = diagonal_gram(v, p);
        let pi = p as i64;
        subspaces(gv.len(), u.dim() as usize, p)
            .into_iter()
            .filter(|basis| {
                let g: Vec<Vec<i64>> = basis
                    .iter()
                    .map(|x| basis.iter().map(|y| form(&gv, x, y, pi)).collect())
                    .collect();
                classify(&g, p) == u
            })
            .count() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: u64) -> QValue {
        QValue::new(v).unwrap()
    }

    #[test]
    fn examples() {
        let u5 = FqQuadSpace::nondeg(5, 1);
        assert_eq!(isometry_count(FqQuadSpace::radical(0), u5, q(3)), Int::from(1));
        let h = FqQuadSpace::nondeg(2, 1);
        assert_eq!(isometry_count(FqQuadSpace::radical(1), h, q(3)), Int::from(4));
        assert_eq!(isometry_count(h, h, q(3)), Int::from(4));
        assert_eq!(subspace_count(FqQuadSpace::radical(1), h, q(3)), Int::from(2));
        assert_eq!(
            subspace_count(FqQuadSpace::radical(1), FqQuadSpace::nondeg(2, -1), q(3)),
            Int::from(0)
        );
        assert_eq!(subspace_count(h, h, q(5)), Int::from(1));
    }

    #[test]
    fn delta_and_alpha_beta() {
        assert_eq!(delta_sign(4, 0, -1, 1), -1);
        assert_eq!(delta_sign(4, 1, 1, -1), 1);
        assert_eq!(delta_sign(5, 2, -1, -1), 1);
        assert_eq!(alpha_beta(0, 1, q(3)), (Int::from(1), 1));
        assert_eq!(alpha_beta(3, -1, q(3)), (Int::from(3), -1));
    }

    #[test]
    fn closed_isotropic_count() {
        for n in 1..=6 {
            for eps in [1, -1] {
                for j in 0..=n {
                    assert_eq!(
                        isotropic_count_closed(j, n, eps, q(3)),
                        subspace_count(FqQuadSpace::radical(j as u32), FqQuadSpace::nondeg(n as u32, eps), q(3)),
                        "j={j} n={n} eps={eps}"
                    );
                }
            }
        }
    }

    #[test]
    fn enumeration_classifies_gram() {
        for k in 0..=3u32 {
            for s in [1, -1] {
                let sp = FqQuadSpace::new(1, k, s);
                let g = enumerate::diagonal_gram(sp, 3);
                let m: Vec<Vec<i64>> = (0..g.len())
                    .map(|i| (0..g.len()).map(|j| if i == j { g[i] } else { 0 }).collect())
                    .collect();
                assert_eq!(enumerate::classify(&m, 3), sp);
            }
        }
    }
}
