//! Named verification suites shared by the command line and the test targets.
//!
//! Each `check_*` function sweeps one family of identities over a parameter
//! range and returns a [`Tally`] recording the number of checks, failures and
//! the first counterexample with its full inputs. Suites bundle these in
//! dependency order so that a failure localizes to the lowest layer.

use crate::arith::{rat, rat_string, sign_pow, Rat};
use crate::error::{Error, Result};
use crate::fourier_checks::{
    containing_vertex_lattices, d_sum_standard, dden_split, is_horizontal, mu_identities, FlatConfiguration,
};
use crate::fq_spaces::{self, enumerate, FqQuadSpace};
use crate::hermitian_lattice::{
    chi_from_gram, count_isometric_overlattices, enumerate_symbols, jordan_decompose, t_max, GenusSymbol,
};
use crate::identity_lab as lab;
use crate::local_density::{
    coefficients_c, dden, den_poly, pden_from_den_roundtrip, pden_poly, pdden_closed, pdden_machine,
    verify_coefficient_system,
};
use crate::oracle::{den_oracle, pden_oracle};
use crate::poly::Poly;
use crate::q_combinatorics::{self as qc, QValue};
use num_traits::Zero;
use serde::Serialize;
use std::time::Instant;

/// Outcome of one family of checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Tally {
    pub name: String,
    pub checks: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl Tally {
    pub fn new(name: &str) -> Self {
        Tally { name: name.to_string(), ..Default::default() }
    }

    /// Records one check; `context` is only rendered for the first failure.
    pub fn record(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(context());
            }
        }
    }

    /// Records a check whose evaluation may fail; an error counts as a failure.
    pub fn record_result(&mut self, r: Result<bool>, context: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, context),
            Err(e) => self.record(false, || format!("{}: error {e}", context())),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

fn qs(values: &[u64]) -> Vec<QValue> {
    values.iter().map(|&q| QValue::new(q).expect("valid q")).collect()
}

fn signs(k: i64) -> &'static [i32] {
    if k == 0 {
        &[1]
    } else {
        &[1, -1]
    }
}

// ---------------------------------------------------------------- q-series

/// Gaussian binomial theorem, vanishing sums, inverse identity, Pascal rule
/// and the lattice-path identity, for `n <= n_max`.
pub fn check_q_identities(n_max: i64, q_values: &[u64]) -> Tally {
    let mut t = Tally::new("q-identities");
    for q in qs(q_values) {
        let qq = q.get();
        for n in 0..=n_max {
            t.record(qc::check_q_binomial_theorem(n, q), || format!("binomial theorem n={n} q={qq}"));
            t.record(qc::check_inverse_identity(n, q), || format!("inverse identity n={n} q={qq}"));
            for deg in 0..n {
                // X^deg and a dense polynomial of the same degree
                let mono = Poly::monomial(rat(1), deg as usize);
                let dense = Poly::new((0..=deg).map(|k| rat(2 * k - 3)).collect());
                for f in [mono, dense] {
                    let v = qc::vanishing_sum(n, &f, q);
                    t.record(v.is_zero(), || format!("vanishing sum n={n} deg={deg} q={qq}: {}", rat_string(&v)));
                }
            }
            for i in 0..=n + 1 {
                t.record(qc::check_pascal(n, i, q), || format!("pascal t={n} i={i} q={qq}"));
            }
            for tt in 0..=n {
                for i in 0..=tt {
                    t.record(qc::check_guess(n, tt, i, q), || format!("lattice path n={n} t={tt} i={i} q={qq}"));
                }
            }
        }
    }
    t
}

// ------------------------------------------------------------- F_q spaces

/// Closed-form counting identities for quadratic spaces of dimension `<= dim_max`.
pub fn check_counting_identities(dim_max: i64, q_values: &[u64]) -> Tally {
    let mut t = Tally::new("counting identities");
    for q in qs(q_values) {
        let qq = q.get();
        for n in 0..=dim_max {
            for &eps in signs(n) {
                t.record(fq_spaces::check_isotropic_weighted_sum(n, eps, q), || {
                    format!("isotropic weighted sum n={n} eps={eps} q={qq}")
                });
                for j in 0..=n {
                    let closed = fq_spaces::isotropic_count_closed(j, n, eps, q);
                    let general = fq_spaces::subspace_count(
                        FqQuadSpace::radical(j as u32),
                        FqQuadSpace::nondeg(n as u32, eps),
                        q,
                    );
                    t.record(closed == general, || format!("m(0_{j}, U_{n}^{eps}) q={qq}: {closed} vs {general}"));
                }
                for r in 0..=n {
                    t.record(fq_spaces::check_binom_times_m_sum(r, n, eps, q), || {
                        format!("binomial times m sum r={r} n={n} eps={eps} q={qq}")
                    });
                    for &e1 in signs(r) {
                        t.record(fq_spaces::check_quotient_ratios(r, n, eps, e1, q), || {
                            format!("quotient ratios r={r} n={n} eps={eps} e1={e1} q={qq}")
                        });
                    }
                    for i in 0..=r {
                        for &sigma in signs(i) {
                            for &dp in signs(r) {
                                t.record(fq_spaces::check_flag_identity(i, r, n, sigma, dp, eps, q), || {
                                    format!("flags i={i} r={r} n={n} sigma={sigma} dp={dp} eps={eps} q={qq}")
                                });
                            }
                        }
                    }
                }
                for j in 0..=n {
                    for k in 0..=n - j {
                        for &e2 in signs(k) {
                            t.record(fq_spaces::check_splitting(j, k, n, eps, e2, q), || {
                                format!("splitting j={j} k={k} n={n} eps={eps} e2={e2} q={qq}")
                            });
                        }
                    }
                }
            }
        }
    }
    t
}

/// All quadratic spaces over `F_q` of dimension `<= dim_max`.
fn all_spaces(dim_max: u32) -> Vec<FqQuadSpace> {
    let mut out = Vec::new();
    for d in 0..=dim_max {
        for j in 0..=d {
            let k = d - j;
            for &s in signs(k as i64) {
                out.push(FqQuadSpace::new(j, k, s));
            }
        }
    }
    out
}

/// `|O(U,V)|` and `m(U,V)` against explicit enumeration over `F_p`.
pub fn check_counting_brute_force(dim_max: u32, p: u64) -> Tally {
    let mut t = Tally::new("counting brute force");
    let q = QValue::new(p).expect("prime");
    let spaces = all_spaces(dim_max);
    for &v in &spaces {
        for &u in spaces.iter().filter(|u| u.dim() <= v.dim()) {
            let m_closed = fq_spaces::subspace_count(u, v, q);
            let m_enum = enumerate::subspace_count(u, v, p);
            t.record(m_closed == m_enum.into(), || format!("m({u:?}, {v:?}) p={p}: {m_closed} vs {m_enum}"));
            if u.radical_dim == 0 || v.radical_dim == 0 {
                let o_closed = fq_spaces::isometry_count(u, v, q);
                let o_enum = enumerate::isometry_count(u, v, p);
                t.record(o_closed == o_enum.into(), || format!("|O({u:?}, {v:?})| p={p}: {o_closed} vs {o_enum}"));
            }
        }
    }
    t
}

// ---------------------------------------------------------------- lattices

/// Symbol to Gram to Jordan round trip and `χ` from the determinant.
pub fn check_symbol_roundtrip(rank_max: u32, lo: i64, hi: i64, p: u64) -> Tally {
    let mut t = Tally::new("symbol round trip");
    for r in 1..=rank_max {
        for s in enumerate_symbols(r, lo, hi) {
            let g = s.gram(p);
            let back = jordan_decompose(&g).map(|d| d.symbol);
            t.record(back.as_ref() == Ok(&s), || format!("{s} -> {back:?} p={p}"));
            let chi = chi_from_gram(&g);
            t.record(chi == Ok(s.chi(p)), || format!("chi({s}) = {} but det gives {chi:?}", s.chi(p)));
            let parsed: std::result::Result<GenusSymbol, _> = s.to_string().parse();
            t.record(parsed.as_ref() == Ok(&s), || format!("{s} does not re-parse"));
        }
    }
    t
}

// ----------------------------------------------------------------- density

/// The table entry for `c_t` at `ε = +1`, as a function of `q`.
pub fn coefficient_table_entry(n: u32, t: u32, q: QValue) -> Rat {
    let qi = |e: i64| q.pow(e);
    let one = rat(1);
    match (t, n) {
        (2, 2..=6) => rat(sign_pow(n as i64 - 1) as i64) / (qi(n as i64 - 2) * (qi(1) + &one)),
        (4, 4) => one.clone() / (qi(2) * (qi(2) + &one)),
        (4, 5) => -one.clone() / (qi(4) * (qi(2) + &one)),
        (4, 6) => one.clone() / (qi(6) * (qi(2) + &one)),
        (6, 6) => -one.clone() / (qi(6) * (qi(3) + &one)),
        _ => Rat::zero(),
    }
}

/// `c_t` for `ε = +1`, `n = 2..6`, `t = 2, 4, 6` against the table.
pub fn check_coefficient_table(q_values: &[u64]) -> Tally {
    let mut t = Tally::new("coefficient table");
    for q in qs(q_values) {
        for n in 2..=6u32 {
            let c = coefficients_c(n, 1, q);
            for tt in [2u32, 4, 6] {
                let got = c.get(&tt).cloned().unwrap_or_else(Rat::zero);
                let want = coefficient_table_entry(n, tt, q);
                t.record(got == want, || {
                    format!("c_{tt} n={n} q={}: {} vs table {}", q.get(), rat_string(&got), rat_string(&want))
                });
            }
        }
    }
    t
}

/// Closed form of `c_{t_max}`: odd `n`, or even `n` with `ε = +1`.
pub fn c_tmax_closed(n: u32, q: QValue) -> Rat {
    let n = n as i64;
    if n % 2 == 1 {
        let h = (n - 1) / 2;
        rat(sign_pow((n + 1) / 2) as i64) / (q.pow(h * h) * (q.pow(h) + rat(1)))
    } else {
        let h = n / 2;
        rat(sign_pow(h) as i64) / (q.pow(h * (h - 1)) * (q.pow(h) + rat(1)))
    }
}

pub fn check_c_tmax(odd_max: u32, even_max: u32, q_values: &[u64]) -> Tally {
    let mut t = Tally::new("c_tmax closed forms");
    for q in qs(q_values) {
        let cases = (3..=odd_max).step_by(2).map(|n| (n, [1, -1].to_vec())).chain((2..=even_max).step_by(2).map(|n| (n, vec![1])));
        for (n, eps_list) in cases {
            for eps in eps_list {
                let tm = t_max(n, eps);
                let got = coefficients_c(n, eps, q).get(&tm).cloned();
                let want = c_tmax_closed(n, q);
                t.record(got.as_ref() == Some(&want), || {
                    format!("c_tmax n={n} eps={eps} q={}: {got:?} vs {}", q.get(), rat_string(&want))
                });
            }
        }
    }
    t
}

/// `∂Pden` from the derivative machinery equals the closed formula.
pub fn check_main_theorem(rank_max: u32, lo: i64, hi: i64, q_values: &[u64]) -> Tally {
    use rayon::prelude::*;
    let mut t = Tally::new("derived primitive density formula");
    for q in qs(q_values) {
        let symbols: Vec<GenusSymbol> = (1..=rank_max).flat_map(|r| enumerate_symbols(r, lo, hi)).collect();
        let bad: Vec<(GenusSymbol, Rat, Rat)> = symbols
            .par_iter()
            .filter_map(|s| {
                let (a, b) = (pdden_machine(s, q), pdden_closed(s, q));
                (a != b).then(|| (s.clone(), a, b))
            })
            .collect();
        for s in &symbols {
            let hit = bad.iter().find(|(x, _, _)| x == s);
            t.record(hit.is_none(), || {
                let (_, a, b) = hit.unwrap();
                format!("∂Pden({s}) q={}: machine {} vs closed {}", q.get(), rat_string(a), rat_string(b))
            });
        }
    }
    t
}

/// `∂Den(Λ_{2i}^♯) = 0` and `∂Den(I_n) = δ_odd(n)`.
pub fn check_defining_system(n_max: u32, q_values: &[u64]) -> Tally {
    let mut t = Tally::new("defining system");
    for q in qs(q_values) {
        for n in 1..=n_max {
            for eps in [1, -1] {
                t.record_result(verify_coefficient_system(n, eps, q), || format!("n={n} eps={eps} q={}", q.get()));
            }
        }
    }
    t
}

/// `∂Den(I_ℓ ⊥ L_2) - ∂Den(L_2) = n(I_{n_2}, L_2)(δ_odd(n) - δ_odd(n_2))`.
pub fn check_cancellation(l_max: u32, rank2_max: u32, hi: i64, q: QValue) -> Tally {
    let mut t = Tally::new("cancellation law");
    let p = q.get();
    let odd = |n: u32| (n % 2) as i64;
    for r2 in 1..=rank2_max {
        for l2 in enumerate_symbols(r2, 0, hi) {
            for ell in 1..=l_max {
                for s in [1, -1] {
                    let l = GenusSymbol::unimodular(ell, s).orthogonal_sum(&l2, p);
                    let res = (|| -> Result<bool> {
                        let lhs = dden(&l, q)? - dden(&l2, q)?;
                        let iso = count_isometric_overlattices(&GenusSymbol::unimodular(r2, l2.chi(p)), &l2, p);
                        let rhs = crate::arith::Int::from(iso as i64 * (odd(ell + r2) - odd(r2)));
                        Ok(lhs == rhs)
                    })();
                    t.record_result(res, || format!("L = I_{ell}^{s} ⊥ {l2}, q={p}"));
                }
            }
        }
    }
    t
}

/// `Pden` recomputed from `Den` over `L ⊆ L' ⊆ π^{-1}L`.
pub fn check_roundtrip(symbols: &[GenusSymbol], q: QValue) -> Tally {
    let mut t = Tally::new("Pden from Den round trip");
    for s in symbols {
        t.record_result(pden_from_den_roundtrip(s, q), || format!("L = {s}, q={}", q.get()));
    }
    t
}

/// Integrality of `∂Den` together with the agreement of its two routes.
pub fn check_dden_routes(rank_max: u32, hi: i64, q: QValue) -> Tally {
    let mut t = Tally::new("∂Den routes and integrality");
    for r in 1..=rank_max {
        for s in enumerate_symbols(r, 0, hi) {
            t.record_result(dden(&s, q).map(|_| true), || format!("L = {s}, q={}", q.get()));
        }
    }
    t
}

// ------------------------------------------------------------ identity lab

/// Every polynomial identity of the `f, h, g, F` family for `n <= n_max`.
pub fn check_polynomial_identities(n_max: i64, q_values: &[u64]) -> Tally {
    let mut t = Tally::new("polynomial identities");
    for q in qs(q_values) {
        let qq = q.get();
        for n in 1..=n_max {
            for eps in [1, -1] {
                for e1 in [1, -1] {
                    if n < n_max {
                        for j in 0..n {
                            t.record_result(lab::check_h_shift(n, j, e1, eps, q), || {
                                format!("h shift n={n} j={j} e1={e1} eps={eps} q={qq}")
                            });
                            t.record_result(lab::check_h_recursion(n, j, e1, eps, q), || {
                                format!("h recursion n={n} j={j} e1={e1} eps={eps} q={qq}")
                            });
                        }
                    }
                    for r in 0..n {
                        if r > 0 {
                            t.record_result(lab::check_g_rr_closed(n, r, e1, eps, q), || {
                                format!("g(r,r) closed n={n} r={r} e1={e1} eps={eps} q={qq}")
                            });
                        }
                        t.record_result(lab::check_g_rr_expansion(n, r, e1, eps, q), || {
                            format!("g(r,r) expansion n={n} r={r} e1={e1} eps={eps} q={qq}")
                        });
                    }
                    for m in 0..n {
                        for r in 0..=m {
                            t.record_result(lab::check_ind_of_g(n, m, r, e1, eps, q), || {
                                format!("ind of g n={n} m={m} r={r} e1={e1} eps={eps} q={qq}")
                            });
                            t.record_result(lab::check_g_forms(n, m, r, e1, eps, q), || {
                                format!("g alternate form n={n} m={m} r={r} e1={e1} eps={eps} q={qq}")
                            });
                        }
                    }
                    for tt in 0..=n {
                        if tt == 0 && e1 != eps {
                            continue;
                        }
                        t.record_result(lab::check_sum_of_g(n, tt, e1, eps, q), || {
                            format!("sum of g n={n} t={tt} e1={e1} eps={eps} q={qq}")
                        });
                    }
                }
                for i in 0..n {
                    for s in 0..=i {
                        for &e2 in signs(s) {
                            t.record_result(lab::check_tran_to_poly(n, i, s, e2, eps, q), || {
                                format!("translation n={n} i={i} s={s} e2={e2} eps={eps} q={qq}")
                            });
                        }
                    }
                }
                for n2 in [n + 2, n + 4] {
                    for i in 0..=n {
                        for s in 0..=i.min(n - 1) {
                            for &e2 in signs(s) {
                                t.record_result(lab::check_tran_to_poly_pair(n2, n, i, s, e2, eps, q), || {
                                    format!("translation n'={n2} n={n} i={i} s={s} e2={e2} eps={eps} q={qq}")
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    t
}

/// The `g`-expansions of the derivative of `Pden` for integral genera.
pub fn check_pden_bridges(rank_max: u32, hi: i64, q_values: &[u64]) -> Tally {
    let mut t = Tally::new("Pden' to g bridges");
    for q in qs(q_values) {
        let qq = q.get();
        for r in 1..=rank_max {
            for s in enumerate_symbols(r, 0, hi) {
                t.record_result(lab::check_pden_prime_to_g(&s, q), || format!("Pden' to g L={s} q={qq}"));
                if s.stats().t > 0 {
                    let n2 = r as i64 + 2;
                    t.record_result(lab::check_pden_to_g_pair(&s, n2, q), || {
                        format!("Pden to g L={s} n'={n2} q={qq}")
                    });
                }
            }
        }
    }
    t
}

// ----------------------------------------------------------------- fourier

/// Counting propositions for every full type genus of rank `<= rank_max`, `val <= val_max`.
pub fn check_mu_identities(rank_max: u32, val_max: i64, q: QValue) -> Tally {
    let mut t = Tally::new("μ identities");
    for r in 1..=rank_max {
        for s in enumerate_symbols(r, 1, val_max).into_iter().filter(|s| s.stats().val <= val_max) {
            let rep = mu_identities(&s, q);
            t.record(rep.as_ref().is_ok_and(|r| r.holds()), || format!("L = {s}, q={}: {rep:?}", q.get()));
        }
    }
    t
}

/// `D(L'♭)(x) = 0` for non-horizontal flat lattices, with the grouped cross-checks.
pub fn check_d_sums(rank_max: u32, val_max: i64, valx_max: u32, q: QValue) -> Tally {
    let mut t = Tally::new("D-sum vanishing");
    let p = q.get();
    for r in 1..=rank_max {
        for s in enumerate_symbols(r, 0, val_max).into_iter().filter(|s| s.stats().val <= val_max) {
            for chi in [1, -1] {
                if is_horizontal(&s, chi, p) {
                    continue;
                }
                for k in 1..=valx_max {
                    let rep = d_sum_standard(&s, chi, k, q);
                    let ok = rep.as_ref().is_ok_and(|r| r.value.is_zero() && r.all_consistent());
                    t.record(ok, || format!("L'♭ = {s}, χ(V) = {chi}, val(x) = {k}, q={p}: {rep:?}"));
                }
            }
        }
    }
    t
}

/// Horizontal iff exactly one vertex lattice contains it; the vertical/horizontal split adds up.
pub fn check_horizontality(rank_max: u32, val_max: i64, q: QValue) -> Tally {
    let mut t = Tally::new("horizontality");
    let p = q.get();
    for r in 1..=rank_max {
        for s in enumerate_symbols(r, 0, val_max).into_iter().filter(|s| s.stats().val <= val_max) {
            for chi in [1, -1] {
                let res = (|| -> Result<bool> {
                    let cfg = FlatConfiguration::standard(&s, chi, 1, p)?;
                    let unique = containing_vertex_lattices(&cfg)? == 1;
                    let split = dden_split(&cfg, q)?;
                    let unimodular_ok = !s.is_unimodular() || split.vertical.is_zero();
                    Ok(unique == is_horizontal(&s, chi, p) && unimodular_ok)
                })();
                t.record_result(res, || format!("L♭ = {s}, χ(V) = {chi}, q={p}"));
            }
        }
    }
    t
}

// ------------------------------------------------------------------ oracle

/// One oracle comparison: `Den(M ⊥ H^k, L)` by counting against the density polynomial.
pub fn oracle_case(m: &GenusSymbol, l: &GenusSymbol, k: u32, max_depth: u32, primitive: bool, q: QValue) -> Result<bool> {
    let p = q.get();
    let (mg, lg) = (m.gram(p), l.gram(p));
    let x = q.pow(-2 * k as i64);
    let (counted, expected) = if primitive {
        (pden_oracle(&mg, &lg, k, max_depth, q)?.value, pden_poly(m.rank(), m.chi(p), l, q).eval(&x))
    } else {
        (den_oracle(&mg, &lg, k, max_depth, q)?.value, den_poly(m.rank(), m.chi(p), l, q)?.eval(&x))
    };
    Ok(counted == expected)
}

/// The oracle sweep: targets `I_1^±, I_2^±`, integral `L` of rank `<= rank(M)` and
/// invariants `<= inv_max`, `k <= k_max`.
pub fn check_oracle(inv_max: i64, k_max: u32, max_depth: u32, q: QValue) -> Tally {
    let mut t = Tally::new("oracle agreement");
    for mr in 1..=2u32 {
        for ms in [1, -1] {
            let m = GenusSymbol::unimodular(mr, ms);
            for lr in 1..=mr {
                for l in enumerate_symbols(lr, 0, inv_max) {
                    for k in 0..=k_max {
                        t.record_result(oracle_case(&m, &l, k, max_depth, false, q), || {
                            format!("M = {m}, L = {l}, k = {k}, depth <= {max_depth}, q={}", q.get())
                        });
                    }
                }
            }
        }
    }
    t
}

/// Primitive counts at parameters small enough for direct enumeration.
pub fn check_oracle_primitive(q: QValue) -> Tally {
    let mut t = Tally::new("primitive oracle agreement");
    let cases: Vec<(&str, &str, u32)> = vec![
        ("0^1+", "0^1+", 0),
        ("0^1-", "0^1-", 0),
        ("0^1+", "2^1+", 0),
        ("0^1+", "0^1+", 1),
        ("0^1-", "2^1-", 1),
        ("0^2+", "0^1+", 0),
        ("0^2-", "2^1-", 0),
    ];
    for (m, l, k) in cases {
        let (ms, ls): (GenusSymbol, GenusSymbol) = (m.parse().expect("symbol"), l.parse().expect("symbol"));
        t.record_result(oracle_case(&ms, &ls, k, 3, true, q), || format!("primitive M = {m}, L = {l}, k = {k}"));
    }
    t
}

// ------------------------------------------------------------------ suites

/// Suite names in dependency order.
pub const SUITES: [&str; 7] = ["q_combinatorics", "fq_spaces", "lattice", "density", "identity_lab", "fourier", "oracle"];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub parts: Vec<Tally>,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.parts.iter().all(|t| t.passed())
    }

    pub fn first_failure(&self) -> Option<(&str, &str)> {
        self.parts
            .iter()
            .find_map(|t| t.first_failure.as_deref().map(|f| (t.name.as_str(), f)))
    }
}

/// Runs a named suite at `q` (the lattice-level parts need a prime `q`).
pub fn run_suite(name: &str, q: QValue) -> Result<SuiteReport> {
    let start = Instant::now();
    let p = q.get();
    let prime = q.is_prime() && p % 2 == 1;
    let need_prime = || {
        if prime {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("suite {name} needs an odd prime q, got {p}")))
        }
    };
    let parts = match name {
        "q_combinatorics" => vec![check_q_identities(8, &[p])],
        "fq_spaces" => {
            let mut v = vec![check_counting_identities(6, &[p])];
            if prime {
                v.push(check_counting_brute_force(4, p));
            }
            v
        }
        "lattice" => {
            need_prime()?;
            vec![check_symbol_roundtrip(4, -2, 3, p), check_dden_routes(3, 3, q)]
        }
        "density" => {
            need_prime()?;
            let mut symbols = Vec::new();
            for r in 1..=3 {
                symbols.extend(enumerate_symbols(r, 0, 2));
            }
            let mut v = vec![check_coefficient_table(&[p]), check_c_tmax(7, 6, &[p]), check_main_theorem(4, -2, 4, &[p])];
            v.push(check_defining_system(6, &[p]));
            v.push(check_cancellation(2, 2, 3, q));
            v.push(check_roundtrip(&symbols, q));
            v
        }
        "identity_lab" => {
            need_prime()?;
            vec![check_polynomial_identities(6, &[p]), check_pden_bridges(4, 2, &[p])]
        }
        "fourier" => {
            need_prime()?;
            vec![check_mu_identities(3, 7, q), check_d_sums(2, 4, 3, q), check_horizontality(2, 2, q)]
        }
        "oracle" => {
            need_prime()?;
            vec![check_oracle(2, 1, 3, q), check_oracle_primitive(q)]
        }
        other => return Err(Error::InvalidInput(format!("unknown suite {other}; known: {}", SUITES.join(", ")))),
    };
    Ok(SuiteReport { suite: name.to_string(), parts, elapsed_ms: start.elapsed().as_millis() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac;

    #[test]
    fn table_entries_at_three() {
        let q = QValue::new(3).unwrap();
        assert_eq!(coefficient_table_entry(4, 2, q), frac(-1, 36));
        assert_eq!(coefficient_table_entry(4, 4, q), frac(1, 90));
        assert_eq!(coefficient_table_entry(2, 4, q), rat(0));
    }

    #[test]
    fn tally_keeps_first_failure() {
        let mut t = Tally::new("x");
        t.record(true, || unreachable!());
        t.record(false, || "first".into());
        t.record(false, || "second".into());
        assert_eq!((t.checks, t.failures, t.first_failure.as_deref()), (3, 2, Some("first")));
        assert!(!t.passed());
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", QValue::new(3).unwrap()).is_err());
    }
}
