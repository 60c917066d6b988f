//! The polynomial families `f`, `h`, `g`, `F` and the identities linking them.

use herm_density::hermitian_lattice::{enumerate_symbols, GenusSymbol};
use herm_density::identity_lab::*;
use herm_density::QValue;
use proptest::prelude::*;

fn q(v: u64) -> QValue {
    QValue::new(v).unwrap()
}

fn sign() -> impl Strategy<Value = i32> {
    prop::sample::select(vec![1, -1])
}

fn qs() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7])
}

#[test]
fn f_has_degree_n_minus_one() {
    for n in 1..=5 {
        for s in 0..n {
            for e2 in [1, -1] {
                if s == 0 && e2 == -1 {
                    continue;
                }
                let f = f_poly(n, s, e2, 1, q(3)).unwrap();
                assert!(f.degree().map_or(true, |d| d <= (n - 1) as usize), "n={n} s={s}");
            }
        }
    }
    assert!(f_poly(2, 2, 1, 1, q(3)).is_err());
}

#[test]
fn bridges_for_small_integral_lattices() {
    for l in (1..=3).flat_map(|r| enumerate_symbols(r, 0, 2)) {
        assert!(check_pden_prime_to_g(&l, q(3)).unwrap(), "{l}");
        if l.stats().t > 0 {
            assert!(check_pden_to_g_pair(&l, l.rank() as i64 + 2, q(3)).unwrap(), "{l}");
        }
    }
}

#[test]
fn bridge_rejects_nonintegral() {
    let l: GenusSymbol = "-1H^1".parse().unwrap();
    assert!(pden_prime_piece_via_g(&l, 0, q(3)).is_err());
    assert!(check_pden_prime_to_g(&l, q(3)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn h_identities(n in 1i64..6, j in 0i64..6, e1 in sign(), eps in sign(), qv in qs()) {
        prop_assume!(j < n);
        prop_assert!(check_h_shift(n, j, e1, eps, q(qv)).unwrap());
        prop_assert!(check_h_recursion(n, j, e1, eps, q(qv)).unwrap());
    }

    #[test]
    fn g_identities(n in 1i64..7, m in 0i64..7, r in 0i64..7, e1 in sign(), eps in sign(), qv in qs()) {
        prop_assume!(m < n && r <= m);
        prop_assert!(check_ind_of_g(n, m, r, e1, eps, q(qv)).unwrap());
        prop_assert!(check_g_forms(n, m, r, e1, eps, q(qv)).unwrap());
        prop_assert!(check_g_rr_expansion(n, r, e1, eps, q(qv)).unwrap());
        if r > 0 {
            prop_assert!(check_g_rr_closed(n, r, e1, eps, q(qv)).unwrap());
        }
    }

    #[test]
    fn sum_of_g(n in 1i64..7, t in 0i64..7, e1 in sign(), eps in sign(), qv in qs()) {
        prop_assume!(t <= n && (t > 0 || e1 == eps));
        prop_assert!(check_sum_of_g(n, t, e1, eps, q(qv)).unwrap());
    }

    #[test]
    fn translation_to_polynomials(n in 1i64..6, i in 0i64..6, s in 0i64..6, e2 in sign(), eps in sign(), qv in qs()) {
        prop_assume!(i < n && s <= i && (s > 0 || e2 == 1));
        prop_assert!(check_tran_to_poly(n, i, s, e2, eps, q(qv)).unwrap());
        prop_assert!(check_tran_to_poly_pair(n + 2, n, i, s, e2, eps, q(qv)).unwrap());
    }
}
