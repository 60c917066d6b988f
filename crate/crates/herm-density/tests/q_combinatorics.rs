//! Gaussian binomials and the q-series identities built on them.

use herm_density::arith::{int, rat};
use herm_density::q_combinatorics::*;
use herm_density::{Poly, QValue};
use proptest::prelude::*;

fn q(v: u64) -> QValue {
    QValue::new(v).unwrap()
}

/// Counts `i`-dimensional subspaces of `F_p^n` by counting ordered bases.
fn subspaces_by_bases(n: u32, i: u32, p: u64) -> u64 {
    let ordered = |dim: u32, k: u32| (0..k).map(|l| p.pow(dim) - p.pow(l)).product::<u64>();
    ordered(n, i) / ordered(i, i)
}

#[test]
fn binomials_count_subspaces() {
    for p in [2u64, 3, 5] {
        for n in 0..=5u32 {
            for i in 0..=n {
                assert_eq!(q_binomial(n as i64, i as i64, q(p)), int(subspaces_by_bases(n, i, p) as i64), "n={n} i={i} p={p}");
            }
        }
    }
    assert_eq!(q_binomial(4, 2, q(3)), int(130));
    assert_eq!(q_binomial(3, 5, q(3)), int(0));
    assert_eq!(q_binomial(-1, 0, q(3)), int(0));
}

#[test]
fn gl_orders() {
    assert_eq!(gl_order(0, q(3)), int(1));
    assert_eq!(gl_order(2, q(2)), int(6));
    assert_eq!(gl_order(2, q(3)), int(48));
}

#[test]
fn identity_suite_small_n() {
    for qv in [2u64, 3, 4, 5, 7, 9] {
        let q = q(qv);
        for n in 0..=8 {
            assert!(check_q_binomial_theorem(n, q), "binomial theorem n={n} q={qv}");
            assert!(check_inverse_identity(n, q), "inverse identity n={n} q={qv}");
            for i in 0..=n + 1 {
                assert!(check_pascal(n, i, q), "pascal t={n} i={i} q={qv}");
            }
        }
    }
}

#[test]
fn vanishing_needs_low_degree() {
    let q = q(3);
    let x3 = Poly::monomial(rat(1), 3);
    assert_eq!(vanishing_sum(4, &x3, q), rat(0));
    // degree n is the first that survives
    assert_ne!(vanishing_sum(3, &x3, q), rat(0));
}

proptest! {
    #[test]
    fn binomial_symmetry(n in 0i64..10, i in 0i64..10, qv in prop::sample::select(vec![2u64, 3, 4, 5, 7, 9])) {
        prop_assume!(i <= n);
        prop_assert_eq!(q_binomial(n, i, q(qv)), q_binomial(n, n - i, q(qv)));
    }

    #[test]
    fn guess_identity(n in 0i64..7, t in 0i64..7, i in 0i64..7, qv in prop::sample::select(vec![3u64, 5])) {
        prop_assume!(t <= n && i <= t);
        prop_assert!(check_guess(n, t, i, q(qv)));
    }

    #[test]
    fn vanishing_for_low_degree(n in 1i64..7, coeffs in prop::collection::vec(-5i64..5, 1..7)) {
        prop_assume!((coeffs.len() as i64) <= n);
        let f = Poly::new(coeffs.into_iter().map(rat).collect());
        prop_assert_eq!(vanishing_sum(n, &f, q(3)), rat(0));
    }
}
