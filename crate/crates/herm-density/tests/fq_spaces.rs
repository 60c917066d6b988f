//! Closed-form counts over `F_q` against explicit enumeration over `F_p`.

use herm_density::arith::int;
use herm_density::fq_spaces::{enumerate, isometry_count, orthogonal_group_order, subspace_count, FqQuadSpace};
use herm_density::QValue;
use proptest::prelude::*;

fn q(v: u64) -> QValue {
    QValue::new(v).unwrap()
}

fn spaces(max_dim: u32) -> Vec<FqQuadSpace> {
    let mut out = Vec::new();
    for j in 0..=max_dim {
        for k in 0..=max_dim - j {
            for sign in [1, -1] {
                if k == 0 && sign == -1 {
                    continue;
                }
                out.push(FqQuadSpace::new(j, k, sign));
            }
        }
    }
    out
}

#[test]
fn orthogonal_group_orders() {
    // standard orders: O^+(2) = 2(q-1), O^-(2) = 2(q+1), O(3) = 2q(q^2-1)
    assert_eq!(orthogonal_group_order(2, 1, q(3)), int(4));
    assert_eq!(orthogonal_group_order(2, -1, q(3)), int(8));
    assert_eq!(orthogonal_group_order(3, 1, q(3)), int(48));
    assert_eq!(orthogonal_group_order(1, 1, q(5)), int(2));
}

#[test]
fn counts_match_enumeration_over_f3() {
    let p = 3;
    for v in spaces(3) {
        for u in spaces(v.dim()) {
            let iso = isometry_count(u, v, q(p));
            let sub = subspace_count(u, v, q(p));
            assert_eq!(iso, int(enumerate::isometry_count(u, v, p) as i64), "|O({u:?},{v:?})|");
            assert_eq!(sub, int(enumerate::subspace_count(u, v, p) as i64), "m({u:?},{v:?})");
        }
    }
}

#[test]
fn classification_of_diagonal_grams() {
    for p in [3u64, 5] {
        for s in spaces(3) {
            let diag = enumerate::diagonal_gram(s, p);
            let n = diag.len();
            let gram: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i == j { diag[i] } else { 0 }).collect()).collect();
            assert_eq!(enumerate::classify(&gram, p), s, "p={p}");
        }
    }
}

proptest! {
    #[test]
    fn subspace_counts_sum_to_grassmannian(j in 0u32..3, k in 0u32..4, sign in prop::sample::select(vec![1, -1])) {
        prop_assume!(k > 0 || sign == 1);
        let v = FqQuadSpace::new(j, k, sign);
        let n = v.dim();
        for d in 0..=n {
            let total = spaces(d).into_iter().filter(|u| u.dim() == d).map(|u| subspace_count(u, v, q(3))).fold(int(0), |a, b| a + b);
            prop_assert_eq!(total, herm_density::q_combinatorics::q_binomial(n as i64, d as i64, q(3)));
        }
    }
}
