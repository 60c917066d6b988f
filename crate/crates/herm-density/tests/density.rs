//! Density polynomials, derived densities and the coefficient system.

use herm_density::arith::{frac, rat, rat_string};
use herm_density::hermitian_lattice::{enumerate_symbols, GenusSymbol};
use herm_density::local_density::*;
use herm_density::{Poly, QValue};
use num_bigint::BigInt;
use proptest::prelude::*;

fn q(v: u64) -> QValue {
    QValue::new(v).unwrap()
}

fn sym(s: &str) -> GenusSymbol {
    s.parse().unwrap()
}

#[test]
fn coefficient_rows_at_three() {
    let c4 = coefficients_c(4, 1, q(3));
    assert_eq!(c4.get(&2), Some(&frac(-1, 36)));
    assert_eq!(c4.get(&4), Some(&frac(1, 90)));
    let c2 = coefficients_c(2, 1, q(3));
    assert_eq!(c2.get(&2), Some(&frac(-1, 4)));
    assert!(coefficients_c(0, 1, q(3)).is_empty());
}

#[test]
fn defining_system_holds() {
    for qv in [3, 5] {
        for n in 1..=5 {
            for eps in [1, -1] {
                assert!(verify_coefficient_system(n, eps, q(qv)).unwrap(), "n={n} eps={eps} q={qv}");
            }
        }
    }
}

#[test]
fn derived_density_of_unimodular_lattices() {
    for n in 1..=4u32 {
        for sign in [1, -1] {
            let l = GenusSymbol::unimodular(n, sign);
            let expected = BigInt::from(n % 2);
            assert_eq!(dden(&l, q(3)).unwrap(), expected, "{l}");
        }
    }
}

#[test]
fn primitive_derived_density_example() {
    assert_eq!(pdden_machine(&sym("0^3+"), q(3)), rat(1));
    assert_eq!(pdden_closed(&sym("0^3+"), q(3)), rat(1));
}

#[test]
fn very_negative_invariants_vanish() {
    assert_eq!(pden_poly(2, 1, &sym("-2^1+,0^1+"), q(3)), Poly::zero());
}

#[test]
fn den_poly_needs_prime_q() {
    assert!(den_poly(1, 1, &sym("0^1+"), q(9)).is_err());
}

#[test]
fn dden_routes_agree() {
    for l in (1..=3).flat_map(|r| enumerate_symbols(r, 0, 2)) {
        let direct = dden_direct(&l, q(3)).unwrap();
        let over = dden_via_overlattices(&l, q(3)).unwrap();
        assert_eq!(direct, over, "{l}");
        assert!(direct.is_integer(), "{l}");
    }
}

#[test]
fn report_serializes_exact_values() {
    let r = DensityReport::compute(&sym("0^1+,2^1+"), q(3)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["L"], "0^1+,2^1+");
    assert_eq!(v["dden"], r.dden.to_string());
    assert_eq!(v["pdden"], rat_string(&r.pdden));
    assert_eq!(v["q"], 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn machine_matches_closed_formula(idx in 0usize..10_000, qv in prop::sample::select(vec![3u64, 5, 7])) {
        let pool: Vec<GenusSymbol> = (1..=3).flat_map(|r| enumerate_symbols(r, -2, 3)).collect();
        let l = &pool[idx % pool.len()];
        prop_assert_eq!(pdden_machine(l, q(qv)), pdden_closed(l, q(qv)));
    }

    #[test]
    fn primitive_from_full_round_trip(idx in 0usize..10_000) {
        let pool: Vec<GenusSymbol> = (1..=3).flat_map(|r| enumerate_symbols(r, 0, 3)).collect();
        prop_assert!(pden_from_den_roundtrip(&pool[idx % pool.len()], q(3)).unwrap());
    }
}
