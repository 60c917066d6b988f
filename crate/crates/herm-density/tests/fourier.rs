//! Horizontal lattices, the vertical/horizontal split and the finite D-sum.

use herm_density::fourier_checks::*;
use herm_density::hermitian_lattice::{enumerate_symbols, mu_counts, AmbientLattice, GenusSymbol};
use herm_density::local_density::dden;
use herm_density::arith::{rat, Rat};
use herm_density::QValue;

fn sym(s: &str) -> GenusSymbol {
    s.parse().unwrap()
}

fn q3() -> QValue {
    QValue::new(3).unwrap()
}

#[test]
fn mu_counts_by_hand() {
    // L^♯/L of π-modular H_1 is a hyperbolic F_q-plane lying outside πL^♯ = L
    for (p, minus) in [(3u64, 8u64), (5, 24)] {
        let mu = mu_counts(&AmbientLattice::from_symbol(&sym("1H^1"), p)).unwrap();
        assert_eq!((mu.plus, mu.zero, mu.minus), (1, 0, minus));
    }
    // ⟨x⟩ with val 2: the q-1 cosets π^{-1}a·x have unit norm in a single square class
    let mu = mu_counts(&AmbientLattice::from_symbol(&sym("2^1+"), 3)).unwrap();
    assert_eq!((mu.plus, mu.zero, mu.minus), (1, 2, 0));
    assert_eq!(mu.zero_plus + mu.zero_minus, 2);
    assert!(mu.zero_plus == 0 || mu.zero_minus == 0);
}

#[test]
fn mu_identities_for_full_type() {
    for r in 1..=2 {
        for l in enumerate_symbols(r, 1, 4) {
            let rep = mu_identities(&l, q3()).unwrap();
            assert!(rep.holds(), "{l}: {rep:?}");
        }
    }
    assert!(mu_identities(&sym("0^1+,2^1+"), q3()).is_err());
}

#[test]
fn horizontality_matches_unique_vertex_lattice() {
    for l in enumerate_symbols(1, 0, 2).into_iter().chain(enumerate_symbols(2, 0, 2)) {
        for chi in [1, -1] {
            let cfg = match FlatConfiguration::standard(&l, chi, 1, 3) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let horizontal = is_horizontal(&l, chi, 3);
            let found = containing_vertex_lattices(&cfg).unwrap();
            if horizontal {
                assert_eq!(found, 1, "{l} chi={chi}");
            }
        }
    }
}

#[test]
fn split_adds_up_to_dden() {
    for (flat, chi, valx) in [("2^1+", 1, 1), ("2^1+", -1, 1), ("0^1+,2^1+", 1, 1), ("0^2+", 1, 2), ("1H^1", 1, 1)] {
        let cfg = FlatConfiguration::standard(&sym(flat), chi, valx, 3).unwrap();
        let split = dden_split(&cfg, q3()).unwrap();
        assert_eq!(split.vertical.clone() + split.horizontal.clone(), split.total, "{flat}");
        let l = cfg.lattice().unwrap();
        assert_eq!(split.total, Rat::from_integer(dden(&l.symbol, q3()).unwrap()), "{flat}");
    }
}

#[test]
fn d_sum_vanishes_for_vertical_flats() {
    let mut seen = 0;
    for r in 1..=2 {
        for l in enumerate_symbols(r, 0, 3) {
            for chi in [1, -1] {
                if is_horizontal(&l, chi, 3) {
                    continue;
                }
                for valx in 1..=2 {
                    let rep = d_sum_standard(&l, chi, valx, q3()).unwrap();
                    assert!(rep.value == rat(0), "{l} chi={chi} valx={valx}");
                    assert!(rep.all_consistent(), "{l} chi={chi} valx={valx}: {rep:?}");
                    seen += 1;
                }
            }
        }
    }
    assert!(seen > 20);
}

#[test]
fn d_sum_rejects_bad_input() {
    // horizontal flats and non-positive val(x)
    assert!(d_sum_standard(&GenusSymbol::unimodular(1, 1), 1, 1, q3()).is_err());
    assert!(d_sum_standard(&sym("2^1+"), 1, 0, q3()).is_err());
    assert!(d_sum_standard(&sym("2^1+"), 1, 1, QValue::new(5).unwrap()).is_ok());
}
