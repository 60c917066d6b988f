//! Genus symbols, Gram matrices and overlattices.

use herm_density::arith::rat;
use herm_density::hermitian_lattice::*;
use proptest::prelude::*;

const P: u64 = 3;

fn all_symbols(rank_max: u32, lo: i64, hi: i64) -> Vec<GenusSymbol> {
    (1..=rank_max).flat_map(|r| enumerate_symbols(r, lo, hi)).collect()
}

#[test]
fn parse_print_round_trip() {
    for s in all_symbols(3, -2, 3) {
        let text = s.to_string();
        assert_eq!(text.parse::<GenusSymbol>().unwrap(), s, "{text}");
    }
    assert_eq!("()".parse::<GenusSymbol>().unwrap(), GenusSymbol::empty());
}

#[test]
fn rejects_malformed_symbols() {
    for bad in ["0^1", "1^1+", "0H^1", "2^1+,0^1+", "0^1+,0^2-", "x", "0^0+", "1H^0"] {
        assert!(bad.parse::<GenusSymbol>().is_err(), "{bad}");
    }
}

#[test]
fn gram_recovers_symbol() {
    for p in [3u64, 5] {
        for s in all_symbols(3, -2, 3) {
            let g = s.gram(p);
            assert_eq!(genus_from_gram(&g).unwrap(), s, "p={p}");
            assert_eq!(chi_from_gram(&g).unwrap(), s.chi(p), "{s} p={p}");
            assert_eq!(g.invariants_from_minors().unwrap(), s.invariants(), "{s}");
        }
    }
}

#[test]
fn dual_is_an_involution_preserving_chi() {
    for s in all_symbols(3, -2, 3) {
        assert_eq!(s.dual().dual(), s);
        assert_eq!(s.dual().chi(P), s.chi(P), "{s}");
        let neg: Vec<i64> = s.invariants().iter().rev().map(|a| -a).collect();
        assert_eq!(s.dual().invariants(), neg);
    }
}

#[test]
fn lambda_sharp_shapes() {
    let l = GenusSymbol::lambda_sharp(4, 2, 1, P).unwrap();
    assert_eq!(l.invariants(), vec![-1, -1, 0, 0]);
    assert_eq!(l.chi(P), 1);
    assert!(GenusSymbol::lambda_sharp(4, 4, -1, P).is_err());
    assert!(GenusSymbol::lambda_sharp(4, 3, 1, P).is_err());
    assert_eq!((t_max(5, 1), t_max(4, 1), t_max(4, -1)), (4, 4, 2));
}

#[test]
fn unimodular_lattices_have_no_proper_integral_overlattices() {
    for n in 1..=3 {
        for sign in [1, -1] {
            let s = GenusSymbol::unimodular(n, sign);
            assert_eq!(count_isometric_overlattices(&s, &s, P), 1);
        }
    }
}

#[test]
fn overlattices_of_pi_scaled_plane() {
    // L = π·U with U unimodular of rank 2 and L/πL split: length 2 overlattices are
    // π^{-1}L and L + ⟨π^{-2}w⟩ for w reducing into one of the two isotropic lines,
    // q lifts per line, so 2q + 1 in all; each is unimodular
    let l: GenusSymbol = "2^2+".parse().unwrap();
    let prof = overlattice_profile(&l, OverlatticeConstraint::Integral, P);
    assert!(prof.iter().any(|(s, _, _)| s.to_string() == "1H^1"), "split reduction");
    let top: Vec<_> = prof.iter().filter(|(_, len, _)| *len == 2).collect();
    assert_eq!(top.iter().map(|(_, _, c)| c).sum::<u64>(), 2 * P + 1);
    assert!(top.iter().all(|(s, _, _)| s.is_unimodular()));
    for (s, _, _) in prof.iter() {
        assert!(s.is_integral());
        assert_eq!(s.chi(P), l.chi(P), "overlattices span the same space");
    }
    // rank one: ⟨x⟩ with val 2 has exactly one proper integral overlattice
    let one = overlattice_profile(&"2^1+".parse().unwrap(), OverlatticeConstraint::Integral, P);
    assert_eq!(one.iter().map(|(_, _, c)| c).sum::<u64>(), 2);
}

fn unitriangular(n: usize, digits: &[i64]) -> Vec<Vec<FElement>> {
    let mut k = 0;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        FElement::one(P)
                    } else if j > i {
                        let d = digits[k % digits.len()];
                        k += 1;
                        FElement::new(rat(d), rat(digits[(k + 1) % digits.len()]), P)
                    } else {
                        FElement::zero(P)
                    }
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn genus_invariant_under_base_change(idx in 0usize..1000, digits in prop::collection::vec(-4i64..5, 1..8)) {
        let pool = all_symbols(3, -1, 3);
        let s = &pool[idx % pool.len()];
        let n = s.rank() as usize;
        let lat = AmbientLattice::from_basis(s.gram(P), unitriangular(n, &digits)).unwrap();
        prop_assert_eq!(genus_from_gram(&lat.lattice_gram()).unwrap(), s.clone());
    }

    #[test]
    fn orthogonal_sum_concatenates_invariants(a in 0usize..200, b in 0usize..200) {
        let pool = all_symbols(2, -1, 3);
        let (x, y) = (&pool[a % pool.len()], &pool[b % pool.len()]);
        let s = x.orthogonal_sum(y, P);
        let mut inv = x.invariants();
        inv.extend(y.invariants());
        inv.sort();
        prop_assert_eq!(s.invariants(), inv);
        prop_assert_eq!(s.chi(P), genus_from_gram(&x.gram(P).orthogonal_sum(&y.gram(P))).unwrap().chi(P));
    }
}
