//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use herm_density::hermitian_lattice::{enumerate_symbols, GenusSymbol};
use herm_density::suites::*;
use herm_density::QValue;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    run: Box<dyn Fn() -> Vec<Tally>>,
}

/// 200 integral symbols of rank 1..=3 with invariants in 0..=4, drawn with a fixed seed.
fn random_integral_symbols(count: usize, seed: u64) -> Vec<GenusSymbol> {
    let pool: Vec<GenusSymbol> = (1..=3).flat_map(|r| enumerate_symbols(r, 0, 4)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| pool.choose(&mut rng).expect("nonempty pool").clone()).collect()
}

fn criteria() -> Vec<Criterion> {
    let q3 = QValue::new(3).unwrap();
    let mins = |m: u64| Duration::from_secs(60 * m);
    vec![
        Criterion { id: 1, title: "coefficient table c_t, q in {3,5}, n = 2..6", budget: mins(1), run: Box::new(|| vec![check_coefficient_table(&[3, 5])]) },
        Criterion { id: 2, title: "closed forms for c_tmax, odd n <= 7, even n <= 6", budget: mins(1), run: Box::new(|| vec![check_c_tmax(7, 6, &[3, 5])]) },
        Criterion {
            id: 3,
            title: "machine vs closed primitive derived density, rank <= 4, invariants in [-2,4]",
            budget: mins(10),
            run: Box::new(|| vec![check_main_theorem(4, -2, 4, &[3, 5])]),
        },
        Criterion { id: 4, title: "defining system for c_t, n <= 6", budget: mins(1), run: Box::new(|| vec![check_defining_system(6, &[3, 5])]) },
        Criterion {
            id: 5,
            title: "oracle counts vs density polynomials, q = 3, rank <= 2, k <= 1, depth <= 3",
            budget: mins(10),
            run: Box::new(move || vec![check_oracle(2, 1, 3, q3)]),
        },
        Criterion {
            id: 6,
            title: "q-identities, n <= 8, q in {2,3,4,5,7,9}",
            budget: mins(1),
            run: Box::new(|| vec![check_q_identities(8, &[2, 3, 4, 5, 7, 9])]),
        },
        Criterion {
            id: 7,
            title: "counting identities, dims <= 6, plus brute force over F_3, dims <= 4",
            budget: mins(5),
            run: Box::new(|| vec![check_counting_identities(6, &[3, 5]), check_counting_brute_force(4, 3)]),
        },
        Criterion {
            id: 8,
            title: "polynomial identities f, h, g, F and the Pden' bridge, n <= 6",
            budget: mins(5),
            run: Box::new(|| vec![check_polynomial_identities(6, &[3, 5]), check_pden_bridges(4, 2, &[3, 5])]),
        },
        Criterion {
            id: 9,
            title: "mu identities, full type, rank <= 3, val <= 7, q = 3",
            budget: mins(10),
            run: Box::new(move || vec![check_mu_identities(3, 7, q3)]),
        },
        Criterion {
            id: 10,
            title: "D-sum vanishing, flat rank <= 2, val <= 4, 1 <= val(x) <= 3, q = 3",
            budget: mins(10),
            run: Box::new(move || vec![check_d_sums(2, 4, 3, q3)]),
        },
        Criterion {
            id: 11,
            title: "cancellation law, l <= 2 unimodular summands, rank(L2) <= 2, q = 3",
            budget: mins(2),
            run: Box::new(move || vec![check_cancellation(2, 2, 3, q3)]),
        },
        Criterion {
            id: 12,
            title: "Pden from Den round trip on 200 random integral lattices of rank <= 3",
            budget: mins(5),
            run: Box::new(move || vec![check_roundtrip(&random_integral_symbols(200, 0x5eed), q3)]),
        },
    ]
}

fn main() -> ExitCode {
    let mut all_ok = true;
    for c in criteria() {
        let start = Instant::now();
        let parts = (c.run)();
        let elapsed = start.elapsed();
        let checks: u64 = parts.iter().map(|t| t.checks).sum();
        let failures: u64 = parts.iter().map(|t| t.failures).sum();
        let in_budget = elapsed <= c.budget;
        let ok = failures == 0 && checks > 0 && in_budget;
        all_ok &= ok;
        println!(
            "{} criterion {}: {} ({checks} checks, {failures} failures, {:.2}s, budget {}s)",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        if let Some(f) = parts.iter().find_map(|t| t.first_failure.as_ref().map(|f| format!("{}: {f}", t.name))) {
            println!("    first failure: {f}");
        }
        if !in_budget {
            println!("    over time budget");
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
