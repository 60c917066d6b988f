//! Word-sized modular arithmetic, NTT-friendly primes and radix-`p` transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime `P ≡ 1 (mod order)` with a primitive `order`-th root of unity.
#[derive(Clone, Copy, Debug)]
pub struct NttPrime {
    pub modulus: u64,
    pub root: u64,
    pub order: u64,
}

/// Distinct primes below `2^62`, each `≡ 1 (mod order)`, in decreasing order.
/// `order` must be a power of the odd prime `p`.
pub fn ntt_primes(order: u64, p: u64, count: usize) -> Vec<NttPrime> {
    let mut out = Vec::with_capacity(count);
    let mut k = ((1u64 << 62) - 1) / order;
    while out.len() < count && k > 0 {
        let cand = k * order + 1;
        k -= 1;
        if !is_prime_u64(cand) {
            continue;
        }
        let cof = (cand - 1) / order;
        let root = (2..).map(|g| pow_mod(g, cof, cand)).find(|&z| order == 1 || pow_mod(z, order / p, cand) != 1);
        out.push(NttPrime { modulus: cand, root: root.unwrap(), order });
    }
    out
}

/// In-place DFT `X[k] = Σ_j x[j] ω^{jk}` of length `p^k`, `ω` of exact order `len`.
pub fn dft_radix(x: &mut [u64], omega: u64, p: usize, m: u64) {
    let n = x.len();
    if n <= 1 {
        return;
    }
    let sub = n / p;
    let mut parts: Vec<Vec<u64>> = (0..p).map(|r| (0..sub).map(|j| x[j * p + r]).collect()).collect();
    let w_sub = pow_mod(omega, p as u64, m);
    for part in parts.iter_mut() {
        dft_radix(part, w_sub, p, m);
    }
    let mut wk = 1u64;
    for (k, slot) in x.iter_mut().enumerate() {
        // Σ_r ω^{rk} Y_r[k mod sub]
        let mut acc = 0u64;
        let mut wr = 1u64;
        for part in &parts {
            acc = (acc + mul_mod(wr, part[k % sub], m)) % m;
            wr = mul_mod(wr, wk, m);
        }
        *slot = acc;
        wk = mul_mod(wk, omega, m);
    }
}

/// Chinese remaindering of residues modulo pairwise coprime moduli.
pub fn crt(residues: &[(u64, u64)]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut modulus = BigInt::one();
    for &(r, m) in residues {
        let mb = BigInt::from(m);
        let diff = (BigInt::from(r) - &x).mod_floor(&mb);
        let inv = modulus.mod_floor(&mb).modpow(&BigInt::from(m - 2), &mb);
        let t = (diff * inv).mod_floor(&mb);
        x += &modulus * t;
        modulus *= mb;
    }
    (x, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_roots() {
        let ps = ntt_primes(81, 3, 2);
        assert_eq!(ps.len(), 2);
        for np in ps {
            assert!(is_prime_u64(np.modulus));
            assert_eq!(pow_mod(np.root, 81, np.modulus), 1);
            assert_ne!(pow_mod(np.root, 27, np.modulus), 1);
        }
    }

    #[test]
    fn fast_transform_matches_naive() {
        let np = ntt_primes(27, 3, 1)[0];
        let m = np.modulus;
        let x: Vec<u64> = (0..27u64).map(|i| (i * i * 7 + 3) % 11).collect();
        let mut y = x.clone();
        dft_radix(&mut y, np.root, 3, m);
        for k in 0..27u64 {
            let naive = (0..27u64).fold(0u64, |acc, j| (acc + mul_mod(x[j as usize], pow_mod(np.root, j * k, m), m)) % m);
            assert_eq!(y[k as usize], naive);
        }
    }

    #[test]
    fn crt_roundtrip() {
        let ps = ntt_primes(9, 3, 2);
        let v = BigInt::from(123456789012345678u64) * BigInt::from(1000u64);
        let res: Vec<_> = ps.iter().map(|np| ((&v % np.modulus).try_into().unwrap(), np.modulus)).collect();
        assert_eq!(crt(&res).0, v);
    }
}
