//! Gaussian binomial coefficients and the q-series identities built on them.
//!
//! Every identity here is checked at a fixed numeric `q`; since both sides are
//! polynomials of bounded degree in `q`, agreement at enough values of `q` is
//! equivalent to a symbolic identity.

use crate::arith::{ipow, qpow, rat, sign_pow, Int, Rat};
use crate::error::{Error, Result};
use crate::poly::Poly;
use num_traits::{One, Zero};
use serde::Serialize;

/// Residue field size; a prime power at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QValue(u64);

impl QValue {
    pub fn new(q: u64) -> Result<Self> {
        if q >= 2 && crate::arith::prime_power(q).is_some() {
            Ok(QValue(q))
        } else {
            Err(Error::InvalidInput(format!("q = {q} is not a prime power >= 2")))
        }
    }

    /// Odd prime power, as required for the lattice layer.
    pub fn odd(q: u64) -> Result<Self> {
        let v = Self::new(q)?;
        if q % 2 == 0 {
            return Err(Error::InvalidInput(format!("q = {q} must be odd")));
        }
        Ok(v)
    }

    /// Odd prime, as required for exact Gram arithmetic and the oracle.
    pub fn prime(q: u64) -> Result<Self> {
        let v = Self::odd(q)?;
        if !crate::arith::is_prime(q) {
            return Err(Error::InvalidInput(format!("q = {q} must be prime here")));
        }
        Ok(v)
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_prime(self) -> bool {
        crate::arith::is_prime(self.0)
    }

    pub fn pow(self, e: i64) -> Rat {
        qpow(self.0, e)
    }
}

/// `binom(n, i)_q`; zero outside `0 <= i <= n`.
pub fn q_binomial(n: i64, i: i64, q: QValue) -> Int {
    if n < 0 || i < 0 || i > n {
        return Int::zero();
    }
    let q = q.get();
    let mut num = Int::one();
    let mut den = Int::one();
    for l in 0..i {
        num *= ipow(q, (n - l) as u32) - 1;
        den *= ipow(q, (i - l) as u32) - 1;
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// `binom(n, i)_q` as a rational.
pub fn q_binomial_rat(n: i64, i: i64, q: QValue) -> Rat {
    Rat::from_integer(q_binomial(n, i, q))
}

/// `|GL_j(F_q)|`.
pub fn gl_order(j: u32, q: QValue) -> Int {
    (0..j).fold(Int::one(), |acc, l| acc * (ipow(q.get(), j) - ipow(q.get(), l)))
}

/// `q^{i(i-1)/2}` with the alternating sign `(-1)^i`.
fn signed_gauss_weight(i: i64, q: QValue) -> Rat {
    rat(sign_pow(i) as i64) * q.pow(i * (i - 1) / 2)
}

/// Left side of the q-binomial theorem: `prod_{i<n} (1 - q^i X)`.
pub fn q_pochhammer(n: i64, q: QValue) -> Poly {
    Poly::product((0..n).map(|i| Poly::linear(rat(1), -q.pow(i))))
}

/// Right side: `sum_i (-1)^i q^{i(i-1)/2} binom(n,i)_q X^i`.
pub fn q_binomial_expansion(n: i64, q: QValue) -> Poly {
    Poly::sum((0..=n).map(|i| {
        Poly::monomial(signed_gauss_weight(i, q) * q_binomial_rat(n, i, q), i as usize)
    }))
}

pub fn check_q_binomial_theorem(n: i64, q: QValue) -> bool {
    q_pochhammer(n, q) == q_binomial_expansion(n, q)
}

/// `sum_i (-1)^i q^{i(i-1)/2} binom(n,i)_q f(q^{-i})`; vanishes when `deg f < n`.
pub fn vanishing_sum(n: i64, f: &Poly, q: QValue) -> Rat {
    (0..=n)
        .map(|i| signed_gauss_weight(i, q) * q_binomial_rat(n, i, q) * f.eval(&q.pow(-i)))
        .fold(Rat::zero(), |a, b| a + b)
}

/// `sum_i (-1)^i q^{i(i-1)/2} binom(n,i)_q prod_{l<i} (1 + q^{-l} X)`.
pub fn inverse_sum(n: i64, q: QValue) -> Poly {
    Poly::sum((0..=n).map(|i| {
        let prod = Poly::product((0..i).map(|l| Poly::linear(rat(1), q.pow(-l))));
        prod.scale(&(signed_gauss_weight(i, q) * q_binomial_rat(n, i, q)))
    }))
}

pub fn check_inverse_identity(n: i64, q: QValue) -> bool {
    inverse_sum(n, q) == Poly::monomial(rat(sign_pow(n) as i64), n as usize)
}

/// `binom(t,i) = binom(t+1,i) - q^{t-i+1} binom(t,i-1)`.
pub fn check_pascal(t: i64, i: i64, q: QValue) -> bool {
    let lhs = q_binomial_rat(t, i, q);
    let rhs = q_binomial_rat(t + 1, i, q) - q.pow(t - i + 1) * q_binomial_rat(t, i - 1, q);
    lhs == rhs
}

/// Lattice-path identity:
/// `binom(t,i) = sum_a (-1)^a q^{a(t+1-i) + a(a-1)/2} binom(n-t,a) binom(n-a,i-a)`.
pub fn check_guess(n: i64, t: i64, i: i64, q: QValue) -> bool {
    let lhs = q_binomial_rat(t, i, q);
    let rhs = (0..=n)
        .map(|a| {
            rat(sign_pow(a) as i64)
                * q.pow(a * (t + 1 - i) + a * (a - 1) / 2)
                * q_binomial_rat(n - t, a, q)
                * q_binomial_rat(n - a, i - a, q)
        })
        .fold(Rat::zero(), |x, y| x + y);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: u64) -> QValue {
        QValue::new(v).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(q_binomial(3, 1, q(3)), Int::from(13));
        assert_eq!(q_binomial(4, 2, q(2)), Int::from(35));
        assert_eq!(q_binomial(5, 7, q(3)), Int::zero());
        assert_eq!(q_binomial(5, -1, q(3)), Int::zero());
        assert_eq!(gl_order(0, q(3)), Int::from(1));
        assert_eq!(gl_order(1, q(3)), Int::from(2));
        assert_eq!(gl_order(2, q(3)), Int::from(48));
    }

    #[test]
    fn rejects_bad_q() {
        assert!(QValue::new(6).is_err());
        assert!(QValue::new(1).is_err());
        assert!(QValue::odd(4).is_err());
        assert!(QValue::prime(9).is_err());
        assert!(QValue::odd(9).is_ok());
    }

    #[test]
    fn identities_small() {
        for qv in [2, 3, 4, 5] {
            for n in 0..=5 {
                assert!(check_q_binomial_theorem(n, q(qv)));
                assert!(check_inverse_identity(n, q(qv)));
            }
        }
    }
}
