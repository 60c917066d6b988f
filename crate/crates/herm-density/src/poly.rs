//! Dense univariate polynomials with exact rational coefficients.

use crate::arith::{rat_string, Rat};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial in `X`; coefficient `i` multiplies `X^i`. Trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// `c X^k`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `a + b X`.
    pub fn linear(a: Rat, b: Rat) -> Self {
        Self::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer((i as i64).into()))
                .collect(),
        )
    }

    /// `P(cX)`.
    pub fn scale_var(&self, c: &Rat) -> Self {
        let mut pw = Rat::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pw);
            pw *= c;
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `P(X^2)`.
    pub fn square_var(&self) -> Self {
        let mut out = vec![Rat::zero(); 2 * self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[2 * i] = c.clone();
        }
        Self::new(out)
    }

    pub fn product<I: IntoIterator<Item = Poly>>(it: I) -> Self {
        it.into_iter().fold(Poly::one(), |a, b| &a * &b)
    }

    pub fn sum<I: IntoIterator<Item = Poly>>(it: I) -> Self {
        it.into_iter().fold(Poly::zero(), |a, b| &a + &b)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rat_string).collect()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rat::zero();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let body = rat_string(&mag);
            match i {
                0 => write!(f, "{body}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{body}*")?;
                    }
                    if i == 1 {
                        write!(f, "X")?;
                    } else {
                        write!(f, "X^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{frac, rat};

    #[test]
    fn arithmetic_and_display() {
        let p = Poly::linear(rat(1), rat(-1));
        let sq = &p * &p;
        assert_eq!(sq.coeffs(), &[rat(1), rat(-2), rat(1)]);
        assert_eq!(sq.to_string(), "1 - 2*X + X^2");
        assert!((&sq - &sq).is_zero());
        assert_eq!(sq.derivative().eval(&rat(1)), rat(0));
        assert_eq!(p.scale_var(&frac(1, 3)).to_string(), "1 - 1/3*X");
        assert_eq!(p.square_var().to_string(), "1 - X^2");
    }
}
