//! The truncated ring `O_F/(π^e)` for `π^2 = p`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Precision data shared by all elements of one truncated ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedRing {
    pub p: u64,
    /// π-adic precision.
    pub e: u32,
    pub mod_a: u64,
    pub mod_b: u64,
}

impl TruncatedRing {
    /// `O_F/(π^e)`: `a` lives mod `p^{ceil(e/2)}`, `b` mod `p^{floor(e/2)}`.
    pub fn new(p: u64, e: u32) -> Self {
        TruncatedRing { p, e, mod_a: p.pow(e.div_ceil(2)), mod_b: p.pow(e / 2) }
    }

    /// `O_F/(π^{2d}) = O_{F_0}/(p^d)[π]`.
    pub fn even(p: u64, d: u32) -> Self {
        Self::new(p, 2 * d)
    }

    pub fn size(&self) -> u64 {
        self.mod_a * self.mod_b
    }

    pub fn elem(&self, a: i64, b: i64) -> TruncatedElement {
        TruncatedElement {
            a: a.rem_euclid(self.mod_a as i64) as u64,
            b: if self.mod_b == 1 { 0 } else { b.rem_euclid(self.mod_b as i64) as u64 },
            ring: *self,
        }
    }

    pub fn zero(&self) -> TruncatedElement {
        self.elem(0, 0)
    }

    pub fn one(&self) -> TruncatedElement {
        self.elem(1, 0)
    }

    pub fn pi(&self) -> TruncatedElement {
        self.elem(0, 1)
    }

    /// All elements, `a` varying fastest.
    pub fn elements(&self) -> impl Iterator<Item = TruncatedElement> + '_ {
        (0..self.mod_b).flat_map(move |b| (0..self.mod_a).map(move |a| self.elem(a as i64, b as i64)))
    }

    /// Reinterprets `x` (a lift from any precision) in this ring.
    pub fn lift(&self, x: &TruncatedElement) -> TruncatedElement {
        self.elem(x.a as i64, x.b as i64)
    }
}

/// `a + bπ` in `O_F/(π^e)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedElement {
    pub a: u64,
    pub b: u64,
    pub ring: TruncatedRing,
}

impl TruncatedElement {
    pub fn conj(&self) -> Self {
        self.ring.elem(self.a as i64, -(self.b as i64))
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Residue in `F_q = O_F/(π)`.
    pub fn residue(&self) -> u64 {
        self.a % self.ring.p
    }

    pub fn is_unit(&self) -> bool {
        self.residue() != 0
    }

    /// `π`-adic valuation, capped at the precision.
    pub fn val(&self) -> u32 {
        let p = self.ring.p;
        let va = if self.a == 0 { u32::MAX } else { 2 * self.a.trailing_p(p) };
        let vb = if self.b == 0 { u32::MAX } else { 2 * self.b.trailing_p(p) + 1 };
        va.min(vb).min(self.ring.e)
    }
}

trait TrailingP {
    fn trailing_p(self, p: u64) -> u32;
}

impl TrailingP for u64 {
    fn trailing_p(mut self, p: u64) -> u32 {
        let mut k = 0;
        while self % p == 0 {
            self /= p;
            k += 1;
        }
        k
    }
}

impl Add for TruncatedElement {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.ring.elem((self.a + o.a) as i64, (self.b + o.b) as i64)
    }
}

impl Sub for TruncatedElement {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.ring.elem(self.a as i64 - o.a as i64, self.b as i64 - o.b as i64)
    }
}

impl Neg for TruncatedElement {
    type Output = Self;
    fn neg(self) -> Self {
        self.ring.elem(-(self.a as i64), -(self.b as i64))
    }
}

impl Mul for TruncatedElement {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let r = self.ring;
        let (ma, mb) = (r.mod_a as u128, r.mod_b.max(1) as u128);
        let (a1, b1, a2, b2) = (self.a as u128, self.b as u128, o.a as u128, o.b as u128);
        let a = (a1 * a2 + (r.p as u128) * ((b1 * b2) % ma)) % ma;
        let b = (a1 * b2 + a2 * b1) % mb;
        r.elem(a as i64, b as i64)
    }
}

impl fmt::Display for TruncatedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}π mod π^{}", self.a, self.b, self.ring.e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_laws() {
        let r = TruncatedRing::new(3, 5);
        let xs: Vec<_> = r.elements().collect();
        assert_eq!(xs.len() as u64, 3u64.pow(5));
        let pi = r.pi();
        assert_eq!(pi * pi, r.elem(3, 0));
        for &x in xs.iter().step_by(7) {
            for &y in xs.iter().step_by(11) {
                assert_eq!((x * y).conj(), x.conj() * y.conj());
                assert_eq!(x * (y + pi), x * y + x * pi);
            }
        }
        let mut p5 = r.one();
        for _ in 0..5 {
            p5 = p5 * pi;
        }
        assert!(p5.is_zero());
        assert_eq!(r.elem(0, 3).val(), 3);
        assert_eq!(r.elem(9, 1).val(), 1);
    }

    #[test]
    fn norms_of_units_mod_three() {
        let r = TruncatedRing::even(3, 1);
        let c = r.elements().filter(|x| (*x * x.conj()) == r.one()).count();
        assert_eq!(c, 6);
    }
}
