//! Exact elements `a + bπ` of the ramified quadratic extension, `π² = p`.

use crate::arith::{ipow, legendre_rat, vp, Rat};
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// `a + bπ` with rational `a`, `b` and `π² = p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FElement {
    pub a: Rat,
    pub b: Rat,
    p: u64,
}

impl FElement {
    pub fn new(a: Rat, b: Rat, p: u64) -> Self {
        FElement { a, b, p }
    }

    pub fn zero(p: u64) -> Self {
        Self::new(Rat::zero(), Rat::zero(), p)
    }

    pub fn one(p: u64) -> Self {
        Self::from_rat(Rat::one(), p)
    }

    pub fn from_rat(a: Rat, p: u64) -> Self {
        Self::new(a, Rat::zero(), p)
    }

    pub fn from_int(a: i64, p: u64) -> Self {
        Self::from_rat(Rat::from_integer(a.into()), p)
    }

    /// `π^k` for any integer `k`.
    pub fn pi_pow(k: i64, p: u64) -> Self {
        let half = k.div_euclid(2);
        let scale = if half >= 0 {
            Rat::from_integer(ipow(p, half as u32))
        } else {
            Rat::new(1.into(), ipow(p, (-half) as u32))
        };
        if k.rem_euclid(2) == 0 {
            Self::new(scale, Rat::zero(), p)
        } else {
            Self::new(Rat::zero(), scale, p)
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a.clone(), -&self.b, self.p)
    }

    /// `N(x) = a² - p b²`.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * Rat::from_integer(self.p.into())
    }

    pub fn trace(&self) -> Rat {
        &self.a + &self.a
    }

    /// `π`-adic valuation; `None` for zero.
    pub fn val(&self) -> Option<i64> {
        let va = vp(&self.a, self.p).map(|v| 2 * v);
        let vb = vp(&self.b, self.p).map(|v| 2 * v + 1);
        match (va, vb) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    /// Valuation with zero treated as `+∞`, compared against a bound.
    pub fn val_at_least(&self, bound: i64) -> bool {
        self.val().map_or(true, |v| v >= bound)
    }

    pub fn is_integral(&self) -> bool {
        self.val_at_least(0)
    }

    pub fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "inverse of zero");
        Self::new(&self.a / &n, -&self.b / &n, self.p)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(&self.a * c, &self.b * c, self.p)
    }

    /// For an element of `F_0` of `p`-adic valuation `v`, the Legendre symbol of `x / p^v`.
    pub fn unit_legendre(&self) -> i32 {
        assert!(self.b.is_zero(), "not in F_0");
        let v = vp(&self.a, self.p).expect("nonzero");
        let u = &self.a / crate::arith::qpow(self.p, v);
        legendre_rat(&u, self.p)
    }

    /// Canonical digit expansions `Σ_{t=lo}^{hi-1} c_t π^t`, `0 <= c_t < p`.
    /// These represent `π^lo O_F / π^hi O_F`.
    pub fn digit_representatives(lo: i64, hi: i64, p: u64) -> Vec<FElement> {
        let mut out = vec![FElement::zero(p)];
        for t in lo..hi {
            let pt = FElement::pi_pow(t, p);
            out = out
                .into_iter()
                .flat_map(|x| {
                    let pt = pt.clone();
                    (0..p).map(move |c| &x + &pt.scale(&Rat::from_integer(c.into())))
                })
                .collect();
        }
        out
    }
}

impl Add for &FElement {
    type Output = FElement;
    fn add(self, o: &FElement) -> FElement {
        debug_assert_eq!(self.p, o.p);
        FElement::new(&self.a + &o.a, &self.b + &o.b, self.p)
    }
}

impl Sub for &FElement {
    type Output = FElement;
    fn sub(self, o: &FElement) -> FElement {
        debug_assert_eq!(self.p, o.p);
        FElement::new(&self.a - &o.a, &self.b - &o.b, self.p)
    }
}

impl Mul for &FElement {
    type Output = FElement;
    fn mul(self, o: &FElement) -> FElement {
        debug_assert_eq!(self.p, o.p);
        if self.is_zero() || o.is_zero() {
            return FElement::zero(self.p);
        }
        let p = Rat::from_integer(self.p.into());
        FElement::new(
            &self.a * &o.a + &self.b * &o.b * p,
            &self.a * &o.b + &self.b * &o.a,
            self.p,
        )
    }
}

impl Div for &FElement {
    type Output = FElement;
    fn div(self, o: &FElement) -> FElement {
        self * &o.inv()
    }
}

impl Neg for &FElement {
    type Output = FElement;
    fn neg(self) -> FElement {
        FElement::new(-&self.a, -&self.b, self.p)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FElement {
            type Output = FElement;
            fn $m(self, o: FElement) -> FElement {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl fmt::Display for FElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = crate::arith::rat_string(&self.a);
        if self.b.is_zero() {
            return write!(f, "{a}");
        }
        let b = crate::arith::rat_string(&self.b.abs());
        let sign = if self.b.is_negative() { '-' } else { '+' };
        if self.a.is_zero() {
            let s = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{s}{b}π")
        } else {
            write!(f, "{a} {sign} {b}π")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{frac, rat};

    #[test]
    fn valuations() {
        let p = 3;
        assert_eq!(FElement::pi_pow(-1, p).val(), Some(-1));
        assert_eq!(FElement::pi_pow(5, p).val(), Some(5));
        assert_eq!(FElement::from_int(9, p).val(), Some(4));
        assert_eq!(FElement::new(rat(3), rat(1), p).val(), Some(1));
        assert_eq!(FElement::new(frac(1, 3), rat(1), p).val(), Some(-2));
        assert_eq!(FElement::zero(p).val(), None);
    }

    #[test]
    fn field_ops() {
        let p = 5;
        let pi = FElement::pi_pow(1, p);
        assert_eq!(&pi * &pi, FElement::from_int(5, p));
        let x = FElement::new(rat(2), rat(3), p);
        assert_eq!(&x * &x.inv(), FElement::one(p));
        assert_eq!((&x * &x.conj()).a, x.norm());
        assert_eq!(FElement::pi_pow(-3, p), FElement::pi_pow(3, p).inv());
    }

    #[test]
    fn digits() {
        let reps = FElement::digit_representatives(-2, 0, 3);
        assert_eq!(reps.len(), 9);
        assert!(reps.iter().all(|r| r.val_at_least(-2)));
    }
}
