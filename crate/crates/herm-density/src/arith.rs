//! Small exact-arithmetic helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(v: i64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `q^e` as an integer, `e >= 0`.
pub fn ipow(q: u64, e: u32) -> Int {
    num_traits::pow(BigInt::from(q), e as usize)
}

/// `q^e` as a rational, any sign of `e`.
pub fn qpow(q: u64, e: i64) -> Rat {
    if e >= 0 {
        Rat::from_integer(ipow(q, e as u32))
    } else {
        Rat::new(BigInt::one(), ipow(q, (-e) as u32))
    }
}

/// `(-1)^e` for any integer exponent.
pub fn sign_pow(e: i64) -> i32 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Quadratic character of `-1` in `F_q` (q odd).
pub fn legendre_minus_one(q: u64) -> i32 {
    if q % 4 == 1 {
        1
    } else {
        -1
    }
}

/// Legendre symbol of an integer modulo an odd prime `p`.
pub fn legendre_int(a: &Int, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return 0;
    }
    let e = BigInt::from((p - 1) / 2);
    let t = r.modpow(&e, &pb);
    if t.is_one() {
        1
    } else {
        -1
    }
}

/// Legendre symbol of a `p`-adic unit given as a rational.
pub fn legendre_rat(x: &Rat, p: u64) -> i32 {
    let n = legendre_int(x.numer(), p);
    let d = legendre_int(x.denom(), p);
    n * d
}

/// `p`-adic valuation of a nonzero integer.
pub fn vp_int(a: &Int, p: u64) -> i64 {
    assert!(!a.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut a = a.abs();
    let mut v = 0;
    loop {
        let (q, r) = a.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        a = q;
        v += 1;
    }
}

/// `p`-adic valuation of a rational; `None` for zero.
pub fn vp(x: &Rat, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(vp_int(x.numer(), p) - vp_int(x.denom(), p))
    }
}

/// Smallest positive quadratic nonresidue modulo the odd prime `p`.
pub fn nonresidue(p: u64) -> i64 {
    (2..p as i64)
        .find(|&a| legendre_int(&int(a), p) == -1)
        .expect("odd prime has a nonresidue")
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime dividing `n` together with the exponent, if `n` is a prime power.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut m = n;
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

/// Render a rational as `num/den` (or `num` when integral).
pub fn rat_string(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `num/den` or `num`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Rat::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
    }
}

pub fn to_i64(x: &Int) -> Option<i64> {
    x.to_i64()
}
/// Serde helpers: exact numbers are emitted as strings.
pub fn serialize_rat<S: serde::Serializer>(x: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(x))
}

pub fn serialize_int<S: serde::Serializer>(x: &Int, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn serialize_rat_map<S: serde::Serializer>(m: &std::collections::BTreeMap<u32, Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(&k.to_string(), &rat_string(v))?;
    }
    map.end()
}

