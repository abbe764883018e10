//! Rational helpers on top of `BigRational`: construction, parsing,
//! canonical rendering, floor/ceil and prime factorization.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{AdelicError, Result};

pub type Rational = BigRational;

pub fn q(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"n"` or `"n/d"`. Decimal and exponent forms are rejected so that
/// every coefficient is an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || AdelicError::Parse(format!("not a rational \"num/den\" string: {s:?}"));
    let (n, d) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let ok = |x: &str| {
        let body = x.strip_prefix('-').unwrap_or(x);
        !body.is_empty() && body.bytes().all(|c| c.is_ascii_digit())
    };
    if !ok(n) || !ok(d) || d.starts_with('-') {
        return Err(bad());
    }
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(AdelicError::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn fmt_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn floor(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

pub fn to_f64(x: &Rational) -> f64 {
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() && d != 0.0 {
        return n / d;
    }
    // scale down huge operands
    let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000) as usize;
    let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub fn min_q<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_q<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}

/// Trial-division factorization of a positive integer.
pub fn factor_biguint(n: &BigUint) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    if let Some(small) = n.to_u64() {
        return factor_u64(small);
    }
    let mut m = n.clone();
    let mut p: u64 = 2;
    while BigUint::from(p) * BigUint::from(p) <= m {
        let bp = BigUint::from(p);
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
            if let Some(small) = m.to_u64() {
                for (q, f) in factor_u64(small) {
                    out.push((q, f));
                }
                return merge(out);
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        let last = m.to_u64().expect("prime factor exceeds u64");
        out.push((last, 1));
    }
    merge(out)
}

fn merge(mut v: Vec<(u64, u32)>) -> Vec<(u64, u32)> {
    v.sort();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for (p, e) in v {
        match out.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => out.push((p, e)),
        }
    }
    out
}

pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor_u64(n) == vec![(n, 1)]
}

/// Factorization of a nonzero rational as prime → exponent (negative for the
/// denominator). The sign is dropped.
pub fn factor_rational(x: &Rational) -> Vec<(u64, i64)> {
    assert!(!x.is_zero(), "factor of zero");
    let mut out: Vec<(u64, i64)> = Vec::new();
    for (p, e) in factor_biguint(x.numer().magnitude()) {
        out.push((p, e as i64));
    }
    for (p, e) in factor_biguint(x.denom().magnitude()) {
        out.push((p, -(e as i64)));
    }
    out.sort();
    out
}

/// p-adic valuation of a nonzero rational.
pub fn ord_p(x: &Rational, p: u64) -> i64 {
    assert!(!x.is_zero(), "ord of zero");
    let bp = BigInt::from(p);
    let count = |v: &BigInt| {
        let mut v = v.abs();
        let mut e = 0i64;
        loop {
            let (qq, r) = v.div_rem(&bp);
            if !r.is_zero() {
                return e;
            }
            v = qq;
            e += 1;
        }
    };
    count(x.numer()) - count(x.denom())
}

/// `p^e` as a rational, for any integer exponent.
pub fn pow_prime(p: u64, e: &BigInt) -> Rational {
    let ee = e.abs().to_u32().expect("exponent too large");
    let v = BigInt::from(p).pow(ee);
    if e.sign() == Sign::Minus {
        BigRational::new(BigInt::one(), v)
    } else {
        BigRational::from_integer(v)
    }
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}
