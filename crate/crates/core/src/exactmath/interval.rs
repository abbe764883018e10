//! Rigorous interval enclosures with rational endpoints, rounded outward to a
//! fixed number of significant bits. Used to decide signs of log-linear
//! forms and to bound exponentials; never used as the primary arithmetic.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::rational::{q, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

fn pow2(e: i64) -> Rational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << (e as usize))
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << ((-e) as usize))
    }
}

/// Approximate binary exponent of a nonzero rational (within one).
fn log2_est(v: &Rational) -> i64 {
    v.numer().bits() as i64 - v.denom().bits() as i64
}

/// Largest dyadic with `prec` significant bits that is ≤ v.
pub fn round_down(v: &Rational, prec: u32) -> Rational {
    if v.is_zero() || (v.denom().is_one() && v.numer().bits() <= prec as u64) {
        return v.clone();
    }
    let e = log2_est(v);
    let scale = pow2(prec as i64 - e);
    (v * &scale).floor() / scale
}

pub fn round_up(v: &Rational, prec: u32) -> Rational {
    -round_down(&-v, prec)
}

impl Interval {
    pub fn point(v: Rational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn rounded(&self, prec: u32) -> Self {
        Interval { lo: round_down(&self.lo, prec), hi: round_up(&self.hi, prec) }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// `Some(sign)` if the interval excludes zero or is the point zero.
    pub fn sign(&self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        if self.lo.is_positive() {
            Some(Greater)
        } else if self.hi.is_negative() {
            Some(Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Equal)
        } else {
            None
        }
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn exp(&self, prec: u32) -> Interval {
        Interval { lo: exp_interval(&self.lo, prec).lo, hi: exp_interval(&self.hi, prec).hi }
    }
}

/// Enclosure of atanh(s) for 0 ≤ s ≤ 1/2 by its odd power series, summed
/// in fixed point with w fractional bits.
fn atanh_interval(s: &Rational, prec: u32) -> Interval {
    let w = (prec + 32) as usize;
    // x ≤ s·2^w < x + 1; powers then stay within 4 units of s^{2k+1}·2^w
    let x = (s.numer() << w) / s.denom();
    let x2 = (&x * &x) >> w;
    let mut pw = x;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !pw.is_zero() {
        sum += &pw / BigInt::from(2 * k + 1);
        pw = (&pw * &x2) >> w;
        k += 1;
    }
    // each term is off by at most 5 units; the dropped tail is below 6
    let err = BigInt::from(5 * (k + 1));
    let scale = pow2(-(w as i64));
    let lo = BigRational::from_integer(&sum - &err) * &scale;
    let hi = BigRational::from_integer(sum + err + 8) * scale;
    Interval::new(lo, hi).rounded(prec + 8)
}

static LN2_CACHE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();

fn ln2_interval(prec: u32) -> Interval {
    let cache = LN2_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let v = atanh_interval(&q(1, 3), prec).scale(&BigRational::from_integer(BigInt::from(2)));
    cache.lock().unwrap().insert(prec, v.clone());
    v
}

/// Enclosure of ln(y) for a positive rational y.
pub fn ln_interval(y: &Rational, prec: u32) -> Interval {
    assert!(y.is_positive(), "ln of nonpositive rational");
    if y.is_one() {
        return Interval::point(Rational::zero());
    }
    // y = 2^e · z with z in [1, 2)
    let mut e = log2_est(y);
    let mut z = y / pow2(e);
    while z >= BigRational::from_integer(BigInt::from(2)) {
        z /= BigRational::from_integer(BigInt::from(2));
        e += 1;
    }
    while z < Rational::one() {
        z *= BigRational::from_integer(BigInt::from(2));
        e -= 1;
    }
    let p2 = prec + 16 + (64 - (e.unsigned_abs()).leading_zeros());
    let s = (&z - Rational::one()) / (&z + Rational::one());
    let lz = if s.is_zero() {
        Interval::point(Rational::zero())
    } else {
        atanh_interval(&s, p2).scale(&BigRational::from_integer(BigInt::from(2)))
    };
    let l2 = ln2_interval(p2).scale(&BigRational::from_integer(BigInt::from(e)));
    lz.add(&l2).rounded(prec + 4)
}

static LOG_CACHE: OnceLock<Mutex<HashMap<(u64, u32), Interval>>> = OnceLock::new();

/// Cached enclosure of ln(p).
pub fn ln_prime(p: u64, prec: u32) -> Interval {
    let cache = LOG_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(p, prec)) {
        return v.clone();
    }
    let v = ln_interval(&BigRational::from_integer(BigInt::from(p)), prec);
    cache.lock().unwrap().insert((p, prec), v.clone());
    v
}

/// Enclosure of exp(x) for rational x.
pub fn exp_interval(x: &Rational, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::point(Rational::one());
    }
    let ax = x.abs();
    // halve until |r| ≤ 1/2
    let mut j: u32 = 0;
    let mut r = ax.clone();
    let half = q(1, 2);
    while r > half {
        r /= BigRational::from_integer(BigInt::from(2));
        j += 1;
    }
    let w = prec + j + 32;
    // Taylor series for exp(r), 0 < r ≤ 1/2
    let mut term_lo = Rational::one();
    let mut term_hi = Rational::one();
    let mut sum_lo = Rational::one();
    let mut sum_hi = Rational::one();
    let eps = pow2(-(w as i64) - 4);
    let mut i: i64 = 1;
    loop {
        let di = BigRational::from_integer(BigInt::from(i));
        term_lo = round_down(&(&term_lo * &r / &di), w);
        term_hi = round_up(&(&term_hi * &r / &di), w);
        sum_lo += &term_lo;
        sum_hi += &term_hi;
        i += 1;
        if term_hi < eps {
            break;
        }
    }
    // remainder ≤ 2·(next term) since r ≤ 1/2
    sum_hi += &term_hi * BigRational::from_integer(BigInt::from(2));
    let mut lo = sum_lo;
    let mut hi = sum_hi;
    for _ in 0..j {
        lo = round_down(&(&lo * &lo), w);
        hi = round_up(&(&hi * &hi), w);
    }
    if x.is_negative() {
        let nlo = round_down(&(Rational::one() / &hi), w);
        let nhi = round_up(&(Rational::one() / &lo), w);
        lo = nlo;
        hi = nhi;
    }
    Interval::new(lo, hi).rounded(prec + 4)
}
