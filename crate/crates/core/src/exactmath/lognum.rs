//! Exact values of the form q₀ + Σ q_p·log p.
//!
//! Because 1 and the log p are linearly independent over Q, equality is
//! coefficient-wise. Signs of nonzero values are decided by interval
//! evaluation with increasing precision, which terminates.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::interval::{ln_prime, Interval};
use super::rational::{factor_rational, fmt_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LogNumber {
    unit: Rational,
    logs: BTreeMap<u64, Rational>,
}

pub const SIGN_START_BITS: u32 = 200;

impl LogNumber {
    pub fn zero() -> Self {
        LogNumber::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        LogNumber { unit: q, logs: BTreeMap::new() }
    }

    pub fn from_parts(unit: Rational, logs: impl IntoIterator<Item = (u64, Rational)>) -> Self {
        let mut out = LogNumber::from_rational(unit);
        for (p, c) in logs {
            out.add_log(p, &c);
        }
        out
    }

    /// c·log p
    pub fn log_prime_times(p: u64, c: Rational) -> Self {
        let mut out = LogNumber::zero();
        out.add_log(p, &c);
        out
    }

    pub fn log_prime(p: u64) -> Self {
        Self::log_prime_times(p, Rational::from_integer(BigInt::from(1)))
    }

    /// log |x| for a nonzero rational x.
    pub fn log_abs(x: &Rational) -> Self {
        let mut out = LogNumber::zero();
        for (p, e) in factor_rational(x) {
            out.add_log(p, &Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    fn add_log(&mut self, p: u64, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.logs.entry(p).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.logs.remove(&p);
        }
    }

    pub fn unit(&self) -> &Rational {
        &self.unit
    }

    pub fn logs(&self) -> &BTreeMap<u64, Rational> {
        &self.logs
    }

    pub fn coeff(&self, p: u64) -> Rational {
        self.logs.get(&p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero() && self.logs.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.logs.is_empty() {
            Some(&self.unit)
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return LogNumber::zero();
        }
        LogNumber {
            unit: &self.unit * c,
            logs: self.logs.iter().map(|(p, v)| (*p, v * c)).collect(),
        }
    }

    /// `Some(r)` with `self = r·other`, when `other` is nonzero and the two
    /// are proportional over Q.
    pub fn ratio_to(&self, other: &LogNumber) -> Option<Rational> {
        if other.is_zero() {
            return None;
        }
        let r = if !other.unit.is_zero() {
            &self.unit / &other.unit
        } else {
            let (p, c) = other.logs.iter().next().unwrap();
            self.coeff(*p) / c
        };
        if &other.scale(&r) == self {
            Some(r)
        } else {
            None
        }
    }

    /// Enclosure of the real value at roughly `prec` bits.
    pub fn interval(&self, prec: u32) -> Interval {
        let mut acc = Interval::point(self.unit.clone());
        for (p, c) in &self.logs {
            acc = acc.add(&ln_prime(*p, prec + 8).scale(c));
        }
        acc.rounded(prec + 4)
    }

    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if self.logs.is_empty() {
            return self.unit.cmp(&Rational::zero());
        }
        let mut prec = SIGN_START_BITS;
        loop {
            if let Some(s) = self.interval(prec).sign() {
                if s != Ordering::Equal {
                    return s;
                }
            }
            prec *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn to_f64(&self) -> f64 {
        super::rational::to_f64(&self.interval(80).mid())
    }

    /// Decimal rendering with `digits` digits after the point, correct to
    /// within one unit of the last digit.
    pub fn to_decimal(&self, digits: u32) -> String {
        let bits = (digits as f64 * 3.33) as u32 + 32;
        let mid = self.interval(bits).mid();
        decimal_string(&mid, digits)
    }
}

pub fn decimal_string(x: &Rational, digits: u32) -> String {
    let scale = BigRational::from_integer(BigInt::from(10).pow(digits));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let scaled = (x.abs() * scale + half).floor().to_integer();
    let s = scaled.to_string();
    let d = digits as usize;
    let (ip, fp) = if s.len() > d {
        (s[..s.len() - d].to_string(), s[s.len() - d..].to_string())
    } else {
        ("0".to_string(), format!("{:0>width$}", s, width = d))
    };
    let neg = x.is_negative() && !scaled.is_zero();
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{fp}")
    }
}

impl fmt::Display for LogNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.unit.is_zero() {
            write!(f, "{}", fmt_rational(&self.unit))?;
            first = false;
        }
        for (p, c) in &self.logs {
            if first {
                write!(f, "{}·log{}", fmt_rational(c), p)?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}·log{}", fmt_rational(&-c), p)?;
            } else {
                write!(f, " + {}·log{}", fmt_rational(c), p)?;
            }
        }
        Ok(())
    }
}

impl PartialOrd for LogNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl From<Rational> for LogNumber {
    fn from(q: Rational) -> Self {
        LogNumber::from_rational(q)
    }
}

impl<'a> Add<&'a LogNumber> for &LogNumber {
    type Output = LogNumber;
    fn add(self, o: &'a LogNumber) -> LogNumber {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl Add for LogNumber {
    type Output = LogNumber;
    fn add(mut self, o: LogNumber) -> LogNumber {
        self += &o;
        self
    }
}

impl<'a> AddAssign<&'a LogNumber> for LogNumber {
    fn add_assign(&mut self, o: &'a LogNumber) {
        self.unit += &o.unit;
        for (p, c) in &o.logs {
            self.add_log(*p, c);
        }
    }
}

impl AddAssign for LogNumber {
    fn add_assign(&mut self, o: LogNumber) {
        *self += &o;
    }
}

impl<'a> SubAssign<&'a LogNumber> for LogNumber {
    fn sub_assign(&mut self, o: &'a LogNumber) {
        self.unit -= &o.unit;
        for (p, c) in &o.logs {
            self.add_log(*p, &-c);
        }
    }
}

impl<'a> Sub<&'a LogNumber> for &LogNumber {
    type Output = LogNumber;
    fn sub(self, o: &'a LogNumber) -> LogNumber {
        let mut out = self.clone();
        out -= o;
        out
    }
}

impl Sub for LogNumber {
    type Output = LogNumber;
    fn sub(mut self, o: LogNumber) -> LogNumber {
        self -= &o;
        self
    }
}

impl Neg for &LogNumber {
    type Output = LogNumber;
    fn neg(self) -> LogNumber {
        LogNumber { unit: -&self.unit, logs: self.logs.iter().map(|(p, c)| (*p, -c)).collect() }
    }
}

impl Neg for LogNumber {
    type Output = LogNumber;
    fn neg(self) -> LogNumber {
        -&self
    }
}

impl<'a> Mul<&'a Rational> for &LogNumber {
    type Output = LogNumber;
    fn mul(self, c: &'a Rational) -> LogNumber {
        self.scale(c)
    }
}
