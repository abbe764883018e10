//! Radial archimedean Green functions on P¹(C), as piecewise-linear
//! functions of u = log|z|² plus a log-linear constant.
//!
//! The Chern measure of a radial function is its slope-jump measure, so
//! max(0, u) has a unit atom at u = 0.

use num_traits::{Signed, Zero};

use crate::error::{AdelicError, Result};
use crate::exactmath::lognum::LogNumber;
use crate::exactmath::pl::PLFunction;
use crate::exactmath::rational::{q, qi, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadialGreen {
    pub pl: PLFunction,
    pub a0: Rational,
    pub ainf: Rational,
    /// constant added to `pl`; carries log terms such as −log c²
    pub shift: LogNumber,
}

impl RadialGreen {
    pub fn new(pl: PLFunction, a0: Rational, ainf: Rational, shift: LogNumber) -> Result<Self> {
        if pl.left_slope() != &-a0.clone() || pl.right_slope() != &ainf {
            return Err(AdelicError::InvalidInput(format!(
                "archimedean slopes ({}, {}) do not match coefficients a0 = {}, aInf = {}",
                pl.left_slope(),
                pl.right_slope(),
                a0,
                ainf
            )));
        }
        Ok(RadialGreen { pl, a0, ainf, shift })
    }

    /// Coefficients read off the end slopes.
    pub fn from_pl(pl: PLFunction) -> Self {
        RadialGreen { a0: -pl.left_slope().clone(), ainf: pl.right_slope().clone(), pl, shift: LogNumber::zero() }
    }

    /// log max(1, |z|²)
    pub fn naive() -> Self {
        Self::from_pl(PLFunction::relu())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_pl(PLFunction::constant(c))
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn value(&self, u: &Rational) -> LogNumber {
        &LogNumber::from_rational(self.pl.eval(u)) + &self.shift
    }

    pub fn has_zero_end_slopes(&self) -> bool {
        self.a0.is_zero() && self.ainf.is_zero()
    }

    pub fn add(&self, o: &RadialGreen) -> RadialGreen {
        RadialGreen {
            pl: self.pl.add(&o.pl),
            a0: &self.a0 + &o.a0,
            ainf: &self.ainf + &o.ainf,
            shift: &self.shift + &o.shift,
        }
    }

    pub fn sub(&self, o: &RadialGreen) -> RadialGreen {
        self.add(&o.scale(&qi(-1)))
    }

    pub fn scale(&self, c: &Rational) -> RadialGreen {
        RadialGreen { pl: self.pl.scale(c), a0: &self.a0 * c, ainf: &self.ainf * c, shift: self.shift.scale(c) }
    }

    pub fn add_constant(&self, c: &Rational) -> RadialGreen {
        RadialGreen { pl: self.pl.add_constant(c), ..self.clone() }
    }

    pub fn add_shift(&self, s: &LogNumber) -> RadialGreen {
        RadialGreen { shift: &self.shift + s, ..self.clone() }
    }

    /// g ≤ o everywhere, for equal end slopes or slopes that only widen
    /// the gap toward both ends.
    pub fn leq(&self, o: &RadialGreen) -> bool {
        let d = o.pl.sub(&self.pl);
        let s = &o.shift - &self.shift;
        d.left_slope() <= &Rational::zero()
            && d.right_slope() >= &Rational::zero()
            && d.points().iter().all(|(_, y)| !(&LogNumber::from_rational(y.clone()) + &s).is_negative())
    }
}

/// Convexity of the PL part; for radial functions this is positivity of
/// the Chern current.
pub fn is_psh(g: &RadialGreen) -> bool {
    g.pl.is_convex()
}

/// Positivity of the Chern measure after adding `extra` mass at u = 0,
/// which is where the chordal Green functions of non-toric points put
/// their curvature.
pub fn is_psh_with_mass_at_zero(g: &RadialGreen, extra: &Rational) -> bool {
    let mut zero_seen = false;
    let ok = g.pl.jumps().iter().all(|(u, j)| {
        if u.is_zero() {
            zero_seen = true;
            !(j + extra).is_negative()
        } else {
            !j.is_negative()
        }
    });
    ok && (zero_seen || !extra.is_negative())
}

/// Greatest psh minorant with the same end slopes.
pub fn psh_envelope(g: &RadialGreen) -> Result<RadialGreen> {
    if -&g.a0 > g.ainf {
        return Err(AdelicError::NoMinorant);
    }
    Ok(RadialGreen { pl: g.pl.convex_minorant()?, ..g.clone() })
}

/// Greatest psh minorant whose slopes lie in [−b₀, b_∞]; its coefficients
/// become (b₀, b_∞).
pub fn psh_envelope_with_slopes(g: &RadialGreen, b0: &Rational, binf: &Rational) -> Result<RadialGreen> {
    let pl = g.pl.convex_minorant_with_slopes(&-b0.clone(), binf)?;
    Ok(RadialGreen { pl, a0: b0.clone(), ainf: binf.clone(), shift: g.shift.clone() })
}

/// −(1/2)∫ φ′ψ′ du for functions with zero end slopes.
pub fn arch_pairing(phi: &RadialGreen, psi: &RadialGreen) -> Result<Rational> {
    Ok(-phi.pl.slope_pairing(&psi.pl)? / qi(2))
}

/// (1/2)∫ φ dμ with μ the slope-jump measure of `d`.
pub fn mixed_pairing(d: &RadialGreen, phi: &RadialGreen) -> LogNumber {
    let mut acc = LogNumber::zero();
    for (u, jump) in d.pl.jumps() {
        acc += phi.value(&u).scale(&(jump * q(1, 2)));
    }
    acc
}

/// (1/2)·inf_u (g(u) − x·u), the archimedean part of the concave transform.
/// `None` outside [−a₀, a_∞].
pub fn arch_theta(g: &RadialGreen, x: &Rational) -> Option<LogNumber> {
    let v = g.pl.legendre_inf(x)?;
    Some((&LogNumber::from_rational(v) + &g.shift).scale(&q(1, 2)))
}

/// log ‖z^k‖ = −(1/2)·inf_u (g(u) − k·u).
pub fn monomial_log_norm(g: &RadialGreen, k: &Rational) -> Result<LogNumber> {
    arch_theta(g, k).map(|t| -t).ok_or(AdelicError::InfiniteNorm)
}

/// g at the point x, i.e. at u = log x².
pub fn eval_at_point(g: &RadialGreen, x: &Rational) -> LogNumber {
    assert!(!x.is_zero(), "evaluation at 0");
    let u = LogNumber::log_abs(x).scale(&qi(2));
    &g.pl.eval_log(&u) + &g.shift
}

/// Half of the canonical chordal Green function of the point y, evaluated
/// at x: log max(1,|x|) + log max(1,|y|) − log|x − y|.
pub fn chordal_half(x: &Rational, y: &Rational) -> LogNumber {
    let lm = |v: &Rational| if v.abs() > qi(1) { LogNumber::log_abs(v) } else { LogNumber::zero() };
    &(&lm(x) + &lm(y)) - &LogNumber::log_abs(&(x - y))
}
