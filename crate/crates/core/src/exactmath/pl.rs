//! Continuous piecewise-linear functions on the real line with rational
//! breakpoints, rational values and rational end slopes.
//!
//! Canonical form keeps only genuine kinks. A function without kinks is a
//! line and is stored with a single anchor point at u = 0, so structural
//! equality coincides with equality of functions.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::lognum::LogNumber;
use super::rational::Rational;
use crate::error::{AdelicError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLFunction {
    pts: Vec<(Rational, Rational)>,
    left: Rational,
    right: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlOp {
    Add,
    Sub,
    Max,
    Min,
}

impl PLFunction {
    /// Builds from strictly increasing breakpoints with values and end slopes.
    pub fn new(pts: Vec<(Rational, Rational)>, left: Rational, right: Rational) -> Result<Self> {
        if pts.is_empty() {
            return Err(AdelicError::InvalidInput("PL function needs at least one point".into()));
        }
        if pts.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(AdelicError::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        Ok(Self::canonical(pts, left, right))
    }

    pub fn line(slope: Rational, at_zero: Rational) -> Self {
        PLFunction { pts: vec![(Rational::zero(), at_zero)], left: slope.clone(), right: slope }
    }

    pub fn constant(c: Rational) -> Self {
        Self::line(Rational::zero(), c)
    }

    /// max(0, u)
    pub fn relu() -> Self {
        let z = Rational::zero();
        PLFunction { pts: vec![(z.clone(), z.clone())], left: z, right: Rational::from_integer(1.into()) }
    }

    fn canonical(pts: Vec<(Rational, Rational)>, left: Rational, right: Rational) -> Self {
        let n = pts.len();
        let mut slopes = Vec::with_capacity(n + 1);
        slopes.push(left.clone());
        for w in pts.windows(2) {
            slopes.push((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0));
        }
        slopes.push(right.clone());
        let kept: Vec<(Rational, Rational)> = pts
            .iter()
            .enumerate()
            .filter(|(i, _)| slopes[*i] != slopes[i + 1])
            .map(|(_, p)| p.clone())
            .collect();
        if kept.is_empty() {
            let (x0, y0) = &pts[0];
            let at_zero = y0 - &left * x0;
            return Self::line(left, at_zero);
        }
        PLFunction { pts: kept, left, right }
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.pts
    }

    /// Genuine kinks (empty for a line).
    pub fn breakpoints(&self) -> Vec<Rational> {
        if self.is_line() {
            Vec::new()
        } else {
            self.pts.iter().map(|p| p.0.clone()).collect()
        }
    }

    pub fn is_line(&self) -> bool {
        self.pts.len() == 1 && self.left == self.right
    }

    pub fn left_slope(&self) -> &Rational {
        &self.left
    }

    pub fn right_slope(&self) -> &Rational {
        &self.right
    }

    /// Slopes: left ray, each interior segment, right ray.
    pub fn slopes(&self) -> Vec<Rational> {
        let mut s = vec![self.left.clone()];
        for w in self.pts.windows(2) {
            s.push((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0));
        }
        s.push(self.right.clone());
        s
    }

    /// Slope jump (outgoing minus incoming) at each kink.
    pub fn jumps(&self) -> Vec<(Rational, Rational)> {
        if self.is_line() {
            return Vec::new();
        }
        let s = self.slopes();
        self.pts.iter().enumerate().map(|(i, p)| (p.0.clone(), &s[i + 1] - &s[i])).collect()
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        let n = self.pts.len();
        if u <= &self.pts[0].0 {
            return &self.pts[0].1 + &self.left * (u - &self.pts[0].0);
        }
        if u >= &self.pts[n - 1].0 {
            return &self.pts[n - 1].1 + &self.right * (u - &self.pts[n - 1].0);
        }
        let i = self.pts.partition_point(|p| &p.0 <= u) - 1;
        let (x0, y0) = &self.pts[i];
        let (x1, y1) = &self.pts[i + 1];
        y0 + (y1 - y0) * (u - x0) / (x1 - x0)
    }

    /// Evaluation at a log-linear abscissa; pieces are chosen by exact sign
    /// decisions.
    pub fn eval_log(&self, u: &LogNumber) -> LogNumber {
        if let Some(r) = u.as_rational() {
            return LogNumber::from_rational(self.eval(r));
        }
        let cmp_at = |i: usize| u.cmp(&LogNumber::from_rational(self.pts[i].0.clone()));
        let n = self.pts.len();
        let (x0, y0, slope) = if cmp_at(0) != Ordering::Greater {
            (&self.pts[0].0, &self.pts[0].1, self.left.clone())
        } else if cmp_at(n - 1) != Ordering::Less {
            (&self.pts[n - 1].0, &self.pts[n - 1].1, self.right.clone())
        } else {
            // last i with x_i ≤ u
            let (mut lo, mut hi) = (0usize, n - 1);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if cmp_at(mid) == Ordering::Less {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let (xa, ya) = &self.pts[lo];
            let (xb, yb) = &self.pts[hi];
            (xa, ya, (yb - ya) / (xb - xa))
        };
        let du = u - &LogNumber::from_rational(x0.clone());
        &LogNumber::from_rational(y0.clone()) + &du.scale(&slope)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let pts = self.pts.iter().map(|(x, y)| (x.clone(), y * c)).collect();
        Self::canonical(pts, &self.left * c, &self.right * c)
    }

    pub fn add_constant(&self, c: &Rational) -> Self {
        let pts = self.pts.iter().map(|(x, y)| (x.clone(), y + c)).collect();
        PLFunction { pts, left: self.left.clone(), right: self.right.clone() }
    }

    pub fn combine(&self, g: &PLFunction, op: PlOp) -> PLFunction {
        let mut grid: Vec<Rational> = self.pts.iter().chain(g.pts.iter()).map(|p| p.0.clone()).collect();
        grid.sort();
        grid.dedup();
        if matches!(op, PlOp::Max | PlOp::Min) {
            let h = |u: &Rational| self.eval(u) - g.eval(u);
            let mut extra = Vec::new();
            for w in grid.windows(2) {
                let (ha, hb) = (h(&w[0]), h(&w[1]));
                if (ha.is_positive() && hb.is_negative()) || (ha.is_negative() && hb.is_positive()) {
                    extra.push(&w[0] + (&w[1] - &w[0]) * &ha / (&ha - &hb));
                }
            }
            let x0 = grid[0].clone();
            let hl = &self.left - &g.left;
            let h0 = h(&x0);
            if !hl.is_zero() && !h0.is_zero() {
                let cross = &x0 - &h0 / &hl;
                if cross < x0 {
                    extra.push(cross);
                }
            }
            let xn = grid[grid.len() - 1].clone();
            let hr = &self.right - &g.right;
            let hn = h(&xn);
            if !hr.is_zero() && !hn.is_zero() {
                let cross = &xn - &hn / &hr;
                if cross > xn {
                    extra.push(cross);
                }
            }
            grid.extend(extra);
            grid.sort();
            grid.dedup();
        }
        let pick = |a: Rational, b: Rational| -> Rational {
            match op {
                PlOp::Add => a + b,
                PlOp::Sub => a - b,
                PlOp::Max => {
                    if a >= b {
                        a
                    } else {
                        b
                    }
                }
                PlOp::Min => {
                    if a <= b {
                        a
                    } else {
                        b
                    }
                }
            }
        };
        let pts: Vec<(Rational, Rational)> =
            grid.iter().map(|u| (u.clone(), pick(self.eval(u), g.eval(u)))).collect();
        let one = Rational::from_integer(1.into());
        let end_slope = |fs: &Rational, gs: &Rational, probe: Rational| -> Rational {
            match op {
                PlOp::Add => fs + gs,
                PlOp::Sub => fs - gs,
                PlOp::Max | PlOp::Min => {
                    let d = self.eval(&probe) - g.eval(&probe);
                    let f_wins = if op == PlOp::Max { !d.is_negative() } else { !d.is_positive() };
                    if f_wins {
                        fs.clone()
                    } else {
                        gs.clone()
                    }
                }
            }
        };
        let left = end_slope(&self.left, &g.left, &grid[0] - &one);
        let right = end_slope(&self.right, &g.right, &grid[grid.len() - 1] + &one);
        Self::canonical(pts, left, right)
    }

    pub fn add(&self, g: &PLFunction) -> PLFunction {
        self.combine(g, PlOp::Add)
    }

    pub fn sub(&self, g: &PLFunction) -> PLFunction {
        self.combine(g, PlOp::Sub)
    }

    pub fn max(&self, g: &PLFunction) -> PLFunction {
        self.combine(g, PlOp::Max)
    }

    pub fn min(&self, g: &PLFunction) -> PLFunction {
        self.combine(g, PlOp::Min)
    }

    pub fn neg(&self) -> PLFunction {
        self.scale(&Rational::from_integer((-1).into()))
    }

    pub fn is_convex(&self) -> bool {
        self.slopes().windows(2).all(|w| w[0] <= w[1])
    }

    /// inf_u (f(u) − x·u); `None` means −∞.
    pub fn legendre_inf(&self, x: &Rational) -> Option<Rational> {
        if x < &self.left || x > &self.right {
            return None;
        }
        self.pts.iter().map(|(u, y)| y - x * u).min()
    }

    /// ∫_lo^hi f(u) du.
    pub fn integral(&self, lo: &Rational, hi: &Rational) -> Rational {
        if lo > hi {
            return -self.integral(hi, lo);
        }
        let mut xs = vec![lo.clone()];
        xs.extend(self.pts.iter().map(|p| p.0.clone()).filter(|u| u > lo && u < hi));
        xs.push(hi.clone());
        let two = Rational::from_integer(2.into());
        xs.windows(2).map(|w| (&w[1] - &w[0]) * (self.eval(&w[0]) + self.eval(&w[1])) / &two).sum()
    }

    /// ∫ f′g′ du, defined when all four end slopes vanish.
    pub fn slope_pairing(&self, g: &PLFunction) -> Result<Rational> {
        let z = Rational::zero();
        if self.left != z || self.right != z || g.left != z || g.right != z {
            return Err(AdelicError::UnboundedSupport);
        }
        let mut grid: Vec<Rational> = self.pts.iter().chain(g.pts.iter()).map(|p| p.0.clone()).collect();
        grid.sort();
        grid.dedup();
        Ok(grid
            .windows(2)
            .map(|w| {
                let dx = &w[1] - &w[0];
                let fs = (self.eval(&w[1]) - self.eval(&w[0])) / &dx;
                let gs = (g.eval(&w[1]) - g.eval(&w[0])) / &dx;
                fs * gs * dx
            })
            .sum())
    }

    /// Greatest convex minorant with the same end slopes, by a lower hull
    /// over the breakpoints clipped by the two end rays.
    pub fn convex_minorant(&self) -> Result<PLFunction> {
        if self.left > self.right {
            return Err(AdelicError::NoMinorant);
        }
        let n = self.pts.len();
        let key = |s: &Rational, i: usize| &self.pts[i].1 - s * &self.pts[i].0;
        // first vertex: minimizer of y − left·u with the largest u
        let mut start = 0;
        for i in 1..n {
            if key(&self.left, i) <= key(&self.left, start) {
                start = i;
            }
        }
        // last vertex: minimizer of y − right·u with the smallest u
        let mut end = n - 1;
        for i in (0..n - 1).rev() {
            if key(&self.right, i) <= key(&self.right, end) {
                end = i;
            }
        }
        if self.left == self.right {
            let (x, y) = &self.pts[start];
            return Ok(Self::line(self.left.clone(), y - &self.left * x));
        }
        let mut hull: Vec<(Rational, Rational)> = Vec::new();
        for p in &self.pts[start..=end] {
            while hull.len() >= 2 {
                let (a, b) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
                // pop b if it lies on or above segment a–p
                let cross = (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0);
                if !cross.is_positive() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p.clone());
        }
        Ok(Self::canonical(hull, self.left.clone(), self.right.clone()))
    }

    /// Greatest convex minorant whose slopes lie in [lo, hi], computed as the
    /// Legendre transform of the restricted conjugate
    /// ϑ(s) = inf_u (f(u) − s·u) on [lo, hi].
    pub fn convex_minorant_with_slopes(&self, lo: &Rational, hi: &Rational) -> Result<PLFunction> {
        if lo > hi || lo < &self.left || hi > &self.right {
            return Err(AdelicError::NoMinorant);
        }
        let theta = self.conjugate_inf();
        let mut cands = vec![lo.clone(), hi.clone()];
        cands.extend(theta.breakpoints().into_iter().filter(|s| s > lo && s < hi));
        cands.sort();
        cands.dedup();
        let mut acc: Option<PLFunction> = None;
        for s in &cands {
            let l = Self::line(s.clone(), theta.eval(s));
            acc = Some(match acc {
                None => l,
                Some(a) => a.max(&l),
            });
        }
        Ok(acc.expect("at least one slope"))
    }

    /// s ↦ min_i (y_i − s·u_i) as a concave PL function of s. It equals
    /// inf_u (f(u) − s·u) for s between the end slopes.
    pub fn conjugate_inf(&self) -> PLFunction {
        let mut acc: Option<PLFunction> = None;
        for (u, y) in &self.pts {
            let l = Self::line(-u.clone(), y.clone());
            acc = Some(match acc {
                None => l,
                Some(a) => a.min(&l),
            });
        }
        acc.expect("nonempty")
    }
}
