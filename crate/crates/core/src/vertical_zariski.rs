//! Relatively nef vertical corrections on a fixed fiber: balancing, the
//! greatest relatively nef subsolution (local Zariski decomposition) and the
//! sectional decomposition for toric monomial sections.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::error::{AdelicError, Result};
use crate::exactmath::matrix::{dot, solve_consistent, solve_unique, vadd, vsub, QVector};
use crate::exactmath::rational::{min_q, qi, Rational};
use crate::fiber::FiberModel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsolutionResult {
    pub q: QVector,
    pub active_set: BTreeSet<usize>,
    /// h + M q, one entry per component
    pub slack: QVector,
}

fn check_dims(m: &FiberModel, v: &[Rational], what: &str) -> Result<()> {
    if v.len() != m.len() {
        return Err(AdelicError::ModelMismatch(format!("{what} has length {} but the fiber has {}", v.len(), m.len())));
    }
    Ok(())
}

/// x with M x = target and x₀ = 0.
pub fn balance(m: &FiberModel, target: &[Rational]) -> Result<QVector> {
    check_dims(m, target, "target")?;
    let deg = dot(&m.mult, target);
    if !deg.is_zero() {
        return Err(AdelicError::Infeasible(format!("target has fiber degree {deg}")));
    }
    let x = solve_consistent(&m.ix, target).map_err(|_| AdelicError::Infeasible("target outside the image".into()))?;
    let c = &x[0] / &m.mult[0];
    Ok(x.iter().zip(&m.mult).map(|(xi, ai)| xi - &c * ai).collect())
}

/// The greatest q ≤ d with h + M q ≥ 0, by the monotone active-set
/// iteration.
pub fn greatest_subsolution(m: &FiberModel, h: &[Rational], d: &[Rational]) -> Result<SubsolutionResult> {
    check_dims(m, h, "h")?;
    check_dims(m, d, "d")?;
    let n = m.len();
    let mut q: QVector = d.to_vec();
    let mut active: BTreeSet<usize> = BTreeSet::new();
    loop {
        let slack = vadd(h, &m.ix.mul_vec(&q));
        let neg: Vec<usize> = (0..n).filter(|&j| slack[j].is_negative()).collect();
        if neg.is_empty() {
            break;
        }
        active.extend(neg);
        let s: Vec<usize> = active.iter().copied().collect();
        let rhs: QVector = s
            .iter()
            .map(|&i| {
                let off: Rational = (0..n).filter(|j| !active.contains(j)).map(|j| m.ix.get(i, j) * &d[j]).sum();
                -(&h[i] + off)
            })
            .collect();
        match solve_unique(&m.ix.principal(&s), &rhs) {
            Some(x) => {
                for (k, &i) in s.iter().enumerate() {
                    q[i] = x[k].clone();
                }
            }
            None if s.len() == n => {
                // every slack must vanish: q = q₀ + λ·a with the largest λ
                let neg_h: QVector = h.iter().map(|x| -x).collect();
                let q0 = solve_consistent(&m.ix, &neg_h)
                    .map_err(|_| AdelicError::Infeasible("horizontal degree along the fiber is negative".into()))?;
                let lambda = (0..n)
                    .map(|j| (&d[j] - &q0[j]) / &m.mult[j])
                    .reduce(|a, b| min_q(&a, &b).clone())
                    .expect("nonempty fiber");
                q = q0.iter().zip(&m.mult).map(|(x, a)| x + &lambda * a).collect();
            }
            None => {
                return Err(AdelicError::Infeasible("singular active block".into()));
            }
        }
    }
    let res = SubsolutionResult { slack: vadd(h, &m.ix.mul_vec(&q)), q, active_set: active };
    if !verify_subsolution(d, &res) {
        return Err(AdelicError::Infeasible("certificate check failed".into()));
    }
    Ok(res)
}

/// q ≤ d, slack ≥ 0, and slack_j = 0 wherever q_j < d_j.
pub fn verify_subsolution(d: &[Rational], r: &SubsolutionResult) -> bool {
    r.q.iter().zip(d).all(|(q, d)| q <= d)
        && r.slack.iter().all(|s| !s.is_negative())
        && r.q.iter().zip(d).zip(&r.slack).all(|((q, d), s)| q == d || s.is_zero())
}

/// Σ_j (d_j − q_j)·slack_j = (H + Q)·(D − Q).
pub fn perpendicularity_check(d: &[Rational], r: &SubsolutionResult) -> Rational {
    dot(&vsub(d, &r.q), &r.slack)
}

/// Horizontal coefficients at 0 and ∞ with a vertical part on one fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalToricDivisor {
    pub b0: Rational,
    pub binf: Rational,
    pub vert: QVector,
}

/// The section p^e · z^k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSection {
    pub k: i64,
    pub p_exp: i64,
}

/// D + div(s) for a monomial section, given w = ord(z) on the components.
pub fn add_section_divisor(m: &FiberModel, w: &[Rational], d: &LocalToricDivisor, s: &MonomialSection) -> LocalToricDivisor {
    let k = qi(s.k);
    let e = qi(s.p_exp);
    LocalToricDivisor {
        b0: &d.b0 + &k,
        binf: &d.binf - &k,
        vert: (0..m.len()).map(|j| &d.vert[j] + &k * &w[j] + &e * &m.mult[j]).collect(),
    }
}

/// F = componentwise minimum of D + div(s) over the sections; P = D − F.
pub fn sectional_decomposition_local(
    m: &FiberModel,
    w: &[Rational],
    d: &LocalToricDivisor,
    sections: &[MonomialSection],
) -> Result<(LocalToricDivisor, LocalToricDivisor)> {
    check_dims(m, w, "w")?;
    check_dims(m, &d.vert, "vertical part")?;
    let mut fixed: Option<LocalToricDivisor> = None;
    for s in sections {
        let e = add_section_divisor(m, w, d, s);
        if e.b0.is_negative() || e.binf.is_negative() || e.vert.iter().any(|x| x.is_negative()) {
            return Err(AdelicError::InvalidSection(format!("p^{}·z^{}", s.p_exp, s.k)));
        }
        fixed = Some(match fixed {
            None => e,
            Some(f) => LocalToricDivisor {
                b0: min_q(&f.b0, &e.b0).clone(),
                binf: min_q(&f.binf, &e.binf).clone(),
                vert: f.vert.iter().zip(&e.vert).map(|(a, b)| min_q(a, b).clone()).collect(),
            },
        });
    }
    let f = fixed.ok_or(AdelicError::EmptySections)?;
    let p = LocalToricDivisor { b0: &d.b0 - &f.b0, binf: &d.binf - &f.binf, vert: vsub(&d.vert, &f.vert) };
    Ok((p, f))
}
