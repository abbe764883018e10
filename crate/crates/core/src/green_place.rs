//! Non-archimedean Green functions at one prime, stored as model data:
//! a vertical divisor on a fiber model plus the specialization of the
//! horizontal points.
//!
//! Component 0 of every model is the strict transform of the original fiber
//! of P¹ over Z_p, where z is a unit. The points 0 and ∞ must specialize to
//! multiplicity-one components; this gives the toric frame
//! w = ord(z), the pullbacks v, v′ of the closures of 0 and ∞, and the
//! skeleton joining the two.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{AdelicError, Result};
use crate::exactmath::lognum::LogNumber;
use crate::exactmath::matrix::{unit_vec, vadd, vsub, QVector};
use crate::exactmath::pl::PLFunction;
use crate::exactmath::rational::{fmt_rational, max_q, ord_p, parse_rational, qi, Rational};
use crate::fiber::{FiberModel, VerticalDivisor};
use crate::vertical_zariski::balance;

/// A rational point of P¹: 0, ∞, or a nonzero rational.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HPoint {
    Zero,
    Infinity,
    Finite(Rational),
}

impl HPoint {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" => Ok(HPoint::Infinity),
            t => {
                let x = parse_rational(t)?;
                Ok(Self::from_rational(x))
            }
        }
    }

    pub fn from_rational(x: Rational) -> Self {
        if x.is_zero() {
            HPoint::Zero
        } else {
            HPoint::Finite(x)
        }
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HPoint::Zero => write!(f, "0"),
            HPoint::Infinity => write!(f, "inf"),
            HPoint::Finite(x) => write!(f, "{}", fmt_rational(x)),
        }
    }
}

/// Horizontal divisor a₀[0] + a_∞[∞] + Σ b_y [y].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Horizontal {
    pub a0: Rational,
    pub ainf: Rational,
    /// nonzero finite points with nonzero coefficients
    pub others: BTreeMap<Rational, Rational>,
}

impl Horizontal {
    pub fn toric(a0: Rational, ainf: Rational) -> Self {
        Horizontal { a0, ainf, others: BTreeMap::new() }
    }

    pub fn degree(&self) -> Rational {
        &self.a0 + &self.ainf + self.others.values().sum::<Rational>()
    }

    pub fn others_degree(&self) -> Rational {
        self.others.values().sum()
    }

    pub fn is_toric(&self) -> bool {
        self.others.is_empty()
    }

    pub fn coeff(&self, x: &HPoint) -> Rational {
        match x {
            HPoint::Zero => self.a0.clone(),
            HPoint::Infinity => self.ainf.clone(),
            HPoint::Finite(y) => self.others.get(y).cloned().unwrap_or_else(Rational::zero),
        }
    }

    pub fn set(&mut self, x: &HPoint, c: Rational) {
        match x {
            HPoint::Zero => self.a0 = c,
            HPoint::Infinity => self.ainf = c,
            HPoint::Finite(y) => {
                if c.is_zero() {
                    self.others.remove(y);
                } else {
                    self.others.insert(y.clone(), c);
                }
            }
        }
    }

    pub fn add(&self, o: &Horizontal) -> Horizontal {
        let mut out = self.clone();
        out.a0 += &o.a0;
        out.ainf += &o.ainf;
        for (y, b) in &o.others {
            let c = out.coeff(&HPoint::Finite(y.clone())) + b;
            out.set(&HPoint::Finite(y.clone()), c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Horizontal {
        let mut out = Horizontal::toric(&self.a0 * c, &self.ainf * c);
        for (y, b) in &self.others {
            out.set(&HPoint::Finite(y.clone()), b * c);
        }
        out
    }

    pub fn support_contains(&self, x: &HPoint) -> bool {
        !self.coeff(x).is_zero()
    }
}

/// Torus coordinates of a framed model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricFrame {
    pub s0: usize,
    pub sinf: usize,
    /// ord_{Γ_j}(z)
    pub w: QVector,
    /// pullback of the closure of 0 is [0] + Σ v_j Γ_j
    pub v0: QVector,
    /// pullback of the closure of ∞ is [∞] + Σ v′_j Γ_j
    pub vinf: QVector,
    /// t_j = w_j / a_j
    pub t: QVector,
    /// skeleton components ordered by increasing t (trees only)
    pub skeleton: Option<Vec<usize>>,
    /// for each component, the skeleton vertex its branch hangs from
    pub attach: Option<Vec<usize>>,
}

impl ToricFrame {
    pub fn compute(model: &FiberModel, s0: usize, sinf: usize) -> Result<Self> {
        let n = model.len();
        for s in [s0, sinf] {
            if model.mult[s] != qi(1) {
                return Err(AdelicError::InvalidInput(format!(
                    "p = {}: horizontal point specializes to {} of multiplicity {}",
                    model.prime, model.names[s], model.mult[s]
                )));
            }
        }
        if model.mult[0] != qi(1) {
            return Err(AdelicError::InvalidInput(format!(
                "p = {}: reference component {} must have multiplicity 1",
                model.prime, model.names[0]
            )));
        }
        let e0 = unit_vec(n, 0);
        let w = balance(model, &vsub(&unit_vec(n, sinf), &unit_vec(n, s0)))?;
        let v0 = balance(model, &vsub(&e0, &unit_vec(n, s0)))?;
        let vinf = balance(model, &vsub(&e0, &unit_vec(n, sinf)))?;
        let t: QVector = w.iter().zip(&model.mult).map(|(w, a)| w / a).collect();
        let (skeleton, attach) = match model.tree_path(sinf, s0) {
            Some(path) => {
                let mut attach = vec![usize::MAX; n];
                for &j in &path {
                    attach[j] = j;
                }
                // breadth-first from the skeleton
                let mut frontier = path.clone();
                while let Some(i) = frontier.pop() {
                    for j in model.neighbors(i) {
                        if attach[j] == usize::MAX {
                            attach[j] = attach[i];
                            frontier.push(j);
                        }
                    }
                }
                (Some(path), Some(attach))
            }
            None => (None, None),
        };
        Ok(ToricFrame { s0, sinf, w, v0, vinf, t, skeleton, attach })
    }

    /// Skeleton t-values strictly increase from ∞ to 0 and every branch
    /// sits at the t of its attachment vertex.
    pub fn is_toric_shape(&self) -> bool {
        let (Some(sk), Some(att)) = (&self.skeleton, &self.attach) else {
            return false;
        };
        sk.windows(2).all(|w| self.t[w[0]] < self.t[w[1]]) && (0..self.t.len()).all(|j| self.t[j] == self.t[att[j]])
    }

    /// Vertical part on this model of the pullback of
    /// c₀·(fiber) + a₀[0] + a_∞[∞] from the smooth model.
    pub fn pullback_smooth(&self, model: &FiberModel, c0: &Rational, a0: &Rational, ainf: &Rational) -> QVector {
        (0..model.len()).map(|j| c0 * &model.mult[j] + a0 * &self.v0[j] + ainf * &self.vinf[j]).collect()
    }
}

/// Green function at one prime as model data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreenData {
    pub model: FiberModel,
    pub vert: QVector,
    /// fiber degrees of the horizontal part
    pub hdeg: QVector,
    /// specialization components; must contain 0 and ∞
    pub spec: BTreeMap<HPoint, usize>,
}

impl GreenData {
    pub fn new(model: FiberModel, vert: QVector, spec: BTreeMap<HPoint, usize>, horiz: &Horizontal) -> Result<Self> {
        if vert.len() != model.len() {
            return Err(AdelicError::ModelMismatch(format!(
                "p = {}: {} vertical coefficients for {} components",
                model.prime,
                vert.len(),
                model.len()
            )));
        }
        for key in [HPoint::Zero, HPoint::Infinity] {
            if !spec.contains_key(&key) {
                return Err(AdelicError::InvalidInput(format!("p = {}: spec must place {key}", model.prime)));
            }
        }
        for (x, &j) in &spec {
            if j >= model.len() {
                return Err(AdelicError::InvalidInput(format!("p = {}: spec of {x} names no component", model.prime)));
            }
            if model.mult[j] != qi(1) {
                return Err(AdelicError::InvalidInput(format!(
                    "p = {}: {x} specializes to a component of multiplicity {}",
                    model.prime, model.mult[j]
                )));
            }
        }
        let hdeg = horizontal_degrees(&model, &spec, horiz);
        Ok(GreenData { model, vert, hdeg, spec })
    }

    /// The smooth model with the closure of the horizontal divisor.
    pub fn default_for(prime: u64, horiz: &Horizontal) -> Self {
        Self::smooth_constant(prime, Rational::zero(), horiz)
    }

    /// The smooth model with vertical coefficient c₀ on the single fiber.
    pub fn smooth_constant(prime: u64, c0: Rational, horiz: &Horizontal) -> Self {
        let spec = BTreeMap::from([(HPoint::Zero, 0), (HPoint::Infinity, 0)]);
        GreenData::new(FiberModel::smooth(prime), vec![c0], spec, horiz).expect("smooth model is valid")
    }

    pub fn prime(&self) -> u64 {
        self.model.prime
    }

    pub fn is_default(&self) -> bool {
        self.model.is_smooth() && self.vert[0].is_zero()
    }

    pub fn frame(&self) -> Result<ToricFrame> {
        ToricFrame::compute(&self.model, self.spec[&HPoint::Zero], self.spec[&HPoint::Infinity])
    }

    /// Recomputes the horizontal degrees for a new horizontal divisor.
    pub fn with_horizontal(&self, horiz: &Horizontal) -> Self {
        GreenData { hdeg: horizontal_degrees(&self.model, &self.spec, horiz), ..self.clone() }
    }

    pub fn vertical(&self) -> VerticalDivisor {
        VerticalDivisor { model: self.model.clone(), coeffs: self.vert.clone() }
    }

    /// Slack vector h + M c; all entries ≥ 0 iff relatively nef.
    pub fn degrees(&self) -> QVector {
        vadd(&self.hdeg, &self.model.ix.mul_vec(&self.vert))
    }

    pub fn is_rel_nef(&self) -> bool {
        self.degrees().iter().all(|d| !d.is_negative())
    }

    /// Off-skeleton components dominate their attachment vertex, so the
    /// Green function on the torus depends only on the skeleton.
    pub fn is_toric(&self) -> bool {
        let Ok(fr) = self.frame() else { return false };
        if !fr.is_toric_shape() {
            return false;
        }
        let att = fr.attach.as_ref().unwrap();
        let a = &self.model.mult;
        (0..self.model.len()).all(|j| &self.vert[j] / &a[j] >= &self.vert[att[j]] / &a[att[j]])
    }

    /// ψ(t) with local degree ψ(ord_p x)·log p at torus points, for framed
    /// trees: node values c_j/a_j on the skeleton, slope a₀ beyond the node
    /// of 0 and −a_∞ beyond the node of ∞.
    pub fn skeleton_function(&self, horiz: &Horizontal) -> Result<PLFunction> {
        let fr = self.frame()?;
        let Some(sk) = fr.skeleton.as_ref().filter(|_| fr.is_toric_shape()) else {
            return Err(AdelicError::NotToric(format!("model at p = {} has no toric skeleton", self.prime())));
        };
        let pts = sk.iter().map(|&j| (fr.t[j].clone(), &self.vert[j] / &self.model.mult[j])).collect();
        PLFunction::new(pts, -horiz.ainf.clone(), horiz.a0.clone())
    }
}

fn horizontal_degrees(model: &FiberModel, spec: &BTreeMap<HPoint, usize>, horiz: &Horizontal) -> QVector {
    let mut h = vec![Rational::zero(); model.len()];
    h[spec[&HPoint::Zero]] += &horiz.a0;
    h[spec[&HPoint::Infinity]] += &horiz.ainf;
    // points off the torus carry the chordal Green function, whose pullback
    // meets only the reference component
    h[0] += horiz.others_degree();
    h
}

fn same_shape(g1: &GreenData, g2: &GreenData) -> Result<()> {
    if g1.model != g2.model || g1.spec != g2.spec || g1.hdeg != g2.hdeg {
        return Err(AdelicError::ModelMismatch(format!("Green data at p = {} differ in model or horizontal data", g1.prime())));
    }
    Ok(())
}

/// θ(x_j) = (2 c_j / a_j)·log p
pub fn node_value(g: &GreenData, j: usize) -> LogNumber {
    LogNumber::log_prime_times(g.prime(), qi(2) * &g.vert[j] / &g.model.mult[j])
}

pub fn green_leq(g1: &GreenData, g2: &GreenData) -> Result<bool> {
    same_shape(g1, g2)?;
    Ok(g1.vert.iter().zip(&g2.vert).all(|(a, b)| a <= b))
}

pub fn green_max(g1: &GreenData, g2: &GreenData) -> Result<GreenData> {
    same_shape(g1, g2)?;
    Ok(GreenData { vert: g1.vert.iter().zip(&g2.vert).map(|(a, b)| max_q(a, b).clone()).collect(), ..g1.clone() })
}

/// Intersection multiplicity at p of the closures of x and y on the smooth
/// model.
pub fn chordal_linking(x: &HPoint, y: &Rational, p: u64) -> i64 {
    let oy = ord_p(y, p);
    match x {
        HPoint::Zero => oy.max(0),
        HPoint::Infinity => (-oy).max(0),
        HPoint::Finite(xv) => {
            if xv == y {
                panic!("linking of a point with itself");
            }
            ord_p(&(xv - y), p) - ord_p(xv, p).min(0) - oy.min(0)
        }
    }
}

/// Local degree of the divisor at the point x: half the Green function,
/// plus the horizontal linking terms.
pub fn local_degree(g: &GreenData, x: &HPoint, horiz: &Horizontal) -> Result<LogNumber> {
    if horiz.support_contains(x) {
        return Err(AdelicError::SupportOverlap);
    }
    let p = g.prime();
    let a = &g.model.mult;
    let toric_part: Rational = if let Some(&j) = g.spec.get(x) {
        let fr = g.frame()?;
        let mut val = &g.vert[j] / &a[j];
        if let HPoint::Finite(xv) = x {
            let ox = qi(ord_p(xv, p));
            if j == fr.s0 {
                val += &horiz.a0 * max_q(&(&ox - &fr.t[j]), &Rational::zero());
            }
            if j == fr.sinf {
                val += &horiz.ainf * max_q(&(&fr.t[j] - &ox), &Rational::zero());
            }
        }
        val
    } else {
        let HPoint::Finite(xv) = x else { unreachable!("0 and ∞ are always placed") };
        let psi = g
            .skeleton_function(horiz)
            .map_err(|_| AdelicError::UnresolvedSpecialization(x.to_string(), p))?;
        psi.eval(&qi(ord_p(xv, p)))
    };
    let linking: Rational = horiz.others.iter().map(|(y, b)| b * qi(chordal_linking(x, y, p))).sum();
    Ok(LogNumber::log_prime_times(p, toric_part + linking))
}

/// Σ_j φ_j·(h + M c)_j·log p
pub fn local_intersection(g: &GreenData, phi: &VerticalDivisor) -> Result<LogNumber> {
    if g.model != phi.model {
        return Err(AdelicError::ModelMismatch("model function lives on another model".into()));
    }
    let deg = g.degrees();
    Ok(LogNumber::log_prime_times(g.prime(), phi.coeffs.iter().zip(&deg).map(|(f, d)| f * d).sum()))
}

/// c_φᵀ M c_ψ · log p
pub fn model_pairing(phi: &VerticalDivisor, psi: &VerticalDivisor) -> Result<LogNumber> {
    let v = crate::fiber::vertical_pairing(phi, psi)?;
    Ok(LogNumber::log_prime_times(phi.model.prime, v))
}
