//! Dual graphs of special fibers: components, multiplicities and the
//! intersection matrix, with validity checks and blow-up constructors.

use num_traits::{One, Signed, Zero};

use crate::error::{AdelicError, Result};
use crate::exactmath::matrix::{dot, semidef_analyze, QMatrix, QVector};
use crate::exactmath::rational::{is_integer, is_prime, qi, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberModel {
    pub prime: u64,
    pub names: Vec<String>,
    /// a_j = ord_{Γ_j}(p)
    pub mult: QVector,
    /// M_ij = C_i · C_j
    pub ix: QMatrix,
}

impl FiberModel {
    pub fn new(prime: u64, names: Vec<String>, mult: QVector, ix: QMatrix) -> Result<Self> {
        let n = names.len();
        if n == 0 || mult.len() != n || ix.rows() != n || ix.cols() != n {
            return Err(AdelicError::InvalidInput(format!(
                "fiber at p = {prime}: {n} names, {} multiplicities, {}×{} matrix",
                mult.len(),
                ix.rows(),
                ix.cols()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        if !names.iter().all(|s| seen.insert(s.clone())) {
            return Err(AdelicError::InvalidInput(format!("fiber at p = {prime}: duplicate component names")));
        }
        Ok(FiberModel { prime, names, mult, ix })
    }

    /// The smooth fiber of P¹ over Z_p: one component, M = [[0]].
    pub fn smooth(prime: u64) -> Self {
        FiberModel { prime, names: vec!["C0".into()], mult: vec![qi(1)], ix: QMatrix::zeros(1, 1) }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_smooth(&self) -> bool {
        self.len() == 1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| j != i && self.ix.get(i, j).is_positive()).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Connected with n − 1 edges counted with multiplicity M_ij.
    pub fn is_tree(&self) -> bool {
        let n = self.len();
        let mut edges = Rational::zero();
        for i in 0..n {
            for j in 0..i {
                edges += self.ix.get(i, j);
            }
        }
        self.is_connected() && edges == qi(n as i64 - 1)
    }

    /// Tree path from `a` to `b` (inclusive), if the graph is a tree.
    pub fn tree_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if !self.is_tree() {
            return None;
        }
        let n = self.len();
        let mut parent = vec![usize::MAX; n];
        let mut stack = vec![a];
        parent[a] = a;
        while let Some(i) = stack.pop() {
            for j in self.neighbors(i) {
                if parent[j] == usize::MAX {
                    parent[j] = i;
                    stack.push(j);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    fn fresh_name(&self) -> String {
        let mut k = self.len();
        loop {
            let name = format!("E{k}");
            if self.index_of(&name).is_none() {
                return name;
            }
            k += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub prime_ok: bool,
    pub symmetric: bool,
    pub integral: bool,
    pub offdiag_nonneg: bool,
    pub mult_positive_integers: bool,
    pub fiber_degree_zero: bool,
    pub neg_semidefinite: bool,
    pub kernel_is_span_mult: bool,
    pub connected: bool,
}

impl ValidationReport {
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("prime", self.prime_ok),
            ("symmetry", self.symmetric),
            ("integer entries", self.integral),
            ("off-diagonal nonnegative", self.offdiag_nonneg),
            ("multiplicities positive integers", self.mult_positive_integers),
            ("M·a = 0", self.fiber_degree_zero),
            ("negative semidefinite", self.neg_semidefinite),
            ("kernel = span(a)", self.kernel_is_span_mult),
            ("connected", self.connected),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.1)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks().into_iter().filter(|c| !c.1).map(|c| c.0).collect()
    }
}

pub fn validate_fiber(m: &FiberModel) -> ValidationReport {
    let n = m.len();
    let symmetric = m.ix.is_symmetric();
    let integral = (0..n).all(|i| (0..n).all(|j| is_integer(m.ix.get(i, j))));
    let offdiag_nonneg = (0..n).all(|i| (0..n).all(|j| i == j || !m.ix.get(i, j).is_negative()));
    let mult_positive_integers = m.mult.iter().all(|a| a.is_positive() && is_integer(a));
    let fiber_degree_zero = m.ix.mul_vec(&m.mult).iter().all(|x| x.is_zero());
    let (neg_semidefinite, kernel_is_span_mult) = match semidef_analyze(&m.ix) {
        Ok(r) => {
            let span = r.kernel_basis.len() == 1 && {
                let k = &r.kernel_basis[0];
                // k ∥ a
                let i = (0..n).find(|&i| !k[i].is_zero()).unwrap();
                let c = &m.mult[i] / &k[i];
                k.iter().zip(&m.mult).all(|(x, a)| &(x * &c) == a)
            };
            (r.neg_semidefinite, span)
        }
        Err(_) => (false, false),
    };
    ValidationReport {
        prime_ok: is_prime(m.prime),
        symmetric,
        integral,
        offdiag_nonneg,
        mult_positive_integers,
        fiber_degree_zero,
        neg_semidefinite,
        kernel_is_span_mult,
        connected: m.is_connected(),
    }
}

/// Blow-up of a smooth point of component j: a new component E with
/// E² = −1, E·C_j = 1, multiplicity a_j, and C_j² lowered by one.
pub fn blowup_point(m: &FiberModel, j: usize) -> Result<FiberModel> {
    if j >= m.len() {
        return Err(AdelicError::InvalidInput(format!("no component {j}")));
    }
    let n = m.len();
    let mut border = vec![Rational::zero(); n];
    border[j] = Rational::one();
    let mut ix = m.ix.extended(&border, qi(-1));
    ix.set(j, j, m.ix.get(j, j) - Rational::one());
    let mut names = m.names.clone();
    names.push(m.fresh_name());
    let mut mult = m.mult.clone();
    mult.push(m.mult[j].clone());
    FiberModel::new(m.prime, names, mult, ix)
}

/// Blow-up of a node C_i ∩ C_j: E has multiplicity a_i + a_j, meets both
/// once, and the strict transforms lose one from C_i², C_j² and C_i·C_j.
pub fn blowup_node(m: &FiberModel, i: usize, j: usize) -> Result<FiberModel> {
    if i == j || i >= m.len() || j >= m.len() || !m.ix.get(i, j).is_positive() {
        return Err(AdelicError::InvalidInput(format!("components {i} and {j} do not meet")));
    }
    let n = m.len();
    let mut border = vec![Rational::zero(); n];
    border[i] = Rational::one();
    border[j] = Rational::one();
    let mut ix = m.ix.extended(&border, qi(-1));
    ix.set(i, i, m.ix.get(i, i) - Rational::one());
    ix.set(j, j, m.ix.get(j, j) - Rational::one());
    let off = m.ix.get(i, j) - Rational::one();
    ix.set(i, j, off.clone());
    ix.set(j, i, off);
    let mut names = m.names.clone();
    names.push(m.fresh_name());
    let mut mult = m.mult.clone();
    mult.push(&m.mult[i] + &m.mult[j]);
    FiberModel::new(m.prime, names, mult, ix)
}

/// Σ c_i Γ_i on a fixed model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerticalDivisor {
    pub model: FiberModel,
    pub coeffs: QVector,
}

impl VerticalDivisor {
    pub fn new(model: FiberModel, coeffs: QVector) -> Result<Self> {
        if coeffs.len() != model.len() {
            return Err(AdelicError::ModelMismatch(format!(
                "{} coefficients for {} components",
                coeffs.len(),
                model.len()
            )));
        }
        Ok(VerticalDivisor { model, coeffs })
    }

    pub fn fiber(model: &FiberModel) -> Self {
        VerticalDivisor { model: model.clone(), coeffs: model.mult.clone() }
    }
}

fn same_model(a: &FiberModel, b: &FiberModel) -> Result<()> {
    if a != b {
        return Err(AdelicError::ModelMismatch("vertical divisors live on different models".into()));
    }
    Ok(())
}

/// c₁ᵀ M c₂
pub fn vertical_pairing(e1: &VerticalDivisor, e2: &VerticalDivisor) -> Result<Rational> {
    same_model(&e1.model, &e2.model)?;
    Ok(e1.model.ix.bilinear(&e1.coeffs, &e2.coeffs))
}

/// (H + E)·C_j = h_j + (M c)_j
pub fn degree_restriction(h: &[Rational], e: &VerticalDivisor, j: usize) -> Result<Rational> {
    if h.len() != e.model.len() || j >= e.model.len() {
        return Err(AdelicError::ModelMismatch("degree vector length differs from the model".into()));
    }
    let row = e.model.ix.row(j);
    Ok(&h[j] + dot(row, &e.coeffs))
}
