//! Dense rational matrices: symmetric LDLᵀ analysis, kernels and consistent
//! solves by exact row reduction.

use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use crate::error::{AdelicError, Result};

pub type QVector = Vec<Rational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(AdelicError::InvalidInput("ragged matrix rows".into()));
        }
        Ok(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect();
        Self::from_rows(v).expect("rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> QVector {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// xᵀ M y
    pub fn bilinear(&self, x: &[Rational], y: &[Rational]) -> Rational {
        dot(x, &self.mul_vec(y))
    }

    /// Principal submatrix on the index set `idx`.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let mut s = Self::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                s.set(a, b, self.get(i, j).clone());
            }
        }
        s
    }

    /// Bordered extension by one row and column (symmetric use).
    pub fn extended(&self, border: &[Rational], corner: Rational) -> Self {
        let n = self.rows;
        let mut m = Self::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.get(i, j).clone());
            }
            m.set(i, n, border[i].clone());
            m.set(n, i, border[i].clone());
        }
        m.set(n, n, corner);
        m
    }
}

pub fn dot(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn vadd(x: &[Rational], y: &[Rational]) -> QVector {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn vsub(x: &[Rational], y: &[Rational]) -> QVector {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn vscale(x: &[Rational], c: &Rational) -> QVector {
    x.iter().map(|a| a * c).collect()
}

pub fn vzero(n: usize) -> QVector {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> QVector {
    let mut v = vzero(n);
    v[i] = Rational::one();
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemidefReport {
    pub neg_semidefinite: bool,
    pub kernel_basis: Vec<QVector>,
    /// Diagonal of D in the pivoted LDLᵀ, in pivot order.
    pub pivots: Vec<Rational>,
}

/// Negative-semidefiniteness by exact LDLᵀ with symmetric pivoting, plus a
/// kernel basis from row reduction.
pub fn semidef_analyze(m: &QMatrix) -> Result<SemidefReport> {
    if !m.is_symmetric() {
        return Err(AdelicError::NonSymmetric);
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    let mut nsd = true;
    while !active.is_empty() {
        // largest |diagonal| among remaining indices
        let best = active
            .iter()
            .copied()
            .filter(|&i| !a.get(i, i).is_zero())
            .max_by(|&i, &j| a.get(i, i).abs().cmp(&a.get(j, j).abs()));
        let Some(k) = best else {
            // zero diagonal: any nonzero off-diagonal gives an indefinite 2×2 block
            if active.iter().any(|&i| active.iter().any(|&j| !a.get(i, j).is_zero())) {
                nsd = false;
            }
            break;
        };
        let d = a.get(k, k).clone();
        if d.is_positive() {
            nsd = false;
        }
        pivots.push(d.clone());
        active.retain(|&i| i != k);
        for &i in &active {
            let lik = a.get(i, k) / &d;
            if lik.is_zero() {
                continue;
            }
            for &j in &active {
                let v = a.get(i, j) - &lik * a.get(k, j);
                a.set(i, j, v);
            }
        }
        if !nsd {
            break;
        }
    }
    Ok(SemidefReport { neg_semidefinite: nsd, kernel_basis: kernel(m), pivots })
}

/// Reduced row echelon form; returns (matrix, pivot columns).
fn rref(m: &QMatrix) -> (QMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let Some(p) = (r..a.rows()).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols() {
                let t = a.get(r, j).clone();
                a.set(r, j, a.get(p, j).clone());
                a.set(p, j, t);
            }
        }
        let inv = Rational::one() / a.get(r, c);
        for j in 0..a.cols() {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..a.rows() {
            if i != r && !a.get(i, c).is_zero() {
                let f = a.get(i, c).clone();
                for j in 0..a.cols() {
                    let v = a.get(i, j) - &f * a.get(r, j);
                    a.set(i, j, v);
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    (a, piv)
}

pub fn rank(m: &QMatrix) -> usize {
    rref(m).1.len()
}

/// Basis of {x : Mx = 0}.
pub fn kernel(m: &QMatrix) -> Vec<QVector> {
    let (r, piv) = rref(m);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vzero(m.cols());
            x[f] = Rational::one();
            for (row, &pc) in piv.iter().enumerate() {
                x[pc] = -r.get(row, f).clone();
            }
            x
        })
        .collect()
}

/// Some x with Mx = t (free variables set to zero), or `NoSolution`.
pub fn solve_consistent(m: &QMatrix, t: &[Rational]) -> Result<QVector> {
    assert_eq!(t.len(), m.rows(), "dimension mismatch");
    let mut aug = QMatrix::zeros(m.rows(), m.cols() + 1);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, m.cols(), t[i].clone());
    }
    let (r, piv) = rref(&aug);
    if piv.contains(&m.cols()) {
        return Err(AdelicError::NoSolution);
    }
    let mut x = vzero(m.cols());
    for (row, &pc) in piv.iter().enumerate() {
        x[pc] = r.get(row, m.cols()).clone();
    }
    Ok(x)
}

/// Unique solution of a nonsingular square system, or `None`.
pub fn solve_unique(m: &QMatrix, t: &[Rational]) -> Option<QVector> {
    if rank(m) != m.rows() || !m.is_square() {
        return None;
    }
    solve_consistent(m, t).ok()
}
