//! Dense complex linear algebra for the small (2x2, 4x4, 8x8) Hermitian and
//! unitary matrices used throughout the crate.
//!
//! The eigensolver is a cyclic Jacobi iteration for complex Hermitian
//! matrices; at these dimensions it is unconditionally stable and converges
//! in a handful of sweeps. The matrix exponential of a Hermitian generator
//! goes through the eigendecomposition.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use thiserror::Error;

/// Complex scalar used everywhere: double-precision pair.
pub type C64 = Complex<f64>;

/// Convergence target for the Jacobi sweep, relative to the Frobenius norm.
const JACOBI_TOL: f64 = 1e-12;
/// Maximum number of Jacobi sweeps before giving up.
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max asymmetry {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
}

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, C64::new(d, 0.0));
        }
        m
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build from row-major data; length must be a perfect square times itself.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major data length mismatch");
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = Self::zeros(n);
        for i in 0..na {
            for j in 0..na {
                let aij = self.get(i, j);
                if aij.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..nb {
                    for l in 0..nb {
                        out.set(i * nb + k, j * nb + l, aij * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Conjugation U · self · U†.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermiticity, max |m_ij - conj(m_ji)|.
    pub fn hermitian_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..=i {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest entrywise |self_ij - other_ij|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from unitarity, max |(U†U - I)_ij|.
    pub fn unitarity_error(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, other: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(other)
    }
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in ascending
/// order and the unitary matrix whose columns are the eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Which tensor factor an operation acts on, for a bipartite space A ⊗ B.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Diagonalize a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input must be Hermitian within `1e-10` relative to its largest entry;
/// otherwise the call is rejected with the measured asymmetry. Eigenvalues
/// come back sorted ascending with the eigenvector columns permuted to match.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem, LinalgError> {
    let n = m.dim();
    let scale = m.max_abs().max(1.0);
    let asym = m.hermitian_error();
    if asym > 1e-10 * scale {
        return Err(LinalgError::NotHermitian {
            max_asymmetry: asym,
        });
    }

    // Symmetrize to kill rounding-level asymmetry before iterating.
    let mut a = ComplexMatrix::from_fn(n, |i, j| (m.get(i, j) + m.get(j, i).conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let fro = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += 2.0 * a.get(p, q).norm_sqr();
                }
            }
            s.sqrt()
        };
        if off <= JACOBI_TOL * fro {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                // Rotation angle zeroing the (p,q) element of J† A J with
                // J_pp = c, J_pq = -s·phase, J_qp = s·conj(phase), J_qq = c.
                let theta = 0.5 * (2.0 * r).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                let jpq = -phase * s;
                let jqp = phase.conj() * s;

                // A <- A J (columns p, q).
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c + akq * jqp);
                    a.set(k, q, akp * jpq + akq * c);
                }
                // A <- J† A (rows p, q).
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c + aqk * jqp.conj());
                    a.set(q, k, apk * jpq.conj() + aqk * c);
                }
                // V <- V J.
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c + vkq * jqp);
                    v.set(k, q, vkp * jpq + vkq * c);
                }
            }
        }
    }
    if !converged {
        // One more off-norm check: the final sweep may have converged.
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += 2.0 * a.get(p, q).norm_sqr();
            }
        }
        if s.sqrt() > JACOBI_TOL * fro {
            return Err(LinalgError::NoConvergence(JACOBI_MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v.get(i, order[j]));
    Ok(Eigensystem { values, vectors })
}

/// Unitary exp(-i·angle·G) for a Hermitian generator G, computed through the
/// eigendecomposition (exact at these dimensions).
pub fn unitary_from_generator(g: &ComplexMatrix, angle: f64) -> Result<ComplexMatrix, LinalgError> {
    let eig = hermitian_eigensystem(g)?;
    let n = g.dim();
    let phases: Vec<C64> = eig
        .values
        .iter()
        .map(|&lam| C64::from_polar(1.0, -angle * lam))
        .collect();
    // V · diag(phases) · V†
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for (k, phase) in phases.iter().enumerate() {
                s += eig.vectors.get(i, k) * phase * eig.vectors.get(j, k).conj();
            }
            out.set(i, j, s);
        }
    }
    Ok(out)
}

/// Partial transpose on one factor of a bipartite dim_a·dim_b space.
///
/// Preserves the trace exactly and Hermiticity to machine precision; applying
/// it twice on the same side is the identity.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    dims: (usize, usize),
    side: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    let (da, db) = dims;
    if rho.dim() != da * db {
        return Err(LinalgError::DimensionMismatch {
            expected: da * db,
            got: rho.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(rho.dim());
    for ia in 0..da {
        for ja in 0..da {
            for ib in 0..db {
                for jb in 0..db {
                    let (src_r, src_c) = match side {
                        Subsystem::First => (ja * db + ib, ia * db + jb),
                        Subsystem::Second => (ia * db + jb, ja * db + ib),
                    };
                    out.set(ia * db + ib, ja * db + jb, rho.get(src_r, src_c));
                }
            }
        }
    }
    Ok(out)
}
