//! Dense symmetric floating-point eigensolver and inertia extraction.
//!
//! The solver is cyclic Jacobi with threshold pivoting: simple, robust, and
//! entirely adequate for the matrix sizes this project sweeps (n well under
//! two hundred). Zero classification is policy, not arithmetic, so it goes
//! through an explicit [`ZeroTolerance`] everywhere.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAX_SWEEPS: usize = 100;

/// Relative off-diagonal Frobenius target for convergence.
const CONVERGENCE_FACTOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("Jacobi eigensolver failed to converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// Dense real symmetric matrix. Writes go through [`SymMatrixF::set_sym`],
/// which mirrors the entry, so stored symmetry is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrixF {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrixF {
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        Self {
            n,
            a: vec![0.0; n * n],
        }
    }

    /// Build from explicit rows; panics unless the rows form a square
    /// matrix that is symmetric exactly as stored.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(n > 0 && rows.iter().all(|r| r.len() == n), "square input");
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!(
                    rows[j][i].to_bits() == v.to_bits(),
                    "input rows are not symmetric"
                );
                m.a[i * n + j] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Set entry (i, j) and its mirror (j, i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute row sum; a cheap Gershgorin upper bound on the
    /// spectral radius.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// self + eps * other, entrywise.
    pub fn add_scaled(&self, other: &SymMatrixF, eps: f64) -> SymMatrixF {
        assert_eq!(self.n, other.n, "dimension mismatch");
        SymMatrixF {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x + eps * y)
                .collect(),
        }
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        for i in 0..self.n {
            let row = &self.a[i * self.n..(i + 1) * self.n];
            out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Quadratic form x' m x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        let mut total = 0.0;
        for i in 0..self.n {
            let row = &self.a[i * self.n..(i + 1) * self.n];
            let rx: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            total += x[i] * rx;
        }
        total
    }
}

/// Eigenvalue sign counts (N_-, N_0, N_+) with multiplicity, plus the
/// signature N_+ - N_-.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
    pub signature: i64,
}

impl Inertia {
    pub fn new(n_neg: usize, n_zero: usize, n_pos: usize) -> Self {
        Self {
            n_neg,
            n_zero,
            n_pos,
            signature: n_pos as i64 - n_neg as i64,
        }
    }

    pub fn dim(&self) -> usize {
        self.n_neg + self.n_zero + self.n_pos
    }

    pub fn signature(&self) -> i64 {
        self.signature
    }

    pub fn as_triple(&self) -> (usize, usize, usize) {
        (self.n_neg, self.n_zero, self.n_pos)
    }
}

/// Threshold below which an eigenvalue magnitude counts as zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroTolerance {
    pub tau: f64,
}

impl ZeroTolerance {
    pub fn new(tau: f64) -> Self {
        assert!(tau >= 0.0 && tau.is_finite(), "tolerance must be >= 0");
        Self { tau }
    }

    /// The default policy: 1e-9 scaled to the matrix magnitude.
    pub fn scaled_to(m: &SymMatrixF) -> Self {
        Self {
            tau: 1e-9 * m.frobenius_norm().max(1.0),
        }
    }
}

/// Eigenvalues in ascending order with matching eigenvectors;
/// `vectors[i]` belongs to `values[i]` and the set is orthonormal.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// All eigenvalues in ascending order.
pub fn sym_eigenvalues(m: &SymMatrixF) -> Result<Vec<f64>, NumericError> {
    let (values, _) = jacobi(m, false)?;
    Ok(values)
}

/// Eigenvalues and orthonormal eigenvectors, ascending.
pub fn sym_eigen(m: &SymMatrixF) -> Result<SymEigen, NumericError> {
    let (values, vectors) = jacobi(m, true)?;
    Ok(SymEigen {
        values,
        vectors: vectors.expect("vectors requested"),
    })
}

/// Counts eigenvalues below -tau, within [-tau, tau], and above tau.
pub fn inertia_of(m: &SymMatrixF, tol: ZeroTolerance) -> Result<Inertia, NumericError> {
    let eigs = sym_eigenvalues(m)?;
    let mut neg = 0;
    let mut zero = 0;
    let mut pos = 0;
    for ev in eigs {
        if ev < -tol.tau {
            neg += 1;
        } else if ev > tol.tau {
            pos += 1;
        } else {
            zero += 1;
        }
    }
    Ok(Inertia::new(neg, zero, pos))
}

/// Largest sorted-eigenvalue displacement between `a` and `a + eps b`.
/// By Weyl's inequality this never exceeds eps times the spectral norm of
/// `b`, which callers usually bound by the Frobenius norm.
pub fn weyl_gap_check(a: &SymMatrixF, b: &SymMatrixF, eps: f64) -> Result<f64, NumericError> {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch");
    let base = sym_eigenvalues(a)?;
    let shifted = sym_eigenvalues(&a.add_scaled(b, eps))?;
    Ok(base
        .iter()
        .zip(&shifted)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Cyclic Jacobi with threshold pivoting, following the classic recipe:
/// early sweeps rotate only above a shrinking threshold, later sweeps zero
/// out entries that are negligible relative to the paired diagonal values.
/// Diagonal updates are accumulated separately and folded back once per
/// sweep to limit rounding drift.
fn jacobi(
    m: &SymMatrixF,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<Vec<f64>>>), NumericError> {
    let n = m.n;
    let target = CONVERGENCE_FACTOR * (1.0 + m.frobenius_norm());
    let mut a = m.a.clone();
    let mut v = if want_vectors {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        Some(id)
    } else {
        None
    };
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    if n == 1 {
        return Ok(finish(d, v, n));
    }

    for sweep in 1..=MAX_SWEEPS + 1 {
        let mut off2 = 0.0;
        let mut sm = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                off2 += 2.0 * apq * apq;
                sm += apq.abs();
            }
        }
        if off2.sqrt() <= target {
            return Ok(finish(d, v, n));
        }
        if sweep > MAX_SWEEPS {
            break;
        }
        let tresh = if sweep < 4 {
            0.2 * sm / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                // past the early sweeps, entries that no longer move the
                // paired diagonals are flushed to zero outright
                if sweep > 4 && is_negligible(d[p], g) && is_negligible(d[q], g) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= tresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if is_negligible(h, g) {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        t = -t;
                    }
                    t
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = akp - s * (akq + tau * akp);
                    let new_kq = akq + s * (akp - tau * akq);
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp - s * (vkq + tau * vkp);
                        v[k * n + q] = vkq + s * (vkp - tau * vkq);
                    }
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    Err(NumericError::NoConvergence { sweeps: MAX_SWEEPS })
}

/// True when adding `g` to `x` is a no-op at f64 precision; written with an
/// intentional exact float comparison.
fn is_negligible(x: f64, g: f64) -> bool {
    let ax = x.abs();
    ax + g == ax
}

fn finish(d: Vec<f64>, v: Option<Vec<f64>>, n: usize) -> (Vec<f64>, Option<Vec<Vec<f64>>>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = v.map(|v| {
        order
            .iter()
            .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
            .collect()
    });
    (values, vectors)
}
