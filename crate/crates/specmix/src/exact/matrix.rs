//! Exact integer matrices: fraction-free determinants, rational rank, and
//! all-integer characteristic polynomials.
//!
//! Everything here runs on arbitrary-precision integers. Laplacian minors
//! grow combinatorially with the vertex count, so fixed-width arithmetic
//! would silently corrupt the bounds this layer feeds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::IntPolynomial;
use super::ExactError;
use crate::numeric::SymMatrixF;

/// Dense symmetric integer matrix, stored row-major and full. Writes go
/// through [`SymMatrixZ::set_sym`], which mirrors the entry, so symmetry is
/// exact by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymMatrixZ {
    n: usize,
    a: Vec<BigInt>,
}

impl SymMatrixZ {
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        Self {
            n,
            a: vec![BigInt::zero(); n * n],
        }
    }

    /// Build from explicit rows; panics unless the rows form a symmetric
    /// square matrix.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        assert!(n > 0 && rows.iter().all(|r| r.len() == n), "square input");
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!(rows[j][i] == *v, "input rows are not symmetric");
                m.a[i * n + j] = v.clone();
            }
        }
        m
    }

    pub fn from_rows_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.a[i * self.n + j]
    }

    /// Set entry (i, j) and its mirror (j, i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: BigInt) {
        self.a[i * self.n + j] = v.clone();
        self.a[j * self.n + i] = v;
    }

    /// Add `delta` to entry (i, j) and, off the diagonal, to its mirror.
    pub fn add_sym(&mut self, i: usize, j: usize, delta: &BigInt) {
        self.a[i * self.n + j] += delta;
        if i != j {
            self.a[j * self.n + i] += delta;
        }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.n)
            .map(|i| self.a[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Render to floating point. Entries in this project are small graph
    /// integers, far below the exact-f64 limit, which the conversion
    /// asserts.
    pub fn to_float(&self) -> SymMatrixF {
        use num_traits::ToPrimitive;
        let mut m = SymMatrixF::zeros(self.n);
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.get(i, j);
                assert!(
                    v.abs() <= BigInt::from(1i64 << 53),
                    "entry too large for exact float conversion"
                );
                m.set_sym(i, j, v.to_f64().expect("in-range integer"));
            }
        }
        m
    }

    /// Exact determinant by Bareiss fraction-free elimination. Row swaps
    /// track the sign; every interior division is exact.
    pub fn det_exact(&self) -> BigInt {
        bareiss_det(self.rows())
    }

    /// Exact rank over the rationals by Gaussian elimination.
    pub fn rank_exact(&self) -> usize {
        rank_of_rows(&self.rows())
    }

    /// Exact characteristic polynomial det(lambda I - m).
    pub fn char_poly_exact(&self) -> Result<IntPolynomial, ExactError> {
        char_poly_general(&self.rows())
    }
}

/// Determinant of an arbitrary square integer matrix (consumed as rows).
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    debug_assert!(m.iter().all(|r| r.len() == n));
    if n == 1 {
        return m[0][0].clone();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Rank of an arbitrary integer matrix over the rationals.
pub fn rank_of_rows(rows: &[Vec<BigInt>]) -> usize {
    let nrows = rows.len();
    let ncols = if nrows == 0 { 0 } else { rows[0].len() };
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| BigRational::from_integer(v.clone()))
                .collect()
        })
        .collect();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pivot) = (rank..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].clone();
        for i in rank + 1..nrows {
            if m[i][col].is_zero() {
                continue;
            }
            let factor = &m[i][col] / &inv;
            for j in col..ncols {
                let delta = &factor * &m[rank][j];
                m[i][j] -= delta;
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Characteristic polynomial det(lambda I - m) of a general square integer
/// matrix via the Faddeev-LeVerrier recurrence. All intermediates are
/// integers; each trace division must be exact, and a failure surfaces as
/// [`ExactError::InternalInconsistency`] instead of a silently wrong
/// coefficient.
pub fn char_poly_general(rows: &[Vec<BigInt>]) -> Result<IntPolynomial, ExactError> {
    let n = rows.len();
    assert!(n > 0 && rows.iter().all(|r| r.len() == n), "square input");
    // coeffs[n - k] multiplies lambda^(n-k); c_0 = 1
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    // m_k = a * m_{k-1} + c_{k-1} I, starting from m_1 = I
    let mut m: Vec<Vec<BigInt>> = identity(n);
    let mut c_prev = BigInt::zero();
    for k in 1..=n {
        if k > 1 {
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += &c_prev;
            }
        }
        let am = mat_mul(rows, &m);
        let tr: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        let (c_k, rem) = (-tr).div_rem(&BigInt::from(k));
        if !rem.is_zero() {
            return Err(ExactError::InternalInconsistency(format!(
                "characteristic polynomial trace not divisible by {k}"
            )));
        }
        coeffs[n - k] = c_k.clone();
        c_prev = c_k;
        m = am;
    }
    Ok(IntPolynomial::from_coeffs(coeffs))
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * &b[k][j];
            }
        }
    }
    out
}
