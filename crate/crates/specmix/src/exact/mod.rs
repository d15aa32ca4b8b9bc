//! Exact integer and rational linear algebra.
//!
//! This layer never touches floating point: determinants come from
//! fraction-free elimination, characteristic polynomials from the
//! Faddeev-LeVerrier recurrence, and eigenvalue sign counts from Sturm
//! chains with multiplicity recovered by repeated gcd deflation. It serves
//! as the oracle against which the floating-point side is judged, and as
//! the engine for the exact transition bounds.

mod matrix;
mod poly;

pub use matrix::{bareiss_det, char_poly_general, rank_of_rows, SymMatrixZ};
pub use poly::{
    count_roots_with_multiplicity, signed_root_counts, sturm_count, Bound, IntPolynomial,
    SturmChain,
};

use thiserror::Error;

use crate::numeric::Inertia;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("operation undefined for the identically zero polynomial")]
    ZeroPolynomial,
    #[error("exact arithmetic invariant violated: {0}")]
    InternalInconsistency(String),
}

/// Exact inertia of a symmetric integer matrix: eigenvalue sign counts with
/// multiplicity, read off the characteristic polynomial. The zero count is
/// the multiplicity of the root 0, which for a symmetric (hence
/// diagonalisable) matrix equals the kernel dimension.
pub fn exact_sign_counts(m: &SymMatrixZ) -> Result<Inertia, ExactError> {
    let p = m.char_poly_exact()?;
    let (neg, zero, pos) = signed_root_counts(&p)?;
    if neg + zero + pos != m.dim() {
        return Err(ExactError::InternalInconsistency(format!(
            "sign counts {neg}+{zero}+{pos} do not exhaust dimension {}",
            m.dim()
        )));
    }
    Ok(Inertia::new(neg, zero, pos))
}
