//! The determinant of the weighted operator as an exact integer polynomial,
//! the mixed product expansion behind it, and the signature-transition
//! bounds.
//!
//! The determinant det(L + eps A) is a polynomial in eps of degree at most
//! n. Evaluating the exact integer determinant at the integer nodes
//! eps = 0..n and interpolating over the rationals recovers its
//! coefficients exactly; integrality of the result is asserted, not
//! assumed. Signature transitions can happen only at positive roots of
//! this polynomial, which Sturm bisection isolates to arbitrary width.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{exact_sign_counts, sturm_count, Bound, ExactError, IntPolynomial};
use crate::operator::MixedOperator;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetPolyError {
    #[error("determinant polynomial is identically zero (operator singular at every weight)")]
    ZeroPolynomial,
    #[error("interpolation produced a non-integer coefficient for power {power}")]
    NonIntegerCoefficient { power: usize },
    #[error("subset size {r} exceeds list length {n}")]
    BadR { r: usize, n: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Exact coefficients of det(L + eps A), constant term first.
///
/// Determinants are evaluated at the integer nodes eps = 0, 1, ..., n so
/// every evaluation stays in integer arithmetic; Lagrange interpolation
/// over the rationals then yields the unique degree-n candidate, whose
/// coefficients must come out integral.
pub fn det_polynomial(op: &MixedOperator) -> Result<IntPolynomial, DetPolyError> {
    let n = op.dim();
    let values: Vec<BigInt> = (0..=n as u64)
        .map(|k| op.evaluate_int(k).det_exact())
        .collect();
    let coeffs = lagrange_integer_coeffs(&values)?;
    let p = IntPolynomial::from_coeffs(coeffs);
    // det(L) = 0 for every Laplacian, so the constant term vanishes
    debug_assert!(p.coeff(0).is_zero());
    Ok(p)
}

/// Interpolate through (k, values[k]) for k = 0..values.len()-1 and demand
/// integer coefficients.
fn lagrange_integer_coeffs(values: &[BigInt]) -> Result<Vec<BigInt>, DetPolyError> {
    let m = values.len();
    let mut acc = vec![BigRational::zero(); m];
    for (k, y) in values.iter().enumerate() {
        if y.is_zero() {
            continue;
        }
        // numerator poly: product over j != k of (x - j)
        let mut num = vec![BigRational::one()];
        for j in 0..m {
            if j == k {
                continue;
            }
            num = mul_linear(&num, j as i64);
        }
        // denominator: product over j != k of (k - j) = (-1)^(m-1-k) k! (m-1-k)!
        let mut denom = BigInt::one();
        for j in 0..m {
            if j != k {
                denom *= BigInt::from(k as i64 - j as i64);
            }
        }
        let weight = BigRational::new(y.clone(), denom);
        for (a, c) in acc.iter_mut().zip(&num) {
            *a += &weight * c;
        }
    }
    acc.into_iter()
        .enumerate()
        .map(|(power, c)| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(DetPolyError::NonIntegerCoefficient { power })
            }
        })
        .collect()
}

/// Multiply a coefficient vector by (x - root).
fn mul_linear(p: &[BigRational], root: i64) -> Vec<BigRational> {
    let r = BigRational::from_integer(BigInt::from(root));
    let mut out = vec![BigRational::zero(); p.len() + 1];
    for (k, c) in p.iter().enumerate() {
        out[k + 1] += c;
        out[k] -= &r * c;
    }
    out
}

/// Visit every size-r subset of 0..n, passing membership as a bool slice.
fn for_each_subset<F: FnMut(&[bool])>(n: usize, r: usize, mut f: F) {
    let mut chosen = vec![false; n];
    fn recurse<F: FnMut(&[bool])>(
        chosen: &mut Vec<bool>,
        start: usize,
        remaining: usize,
        f: &mut F,
    ) {
        if remaining == 0 {
            f(chosen);
            return;
        }
        let n = chosen.len();
        // not enough positions left to place the remaining picks
        for i in start..=n - remaining {
            chosen[i] = true;
            recurse(chosen, i + 1, remaining - 1, f);
            chosen[i] = false;
        }
    }
    recurse(&mut chosen, 0, r, &mut f);
}

/// Number of terms the mixed expansion sums for given n and r, counted by
/// the same subset enumeration that computes the value.
pub fn c_factor_terms(n: usize, r: usize) -> Result<u64, DetPolyError> {
    if r > n {
        return Err(DetPolyError::BadR { r, n });
    }
    let mut count = 0u64;
    for_each_subset(n, r, |_| count += 1);
    Ok(count)
}

/// The mixed elementary term C_{n,r}: the sum over all size-r subsets S of
/// (product of y_i over S) times (product of x_i outside S). These are the
/// eps^r coefficients of the expanded product of (x_i + eps y_i).
pub fn c_factor(
    xs: &[BigRational],
    ys: &[BigRational],
    r: usize,
) -> Result<BigRational, DetPolyError> {
    assert_eq!(xs.len(), ys.len(), "value lists must have equal length");
    let n = xs.len();
    if r > n {
        return Err(DetPolyError::BadR { r, n });
    }
    let mut total = BigRational::zero();
    for_each_subset(n, r, |chosen| {
        let mut term = BigRational::one();
        for (i, &in_s) in chosen.iter().enumerate() {
            term *= if in_s { &ys[i] } else { &xs[i] };
            if term.is_zero() {
                return;
            }
        }
        total += term;
    });
    Ok(total)
}

/// Verify, exactly over the rationals, that the direct product of
/// (x_i + eps y_i) equals the subset expansion sum at each supplied eps.
/// The two sides are computed by independent routes: plain multiplication
/// against subset enumeration.
pub fn product_expansion_check(
    xs: &[BigRational],
    ys: &[BigRational],
    eps_values: &[BigRational],
) -> Result<bool, DetPolyError> {
    assert_eq!(xs.len(), ys.len(), "value lists must have equal length");
    let n = xs.len();
    for eps in eps_values {
        let mut direct = BigRational::one();
        for (x, y) in xs.iter().zip(ys) {
            direct *= x + eps * y;
        }
        let mut expanded = BigRational::zero();
        let mut eps_pow = BigRational::one();
        for r in 0..=n {
            expanded += &eps_pow * c_factor(xs, ys, r)?;
            eps_pow *= eps;
        }
        if direct != expanded {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which of the two transition bounds is the smaller one; they cross at
/// 2 dim ker = signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TighterBound {
    Kernel,
    Signature,
    Equal,
}

/// Upper bounds on the number of signature transitions over positive
/// weights, from the exact spectrum of the saddle adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionBounds {
    pub n: usize,
    pub dim_ker_adjacency: usize,
    pub signature_adjacency: i64,
    /// n - dim ker A: the degree bound on the determinant polynomial.
    pub bound_kernel: usize,
    /// n - s(A) + dim ker A: counts how far the signature can fall from
    /// its small-weight value to its large-weight limit.
    pub bound_signature: usize,
    pub combined: usize,
    pub tighter: TighterBound,
}

/// Compute both transition bounds exactly.
pub fn transition_bounds(op: &MixedOperator) -> Result<TransitionBounds, DetPolyError> {
    let n = op.dim();
    let a = op.adjacency();
    let dim_ker = n - a.rank_exact();
    let signature = exact_sign_counts(a)?.signature();
    let bound_kernel = n - dim_ker;
    let bound_signature_i = n as i64 - signature + dim_ker as i64;
    debug_assert!(bound_signature_i >= 0);
    let bound_signature = bound_signature_i as usize;
    let tighter = match (2 * dim_ker as i64).cmp(&signature) {
        std::cmp::Ordering::Greater => TighterBound::Kernel,
        std::cmp::Ordering::Less => TighterBound::Signature,
        std::cmp::Ordering::Equal => TighterBound::Equal,
    };
    Ok(TransitionBounds {
        n,
        dim_ker_adjacency: dim_ker,
        signature_adjacency: signature,
        bound_kernel,
        bound_signature,
        combined: bound_kernel.min(bound_signature),
        tighter,
    })
}

/// Isolating rational intervals (lo, hi], each of width at most 1e-6 and
/// containing exactly one distinct positive root of the determinant
/// polynomial. Multiplicities are not separated; a double root yields one
/// interval.
pub fn exact_transition_candidates(
    op: &MixedOperator,
) -> Result<Vec<(BigRational, BigRational)>, DetPolyError> {
    let p = det_polynomial(op)?;
    if p.is_zero() {
        return Err(DetPolyError::ZeroPolynomial);
    }
    let width_target = BigRational::new(BigInt::one(), BigInt::from(1_000_000));
    let zero = BigRational::zero();
    let hi = p.root_bound();
    let total = sturm_count(&p, &Bound::Finite(zero.clone()), &Bound::Finite(hi.clone()))?;
    let mut out = Vec::new();
    if total == 0 {
        return Ok(out);
    }
    // bisection queue of (lo, hi, root count); left endpoints are always
    // exclusive so a root landing on a split point stays in exactly one half
    let mut queue = vec![(zero, hi, total)];
    while let Some((lo, hi, count)) = queue.pop() {
        debug_assert!(count > 0);
        let width = &hi - &lo;
        if count == 1 && width <= width_target {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        let left = sturm_count(&p, &Bound::Finite(lo.clone()), &Bound::Finite(mid.clone()))?;
        let right = count - left;
        if left > 0 {
            queue.push((lo, mid.clone(), left));
        }
        if right > 0 {
            queue.push((mid, hi, right));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}
