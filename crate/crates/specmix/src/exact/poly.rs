//! Integer polynomials with exact root counting.
//!
//! Coefficients are arbitrary-precision integers stored ascending by power.
//! Real roots are counted through Sturm chains built with a primitive
//! pseudo-remainder sequence, which keeps coefficient growth polynomial
//! instead of exponential. Counts are over half-open intervals `(a, b]`,
//! so the cumulative count of roots up to `x` is right-continuous and two
//! adjacent intervals never double-count a shared endpoint.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ExactError;

/// Polynomial with integer coefficients; `coeffs[k]` multiplies the k-th
/// power. The zero polynomial is the empty coefficient list; otherwise the
/// last coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

/// Interval endpoint for root counting.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl Bound {
    fn strictly_below(&self, other: &Bound) -> bool {
        match (self, other) {
            (Bound::NegInf, Bound::NegInf) | (Bound::PosInf, Bound::PosInf) => false,
            (Bound::NegInf, _) | (_, Bound::PosInf) => true,
            (Bound::Finite(a), Bound::Finite(b)) => a < b,
            _ => false,
        }
    }
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// Build from ascending coefficients, trimming leading zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Sign of the value at `num/den` without building rationals: evaluates
    /// the homogenised form sum c_k num^k den^(deg-k). Requires den > 0.
    fn sign_at(&self, num: &BigInt, den: &BigInt) -> Ordering {
        debug_assert!(den.is_positive());
        let deg = match self.degree() {
            None => return Ordering::Equal,
            Some(d) => d,
        };
        // Horner on the homogenised form: acc ends as sum c_k num^k den^(deg-k),
        // which has the sign of p(num/den) since den > 0.
        let mut acc = self.coeffs[deg].clone();
        let mut den_pow = BigInt::one();
        for k in (0..deg).rev() {
            den_pow *= den;
            acc = acc * num + &self.coeffs[k] * &den_pow;
        }
        acc.cmp(&BigInt::zero())
    }

    pub fn derivative(&self) -> IntPolynomial {
        if self.coeffs.len() <= 1 {
            return IntPolynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect();
        IntPolynomial::from_coeffs(coeffs)
    }

    pub fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) + other.coeff(k)).collect();
        IntPolynomial::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) - other.coeff(k)).collect();
        IntPolynomial::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial::from_coeffs(coeffs)
    }

    pub fn mul_scalar(&self, s: &BigInt) -> IntPolynomial {
        IntPolynomial::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> IntPolynomial {
        IntPolynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    /// Positive gcd of the coefficients; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide out the (positive) content, keeping coefficient signs.
    pub fn primitive_signed(&self) -> IntPolynomial {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntPolynomial::from_coeffs(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Exact quotient self / d. Panics if d does not divide self in Z[x];
    /// callers use this only where divisibility is a mathematical invariant
    /// (gcd deflation).
    pub fn div_exact(&self, d: &IntPolynomial) -> IntPolynomial {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        let dd = d.degree().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() >= dd + 1 && rem.iter().any(|c| !c.is_zero()) {
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
            if rem.len() < dd + 1 {
                break;
            }
            let shift = rem.len() - 1 - dd;
            let (q, r) = rem.last().unwrap().div_rem(d.leading().unwrap());
            assert!(r.is_zero(), "inexact polynomial division");
            for k in 0..=dd {
                let delta = &q * &d.coeffs[k];
                rem[shift + k] -= delta;
            }
            debug_assert!(rem.last().unwrap().is_zero());
            quot[shift] = q;
        }
        assert!(
            rem.iter().all(|c| c.is_zero()),
            "inexact polynomial division: nonzero remainder"
        );
        IntPolynomial::from_coeffs(quot)
    }

    /// Pseudo-remainder: returns (r, k) with r = lc(d)^k * (self mod d),
    /// computed entirely over the integers. k is the number of elimination
    /// steps actually taken, so the sign of lc(d)^k is recoverable.
    fn pseudo_rem_steps(&self, d: &IntPolynomial) -> (IntPolynomial, u32) {
        let dd = d.degree().expect("pseudo-remainder by zero polynomial");
        let lc = d.leading().unwrap().clone();
        let mut r = self.clone();
        let mut steps = 0u32;
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            let r_lead = r.leading().unwrap().clone();
            let mut coeffs = vec![BigInt::zero(); rd + 1];
            for (k, c) in r.coeffs.iter().enumerate() {
                coeffs[k] = c * &lc;
            }
            for k in 0..=dd {
                coeffs[shift + k] -= &r_lead * &d.coeffs[k];
            }
            debug_assert!(coeffs[rd].is_zero());
            r = IntPolynomial::from_coeffs(coeffs);
            steps += 1;
        }
        (r, steps)
    }

    /// Greatest common divisor via the primitive pseudo-remainder sequence;
    /// result is primitive with positive leading coefficient.
    pub fn primitive_gcd(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
        if a.is_zero() {
            return b.primitive_signed().leading_positive();
        }
        if b.is_zero() {
            return a.primitive_signed().leading_positive();
        }
        let (mut f, mut g) = if a.degree() >= b.degree() {
            (a.primitive_signed(), b.primitive_signed())
        } else {
            (b.primitive_signed(), a.primitive_signed())
        };
        loop {
            let (r, _) = f.pseudo_rem_steps(&g);
            if r.is_zero() {
                return g.leading_positive();
            }
            f = g;
            g = r.primitive_signed();
        }
    }

    fn leading_positive(&self) -> IntPolynomial {
        match self.leading() {
            Some(lc) if lc.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    /// Largest square-free divisor: self / gcd(self, self').
    pub fn square_free_part(&self) -> IntPolynomial {
        if self.is_zero() || self.degree() == Some(0) {
            return self.primitive_signed();
        }
        let g = IntPolynomial::primitive_gcd(self, &self.derivative());
        self.primitive_signed().div_exact(&g).primitive_signed()
    }

    /// Number of trailing zero coefficients, i.e. the multiplicity of the
    /// root 0.
    pub fn zero_root_multiplicity(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Strictly dominating bound on the absolute value of every root:
    /// 1 + max |c_k| / |lead|.
    pub fn root_bound(&self) -> BigRational {
        let lead = self
            .leading()
            .expect("root bound of the zero polynomial")
            .abs();
        let max_abs = self
            .coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        BigRational::one() + BigRational::new(max_abs, lead)
    }
}

/// Sturm chain of a square-free polynomial. Sign variations are counted
/// with zeros dropped, which makes the variation count right-continuous,
/// so V(a) - V(b) is the number of distinct roots in (a, b].
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<IntPolynomial>,
}

impl SturmChain {
    /// Builds the chain for the square-free part of `p`. Each element is
    /// rescaled only by positive factors (primitive parts), preserving the
    /// Sturm sign structure.
    pub fn new(p: &IntPolynomial) -> Result<Self, ExactError> {
        if p.is_zero() {
            return Err(ExactError::ZeroPolynomial);
        }
        let sf = p.square_free_part();
        let mut chain = vec![sf.clone()];
        let d = sf.derivative();
        if !d.is_zero() {
            chain.push(d.primitive_signed());
            loop {
                let f = &chain[chain.len() - 2];
                let g = &chain[chain.len() - 1];
                if g.degree().is_none() {
                    break;
                }
                let (r, steps) = f.pseudo_rem_steps(g);
                if r.is_zero() {
                    break;
                }
                // r = lc(g)^steps * rem(f, g); the Sturm step needs -rem up
                // to a positive factor, so flip once more when lc(g)^steps
                // is negative.
                let lc_neg = g.leading().unwrap().is_negative();
                let flip_is_neg = lc_neg && steps % 2 == 1;
                let next = if flip_is_neg { r } else { r.neg() };
                chain.push(next.primitive_signed());
            }
        }
        Ok(Self { chain })
    }

    fn variations<F: Fn(&IntPolynomial) -> Ordering>(&self, sign_of: F) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.chain {
            let s = sign_of(p);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &Bound) -> usize {
        match x {
            Bound::Finite(q) => {
                let num = q.numer().clone();
                let den = q.denom().clone();
                self.variations(|p| p.sign_at(&num, &den))
            }
            Bound::PosInf => self.variations(|p| match p.leading() {
                None => Ordering::Equal,
                Some(lc) => lc.cmp(&BigInt::zero()),
            }),
            Bound::NegInf => self.variations(|p| match p.leading() {
                None => Ordering::Equal,
                Some(lc) => {
                    let s = lc.cmp(&BigInt::zero());
                    if p.degree().unwrap() % 2 == 1 {
                        s.reverse()
                    } else {
                        s
                    }
                }
            }),
        }
    }
}

/// Number of distinct real roots of `p` in the half-open interval (a, b].
pub fn sturm_count(p: &IntPolynomial, a: &Bound, b: &Bound) -> Result<usize, ExactError> {
    assert!(a.strictly_below(b), "sturm_count needs a < b");
    let chain = SturmChain::new(p)?;
    let va = chain.variations_at(a);
    let vb = chain.variations_at(b);
    Ok(va.saturating_sub(vb))
}

/// Number of real roots in (a, b] counted WITH multiplicity: a root of
/// multiplicity m is a distinct root of each of the first m repeated-gcd
/// deflations d_0 = p, d_{k+1} = gcd(d_k, d_k').
pub fn count_roots_with_multiplicity(
    p: &IntPolynomial,
    a: &Bound,
    b: &Bound,
) -> Result<usize, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let mut total = 0usize;
    let mut d = p.primitive_signed();
    while d.degree().map(|deg| deg >= 1).unwrap_or(false) {
        total += sturm_count(&d, a, b)?;
        d = IntPolynomial::primitive_gcd(&d, &d.derivative());
    }
    Ok(total)
}

/// Multiplicity-aware counts of (negative, zero, positive) real roots.
/// Complex roots are not counted; for characteristic polynomials of
/// symmetric matrices the three counts sum to the degree.
pub fn signed_root_counts(p: &IntPolynomial) -> Result<(usize, usize, usize), ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let zeros = p.zero_root_multiplicity();
    let q = IntPolynomial::from_coeffs(p.coeffs()[zeros..].to_vec());
    if q.degree() == Some(0) {
        return Ok((0, zeros, 0));
    }
    let bound = q.root_bound();
    let zero = Bound::Finite(BigRational::zero());
    let lo = Bound::Finite(-bound.clone());
    let hi = Bound::Finite(bound);
    // q(0) != 0, so (-B, 0] holds exactly the negative roots
    let neg = count_roots_with_multiplicity(&q, &lo, &zero)?;
    let pos = count_roots_with_multiplicity(&q, &zero, &hi)?;
    Ok((neg, zeros, pos))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Bound {
        Bound::Finite(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn construction_trims_leading_zeros() {
        let p = IntPolynomial::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(IntPolynomial::from_i64(&[0, 0]).is_zero());
        assert_eq!(IntPolynomial::zero().degree(), None);
    }

    #[test]
    fn evaluation_matches_horner_by_hand() {
        // 2e - 2e^2 at e = 3 is -12
        let p = IntPolynomial::from_i64(&[0, 2, -2]);
        assert_eq!(p.eval_int(&BigInt::from(3)), BigInt::from(-12));
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(
            p.eval_rat(&half),
            BigRational::new(BigInt::from(1), BigInt::from(2))
        );
    }

    #[test]
    fn derivative_and_arith() {
        let p = IntPolynomial::from_i64(&[0, 3, -4, 1]); // x^3 - 4x^2 + 3x
        assert_eq!(p.derivative(), IntPolynomial::from_i64(&[3, -8, 3]));
        let q = IntPolynomial::from_i64(&[1, 1]);
        assert_eq!(
            q.mul(&q),
            IntPolynomial::from_i64(&[1, 2, 1]),
            "(x+1)^2 = x^2+2x+1"
        );
        assert_eq!(p.sub(&p), IntPolynomial::zero());
    }

    #[test]
    fn content_and_primitive() {
        let p = IntPolynomial::from_i64(&[-6, 9, -3]);
        assert_eq!(p.content(), BigInt::from(3));
        assert_eq!(p.primitive_signed(), IntPolynomial::from_i64(&[-2, 3, -1]));
    }

    #[test]
    fn exact_division_round_trips() {
        let a = IntPolynomial::from_i64(&[1, 2, 1]); // (x+1)^2
        let b = IntPolynomial::from_i64(&[1, 1]);
        assert_eq!(a.div_exact(&b), b);
        let p = IntPolynomial::from_i64(&[0, 3, -4, 1]);
        let lin = IntPolynomial::from_i64(&[0, 1]);
        assert_eq!(p.div_exact(&lin), IntPolynomial::from_i64(&[3, -4, 1]));
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (x-1)(x+2) and (x-1)(x-3) share x-1
        let a = IntPolynomial::from_i64(&[-2, 1, 1]);
        let b = IntPolynomial::from_i64(&[3, -4, 1]);
        assert_eq!(
            IntPolynomial::primitive_gcd(&a, &b),
            IntPolynomial::from_i64(&[-1, 1])
        );
        // coprime pair gives a constant
        let c = IntPolynomial::from_i64(&[1, 1]);
        let d = IntPolynomial::from_i64(&[2, 1]);
        assert_eq!(IntPolynomial::primitive_gcd(&c, &d).degree(), Some(0));
    }

    #[test]
    fn square_free_part_strips_multiplicity() {
        // x^2 (x-1)^3
        let p = IntPolynomial::from_i64(&[0, 0, -1, 3, -3, 1]);
        let sf = p.square_free_part();
        // x(x-1) = x^2 - x up to sign normalisation
        assert_eq!(sf, IntPolynomial::from_i64(&[0, -1, 1]));
        assert_eq!(p.zero_root_multiplicity(), 2);
    }

    #[test]
    fn sturm_counts_match_known_roots() {
        // roots -1, 1
        let p = IntPolynomial::from_i64(&[-1, 0, 1]);
        assert_eq!(sturm_count(&p, &rat(0, 1), &Bound::PosInf).unwrap(), 1);
        assert_eq!(sturm_count(&p, &Bound::NegInf, &Bound::PosInf).unwrap(), 2);
        // half-open semantics: right endpoint included, left excluded
        assert_eq!(sturm_count(&p, &rat(-1, 1), &rat(1, 1)).unwrap(), 1);
        assert_eq!(sturm_count(&p, &rat(-2, 1), &rat(-1, 1)).unwrap(), 1);
        assert_eq!(sturm_count(&p, &rat(1, 1), &rat(2, 1)).unwrap(), 0);
    }

    #[test]
    fn sturm_on_mixed_operator_determinants() {
        // det of the path-plus-chord operator: 2e - 2e^2, positive root at 1
        let p = IntPolynomial::from_i64(&[0, 2, -2]);
        assert_eq!(sturm_count(&p, &rat(0, 1), &Bound::PosInf).unwrap(), 1);
        // char poly at e=1: x^3 - 4x^2 + 2x with roots 0, 2 +/- sqrt(2)
        let q = IntPolynomial::from_i64(&[0, 2, -4, 1]);
        assert_eq!(sturm_count(&q, &rat(0, 1), &Bound::PosInf).unwrap(), 2);
        assert_eq!(sturm_count(&q, &Bound::NegInf, &Bound::PosInf).unwrap(), 3);
    }

    #[test]
    fn sturm_rejects_zero_polynomial() {
        let err = sturm_count(&IntPolynomial::zero(), &rat(0, 1), &Bound::PosInf).unwrap_err();
        assert!(matches!(err, ExactError::ZeroPolynomial));
    }

    #[test]
    fn multiplicity_counting() {
        // x^2 (x-1)^3: two roots at 0, three at 1
        let p = IntPolynomial::from_i64(&[0, 0, -1, 3, -3, 1]);
        assert_eq!(
            count_roots_with_multiplicity(&p, &rat(-1, 1), &rat(2, 1)).unwrap(),
            5
        );
        assert_eq!(
            count_roots_with_multiplicity(&p, &rat(1, 2), &rat(1, 1)).unwrap(),
            3
        );
        let (neg, zero, pos) = signed_root_counts(&p).unwrap();
        assert_eq!((neg, zero, pos), (0, 2, 3));
    }

    #[test]
    fn signed_counts_examples() {
        // x^2 - 1
        assert_eq!(
            signed_root_counts(&IntPolynomial::from_i64(&[-1, 0, 1])).unwrap(),
            (1, 0, 1)
        );
        // x^3 - 4x^2 + 3x: roots 0, 1, 3
        assert_eq!(
            signed_root_counts(&IntPolynomial::from_i64(&[0, 3, -4, 1])).unwrap(),
            (0, 1, 2)
        );
        // constant 5: no roots
        assert_eq!(
            signed_root_counts(&IntPolynomial::from_i64(&[5])).unwrap(),
            (0, 0, 0)
        );
    }

    #[test]
    fn root_bound_dominates() {
        let p = IntPolynomial::from_i64(&[-6, 1, 1]); // roots 2, -3
        let b = p.root_bound();
        assert!(b > BigRational::from_integer(BigInt::from(3)));
    }

    #[test]
    fn big_coefficients_stay_exact() {
        // (x - 10^12)(x + 10^12) = x^2 - 10^24
        let big = BigInt::from(10u64.pow(12)) * BigInt::from(10u64.pow(12));
        let p = IntPolynomial::from_coeffs(vec![-big, BigInt::zero(), BigInt::one()]);
        assert_eq!(
            sturm_count(&p, &Bound::NegInf, &Bound::PosInf).unwrap(),
            2
        );
        assert_eq!(signed_root_counts(&p).unwrap(), (1, 0, 1));
    }
}
