//! Assembly of the mixed operator: the diffusive Laplacian, the saddle
//! adjacency matrix, and their weighted sum.
//!
//! The weighted matrix is never stored. Sweeps evaluate thousands of weight
//! values against the same pair of integer matrices, so the decomposition
//! is the source of truth and each evaluation materialises one matrix.

use num_bigint::BigInt;
use thiserror::Error;

use crate::exact::SymMatrixZ;
use crate::graph::{EdgeClass, PartitionedGraph};
use crate::numeric::SymMatrixF;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("epsilon must be nonnegative and finite, got {eps}")]
    NegativeEpsilon { eps: f64 },
    #[error("invalid permutation: {reason}")]
    InvalidPermutation { reason: String },
}

/// The pair (L, A) of a partitioned graph: L from diffusive edges, A from
/// saddle edges. The weighted operator at eps is L + eps * A.
#[derive(Debug, Clone)]
pub struct MixedOperator {
    graph: PartitionedGraph,
    laplacian: SymMatrixZ,
    adjacency: SymMatrixZ,
    // float renderings cached once; evaluate() runs in hot sweep loops
    laplacian_f: SymMatrixF,
    adjacency_f: SymMatrixF,
}

/// Outcome of the trace identity: the trace of the evaluated operator,
/// the exact expectation 2#E_G, and whether they agree within tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCheck {
    pub trace: f64,
    pub expected: u64,
    pub ok: bool,
}

/// Build the operator pair from a validated graph.
pub fn build_operator(g: &PartitionedGraph) -> MixedOperator {
    MixedOperator::new(g.clone())
}

impl MixedOperator {
    pub fn new(graph: PartitionedGraph) -> Self {
        let n = graph.vertex_count();
        let mut laplacian = SymMatrixZ::zeros(n);
        let one = BigInt::from(1);
        let minus_one = BigInt::from(-1);
        for e in graph.edges_of(EdgeClass::Diffusive) {
            laplacian.add_sym(e.u, e.u, &one);
            laplacian.add_sym(e.v, e.v, &one);
            laplacian.add_sym(e.u, e.v, &minus_one);
        }
        let mut adjacency = SymMatrixZ::zeros(n);
        for e in graph.edges_of(EdgeClass::Saddle) {
            adjacency.set_sym(e.u, e.v, one.clone());
        }
        let laplacian_f = laplacian.to_float();
        let adjacency_f = adjacency.to_float();
        Self {
            graph,
            laplacian,
            adjacency,
            laplacian_f,
            adjacency_f,
        }
    }

    pub fn graph(&self) -> &PartitionedGraph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn laplacian(&self) -> &SymMatrixZ {
        &self.laplacian
    }

    pub fn adjacency(&self) -> &SymMatrixZ {
        &self.adjacency
    }

    pub fn laplacian_f(&self) -> &SymMatrixF {
        &self.laplacian_f
    }

    pub fn adjacency_f(&self) -> &SymMatrixF {
        &self.adjacency_f
    }

    /// L + eps * A as a floating matrix. The domain is eps >= 0; zero is
    /// the plain Laplacian limit.
    pub fn evaluate(&self, eps: f64) -> Result<SymMatrixF, OperatorError> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(OperatorError::NegativeEpsilon { eps });
        }
        Ok(self.laplacian_f.add_scaled(&self.adjacency_f, eps))
    }

    /// L + k * A in exact integer arithmetic.
    pub fn evaluate_int(&self, k: u64) -> SymMatrixZ {
        let n = self.dim();
        let k = BigInt::from(k);
        let mut m = self.laplacian.clone();
        for i in 0..n {
            for j in i..n {
                let a = self.adjacency.get(i, j);
                if !num_traits::Zero::is_zero(a) {
                    m.add_sym(i, j, &(a * &k));
                }
            }
        }
        m
    }

    /// The trace of the evaluated operator must equal twice the diffusive
    /// edge count, independent of eps: the adjacency part is traceless.
    pub fn trace_identity_check(&self, eps: f64) -> Result<TraceCheck, OperatorError> {
        let m = self.evaluate(eps)?;
        let expected = 2 * self.graph.edge_count(EdgeClass::Diffusive) as u64;
        let trace = m.trace();
        let ok = (trace - expected as f64).abs() <= 1e-9 * (1.0 + expected as f64);
        Ok(TraceCheck {
            trace,
            expected,
            ok,
        })
    }

    /// True iff the permutation (0-based image array) preserves both edge
    /// sets, which is equivalent to commuting with the operator at every
    /// weight. The entry identity is additionally spot-checked at two
    /// sample weights.
    pub fn is_symmetry(&self, perm: &[usize]) -> Result<bool, OperatorError> {
        let n = self.dim();
        if perm.len() != n {
            return Err(OperatorError::InvalidPermutation {
                reason: format!("length {} does not match dimension {n}", perm.len()),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(OperatorError::InvalidPermutation {
                    reason: "image is not a bijection".into(),
                });
            }
            seen[p] = true;
        }
        let preserves = self
            .graph
            .edges()
            .all(|e| self.graph.class_of(perm[e.u], perm[e.v]) == Some(e.class));
        for eps in [0.5, 2.0] {
            let m = self.evaluate(eps)?;
            let mut permuted_equal = true;
            'scan: for i in 0..n {
                for j in 0..n {
                    if m.get(perm[i], perm[j]) != m.get(i, j) {
                        permuted_equal = false;
                        break 'scan;
                    }
                }
            }
            debug_assert_eq!(permuted_equal, preserves);
            if permuted_equal != preserves {
                return Ok(false);
            }
        }
        Ok(preserves)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::connected_components;

    fn triangle() -> MixedOperator {
        build_operator(&PartitionedGraph::parse("n 3\ng 1 2\ng 2 3\nh 1 3").unwrap())
    }

    #[test]
    fn single_diffusive_edge_matrices() {
        let op = build_operator(&PartitionedGraph::parse("n 2\ng 1 2").unwrap());
        let expected = SymMatrixZ::from_rows_i64(&[&[1, -1], &[-1, 1]]);
        assert_eq!(op.laplacian(), &expected);
        assert_eq!(op.adjacency(), &SymMatrixZ::zeros(2));
    }

    #[test]
    fn triangle_matrices() {
        let op = triangle();
        assert_eq!(
            op.laplacian(),
            &SymMatrixZ::from_rows_i64(&[&[1, -1, 0], &[-1, 2, -1], &[0, -1, 1]])
        );
        assert_eq!(
            op.adjacency(),
            &SymMatrixZ::from_rows_i64(&[&[0, 0, 1], &[0, 0, 0], &[1, 0, 0]])
        );
    }

    #[test]
    fn all_saddle_clique() {
        let op = build_operator(&PartitionedGraph::parse("n 3\nh 1 2\nh 2 3\nh 1 3").unwrap());
        assert_eq!(op.laplacian(), &SymMatrixZ::zeros(3));
        assert_eq!(
            op.adjacency(),
            &SymMatrixZ::from_rows_i64(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]])
        );
    }

    #[test]
    fn evaluate_at_zero_is_the_laplacian() {
        let op = triangle();
        let m = op.evaluate(0.0).unwrap();
        assert_eq!(m, op.laplacian().to_float());
    }

    #[test]
    fn evaluate_triangle_at_one() {
        let m = triangle().evaluate(1.0).unwrap();
        let expected = SymMatrixF::from_rows(&[
            vec![1.0, -1.0, 1.0],
            vec![-1.0, 2.0, -1.0],
            vec![1.0, -1.0, 1.0],
        ]);
        assert_eq!(m, expected);
    }

    #[test]
    fn evaluate_rejects_negative_eps() {
        let err = triangle().evaluate(-0.25).unwrap_err();
        assert!(matches!(err, OperatorError::NegativeEpsilon { .. }));
        assert!(triangle().evaluate(f64::NAN).is_err());
    }

    #[test]
    fn integer_evaluation_matches_float() {
        let op = triangle();
        let exact = op.evaluate_int(1);
        assert_eq!(exact.to_float(), op.evaluate(1.0).unwrap());
        assert_eq!(
            exact,
            SymMatrixZ::from_rows_i64(&[&[1, -1, 1], &[-1, 2, -1], &[1, -1, 1]])
        );
    }

    #[test]
    fn trace_identity_examples() {
        for eps in [0.0, 0.5, 1.0, 7.25] {
            let check = triangle().trace_identity_check(eps).unwrap();
            assert_eq!(check.expected, 4);
            assert!(check.ok, "trace {} at eps {eps}", check.trace);
        }
        let k3 = build_operator(&PartitionedGraph::parse("n 3\nh 1 2\nh 2 3\nh 1 3").unwrap());
        let check = k3.trace_identity_check(3.0).unwrap();
        assert_eq!(check.expected, 0);
        assert!(check.ok);
        let single = build_operator(&PartitionedGraph::parse("n 2\ng 1 2").unwrap());
        assert_eq!(single.trace_identity_check(1.0).unwrap().expected, 2);
    }

    #[test]
    fn laplacian_row_sums_vanish_on_indicators() {
        // each diffusive component's indicator vector is annihilated exactly
        let g = PartitionedGraph::parse("n 6\ng 1 2\ng 2 3\ng 4 5\ng 5 6\nh 1 4\nh 3 6").unwrap();
        let op = build_operator(&g);
        let comp = connected_components(&g);
        for c in 0..comp.count() {
            let members = comp.members(c);
            for i in 0..g.vertex_count() {
                let mut sum = BigInt::from(0);
                for &j in &members {
                    sum += op.laplacian().get(i, j);
                }
                assert_eq!(sum, BigInt::from(0), "row {i} against component {c}");
            }
        }
    }

    #[test]
    fn symmetry_membership() {
        let op = triangle();
        assert!(op.is_symmetry(&[0, 1, 2]).unwrap());
        // reversing the path swaps 1 and 3, fixing the middle vertex
        assert!(op.is_symmetry(&[2, 1, 0]).unwrap());
        // swapping 1 and 2 sends the diffusive edge {2,3} to {1,3}
        assert!(!op.is_symmetry(&[1, 0, 2]).unwrap());
    }

    #[test]
    fn symmetry_rejects_malformed_permutations() {
        let op = triangle();
        assert!(matches!(
            op.is_symmetry(&[0, 1]),
            Err(OperatorError::InvalidPermutation { .. })
        ));
        assert!(matches!(
            op.is_symmetry(&[0, 0, 2]),
            Err(OperatorError::InvalidPermutation { .. })
        ));
        assert!(matches!(
            op.is_symmetry(&[0, 1, 3]),
            Err(OperatorError::InvalidPermutation { .. })
        ));
    }
}
