//! First-order perturbation of the repeated zero eigenvalues.
//!
//! At weight zero the operator has one zero eigenvalue per diffusive
//! component. Switching the saddle edges on splits them; the slopes are the
//! eigenvalues of an r x r matrix of scaled saddle-edge counts. This module
//! builds that matrix, classifies its spectrum both numerically and in
//! exact arithmetic, and packages the small-weight stability verdict.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{char_poly_general, signed_root_counts, ExactError};
use crate::graph::{
    connected_components, h_edge_counts, is_complete_component, ComponentDecomposition,
    EdgeClass, HEdgeCounts, PartitionedGraph,
};
use crate::numeric::{sym_eigenvalues, Inertia, NumericError, SymMatrixF};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerturbError {
    #[error("two-component criterion requires exactly 2 components, got {got}")]
    WrongComponentCount { got: usize },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// The r x r first-order matrix: entry (i,i) is 2 w_i / n_i for w_i saddle
/// edges inside component i of n_i vertices, entry (i,j) is the cross count
/// divided by sqrt(n_i n_j). Its eigenvalues are the slopes at which the r
/// zero eigenvalues leave the origin.
#[derive(Debug, Clone)]
pub struct FirstOrderMatrix {
    matrix: SymMatrixF,
    counts: HEdgeCounts,
    sizes: Vec<usize>,
}

impl FirstOrderMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn as_matrix(&self) -> &SymMatrixF {
        &self.matrix
    }

    /// Slope eigenvalues, ascending.
    pub fn theta(&self) -> Result<Vec<f64>, NumericError> {
        sym_eigenvalues(&self.matrix)
    }

    /// Exact sign counts of the slope spectrum. The matrix is similar to
    /// diag(1/n_i) * C for the integer count matrix C (diagonal 2 w_i,
    /// off-diagonal cross counts); scaling by lcm(n_i) makes it an integer
    /// matrix with the same eigenvalue signs, so the verdict never depends
    /// on floating point.
    pub fn exact_theta_signs(&self) -> Result<Inertia, ExactError> {
        let r = self.sizes.len();
        let lcm = self
            .sizes
            .iter()
            .fold(BigInt::from(1), |acc, &n| acc.lcm(&BigInt::from(n)));
        let mut rows = vec![vec![BigInt::from(0); r]; r];
        for i in 0..r {
            let scale = &lcm / BigInt::from(self.sizes[i]);
            for j in 0..r {
                let count = if i == j {
                    2 * self.counts.within[i]
                } else {
                    self.counts.between[i][j]
                };
                rows[i][j] = &scale * BigInt::from(count);
            }
        }
        let p = char_poly_general(&rows)?;
        let (neg, zero, pos) = signed_root_counts(&p)?;
        debug_assert_eq!(neg + zero + pos, r, "slope spectrum must be real");
        Ok(Inertia::new(neg, zero, pos))
    }
}

/// Build the first-order matrix from component data.
pub fn first_order_matrix(
    counts: &HEdgeCounts,
    comp: &ComponentDecomposition,
) -> FirstOrderMatrix {
    let r = comp.count();
    assert_eq!(counts.component_count(), r, "counts do not match components");
    let sizes = comp.sizes().to_vec();
    let mut matrix = SymMatrixF::zeros(r);
    for i in 0..r {
        matrix.set_sym(i, i, 2.0 * counts.within[i] as f64 / sizes[i] as f64);
        for j in i + 1..r {
            let denom = ((sizes[i] * sizes[j]) as f64).sqrt();
            matrix.set_sym(i, j, counts.between[i][j] as f64 / denom);
        }
    }
    FirstOrderMatrix {
        matrix,
        counts: counts.clone(),
        sizes,
    }
}

/// Strict two-component positive-definiteness test on exact integers:
/// between^2 < 4 * within_1 * within_2. The factor 4 is exactly what
/// positive definiteness of the 2 x 2 first-order matrix requires; the
/// boundary case is excluded by strictness.
pub fn two_component_criterion(counts: &HEdgeCounts) -> Result<bool, PerturbError> {
    if counts.component_count() != 2 {
        return Err(PerturbError::WrongComponentCount {
            got: counts.component_count(),
        });
    }
    let c2 = (counts.between[0][1] as u128).pow(2);
    Ok(c2 < 4 * counts.within[0] as u128 * counts.within[1] as u128)
}

/// Classification of the slope spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FirstOrderVerdict {
    /// All slopes strictly positive: the operator is positive definite for
    /// all sufficiently small positive weights.
    PositiveDefinite,
    /// Smallest slope exactly zero: first-order theory is silent, the
    /// verdict is undetermined at this order.
    Marginal,
    /// Some slope strictly negative: indefinite, hence unstable dynamics,
    /// for all sufficiently small positive weights.
    Indefinite,
}

/// Everything the small-weight analysis produces for one graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationReport {
    /// Number of diffusive components.
    pub r: usize,
    /// Component sizes, in component order.
    pub component_sizes: Vec<usize>,
    /// Slope eigenvalues of the first-order matrix, ascending (numeric).
    pub theta: Vec<f64>,
    /// Exact sign counts of the slope spectrum; the verdict derives from
    /// these, not from the floating-point values above.
    pub theta_signs: Inertia,
    pub verdict: FirstOrderVerdict,
    /// Convenience flag: verdict == PositiveDefinite.
    pub positive_definite_small_eps: bool,
    /// For a connected diffusive subgraph with saddle edges present, the
    /// slope of the single perturbed zero eigenvalue: 2 #E_H / n.
    pub slope_one_component: Option<f64>,
    /// A complete component with an incident cross edge forces a negative
    /// slope (its 2 x 2 principal block has zero diagonal), so instability
    /// is certain; surfaced as its own flag.
    pub unstable_complete_component: bool,
    /// Two-component case only: the strict inequality between^2 < 4 w1 w2,
    /// which is equivalent to a positive-definite first-order matrix.
    pub criterion_factor4: Option<bool>,
    /// Two-component case only: the stricter variant between^2 < w1 w2,
    /// reported alongside for reference; it implies the factor-4 form.
    pub criterion_factor1: Option<bool>,
}

/// Assemble the full small-weight report for a graph.
pub fn small_eps_verdict(g: &PartitionedGraph) -> Result<PerturbationReport, PerturbError> {
    let comp = connected_components(g);
    let counts = h_edge_counts(g, &comp);
    let fom = first_order_matrix(&counts, &comp);
    let theta = fom.theta()?;
    let theta_signs = fom.exact_theta_signs()?;
    let verdict = if theta_signs.n_neg > 0 {
        FirstOrderVerdict::Indefinite
    } else if theta_signs.n_zero > 0 {
        FirstOrderVerdict::Marginal
    } else {
        FirstOrderVerdict::PositiveDefinite
    };
    let r = comp.count();
    let h_total = g.edge_count(EdgeClass::Saddle);
    let slope_one_component = if r == 1 && h_total > 0 {
        Some(2.0 * h_total as f64 / g.vertex_count() as f64)
    } else {
        None
    };
    let unstable_complete_component = (0..r).any(|i| {
        is_complete_component(i, g, &comp)
            && (0..r).any(|j| j != i && counts.between[i][j] > 0)
    });
    let (criterion_factor4, criterion_factor1) = if r == 2 {
        let c2 = (counts.between[0][1] as u128).pow(2);
        let ww = counts.within[0] as u128 * counts.within[1] as u128;
        (Some(c2 < 4 * ww), Some(c2 < ww))
    } else {
        (None, None)
    };
    Ok(PerturbationReport {
        r,
        component_sizes: comp.sizes().to_vec(),
        theta,
        theta_signs,
        verdict,
        positive_definite_small_eps: verdict == FirstOrderVerdict::PositiveDefinite,
        slope_one_component,
        unstable_complete_component,
        criterion_factor4,
        criterion_factor1,
    })
}
