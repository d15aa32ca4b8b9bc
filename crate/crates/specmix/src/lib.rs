//! Spectral analysis of graphs whose edges split into two interaction
//! classes: diffusive edges, which contribute a graph Laplacian, and
//! saddle edges, which contribute an adjacency part scaled by a global
//! weight. The central object is the symmetric operator
//!
//! ```text
//! M(eps) = L_diffusive + eps * A_saddle,   eps >= 0
//! ```
//!
//! whose inertia starts positive semidefinite at eps = 0 and drifts toward
//! the mixed-sign adjacency spectrum as eps grows. The crate provides:
//!
//! - [`graph`]: edge-partitioned simple graphs, parsing, components, and
//!   cross-edge counts;
//! - [`exact`]: big-integer/rational linear algebra — fraction-free
//!   determinants, ranks, characteristic polynomials, and Sturm-sequence
//!   root counting — used as the ground truth everywhere;
//! - [`numeric`]: a dependency-free Jacobi eigensolver with inertia
//!   extraction under an explicit zero tolerance;
//! - [`operator`]: the operator itself, exact and floating-point;
//! - [`perturbation`]: the small-weight behaviour of the kernel
//!   eigenvalues and the component-level stability criteria;
//! - [`detpoly`]: the determinant as an exact integer polynomial in the
//!   weight, with isolated positive roots and transition bounds;
//! - [`sweep`]: weight-grid signature sweeps and seeded randomised batch
//!   experiments with CSV/JSON output;
//! - [`dynamics`]: the gradient flow dq/dt = -M(eps) q, integrated and
//!   cross-checked against the spectral verdicts.

pub mod detpoly;
pub mod dynamics;
pub mod exact;
pub mod graph;
pub mod numeric;
pub mod operator;
pub mod perturbation;
pub mod sweep;

pub use detpoly::{
    c_factor, det_polynomial, exact_transition_candidates, product_expansion_check,
    transition_bounds, DetPolyError, TransitionBounds,
};
pub use dynamics::{
    integrate_flow, stability_cross_check, CrossCheckReport, DynamicsError, FlowClass, FlowResult,
};
pub use exact::{exact_sign_counts, ExactError, IntPolynomial, SturmChain, SymMatrixZ};
pub use graph::{
    connected_components, h_edge_counts, EdgeClass, GraphError, PartitionedGraph,
};
pub use numeric::{
    inertia_of, sym_eigen, sym_eigenvalues, Inertia, NumericError, SymMatrixF, ZeroTolerance,
};
pub use operator::{build_operator, MixedOperator, OperatorError};
pub use perturbation::{
    first_order_matrix, small_eps_verdict, two_component_criterion, FirstOrderVerdict,
    PerturbError, PerturbationReport,
};
pub use sweep::{
    eps_grid, run_figure_experiment, signature_sweep, ExperimentConfig, ExperimentMode,
    SweepError, SweepRecord, SweepResult,
};
