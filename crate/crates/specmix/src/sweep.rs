//! Weight-grid signature sweeps, random instance generators for the
//! batch experiments, and deterministic CSV/JSON emission.
//!
//! A sweep samples the inertia of M(eps) = L + eps A over an ascending
//! grid, counts adjacent signature changes, and checks that the signature
//! never increases. The stock random ensembles are: graphs with edge
//! counts uniform in [2n, n(n-1)/2] and edge
//! classes assigned with probability 1/2, or matrix pairs (a aT, b + bT)
//! with entries uniform in [-1, 1]. Every instance derives its randomness
//! from a seeded ChaCha8 generator on its own stream, so results are
//! byte-identical across platforms and thread counts.

use std::io::{self, Write};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detpoly::{transition_bounds, DetPolyError, TransitionBounds};
use crate::graph::{EdgeClass, PartitionedGraph};
use crate::numeric::{inertia_of, Inertia, NumericError, SymMatrixF, ZeroTolerance};
use crate::operator::{build_operator, MixedOperator, OperatorError};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("no edge count satisfies 2n <= n(n-1)/2 for n = {n}")]
    InfeasibleEdgeCount { n: usize },
    #[error("invalid experiment config: {reason}")]
    InvalidConfig { reason: String },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    DetPoly(#[from] DetPolyError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One grid sample: the weight, the inertia of M at that weight, and
/// whether any eigenvalue fell inside the zero tolerance (in which case
/// the signature is ill-conditioned and the sample is flagged rather than
/// silently trusted).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub eps: f64,
    pub inertia: Inertia,
    pub near_singular: bool,
}

/// A full sweep over one instance. `bounds` carries the exact transition
/// bounds when the instance is a graph; matrix-pair instances have no
/// graph to bound, so it stays empty for them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub transitions_observed: usize,
    pub monotone_nonincreasing: bool,
    pub bounds: Option<TransitionBounds>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentMode {
    Graph,
    MatrixPair,
}

/// Configuration for a batch experiment. `n_min..=n_max` ranges over
/// vertex counts in graph mode and matrix dimensions in matrix mode.
/// A single-point grid (eps_min == eps_max) is allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: ExperimentMode,
    pub instances: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_step: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Stock grid defaults: weights from 1/100 to 100 sampled every
    /// 1/100.
    pub const DEFAULT_EPS_MIN: f64 = 0.01;
    pub const DEFAULT_EPS_MAX: f64 = 100.0;
    pub const DEFAULT_EPS_STEP: f64 = 0.01;

    /// 16 random graphs on 10..=20 vertices over the default grid.
    pub fn figure_graphs(seed: u64) -> Self {
        ExperimentConfig {
            mode: ExperimentMode::Graph,
            instances: 16,
            n_min: 10,
            n_max: 20,
            eps_min: Self::DEFAULT_EPS_MIN,
            eps_max: Self::DEFAULT_EPS_MAX,
            eps_step: Self::DEFAULT_EPS_STEP,
            seed,
        }
    }

    /// 16 random psd/symmetric matrix pairs of dimension 10..=20.
    pub fn figure_matrix_pairs(seed: u64) -> Self {
        ExperimentConfig {
            mode: ExperimentMode::MatrixPair,
            ..Self::figure_graphs(seed)
        }
    }

    /// 50 random graphs on 5..=20 vertices over the default grid.
    pub fn figure_bounds(seed: u64) -> Self {
        ExperimentConfig {
            instances: 50,
            n_min: 5,
            ..Self::figure_graphs(seed)
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let fail = |reason: &str| {
            Err(SweepError::InvalidConfig {
                reason: reason.to_string(),
            })
        };
        if self.instances == 0 {
            return fail("instances must be at least 1");
        }
        if !(self.eps_min > 0.0 && self.eps_min.is_finite()) {
            return fail("eps_min must be positive and finite");
        }
        if !(self.eps_max >= self.eps_min && self.eps_max.is_finite()) {
            return fail("eps_max must be finite and at least eps_min");
        }
        if !(self.eps_step > 0.0 && self.eps_step.is_finite()) {
            return fail("eps_step must be positive and finite");
        }
        if self.n_min > self.n_max {
            return fail("n_min must not exceed n_max");
        }
        let floor = match self.mode {
            ExperimentMode::Graph => 2,
            ExperimentMode::MatrixPair => 1,
        };
        if self.n_min < floor {
            return fail("dimension range starts below the smallest valid size");
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        eps_grid(self.eps_min, self.eps_max, self.eps_step)
    }
}

/// Ascending grid from eps_min in steps of eps_step. The point count is
/// fixed up front by rounding (eps_max - eps_min) / eps_step, so float
/// accumulation cannot add or drop an endpoint.
pub fn eps_grid(eps_min: f64, eps_max: f64, eps_step: f64) -> Vec<f64> {
    debug_assert!(eps_min > 0.0 && eps_max >= eps_min && eps_step > 0.0);
    let count = ((eps_max - eps_min) / eps_step + 0.5).floor() as usize + 1;
    (0..count).map(|k| eps_min + k as f64 * eps_step).collect()
}

fn finish_sweep(records: Vec<SweepRecord>, bounds: Option<TransitionBounds>) -> SweepResult {
    let mut transitions = 0;
    let mut monotone = true;
    for pair in records.windows(2) {
        let (prev, next) = (pair[0].inertia.signature(), pair[1].inertia.signature());
        if next != prev {
            transitions += 1;
        }
        if next > prev {
            monotone = false;
        }
    }
    SweepResult {
        records,
        transitions_observed: transitions,
        monotone_nonincreasing: monotone,
        bounds,
    }
}

/// Sweep a graph operator over an ascending positive grid, recording the
/// inertia at every point under the scale-aware default zero tolerance.
pub fn signature_sweep(op: &MixedOperator, grid: &[f64]) -> Result<SweepResult, SweepError> {
    let mut records = Vec::with_capacity(grid.len());
    for &eps in grid {
        let m = op.evaluate(eps)?;
        let inertia = inertia_of(&m, ZeroTolerance::scaled_to(&m))?;
        records.push(SweepRecord {
            eps,
            inertia,
            near_singular: inertia.n_zero > 0,
        });
    }
    Ok(finish_sweep(records, Some(transition_bounds(op)?)))
}

/// Sweep A + eps B for a matrix pair; no graph structure, so no bounds.
pub fn matrix_pair_sweep(
    a: &SymMatrixF,
    b: &SymMatrixF,
    grid: &[f64],
) -> Result<SweepResult, SweepError> {
    let mut records = Vec::with_capacity(grid.len());
    for &eps in grid {
        let m = a.add_scaled(b, eps);
        let inertia = inertia_of(&m, ZeroTolerance::scaled_to(&m))?;
        records.push(SweepRecord {
            eps,
            inertia,
            near_singular: inertia.n_zero > 0,
        });
    }
    Ok(finish_sweep(records, None))
}

/// Uniform draw from 0..range without modulo bias (top-band rejection).
pub(crate) fn uniform_u64_below(rng: &mut impl RngCore, range: u64) -> u64 {
    debug_assert!(range > 0);
    let threshold = range * (u64::MAX / range);
    loop {
        let x = rng.next_u64();
        if x < threshold {
            return x % range;
        }
    }
}

/// Uniform draw from lo..=hi inclusive.
pub(crate) fn uniform_usize(rng: &mut impl RngCore, lo: usize, hi: usize) -> usize {
    debug_assert!(lo <= hi);
    lo + uniform_u64_below(rng, (hi - lo + 1) as u64) as usize
}

/// Uniform in [0, 1) with 53 random bits, stable across platforms.
pub(crate) fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in [-1, 1).
pub(crate) fn symmetric_f64(rng: &mut impl RngCore) -> f64 {
    2.0 * unit_f64(rng) - 1.0
}

/// The per-instance generator: instance i consumes stream i of a ChaCha8
/// generator seeded from the experiment seed, so instances are independent
/// and insertion-order free.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Random partitioned graph from the stock ensemble: n uniform in
/// n_min..=n_max, edge count uniform in [2n, n(n-1)/2], the edge set
/// sampled uniformly without replacement, and each edge labelled diffusive
/// or saddle with probability 1/2.
pub fn random_partitioned_graph(
    rng: &mut impl RngCore,
    n_min: usize,
    n_max: usize,
) -> Result<PartitionedGraph, SweepError> {
    assert!(2 <= n_min && n_min <= n_max);
    let n = uniform_usize(rng, n_min, n_max);
    let total_pairs = n * (n - 1) / 2;
    if 2 * n > total_pairs {
        return Err(SweepError::InfeasibleEdgeCount { n });
    }
    let edge_count = uniform_usize(rng, 2 * n, total_pairs);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut g = PartitionedGraph::new(n).expect("n >= 2");
    // partial Fisher-Yates: the first edge_count slots become a uniform
    // sample without replacement
    for k in 0..edge_count {
        let j = uniform_usize(rng, k, total_pairs - 1);
        pairs.swap(k, j);
        let (u, v) = pairs[k];
        let class = if rng.next_u64() & 1 == 0 {
            EdgeClass::Diffusive
        } else {
            EdgeClass::Saddle
        };
        g.add_edge(u, v, class).expect("sampled pairs are distinct");
    }
    Ok(g)
}

/// Gram matrix a aT of a square array.
fn gram(a: &[Vec<f64>]) -> SymMatrixF {
    let n = a.len();
    let mut m = SymMatrixF::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in 0..n {
                s += a[i][k] * a[j][k];
            }
            m.set_sym(i, j, s);
        }
    }
    m
}

/// Random matrix pair (A, B) = (a aT, b + bT) with a, b square and their
/// entries uniform in [-1, 1]; A is positive semidefinite by construction
/// and B symmetric with mixed signs.
pub fn random_matrix_pair(
    rng: &mut impl RngCore,
    dim_min: usize,
    dim_max: usize,
) -> (SymMatrixF, SymMatrixF) {
    assert!(1 <= dim_min && dim_min <= dim_max);
    let n = uniform_usize(rng, dim_min, dim_max);
    fn square<R: RngCore>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..n).map(|_| symmetric_f64(rng)).collect())
            .collect()
    }
    let a = square(rng, n);
    let b = square(rng, n);
    let gram_a = gram(&a);
    let mut sym_b = SymMatrixF::zeros(n);
    for i in 0..n {
        for j in i..n {
            sym_b.set_sym(i, j, b[i][j] + b[j][i]);
        }
    }
    (gram_a, sym_b)
}

/// One instance of a batch run, with everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct InstanceOutcome {
    pub index: usize,
    pub dim: usize,
    /// Edge-list text for graph instances; lets failures be dumped and
    /// re-parsed verbatim.
    pub graph_text: Option<String>,
    pub result: SweepResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedInstance {
    pub index: usize,
    pub reason: String,
}

/// Per-instance roll-up reported in the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub index: usize,
    pub dim: usize,
    pub transitions_observed: usize,
    pub monotone_nonincreasing: bool,
    pub near_singular_points: usize,
    pub bounds: Option<TransitionBounds>,
    /// transitions_observed <= combined bound; absent for matrix pairs.
    pub within_bounds: Option<bool>,
}

/// Monotonicity audit over the whole batch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureVerdict {
    pub monotone_instances: usize,
    pub violation_instances: usize,
    pub holds: bool,
}

/// Full dump of a would-be counterexample: the graph (when there is one),
/// and the complete inertia trace over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationDump {
    pub instance: usize,
    pub graph: Option<String>,
    pub records: Vec<SweepRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    pub instances: Vec<InstanceSummary>,
    pub skipped: Vec<SkippedInstance>,
    pub conjecture: ConjectureVerdict,
    pub violations: Vec<ViolationDump>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub instances: Vec<InstanceOutcome>,
    pub summary: ExperimentSummary,
}

impl ExperimentOutcome {
    /// CSV with the experiment config embedded as a leading comment; one
    /// row per grid point per instance, ordered by instance then weight.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let config_line = serde_json::to_string(&self.config).expect("config serializes");
        let rows = self
            .instances
            .iter()
            .flat_map(|inst| inst.result.records.iter().map(move |r| (inst.index, r)));
        write_sweep_csv(out, &[format!("config: {config_line}")], rows)
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }
}

/// Write sweep rows in the fixed column layout. Comment lines (prefixed
/// with '#') carry the configuration so output files are self-describing.
pub fn write_sweep_csv<'a, W: Write>(
    out: &mut W,
    comments: &[String],
    rows: impl Iterator<Item = (usize, &'a SweepRecord)>,
) -> io::Result<()> {
    for line in comments {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "instance,eps,n_neg,n_zero,n_pos,signature,near_singular")?;
    for (instance, r) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            instance,
            r.eps,
            r.inertia.n_neg,
            r.inertia.n_zero,
            r.inertia.n_pos,
            r.inertia.signature(),
            u8::from(r.near_singular),
        )?;
    }
    Ok(())
}

/// Run `count` independent jobs over at most `threads` workers, returning
/// results in job order regardless of scheduling.
pub fn parallel_map<T, F>(count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if threads <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let chunk = count.div_ceil(threads.min(count));
    std::thread::scope(|scope| {
        for (t, slice) in slots.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (k, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(f(t * chunk + k));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("every slot filled")).collect()
}

fn run_instance(cfg: &ExperimentConfig, grid: &[f64], index: usize) -> Result<InstanceOutcome, String> {
    let mut rng = instance_rng(cfg.seed, index as u64);
    match cfg.mode {
        ExperimentMode::Graph => {
            let g = random_partitioned_graph(&mut rng, cfg.n_min, cfg.n_max)
                .map_err(|e| e.to_string())?;
            let op = build_operator(&g);
            let result = signature_sweep(&op, grid).map_err(|e| e.to_string())?;
            Ok(InstanceOutcome {
                index,
                dim: g.vertex_count(),
                graph_text: Some(g.to_edge_list()),
                result,
            })
        }
        ExperimentMode::MatrixPair => {
            let (a, b) = random_matrix_pair(&mut rng, cfg.n_min, cfg.n_max);
            let result = matrix_pair_sweep(&a, &b, grid).map_err(|e| e.to_string())?;
            Ok(InstanceOutcome {
                index,
                dim: a.dim(),
                graph_text: None,
                result,
            })
        }
    }
}

/// Run the full batch experiment. Failed instances are skipped and
/// recorded rather than aborting the batch; non-monotone sweeps are dumped
/// in full as counterexample artifacts.
pub fn run_figure_experiment(
    cfg: &ExperimentConfig,
    threads: usize,
) -> Result<ExperimentOutcome, SweepError> {
    cfg.validate()?;
    let grid = cfg.grid();
    let raw = parallel_map(cfg.instances, threads, |i| run_instance(cfg, &grid, i));

    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for (index, item) in raw.into_iter().enumerate() {
        match item {
            Ok(outcome) => instances.push(outcome),
            Err(reason) => skipped.push(SkippedInstance { index, reason }),
        }
    }

    let mut summaries = Vec::new();
    let mut violations = Vec::new();
    for inst in &instances {
        let r = &inst.result;
        summaries.push(InstanceSummary {
            index: inst.index,
            dim: inst.dim,
            transitions_observed: r.transitions_observed,
            monotone_nonincreasing: r.monotone_nonincreasing,
            near_singular_points: r.records.iter().filter(|s| s.near_singular).count(),
            bounds: r.bounds,
            within_bounds: r.bounds.map(|b| r.transitions_observed <= b.combined),
        });
        if !r.monotone_nonincreasing {
            violations.push(ViolationDump {
                instance: inst.index,
                graph: inst.graph_text.clone(),
                records: r.records.clone(),
            });
        }
    }
    let violation_instances = violations.len();
    let summary = ExperimentSummary {
        config: cfg.clone(),
        instances: summaries,
        skipped: skipped.clone(),
        conjecture: ConjectureVerdict {
            monotone_instances: instances.len() - violation_instances,
            violation_instances,
            holds: violation_instances == 0,
        },
        violations,
    };
    Ok(ExperimentOutcome {
        config: cfg.clone(),
        instances,
        summary,
    })
}
