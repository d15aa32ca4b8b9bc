//! The linear gradient flow dq/dt = -M(eps) q and its empirical stability
//! classification, cross-checked against the spectral verdict.
//!
//! The flow descends the quadratic potential V(q) = (1/2) <q, M q>, which
//! is non-increasing along exact trajectories regardless of the inertia of
//! M; the classic fourth-order Runge-Kutta map preserves that monotonicity
//! for linear flows as long as the step satisfies the stability
//! precondition, so a rising energy trace indicates a real defect rather
//! than discretisation noise.

use std::io::{self, Write};

use rand_chacha::rand_core::RngCore;
use serde::Serialize;
use thiserror::Error;

use crate::graph::PartitionedGraph;
use crate::numeric::{sym_eigen, Inertia, NumericError, SymMatrixF, ZeroTolerance};
use crate::operator::{build_operator, MixedOperator, OperatorError};
use crate::sweep::{instance_rng, unit_f64};

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_T_END: f64 = 50.0;

/// Empirical verdicts are decided by three decades of norm movement.
const GROWTH_RATIO: f64 = 1e3;
const DECAY_RATIO: f64 = 1e-3;

/// RK4 on the real axis is stable for step * rate below roughly 2.785;
/// 2.5 keeps a margin.
const STABILITY_LIMIT: f64 = 2.5;

/// Hard ceiling on steps per trajectory so ill-conditioned instances
/// terminate (and come back INCONCLUSIVE) instead of spinning.
const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("step {dt} too large for operator scale {radius_estimate:.6} (need step * scale < 2.5)")]
    StepTooLarge { dt: f64, radius_estimate: f64 },
    #[error("initial state must be nonzero")]
    ZeroInitialState,
    #[error("invalid integration window: dt = {dt}, t_end = {t_end}")]
    BadWindow { dt: f64, t_end: f64 },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FlowClass {
    Decays,
    Grows,
    Inconclusive,
}

impl std::fmt::Display for FlowClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FlowClass::Decays => "DECAYS",
            FlowClass::Grows => "GROWS",
            FlowClass::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Outcome of one integrated trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct FlowResult {
    pub initial_norm: f64,
    pub final_norm: f64,
    pub classification: FlowClass,
    /// Time actually integrated; shorter than requested when the verdict
    /// locked in early.
    pub horizon: f64,
    pub step: f64,
    /// The state overflowed to non-finite values; reported as GROWS.
    pub overflowed: bool,
    /// Potential energy never rose beyond per-step tolerance.
    pub energy_monotone: bool,
    /// Largest single-step rise of the potential (0 when none).
    pub max_energy_uptick: f64,
    #[serde(skip)]
    pub final_state: Vec<f64>,
}

/// One sampled point of a trajectory trace.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub norm: f64,
    pub potential: f64,
}

fn norm_of(q: &[f64]) -> f64 {
    q.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Integrate dq/dt = -M q with classical RK4 from q0 over [0, t_end].
pub fn integrate_matrix_flow(
    m: &SymMatrixF,
    q0: &[f64],
    dt: f64,
    t_end: f64,
) -> Result<FlowResult, DynamicsError> {
    integrate_core(m, q0, dt, t_end, None)
}

/// Same integration, also recording (t, norm, potential) at every step.
pub fn integrate_matrix_flow_traced(
    m: &SymMatrixF,
    q0: &[f64],
    dt: f64,
    t_end: f64,
) -> Result<(FlowResult, Vec<TracePoint>), DynamicsError> {
    let mut trace = Vec::new();
    let result = integrate_core(m, q0, dt, t_end, Some(&mut trace))?;
    Ok((result, trace))
}

/// Evaluate the operator at the given weight and integrate the flow.
pub fn integrate_flow(
    op: &MixedOperator,
    eps: f64,
    q0: &[f64],
    dt: f64,
    t_end: f64,
) -> Result<FlowResult, DynamicsError> {
    let m = op.evaluate(eps)?;
    integrate_core(&m, q0, dt, t_end, None)
}

fn integrate_core(
    m: &SymMatrixF,
    q0: &[f64],
    dt: f64,
    t_end: f64,
    mut trace: Option<&mut Vec<TracePoint>>,
) -> Result<FlowResult, DynamicsError> {
    assert_eq!(m.dim(), q0.len(), "state dimension mismatch");
    if !(dt > 0.0 && dt.is_finite() && t_end >= 0.0 && t_end.is_finite()) {
        return Err(DynamicsError::BadWindow { dt, t_end });
    }
    let radius_estimate = m.max_abs_row_sum();
    if dt * radius_estimate >= STABILITY_LIMIT {
        return Err(DynamicsError::StepTooLarge {
            dt,
            radius_estimate,
        });
    }
    let initial_norm = norm_of(q0);
    if initial_norm == 0.0 {
        return Err(DynamicsError::ZeroInitialState);
    }

    let n = m.dim();
    let steps = ((t_end / dt).ceil() as usize).min(MAX_STEPS);
    let mut q = q0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    let mut potential = 0.5 * m.quadratic_form(&q);
    let mut energy_monotone = true;
    let mut max_uptick = 0.0f64;
    let mut overflowed = false;
    let mut elapsed = 0.0;
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(TracePoint {
            t: 0.0,
            norm: initial_norm,
            potential,
        });
    }

    let grow_threshold = GROWTH_RATIO * initial_norm;
    for step_index in 0..steps {
        // k1 = -M q
        m.matvec(&q, &mut k1);
        k1.iter_mut().for_each(|v| *v = -*v);
        // k2 = -M (q + dt/2 k1)
        for i in 0..n {
            stage[i] = q[i] + 0.5 * dt * k1[i];
        }
        m.matvec(&stage, &mut k2);
        k2.iter_mut().for_each(|v| *v = -*v);
        // k3 = -M (q + dt/2 k2)
        for i in 0..n {
            stage[i] = q[i] + 0.5 * dt * k2[i];
        }
        m.matvec(&stage, &mut k3);
        k3.iter_mut().for_each(|v| *v = -*v);
        // k4 = -M (q + dt k3)
        for i in 0..n {
            stage[i] = q[i] + dt * k3[i];
        }
        m.matvec(&stage, &mut k4);
        k4.iter_mut().for_each(|v| *v = -*v);
        for i in 0..n {
            q[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        elapsed = (step_index + 1) as f64 * dt;

        let norm = norm_of(&q);
        if !norm.is_finite() {
            overflowed = true;
            break;
        }
        let next_potential = 0.5 * m.quadratic_form(&q);
        let uptick = next_potential - potential;
        if uptick > 1e-8 * (1.0 + potential.abs()) {
            energy_monotone = false;
        }
        max_uptick = max_uptick.max(uptick);
        potential = next_potential;
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(TracePoint {
                t: elapsed,
                norm,
                potential,
            });
        }
        // growth is irreversible for this flow, so the verdict can lock in
        if norm >= grow_threshold {
            break;
        }
    }

    let final_norm = if overflowed {
        f64::INFINITY
    } else {
        norm_of(&q)
    };
    let classification = if overflowed || final_norm >= GROWTH_RATIO * initial_norm {
        FlowClass::Grows
    } else if final_norm <= DECAY_RATIO * initial_norm {
        FlowClass::Decays
    } else {
        FlowClass::Inconclusive
    };
    Ok(FlowResult {
        initial_norm,
        final_norm,
        classification,
        horizon: elapsed,
        step: dt,
        overflowed,
        energy_monotone,
        max_energy_uptick: max_uptick,
        final_state: q,
    })
}

/// Write a trajectory trace as CSV.
pub fn write_trajectory_csv<W: Write>(
    out: &mut W,
    comments: &[String],
    trace: &[TracePoint],
) -> io::Result<()> {
    for line in comments {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "t,norm,potential")?;
    for p in trace {
        writeln!(out, "{},{},{}", p.t, p.norm, p.potential)?;
    }
    Ok(())
}

/// What the spectrum says the flow must do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectralPrediction {
    /// Positive definite: every trajectory decays to zero.
    Decays,
    /// At least one negative eigenvalue: generic trajectories grow.
    Grows,
    /// Positive semidefinite with kernel: trajectories converge to the
    /// kernel projection of the initial state.
    ConvergesToKernelProjection,
}

/// Agreement report between the spectral prediction and integrated trials.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckReport {
    pub eps: f64,
    pub trials: usize,
    pub prediction: SpectralPrediction,
    pub inertia: Inertia,
    /// An eigenvalue sat within tolerance of zero while others were
    /// nonzero-signed; classification is ill-conditioned here.
    pub near_singular: bool,
    pub agreements: usize,
    pub majority_agrees: bool,
    pub all_agree: bool,
    pub energy_monotone_all: bool,
    pub dt: f64,
    pub horizon: f64,
}

/// Random point on the unit sphere via normalised Gaussian coordinates.
pub(crate) fn random_unit_vector(rng: &mut impl RngCore, n: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n)
            .map(|_| {
                // Box-Muller; 1 - u keeps the log argument positive
                let u1 = 1.0 - unit_f64(rng);
                let u2 = unit_f64(rng);
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let norm = norm_of(&v);
        if norm > 1e-12 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

/// Run `trials` trajectories from random unit starts and compare the
/// empirical verdicts with the spectral one. The step and horizon adapt
/// to the spectrum: the step obeys the RK4 stability bound, and the
/// horizon is long enough for the slowest relevant mode to move the norm
/// across the decision thresholds (capped, so marginal spectra come back
/// INCONCLUSIVE rather than hanging).
pub fn stability_cross_check(
    g: &PartitionedGraph,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<CrossCheckReport, DynamicsError> {
    assert!(trials >= 1, "at least one trial");
    let op = build_operator(g);
    let m = op.evaluate(eps)?;
    let n = m.dim();
    let eig = sym_eigen(&m)?;
    let tau = ZeroTolerance::scaled_to(&m).tau;

    let mut n_neg = 0;
    let mut n_zero = 0;
    let mut n_pos = 0;
    for &v in &eig.values {
        if v < -tau {
            n_neg += 1;
        } else if v > tau {
            n_pos += 1;
        } else {
            n_zero += 1;
        }
    }
    let inertia = Inertia::new(n_neg, n_zero, n_pos);
    let prediction = if n_neg > 0 {
        SpectralPrediction::Grows
    } else if n_zero == 0 {
        SpectralPrediction::Decays
    } else {
        SpectralPrediction::ConvergesToKernelProjection
    };

    let radius = m.max_abs_row_sum();
    let dt = if radius > 0.0 {
        (1.0 / radius).min(0.05)
    } else {
        0.05
    };
    // slowest mode that has to act before the verdict shows
    let rate = match prediction {
        SpectralPrediction::Grows => -eig.values[0],
        SpectralPrediction::Decays => eig.values[0],
        SpectralPrediction::ConvergesToKernelProjection => eig
            .values
            .iter()
            .copied()
            .filter(|&v| v > tau)
            .fold(f64::INFINITY, f64::min),
    };
    let wanted = match prediction {
        // decay compresses every mode at least this fast: exp(-9) < 1e-3
        SpectralPrediction::Decays => 9.0 / rate,
        // growth must also overcome a possibly small component of the
        // start along the unstable mode: exp(14) covers coefficients
        // down to about 1e-3
        SpectralPrediction::Grows => 14.0 / rate,
        // distance must drop under 1e-6: exp(-16) does
        SpectralPrediction::ConvergesToKernelProjection => {
            if rate.is_finite() {
                16.0 / rate
            } else {
                1.0 // zero matrix: the state never moves
            }
        }
    };
    let t_end = wanted.min(MAX_STEPS as f64 * dt);

    let kernel_basis: Vec<&Vec<f64>> = eig
        .values
        .iter()
        .zip(&eig.vectors)
        .filter(|(v, _)| v.abs() <= tau)
        .map(|(_, vec)| vec)
        .collect();

    let mut agreements = 0;
    let mut energy_monotone_all = true;
    for trial in 0..trials {
        let mut rng = instance_rng(seed, trial as u64);
        let q0 = random_unit_vector(&mut rng, n);
        let flow = integrate_core(&m, &q0, dt, t_end, None)?;
        energy_monotone_all &= flow.energy_monotone;
        let agrees = match prediction {
            SpectralPrediction::Grows => flow.classification == FlowClass::Grows,
            SpectralPrediction::Decays => flow.classification == FlowClass::Decays,
            SpectralPrediction::ConvergesToKernelProjection => {
                let mut projection = vec![0.0; n];
                for basis in &kernel_basis {
                    let coeff: f64 = basis.iter().zip(&q0).map(|(b, q)| b * q).sum();
                    for i in 0..n {
                        projection[i] += coeff * basis[i];
                    }
                }
                let dist = flow
                    .final_state
                    .iter()
                    .zip(&projection)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                dist < 1e-6
            }
        };
        if agrees {
            agreements += 1;
        }
    }

    Ok(CrossCheckReport {
        eps,
        trials,
        prediction,
        inertia,
        near_singular: n_zero > 0 && (n_neg + n_pos) > 0,
        agreements,
        majority_agrees: 2 * agreements > trials,
        all_agree: agreements == trials,
        energy_monotone_all,
        dt,
        horizon: t_end,
    })
}
