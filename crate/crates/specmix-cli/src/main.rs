//! Command-line surface for the mixed-operator analysis library.
//!
//! Every subcommand echoes its fully resolved configuration (defaults and
//! seed included) as `#`-prefixed header lines, so any output file is
//! self-describing and any run is reproducible from its own output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use specmix::detpoly::{det_polynomial, exact_transition_candidates, transition_bounds, DetPolyError};
use specmix::dynamics::{
    integrate_matrix_flow_traced, stability_cross_check, write_trajectory_csv, DynamicsError,
};
use specmix::exact::{exact_sign_counts, ExactError};
use specmix::graph::{EdgeClass, GraphError, PartitionedGraph};
use specmix::numeric::{inertia_of, sym_eigenvalues, NumericError, ZeroTolerance};
use specmix::operator::{build_operator, MixedOperator, OperatorError};
use specmix::perturbation::{small_eps_verdict, PerturbError};
use specmix::sweep::{
    eps_grid, run_figure_experiment, signature_sweep, write_sweep_csv, ExperimentConfig,
    ExperimentMode, SweepError,
};

const DEFAULT_SEED: u64 = 7;

#[derive(Parser)]
#[command(
    name = "specmix",
    version,
    about = "Spectral analysis of graphs with diffusive (Laplacian) and saddle (adjacency) edges"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Random partitioned graphs from the stock ensemble
    Graph,
    /// Random (a aT, b + bT) matrix pairs
    Matrix,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and inertia of M(eps) for one graph
    Spectrum {
        /// Edge-list file (`n <count>`, then `g i j` / `h i j` lines)
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
        /// Weight on the saddle adjacency part
        #[arg(long)]
        eps: f64,
        /// Zero tolerance; default scales 1e-9 to the matrix norm
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Small-weight behaviour of the kernel eigenvalues
    Perturb {
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
    },
    /// Exact determinant polynomial and isolated positive roots
    Detpoly {
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
    },
    /// Exact upper bounds on signature transitions
    Bounds {
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
    },
    /// Signature sweep over a weight grid for one graph
    Sweep {
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
        #[arg(long, default_value_t = ExperimentConfig::DEFAULT_EPS_MIN)]
        eps_min: f64,
        #[arg(long, default_value_t = ExperimentConfig::DEFAULT_EPS_MAX)]
        eps_max: f64,
        #[arg(long, default_value_t = ExperimentConfig::DEFAULT_EPS_STEP)]
        eps_step: f64,
        /// Write CSV here instead of stdout
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Batch experiment over random instances; audits monotonicity
    Conjecture {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[arg(long, default_value_t = ExperimentConfig::DEFAULT_EPS_MIN)]
        eps_min: f64,
        #[arg(long, default_value_t = ExperimentConfig::DEFAULT_EPS_MAX)]
        eps_max: f64,
        #[arg(long, default_value_t = ExperimentConfig::DEFAULT_EPS_STEP)]
        eps_step: f64,
        /// Worker threads; falls back to SPECMIX_THREADS, then 1
        #[arg(long)]
        threads: Option<usize>,
        /// Write the JSON summary here instead of stdout
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write the full per-record CSV here
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Dump every generated graph as an edge-list file into this directory
        #[arg(long)]
        dump_graphs: Option<PathBuf>,
    },
    /// Integrate the gradient flow and cross-check the spectral verdict
    Dynamics {
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Additionally write one trajectory trace (t, norm, potential)
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Step for the traced trajectory
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Horizon for the traced trajectory
        #[arg(long, default_value_t = 50.0)]
        t_end: f64,
    },
    /// Run the built-in oracle-equivalence checks
    Selftest,
}

/// Input problems exit with 2, numerical failures with 3 (usage errors
/// exit with 1 before we ever get here).
enum AppError {
    Input(String),
    Numerical(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Input(_) => 2,
            AppError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Input(m) | AppError::Numerical(m) => m,
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Input(e.to_string())
    }
}

impl From<GraphError> for AppError {
    fn from(e: GraphError) -> Self {
        AppError::Input(e.to_string())
    }
}

impl From<OperatorError> for AppError {
    fn from(e: OperatorError) -> Self {
        AppError::Input(e.to_string())
    }
}

impl From<NumericError> for AppError {
    fn from(e: NumericError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<ExactError> for AppError {
    fn from(e: ExactError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<PerturbError> for AppError {
    fn from(e: PerturbError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<DetPolyError> for AppError {
    fn from(e: DetPolyError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<SweepError> for AppError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::InvalidConfig { .. } | SweepError::InfeasibleEdgeCount { .. } => {
                AppError::Input(e.to_string())
            }
            SweepError::Io(io) => AppError::Input(io.to_string()),
            SweepError::Operator(op) => op.into(),
            SweepError::Numeric(n) => n.into(),
            SweepError::DetPoly(d) => d.into(),
        }
    }
}

impl From<DynamicsError> for AppError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::StepTooLarge { .. }
            | DynamicsError::ZeroInitialState
            | DynamicsError::BadWindow { .. } => AppError::Input(e.to_string()),
            DynamicsError::Operator(op) => op.into(),
            DynamicsError::Numeric(n) => n.into(),
        }
    }
}

fn main() -> ExitCode {
    // die quietly when a pipe reader closes early, like standard filters
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn load_graph(path: &Path) -> Result<(PartitionedGraph, MixedOperator), AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::Input(format!("{}: {e}", path.display())))?;
    let g = PartitionedGraph::parse(&text)?;
    let op = build_operator(&g);
    Ok((g, op))
}

fn graph_header(command: &str, path: &Path, g: &PartitionedGraph) -> Vec<String> {
    vec![
        format!("command: {command}"),
        format!(
            "graph: {} (n={}, diffusive={}, saddle={})",
            path.display(),
            g.vertex_count(),
            g.edge_count(EdgeClass::Diffusive),
            g.edge_count(EdgeClass::Saddle)
        ),
    ]
}

fn print_headers(lines: &[String]) {
    for line in lines {
        println!("# {line}");
    }
}

fn approx(r: &num_rational::BigRational) -> f64 {
    let num: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let den: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    num / den
}

fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("SPECMIX_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Spectrum { graph, eps, tau } => cmd_spectrum(&graph, eps, tau),
        Command::Perturb { graph } => cmd_perturb(&graph),
        Command::Detpoly { graph } => cmd_detpoly(&graph),
        Command::Bounds { graph } => cmd_bounds(&graph),
        Command::Sweep {
            graph,
            eps_min,
            eps_max,
            eps_step,
            csv,
        } => cmd_sweep(&graph, eps_min, eps_max, eps_step, csv.as_deref()),
        Command::Conjecture {
            mode,
            instances,
            seed,
            n_min,
            n_max,
            eps_min,
            eps_max,
            eps_step,
            threads,
            json,
            csv,
            dump_graphs,
        } => {
            let cfg = ExperimentConfig {
                mode: match mode {
                    ModeArg::Graph => ExperimentMode::Graph,
                    ModeArg::Matrix => ExperimentMode::MatrixPair,
                },
                instances,
                n_min,
                n_max,
                eps_min,
                eps_max,
                eps_step,
                seed,
            };
            cmd_conjecture(
                cfg,
                resolve_threads(threads),
                json.as_deref(),
                csv.as_deref(),
                dump_graphs.as_deref(),
            )
        }
        Command::Dynamics {
            graph,
            eps,
            trials,
            seed,
            trace,
            dt,
            t_end,
        } => cmd_dynamics(&graph, eps, trials, seed, trace.as_deref(), dt, t_end),
        Command::Selftest => cmd_selftest(),
    }
}

fn cmd_spectrum(path: &Path, eps: f64, tau: Option<f64>) -> Result<(), AppError> {
    let (g, op) = load_graph(path)?;
    let m = op.evaluate(eps)?;
    let tol = match tau {
        Some(t) if t.is_finite() && t >= 0.0 => ZeroTolerance::new(t),
        Some(t) => {
            return Err(AppError::Input(format!(
                "tau must be finite and nonnegative, got {t}"
            )))
        }
        None => ZeroTolerance::scaled_to(&m),
    };
    let mut headers = graph_header("spectrum", path, &g);
    headers.push(format!("eps: {eps}"));
    headers.push(format!("tau: {}", tol.tau));
    print_headers(&headers);

    let values = sym_eigenvalues(&m)?;
    let inertia = inertia_of(&m, tol)?;
    let rendered: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
    println!("eigenvalues: {}", rendered.join(" "));
    println!(
        "inertia: n_neg={} n_zero={} n_pos={} signature={}",
        inertia.n_neg,
        inertia.n_zero,
        inertia.n_pos,
        inertia.signature()
    );
    Ok(())
}

fn cmd_perturb(path: &Path) -> Result<(), AppError> {
    let (g, _) = load_graph(path)?;
    print_headers(&graph_header("perturb", path, &g));
    let report = small_eps_verdict(&g)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(())
}

fn cmd_detpoly(path: &Path) -> Result<(), AppError> {
    let (g, op) = load_graph(path)?;
    print_headers(&graph_header("detpoly", path, &g));
    let p = det_polynomial(&op)?;
    if p.is_zero() {
        println!("0");
        println!("identically singular: det M(eps) = 0 for every weight");
        return Ok(());
    }
    let coeffs: Vec<String> = (0..=p.degree().unwrap_or(0))
        .map(|k| p.coeff(k).to_string())
        .collect();
    println!("{}", coeffs.join(" "));
    let intervals = exact_transition_candidates(&op)?;
    println!("positive_roots: {}", intervals.len());
    for (lo, hi) in &intervals {
        println!("root in ({lo}, {hi}]  ~ {:.9}", approx(&(lo + hi)) / 2.0);
    }
    Ok(())
}

fn cmd_bounds(path: &Path) -> Result<(), AppError> {
    let (g, op) = load_graph(path)?;
    print_headers(&graph_header("bounds", path, &g));
    let bounds = transition_bounds(&op)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&bounds).expect("bounds serialize")
    );
    Ok(())
}

fn cmd_sweep(
    path: &Path,
    eps_min: f64,
    eps_max: f64,
    eps_step: f64,
    csv: Option<&Path>,
) -> Result<(), AppError> {
    if !(eps_min > 0.0 && eps_max >= eps_min && eps_step > 0.0)
        || !(eps_min.is_finite() && eps_max.is_finite() && eps_step.is_finite())
    {
        return Err(AppError::Input(format!(
            "invalid grid: eps_min={eps_min}, eps_max={eps_max}, eps_step={eps_step}"
        )));
    }
    let (g, op) = load_graph(path)?;
    let grid = eps_grid(eps_min, eps_max, eps_step);
    let sweep = signature_sweep(&op, &grid)?;
    let mut comments = graph_header("sweep", path, &g);
    comments.push(format!(
        "grid: eps_min={eps_min} eps_max={eps_max} eps_step={eps_step} points={}",
        grid.len()
    ));
    let bounds = sweep.bounds.expect("graph sweeps carry bounds");
    let summary = format!(
        "transitions={} monotone_nonincreasing={} bound_combined={}",
        sweep.transitions_observed, sweep.monotone_nonincreasing, bounds.combined
    );
    let rows = sweep.records.iter().map(|r| (0usize, r));
    match csv {
        Some(file) => {
            let mut out = fs::File::create(file)?;
            write_sweep_csv(&mut out, &comments, rows)?;
            print_headers(&comments);
            println!("{summary}");
            println!("csv: {}", file.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_sweep_csv(&mut lock, &comments, rows)?;
            lock.flush()?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_conjecture(
    cfg: ExperimentConfig,
    threads: usize,
    json: Option<&Path>,
    csv: Option<&Path>,
    dump_graphs: Option<&Path>,
) -> Result<(), AppError> {
    let config_echo =
        serde_json::to_string(&cfg).expect("config serializes");
    print_headers(&[
        "command: conjecture".to_string(),
        format!("config: {config_echo}"),
        format!("threads: {threads}"),
    ]);
    let outcome = run_figure_experiment(&cfg, threads)?;
    if let Some(dir) = dump_graphs {
        fs::create_dir_all(dir)?;
        for inst in &outcome.instances {
            if let Some(text) = &inst.graph_text {
                fs::write(dir.join(format!("instance_{:03}.txt", inst.index)), text)?;
            }
        }
    }
    if let Some(file) = csv {
        let mut out = fs::File::create(file)?;
        outcome.write_csv(&mut out)?;
    }
    let verdict = &outcome.summary.conjecture;
    println!(
        "conjecture_holds: {} ({} monotone, {} violations, {} skipped)",
        verdict.holds,
        verdict.monotone_instances,
        verdict.violation_instances,
        outcome.summary.skipped.len()
    );
    match json {
        Some(file) => {
            fs::write(file, outcome.summary_json())?;
            println!("json: {}", file.display());
        }
        None => println!("{}", outcome.summary_json()),
    }
    Ok(())
}

fn cmd_dynamics(
    path: &Path,
    eps: f64,
    trials: usize,
    seed: u64,
    trace: Option<&Path>,
    dt: f64,
    t_end: f64,
) -> Result<(), AppError> {
    if trials == 0 {
        return Err(AppError::Input("trials must be at least 1".to_string()));
    }
    let (g, op) = load_graph(path)?;
    let mut headers = graph_header("dynamics", path, &g);
    headers.push(format!("eps: {eps} trials: {trials} seed: {seed}"));
    print_headers(&headers);
    let report = stability_cross_check(&g, eps, trials, seed)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    if let Some(file) = trace {
        let m = op.evaluate(eps)?;
        let q0 = unit_start(seed, g.vertex_count());
        let (flow, points) = integrate_matrix_flow_traced(&m, &q0, dt, t_end)?;
        let mut out = fs::File::create(file)?;
        write_trajectory_csv(
            &mut out,
            &[
                format!("command: dynamics trace eps={eps} dt={dt} t_end={t_end} seed={seed}"),
                format!("classification: {}", flow.classification),
            ],
            &points,
        )?;
        println!("trace: {} ({} points)", file.display(), points.len());
    }
    Ok(())
}

/// Deterministic unit vector for the traced trajectory.
fn unit_start(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn cmd_selftest() -> Result<(), AppError> {
    print_headers(&["command: selftest".to_string()]);
    let checks: Vec<(&str, fn() -> Result<String, String>)> = vec![
        ("trace identity", selftest_trace),
        ("exact vs float inertia", selftest_inertia),
        ("kernel dimension routes", selftest_kernel),
        ("determinant polynomial", selftest_detpoly),
        ("two-component criterion", selftest_two_component),
    ];
    let mut failures = Vec::new();
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("selftest {name}: ok ({detail})"),
            Err(why) => {
                println!("selftest {name}: FAILED ({why})");
                failures.push(name);
            }
        }
    }
    if failures.is_empty() {
        println!("selftest: all checks passed");
        Ok(())
    } else {
        Err(AppError::Numerical(format!(
            "selftest failures: {}",
            failures.join(", ")
        )))
    }
}

fn selftest_graphs(seed: u64, count: u64) -> impl Iterator<Item = PartitionedGraph> {
    (0..count).map(move |i| {
        let mut rng = specmix::sweep::instance_rng(seed, i);
        specmix::sweep::random_partitioned_graph(&mut rng, 5, 10).expect("n >= 5 is feasible")
    })
}

fn selftest_trace() -> Result<String, String> {
    for (i, g) in selftest_graphs(41, 20).enumerate() {
        let op = build_operator(&g);
        for eps in [0.0, 0.5, 3.0] {
            let check = op
                .trace_identity_check(eps)
                .map_err(|e| e.to_string())?;
            if !check.ok {
                return Err(format!(
                    "graph {i}, eps {eps}: trace {} vs {}",
                    check.trace, check.expected
                ));
            }
        }
    }
    Ok("20 graphs x 3 weights".to_string())
}

fn selftest_inertia() -> Result<String, String> {
    let mut compared = 0;
    for (i, g) in selftest_graphs(42, 20).enumerate() {
        let op = build_operator(&g);
        let m_int = op.evaluate_int(2);
        let m_float = op.evaluate(2.0).map_err(|e| e.to_string())?;
        let exact = exact_sign_counts(&m_int).map_err(|e| e.to_string())?;
        let float = inertia_of(&m_float, ZeroTolerance::scaled_to(&m_float))
            .map_err(|e| e.to_string())?;
        if float.n_zero != exact.n_zero {
            continue; // borderline eigenvalue: the tolerance window differs
        }
        compared += 1;
        if exact.as_triple() != float.as_triple() {
            return Err(format!("graph {i}: {:?} vs {:?}", exact, float));
        }
    }
    Ok(format!("{compared} operators at weight 2"))
}

fn selftest_kernel() -> Result<String, String> {
    for (i, g) in selftest_graphs(43, 15).enumerate() {
        let op = build_operator(&g);
        let l = op.laplacian();
        let via_rank = l.dim() - l.rank_exact();
        let via_roots = l
            .char_poly_exact()
            .map_err(|e| e.to_string())?
            .zero_root_multiplicity();
        let via_components = specmix::graph::connected_components(&g).count();
        if via_rank != via_roots || via_rank != via_components {
            return Err(format!(
                "graph {i}: rank {via_rank}, roots {via_roots}, components {via_components}"
            ));
        }
    }
    Ok("15 graphs, three routes".to_string())
}

fn selftest_detpoly() -> Result<String, String> {
    for (i, g) in selftest_graphs(44, 10).enumerate() {
        let op = build_operator(&g);
        let p = det_polynomial(&op).map_err(|e| e.to_string())?;
        for k in [1u64, 2, 4] {
            let direct = op.evaluate_int(k).det_exact();
            let from_poly = p.eval_int(&k.into());
            if direct != from_poly {
                return Err(format!("graph {i}, weight {k}: {direct} vs {from_poly}"));
            }
        }
    }
    Ok("10 graphs x 3 integer weights".to_string())
}

fn selftest_two_component() -> Result<String, String> {
    // two diffusive 4-paths, saddle edges varied across the boundary
    for (w1, w2, between, expect_pd) in [
        (1u64, 1, 1, true),
        (1, 1, 2, false),
        (2, 2, 3, true),
        (0, 3, 1, false),
    ] {
        let mut text = String::from("n 8\ng 1 2\ng 2 3\ng 3 4\ng 5 6\ng 6 7\ng 7 8\n");
        let within1 = [(1, 3), (1, 4), (2, 4)];
        let within2 = [(5, 7), (5, 8), (6, 8)];
        let across = [(4, 5), (1, 6), (2, 7)];
        for &(u, v) in within1.iter().take(w1 as usize) {
            text.push_str(&format!("h {u} {v}\n"));
        }
        for &(u, v) in within2.iter().take(w2 as usize) {
            text.push_str(&format!("h {u} {v}\n"));
        }
        for &(u, v) in across.iter().take(between as usize) {
            text.push_str(&format!("h {u} {v}\n"));
        }
        let g = PartitionedGraph::parse(&text).map_err(|e| e.to_string())?;
        let comp = specmix::graph::connected_components(&g);
        let counts = specmix::graph::h_edge_counts(&g, &comp);
        let verdict = specmix::perturbation::two_component_criterion(&counts)
            .map_err(|e| e.to_string())?;
        if verdict != expect_pd {
            return Err(format!(
                "w1={w1} w2={w2} between={between}: got {verdict}, expected {expect_pd}"
            ));
        }
    }
    Ok("4 boundary cases".to_string())
}
