//! Acceptance suite: one test per criterion, each printing a single
//! PASS line (a failure panics with the matching FAIL text). Every
//! ensemble is pinned to a fixed seed so the suite is deterministic
//! across platforms and thread counts.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha8Rng;

use specmix::detpoly::{c_factor, c_factor_terms, product_expansion_check};
use specmix::exact::{exact_sign_counts, sturm_count, Bound, SymMatrixZ};
use specmix::graph::{connected_components, h_edge_counts, EdgeClass, PartitionedGraph};
use specmix::numeric::{inertia_of, sym_eigenvalues, ZeroTolerance};
use specmix::operator::{build_operator, MixedOperator};
use specmix::perturbation::{first_order_matrix, two_component_criterion};
use specmix::sweep::{instance_rng, random_partitioned_graph, ExperimentConfig};
use specmix::dynamics::stability_cross_check;

fn report_pass(name: &str, detail: &str, started: Instant, budget_secs: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed <= budget_secs,
        "{name}: FAIL — ran {elapsed:.2}s, budget {budget_secs}s"
    );
    println!("{name}: PASS ({detail}, {elapsed:.2}s)");
}

fn uni(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    debug_assert!(lo <= hi);
    let range = (hi - lo + 1) as u64;
    let threshold = range * (u64::MAX / range);
    loop {
        let x = rng.next_u64();
        if x < threshold {
            return lo + (x % range) as usize;
        }
    }
}

fn worker_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}

/// Random graph whose diffusive part has exactly `r_target` connected
/// components (random trees plus extra in-block edges), with saddle edges
/// sprinkled anywhere.
fn stratified_graph(rng: &mut ChaCha8Rng, r_target: usize) -> PartitionedGraph {
    let sizes: Vec<usize> = (0..r_target).map(|_| uni(rng, 3, 5)).collect();
    let n: usize = sizes.iter().sum();
    let mut g = PartitionedGraph::new(n).unwrap();
    let mut base = 0;
    for &s in &sizes {
        for j in 1..s {
            let parent = base + uni(rng, 0, j - 1);
            g.add_edge(base + j, parent, EdgeClass::Diffusive).unwrap();
        }
        for _ in 0..uni(rng, 0, s) {
            let u = base + uni(rng, 0, s - 1);
            let v = base + uni(rng, 0, s - 1);
            if u != v && g.class_of(u, v).is_none() {
                g.add_edge(u, v, EdgeClass::Diffusive).unwrap();
            }
        }
        base += s;
    }
    for _ in 0..uni(rng, n / 2, 2 * n) {
        let u = uni(rng, 0, n - 1);
        let v = uni(rng, 0, n - 1);
        if u != v && g.class_of(u, v).is_none() {
            g.add_edge(u, v, EdgeClass::Saddle).unwrap();
        }
    }
    g
}

#[test]
fn criterion_01_trace_identity() {
    let started = Instant::now();
    let eps_values: Vec<f64> = (1..=20).map(|k| 0.5 * k as f64).collect();
    for i in 0..200 {
        let mut rng = instance_rng(101, i);
        let g = random_partitioned_graph(&mut rng, 5, 12).unwrap();
        let op = build_operator(&g);
        for &eps in &eps_values {
            let check = op.trace_identity_check(eps).unwrap();
            assert!(
                check.ok,
                "criterion 01 trace-identity: FAIL — graph {i}, eps {eps}: trace {} vs {}",
                check.trace, check.expected
            );
        }
    }
    report_pass(
        "criterion 01 trace-identity",
        "200 graphs x 20 weights",
        started,
        5.0,
    );
}

#[test]
fn criterion_02_kernel_components_identity() {
    let started = Instant::now();
    for i in 0..100 {
        let mut rng = instance_rng(202, i);
        let g = random_partitioned_graph(&mut rng, 5, 10).unwrap();
        let op = build_operator(&g);
        let comp = connected_components(&g);
        let p = op.laplacian().char_poly_exact().unwrap();
        assert_eq!(
            p.zero_root_multiplicity(),
            comp.count(),
            "criterion 02 kernel-components: FAIL — graph {i}: kernel multiplicity vs components"
        );
        let rows = op.laplacian().rows();
        for c in 0..comp.count() {
            let members = comp.members(c);
            for (idx, row) in rows.iter().enumerate() {
                let sum: BigInt = members.iter().map(|&j| row[j].clone()).sum();
                assert!(
                    sum.is_zero(),
                    "criterion 02 kernel-components: FAIL — graph {i}: L * indicator({c}) row {idx} nonzero"
                );
            }
        }
    }
    report_pass(
        "criterion 02 kernel-components",
        "100 graphs, exact",
        started,
        10.0,
    );
}

#[test]
fn criterion_03_first_order_richardson() {
    let started = Instant::now();
    // residual against the slope prediction must shrink quadratically:
    // halving is checked as a ratio near 4 when doubling the weight
    let ratio_ok = |small: f64, big: f64| -> bool {
        big.abs() < 1e-12 || (small != 0.0 && (3.0..=5.0).contains(&(big / small)))
    };
    for i in 0..50 {
        let mut rng = instance_rng(303, i);
        let r_target = 1 + (i as usize % 3);
        let g = stratified_graph(&mut rng, r_target);
        let op = build_operator(&g);
        let comp = connected_components(&g);
        assert_eq!(comp.count(), r_target);
        let theta = first_order_matrix(&h_edge_counts(&g, &comp), &comp)
            .theta()
            .unwrap();
        let residuals: Vec<Vec<f64>> = [1e-4, 2e-4, 4e-4]
            .iter()
            .map(|&eps| {
                let values = sym_eigenvalues(&op.evaluate(eps).unwrap()).unwrap();
                (0..r_target)
                    .map(|k| values[k] - eps * theta[k])
                    .collect()
            })
            .collect();
        for k in 0..r_target {
            let (e1, e2, e4) = (residuals[0][k], residuals[1][k], residuals[2][k]);
            assert!(
                ratio_ok(e1, e2) && ratio_ok(e2, e4),
                "criterion 03 first-order: FAIL — graph {i} slope {k}: residuals {e1:e} {e2:e} {e4:e}"
            );
        }
    }
    report_pass(
        "criterion 03 first-order",
        "50 graphs, r in 1..=3, Richardson ratios",
        started,
        30.0,
    );
}

#[test]
fn criterion_04_one_component_slope() {
    let started = Instant::now();
    let eps = 1e-6;
    for i in 0..50 {
        let mut rng = instance_rng(404, i);
        let g = loop {
            let candidate = random_partitioned_graph(&mut rng, 5, 10).unwrap();
            if connected_components(&candidate).count() == 1
                && candidate.edge_count(EdgeClass::Saddle) > 0
            {
                break candidate;
            }
        };
        let op = build_operator(&g);
        let slope =
            2.0 * g.edge_count(EdgeClass::Saddle) as f64 / g.vertex_count() as f64;
        let mu_min = sym_eigenvalues(&op.evaluate(eps).unwrap()).unwrap()[0];
        let err = (mu_min / eps - slope).abs();
        assert!(
            err <= 1e-3,
            "criterion 04 one-component-slope: FAIL — graph {i}: slope error {err:e}"
        );
    }
    report_pass(
        "criterion 04 one-component-slope",
        "50 connected graphs at eps = 1e-6",
        started,
        10.0,
    );
}

fn pick_saddle(
    rng: &mut ChaCha8Rng,
    mut pool: Vec<(usize, usize)>,
    count: usize,
    g: &mut PartitionedGraph,
) {
    for k in 0..count.min(pool.len()) {
        let j = uni(rng, k, pool.len() - 1);
        pool.swap(k, j);
        let (u, v) = pool[k];
        g.add_edge(u, v, EdgeClass::Saddle).unwrap();
    }
}

/// Two star-shaped diffusive components with saddle edges among leaves
/// (inside) and across the components (between).
fn two_star_instance(rng: &mut ChaCha8Rng) -> PartitionedGraph {
    let n1 = uni(rng, 3, 6);
    let n2 = uni(rng, 3, 6);
    let mut g = PartitionedGraph::new(n1 + n2).unwrap();
    for leaf in 1..n1 {
        g.add_edge(0, leaf, EdgeClass::Diffusive).unwrap();
    }
    for leaf in 1..n2 {
        g.add_edge(n1, n1 + leaf, EdgeClass::Diffusive).unwrap();
    }
    let leaves1: Vec<usize> = (1..n1).collect();
    let leaves2: Vec<usize> = (n1 + 1..n1 + n2).collect();
    let within1: Vec<(usize, usize)> = leaves1
        .iter()
        .flat_map(|&u| leaves1.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
        .collect();
    let within2: Vec<(usize, usize)> = leaves2
        .iter()
        .flat_map(|&u| leaves2.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
        .collect();
    let across: Vec<(usize, usize)> = (0..n1)
        .flat_map(|u| (n1..n1 + n2).map(move |v| (u, v)))
        .collect();
    let w1 = uni(rng, 0, 4);
    let w2 = uni(rng, 0, 4);
    let between = uni(rng, 0, 4);
    pick_saddle(rng, within1, w1, &mut g);
    pick_saddle(rng, within2, w2, &mut g);
    pick_saddle(rng, across, between, &mut g);
    g
}

#[test]
fn criterion_05_two_component_criterion_matches_spectrum() {
    let started = Instant::now();
    let mut accepted = 0usize;
    let mut attempt = 0u64;
    while accepted < 100 {
        let mut rng = instance_rng(505, attempt);
        attempt += 1;
        let g = two_star_instance(&mut rng);
        let comp = connected_components(&g);
        let counts = h_edge_counts(&g, &comp);
        let (n1, n2) = (comp.sizes()[0] as f64, comp.sizes()[1] as f64);
        let a = 2.0 * counts.within[0] as f64 / n1;
        let b = 2.0 * counts.within[1] as f64 / n2;
        let c2 = (counts.between[0][1] as f64).powi(2) / (n1 * n2);
        if (c2 - a * b).abs() < 0.1 * (a * b).max(1.0) {
            continue; // not enough margin for a clean sign
        }
        accepted += 1;
        let predicted_pd = two_component_criterion(&counts).unwrap();

        // sign of the smallest eigenvalue of M(1e-4), decided exactly:
        // scaling by 10^4 gives the integer matrix 10^4 L + A with the
        // same eigenvalue signs
        let op = build_operator(&g);
        let l = op.laplacian().rows();
        let adj = op.adjacency().rows();
        let n = g.vertex_count();
        let scale = BigInt::from(10_000);
        let rows: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| &l[i][j] * &scale + &adj[i][j]).collect())
            .collect();
        let exact = exact_sign_counts(&SymMatrixZ::from_rows(rows)).unwrap();
        let exact_pd = exact.n_neg == 0 && exact.n_zero == 0;
        assert_eq!(
            predicted_pd, exact_pd,
            "criterion 05 two-component: FAIL — instance {attempt}: criterion {predicted_pd} vs exact inertia {:?}",
            exact.as_triple()
        );

        // the float route must see the same sign unless it is flagged
        let m = op.evaluate(1e-4).unwrap();
        let float = inertia_of(&m, ZeroTolerance::scaled_to(&m)).unwrap();
        if float.n_zero == 0 {
            assert_eq!(
                float.n_neg == 0,
                exact_pd,
                "criterion 05 two-component: FAIL — instance {attempt}: float inertia disagrees"
            );
        }
    }
    report_pass(
        "criterion 05 two-component",
        "100 margined instances vs exact sign at eps = 1e-4",
        started,
        20.0,
    );
}

/// All permutations of 0..n with parity, via Heap's algorithm.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1i64;
    let mut c = vec![0usize; n];
    out.push((perm.clone(), sign));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Random graph over all sizes 2..=6 where every pair is independently
/// diffusive, saddle, or absent.
fn small_dense_graph(rng: &mut ChaCha8Rng) -> PartitionedGraph {
    let n = uni(rng, 2, 6);
    let mut g = PartitionedGraph::new(n).unwrap();
    for u in 0..n {
        for v in u + 1..n {
            match uni(rng, 0, 2) {
                0 => g.add_edge(u, v, EdgeClass::Diffusive).unwrap(),
                1 => g.add_edge(u, v, EdgeClass::Saddle).unwrap(),
                _ => {}
            }
        }
    }
    g
}

#[test]
fn criterion_06_determinant_polynomial_brute_force() {
    let started = Instant::now();
    for i in 0..200 {
        let mut rng = instance_rng(606, i);
        let g = small_dense_graph(&mut rng);
        let n = g.vertex_count();
        let op = build_operator(&g);
        let p = specmix::detpoly::det_polynomial(&op).unwrap();

        // brute force: det(L + eps A) as the signed permutation sum of
        // entry-wise binomials, expanded through the subset machinery
        let l = op.laplacian().rows();
        let adj = op.adjacency().rows();
        let mut brute = vec![BigRational::zero(); n + 1];
        'perm: for (perm, sign) in signed_permutations(n) {
            let mut xs = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for (row, &col) in perm.iter().enumerate() {
                let x = &l[row][col];
                let y = &adj[row][col];
                if x.is_zero() && y.is_zero() {
                    continue 'perm;
                }
                xs.push(BigRational::from_integer(x.clone()));
                ys.push(BigRational::from_integer(y.clone()));
            }
            let signed = BigRational::from_integer(BigInt::from(sign));
            for (r, slot) in brute.iter_mut().enumerate() {
                *slot += &signed * c_factor(&xs, &ys, r).unwrap();
            }
        }

        for (r, value) in brute.iter().enumerate() {
            assert_eq!(
                &BigRational::from_integer(p.coeff(r)),
                value,
                "criterion 06 det-polynomial: FAIL — graph {i}, power {r}"
            );
        }
        assert!(p.coeff(0).is_zero());
        if p.degree() == Some(n) {
            assert_eq!(p.coeff(n), op.adjacency().det_exact());
        }
    }
    report_pass(
        "criterion 06 det-polynomial",
        "200 graphs n <= 6 vs permutation sum, exact",
        started,
        60.0,
    );
}

fn assert_transitions_within_bounds(cfg: &ExperimentConfig, label: &str) {
    let outcome = specmix::sweep::run_figure_experiment(cfg, worker_threads()).unwrap();
    assert!(
        outcome.summary.skipped.is_empty(),
        "{label}: FAIL — instances were skipped"
    );
    for inst in &outcome.summary.instances {
        assert_eq!(
            inst.within_bounds,
            Some(true),
            "{label}: FAIL — instance {} exceeded its bound: {} transitions vs {:?}",
            inst.index,
            inst.transitions_observed,
            inst.bounds.map(|b| b.combined)
        );
    }
}

#[test]
fn criterion_07_transition_bounds_protocol() {
    let started = Instant::now();
    let fine = ExperimentConfig::figure_bounds(707);
    assert_transitions_within_bounds(&fine, "criterion 07 transition-bounds");
    let fine_elapsed = started.elapsed().as_secs_f64();
    assert!(
        fine_elapsed <= 600.0,
        "criterion 07 transition-bounds: FAIL — default grid took {fine_elapsed:.1}s"
    );

    let coarse_started = Instant::now();
    let coarse = ExperimentConfig {
        eps_step: 0.1,
        ..ExperimentConfig::figure_bounds(707)
    };
    assert_transitions_within_bounds(&coarse, "criterion 07 transition-bounds");
    let coarse_elapsed = coarse_started.elapsed().as_secs_f64();
    assert!(
        coarse_elapsed <= 60.0,
        "criterion 07 transition-bounds: FAIL — coarse grid took {coarse_elapsed:.1}s"
    );
    println!(
        "criterion 07 transition-bounds: PASS (50 graphs, fine {fine_elapsed:.1}s, coarse {coarse_elapsed:.1}s)"
    );
}

#[test]
fn criterion_08_conjecture_protocols() {
    let started = Instant::now();
    for (cfg, label) in [
        (ExperimentConfig::figure_graphs(808), "graphs"),
        (ExperimentConfig::figure_matrix_pairs(808), "matrix pairs"),
    ] {
        let outcome = specmix::sweep::run_figure_experiment(&cfg, worker_threads()).unwrap();
        assert!(outcome.summary.skipped.is_empty());
        assert!(
            outcome.summary.conjecture.holds,
            "criterion 08 conjecture: FAIL — {label}: signature increased; {} counterexample dump(s): {}",
            outcome.summary.violations.len(),
            serde_json::to_string(&outcome.summary.violations).unwrap()
        );
    }
    report_pass(
        "criterion 08 conjecture",
        "16 graphs + 16 matrix pairs, default grid, zero increases",
        started,
        600.0,
    );
}

#[test]
fn criterion_09_product_expansion() {
    let started = Instant::now();
    for i in 0..100 {
        let mut rng = instance_rng(909, i);
        let n = uni(&mut rng, 1, 8);
        let draw_ints = |rng: &mut ChaCha8Rng| -> Vec<BigRational> {
            (0..n)
                .map(|_| BigRational::from_integer(BigInt::from(uni(rng, 0, 18) as i64 - 9)))
                .collect()
        };
        let xs = draw_ints(&mut rng);
        let ys = draw_ints(&mut rng);
        let eps_values: Vec<BigRational> = (1..=3)
            .map(|k| BigRational::from_integer(BigInt::from(k)))
            .collect();
        assert!(
            product_expansion_check(&xs, &ys, &eps_values).unwrap(),
            "criterion 09 product-expansion: FAIL — instance {i}"
        );
    }
    for n in 1..=8usize {
        let total: u64 = (0..=n).map(|r| c_factor_terms(n, r).unwrap()).sum();
        assert_eq!(
            total,
            1 << n,
            "criterion 09 product-expansion: FAIL — term counts for n = {n}"
        );
    }
    report_pass(
        "criterion 09 product-expansion",
        "100 integer instances n <= 8, eps in {1,2,3}, exact",
        started,
        5.0,
    );
}

#[test]
fn criterion_10_dynamics_consistency() {
    let started = Instant::now();
    let mut checked = 0usize;
    let mut near_singular = 0usize;
    for i in 0..50 {
        let mut rng = instance_rng(1010, i);
        let g = random_partitioned_graph(&mut rng, 5, 10).unwrap();
        for eps in [0.01, 10.0] {
            let report = stability_cross_check(&g, eps, 3, 1010 + i).unwrap();
            assert!(
                report.energy_monotone_all,
                "criterion 10 dynamics: FAIL — graph {i}, eps {eps}: energy rose"
            );
            if report.near_singular {
                near_singular += 1;
                continue;
            }
            checked += 1;
            assert!(
                report.all_agree,
                "criterion 10 dynamics: FAIL — graph {i}, eps {eps}: {:?} expected, {}/{} trials agreed",
                report.prediction, report.agreements, report.trials
            );
        }
    }
    report_pass(
        "criterion 10 dynamics",
        &format!("50 graphs x 2 weights, {checked} checked, {near_singular} near-singular skipped"),
        started,
        120.0,
    );
}

#[test]
fn criterion_11_exact_vs_float_inertia() {
    let started = Instant::now();
    let mut compared = 0usize;
    let mut skipped = 0usize;
    for i in 0..20 {
        let mut rng = instance_rng(1111, i);
        let g = random_partitioned_graph(&mut rng, 5, 10).unwrap();
        let op: MixedOperator = build_operator(&g);
        for k in 1..=5u64 {
            let m_int = op.evaluate_int(k);
            let m_float = op.evaluate(k as f64).unwrap();
            let tau = ZeroTolerance::scaled_to(&m_float).tau;

            // skip when an exact eigenvalue falls inside (0, 10 tau]
            let p = m_int.char_poly_exact().unwrap();
            let window = BigRational::from_float(10.0 * tau).unwrap();
            let in_window = sturm_count(
                &p,
                &Bound::Finite(BigRational::zero()),
                &Bound::Finite(window),
            )
            .unwrap();
            if in_window > 0 {
                skipped += 1;
                continue;
            }
            compared += 1;
            let exact = exact_sign_counts(&m_int).unwrap();
            let float = inertia_of(&m_float, ZeroTolerance::new(tau)).unwrap();
            assert_eq!(
                exact.as_triple(),
                float.as_triple(),
                "criterion 11 exact-vs-float: FAIL — graph {i}, weight {k}"
            );
        }
    }
    assert_eq!(compared + skipped, 100);
    report_pass(
        "criterion 11 exact-vs-float",
        &format!("{compared} matrices compared, {skipped} skipped by window"),
        started,
        60.0,
    );
}
