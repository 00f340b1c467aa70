//! Acceptance suite: every headline claim of the crate, one test per
//! criterion, each printing a PASS/FAIL line (run with `-- --nocapture` to
//! see them all).

use chernlink::config::{parse_config_str, QuenchConfig};
use chernlink::geom3::half_step_grid;
use chernlink::invariants::{chern_lattice, chern_quadrature, linking_static};
use chernlink::lattice;
use chernlink::model::{random_chain_spec, random_gapped_model};
use chernlink::quench::{
    average_bloch, dynamic_linking, estimate_frequency, evolve_bloch, evolve_state_stepwise,
    steady_average, BlochTrajectory, QuenchMode, QuenchOpts, INITIAL_BLOCH,
};
use chernlink::{QwzParams, SeparableModel, Vec3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn conclude(name: &str, started: std::time::Instant, failures: Vec<String>) {
    let elapsed = started.elapsed();
    if failures.is_empty() {
        println!("acceptance {name}: PASS ({elapsed:.2?})");
    } else {
        println!("acceptance {name}: FAIL ({elapsed:.2?})");
        for f in &failures {
            println!("  - {f}");
        }
        panic!(
            "acceptance {name} failed with {} finding(s)",
            failures.len()
        );
    }
}

macro_rules! check {
    ($failures:expr, $cond:expr, $($msg:tt)*) => {{
        let ok: bool = $cond;
        if !ok {
            $failures.push(format!($($msg)*));
        }
    }};
}

fn qwz(mu: f64) -> SeparableModel {
    SeparableModel::qwz(QwzParams::with_mu(mu))
}

fn random_field(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if v.norm() > 1e-3 {
            let target = rng.gen_range(lo..hi);
            return v * (target / v.norm());
        }
    }
}

/// Criterion 1: Sweep mu in [-6, 6], step 0.25, boundaries +-1 and +-5 excluded by
/// radius 0.1: the lattice invariant realizes the piecewise pattern
/// 0 / -1 / 0 / +1 / 0 with exact integer equality.
#[test]
fn acceptance_1_phase_diagram() {
    let t0 = std::time::Instant::now();
    let mut failures = Vec::new();
    let cfg = parse_config_str("").unwrap();
    let emit = chernlink::commands::EmitOptions {
        out_dir: tempfile::tempdir().unwrap().path().to_path_buf(),
        json: false,
    };
    let rows = chernlink::commands::cmd_sweep(&cfg, &emit).unwrap();

    check!(
        failures,
        rows.len() == 45,
        "expected 45 rows, got {}",
        rows.len()
    );
    for row in &rows {
        let mu = row.mu;
        let expected = if mu.abs() < 1.0 || mu.abs() > 5.0 {
            0
        } else if mu > 0.0 {
            1
        } else {
            -1
        };
        check!(
            failures,
            row.status == "ok",
            "mu = {mu}: status {}",
            row.status
        );
        check!(
            failures,
            row.chern_lattice == Some(expected),
            "mu = {mu}: chern_lattice {:?} != {expected}",
            row.chern_lattice
        );
    }
    conclude("1 (phase diagram, exact integers)", t0, failures);
}

/// Criterion 2: At mu in {2, 0, -3} all three pipelines round to {1, 0, -1}, with
/// quadrature within 1e-2 and static linking within 5e-2 of the integer.
#[test]
fn acceptance_2_reference_anchors() {
    let t0 = std::time::Instant::now();
    let mut failures = Vec::new();
    for (mu, c) in [(2.0, 1i64), (0.0, 0), (-3.0, -1)] {
        let m = qwz(mu);
        let lattice = chern_lattice(&m, 50).unwrap();
        let quad = chern_quadrature(&m, 200).unwrap();
        let link = linking_static(&m, 400, 1e-6).unwrap();
        check!(
            failures,
            lattice == c,
            "mu = {mu}: lattice {lattice} != {c}"
        );
        check!(
            failures,
            (quad - c as f64).abs() < 1e-2,
            "mu = {mu}: |quadrature - {c}| = {:.3e}",
            (quad - c as f64).abs()
        );
        check!(
            failures,
            (link - c as f64).abs() < 5e-2,
            "mu = {mu}: |linking - {c}| = {:.3e}",
            (link - c as f64).abs()
        );
    }
    conclude("2 (reference anchors, three pipelines)", t0, failures);
}

/// Criterion 3: For 20 seeded random gapped models (gap > 0.1) the static linking
/// number rounds to the lattice Chern number, every time.
#[test]
fn acceptance_3_linking_equals_chern() {
    let t0 = std::time::Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(20240814);
    let mut classes = std::collections::BTreeMap::new();
    for i in 0..20 {
        let m = random_gapped_model(&mut rng, 0.1);
        let lattice = chern_lattice(&m, 50).unwrap();
        let link = linking_static(&m, 400, 1e-6).unwrap();
        *classes.entry(lattice).or_insert(0usize) += 1;
        check!(
            failures,
            link.round() as i64 == lattice,
            "model {i}: linking {link:.4} does not round to {lattice}"
        );
    }
    // the seed realizes all three classes; keep that visible
    check!(
        failures,
        classes.len() >= 3,
        "class distribution {classes:?} lacks variety"
    );
    conclude("3 (linking = Chern on randomized models)", t0, failures);
}

/// Criterion 4: Dynamics mode, N = 50, dt = 0.01, mu1 in {-3, 2}: the linking series
/// over T in [1, 200] is a damped oscillation (no window exceeds the
/// previous window's peak by more than 0.05) and L(200) is within 0.3 of
/// the Chern number and rounds to it.
#[test]
fn acceptance_4_quench_series() {
    let t0 = std::time::Instant::now();
    let mut failures = Vec::new();
    let t_grid = QuenchConfig::default().t_grid();
    for (mu, c) in [(2.0, 1.0f64), (-3.0, -1.0)] {
        let m = qwz(mu);
        let series = dynamic_linking(&m, 50, &t_grid, &QuenchOpts::default()).unwrap();

        let errors: Vec<f64> = series
            .samples
            .iter()
            .filter(|s| s.reliable)
            .filter_map(|s| s.value.map(|v| (v - c).abs()))
            .collect();
        check!(
            failures,
            errors.len() >= t_grid.len() * 9 / 10,
            "mu = {mu}: only {} of {} entries reliable",
            errors.len(),
            t_grid.len()
        );

        // decreasing oscillation envelope over windows of 8 samples
        let window = 8;
        let mut prev_peak = f64::INFINITY;
        for chunk in errors.chunks(window) {
            let peak = chunk.iter().copied().fold(0.0f64, f64::max);
            for &e in chunk {
                check!(
                    failures,
                    e <= prev_peak + 0.05,
                    "mu = {mu}: error {e:.3} exceeds previous window peak {prev_peak:.3} + 0.05"
                );
            }
            prev_peak = peak;
        }

        let last = series.samples.last().unwrap();
        check!(failures, last.reliable, "mu = {mu}: final entry unreliable");
        match last.value {
            Some(v) => {
                check!(
                    failures,
                    (v - c).abs() < 0.3,
                    "mu = {mu}: |L(200) - {c}| = {:.3}",
                    (v - c).abs()
                );
                check!(
                    failures,
                    v.round() == c,
                    "mu = {mu}: L(200) = {v:.3} rounds away from {c}"
                );
            }
            None => failures.push(format!("mu = {mu}: L(200) missing")),
        }
        check!(
            failures,
            series.converged_value == Some(c),
            "mu = {mu}: converged_value {:?} != {c}",
            series.converged_value
        );
    }
    conclude(
        "4 (damped quench series reaches the Chern number)",
        t0,
        failures,
    );
}

/// Criterion 5: Steady-average law: |average(T) - (-r_hat (r_hat.z))| <= 2 / (2|r|T)
/// for 50 random fields with |r_z|/|r| > 0.05, at T in {10, 100, 1000},
/// with no slack beyond the analytic bound.
#[test]
fn acceptance_5_steady_average_law() {
    let t0 = std::time::Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tested = 0;
    while tested < 50 {
        let r = random_field(&mut rng, 0.2, 6.0);
        if r.z.abs() / r.norm() <= 0.05 {
            continue;
        }
        tested += 1;
        let steady = steady_average(r).unwrap();
        for t in [10.0, 100.0, 1000.0] {
            let err = average_bloch(r, t).distance(steady);
            let bound = 2.0 / (2.0 * r.norm() * t);
            check!(
                failures,
                err <= bound,
                "r = {r:?}, T = {t}: {err:.3e} > bound {bound:.3e}"
            );
        }
    }
    conclude("5 (steady-average transient bound)", t0, failures);
}

/// Criterion 6: Frequency law: the estimated precession frequency is within 1% of
/// 2|r| for 50 random fields with |r| in [0.1, 10] at dt = 0.005.
#[test]
fn acceptance_6_frequency_law() {
    let t0 = std::time::Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut tested = 0;
    while tested < 50 {
        let r = random_field(&mut rng, 0.1, 10.0);
        if r.z.abs() / r.norm() > 0.999 {
            continue; // initial state aligned with the axis: no signal
        }
        tested += 1;
        let omega_true = 2.0 * r.norm();
        let t = 3.5 * 2.0 * std::f64::consts::PI / omega_true;
        let traj = BlochTrajectory::simulate(r, t, 0.005);
        match estimate_frequency(&traj) {
            Ok(omega) => check!(
                failures,
                (omega - omega_true).abs() / omega_true < 0.01,
                "r = {r:?}: omega {omega:.4} vs {omega_true:.4}"
            ),
            Err(e) => failures.push(format!("r = {r:?}: {e}")),
        }
    }
    conclude(
        "6 (frequency recovers the bandwidth within 1%)",
        t0,
        failures,
    );
}

/// Criterion 7: Separability round trip at N = 10 for the QWZ preset and 10 random
/// models: Fourier deviation <= 1e-12 and chain spectra match the band
/// norms to 1e-10.
#[test]
fn acceptance_7_separability_round_trip() {
    let t0 = std::time::Instant::now();
    let mut failures = Vec::new();
    let n = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut models = vec![SeparableModel::qwz(QwzParams::default())];
    for _ in 0..10 {
        models.push(SeparableModel::new(
            random_chain_spec(&mut rng),
            random_chain_spec(&mut rng),
        ));
    }
    for (i, m) in models.iter().enumerate() {
        let dev = lattice::verify_separability(m, n).unwrap();
        check!(
            failures,
            dev <= 1e-12,
            "model {i}: separability deviation {dev:.3e}"
        );

        let (h1, h2) = lattice::extract_chains(m, n).unwrap();
        for (h, chain, name) in [(h1, m.chain1(), "H1"), (h2, m.chain2(), "H2")] {
            let eigs = h.eigenvalues();
            let mut expected: Vec<f64> = (0..n)
                .flat_map(|j| {
                    let k = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                    let e = chain.bloch_vector(k).norm();
                    [-e, e]
                })
                .collect();
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in eigs.iter().zip(&expected) {
                check!(
                    failures,
                    (a - b).abs() <= 1e-10,
                    "model {i} {name}: |{a} - {b}|"
                );
            }
        }
    }
    conclude(
        "7 (separability round trip and chain spectra)",
        t0,
        failures,
    );
}

/// Criterion 8: Analytic-mode dynamic linking equals static linking within 5e-2 at
/// all three reference potentials.
#[test]
fn acceptance_8_analytic_mode_consistency() {
    let t0 = std::time::Instant::now();
    let mut failures = Vec::new();
    let opts = QuenchOpts {
        mode: QuenchMode::Analytic,
        ..Default::default()
    };
    for mu in [2.0, 0.0, -3.0] {
        let m = qwz(mu);
        let series = dynamic_linking(&m, 50, &[1e9], &opts).unwrap();
        let dynamic = series.samples[0].value.unwrap();
        let static_link = linking_static(&m, 50, 1e-6).unwrap();
        check!(
            failures,
            (dynamic - static_link).abs() < 5e-2,
            "mu = {mu}: analytic {dynamic:.4} vs static {static_link:.4}"
        );
    }
    conclude("8 (analytic quench equals static linking)", t0, failures);
}

/// Criterion 9: Closed-form and stepwise evolutions agree to 1e-9 over T = 10 for
/// 100 random fields.
#[test]
fn acceptance_9_evolution_cross_check() {
    let t0 = std::time::Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..100 {
        let r = random_field(&mut rng, 0.05, 5.0);
        let traj = evolve_state_stepwise(r, 10.0, 0.01);
        let mut worst = 0.0f64;
        for (j, t) in traj.times().enumerate() {
            worst = worst.max(traj.samples[j].distance(evolve_bloch(r, INITIAL_BLOCH, t)));
        }
        check!(
            failures,
            worst < 1e-9,
            "field {i} (r = {r:?}): max deviation {worst:.3e}"
        );
    }
    conclude("9 (closed-form vs stepwise evolution)", t0, failures);
}

/// Sanity checks that the acceptance grid momenta avoid the exactly
/// critical points the suite depends on (documented grid convention).
#[test]
fn acceptance_grid_convention() {
    let t0 = std::time::Instant::now();
    let mut failures = Vec::new();
    for k in half_step_grid(50) {
        check!(
            failures,
            k.sin().abs() > 1e-12,
            "half-step grid hits k = 0 or pi"
        );
    }
    conclude("0 (grid convention)", t0, failures);
}
