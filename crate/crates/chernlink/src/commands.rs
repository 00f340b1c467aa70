//! The five run modes behind the CLI, built on the library API so they can
//! be driven from code as well. Each command prints a short human summary
//! and writes its CSV contract (plus a JSON mirror when requested) into the
//! output directory.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::invariants::{self, InvariantReport};
use crate::lattice;
use crate::model::{random_chain_spec, SeparableModel};
use crate::output::{self, PhaseDiagramRow};
use crate::quench::{self, DynamicLoopSet, LinkingSeries};

/// Where and how results are emitted.
#[derive(Debug, Clone)]
pub struct EmitOptions {
    pub out_dir: PathBuf,
    pub json: bool,
}

impl EmitOptions {
    pub fn from_config(cfg: &RunConfig) -> Self {
        EmitOptions {
            out_dir: cfg.output_dir.clone(),
            json: false,
        }
    }
}

/// Computes all static invariants for the configured model.
pub fn cmd_invariants(cfg: &RunConfig, emit: &EmitOptions) -> Result<InvariantReport> {
    let m = cfg.build_model()?;
    let report = invariants::invariant_report(&m, &cfg.invariant_settings())?;
    println!(
        "chern_lattice = {}, chern_quadrature = {:.6}, linking_static = {:.6}, gap = {:.6}",
        report.chern_lattice, report.chern_quadrature, report.linking_static, report.gap
    );
    let csv = output::csv_path(&emit.out_dir, "invariants");
    output::write_invariants_csv(&csv, &report)?;
    println!("wrote {}", csv.display());
    if emit.json {
        output::write_json(&output::json_path(&emit.out_dir, "invariants"), &report)?;
    }
    Ok(report)
}

/// Runs the two-chain quench and emits the linking-number time series,
/// plus loop snapshots at the configured times.
pub fn cmd_quench(cfg: &RunConfig, emit: &EmitOptions) -> Result<LinkingSeries> {
    let m = cfg.build_model()?;
    let opts = cfg.quench_opts();
    let t_grid = cfg.quench.t_grid();
    let series = quench::dynamic_linking(&m, cfg.quench.n, &t_grid, &opts)?;

    match series.converged_value {
        Some(v) => println!("linking series converged to {v}"),
        None => println!("linking series did not settle within the time window"),
    }
    if let Some(last) = series.samples.last() {
        match last.value {
            Some(v) => println!("L_l({}) = {v:.6}", last.t),
            None => println!("L_l({}) could not be evaluated", last.t),
        }
    }

    let csv = output::csv_path(&emit.out_dir, "quench_series");
    output::write_quench_csv(&csv, &series)?;
    println!("wrote {}", csv.display());
    if emit.json {
        output::write_json(&output::json_path(&emit.out_dir, "quench_series"), &series)?;
    }

    if !cfg.quench.snapshot_times.is_empty() {
        let snapshots: Vec<DynamicLoopSet> = cfg
            .quench
            .snapshot_times
            .iter()
            .map(|&t| quench::loop_set(&m, cfg.quench.n, t, &opts))
            .collect::<Result<_>>()?;
        let snap = output::csv_path(&emit.out_dir, "quench_loops");
        output::write_snapshots_csv(&snap, &snapshots)?;
        println!("wrote {}", snap.display());
    }
    Ok(series)
}

/// Sweeps the potential and tabulates every invariant per row. Row-level
/// physics failures land in the status column; the sweep keeps going.
pub fn cmd_sweep(cfg: &RunConfig, emit: &EmitOptions) -> Result<Vec<PhaseDiagramRow>> {
    let boundaries = cfg.sweep_boundaries();
    let s = &cfg.sweep;
    let settings = cfg.invariant_settings();
    let mut rows = Vec::new();

    let steps = ((s.mu_max - s.mu_min) / s.mu_step).round() as i64;
    for i in 0..=steps {
        let mu = s.mu_min + i as f64 * s.mu_step;
        if mu > s.mu_max + 1e-9 {
            break;
        }
        if boundaries
            .iter()
            .any(|b| (mu - b).abs() < s.exclusion_radius)
        {
            continue;
        }
        let m = cfg.build_model_with_mu(mu)?;
        rows.push(sweep_row(cfg, &m, mu, &settings));
    }

    let ok = rows.iter().filter(|r| r.status == "ok").count();
    println!("{} rows, {} ok", rows.len(), ok);
    let csv = output::csv_path(&emit.out_dir, "sweep");
    output::write_sweep_csv(&csv, &rows)?;
    println!("wrote {}", csv.display());
    if emit.json {
        output::write_json(&output::json_path(&emit.out_dir, "sweep"), &rows)?;
    }
    Ok(rows)
}

fn status_of(e: &Error) -> String {
    match e {
        Error::GapClosing { .. } => "gap_closing".into(),
        Error::GridTooCoarse { .. } => "grid_too_coarse".into(),
        Error::NearCriticalLoops { .. } => "near_critical_loops".into(),
        Error::GaplessChain { .. } => "gapless_chain".into(),
        Error::UnreliableLoop { .. } => "unreliable".into(),
        other => format!("error:{other}").replace([',', '\n'], ";"),
    }
}

fn sweep_row(
    cfg: &RunConfig,
    m: &SeparableModel,
    mu: f64,
    settings: &invariants::InvariantSettings,
) -> PhaseDiagramRow {
    let (gap, (kx, ky)) = m.refined_gap(settings.gap_grid);
    let mut row = PhaseDiagramRow {
        mu,
        chern_lattice: None,
        chern_quadrature: None,
        linking_static: None,
        linking_dynamic: None,
        gap,
        status: "ok".into(),
    };
    if gap <= settings.gap_min {
        row.status = status_of(&Error::GapClosing { kx, ky, norm: gap });
        return row;
    }

    match invariants::chern_lattice(m, settings.lattice_grid) {
        Ok(c) => row.chern_lattice = Some(c),
        Err(e) => {
            row.status = status_of(&e);
            return row;
        }
    }
    match invariants::chern_quadrature(m, settings.quadrature_grid) {
        Ok(c) => row.chern_quadrature = Some(c),
        Err(e) => {
            row.status = status_of(&e);
            return row;
        }
    }
    match invariants::linking_static(m, settings.loop_samples, settings.eps_touch) {
        Ok(l) => row.linking_static = Some(l),
        Err(e) => {
            row.status = status_of(&e);
            return row;
        }
    }
    if cfg.sweep.dynamics {
        let opts = cfg.quench_opts();
        match quench::dynamic_linking(m, cfg.quench.n, &[cfg.quench.t_max], &opts) {
            Ok(series) => match series.samples[0] {
                s if s.value.is_some() && s.reliable => row.linking_dynamic = s.value,
                s => {
                    row.linking_dynamic = s.value;
                    row.status = "unreliable".into();
                }
            },
            Err(e) => {
                row.status = status_of(&e);
            }
        }
    }
    row
}

/// Separability and spectrum checks for one model and run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub separability_qwz: f64,
    pub spectrum_qwz: f64,
    pub separability_random: f64,
    pub spectrum_random: f64,
    /// Deviation seen through a deliberately corrupted bond, if requested.
    pub corrupted_deviation: Option<f64>,
    pub pass: bool,
}

const SEPARABILITY_TOL: f64 = 1e-12;
const SPECTRUM_TOL: f64 = 1e-10;

fn spectrum_deviation(m: &SeparableModel, n: usize) -> Result<f64> {
    let (h1, h2) = lattice::extract_chains(m, n)?;
    let mut worst = 0.0f64;
    for (h, chain) in [(h1, m.chain1()), (h2, m.chain2())] {
        let eigs = h.eigenvalues();
        let mut expected: Vec<f64> = (0..n)
            .flat_map(|i| {
                let k = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                let e = chain.bloch_vector(k).norm();
                [-e, e]
            })
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in eigs.iter().zip(&expected) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// Round-trip verification: builds real-space lattices for the configured
/// model and one seeded random model, Fourier-transforms them back, and
/// checks both the Bloch blocks and the chain spectra. With `corrupt` set,
/// one coupling is deliberately perturbed by 0.1 to confirm the check can
/// fail; the report then never passes.
pub fn cmd_verify(cfg: &RunConfig, emit: &EmitOptions, corrupt: bool) -> Result<VerifyReport> {
    let n = 10;
    let m = cfg.build_model()?;
    let separability_qwz = lattice::verify_separability(&m, n)?;
    let spectrum_qwz = spectrum_deviation(&m, n)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let random = SeparableModel::new(random_chain_spec(&mut rng), random_chain_spec(&mut rng));
    let separability_random = lattice::verify_separability(&random, n)?;
    let spectrum_random = spectrum_deviation(&random, n)?;

    let corrupted_deviation = if corrupt {
        let mut chain1 = m.chain1().clone();
        let mut hops = chain1.hoppings().to_vec();
        if let Some(h) = hops.first_mut() {
            h.d.x += num_complex::Complex64::new(0.1, 0.0);
        }
        chain1 = crate::model::ChainSpec::new(chain1.onsite(), hops)?;
        let bad = lattice::build_real_space(&SeparableModel::new(chain1, m.chain2().clone()), n)?;
        Some(lattice::separability_deviation(&m, &bad, n))
    } else {
        None
    };

    let pass = separability_qwz <= SEPARABILITY_TOL
        && spectrum_qwz <= SPECTRUM_TOL
        && separability_random <= SEPARABILITY_TOL
        && spectrum_random <= SPECTRUM_TOL
        && corrupted_deviation.is_none();

    println!("separability (configured model): {separability_qwz:.3e}");
    println!("chain spectra (configured model): {spectrum_qwz:.3e}");
    println!(
        "separability (random model, seed {}): {separability_random:.3e}",
        cfg.seed
    );
    println!("chain spectra (random model): {spectrum_random:.3e}");
    if let Some(dev) = corrupted_deviation {
        println!("corrupted-bond deviation: {dev:.3e} (expected >= 0.01)");
    }
    println!("verify: {}", if pass { "ok" } else { "FAILED" });

    let report = VerifyReport {
        separability_qwz,
        spectrum_qwz,
        separability_random,
        spectrum_random,
        corrupted_deviation,
        pass,
    };
    if emit.json {
        output::write_json(&output::json_path(&emit.out_dir, "verify"), &report)?;
    }
    Ok(report)
}

/// Dumps the static chain loops for plotting.
pub fn cmd_loops(cfg: &RunConfig, emit: &EmitOptions) -> Result<()> {
    let m = cfg.build_model()?;
    let loop1 = m.chain1().sample_loop(cfg.grid.loop_samples)?;
    let loop2 = m.chain2().sample_loop(cfg.grid.loop_samples)?;
    let csv = output::csv_path(&emit.out_dir, "loops");
    output::write_loops_csv(&csv, &[(1, &loop1), (2, &loop2)])?;
    println!("wrote {}", csv.display());
    if emit.json {
        #[derive(serde::Serialize)]
        struct LoopPoint {
            alpha: u8,
            k: f64,
            x: f64,
            y: f64,
            z: f64,
        }
        let rows: Vec<LoopPoint> = [(1u8, &loop1), (2u8, &loop2)]
            .iter()
            .flat_map(|(alpha, l)| {
                l.ks().iter().zip(l.points()).map(|(&k, p)| LoopPoint {
                    alpha: *alpha,
                    k,
                    x: p.x,
                    y: p.y,
                    z: p.z,
                })
            })
            .collect();
        output::write_json(&output::json_path(&emit.out_dir, "loops"), &rows)?;
    }
    Ok(())
}

/// Exit-code contract: 0 success, 1 physics/precondition failure, 2 config
/// error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;

    fn tmp_emit() -> (tempfile::TempDir, EmitOptions) {
        let dir = tempfile::tempdir().unwrap();
        let emit = EmitOptions {
            out_dir: dir.path().to_path_buf(),
            json: false,
        };
        (dir, emit)
    }

    #[test]
    fn invariants_command_reports_the_reference_point() {
        let cfg = parse_config_str("").unwrap();
        let (_dir, emit) = tmp_emit();
        let report = cmd_invariants(&cfg, &emit).unwrap();
        assert_eq!(report.chern_lattice, 1);
        assert!(emit.out_dir.join("invariants.csv").exists());
    }

    #[test]
    fn invariants_command_rejects_the_boundary() {
        let cfg = parse_config_str("model.mu = 1\n").unwrap();
        let (_dir, emit) = tmp_emit();
        let err = cmd_invariants(&cfg, &emit).unwrap_err();
        assert!(matches!(err, Error::GapClosing { .. }));
        assert_eq!(exit_code(&err), 1);
    }

    #[test]
    fn small_sweep_realizes_the_phase_pattern() {
        let cfg =
            parse_config_str("sweep.mu_min = -1.5\nsweep.mu_max = 1.5\nsweep.mu_step = 0.5\n")
                .unwrap();
        let (_dir, emit) = tmp_emit();
        let rows = cmd_sweep(&cfg, &emit).unwrap();
        let mus: Vec<f64> = rows.iter().map(|r| r.mu).collect();
        assert_eq!(mus, vec![-1.5, -0.5, 0.0, 0.5, 1.5]);
        let cherns: Vec<i64> = rows.iter().map(|r| r.chern_lattice.unwrap()).collect();
        assert_eq!(cherns, vec![-1, 0, 0, 0, 1]);
        assert!(rows.iter().all(|r| r.status == "ok"));
    }

    #[test]
    fn unexcluded_boundary_row_fails_gracefully() {
        let cfg = parse_config_str(
            "sweep.mu_min = 0.5\nsweep.mu_max = 1.5\nsweep.mu_step = 0.5\n\
             sweep.exclusion_radius = 0\n",
        )
        .unwrap();
        let (_dir, emit) = tmp_emit();
        let rows = cmd_sweep(&cfg, &emit).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].status, "gap_closing");
        assert!(rows[1].chern_lattice.is_none());
        assert_eq!(rows[0].status, "ok");
        assert_eq!(rows[2].status, "ok");
    }

    #[test]
    fn single_point_sweep_rounds_every_column_to_one() {
        let cfg = parse_config_str(
            "sweep.mu_min = 2\nsweep.mu_max = 2\nsweep.mu_step = 1\n\
             sweep.dynamics = true\nquench.mode = analytic\n",
        )
        .unwrap();
        let (_dir, emit) = tmp_emit();
        let rows = cmd_sweep(&cfg, &emit).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.status, "ok");
        assert!(row.gap > cfg.tol.gap_min);
        assert_eq!(row.chern_lattice, Some(1));
        assert_eq!(row.chern_quadrature.unwrap().round() as i64, 1);
        assert_eq!(row.linking_static.unwrap().round() as i64, 1);
        assert_eq!(row.linking_dynamic.unwrap().round() as i64, 1);
    }

    #[test]
    fn verify_command_passes_and_corruption_is_detected() {
        let cfg = parse_config_str("seed = 3\n").unwrap();
        let (_dir, emit) = tmp_emit();
        let report = cmd_verify(&cfg, &emit, false).unwrap();
        assert!(report.pass);
        assert!(report.separability_qwz <= SEPARABILITY_TOL);

        let report = cmd_verify(&cfg, &emit, true).unwrap();
        assert!(!report.pass);
        assert!(report.corrupted_deviation.unwrap() >= 0.01);
    }

    #[test]
    fn analytic_quench_command_matches_static_linking() {
        let cfg =
            parse_config_str("quench.mode = analytic\nquench.t_points = 4\nquench.t_max = 100\n")
                .unwrap();
        let (_dir, emit) = tmp_emit();
        let series = cmd_quench(&cfg, &emit).unwrap();
        let m = cfg.build_model().unwrap();
        let l_static = invariants::linking_static(&m, cfg.quench.n, cfg.tol.eps_touch).unwrap();
        for s in &series.samples {
            assert!((s.value.unwrap() - l_static).abs() < 5e-2);
        }
        assert!(emit.out_dir.join("quench_series.csv").exists());
    }

    #[test]
    fn loops_command_writes_ordered_rows() {
        let cfg = parse_config_str("grid.loop_samples = 16\n").unwrap();
        let (_dir, emit) = tmp_emit();
        cmd_loops(&cfg, &emit).unwrap();
        let text = std::fs::read_to_string(emit.out_dir.join("loops.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "alpha,k,x,y,z");
        assert_eq!(lines.len(), 1 + 2 * 16);
        assert!(lines[1].starts_with("1,"));
        assert!(lines[17].starts_with("2,"));
    }
}
