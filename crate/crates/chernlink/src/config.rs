//! Run configuration: a flat `section.key = value` text format.
//!
//! One file defines an experiment. Keys are checked against a fixed
//! registry (unknown keys are errors, not warnings), duplicates are
//! rejected, and every numeric field is range-checked, so a config that
//! parses runs the same way everywhere. Lines starting with `#` and blank
//! lines are ignored.
//!
//! Model selection: either the QWZ preset through `model.*` keys, or a
//! generic separable model through repeated `hop.x.<n>` / `hop.y.<n>` lines
//! (three complex components each: `re1,im1,re2,im2,re3,im3`) plus
//! `onsite.x` / `onsite.y`. Mixing the two families is an error.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use thiserror::Error;

use crate::geom3::Vec3;
use crate::model::{CVec3, ChainSpec, Hopping, QwzParams, SeparableModel};
use crate::quench::QuenchMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {msg}")]
    BadValue {
        line: usize,
        key: String,
        msg: String,
    },
    #[error("`{key}` out of range: {msg}")]
    OutOfRange { key: String, msg: String },
    #[error("conflicting keys: {0}")]
    Conflict(String),
}

/// Grid sizes for the invariant pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub quadrature: usize,
    pub lattice: usize,
    pub loop_samples: usize,
    pub gap: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            quadrature: 200,
            lattice: 50,
            loop_samples: 400,
            gap: 256,
        }
    }
}

/// Quench simulation controls.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchConfig {
    pub n: usize,
    pub dt: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub mode: QuenchMode,
    pub snapshot_times: Vec<f64>,
}

impl Default for QuenchConfig {
    fn default() -> Self {
        QuenchConfig {
            n: 50,
            dt: 0.01,
            t_min: 1.0,
            t_max: 200.0,
            t_points: 64,
            mode: QuenchMode::Dynamics,
            snapshot_times: Vec::new(),
        }
    }
}

impl QuenchConfig {
    /// Log-spaced observation times in `[t_min, t_max]`, endpoints exact.
    pub fn t_grid(&self) -> Vec<f64> {
        if self.t_points == 1 {
            return vec![self.t_max];
        }
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let mut grid: Vec<f64> = (0..self.t_points)
            .map(|i| (a + (b - a) * i as f64 / (self.t_points - 1) as f64).exp())
            .collect();
        grid[0] = self.t_min;
        *grid.last_mut().unwrap() = self.t_max;
        grid
    }
}

/// Potential sweep controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_step: f64,
    pub exclusion_radius: f64,
    pub dynamics: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            mu_min: -6.0,
            mu_max: 6.0,
            mu_step: 0.25,
            exclusion_radius: 0.1,
            dynamics: false,
        }
    }
}

/// Numerical thresholds shared across modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Loop pairs closer than this are near-critical.
    pub eps_touch: f64,
    /// Momenta with an averaged Bloch vector shorter than this are dropped.
    pub eps_n: f64,
    /// A refined gap below this counts as a gap closing.
    pub gap_min: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_touch: 1e-6,
            eps_n: 1e-3,
            gap_min: 1e-3,
        }
    }
}

/// Which model the run uses.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Qwz(QwzParams),
    Generic {
        onsite1: Vec3,
        onsite2: Vec3,
        hops1: Vec<Hopping>,
        hops2: Vec<Hopping>,
    },
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Qwz(QwzParams::default())
    }
}

/// Everything a command needs; parsed from one config file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub grid: GridConfig,
    pub quench: QuenchConfig,
    pub sweep: SweepConfig,
    pub tol: Tolerances,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelSpec::default(),
            grid: GridConfig::default(),
            quench: QuenchConfig::default(),
            sweep: SweepConfig::default(),
            tol: Tolerances::default(),
            seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn build_model(&self) -> Result<SeparableModel, crate::Error> {
        match &self.model {
            ModelSpec::Qwz(p) => Ok(SeparableModel::qwz(*p)),
            ModelSpec::Generic {
                onsite1,
                onsite2,
                hops1,
                hops2,
            } => {
                let chain1 = ChainSpec::new(*onsite1, hops1.clone())?;
                let chain2 = ChainSpec::new(*onsite2, hops2.clone())?;
                Ok(SeparableModel::new(chain1, chain2))
            }
        }
    }

    /// The sweep model at potential `mu`: for the QWZ preset this sets
    /// `mu1 = mu` (keeping the configured `mu2`); for a generic model it
    /// shifts the chain-1 on-site z component to `mu`.
    pub fn build_model_with_mu(&self, mu: f64) -> Result<SeparableModel, crate::Error> {
        match &self.model {
            ModelSpec::Qwz(p) => Ok(SeparableModel::qwz(QwzParams { mu1: mu, ..*p })),
            ModelSpec::Generic {
                onsite1,
                onsite2,
                hops1,
                hops2,
            } => {
                let shifted = Vec3::new(onsite1.x, onsite1.y, mu);
                let chain1 = ChainSpec::new(shifted, hops1.clone())?;
                let chain2 = ChainSpec::new(*onsite2, hops2.clone())?;
                Ok(SeparableModel::new(chain1, chain2))
            }
        }
    }

    /// Gap-closing potentials to skip in a sweep. Known analytically for
    /// the QWZ preset; generic models rely on the per-row gap check.
    pub fn sweep_boundaries(&self) -> Vec<f64> {
        match &self.model {
            ModelSpec::Qwz(p) => p.phase_boundaries(),
            ModelSpec::Generic { .. } => Vec::new(),
        }
    }

    pub fn invariant_settings(&self) -> crate::invariants::InvariantSettings {
        crate::invariants::InvariantSettings {
            quadrature_grid: self.grid.quadrature,
            lattice_grid: self.grid.lattice,
            loop_samples: self.grid.loop_samples,
            gap_grid: self.grid.gap,
            eps_touch: self.tol.eps_touch,
            gap_min: self.tol.gap_min,
        }
    }

    pub fn quench_opts(&self) -> crate::quench::QuenchOpts {
        crate::quench::QuenchOpts {
            dt: self.quench.dt,
            eps_n: self.tol.eps_n,
            eps_touch: self.tol.eps_touch,
            mode: self.quench.mode,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("tol.eps_touch", self.tol.eps_touch),
            ("tol.eps_n", self.tol.eps_n),
            ("tol.gap_min", self.tol.gap_min),
            ("quench.dt", self.quench.dt),
            ("quench.t_min", self.quench.t_min),
            ("quench.t_max", self.quench.t_max),
            ("sweep.mu_step", self.sweep.mu_step),
        ];
        for (key, v) in positive {
            if v <= 0.0 || v.is_nan() {
                return Err(ConfigError::OutOfRange {
                    key: key.into(),
                    msg: format!("must be > 0, got {v}"),
                });
            }
        }
        if self.sweep.exclusion_radius < 0.0 {
            return Err(ConfigError::OutOfRange {
                key: "sweep.exclusion_radius".into(),
                msg: "must be >= 0".into(),
            });
        }
        if self.quench.t_max < self.quench.t_min {
            return Err(ConfigError::OutOfRange {
                key: "quench.t_max".into(),
                msg: "must be >= quench.t_min".into(),
            });
        }
        let min16 = [
            ("quench.n", self.quench.n),
            ("grid.quadrature", self.grid.quadrature),
            ("grid.lattice", self.grid.lattice),
            ("grid.loop_samples", self.grid.loop_samples),
            ("grid.gap", self.grid.gap),
        ];
        for (key, v) in min16 {
            if v < 16 {
                return Err(ConfigError::OutOfRange {
                    key: key.into(),
                    msg: format!("must be >= 16, got {v}"),
                });
            }
        }
        if self.quench.t_points == 0 {
            return Err(ConfigError::OutOfRange {
                key: "quench.t_points".into(),
                msg: "must be >= 1".into(),
            });
        }
        for &t in &self.quench.snapshot_times {
            if t <= 0.0 || t.is_nan() {
                return Err(ConfigError::OutOfRange {
                    key: "quench.snapshot_times".into(),
                    msg: format!("times must be > 0, got {t}"),
                });
            }
        }
        Ok(())
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError::BadValue {
        line,
        key: key.into(),
        msg: format!("expected a number, got `{v}`"),
    })
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError::BadValue {
        line,
        key: key.into(),
        msg: format!("expected a non-negative integer, got `{v}`"),
    })
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(ConfigError::BadValue {
            line,
            key: key.into(),
            msg: format!("expected true or false, got `{other}`"),
        }),
    }
}

fn parse_f64_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|s| parse_f64(line, key, s)).collect()
}

fn parse_vec3(line: usize, key: &str, v: &str) -> Result<Vec3, ConfigError> {
    let parts = parse_f64_list(line, key, v)?;
    if parts.len() != 3 {
        return Err(ConfigError::BadValue {
            line,
            key: key.into(),
            msg: format!("expected 3 components, got {}", parts.len()),
        });
    }
    Ok(Vec3::new(parts[0], parts[1], parts[2]))
}

fn parse_cvec3(line: usize, key: &str, v: &str) -> Result<CVec3, ConfigError> {
    let parts = parse_f64_list(line, key, v)?;
    if parts.len() != 6 {
        return Err(ConfigError::BadValue {
            line,
            key: key.into(),
            msg: format!(
                "expected 6 components (re,im per axis), got {}",
                parts.len()
            ),
        });
    }
    Ok(CVec3::new(
        Complex64::new(parts[0], parts[1]),
        Complex64::new(parts[2], parts[3]),
        Complex64::new(parts[4], parts[5]),
    ))
}

#[derive(Default)]
struct ModelKeys {
    preset: QwzParams,
    mu: Option<f64>,
    preset_used: bool,
    onsite1: Option<Vec3>,
    onsite2: Option<Vec3>,
    hops1: Vec<Hopping>,
    hops2: Vec<Hopping>,
}

impl ModelKeys {
    fn generic_used(&self) -> bool {
        self.onsite1.is_some()
            || self.onsite2.is_some()
            || !self.hops1.is_empty()
            || !self.hops2.is_empty()
    }

    fn resolve(mut self) -> Result<ModelSpec, ConfigError> {
        if self.preset_used && self.generic_used() {
            return Err(ConfigError::Conflict(
                "model.* preset keys cannot be combined with hop.*/onsite.* keys".into(),
            ));
        }
        if self.generic_used() {
            if self.mu.is_some() {
                return Err(ConfigError::Conflict(
                    "model.mu applies to the preset, not to generic chains".into(),
                ));
            }
            for (axis, hops) in [("x", &self.hops1), ("y", &self.hops2)] {
                if let Err(e) = ChainSpec::new(Vec3::ZERO, hops.clone()) {
                    return Err(ConfigError::OutOfRange {
                        key: format!("hop.{axis}.*"),
                        msg: e.to_string(),
                    });
                }
            }
            return Ok(ModelSpec::Generic {
                onsite1: self.onsite1.unwrap_or(Vec3::ZERO),
                onsite2: self.onsite2.unwrap_or(Vec3::ZERO),
                hops1: self.hops1,
                hops2: self.hops2,
            });
        }
        if let Some(mu) = self.mu {
            self.preset.mu1 = mu;
            self.preset.mu2 = 0.0;
        }
        Ok(ModelSpec::Qwz(self.preset))
    }
}

/// Parses a config file; an empty file yields the all-defaults [`RunConfig`].
pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut model = ModelKeys::default();
    let mut seen: HashSet<String> = HashSet::new();
    let mut mu1_set = false;
    let mut mu2_set = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Malformed {
                line,
                text: body.into(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.into(),
            });
        }

        match key {
            "model.mu" => model.mu = Some(parse_f64(line, key, value)?),
            "model.mu1" => {
                model.preset.mu1 = parse_f64(line, key, value)?;
                model.preset_used = true;
                mu1_set = true;
            }
            "model.mu2" => {
                model.preset.mu2 = parse_f64(line, key, value)?;
                model.preset_used = true;
                mu2_set = true;
            }
            "model.lambda_x" => {
                model.preset.lambda_x = parse_f64(line, key, value)?;
                model.preset_used = true;
            }
            "model.lambda_y" => {
                model.preset.lambda_y = parse_f64(line, key, value)?;
                model.preset_used = true;
            }
            "model.rho_x" => {
                model.preset.rho_x = parse_f64(line, key, value)?;
                model.preset_used = true;
            }
            "model.rho_y" => {
                model.preset.rho_y = parse_f64(line, key, value)?;
                model.preset_used = true;
            }
            "onsite.x" => model.onsite1 = Some(parse_vec3(line, key, value)?),
            "onsite.y" => model.onsite2 = Some(parse_vec3(line, key, value)?),
            _ if key.starts_with("hop.x.") || key.starts_with("hop.y.") => {
                let range = parse_usize(line, key, &key["hop.x.".len()..])?;
                let d = parse_cvec3(line, key, value)?;
                let hop = Hopping { range, d };
                if key.starts_with("hop.x.") {
                    model.hops1.push(hop);
                } else {
                    model.hops2.push(hop);
                }
            }
            "grid.quadrature" => cfg.grid.quadrature = parse_usize(line, key, value)?,
            "grid.lattice" => cfg.grid.lattice = parse_usize(line, key, value)?,
            "grid.loop_samples" => cfg.grid.loop_samples = parse_usize(line, key, value)?,
            "grid.gap" => cfg.grid.gap = parse_usize(line, key, value)?,
            "quench.n" => cfg.quench.n = parse_usize(line, key, value)?,
            "quench.dt" => cfg.quench.dt = parse_f64(line, key, value)?,
            "quench.t_min" => cfg.quench.t_min = parse_f64(line, key, value)?,
            "quench.t_max" => cfg.quench.t_max = parse_f64(line, key, value)?,
            "quench.t_points" => cfg.quench.t_points = parse_usize(line, key, value)?,
            "quench.mode" => {
                cfg.quench.mode = match value {
                    "dynamics" => QuenchMode::Dynamics,
                    "analytic" => QuenchMode::Analytic,
                    other => {
                        return Err(ConfigError::BadValue {
                            line,
                            key: key.into(),
                            msg: format!("expected dynamics or analytic, got `{other}`"),
                        })
                    }
                }
            }
            "quench.snapshot_times" => {
                cfg.quench.snapshot_times = parse_f64_list(line, key, value)?
            }
            "sweep.mu_min" => cfg.sweep.mu_min = parse_f64(line, key, value)?,
            "sweep.mu_max" => cfg.sweep.mu_max = parse_f64(line, key, value)?,
            "sweep.mu_step" => cfg.sweep.mu_step = parse_f64(line, key, value)?,
            "sweep.exclusion_radius" => cfg.sweep.exclusion_radius = parse_f64(line, key, value)?,
            "sweep.dynamics" => cfg.sweep.dynamics = parse_bool(line, key, value)?,
            "tol.eps_touch" => cfg.tol.eps_touch = parse_f64(line, key, value)?,
            "tol.eps_n" => cfg.tol.eps_n = parse_f64(line, key, value)?,
            "tol.gap_min" => cfg.tol.gap_min = parse_f64(line, key, value)?,
            "seed" => {
                cfg.seed = value.parse().map_err(|_| ConfigError::BadValue {
                    line,
                    key: key.into(),
                    msg: format!("expected an unsigned integer, got `{value}`"),
                })?
            }
            "output.dir" => cfg.output_dir = PathBuf::from(value),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.into(),
                })
            }
        }
    }

    if model.mu.is_some() && (mu1_set || mu2_set) {
        return Err(ConfigError::Conflict(
            "model.mu cannot be combined with model.mu1/model.mu2".into(),
        ));
    }
    cfg.model = model.resolve()?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_all_defaults() {
        let cfg = parse_config_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.model, ModelSpec::Qwz(QwzParams::default()));
    }

    #[test]
    fn reference_parameters_parse_to_preset() {
        let cfg = parse_config_str(
            "model.mu1 = 2\nmodel.mu2 = 0\nmodel.lambda_x = 3\nmodel.lambda_y = 1\n\
             model.rho_x = 3\nmodel.rho_y = 2\n",
        )
        .unwrap();
        assert_eq!(cfg.model, ModelSpec::Qwz(QwzParams::default()));
    }

    #[test]
    fn mu_shortcut_sets_the_split() {
        let cfg = parse_config_str("model.mu = -3\n").unwrap();
        match cfg.model {
            ModelSpec::Qwz(p) => {
                assert_eq!(p.mu1, -3.0);
                assert_eq!(p.mu2, 0.0);
            }
            _ => panic!("expected preset"),
        }
    }

    #[test]
    fn negative_dt_is_a_range_error() {
        let err = parse_config_str("quench.dt = -1\n").unwrap_err();
        match err {
            ConfigError::OutOfRange { key, .. } => assert_eq!(key, "quench.dt"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_config_str("\n\nmodel.lamda_x = 3\n").unwrap_err();
        match err {
            ConfigError::UnknownKey { line, key } => {
                assert_eq!(line, 3);
                assert_eq!(key, "model.lamda_x");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line() {
        let err = parse_config_str("model.mu1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Malformed { line: 1, .. }));
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let err = parse_config_str("seed = 1\nseed = 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { line: 2, .. }));
    }

    #[test]
    fn generic_chains_parse() {
        let cfg = parse_config_str(
            "onsite.x = 0,0,2\nonsite.y = 0,0,0\n\
             hop.x.1 = 0,-1.5,0,0,1.5,0\nhop.y.1 = 0,0,0,0.5,-1,0\n",
        )
        .unwrap();
        // this generic description is exactly the reference QWZ model
        let m = cfg.build_model().unwrap();
        let reference = SeparableModel::qwz(QwzParams::default());
        for k in crate::geom3::half_step_grid(16) {
            assert!(
                m.chain1()
                    .bloch_vector(k)
                    .distance(reference.chain1().bloch_vector(k))
                    < 1e-14
            );
            assert!(
                m.chain2()
                    .bloch_vector(k)
                    .distance(reference.chain2().bloch_vector(k))
                    < 1e-14
            );
        }
    }

    #[test]
    fn preset_and_generic_keys_conflict() {
        let err = parse_config_str("model.mu1 = 1\nonsite.x = 0,0,1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Conflict(_)));
    }

    #[test]
    fn comments_and_spacing_are_ignored() {
        let cfg = parse_config_str("# comment\n  seed   =  7  \n\n").unwrap();
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn t_grid_is_log_spaced_and_inclusive() {
        let q = QuenchConfig {
            t_min: 1.0,
            t_max: 200.0,
            t_points: 64,
            ..Default::default()
        };
        let grid = q.t_grid();
        assert_eq!(grid.len(), 64);
        assert_eq!(grid[0], 1.0);
        assert_eq!(grid[63], 200.0);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }
}
