//! Deterministic result emission: CSV contracts plus optional JSON mirrors.
//!
//! Every float is printed with 12 significant digits in scientific
//! notation, so identical runs produce byte-identical files on any
//! platform. CSV schemas are fixed:
//!
//! - loops:        `alpha,k,x,y,z` (rows ordered by alpha, then k)
//! - quench:       `T,L_l,flag` with flag in {ok, unreliable}
//! - snapshots:    `T,alpha,k,x,y,z`
//! - invariants:   `chern_quadrature,chern_lattice,linking_static,grid_used,gap`
//! - sweep:        `mu,chern_lattice,chern_quadrature,linking_static,linking_dynamic,gap,status`

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom3::LoopSamples;
use crate::invariants::InvariantReport;
use crate::quench::{DynamicLoopSet, LinkingSeries};

/// 12 significant digits, scientific notation, no locale dependence.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    let x = if x == 0.0 { 0.0 } else { x }; // normalize -0.0
    format!("{x:.11e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(BufWriter::new(file))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes a serializable value as pretty JSON next to a CSV.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e.into(),
    })?;
    writeln!(w).map_err(io_err(path))?;
    Ok(())
}

pub fn write_loops_csv(path: &Path, loops: &[(u8, &LoopSamples)]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "alpha,k,x,y,z").map_err(io_err(path))?;
    for (alpha, samples) in loops {
        for (&k, p) in samples.ks().iter().zip(samples.points()) {
            writeln!(
                w,
                "{alpha},{},{},{},{}",
                fmt_float(k),
                fmt_float(p.x),
                fmt_float(p.y),
                fmt_float(p.z)
            )
            .map_err(io_err(path))?;
        }
    }
    Ok(())
}

pub fn write_quench_csv(path: &Path, series: &LinkingSeries) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "T,L_l,flag").map_err(io_err(path))?;
    for s in &series.samples {
        let value = s.value.map_or_else(|| "nan".into(), fmt_float);
        let flag = if s.reliable { "ok" } else { "unreliable" };
        writeln!(w, "{},{value},{flag}", fmt_float(s.t)).map_err(io_err(path))?;
    }
    Ok(())
}

pub fn write_snapshots_csv(path: &Path, snapshots: &[DynamicLoopSet]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "T,alpha,k,x,y,z").map_err(io_err(path))?;
    for set in snapshots {
        for (alpha, dl) in [(1u8, &set.loop1), (2u8, &set.loop2)] {
            for (&k, p) in dl.samples.ks().iter().zip(dl.samples.points()) {
                writeln!(
                    w,
                    "{},{alpha},{},{},{},{}",
                    fmt_float(set.t),
                    fmt_float(k),
                    fmt_float(p.x),
                    fmt_float(p.y),
                    fmt_float(p.z)
                )
                .map_err(io_err(path))?;
            }
        }
    }
    Ok(())
}

pub fn write_invariants_csv(path: &Path, report: &InvariantReport) -> Result<()> {
    let mut w = create(path)?;
    writeln!(
        w,
        "chern_quadrature,chern_lattice,linking_static,grid_used,gap"
    )
    .map_err(io_err(path))?;
    writeln!(
        w,
        "{},{},{},{},{}",
        fmt_float(report.chern_quadrature),
        report.chern_lattice,
        fmt_float(report.linking_static),
        report.grid_used,
        fmt_float(report.gap)
    )
    .map_err(io_err(path))?;
    Ok(())
}

/// One potential value of a sweep with every invariant side by side.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseDiagramRow {
    pub mu: f64,
    pub chern_lattice: Option<i64>,
    pub chern_quadrature: Option<f64>,
    pub linking_static: Option<f64>,
    pub linking_dynamic: Option<f64>,
    pub gap: f64,
    pub status: String,
}

pub fn write_sweep_csv(path: &Path, rows: &[PhaseDiagramRow]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(
        w,
        "mu,chern_lattice,chern_quadrature,linking_static,linking_dynamic,gap,status"
    )
    .map_err(io_err(path))?;
    for r in rows {
        let int_col = r
            .chern_lattice
            .map_or_else(|| "nan".into(), |v| v.to_string());
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".into(), fmt_float);
        writeln!(
            w,
            "{},{int_col},{},{},{},{},{}",
            fmt_float(r.mu),
            opt(r.chern_quadrature),
            opt(r.linking_static),
            opt(r.linking_dynamic),
            fmt_float(r.gap),
            r.status
        )
        .map_err(io_err(path))?;
    }
    Ok(())
}

/// `<dir>/<stem>.csv` and `<dir>/<stem>.json`.
pub fn csv_path(dir: &Path, stem: &str) -> PathBuf {
    dir.join(format!("{stem}.csv"))
}

pub fn json_path(dir: &Path, stem: &str) -> PathBuf {
    dir.join(format!("{stem}.json"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_twelve_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.00000000000e0");
        assert_eq!(fmt_float(-0.0), "0.00000000000e0");
        assert_eq!(fmt_float(0.25), "2.50000000000e-1");
        assert_eq!(fmt_float(f64::NAN), "nan");
        assert_eq!(fmt_float(123456.789), "1.23456789000e5");
    }
}
