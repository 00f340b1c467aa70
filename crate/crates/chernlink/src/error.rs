use thiserror::Error;

use crate::config::ConfigError;

/// Physics and contract errors raised by the library.
///
/// Gap closings, near-critical loops and degenerate precession are reported
/// as errors rather than propagated as NaN: every one of them marks a point
/// where the underlying invariant is genuinely ill-defined.
#[derive(Debug, Error)]
pub enum Error {
    #[error("axis must be a unit vector, |axis| = {norm}")]
    NonUnitAxis { norm: f64 },

    #[error("a closed loop needs at least 3 points, got {0}")]
    DegenerateLoop(usize),

    #[error("loop contains a non-finite coordinate at index {0}")]
    NonFiniteLoop(usize),

    #[error("near-critical loops: min pairwise distance {min_distance:.3e} <= {eps_touch:.3e}")]
    NearCriticalLoops { min_distance: f64, eps_touch: f64 },

    #[error("hopping range {range} out of bounds (1..={max_range}) or repeated")]
    InvalidHopping { range: usize, max_range: usize },

    #[error("lattice size {n} too small for coupling range {max_range} (need n > 2*max_range)")]
    LatticeTooSmall { n: usize, max_range: usize },

    #[error("gap closes at (kx, ky) = ({kx:.6}, {ky:.6}): |r| = {norm:.3e}")]
    GapClosing { kx: f64, ky: f64, norm: f64 },

    #[error("grid too coarse: plaquette Berry flux {flux:.4} rad at plaquette ({i}, {j})")]
    GridTooCoarse { flux: f64, i: usize, j: usize },

    #[error("no precession: {0}")]
    NoPrecession(String),

    #[error("degenerate precession sign: {0}")]
    DegenerateSign(String),

    #[error("chain {chain} is gapless on the momentum grid: |r({k:.6})| = {norm:.3e}")]
    GaplessChain { chain: u8, k: f64, norm: f64 },

    #[error("dynamic loop unreliable: {dropped} of {total} momenta dropped as near-critical")]
    UnreliableLoop { dropped: usize, total: usize },

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
