//! Quench dynamics of the two chains and the time-dependent linking number.
//!
//! Protocol: every momentum starts in the `sigma_z = -1` eigenstate, the
//! Bloch vector `n(0) = (0, 0, -1)`, and evolves under the chain Hamiltonian
//! `h(k) = r(k) . sigma`, which makes `n` precess about `r_hat` at angular
//! frequency `omega = 2|r|`:
//!
//! ```text
//! dn/dt = 2 r x n
//! ```
//!
//! Three observables per momentum reconstruct the chain loop without ever
//! measuring `r` directly: the precession frequency `omega`, the running
//! time average `n_bar(k, T)`, and the precession sense `rho`. They combine
//! into the dynamic loop point
//!
//! ```text
//! l(k, T) = rho * omega * n_bar(k, T) / (2 |n_bar(k, T)|)
//! ```
//!
//! As `T -> infinity` the average settles at `n_bar = -r_hat (r_hat . z)`,
//! `omega = 2|r|` and `rho = sign(r_hat . n(0))`, which makes `l(k, T)`
//! converge to `r(k)` exactly; the linking number of the two dynamic loops
//! therefore converges to the static linking number, i.e. to the Chern
//! number. Momenta where `r_hat . z ~ 0` (critical momenta) leave `n_bar`
//! pinned near zero with no usable direction; they are dropped and reported
//! rather than interpolated over.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom3::{gauss_linking, half_step_grid, rotate_unit_axis, LoopSamples, Vec3};
use crate::model::{ChainSpec, SeparableModel};

/// The quench starts from the south pole of the Bloch sphere.
pub const INITIAL_BLOCH: Vec3 = Vec3 {
    x: 0.0,
    y: 0.0,
    z: -1.0,
};

/// The precession sense is meaningful only when the averaged Bloch vector
/// is appreciably aligned with the precession axis; below this cosine the
/// transient dominates and the momentum is treated as degenerate.
const MIN_AXIS_ALIGNMENT: f64 = 0.1;

/// How the per-momentum observables are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuenchMode {
    /// Everything estimated from simulated trajectories, the way an
    /// experiment would: frequency from zero crossings, sense from the
    /// averaged angular momentum, finite-time average.
    Dynamics,
    /// Steady-state shortcuts: `n_bar(infinity)`, `omega = 2|r|`,
    /// `rho = sign(r_hat . n0)`.
    Analytic,
}

/// Knobs shared by the dynamic-loop pipeline.
#[derive(Debug, Clone, Copy)]
pub struct QuenchOpts {
    pub dt: f64,
    /// Momenta with `|n_bar| < eps_n` are dropped as near-critical.
    pub eps_n: f64,
    /// Passed through to the Gauss linking integral.
    pub eps_touch: f64,
    pub mode: QuenchMode,
}

impl Default for QuenchOpts {
    fn default() -> Self {
        QuenchOpts {
            dt: 0.01,
            eps_n: 1e-3,
            eps_touch: 1e-6,
            mode: QuenchMode::Dynamics,
        }
    }
}

/// Closed-form precession: decompose `n0` about `r_hat`, rotate the
/// transverse part by `2|r|t`. `|r| = 0` returns `n0` unchanged.
pub fn evolve_bloch(r: Vec3, n0: Vec3, t: f64) -> Vec3 {
    debug_assert!((n0.norm() - 1.0).abs() < 1e-9, "n0 must be a unit vector");
    match r.normalized() {
        Some(axis) => rotate_unit_axis(n0, axis, 2.0 * r.norm() * t),
        None => n0,
    }
}

/// A sampled Bloch-vector trajectory at fixed momentum: `n(i dt)` for
/// `i = 0..=steps`, starting from the south pole.
#[derive(Debug, Clone)]
pub struct BlochTrajectory {
    pub k: Option<f64>,
    pub r: Vec3,
    pub dt: f64,
    pub samples: Vec<Vec3>,
}

impl BlochTrajectory {
    /// Simulates the quench with the closed-form propagator.
    pub fn simulate(r: Vec3, t_max: f64, dt: f64) -> Self {
        assert!(dt > 0.0 && t_max > 0.0);
        let steps = (t_max / dt).round().max(1.0) as usize;
        let samples = (0..=steps)
            .map(|i| evolve_bloch(r, INITIAL_BLOCH, i as f64 * dt))
            .collect();
        BlochTrajectory {
            k: None,
            r,
            dt,
            samples,
        }
    }

    pub fn t_max(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |i| i as f64 * self.dt)
    }

    /// Trapezoid time average of `n(t)` over the full window.
    pub fn time_average(&self) -> Vec3 {
        trapezoid_average(&self.samples)
    }

    /// Trapezoid time average of `n x dn/dt` (central differences): the
    /// averaged angular momentum of the precession, pointing along the
    /// precession axis.
    pub fn average_cross_velocity(&self) -> Vec3 {
        let n = self.samples.len();
        if n < 3 {
            return Vec3::ZERO;
        }
        let v: Vec<Vec3> = (0..n)
            .map(|i| {
                let (a, b, scale) = if i == 0 {
                    (0, 1, 1.0)
                } else if i == n - 1 {
                    (n - 2, n - 1, 1.0)
                } else {
                    (i - 1, i + 1, 0.5)
                };
                let deriv = (self.samples[b] - self.samples[a]) * (scale / self.dt);
                self.samples[i].cross(deriv)
            })
            .collect();
        trapezoid_average(&v)
    }
}

fn trapezoid_average(samples: &[Vec3]) -> Vec3 {
    let n = samples.len();
    if n == 1 {
        return samples[0];
    }
    let mut acc = (samples[0] + samples[n - 1]) * 0.5;
    for s in &samples[1..n - 1] {
        acc = acc + *s;
    }
    acc * (1.0 / (n - 1) as f64)
}

/// Step-by-step state evolution with the exact per-step 2x2 propagator
/// `U(dt) = cos(|r| dt) - i sin(|r| dt) r_hat . sigma`; the independent
/// cross-check for [`evolve_bloch`].
pub fn evolve_state_stepwise(r: Vec3, t_max: f64, dt: f64) -> BlochTrajectory {
    assert!(dt > 0.0 && t_max > 0.0);
    let steps = (t_max / dt).round().max(1.0) as usize;
    let norm = r.norm();
    let (u00, u01, u10, u11);
    if norm > 0.0 {
        let (rx, ry, rz) = (r.x / norm, r.y / norm, r.z / norm);
        let (sin, cos) = (norm * dt).sin_cos();
        let i = Complex64::new(0.0, 1.0);
        u00 = Complex64::new(cos, 0.0) - i * sin * rz;
        u01 = -i * sin * Complex64::new(rx, -ry);
        u10 = -i * sin * Complex64::new(rx, ry);
        u11 = Complex64::new(cos, 0.0) + i * sin * rz;
    } else {
        u00 = Complex64::new(1.0, 0.0);
        u01 = Complex64::new(0.0, 0.0);
        u10 = Complex64::new(0.0, 0.0);
        u11 = Complex64::new(1.0, 0.0);
    }

    // sigma_z = -1 eigenstate
    let mut psi = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let mut samples = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        let a = psi[0].conj() * psi[1];
        samples.push(Vec3::new(
            2.0 * a.re,
            2.0 * a.im,
            psi[0].norm_sqr() - psi[1].norm_sqr(),
        ));
        psi = [u00 * psi[0] + u01 * psi[1], u10 * psi[0] + u11 * psi[1]];
    }
    BlochTrajectory {
        k: None,
        r,
        dt,
        samples,
    }
}

/// Closed-form running average of the Bloch vector,
///
/// ```text
/// n_bar(T) = n_par + sin(wT)/(wT) n_perp + (1 - cos(wT))/(wT) (r_hat x n_perp)
/// ```
///
/// with `w = 2|r|`, `n_par = r_hat (r_hat . n0)`, `n_perp = n0 - n_par` and
/// `n0` the south pole. For `|r| = 0` there is no precession and the
/// average is `n0` itself.
pub fn average_bloch(r: Vec3, t: f64) -> Vec3 {
    assert!(t > 0.0, "averaging window must be positive");
    let Some(axis) = r.normalized() else {
        return INITIAL_BLOCH;
    };
    let omega = 2.0 * r.norm();
    let n_par = axis * axis.dot(INITIAL_BLOCH);
    let n_perp = INITIAL_BLOCH - n_par;
    let wt = omega * t;
    let half = 0.5 * wt;
    // 1 - cos(x) = 2 sin^2(x/2), stable for small x
    let sinc = wt.sin() / wt;
    let versine = 2.0 * half.sin() * half.sin() / wt;
    n_par + n_perp * sinc + axis.cross(n_perp) * versine
}

/// The `T -> infinity` limit of the average, `-r_hat (r_hat . z)`.
pub fn steady_average(r: Vec3) -> Result<Vec3> {
    let axis = r
        .normalized()
        .ok_or_else(|| Error::NoPrecession("|r| = 0: precession axis undefined".into()))?;
    Ok(-(axis * axis.dot(Vec3::Z)))
}

enum FrequencyFailure {
    /// No oscillating signal at all; retrying with a longer window is
    /// pointless.
    Stationary,
    /// Fewer than three periods observed; a longer window may help.
    TooShort,
}

fn estimate_frequency_impl(traj: &BlochTrajectory) -> std::result::Result<f64, FrequencyFailure> {
    let samples = &traj.samples;
    if samples.len() < 8 {
        return Err(FrequencyFailure::TooShort);
    }
    let axis = traj
        .average_cross_velocity()
        .normalized()
        .ok_or(FrequencyFailure::Stationary)?;
    // fixed transverse unit vector
    let helper = if axis.dot(Vec3::Z).abs() < 0.9 {
        Vec3::Z
    } else {
        Vec3::new(1.0, 0.0, 0.0)
    };
    let e = axis
        .cross(helper)
        .normalized()
        .ok_or(FrequencyFailure::Stationary)?;
    let n_bar = traj.time_average();
    let s: Vec<f64> = samples.iter().map(|&n| (n - n_bar).dot(e)).collect();

    let amplitude = s.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if amplitude < 1e-9 {
        return Err(FrequencyFailure::Stationary);
    }

    // sub-sample zero crossings
    let mut crossings = Vec::new();
    for i in 0..s.len() - 1 {
        if s[i] == 0.0 || s[i].signum() != s[i + 1].signum() {
            let frac = s[i] / (s[i] - s[i + 1]);
            crossings.push((i as f64 + frac) * traj.dt);
        }
    }
    // one crossing pair per period; require three full periods
    if crossings.len() < 7 {
        return Err(FrequencyFailure::TooShort);
    }
    let pairs = (crossings.len() - 1) / 2;
    let span = crossings[2 * pairs] - crossings[0];
    let omega0 = 2.0 * std::f64::consts::PI * pairs as f64 / span;

    Ok(refine_frequency(&s, traj.dt, omega0))
}

/// Golden-section minimization of the least-squares residual of
/// `s(t) ~ C + A cos(w t) + B sin(w t)` over `w` near the crossing estimate.
///
/// The residual as a function of `w` has sidelobe minima spaced by
/// ~2*pi/T_span; the crossing estimate is accurate to well under that, so
/// the search bracket is kept inside the main lobe.
fn refine_frequency(s: &[f64], dt: f64, omega0: f64) -> f64 {
    let stride = (s.len() / 2048).max(1);
    let pts: Vec<(f64, f64)> = s
        .iter()
        .enumerate()
        .step_by(stride)
        .map(|(i, &v)| (i as f64 * dt, v))
        .collect();

    let residual = |omega: f64| -> f64 {
        // normal equations for (A, B, C)
        let (mut cc, mut cs, mut c1, mut ss, mut s1, mut n1) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let (mut yc, mut ys, mut y1, mut yy) = (0.0, 0.0, 0.0, 0.0);
        for &(t, y) in &pts {
            let (sin, cos) = (omega * t).sin_cos();
            cc += cos * cos;
            cs += cos * sin;
            c1 += cos;
            ss += sin * sin;
            s1 += sin;
            n1 += 1.0;
            yc += y * cos;
            ys += y * sin;
            y1 += y;
            yy += y * y;
        }
        // solve the 3x3 system by elimination
        let m = [[cc, cs, c1], [cs, ss, s1], [c1, s1, n1]];
        let rhs = [yc, ys, y1];
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if det.abs() < 1e-12 {
            return yy;
        }
        let inv = |r: usize, c: usize| {
            let sub = |i: usize, j: usize| m[(r + i + 1) % 3][(c + j + 1) % 3];
            (sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0)) / det
        };
        let mut coef = [0.0; 3];
        for (ci, c) in coef.iter_mut().enumerate() {
            for (ri, &r) in rhs.iter().enumerate() {
                // inverse transposes the cofactor matrix
                *c += inv(ri, ci) * r;
            }
        }
        yy - coef[0] * yc - coef[1] * ys - coef[2] * y1
    };

    let t_span = (s.len() - 1) as f64 * dt;
    let half_width = (std::f64::consts::PI / (2.0 * t_span)).min(0.05 * omega0);
    let (mut lo, mut hi) = (omega0 - half_width, omega0 + half_width);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (residual(x1), residual(x2));
    for _ in 0..32 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = residual(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = residual(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Precession frequency from the trajectory: zero-crossing intervals of the
/// transverse signal refined by a least-squares fit. Requires at least
/// three observed periods; stationary trajectories (no oscillation) are a
/// `NoPrecession` error.
pub fn estimate_frequency(traj: &BlochTrajectory) -> Result<f64> {
    estimate_frequency_impl(traj).map_err(|e| match e {
        FrequencyFailure::Stationary => {
            Error::NoPrecession("trajectory carries no oscillating transverse signal".into())
        }
        FrequencyFailure::TooShort => {
            Error::NoPrecession("trajectory spans fewer than three precession periods".into())
        }
    })
}

/// Precession sense from the trajectory: the sign of
/// `n_bar . <n x dn/dt>`. Equals `sign(r_hat . n0)` analytically. Degenerate
/// when the average is too short (`|n_bar| < eps_n`) or too far out of
/// alignment with the precession axis, both of which mark near-critical
/// momenta.
pub fn precession_sign(traj: &BlochTrajectory, eps_n: f64) -> Result<i8> {
    let n_bar = traj.time_average();
    if n_bar.norm() < eps_n {
        return Err(Error::DegenerateSign(format!(
            "|n_bar| = {:.3e} below eps_n = {:.3e}",
            n_bar.norm(),
            eps_n
        )));
    }
    let m = traj.average_cross_velocity();
    let scale = n_bar.norm() * m.norm();
    if scale == 0.0 {
        return Err(Error::DegenerateSign("no angular momentum signal".into()));
    }
    let alignment = n_bar.dot(m) / scale;
    if alignment.abs() < MIN_AXIS_ALIGNMENT {
        return Err(Error::DegenerateSign(format!(
            "average misaligned with precession axis (cos = {alignment:.3e})"
        )));
    }
    Ok(if alignment > 0.0 { 1 } else { -1 })
}

/// One reconstructed loop plus its bookkeeping.
#[derive(Debug, Clone)]
pub struct DynamicLoop {
    pub samples: LoopSamples,
    /// Momenta excluded as near-critical.
    pub dropped_k: Vec<f64>,
    /// False when more than 10% of the momenta were dropped.
    pub reliable: bool,
}

/// Both chain loops at one observation time.
#[derive(Debug, Clone)]
pub struct DynamicLoopSet {
    pub t: f64,
    pub loop1: DynamicLoop,
    pub loop2: DynamicLoop,
}

impl DynamicLoopSet {
    pub fn reliable(&self) -> bool {
        self.loop1.reliable && self.loop2.reliable
    }
}

/// Per-momentum observables in dynamics mode. The estimation window is
/// extended beyond `t` when `t` is too short to hold three precession
/// periods; frequency and sense are time-independent, so a longer
/// observation of the same evolution is still the same measurement.
fn measured_observables(r: Vec3, t: f64, dt: f64, eps_n: f64) -> Result<(f64, i8)> {
    let mut window = t;
    for _ in 0..12 {
        let traj = BlochTrajectory::simulate(r, window, dt);
        match estimate_frequency_impl(&traj) {
            Ok(omega) => {
                let rho = precession_sign(&traj, eps_n)?;
                return Ok((omega, rho));
            }
            Err(FrequencyFailure::Stationary) => {
                return Err(Error::NoPrecession("stationary momentum".into()))
            }
            Err(FrequencyFailure::TooShort) => window *= 2.0,
        }
    }
    Err(Error::NoPrecession(
        "no full period within the window cap".into(),
    ))
}

/// Reconstructs one chain loop from quench data at observation time `t`.
///
/// Momenta are the half-step grid of `n` points. A momentum is dropped
/// (and reported) when its averaged Bloch vector is shorter than `eps_n`,
/// or when frequency/sense estimation reports a degenerate precession in
/// dynamics mode. More than 10% drops marks the loop unreliable.
pub fn dynamic_loop(chain: &ChainSpec, n: usize, t: f64, opts: &QuenchOpts) -> Result<DynamicLoop> {
    assert!(n >= 16, "need at least 16 momentum samples");
    assert!(t > 0.0 && opts.dt > 0.0);

    let mut ks = Vec::new();
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for k in half_step_grid(n) {
        let r = chain.bloch_vector(k);
        let observed = match opts.mode {
            QuenchMode::Analytic => {
                let n_bar = match steady_average(r) {
                    Ok(v) => v,
                    Err(_) => {
                        dropped.push(k);
                        continue;
                    }
                };
                let rho = -axis_z_sign(r);
                if rho == 0 {
                    dropped.push(k);
                    continue;
                }
                Some((n_bar, 2.0 * r.norm(), rho))
            }
            QuenchMode::Dynamics => match measured_observables(r, t, opts.dt, opts.eps_n) {
                Ok((omega, rho)) => Some((average_bloch(r, t), omega, rho)),
                Err(Error::NoPrecession(_)) | Err(Error::DegenerateSign(_)) => None,
                Err(e) => return Err(e),
            },
        };
        let Some((n_bar, omega, rho)) = observed else {
            dropped.push(k);
            continue;
        };
        let norm = n_bar.norm();
        if norm < opts.eps_n {
            dropped.push(k);
            continue;
        }
        ks.push(k);
        points.push(n_bar * (rho as f64 * omega / (2.0 * norm)));
    }

    let reliable = dropped.len() * 10 < n;
    let samples = LoopSamples::from_parts(ks, points).map_err(|_| Error::UnreliableLoop {
        dropped: dropped.len(),
        total: n,
    })?;
    Ok(DynamicLoop {
        samples,
        dropped_k: dropped,
        reliable,
    })
}

/// `sign(r_hat . z)`, 0 when critical.
fn axis_z_sign(r: Vec3) -> i8 {
    match r.normalized() {
        Some(axis) => {
            let c = axis.dot(Vec3::Z);
            if c > 0.0 {
                1
            } else if c < 0.0 {
                -1
            } else {
                0
            }
        }
        None => 0,
    }
}

/// One entry of the linking-number time series.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinkingSample {
    pub t: f64,
    /// Absent when the loops at this time could not be linked (degenerate
    /// or near-touching); never fabricated.
    pub value: Option<f64>,
    pub reliable: bool,
}

/// `L(T)` over a grid of observation times.
#[derive(Debug, Clone, Serialize)]
pub struct LinkingSeries {
    pub samples: Vec<LinkingSample>,
    /// The integer the tail settled on, when the last quarter of the series
    /// stays within +-0.25 of one integer.
    pub converged_value: Option<f64>,
}

impl LinkingSeries {
    fn from_samples(samples: Vec<LinkingSample>) -> Self {
        let tail_len = (samples.len() / 4).max(1);
        let tail = &samples[samples.len() - tail_len..];
        let values: Vec<f64> = tail
            .iter()
            .filter(|s| s.reliable)
            .filter_map(|s| s.value)
            .collect();
        let converged_value = if values.len() == tail.len() {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let integer = mean.round();
            values
                .iter()
                .all(|v| (v - integer).abs() <= 0.25)
                .then_some(integer)
        } else {
            None
        };
        LinkingSeries {
            samples,
            converged_value,
        }
    }
}

/// Runs the full two-chain quench and links the reconstructed loops at each
/// observation time. Both chains must be gapped on the momentum grid.
pub fn dynamic_linking(
    m: &SeparableModel,
    n: usize,
    t_grid: &[f64],
    opts: &QuenchOpts,
) -> Result<LinkingSeries> {
    for (idx, chain) in [m.chain1(), m.chain2()].iter().enumerate() {
        let (norm, k) = chain.min_grid_norm(n);
        if norm < 1e-9 {
            return Err(Error::GaplessChain {
                chain: idx as u8 + 1,
                k,
                norm,
            });
        }
    }

    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let set = loop_set(m, n, t, opts)?;
        let reliable = set.reliable();
        let value = gauss_linking(&set.loop1.samples, &set.loop2.samples, opts.eps_touch).ok();
        samples.push(LinkingSample {
            t,
            value,
            reliable: reliable && value.is_some(),
        });
    }
    Ok(LinkingSeries::from_samples(samples))
}

/// Both dynamic loops at one observation time.
pub fn loop_set(m: &SeparableModel, n: usize, t: f64, opts: &QuenchOpts) -> Result<DynamicLoopSet> {
    Ok(DynamicLoopSet {
        t,
        loop1: dynamic_loop(m.chain1(), n, t, opts)?,
        loop2: dynamic_loop(m.chain2(), n, t, opts)?,
    })
}
