//! Elementary geometry in the 3D auxiliary space: vectors, rotations,
//! discretized closed curves, and the Gauss linking integral.
//!
//! A loop is a closed polygonal curve sampled on the half-step momentum grid
//! `k_i = 2*pi*(i + 1/2)/N` and oriented by increasing `k`. The half-step
//! offset keeps high-symmetry momenta (`k = 0, pi`) off the grid, which
//! matters for the quench pipeline where those points can be exactly
//! critical.
//!
//! The linking number of two disjoint oriented loops is the discrete Gauss
//! double sum over segment midpoints,
//!
//! ```text
//! L(a, b) = (1/4*pi) * sum_ij  (m_i - m_j) . (da_i x db_j) / |m_i - m_j|^3
//! ```
//!
//! in the right-handed crossing convention. The kernel diverges as the loops
//! approach each other, so loop pairs closer than `eps_touch` are rejected
//! with [`Error::NearCriticalLoops`] instead of returning a garbage value.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A point or direction in the auxiliary space spanned by the Pauli basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Z: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// The half-step momentum grid `k_i = 2*pi*(i + 1/2)/n`, `i = 0..n`.
pub fn half_step_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| 2.0 * PI * (i as f64 + 0.5) / n as f64)
}

/// A closed oriented polygonal curve in the auxiliary space.
///
/// Point `i` carries the momentum `ks[i]`; the segment from the last point
/// back to the first closes the curve. Orientation is the index order.
#[derive(Debug, Clone)]
pub struct LoopSamples {
    ks: Vec<f64>,
    points: Vec<Vec3>,
}

impl LoopSamples {
    /// Builds a loop from explicit momenta and points.
    pub fn from_parts(ks: Vec<f64>, points: Vec<Vec3>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::DegenerateLoop(points.len()));
        }
        assert_eq!(ks.len(), points.len(), "one momentum per sample");
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFiniteLoop(i));
        }
        Ok(LoopSamples { ks, points })
    }

    /// Samples `f` on the half-step grid of `n` points.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Vec3) -> Result<Self> {
        let ks: Vec<f64> = half_step_grid(n).collect();
        let points = ks.iter().map(|&k| f(k)).collect();
        Self::from_parts(ks, points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn ks(&self) -> &[f64] {
        &self.ks
    }

    /// The same curve with reversed orientation.
    pub fn reversed(&self) -> LoopSamples {
        let mut ks = self.ks.clone();
        let mut points = self.points.clone();
        ks.reverse();
        points.reverse();
        LoopSamples { ks, points }
    }

    pub fn translated(&self, offset: Vec3) -> LoopSamples {
        LoopSamples {
            ks: self.ks.clone(),
            points: self.points.iter().map(|&p| p + offset).collect(),
        }
    }

    pub fn rotated(&self, axis: Vec3, angle: f64) -> Result<LoopSamples> {
        let points = self
            .points
            .iter()
            .map(|&p| rotate_about_axis(p, axis, angle))
            .collect::<Result<Vec<_>>>()?;
        Ok(LoopSamples {
            ks: self.ks.clone(),
            points,
        })
    }

    /// Midpoint and difference vector of every segment, including the
    /// closing segment back to point 0.
    fn segments(&self) -> Vec<(Vec3, Vec3)> {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let a = self.points[i];
                let b = self.points[(i + 1) % n];
                ((a + b) * 0.5, b - a)
            })
            .collect()
    }
}

/// Rotates `v` about the unit vector `axis` by `angle` radians, right-hand
/// rule about `+axis` (Rodrigues formula).
pub fn rotate_about_axis(v: Vec3, axis: Vec3, angle: f64) -> Result<Vec3> {
    let norm = axis.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitAxis { norm });
    }
    Ok(rotate_unit_axis(v, axis, angle))
}

/// Rodrigues rotation without the unit-axis check; callers guarantee
/// `|axis| = 1`.
pub(crate) fn rotate_unit_axis(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (sin, cos) = angle.sin_cos();
    v * cos + axis.cross(v) * sin + axis * (axis.dot(v) * (1.0 - cos))
}

/// Minimum Euclidean distance over all sample pairs of the two loops.
pub fn min_pairwise_distance(a: &LoopSamples, b: &LoopSamples) -> f64 {
    let mut best = f64::INFINITY;
    for &p in a.points() {
        for &q in b.points() {
            let d = (p - q).norm_sq();
            if d < best {
                best = d;
            }
        }
    }
    best.sqrt()
}

/// Discrete Gauss linking number of two disjoint oriented loops.
///
/// For well-separated smooth loops the result converges to an integer as the
/// sample count grows (midpoint rule, second order). Loops closer than
/// `eps_touch` are rejected: the kernel grows as `1/d^2` and the value would
/// be dominated by discretization noise exactly where the underlying
/// invariant stops being defined.
pub fn gauss_linking(a: &LoopSamples, b: &LoopSamples, eps_touch: f64) -> Result<f64> {
    let min_distance = min_pairwise_distance(a, b);
    if min_distance <= eps_touch {
        return Err(Error::NearCriticalLoops {
            min_distance,
            eps_touch,
        });
    }
    let sa = a.segments();
    let sb = b.segments();
    let mut sum = 0.0;
    for &(ma, da) in &sa {
        for &(mb, db) in &sb {
            let sep = ma - mb;
            let d2 = sep.norm_sq();
            sum += sep.dot(da.cross(db)) / (d2 * d2.sqrt());
        }
    }
    Ok(sum / (4.0 * PI))
}
