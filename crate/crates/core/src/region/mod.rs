//! Convex regions `W(A;c)` built as intersections of sampled supporting half-planes.

mod fit;
mod halfplane;
mod intersect;
mod normal;

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::eig_hermitian;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix};
use crate::support::{directional, uniform_grid, wrap_angle, Support, WeightVector};

pub use fit::{fit_circle, fit_ellipse, ArcFit, ArcKind};
pub use halfplane::{clip, Clipped, HalfPlane};
pub use intersect::{
    boundary_intersections, chord_angle, common_supporting_angle, BoundaryIntersections,
    SupportingAngle, DEDUP_TOL,
};
pub use normal::{normal_eigenvalues, polygon_for_normal, NORMAL_MAX_DIM};

/// Smallest grid accepted by [`build_region`].
pub const MIN_REGION_GRID: usize = 64;
/// Outward relaxation of every sampled half-plane, relative to the region scale.
pub const RELAXATION: f64 = 1e-12;
/// Consecutive vertices closer than this (relative) are merged.
pub const MERGE_TOL: f64 = 1e-9;
/// Vertices this close (relative) to the chord of their neighbours are dropped.
pub const COLLINEAR_TOL: f64 = 1e-11;
/// Width (relative) under which a region is a segment or a point.
pub const DEGENERATE_WIDTH: f64 = 1e-9;
/// Area (relative to scale²) under which a region is a segment or a point.
pub const DEGENERATE_AREA: f64 = 1e-12;
/// Minimal normal-cone width of a sharp point.
pub const SHARP_ANGLE_TOL: f64 = 1e-3;
/// A corner cut deeper than `KINK_SLOPE·δ·scale` by a bisecting half-plane is refined further.
pub const KINK_SLOPE: f64 = 1e-4;
const MAX_REFINE_ROUNDS: usize = 64;
/// Angular gaps below this are not split further; nearly parallel planes meet inaccurately.
pub const MIN_REFINE_GAP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Full2D,
    Segment,
    Point,
    Empty,
}

/// Convex polygon approximating (from outside) a weighted numerical range.
///
/// `Full2D` regions list their vertices counterclockwise; segments store their two endpoints
/// ordered by real part, points a single vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexRegion {
    kind: RegionKind,
    vertices: Vec<Complex64>,
    scale: f64,
    grid: usize,
}

impl ConvexRegion {
    pub fn empty(scale: f64, grid: usize) -> Self {
        Self {
            kind: RegionKind::Empty,
            vertices: Vec::new(),
            scale,
            grid,
        }
    }

    /// Cleans a clipped polygon (merging clusters and collinear runs) and classifies it.
    pub fn from_polygon(vertices: Vec<Complex64>, scale: f64, grid: usize) -> Self {
        let merged = collapse(vertices, scale);
        if merged.is_empty() {
            return Self::empty(scale, grid);
        }
        let area = polygon_area(&merged);
        let width = polygon_width(&merged);
        if merged.len() >= 3
            && area >= DEGENERATE_AREA * scale * scale
            && width >= DEGENERATE_WIDTH * scale
        {
            return Self {
                kind: RegionKind::Full2D,
                vertices: merged,
                scale,
                grid,
            };
        }
        let (p, q) = farthest_pair(&merged);
        if (p - q).norm() < DEGENERATE_WIDTH * scale {
            let n = merged.len() as f64;
            let centroid = merged.iter().sum::<Complex64>() / n;
            return Self {
                kind: RegionKind::Point,
                vertices: vec![centroid],
                scale,
                grid,
            };
        }
        let (p, q) = if (p.re, p.im) <= (q.re, q.im) { (p, q) } else { (q, p) };
        Self {
            kind: RegionKind::Segment,
            vertices: vec![p, q],
            scale,
            grid,
        }
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn is_empty(&self) -> bool {
        self.kind == RegionKind::Empty
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Angular grid used to build the region (0 for exact constructions).
    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn area(&self) -> f64 {
        if self.kind == RegionKind::Full2D {
            polygon_area(&self.vertices)
        } else {
            0.0
        }
    }

    pub fn diameter(&self) -> f64 {
        if self.vertices.is_empty() {
            return 0.0;
        }
        let (p, q) = farthest_pair(&self.vertices);
        (p - q).norm()
    }

    pub fn centroid(&self) -> Option<Complex64> {
        if self.vertices.is_empty() {
            return None;
        }
        Some(self.vertices.iter().sum::<Complex64>() / self.vertices.len() as f64)
    }

    /// `max_{v ∈ R} Re(e^{iθ}v)`; `-∞` for the empty region.
    pub fn support(&self, theta: f64) -> f64 {
        self.vertices
            .iter()
            .map(|&v| directional(theta, v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Boundary edges as consecutive vertex pairs (a segment is traversed both ways).
    pub fn edges(&self) -> Vec<(Complex64, Complex64)> {
        match self.kind {
            RegionKind::Full2D => (0..self.vertices.len())
                .map(|k| (self.vertices[k], self.vertices[(k + 1) % self.vertices.len()]))
                .collect(),
            RegionKind::Segment => vec![
                (self.vertices[0], self.vertices[1]),
                (self.vertices[1], self.vertices[0]),
            ],
            _ => Vec::new(),
        }
    }

    pub fn contains(&self, p: Complex64, slack: f64) -> bool {
        self.distance(p) <= slack
    }

    /// Euclidean distance from `p` to the region (0 inside).
    pub fn distance(&self, p: Complex64) -> f64 {
        match self.kind {
            RegionKind::Empty => f64::INFINITY,
            RegionKind::Point => (p - self.vertices[0]).norm(),
            RegionKind::Segment => segment_distance(p, self.vertices[0], self.vertices[1]),
            RegionKind::Full2D => {
                let n = self.vertices.len();
                let inside = (0..n).all(|k| {
                    let a = self.vertices[k];
                    let b = self.vertices[(k + 1) % n];
                    cross(b - a, p - a) >= 0.0
                });
                if inside {
                    0.0
                } else {
                    (0..n)
                        .map(|k| segment_distance(p, self.vertices[k], self.vertices[(k + 1) % n]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    /// Distance from `p` to the boundary curve (for segments and points, the set itself).
    pub fn boundary_distance(&self, p: Complex64) -> f64 {
        match self.kind {
            RegionKind::Full2D => {
                let n = self.vertices.len();
                (0..n)
                    .map(|k| segment_distance(p, self.vertices[k], self.vertices[(k + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
            _ => self.distance(p),
        }
    }

    /// Hausdorff distance between two convex regions (attained at vertices).
    pub fn hausdorff(&self, other: &Self) -> f64 {
        if self.is_empty() || other.is_empty() {
            return if self.is_empty() && other.is_empty() {
                0.0
            } else {
                f64::INFINITY
            };
        }
        let one = self
            .vertices
            .iter()
            .map(|&v| other.distance(v))
            .fold(0.0, f64::max);
        let two = other
            .vertices
            .iter()
            .map(|&v| self.distance(v))
            .fold(0.0, f64::max);
        one.max(two)
    }

    /// Image under `z ↦ γz + shift`.
    pub fn map_affine(&self, gamma: Complex64, shift: Complex64) -> Self {
        let vertices: Vec<Complex64> = self.vertices.iter().map(|&v| gamma * v + shift).collect();
        let mut out = self.clone();
        out.scale = 1.0 + (self.scale - 1.0) * gamma.norm().max(1.0) + shift.norm();
        if self.kind == RegionKind::Segment {
            let (p, q) = (vertices[0], vertices[1]);
            out.vertices = if (p.re, p.im) <= (q.re, q.im) { vec![p, q] } else { vec![q, p] };
        } else {
            out.vertices = vertices;
        }
        out
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn polygon_area(v: &[Complex64]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n).map(|k| cross(v[k], v[(k + 1) % n])).sum::<f64>()
}

/// Minimal width by rotating calipers over a convex counterclockwise polygon.
fn polygon_width(v: &[Complex64]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    let dist = |k: usize, j: usize| {
        let a = v[k];
        let b = v[(k + 1) % n];
        let len = (b - a).norm();
        if len == 0.0 {
            0.0
        } else {
            cross(b - a, v[j % n] - a) / len
        }
    };
    let mut best = f64::INFINITY;
    let mut j = 1;
    for k in 0..n {
        if (v[(k + 1) % n] - v[k]).norm() == 0.0 {
            continue;
        }
        if j < k + 1 {
            j = k + 1;
        }
        while j < k + 2 * n && dist(k, j + 1) >= dist(k, j) {
            j += 1;
        }
        best = best.min(dist(k, j));
    }
    best
}

/// Farthest-pair heuristic: two passes of "farthest from". Exact for segments and near-segments.
fn farthest_pair(v: &[Complex64]) -> (Complex64, Complex64) {
    let far = |from: Complex64| {
        *v.iter()
            .max_by(|a, b| (**a - from).norm().total_cmp(&(**b - from).norm()))
            .unwrap()
    };
    let a = far(v[0]);
    let b = far(a);
    (a, b)
}

fn collapse(vertices: Vec<Complex64>, scale: f64) -> Vec<Complex64> {
    let merge = MERGE_TOL * scale;
    let mut out: Vec<Complex64> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if out.last().is_none_or(|&l| (v - l).norm() > merge) {
            out.push(v);
        }
    }
    while out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= merge {
        out.pop();
    }
    let coll = COLLINEAR_TOL * scale;
    loop {
        let n = out.len();
        if n < 3 {
            return out;
        }
        let mut keep = vec![true; n];
        let mut changed = false;
        let mut prev = n - 1;
        for k in 0..n {
            let next = (k + 1) % n;
            let (a, b) = (out[prev], out[next]);
            let len = (b - a).norm();
            let off = if len == 0.0 {
                (out[k] - a).norm()
            } else {
                cross(b - a, out[k] - a).abs() / len
            };
            let t = if len == 0.0 {
                0.0
            } else {
                ((out[k] - a) * (b - a).conj()).re / (len * len)
            };
            if off <= coll && (0.0..=1.0).contains(&t) {
                keep[k] = false;
                changed = true;
            } else {
                prev = k;
            }
        }
        if !changed {
            return out;
        }
        out = out
            .into_iter()
            .zip(keep)
            .filter_map(|(v, k)| k.then_some(v))
            .collect();
    }
}

/// `W(A;c)` sampled on a uniform grid of `grid` angles.
pub fn build_region(a: &ComplexMatrix, c: &WeightVector, grid: usize) -> Result<ConvexRegion> {
    build_region_with(&Support::new(a, c)?, grid)
}

#[derive(Clone, Copy)]
struct Sample {
    theta: f64,
    h: f64,
    /// Boundary point `e^{−iθ}(h − i h')` touched by the plane.
    touch: Complex64,
}

impl Sample {
    fn at(support: &Support<'_>, theta: f64) -> Result<Self> {
        let h = support.value(theta)?;
        let dh = support.derivative_or_fd(theta)?;
        Ok(Self {
            theta,
            h,
            touch: Complex64::from_polar(1.0, -theta) * Complex64::new(h, -dh),
        })
    }
}

/// Angle inside `(lo, lo + delta)` where the sinusoids `Re(e^{iθ}p)` through the two touch
/// points cross: the normal of a straight edge, or a switching angle of `h`. Falls back to
/// the midpoint when the crossing is too close to either end.
fn probe_angle(lo: &Sample, hi: &Sample, delta: f64) -> f64 {
    let chord = hi.touch - lo.touch;
    let margin = 0.01 * delta;
    if chord.norm() > 0.0 {
        for t in [PI / 2.0 - chord.arg(), -PI / 2.0 - chord.arg()] {
            let offset = (t - lo.theta).rem_euclid(TAU);
            if offset > margin && offset < delta - margin {
                return wrap_angle(lo.theta + offset);
            }
        }
    }
    wrap_angle(lo.theta + 0.5 * delta)
}

/// For each sample index, the clipped vertex whose normal cone covers the interval from that
/// sample to the next.
fn covering_vertices(clipped: &Clipped, samples: &[Sample]) -> Vec<usize> {
    let m = samples.len();
    let count = clipped.planes.len();
    let mut cover = vec![0; m];
    for k in 0..count {
        let (a, b) = clipped.vertex_planes(k);
        let (from, to) = if (samples[b].theta - samples[a].theta).rem_euclid(TAU) < PI {
            (a, b)
        } else {
            (b, a)
        };
        let mut i = from;
        while i != to {
            cover[i] = k;
            i = (i + 1) % m;
        }
    }
    cover
}

/// Intersection of the half-planes `Re(e^{iθ}v) ≤ h(θ)` over a uniform grid, refined where a
/// vertex of the sampled polygon reaches past `h` between two grid angles (a straight edge
/// whose normal falls between them, or a switching angle of `h`).
///
/// Every interval between consecutive angles is probed at [`probe_angle`] until the polygon
/// stays below `h` there and the touch points explain `h`; settled intervals are not probed
/// again since adding planes only shrinks the polygon.
pub fn build_region_with(support: &Support<'_>, grid: usize) -> Result<ConvexRegion> {
    if grid < MIN_REGION_GRID {
        return Err(Error::InvalidGrid {
            grid,
            reason: "region construction needs at least 64 angles",
        });
    }
    let mut samples = uniform_grid(grid)
        .into_iter()
        .map(|t| Sample::at(support, t))
        .collect::<Result<Vec<_>>>()?;
    let max_h = samples.iter().map(|s| s.h.abs()).fold(0.0, f64::max);
    let scale = 1.0 + support.matrix().max_abs().max(max_h);
    let relax = RELAXATION * scale;
    let mut settled: HashSet<(u64, u64)> = HashSet::new();

    let clip_samples = |samples: &[Sample]| {
        let planes: Vec<HalfPlane> = samples
            .iter()
            .map(|s| HalfPlane::new(s.theta, s.h + relax))
            .collect();
        clip(&planes, 100.0 * relax)
    };

    for _round in 0..MAX_REFINE_ROUNDS {
        let Some(clipped) = clip_samples(&samples) else {
            return Ok(ConvexRegion::empty(scale, grid));
        };
        let cover = covering_vertices(&clipped, &samples);
        let m = samples.len();
        let mut extra = Vec::new();
        for lo in 0..m {
            let (a, b) = (&samples[lo], &samples[(lo + 1) % m]);
            let key = (a.theta.to_bits(), b.theta.to_bits());
            let delta = (b.theta - a.theta).rem_euclid(TAU);
            if delta < MIN_REFINE_GAP || settled.contains(&key) {
                continue;
            }
            let t = probe_angle(a, b, delta);
            let probe = Sample::at(support, t)?;
            let depth = directional(t, clipped.vertices[cover[lo]]) - (probe.h + relax);
            // two tangent sinusoids must explain h at the probe, else more happens inside
            let mismatch = (probe.h - directional(t, a.touch))
                .abs()
                .min((probe.h - directional(t, b.touch)).abs());
            let tol = (KINK_SLOPE * delta * scale).max(relax);
            if depth > tol || mismatch > tol {
                extra.push(probe);
            } else {
                settled.insert(key);
            }
        }
        if extra.is_empty() {
            return Ok(ConvexRegion::from_polygon(clipped.vertices, scale, grid));
        }
        samples.extend(extra);
        samples.sort_by(|x, y| x.theta.total_cmp(&y.theta));
        samples.dedup_by(|x, y| x.theta == y.theta);
    }
    Ok(match clip_samples(&samples) {
        Some(c) => ConvexRegion::from_polygon(c.vertices, scale, grid),
        None => ConvexRegion::empty(scale, grid),
    })
}

pub fn is_empty(region: &ConvexRegion) -> bool {
    region.is_empty()
}

/// Closed real interval `[Σ c_j λ_{n+1-j}, Σ c_j λ_j]` for Hermitian `A`; `None` when empty.
pub fn hermitian_segment(a: &ComplexMatrix, c: &WeightVector) -> Result<Option<(f64, f64)>> {
    if a.dim() != c.len() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: c.len(),
        });
    }
    let h = HermitianMatrix::new(a)?;
    let lambda = eig_hermitian(&h)?.values;
    let n = lambda.len();
    let w = c.as_slice();
    let upper: f64 = (0..n).map(|j| w[j] * lambda[j]).sum();
    let lower: f64 = (0..n).map(|j| w[j] * lambda[n - 1 - j]).sum();
    let tol = 1e-12 * (1.0 + a.max_abs() * c.l1_norm());
    if lower > upper + tol {
        Ok(None)
    } else if lower > upper {
        let mid = 0.5 * (lower + upper);
        Ok(Some((mid, mid)))
    } else {
        Ok(Some((lower, upper)))
    }
}

/// A corner of a region with its normal cone, in the `θ` convention of the half-planes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpPoint {
    pub location: [f64; 2],
    pub theta_lo: f64,
    pub theta_hi: f64,
    /// Whether the weighted support equals `Re(e^{iθ}·location)` across the cone.
    pub support_attained: bool,
}

impl SharpPoint {
    pub fn point(&self) -> Complex64 {
        Complex64::new(self.location[0], self.location[1])
    }

    pub fn cone_width(&self) -> f64 {
        self.theta_hi - self.theta_lo
    }
}

/// Minimal cone width for a corner at the given grid resolution.
pub fn sharp_angle_threshold(grid: usize) -> f64 {
    if grid == 0 {
        SHARP_ANGLE_TOL
    } else {
        SHARP_ANGLE_TOL.max(2.5 * TAU / grid as f64)
    }
}

/// Corners whose normal cone is wider than [`sharp_angle_threshold`].
pub fn detect_sharp_points(
    region: &ConvexRegion,
    a: &ComplexMatrix,
    c: &WeightVector,
) -> Result<Vec<SharpPoint>> {
    let support = Support::new(a, c)?;
    let tol = 1e-7 * region.scale();
    let attained = |v: Complex64, lo: f64, hi: f64| -> Result<bool> {
        for s in 1..8 {
            let t = lo + (hi - lo) * s as f64 / 8.0;
            if (support.value(t)? - directional(t, v)).abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let make = |v: Complex64, lo: f64, width: f64| -> Result<SharpPoint> {
        let lo = wrap_angle(lo);
        Ok(SharpPoint {
            location: [v.re, v.im],
            theta_lo: lo,
            theta_hi: lo + width,
            support_attained: attained(v, lo, lo + width)?,
        })
    };
    let v = region.vertices();
    match region.kind() {
        RegionKind::Empty => Ok(Vec::new()),
        RegionKind::Point => Ok(vec![make(v[0], 0.0, TAU)?]),
        RegionKind::Segment => {
            let mut out = Vec::new();
            for (p, q) in [(v[0], v[1]), (v[1], v[0])] {
                let away = (p - q).arg();
                out.push(make(p, -away - PI / 2.0, PI)?);
            }
            Ok(out)
        }
        RegionKind::Full2D => {
            let n = v.len();
            let threshold = sharp_angle_threshold(region.grid());
            let mut out = Vec::new();
            for k in 0..n {
                let prev = v[(k + n - 1) % n];
                let next = v[(k + 1) % n];
                let psi_in = (v[k] - prev).arg();
                let psi_out = (next - v[k]).arg();
                let turn = (psi_out - psi_in).rem_euclid(TAU);
                if turn > threshold && turn < PI {
                    out.push(make(v[k], PI / 2.0 - psi_out, turn)?);
                }
            }
            Ok(out)
        }
    }
}
