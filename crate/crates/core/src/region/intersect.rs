//! Boundary intersections of two regions and common supporting angles through chords.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{cross, ConvexRegion};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::support::{wrap_angle, SupportGap, WeightVector, ZERO_GAP_TOL};

/// Crossing points are merged at this relative distance.
pub const DEDUP_TOL: f64 = 1e-8;
const PARAM_SLACK: f64 = 1e-12;
const ANGLE_SCAN: usize = 256;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundaryIntersections {
    /// Transversal crossings, counterclockwise by argument about the first region's centroid.
    pub points: Vec<Complex64>,
    /// Boundary segments shared by both regions.
    pub overlaps: Vec<(Complex64, Complex64)>,
    /// Set when the two boundaries coincide (then `points` is empty).
    pub identical: bool,
}

fn bbox(a: Complex64, b: Complex64) -> (f64, f64, f64, f64) {
    (a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im))
}

pub fn boundary_intersections(r1: &ConvexRegion, r2: &ConvexRegion) -> BoundaryIntersections {
    let mut out = BoundaryIntersections::default();
    if r1.is_empty() || r2.is_empty() {
        return out;
    }
    let scale = r1.scale().max(r2.scale());
    let tol = DEDUP_TOL * scale;
    if r1.hausdorff(r2) <= tol {
        out.identical = true;
        return out;
    }
    let e1 = r1.edges();
    let e2 = r2.edges();
    let boxes2: Vec<_> = e2.iter().map(|&(a, b)| bbox(a, b)).collect();
    let mut raw = Vec::new();
    for &(p, p2) in &e1 {
        let (x0, x1, y0, y1) = bbox(p, p2);
        let r = p2 - p;
        for (k, &(q, q2)) in e2.iter().enumerate() {
            let b = boxes2[k];
            if b.0 > x1 + tol || b.1 < x0 - tol || b.2 > y1 + tol || b.3 < y0 - tol {
                continue;
            }
            let s = q2 - q;
            let denom = cross(r, s);
            let rl = r.norm();
            let sl = s.norm();
            if rl == 0.0 || sl == 0.0 {
                continue;
            }
            if denom.abs() <= 1e-12 * rl * sl {
                // parallel: overlapping only if collinear
                if cross(q - p, r).abs() / rl > tol {
                    continue;
                }
                let dir = r / rl;
                let t0 = ((q - p) * dir.conj()).re;
                let t1 = ((q2 - p) * dir.conj()).re;
                let lo = t0.min(t1).max(0.0);
                let hi = t0.max(t1).min(rl);
                if hi - lo > tol {
                    out.overlaps.push((p + dir * lo, p + dir * hi));
                }
                continue;
            }
            let t = cross(q - p, s) / denom;
            let u = cross(q - p, r) / denom;
            if (-PARAM_SLACK..=1.0 + PARAM_SLACK).contains(&t)
                && (-PARAM_SLACK..=1.0 + PARAM_SLACK).contains(&u)
            {
                raw.push(p + r * t);
            }
        }
    }

    let mut overlaps: Vec<(Complex64, Complex64)> = Vec::new();
    for (a, b) in out.overlaps.drain(..) {
        let dup = overlaps.iter().any(|&(c, d)| {
            ((a - c).norm() <= tol && (b - d).norm() <= tol)
                || ((a - d).norm() <= tol && (b - c).norm() <= tol)
        });
        if !dup {
            overlaps.push((a, b));
        }
    }
    let on_overlap = |z: Complex64| {
        overlaps.iter().any(|&(a, b)| {
            let ab = b - a;
            let t = (((z - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
            (z - (a + ab * t)).norm() <= tol
        })
    };
    let mut points: Vec<Complex64> = Vec::new();
    for z in raw {
        if on_overlap(z) || points.iter().any(|&w| (w - z).norm() <= tol) {
            continue;
        }
        points.push(z);
    }
    let origin = r1.centroid().unwrap_or_default();
    points.sort_by(|a, b| {
        let ta = wrap_angle((a - origin).arg());
        let tb = wrap_angle((b - origin).arg());
        ta.total_cmp(&tb)
    });
    out.points = points;
    out.overlaps = overlaps;
    out
}

/// A root of the support gap between the normal angles of two consecutive chords.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportingAngle {
    pub phi: f64,
    /// `ω_2` and `ω_1` (the interval is traversed counterclockwise from `ω_2`).
    pub interval: (f64, f64),
    /// The root sits on an interval endpoint: the boundary contains a segment of a chord.
    pub exceptional: bool,
    pub gap: f64,
}

/// Normal angle `Arg(i·conj(w − z))` of the chord from `z` to `w`.
pub fn chord_angle(z: Complex64, w: Complex64) -> f64 {
    wrap_angle((Complex64::i() * (w - z).conj()).arg())
}

/// Given three counterclockwise points common to both boundaries, finds `φ ∈ [ω_2, ω_1]`
/// where both regions share a supporting line.
pub fn common_supporting_angle(
    a: &ComplexMatrix,
    c: &WeightVector,
    b: &ComplexMatrix,
    d: &WeightVector,
    z: [Complex64; 3],
) -> Result<SupportingAngle> {
    let gap = SupportGap::new(a, c, b, d)?;
    let w1 = chord_angle(z[0], z[1]);
    let w2 = chord_angle(z[1], z[2]);
    let span = (w1 - w2).rem_euclid(TAU);
    let zero = ZERO_GAP_TOL * gap.scale();
    let ends_tol = 1e-9;
    let at = |t: f64| w2 + span * t;

    let mut samples = Vec::with_capacity(ANGLE_SCAN + 1);
    for k in 0..=ANGLE_SCAN {
        let t = at(k as f64 / ANGLE_SCAN as f64);
        samples.push((t, gap.value(t)?));
    }
    let make = |phi: f64, g: f64| SupportingAngle {
        phi: wrap_angle(phi),
        interval: (w2, w1),
        exceptional: (phi - w2).abs() <= ends_tol || (phi - (w2 + span)).abs() <= ends_tol,
        gap: g,
    };
    if samples.iter().all(|s| s.1.abs() <= zero) {
        let mid = at(0.5);
        return Ok(make(mid, gap.value(mid)?));
    }
    for k in 0..ANGLE_SCAN {
        let (t0, g0) = samples[k];
        let (t1, g1) = samples[k + 1];
        if g0 == 0.0 {
            return Ok(make(t0, g0));
        }
        if g0.signum() != g1.signum() {
            let phi = if g1 == 0.0 { t1 } else { gap.bisect(t0, t1, g0)? };
            return Ok(make(phi, gap.value(phi)?));
        }
    }
    let (nearest, g) = samples
        .iter()
        .copied()
        .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .unwrap();
    if g.abs() <= zero {
        return Ok(make(nearest, g));
    }
    Err(Error::NoSignChange {
        nearest: wrap_angle(nearest),
        gap: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::build_region;

    fn disc_095() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.9], &[0.0, 0.0]]).unwrap()
    }

    #[test]
    fn square_and_disc_cross_eight_times() {
        let e = WeightVector::unit(4, 1);
        let e2 = WeightVector::unit(2, 1);
        let sq = build_region(&ComplexMatrix::roots_of_unity(4), &e, 4096).unwrap();
        let disc = build_region(&disc_095(), &e2, 4096).unwrap();
        let hits = boundary_intersections(&sq, &disc);
        assert_eq!(hits.points.len(), 8);
        assert!(hits.overlaps.is_empty() && !hits.identical);
        for p in &hits.points {
            assert!((p.norm() - 0.95).abs() < 1e-6);
            assert!((p.re.abs() + p.im.abs() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn identical_regions() {
        let e = WeightVector::unit(4, 1);
        let sq = build_region(&ComplexMatrix::roots_of_unity(4), &e, 1024).unwrap();
        let hits = boundary_intersections(&sq, &sq);
        assert!(hits.identical && hits.points.is_empty());
    }

    #[test]
    fn shared_edge_is_an_overlap() {
        let e = WeightVector::unit(2, 1);
        let s1 = build_region(&ComplexMatrix::real_diag(&[0.0, 2.0]).unwrap(), &e, 256).unwrap();
        let s2 = build_region(&ComplexMatrix::real_diag(&[1.0, 3.0]).unwrap(), &e, 256).unwrap();
        let hits = boundary_intersections(&s1, &s2);
        assert!(hits.points.is_empty());
        assert_eq!(hits.overlaps.len(), 1);
        let (a, b) = hits.overlaps[0];
        assert!(((a - b).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn supporting_angle_through_square_corner() {
        let a = ComplexMatrix::roots_of_unity(4);
        let b = disc_095();
        let (e4, e2) = (WeightVector::unit(4, 1), WeightVector::unit(2, 1));
        // crossings of x + y = 1 with |z| = 0.95 and their mirror images
        let s = (2.0 * 0.95f64 * 0.95 - 1.0).sqrt();
        let (u, v) = ((1.0 + s) / 2.0, (1.0 - s) / 2.0);
        let z = [Complex64::new(u, -v), Complex64::new(u, v), Complex64::new(v, u)];
        let got = common_supporting_angle(&a, &e4, &b, &e2, z).unwrap();
        let expected = wrap_angle(-0.95f64.acos());
        assert!((got.phi - expected).abs() < 1e-9, "{}", got.phi);
        assert!(!got.exceptional);
        assert!(got.gap.abs() <= 1e-9);
    }

    #[test]
    fn equal_pairs_return_midpoint() {
        let a = ComplexMatrix::roots_of_unity(4);
        let e = WeightVector::unit(4, 1);
        let z = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0)];
        let got = common_supporting_angle(&a, &e, &a, &e, z).unwrap();
        let w1 = chord_angle(z[0], z[1]);
        let w2 = chord_angle(z[1], z[2]);
        let mid = wrap_angle(w2 + 0.5 * (w1 - w2).rem_euclid(TAU));
        assert!((got.phi - mid).abs() < 1e-12);
    }
}
