//! Corollary checks: circle, ellipse, sharp point, nilpotency, curve overlap, equal ranges.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{random_weights, HypothesisStatus, Verdict};
use crate::cvalues::{common_cvalue, cvalue_set, CValueSet, CommonValue, MATCH_TOL};
use crate::eigen::eig_general;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::region::{
    build_region, detect_sharp_points, fit_circle, fit_ellipse, ArcFit, ArcKind, ConvexRegion,
    RegionKind,
};
use crate::support::WeightVector;

/// Points lie on a fitted curve when the RMS residual is below this fraction of the diameter.
pub const ARC_RESIDUAL_TOL: f64 = 1e-5;
/// Circle centers are matched to c-values at this relative distance, and multiplicity is
/// counted at the same radius.
pub const CIRCLE_MATCH_TOL: f64 = 1e-5;
pub const ELLIPSE_MATCH_TOL: f64 = 1e-4;
pub const SHARP_MATCH_TOL: f64 = 1e-6;
pub const NILPOTENT_CENTER_TOL: f64 = 1e-5;
pub const NILPOTENT_EIGEN_TOL: f64 = 1e-6;
pub const OVERLAP_TOL: f64 = 1e-7;
pub const OVERLAP_RUN: usize = 32;
pub const EQUAL_RANGE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub kind: ArcKind,
    #[serde(with = "crate::io::complex_pair")]
    pub center: Complex64,
    #[serde(with = "crate::io::complex_pairs")]
    pub foci: Vec<Complex64>,
    pub semi_axes: [f64; 2],
    pub residual: f64,
    pub samples: usize,
}

impl FitSummary {
    fn new(fit: &ArcFit, samples: usize) -> Self {
        Self {
            kind: fit.kind,
            center: fit.center,
            foci: fit.foci.to_vec(),
            semi_axes: [fit.semi_axes.0, fit.semi_axes.1],
            residual: fit.residual,
            samples,
        }
    }
}

/// A point of interest (center, focus, corner) and the nearest c-value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMatch {
    #[serde(with = "crate::io::complex_pair")]
    pub point: Complex64,
    #[serde(with = "crate::io::complex_pair")]
    pub cvalue: Complex64,
    pub distance: f64,
    pub multiplicity: usize,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub corollary: String,
    /// The hypothesis was detected numerically.
    pub triggered: bool,
    /// The conclusion holds (vacuously when not triggered).
    pub holds: bool,
    pub hypothesis_status: HypothesisStatus,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit: Option<FitSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub matches: Vec<PointMatch>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub common_values: Vec<CommonValue>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<f64>>,
    pub seed: u64,
    #[serde(rename = "gridN")]
    pub grid_n: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl CorollaryReport {
    fn new(name: &str, grid: usize) -> Self {
        Self {
            corollary: name.to_string(),
            triggered: false,
            holds: true,
            hypothesis_status: HypothesisStatus::Verified,
            verdict: Verdict::ConsistentHypothesisNotMet,
            fit: None,
            matches: Vec::new(),
            common_values: Vec::new(),
            witness: None,
            seed: super::DEFAULT_SEED,
            grid_n: grid,
            notes: Vec::new(),
        }
    }

    fn conclude(mut self, triggered: bool, holds: bool) -> Self {
        self.triggered = triggered;
        self.holds = holds || !triggered;
        self.verdict = Verdict::from_outcome(triggered, holds);
        self
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }
}

fn match_point(set: &CValueSet, z: Complex64, tol: f64, mult_tol: f64) -> PointMatch {
    let nearest = set.nearest(z).map_or(Complex64::new(f64::NAN, f64::NAN), |v| v.value);
    let distance = (nearest - z).norm();
    PointMatch {
        point: z,
        cvalue: nearest,
        distance,
        multiplicity: set.multiplicity(z, mult_tol),
        matched: distance <= tol * set.scale.max(1.0),
    }
}

fn full_region(r: &ConvexRegion, report: &mut CorollaryReport) -> bool {
    if r.kind() == RegionKind::Full2D {
        true
    } else {
        report
            .notes
            .push(format!("region is {:?}; no curved boundary", r.kind()).to_lowercase());
        false
    }
}

/// `2·deg + 1` boundary points on a circle centered at `α` make `α` a multiple c-value.
pub fn check_circle_corollary(a: &ComplexMatrix, c: &WeightVector, grid: usize) -> Result<CorollaryReport> {
    let mut report = CorollaryReport::new("circle", grid);
    let region = build_region(a, c, grid)?;
    if !full_region(&region, &mut report) {
        return Ok(report.conclude(false, true));
    }
    let set = cvalue_set(a, c)?;
    let needed = 2 * set.len() + 1;
    let pts = region.vertices();
    if pts.len() < needed {
        report.notes.push(format!("{} boundary samples, {needed} needed", pts.len()));
        return Ok(report.conclude(false, true));
    }
    let fit = fit_circle(pts)?;
    report.fit = Some(FitSummary::new(&fit, pts.len()));
    let on_circle = fit.residual <= ARC_RESIDUAL_TOL * region.diameter();
    if !on_circle {
        return Ok(report.conclude(false, true));
    }
    let m = match_point(&set, fit.center, CIRCLE_MATCH_TOL, CIRCLE_MATCH_TOL);
    let holds = m.matched && m.multiplicity >= 2;
    report.matches.push(m);
    Ok(report.conclude(true, holds))
}

/// Boundary points on an ellipse: both foci are c-values.
pub fn check_ellipse_corollary(a: &ComplexMatrix, c: &WeightVector, grid: usize) -> Result<CorollaryReport> {
    let mut report = CorollaryReport::new("ellipse", grid);
    let region = build_region(a, c, grid)?;
    if !full_region(&region, &mut report) {
        return Ok(report.conclude(false, true));
    }
    let set = cvalue_set(a, c)?;
    let pts = region.vertices();
    let needed = (2 * set.len() + 1).max(5);
    if pts.len() < needed {
        report.notes.push(format!("{} boundary samples, {needed} needed", pts.len()));
        return Ok(report.conclude(false, true));
    }
    let fit = match fit_ellipse(pts) {
        Ok(f) => f,
        Err(Error::DegenerateConfiguration(why)) => {
            report.notes.push(why.to_string());
            return Ok(report.conclude(false, true));
        }
        Err(e) => return Err(e),
    };
    report.fit = Some(FitSummary::new(&fit, pts.len()));
    if fit.residual > ARC_RESIDUAL_TOL * region.diameter() {
        return Ok(report.conclude(false, true));
    }
    let mut holds = true;
    for focus in fit.foci {
        let m = match_point(&set, focus, ELLIPSE_MATCH_TOL, MATCH_TOL);
        holds &= m.matched;
        report.matches.push(m);
    }
    Ok(report.conclude(true, holds))
}

/// Every corner of `W_c(A)` is a c-value. Weights must be sorted descending.
pub fn check_sharp_point_corollary(
    a: &ComplexMatrix,
    c: &WeightVector,
    grid: usize,
) -> Result<CorollaryReport> {
    if !c.is_sorted_desc() {
        return Err(Error::WeightsNotSorted);
    }
    let mut report = CorollaryReport::new("sharp_point", grid);
    let region = build_region(a, c, grid)?;
    if region.is_empty() {
        report.notes.push("empty region".into());
        return Ok(report.conclude(false, true));
    }
    let set = cvalue_set(a, c)?;
    let sharp = detect_sharp_points(&region, a, c)?;
    let mut holds = true;
    let mut skipped = 0;
    for s in &sharp {
        if !s.support_attained {
            skipped += 1;
            continue;
        }
        let m = match_point(&set, s.point(), SHARP_MATCH_TOL, MATCH_TOL);
        holds &= m.matched;
        report.matches.push(m);
    }
    if skipped > 0 {
        report
            .notes
            .push(format!("{skipped} corners of the sampled polygon are not corners of the range"));
    }
    let triggered = !report.matches.is_empty();
    Ok(report.conclude(triggered, holds))
}

/// Whether `W_c(A)` is a disc (or the point) centered at the origin.
fn is_origin_disc(region: &ConvexRegion) -> Result<(bool, Option<ArcFit>)> {
    let tol = NILPOTENT_CENTER_TOL * region.scale();
    match region.kind() {
        RegionKind::Point => Ok((region.vertices()[0].norm() <= tol, None)),
        RegionKind::Full2D => {
            let fit = fit_circle(region.vertices())?;
            let ok = fit.residual <= ARC_RESIDUAL_TOL * region.diameter() && fit.center.norm() <= tol;
            Ok((ok, Some(fit)))
        }
        _ => Ok((false, None)),
    }
}

/// Sampled form of "every `W_c(A)` is a disc centered at 0 implies `A` nilpotent".
pub fn check_nilpotent_corollary(
    a: &ComplexMatrix,
    trials: usize,
    seed: u64,
    grid: usize,
) -> Result<CorollaryReport> {
    let mut report = CorollaryReport::new("nilpotent", grid);
    report.seed = seed;
    report.hypothesis_status = HypothesisStatus::Sampled;
    report
        .notes
        .push(format!("disc shape checked for {trials} random sorted weight vectors only"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = a.dim();
    for _ in 0..trials {
        let c = random_weights(&mut rng, n, true);
        let region = build_region(a, &c, grid)?;
        let (disc, fit) = is_origin_disc(&region)?;
        if !disc {
            report.witness = Some(c.as_slice().to_vec());
            report.fit = fit.map(|f| FitSummary::new(&f, region.vertices().len()));
            report
                .notes
                .push(format!("witness weights give a {:?} region that is not an origin disc", region.kind()).to_lowercase());
            return Ok(report.conclude(false, true));
        }
    }
    let scale = 1.0 + a.max_abs();
    let spectrum = eig_general(a)?;
    let mut holds = true;
    for z in &spectrum.eigenvalues {
        let ok = z.norm() <= NILPOTENT_EIGEN_TOL * scale;
        holds &= ok;
        report.matches.push(PointMatch {
            point: *z,
            cvalue: Complex64::new(0.0, 0.0),
            distance: z.norm(),
            multiplicity: spectrum.len(),
            matched: ok,
        });
    }
    Ok(report.conclude(true, holds))
}

/// Longest cyclic run of vertices of `r1` lying on the boundary of `r2`.
fn shared_run(r1: &ConvexRegion, r2: &ConvexRegion, tol: f64) -> Vec<Complex64> {
    let v = r1.vertices();
    let n = v.len();
    let on: Vec<bool> = v.iter().map(|&p| r2.boundary_distance(p) <= tol).collect();
    if on.iter().all(|&x| x) {
        return v.to_vec();
    }
    let start = on.iter().position(|&x| !x).unwrap();
    let mut best: Vec<Complex64> = Vec::new();
    let mut cur: Vec<Complex64> = Vec::new();
    for k in 1..=n {
        let i = (start + k) % n;
        if on[i] {
            cur.push(v[i]);
        } else {
            if cur.len() > best.len() {
                best = std::mem::take(&mut cur);
            }
            cur.clear();
        }
    }
    if cur.len() > best.len() {
        best = cur;
    }
    best
}

/// A shared curved (not straight) boundary stretch forces a common value.
pub fn check_curve_overlap(
    a: &ComplexMatrix,
    c: &WeightVector,
    b: &ComplexMatrix,
    d: &WeightVector,
    grid: usize,
) -> Result<CorollaryReport> {
    let mut report = CorollaryReport::new("curve_overlap", grid);
    let ra = build_region(a, c, grid)?;
    let rb = build_region(b, d, grid)?;
    if !full_region(&ra, &mut report) || !full_region(&rb, &mut report) {
        return Ok(report.conclude(false, true));
    }
    let scale = ra.scale().max(rb.scale());
    let run = shared_run(&ra, &rb, OVERLAP_TOL * scale);
    let curved = run.len() >= OVERLAP_RUN && {
        let (p, q) = (run[0], run[run.len() - 1]);
        let chord = q - p;
        let bow = run
            .iter()
            .map(|&z| {
                if chord.norm() == 0.0 {
                    (z - p).norm()
                } else {
                    ((z - p) * chord.conj()).im.abs() / chord.norm()
                }
            })
            .fold(0.0, f64::max);
        bow > 1e3 * OVERLAP_TOL * scale
    };
    report
        .notes
        .push(format!("longest shared run: {} vertices", run.len()));
    if !curved {
        return Ok(report.conclude(false, true));
    }
    let common = common_cvalue(&cvalue_set(a, c)?, &cvalue_set(b, d)?, MATCH_TOL);
    let holds = !common.is_empty();
    report.common_values = common;
    Ok(report.conclude(true, holds))
}

/// `W_c(A) = W_d(B)` forces a common value. Weights must be sorted descending.
pub fn check_equal_ranges(
    a: &ComplexMatrix,
    c: &WeightVector,
    b: &ComplexMatrix,
    d: &WeightVector,
    grid: usize,
) -> Result<CorollaryReport> {
    if !c.is_sorted_desc() || !d.is_sorted_desc() {
        return Err(Error::WeightsNotSorted);
    }
    let mut report = CorollaryReport::new("equal_ranges", grid);
    let ra = build_region(a, c, grid)?;
    let rb = build_region(b, d, grid)?;
    let scale = ra.scale().max(rb.scale());
    let dist = ra.hausdorff(&rb);
    report.notes.push(format!("hausdorff distance {dist:.3e}"));
    if ra.is_empty() || dist > EQUAL_RANGE_TOL * scale {
        return Ok(report.conclude(false, true));
    }
    let common = common_cvalue(&cvalue_set(a, c)?, &cvalue_set(b, d)?, MATCH_TOL);
    let holds = !common.is_empty();
    report.common_values = common;
    Ok(report.conclude(true, holds))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_from_jordan_block() {
        let j = ComplexMatrix::jordan_block(3, c(0.0, 0.0));
        let r = check_circle_corollary(&j, &WeightVector::unit(3, 1), 4096).unwrap();
        assert!(r.triggered && r.holds, "{r:?}");
        assert_eq!(r.matches[0].multiplicity, 3);
        let fit = r.fit.unwrap();
        assert!(fit.center.norm() < 1e-4);
        assert!((fit.semi_axes[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
    }

    #[test]
    fn circle_from_proof_matrix() {
        let alpha = c(0.4, -1.2);
        let b = ComplexMatrix::from_rows(vec![vec![alpha, c(1.5, 0.0)], vec![c(0.0, 0.0), alpha]]).unwrap();
        let r = check_circle_corollary(&b, &WeightVector::unit(2, 1), 4096).unwrap();
        assert!(r.triggered && r.holds, "{r:?}");
        assert!((r.matches[0].point - alpha).norm() < 1e-6);
    }

    #[test]
    fn square_is_not_a_circle() {
        let a = ComplexMatrix::roots_of_unity(4);
        let r = check_circle_corollary(&a, &WeightVector::unit(4, 1), 4096).unwrap();
        assert!(!r.triggered && r.holds);
        assert_eq!(r.verdict, Verdict::ConsistentHypothesisNotMet);
    }

    #[test]
    fn ellipse_foci_are_eigenvalues() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 2.0]]).unwrap();
        let r = check_ellipse_corollary(&a, &WeightVector::unit(2, 1), 4096).unwrap();
        assert!(r.triggered && r.holds, "{r:?}");
        let fit = r.fit.unwrap();
        assert!((fit.foci[0] - c(0.0, 0.0)).norm() < 1e-4);
        assert!((fit.foci[1] - c(2.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn sharp_points_of_normal_matrices() {
        let a = ComplexMatrix::roots_of_unity(4);
        let r = check_sharp_point_corollary(&a, &WeightVector::unit(4, 1), 4096).unwrap();
        assert!(r.triggered && r.holds);
        assert_eq!(r.matches.len(), 4);

        let b = ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]).unwrap();
        let w = WeightVector::new(vec![0.5, 0.5, 0.0]).unwrap();
        let r = check_sharp_point_corollary(&b, &w, 4096).unwrap();
        assert!(r.triggered && r.holds, "{r:?}");
        assert_eq!(r.matches.len(), 3);

        let j = ComplexMatrix::jordan_block(2, c(0.0, 0.0));
        let r = check_sharp_point_corollary(&j, &WeightVector::unit(2, 1), 4096).unwrap();
        assert!(!r.triggered && r.holds);

        let unsorted = WeightVector::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            check_sharp_point_corollary(&j, &unsorted, 256),
            Err(Error::WeightsNotSorted)
        ));
    }

    #[test]
    fn nilpotent_checks() {
        let j = ComplexMatrix::jordan_block(3, c(0.0, 0.0));
        let r = check_nilpotent_corollary(&j, 20, super::super::DEFAULT_SEED, 1024).unwrap();
        assert!(r.triggered && r.holds, "{r:?}");

        let d = ComplexMatrix::real_diag(&[1.0, 0.0]).unwrap();
        let r = check_nilpotent_corollary(&d, 20, super::super::DEFAULT_SEED, 1024).unwrap();
        assert!(!r.triggered && r.witness.is_some());

        let z = ComplexMatrix::zeros(2);
        let r = check_nilpotent_corollary(&z, 20, super::super::DEFAULT_SEED, 1024).unwrap();
        assert!(r.triggered && r.holds);
    }

    #[test]
    fn overlap_and_equal_ranges() {
        let j = ComplexMatrix::jordan_block(2, c(0.0, 0.0));
        let e = WeightVector::unit(2, 1);
        let r = check_curve_overlap(&j, &e, &j, &e, 1024).unwrap();
        assert!(r.triggered && r.holds);

        let sq = ComplexMatrix::roots_of_unity(4);
        let disc = ComplexMatrix::from_real_rows(&[&[0.0, 1.9], &[0.0, 0.0]]).unwrap();
        let r = check_curve_overlap(&sq, &WeightVector::unit(4, 1), &disc, &e, 1024).unwrap();
        assert!(!r.triggered);

        let a = ComplexMatrix::real_diag(&[1.0, 2.0]).unwrap();
        let b = ComplexMatrix::real_diag(&[1.0, 1.5, 2.0]).unwrap();
        let r = check_equal_ranges(&a, &e, &b, &WeightVector::unit(3, 1), 1024).unwrap();
        assert!(r.triggered && r.holds);
        assert_eq!(r.common_values.len(), 2);

        let big = j.scale(c(2.0, 0.0));
        let r = check_equal_ranges(&big, &e, &j, &e, 1024).unwrap();
        assert!(!r.triggered);
    }
}
