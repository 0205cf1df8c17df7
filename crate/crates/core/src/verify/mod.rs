//! Numerical checks of the boundary-coincidence results: equal support angles against the
//! Bezout bound, common boundary points, common supporting lines, and the corollaries.

mod corollary;
mod ensemble;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cvalues::{common_cvalue, cvalue_set, CValueSet, CommonValue, MATCH_TOL};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::region::{
    boundary_intersections, build_region, common_supporting_angle, RegionKind, SupportingAngle,
};
use crate::support::{EqualAngle, EqualSupportAngles, RootKind, SupportGap, WeightVector};

pub use corollary::{
    check_circle_corollary, check_curve_overlap, check_ellipse_corollary, check_equal_ranges,
    check_nilpotent_corollary, check_sharp_point_corollary, CorollaryReport, FitSummary,
    PointMatch, ARC_RESIDUAL_TOL,
};
pub use ensemble::{
    random_matrix, random_weights, soundness_ensemble, EnsembleReport, EnsembleTrial,
    SEPARATION_TOL,
};

/// Seed recorded in every report unless another is supplied.
pub const DEFAULT_SEED: u64 = 0x5EED;
/// Relative tolerance for `h(θ + π) = −h(θ)` when identifying antipodal roots.
pub const ANTIPODE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ConsistentHypothesisMet,
    ConsistentHypothesisNotMet,
    #[serde(rename = "INCONSISTENT")]
    Inconsistent,
}

impl Verdict {
    /// Hypothesis met with no common value is a numerical counterexample candidate.
    pub fn from_outcome(hypothesis_met: bool, conclusion_holds: bool) -> Self {
        match (hypothesis_met, conclusion_holds) {
            (true, true) => Self::ConsistentHypothesisMet,
            (true, false) => Self::Inconsistent,
            (false, _) => Self::ConsistentHypothesisNotMet,
        }
    }

    pub fn is_consistent(self) -> bool {
        self != Self::Inconsistent
    }
}

/// How much of a hypothesis the numerics actually establish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    Verified,
    Sampled,
    Assumed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleCounts {
    pub crossing: usize,
    pub tangential: usize,
    pub identically_zero: bool,
    /// Arcs on which the gap vanishes identically (infinitely many equal angles).
    pub zero_arcs: usize,
    /// Roots `θ`, `θ + π` describing the same projective point, counted once.
    pub antipodal_pairs: usize,
}

impl AngleCounts {
    pub fn distinct(&self) -> usize {
        self.crossing + self.tangential
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub bound: u64,
    pub angles: AngleCounts,
    pub hypothesis_met: bool,
    /// Status of the counting hypothesis; irreducibility is never checked.
    pub hypothesis_status: HypothesisStatus,
    pub common_values: Vec<CommonValue>,
    pub verdict: Verdict,
    pub seed: u64,
    #[serde(rename = "gridN")]
    pub grid_n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub boundary_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub supporting_angles: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub applicable: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }
}

/// Merges cyclically adjacent angles closer than `2π/grid`. A merged group is tangential
/// only when all its members are.
pub fn merge_angles(roots: &[EqualAngle], grid: usize) -> Vec<EqualAngle> {
    if roots.is_empty() {
        return Vec::new();
    }
    let sep = TAU / grid as f64;
    let mut sorted = roots.to_vec();
    sorted.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let mut groups: Vec<Vec<EqualAngle>> = vec![vec![sorted[0]]];
    for r in &sorted[1..] {
        let last = groups.last_mut().unwrap();
        if r.theta - last.last().unwrap().theta < sep {
            last.push(*r);
        } else {
            groups.push(vec![*r]);
        }
    }
    if groups.len() > 1 {
        let first = groups[0][0].theta;
        let last = groups.last().unwrap().last().unwrap().theta;
        if first + TAU - last < sep {
            let tail = groups.pop().unwrap();
            groups[0].extend(tail);
        }
    }
    groups
        .into_iter()
        .map(|g| EqualAngle {
            theta: g[0].theta,
            kind: if g.iter().all(|r| r.kind == RootKind::Tangential) {
                RootKind::Tangential
            } else {
                RootKind::Crossing
            },
        })
        .collect()
}

fn bezout_bound(a: &CValueSet, b: &CValueSet) -> u64 {
    let d = a.degree.degree.saturating_mul(b.degree.degree);
    u64::try_from(d).unwrap_or(u64::MAX)
}

/// Drops the second root of every pair `θ`, `θ + π` with `h(θ + π) = −h(θ)`: both give the
/// same point `(e^{iθ} : e^{-iθ} : 2h(θ))` of the projective curve `r(A;c) = 0`.
fn identify_antipodes(roots: Vec<EqualAngle>, gap: &SupportGap<'_>, grid: usize) -> Result<(Vec<EqualAngle>, usize)> {
    let sep = TAU / grid as f64;
    let tol = ANTIPODE_TOL * gap.scale();
    let mut dropped = vec![false; roots.len()];
    let mut pairs = 0;
    for i in 0..roots.len() {
        if dropped[i] {
            continue;
        }
        for j in i + 1..roots.len() {
            if dropped[j] {
                continue;
            }
            let off = (roots[j].theta - roots[i].theta - PI).rem_euclid(TAU);
            if off.min(TAU - off) >= sep {
                continue;
            }
            let hi = gap.left.value(roots[i].theta)?;
            let hj = gap.left.value(roots[j].theta)?;
            if (hi + hj).abs() <= tol {
                dropped[j] = true;
                pairs += 1;
                break;
            }
        }
    }
    let kept = roots
        .into_iter()
        .zip(dropped)
        .filter_map(|(r, d)| (!d).then_some(r))
        .collect();
    Ok((kept, pairs))
}

fn count_angles(found: &EqualSupportAngles, gap: &SupportGap<'_>, grid: usize) -> Result<AngleCounts> {
    let (merged, antipodal_pairs) = identify_antipodes(merge_angles(found.roots(), grid), gap, grid)?;
    let (identically_zero, zero_arcs) = match found {
        EqualSupportAngles::IdenticallyZero => (true, 0),
        EqualSupportAngles::IdenticallyZeroOnArc { arcs, .. } => (false, arcs.len()),
        EqualSupportAngles::Isolated(_) => (false, 0),
    };
    Ok(AngleCounts {
        crossing: merged.iter().filter(|r| r.kind == RootKind::Crossing).count(),
        tangential: merged.iter().filter(|r| r.kind == RootKind::Tangential).count(),
        identically_zero,
        zero_arcs,
        antipodal_pairs,
    })
}

fn finish(
    theorem: &str,
    bound: u64,
    angles: AngleCounts,
    hypothesis_met: bool,
    common_values: Vec<CommonValue>,
    seed: u64,
    grid: usize,
) -> TheoremReport {
    let verdict = Verdict::from_outcome(hypothesis_met, !common_values.is_empty());
    TheoremReport {
        theorem: theorem.to_string(),
        bound,
        angles,
        hypothesis_met,
        hypothesis_status: HypothesisStatus::Assumed,
        common_values,
        verdict,
        seed,
        grid_n: grid,
        boundary_points: None,
        supporting_angles: None,
        applicable: None,
        notes: Vec::new(),
    }
}

/// More than `deg(A;c)·deg(B;d)` angles with equal supports force a common value.
pub fn verify_theorem_main(
    a: &ComplexMatrix,
    c: &WeightVector,
    b: &ComplexMatrix,
    d: &WeightVector,
    grid: usize,
) -> Result<TheoremReport> {
    verify_theorem_main_seeded(a, c, b, d, grid, DEFAULT_SEED)
}

pub fn verify_theorem_main_seeded(
    a: &ComplexMatrix,
    c: &WeightVector,
    b: &ComplexMatrix,
    d: &WeightVector,
    grid: usize,
    seed: u64,
) -> Result<TheoremReport> {
    let set_a = cvalue_set(a, c)?;
    let set_b = cvalue_set(b, d)?;
    let bound = bezout_bound(&set_a, &set_b);
    let gap = SupportGap::new(a, c, b, d)?;
    let found = gap.equal_angles(grid)?;
    let angles = count_angles(&found, &gap, grid)?;
    let met = angles.identically_zero
        || angles.zero_arcs > 0
        || angles.distinct() as u64 > bound;
    let common = common_cvalue(&set_a, &set_b, MATCH_TOL);
    let mut report = finish("equal_support_angles", bound, angles, met, common, seed, grid);
    if angles.identically_zero {
        report.notes.push("support functions agree at every sample".into());
    } else if angles.zero_arcs > 0 {
        report.notes.push("support functions agree on whole arcs".into());
    }
    Ok(report)
}

/// The same count restricted to genuine common supporting lines. Applicable when both
/// weight vectors are sorted descending, where `Σ c_j λ_j(H_θ)` is a true support function.
pub fn verify_supporting_lines(
    a: &ComplexMatrix,
    c: &WeightVector,
    b: &ComplexMatrix,
    d: &WeightVector,
    grid: usize,
) -> Result<TheoremReport> {
    let mut report = verify_theorem_main(a, c, b, d, grid)?;
    report.theorem = "common_supporting_lines".into();
    let applicable = c.is_sorted_desc() && d.is_sorted_desc();
    report.applicable = Some(applicable);
    if !applicable {
        report.hypothesis_met = false;
        report.verdict = Verdict::ConsistentHypothesisNotMet;
        report
            .notes
            .push("unsorted weights: equal supports need not be supporting lines".into());
    }
    Ok(report)
}

/// Common boundary points: each consecutive triple yields a common supporting angle, and the
/// distinct angles are counted against the bound.
pub fn verify_boundary_points(
    a: &ComplexMatrix,
    c: &WeightVector,
    b: &ComplexMatrix,
    d: &WeightVector,
    grid: usize,
) -> Result<TheoremReport> {
    let ra = build_region(a, c, grid)?;
    let rb = build_region(b, d, grid)?;
    for r in [&ra, &rb] {
        match r.kind() {
            RegionKind::Full2D => {}
            RegionKind::Empty => return Err(Error::DegenerateRegion("empty")),
            RegionKind::Segment => return Err(Error::DegenerateRegion("segment")),
            RegionKind::Point => return Err(Error::DegenerateRegion("point")),
        }
    }
    let set_a = cvalue_set(a, c)?;
    let set_b = cvalue_set(b, d)?;
    let bound = bezout_bound(&set_a, &set_b);
    let common = common_cvalue(&set_a, &set_b, MATCH_TOL);
    let hits = boundary_intersections(&ra, &rb);

    if hits.identical {
        let angles = AngleCounts {
            identically_zero: true,
            ..AngleCounts::default()
        };
        let mut report = finish("common_boundary_points", bound, angles, true, common, DEFAULT_SEED, grid);
        report.boundary_points = Some(0);
        report
            .notes
            .push("boundaries coincide; equal-ranges case".into());
        return Ok(report);
    }

    let mut points = hits.points.clone();
    let k = points.len();
    let mut phis: Vec<EqualAngle> = Vec::new();
    let mut failures = 0;
    if k >= 3 {
        let origin = points.iter().sum::<Complex64>() / k as f64;
        points.sort_by(|p, q| (p - origin).arg().total_cmp(&(q - origin).arg()));
        for l in 0..k {
            let z = [points[l], points[(l + 1) % k], points[(l + 2) % k]];
            match common_supporting_angle(a, c, b, d, z) {
                Ok(SupportingAngle { phi, .. }) => phis.push(EqualAngle {
                    theta: phi,
                    kind: RootKind::Crossing,
                }),
                Err(Error::NoSignChange { .. }) => failures += 1,
                Err(e) => return Err(e),
            }
        }
    }
    let merged = merge_angles(&phis, grid);
    let angles = AngleCounts {
        crossing: merged.len(),
        ..AngleCounts::default()
    };
    let met = merged.len() as u64 > bound;
    let mut report = finish("common_boundary_points", bound, angles, met, common, DEFAULT_SEED, grid);
    report.boundary_points = Some(k);
    report.supporting_angles = Some(merged.iter().map(|r| r.theta).collect());
    if !hits.overlaps.is_empty() {
        report
            .notes
            .push(format!("{} shared boundary segments excluded", hits.overlaps.len()));
    }
    if failures > 0 {
        report
            .notes
            .push(format!("{failures} triples without a sign change of the gap"));
    }
    Ok(report)
}
