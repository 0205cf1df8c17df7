//! Exact weighted ranges of normal matrices.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use super::{clip, ConvexRegion, HalfPlane, RELAXATION};
use crate::eigen::eig_hermitian;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::support::{directional, wrap_angle, WeightVector};

pub const NORMAL_MAX_DIM: usize = 8;
/// `‖AA* − A*A‖ ≤ NORMAL_TOL·‖A‖²` (max-entry norms).
pub const NORMAL_TOL: f64 = 1e-10;

const PROBE_ANGLES: [f64; 4] = [0.613_592_315, 2.094_395_102 + 0.1, 4.0, 5.3];

/// Eigenvalues of a normal matrix as Rayleigh quotients of eigenvectors of `H_θ(A)`.
///
/// At a generic `θ` the eigenvectors of `H_θ(A)` diagonalize `A` itself, which keeps
/// repeated eigenvalues accurate (no polynomial root finding involved).
pub fn normal_eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim();
    let tol = 1e-9 * (1.0 + a.max_abs());
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for &theta in &PROBE_ANGLES {
        let eig = eig_hermitian(&a.herm_part(theta))?;
        let mut mus = Vec::with_capacity(n);
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let x = eig.vector(j);
            let ax: Vec<Complex64> = (0..n)
                .map(|r| (0..n).map(|k| a[(r, k)] * x[k]).sum())
                .collect();
            let mu: Complex64 = (0..n).map(|r| x[r].conj() * ax[r]).sum();
            let res = (0..n).map(|r| (ax[r] - mu * x[r]).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(res);
            mus.push(mu);
        }
        if worst <= tol {
            return Ok(mus);
        }
        if best.as_ref().is_none_or(|b| worst < b.0) {
            best = Some((worst, mus));
        }
    }
    Err(Error::NonConvergence {
        residual: best.map_or(f64::INFINITY, |b| b.0),
    })
}

/// `W(A;c)` for normal `A`, from the finitely many angles where the order of
/// `Re(e^{iθ}μ_k)` changes. Between two such angles the support function is that of the
/// single point `Σ c_j μ_{σ(j)}`.
pub fn polygon_for_normal(a: &ComplexMatrix, c: &WeightVector) -> Result<ConvexRegion> {
    let n = a.dim();
    if n != c.len() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    if n > NORMAL_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            n,
            max: NORMAL_MAX_DIM,
        });
    }
    let norm = a.max_abs();
    let commutator = a.commutator_defect();
    if commutator > NORMAL_TOL * norm * norm.max(1.0) {
        return Err(Error::NotNormal { commutator });
    }
    let mu = normal_eigenvalues(a)?;
    let w = c.as_slice();

    let mut cuts = vec![0.0];
    for k in 0..n {
        for l in k + 1..n {
            let diff = mu[k] - mu[l];
            if diff.norm() <= 1e-12 * (1.0 + norm) {
                continue;
            }
            let t = wrap_angle(FRAC_PI_2 - diff.arg());
            cuts.push(t);
            cuts.push(wrap_angle(t + PI));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);

    let vertex_at = |theta: f64| -> Complex64 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&p, &q| directional(theta, mu[q]).total_cmp(&directional(theta, mu[p])));
        order.iter().zip(w).map(|(&k, &cj)| mu[k] * cj).sum()
    };

    let mut angles_points: Vec<(f64, Complex64)> = Vec::new();
    for i in 0..cuts.len() {
        let lo = cuts[i];
        let hi = if i + 1 < cuts.len() { cuts[i + 1] } else { TAU };
        if hi - lo <= 0.0 {
            continue;
        }
        let point = vertex_at(0.5 * (lo + hi));
        let pieces = ((hi - lo) / (PI / 3.0)).ceil().max(1.0) as usize;
        for s in 0..=pieces {
            angles_points.push((lo + (hi - lo) * s as f64 / pieces as f64, point));
        }
    }

    let max_h = angles_points
        .iter()
        .map(|&(t, p)| directional(t, p).abs())
        .fold(0.0, f64::max);
    let scale = 1.0 + norm.max(max_h);
    let relax = RELAXATION * scale;
    let planes: Vec<HalfPlane> = angles_points
        .iter()
        .map(|&(t, p)| HalfPlane::new(t, directional(t, p) + relax))
        .collect();
    let region = match clip(&planes, 100.0 * relax) {
        Some(c) => ConvexRegion::from_polygon(c.vertices, scale, 0),
        None => ConvexRegion::empty(scale, 0),
    };
    Ok(region)
}
