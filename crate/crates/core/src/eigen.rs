//! Eigenvalue solvers.
//!
//! Hermitian matrices go through cyclic complex Jacobi. General matrices are
//! reduced to their characteristic polynomial with the Faddeev–LeVerrier
//! recurrence and the roots are found by Aberth–Ehrlich iteration; this is
//! only meant for small dimensions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix};

/// Off-diagonal Frobenius tolerance, relative to `‖H‖_F`.
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Largest dimension accepted by [`eig_general`].
pub const GENERAL_MAX_DIM: usize = 12;
pub const ABERTH_TOL: f64 = 1e-12;
pub const ABERTH_MAX_ITER: usize = 200;
/// Roots closer than this (relative, on the unit-scaled matrix) are treated as one multiple root.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `j` (stored row-major, `vectors[i * n + j]`) is the eigenvector of `values[j]`.
    pub vectors: Vec<Complex64>,
    n: usize,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self.vectors[i * self.n + j]).collect()
    }
}

/// Multiset of eigenvalues of a general matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }
}

pub fn eig_hermitian(h: &HermitianMatrix) -> Result<HermitianEigen> {
    eig_hermitian_with_tol(h, JACOBI_TOL)
}

pub fn eig_hermitian_with_tol(h: &HermitianMatrix, tol: f64) -> Result<HermitianEigen> {
    let n = h.dim();
    let (diag, vectors) = jacobi(h, tol, true)?;
    let vectors = vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]));
    let values = order.iter().map(|&k| diag[k]).collect();
    let mut sorted = vec![Complex64::new(0.0, 0.0); n * n];
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            sorted[i * n + dst] = vectors[i * n + src];
        }
    }
    Ok(HermitianEigen {
        values,
        vectors: sorted,
        n,
    })
}

/// Descending eigenvalues only; skips eigenvector accumulation.
pub fn eigvals_hermitian(h: &HermitianMatrix, tol: f64) -> Result<Vec<f64>> {
    let (mut diag, _) = jacobi(h, tol, false)?;
    diag.sort_by(|a, b| b.total_cmp(a));
    Ok(diag)
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

#[allow(clippy::type_complexity)]
fn jacobi(
    h: &HermitianMatrix,
    tol: f64,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<Complex64>>)> {
    let n = h.dim();
    let mut a = h.as_slice().to_vec();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n).as_slice().to_vec());
    let norm = h.frobenius();
    let threshold = tol * norm;

    let mut converged = false;
    for _sweep in 0..=JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a, n);
        if off <= threshold || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, v.as_deref_mut(), n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            residual: off_diagonal_norm(&a, n),
        });
    }
    let diag = (0..n).map(|i| a[i * n + i].re).collect();
    Ok((diag, v))
}

/// Annihilates `a[p][q]` with the unitary `U = diag(1, e^{-iφ})·R(c, s)`.
fn rotate(a: &mut [Complex64], v: Option<&mut [Complex64]>, n: usize, p: usize, q: usize) {
    let b = a[p * n + q];
    let abs_b = b.norm();
    if abs_b == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let phase = b / abs_b;
    let theta = (aqq - app) / (2.0 * abs_b);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let e = phase.conj();
    let u00 = Complex64::new(c, 0.0);
    let u01 = Complex64::new(s, 0.0);
    let u10 = -e * s;
    let u11 = e * c;

    for k in 0..n {
        let hp = a[k * n + p];
        let hq = a[k * n + q];
        a[k * n + p] = hp * u00 + hq * u10;
        a[k * n + q] = hp * u01 + hq * u11;
    }
    for k in 0..n {
        let hp = a[p * n + k];
        let hq = a[q * n + k];
        a[p * n + k] = u00.conj() * hp + u10.conj() * hq;
        a[q * n + k] = u01.conj() * hp + u11.conj() * hq;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;

    if let Some(v) = v {
        for k in 0..n {
            let vp = v[k * n + p];
            let vq = v[k * n + q];
            v[k * n + p] = vp * u00 + vq * u10;
            v[k * n + q] = vp * u01 + vq * u11;
        }
    }
}

/// Characteristic polynomial `det(tI - A)`, coefficients low-to-high, via Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut m = ComplexMatrix::zeros(n);
    for k in 1..=n {
        m = a.mul(&m).shift(coeffs[n - k + 1]);
        let am = a.mul(&m);
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

/// All eigenvalues of a general matrix, ordered by real part then imaginary part.
pub fn eig_general(a: &ComplexMatrix) -> Result<Spectrum> {
    let n = a.dim();
    if n > GENERAL_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            n,
            max: GENERAL_MAX_DIM,
        });
    }
    let s = a.max_abs();
    if s == 0.0 {
        return Ok(Spectrum {
            eigenvalues: vec![Complex64::new(0.0, 0.0); n],
        });
    }
    let scaled = a.scale(Complex64::new(1.0 / s, 0.0));
    let coeffs = characteristic_polynomial(&scaled);
    let radius = 1.0 + scaled.row_sum_norm();
    let roots = average_clusters(aberth(&coeffs, radius, ABERTH_TOL, ABERTH_MAX_ITER)?);
    let mut eigenvalues: Vec<Complex64> = roots.into_iter().map(|z| z * s).collect();
    eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(Spectrum { eigenvalues })
}

/// Roots of a multiple eigenvalue scatter by about `ε^{1/m}`; their mean is accurate.
fn average_clusters(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= CLUSTER_TOL * (1.0 + roots[i].norm()) {
                let (from, to) = (label[j], label[i]);
                for l in label.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            }
        }
    }
    for g in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| label[k] == g).collect();
        if members.len() > 1 {
            let mean = members.iter().map(|&k| roots[k]).sum::<Complex64>() / members.len() as f64;
            for k in members {
                roots[k] = mean;
            }
        }
    }
    roots
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Rounding-error bound of Horner's scheme at `z`.
fn horner_bound(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let mut acc = 0.0;
    for c in coeffs.iter().rev() {
        acc = acc * r + c.norm();
    }
    acc * 8.0 * f64::EPSILON * coeffs.len() as f64
}

/// Simultaneous Aberth–Ehrlich iteration for a monic polynomial (coefficients low-to-high).
///
/// Initial guesses sit on a circle of the given radius with an irrational angular offset.
pub fn aberth(
    coeffs: &[Complex64],
    radius: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            Complex64::from_polar(
                radius,
                2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4,
            )
        })
        .collect();
    let mut done = vec![false; deg];

    for _ in 0..max_iter {
        let mut all_done = true;
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() <= horner_bound(&monic, z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            let w = if w.re.is_finite() && w.im.is_finite() {
                w
            } else {
                // derivative vanished: nudge off the critical point
                Complex64::new(tol * (1.0 + z[i].norm()), 0.0)
            };
            z[i] -= w;
            if w.norm() <= tol * (1.0 + z[i].norm()) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    let residual = z
        .iter()
        .map(|&zi| horner(&monic, zi).0.norm())
        .fold(0.0, f64::max);
    Err(Error::NonConvergence { residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_multiset_close(got: &[Complex64], want: &[Complex64], tol: f64) {
        assert_eq!(got.len(), want.len());
        let mut used = vec![false; want.len()];
        for g in got {
            let k = (0..want.len())
                .filter(|&k| !used[k])
                .min_by(|&a, &b| (want[a] - g).norm().total_cmp(&(want[b] - g).norm()))
                .unwrap();
            assert!((want[k] - g).norm() < tol, "{g} vs {:?}", want);
            used[k] = true;
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = ComplexMatrix::jordan_block(2, c(0.0, 0.0));
        let e = eig_hermitian(&a.herm_part(0.0)).unwrap();
        assert!((e.values[0] - 0.5).abs() < 1e-15);
        assert!((e.values[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn diagonal_is_fixed_point() {
        let h = HermitianMatrix::new(&ComplexMatrix::real_diag(&[1.0, 3.0]).unwrap()).unwrap();
        let e = eig_hermitian(&h).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
    }

    #[test]
    fn jordan_herm_part_has_constant_spectrum() {
        let a = ComplexMatrix::jordan_block(2, c(0.0, 0.0));
        for k in 0..40 {
            let theta = k as f64 * 0.157;
            let vals = eigvals_hermitian(&a.herm_part(theta), JACOBI_TOL).unwrap();
            assert!((vals[0] - 0.5).abs() < 1e-14 && (vals[1] + 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenpairs_satisfy_residual_and_orthonormality() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.5, -2.0), c(0.0, 1.0), c(-1.0, 0.2)],
            vec![c(0.3, 0.3), c(-2.0, 1.0), c(1.5, 0.0), c(0.7, -0.7)],
            vec![c(0.0, -1.0), c(2.0, 2.0), c(0.1, 0.0), c(0.0, 0.4)],
            vec![c(1.0, 1.0), c(-0.5, 0.0), c(0.9, -0.3), c(2.5, 0.0)],
        ])
        .unwrap();
        let h = a.herm_part(0.9);
        let e = eig_hermitian(&h).unwrap();
        let n = h.dim();
        let norm = h.frobenius();
        for j in 0..n {
            let x = e.vector(j);
            for i in 0..n {
                let hx: Complex64 = (0..n).map(|k| h[(i, k)] * x[k]).sum();
                assert!((hx - x[i] * e.values[j]).norm() <= 1e-10 * norm);
            }
            for k in 0..n {
                let y = e.vector(k);
                let dot: Complex64 = x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((dot - want).norm() < 1e-10);
            }
        }
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let sum: f64 = e.values.iter().sum();
        assert!((sum - h.trace()).abs() <= 1e-10 * (1.0 + h.trace().abs()));
    }

    #[test]
    fn general_eigenvalues_of_fixtures() {
        let alpha = c(0.3, -0.7);
        let b = ComplexMatrix::from_rows(vec![vec![alpha, c(1.8, 0.0)], vec![c(0.0, 0.0), alpha]])
            .unwrap();
        assert_multiset_close(&eig_general(&b).unwrap().eigenvalues, &[alpha, alpha], 1e-7);

        let d = ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]).unwrap();
        assert_multiset_close(
            &eig_general(&d).unwrap().eigenvalues,
            &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)],
            1e-12,
        );

        let r = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert_multiset_close(&eig_general(&r).unwrap().eigenvalues, &[c(0.0, 1.0), c(0.0, -1.0)], 1e-12);
    }

    #[test]
    fn nilpotent_jordan_block_has_zero_spectrum() {
        let j = ComplexMatrix::jordan_block(3, c(0.0, 0.0));
        let s = eig_general(&j).unwrap();
        assert!(s.eigenvalues.iter().all(|z| z.norm() < 1e-9));
        assert!(eig_general(&ComplexMatrix::zeros(4)).unwrap().eigenvalues.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn faddeev_leverrier_of_companion_like_matrix() {
        // diag(1,2,3): (t-1)(t-2)(t-3) = t^3 - 6t^2 + 11t - 6
        let p = characteristic_polynomial(&ComplexMatrix::real_diag(&[1.0, 2.0, 3.0]).unwrap());
        let want = [-6.0, 11.0, -6.0, 1.0];
        for (got, w) in p.iter().zip(want) {
            assert!((got - c(w, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_oversized_general_problem() {
        let a = ComplexMatrix::identity(13);
        assert!(matches!(eig_general(&a), Err(Error::DimensionTooLarge { n: 13, .. })));
    }
}
