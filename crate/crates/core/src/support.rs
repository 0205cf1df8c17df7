//! Weighted support function `h(θ) = Σ c_j λ_j(H_θ(A))` and equal-support angle search.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{eig_hermitian_with_tol, eigvals_hermitian, JACOBI_TOL};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

pub const DEFAULT_GRID: usize = 4096;
/// Smallest grid accepted by the equal-angle scan.
pub const MIN_SCAN_GRID: usize = 256;
/// Relative threshold below which a gap sample counts as zero.
pub const ZERO_GAP_TOL: f64 = 1e-12;
/// Relative threshold for a touching (non-crossing) root.
pub const TANGENTIAL_TOL: f64 = 1e-8;
/// Angular resolution of refined roots.
pub const ROOT_ANGLE_TOL: f64 = 1e-10;
/// Relative eigenvalue gap under which differently weighted eigenvalues are treated as tied.
pub const EIGEN_GAP_TOL: f64 = 1e-8;

/// Real weights `c_1, …, c_n` applied to the descending eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightFile", into = "WeightFile")]
pub struct WeightVector {
    c: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WeightFile {
    c: Vec<f64>,
}

impl TryFrom<WeightFile> for WeightVector {
    type Error = Error;

    fn try_from(w: WeightFile) -> Result<Self> {
        WeightVector::new(w.c)
    }
}

impl From<WeightVector> for WeightFile {
    fn from(w: WeightVector) -> Self {
        WeightFile { c: w.c }
    }
}

impl WeightVector {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if let Some(index) = c.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteWeight { index });
        }
        Ok(Self { c })
    }

    /// The unit vector `e_k` of length `n`; `k` is 1-based.
    pub fn unit(n: usize, k: usize) -> Self {
        assert!((1..=n).contains(&k), "unit index {k} out of 1..={n}");
        let mut c = vec![0.0; n];
        c[k - 1] = 1.0;
        Self { c }
    }

    /// `(1/k, …, 1/k, 0, …, 0)`: the weights of the k-numerical range.
    pub fn k_average(n: usize, k: usize) -> Self {
        assert!((1..=n).contains(&k));
        let mut c = vec![0.0; n];
        c[..k].fill(1.0 / k as f64);
        Self { c }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    pub fn sum(&self) -> f64 {
        self.c.iter().sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.c.iter().map(|x| x.abs()).sum()
    }

    pub fn nonzero_count(&self) -> usize {
        self.c.iter().filter(|&&x| x != 0.0).count()
    }

    /// Distinct nonzero weight values with their multiplicities, largest value first.
    pub fn signature(&self) -> Vec<(f64, usize)> {
        let mut vals: Vec<f64> = self.c.iter().copied().filter(|&x| x != 0.0).collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        let mut sig: Vec<(f64, usize)> = Vec::new();
        for v in vals {
            match sig.last_mut() {
                Some((w, m)) if *w == v => *m += 1,
                _ => sig.push((v, 1)),
            }
        }
        sig
    }

    pub fn reversed(&self) -> Self {
        Self {
            c: self.c.iter().rev().copied().collect(),
        }
    }

    pub fn is_sorted_desc(&self) -> bool {
        self.c.windows(2).all(|w| w[0] >= w[1])
    }
}

/// Descending rearrangement of `c` and the permutation `σ` (0-based) with `sorted[i] = c[σ[i]]`.
///
/// The sort is stable, so equal weights keep their original order.
pub fn sort_weights_desc(c: &WeightVector) -> (WeightVector, Vec<usize>) {
    let mut sigma: Vec<usize> = (0..c.len()).collect();
    sigma.sort_by(|&a, &b| c.c[b].total_cmp(&c.c[a]));
    let sorted = sigma.iter().map(|&i| c.c[i]).collect();
    (WeightVector { c: sorted }, sigma)
}

/// Support function of a matrix/weight pair with a configurable eigensolver tolerance.
#[derive(Clone, Copy, Debug)]
pub struct Support<'a> {
    matrix: &'a ComplexMatrix,
    weights: &'a WeightVector,
    eig_tol: f64,
}

impl<'a> Support<'a> {
    pub fn new(matrix: &'a ComplexMatrix, weights: &'a WeightVector) -> Result<Self> {
        if matrix.dim() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                found: weights.len(),
            });
        }
        Ok(Self {
            matrix,
            weights,
            eig_tol: JACOBI_TOL,
        })
    }

    pub fn with_eig_tol(mut self, tol: f64) -> Self {
        self.eig_tol = tol;
        self
    }

    pub fn matrix(&self) -> &'a ComplexMatrix {
        self.matrix
    }

    pub fn weights(&self) -> &'a WeightVector {
        self.weights
    }

    /// Bound on `|h|` used to make tolerances relative.
    pub fn magnitude(&self) -> f64 {
        self.matrix.max_abs() * self.matrix.dim() as f64 * self.weights.l1_norm().max(1.0)
    }

    pub fn value(&self, theta: f64) -> Result<f64> {
        let vals = eigvals_hermitian(&self.matrix.herm_part(theta), self.eig_tol)?;
        Ok(vals.iter().zip(self.weights.as_slice()).map(|(l, c)| c * l).sum())
    }

    /// Hellmann–Feynman derivative `Σ c_j x_j* H'_θ x_j`, with `H'_θ = H_{θ+π/2}`.
    pub fn derivative(&self, theta: f64) -> Result<f64> {
        let h = self.matrix.herm_part(theta);
        let eig = eig_hermitian_with_tol(&h, self.eig_tol)?;
        let c = self.weights.as_slice();
        let tol = EIGEN_GAP_TOL * (1.0 + h.frobenius());
        for j in 0..c.len().saturating_sub(1) {
            let gap = eig.values[j] - eig.values[j + 1];
            if c[j] != c[j + 1] && gap <= tol {
                return Err(Error::DegenerateEigenvalue { gap });
            }
        }
        let dh = self.matrix.herm_part(theta + PI / 2.0);
        Ok((0..c.len())
            .filter(|&j| c[j] != 0.0)
            .map(|j| c[j] * dh.quadratic_form(&eig.vector(j)))
            .sum())
    }

    /// Derivative with a finite-difference fallback where the analytic form is unavailable.
    pub fn derivative_or_fd(&self, theta: f64) -> Result<f64> {
        const STEP: f64 = 1e-5;
        match self.derivative(theta) {
            Ok(d) => Ok(d),
            Err(Error::DegenerateEigenvalue { .. }) => {
                let h0 = self.value(theta)?;
                let right = (self.value(theta + STEP)? - h0) / STEP;
                let left = (h0 - self.value(theta - STEP)?) / STEP;
                Ok(0.5 * (left + right))
            }
            Err(e) => Err(e),
        }
    }

    pub fn profile(&self, grid: usize) -> Result<SupportProfile> {
        if grid == 0 {
            return Err(Error::InvalidGrid {
                grid,
                reason: "must be positive",
            });
        }
        let thetas = uniform_grid(grid);
        let mut values = Vec::with_capacity(grid);
        let mut derivatives = Vec::with_capacity(grid);
        for &t in &thetas {
            values.push(self.value(t)?);
            derivatives.push(self.derivative_or_fd(t)?);
        }
        Ok(SupportProfile {
            grid: thetas,
            values,
            derivatives,
        })
    }
}

/// `θ_i = 2πi/N`, `i = 0..N`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// Maps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Sampled support function.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

pub fn weighted_support(a: &ComplexMatrix, c: &WeightVector, theta: f64) -> Result<f64> {
    Support::new(a, c)?.value(theta)
}

pub fn support_derivative(a: &ComplexMatrix, c: &WeightVector, theta: f64) -> Result<f64> {
    Support::new(a, c)?.derivative(theta)
}

/// `h_{A,c}(θ) - h_{B,d}(θ)`.
pub fn support_gap(
    a: &ComplexMatrix,
    c: &WeightVector,
    b: &ComplexMatrix,
    d: &WeightVector,
    theta: f64,
) -> Result<f64> {
    Ok(weighted_support(a, c, theta)? - weighted_support(b, d, theta)?)
}

/// Difference of two support functions.
#[derive(Clone, Copy, Debug)]
pub struct SupportGap<'a> {
    pub left: Support<'a>,
    pub right: Support<'a>,
}

impl<'a> SupportGap<'a> {
    pub fn new(
        a: &'a ComplexMatrix,
        c: &'a WeightVector,
        b: &'a ComplexMatrix,
        d: &'a WeightVector,
    ) -> Result<Self> {
        Ok(Self {
            left: Support::new(a, c)?,
            right: Support::new(b, d)?,
        })
    }

    pub fn with_eig_tol(self, tol: f64) -> Self {
        Self {
            left: self.left.with_eig_tol(tol),
            right: self.right.with_eig_tol(tol),
        }
    }

    pub fn value(&self, theta: f64) -> Result<f64> {
        Ok(self.left.value(theta)? - self.right.value(theta)?)
    }

    pub fn scale(&self) -> f64 {
        1.0 + self.left.magnitude().max(self.right.magnitude())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    Crossing,
    Tangential,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualAngle {
    pub theta: f64,
    pub kind: RootKind,
}

/// Closed arc `[start, end]` (counterclockwise, possibly wrapping past 2π) on which the gap vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroArc {
    pub start: f64,
    pub end: f64,
}

impl ZeroArc {
    pub fn length(&self) -> f64 {
        (self.end - self.start).rem_euclid(TAU)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EqualSupportAngles {
    /// The gap vanished at every grid sample.
    IdenticallyZero,
    /// The gap vanishes on whole arcs; isolated roots elsewhere are listed too.
    IdenticallyZeroOnArc {
        arcs: Vec<ZeroArc>,
        roots: Vec<EqualAngle>,
    },
    Isolated(Vec<EqualAngle>),
}

impl EqualSupportAngles {
    pub fn roots(&self) -> &[EqualAngle] {
        match self {
            Self::IdenticallyZero => &[],
            Self::IdenticallyZeroOnArc { roots, .. } => roots,
            Self::Isolated(r) => r,
        }
    }

    pub fn has_zero_arcs(&self) -> bool {
        !matches!(self, Self::Isolated(_))
    }
}

pub fn find_equal_support_angles(
    a: &ComplexMatrix,
    c: &WeightVector,
    b: &ComplexMatrix,
    d: &WeightVector,
    grid: usize,
) -> Result<EqualSupportAngles> {
    SupportGap::new(a, c, b, d)?.equal_angles(grid)
}

impl SupportGap<'_> {
    /// Uniform scan, bisection on sign changes, and golden-section refinement of near-touching minima.
    pub fn equal_angles(&self, grid: usize) -> Result<EqualSupportAngles> {
        if grid < MIN_SCAN_GRID {
            return Err(Error::InvalidGrid {
                grid,
                reason: "equal-angle scan needs at least 256 samples",
            });
        }
        let scale = self.scale();
        let zero_tol = ZERO_GAP_TOL * scale;
        let touch_tol = TANGENTIAL_TOL * scale;
        let thetas = uniform_grid(grid);
        let step = TAU / grid as f64;
        let mut g = Vec::with_capacity(grid);
        for &t in &thetas {
            let v = self.value(t)?;
            g.push(if v.abs() < zero_tol { 0.0 } else { v });
        }
        if g.iter().all(|&v| v == 0.0) {
            return Ok(EqualSupportAngles::IdenticallyZero);
        }

        let at = |i: isize| g[i.rem_euclid(grid as isize) as usize];
        let mut roots = Vec::new();
        let mut arcs = Vec::new();

        // Zero runs, walked from a nonzero sample so no run straddles the seam.
        let first_nonzero = g.iter().position(|&v| v != 0.0).unwrap();
        let mut k = 0;
        while k < grid {
            let i = (first_nonzero + k) % grid;
            if g[i] != 0.0 {
                k += 1;
                continue;
            }
            let mut len = 0;
            while g[(i + len) % grid] == 0.0 {
                len += 1;
            }
            let before = at(i as isize - 1);
            let after = at((i + len) as isize);
            if len == 1 {
                let kind = if before * after < 0.0 {
                    RootKind::Crossing
                } else {
                    RootKind::Tangential
                };
                roots.push(EqualAngle {
                    theta: thetas[i],
                    kind,
                });
            } else {
                arcs.push(ZeroArc {
                    start: thetas[i],
                    end: thetas[(i + len - 1) % grid],
                });
            }
            k += len;
        }

        for i in 0..grid {
            let j = (i + 1) % grid;
            let (gi, gj) = (g[i], g[j]);
            let lo = thetas[i];
            let hi = lo + step;
            if gi * gj < 0.0 {
                roots.push(EqualAngle {
                    theta: wrap_angle(self.bisect(lo, hi, gi)?),
                    kind: RootKind::Crossing,
                });
                continue;
            }
            // local minimum of |g| strictly between same-signed neighbours
            let gp = at(i as isize - 1);
            if gi == 0.0 || gp == 0.0 || gj == 0.0 || gp.signum() != gi.signum() || gj.signum() != gi.signum() {
                continue;
            }
            if !(gi.abs() <= gp.abs() && gi.abs() < gj.abs()) {
                continue;
            }
            let sign = gi.signum();
            let (t_min, g_min) = self.golden_min(lo - step, lo + step, sign)?;
            if g_min * sign < 0.0 {
                // two crossings hidden inside one cell pair
                let left = self.bisect(lo - step, t_min, gp)?;
                let right = self.bisect(t_min, lo + step, g_min)?;
                roots.push(EqualAngle {
                    theta: wrap_angle(left),
                    kind: RootKind::Crossing,
                });
                roots.push(EqualAngle {
                    theta: wrap_angle(right),
                    kind: RootKind::Crossing,
                });
            } else if g_min.abs() <= touch_tol {
                roots.push(EqualAngle {
                    theta: wrap_angle(t_min),
                    kind: RootKind::Tangential,
                });
            }
        }

        roots.sort_by(|x, y| x.theta.total_cmp(&y.theta));
        roots.dedup_by(|x, y| (x.theta - y.theta).abs() < 10.0 * ROOT_ANGLE_TOL);
        if roots.len() > 1 {
            let last = roots[roots.len() - 1].theta;
            if TAU - last + roots[0].theta < 10.0 * ROOT_ANGLE_TOL {
                roots.pop();
            }
        }
        if arcs.is_empty() {
            Ok(EqualSupportAngles::Isolated(roots))
        } else {
            arcs.sort_by(|x, y| x.start.total_cmp(&y.start));
            Ok(EqualSupportAngles::IdenticallyZeroOnArc { arcs, roots })
        }
    }

    /// Bisection for a sign change on `[lo, hi]` given the gap value at `lo`.
    pub(crate) fn bisect(&self, mut lo: f64, mut hi: f64, g_lo: f64) -> Result<f64> {
        let s_lo = g_lo.signum();
        while hi - lo > ROOT_ANGLE_TOL {
            let mid = 0.5 * (lo + hi);
            let gm = self.value(mid)?;
            if gm == 0.0 {
                return Ok(mid);
            }
            if gm.signum() == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Minimises `sign·g` on `[lo, hi]`; returns the argmin and the (signed) gap there.
    fn golden_min(&self, mut lo: f64, mut hi: f64, sign: f64) -> Result<(f64, f64)> {
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let mut f1 = sign * self.value(x1)?;
        let mut f2 = sign * self.value(x2)?;
        while hi - lo > ROOT_ANGLE_TOL {
            if f1 < 0.0 {
                return Ok((x1, sign * f1));
            }
            if f2 < 0.0 {
                return Ok((x2, sign * f2));
            }
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = sign * self.value(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = sign * self.value(x2)?;
            }
        }
        let x = 0.5 * (lo + hi);
        Ok((x, self.value(x)?))
    }
}

/// `Re(e^{iθ} z)`
pub fn directional(theta: f64, z: Complex64) -> f64 {
    z.re * theta.cos() - z.im * theta.sin()
}
