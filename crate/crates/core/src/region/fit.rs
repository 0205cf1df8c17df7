//! Least-squares circle and ellipse fits for boundary samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::eig_hermitian;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcKind {
    Circle,
    Ellipse,
}

/// Fitted circle or ellipse. For a circle both semi-axes equal the radius and both foci
/// sit at the center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcFit {
    pub kind: ArcKind,
    pub center: Complex64,
    pub foci: [Complex64; 2],
    /// Major and minor semi-axes.
    pub semi_axes: (f64, f64),
    /// Angle of the major axis.
    pub rotation: f64,
    /// RMS orthogonal distance from the points to the curve.
    pub residual: f64,
}

impl ArcFit {
    pub fn radius(&self) -> f64 {
        self.semi_axes.0
    }
}

/// Centred, unit-RMS copy of the data: returns (points, mean, scale).
fn normalize(points: &[Complex64]) -> (Vec<Complex64>, Complex64, f64) {
    let n = points.len() as f64;
    let mean = points.iter().sum::<Complex64>() / n;
    let s = (points.iter().map(|p| (p - mean).norm_sqr()).sum::<f64>() / n).sqrt();
    let s = if s > 0.0 { s } else { 1.0 };
    (points.iter().map(|p| (p - mean) / s).collect(), mean, s)
}

fn check_spread(q: &[Complex64]) -> Result<()> {
    let n = q.len() as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in q {
        sxx += p.re * p.re;
        sxy += p.re * p.im;
        syy += p.im * p.im;
    }
    let (sxx, sxy, syy) = (sxx / n, sxy / n, syy / n);
    let tr = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    if tr == 0.0 || det <= 1e-14 * tr * tr {
        return Err(Error::DegenerateConfiguration("points are collinear or coincident"));
    }
    Ok(())
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut a = [[0.0; 4]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&m[i]);
        a[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..4 {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

/// Algebraic (Kåsa) circle fit.
pub fn fit_circle(points: &[Complex64]) -> Result<ArcFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateConfiguration("circle fit needs at least 3 points"));
    }
    let (q, mean, s) = normalize(points);
    check_spread(&q)?;
    // minimise Σ (x² + y² + Dx + Ey + F)²
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for p in &q {
        let row = [p.re, p.im, 1.0];
        let z = p.norm_sqr();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] -= row[i] * z;
        }
    }
    let [d, e, f] = solve3(m, rhs).ok_or(Error::DegenerateConfiguration("singular circle fit"))?;
    let c = Complex64::new(-d / 2.0, -e / 2.0);
    let r2 = c.norm_sqr() - f;
    if r2 <= 0.0 {
        return Err(Error::DegenerateConfiguration("circle fit has no real radius"));
    }
    let r = r2.sqrt();
    let rms = (q.iter().map(|p| ((p - c).norm() - r).powi(2)).sum::<f64>() / q.len() as f64).sqrt();
    let center = mean + c * s;
    Ok(ArcFit {
        kind: ArcKind::Circle,
        center,
        foci: [center, center],
        semi_axes: (r * s, r * s),
        rotation: 0.0,
        residual: rms * s,
    })
}

/// Direct algebraic conic fit (smallest eigenvector of the scatter matrix), required to be
/// an ellipse.
pub fn fit_ellipse(points: &[Complex64]) -> Result<ArcFit> {
    if points.len() < 5 {
        return Err(Error::DegenerateConfiguration("ellipse fit needs at least 5 points"));
    }
    let (q, mean, s) = normalize(points);
    check_spread(&q)?;
    let mut scatter = vec![Complex64::new(0.0, 0.0); 36];
    for p in &q {
        let (x, y) = (p.re, p.im);
        let z = [x * x, x * y, y * y, x, y, 1.0];
        for i in 0..6 {
            for j in 0..6 {
                scatter[i * 6 + j] += z[i] * z[j];
            }
        }
    }
    let h = HermitianMatrix::symmetrize(&ComplexMatrix::from_raw(6, scatter));
    let eig = eig_hermitian(&h)?;
    let v: Vec<f64> = eig.vector(5).iter().map(|z| z.re).collect();
    let (a, b, c, d, e, f) = (v[0], v[1], v[2], v[3], v[4], v[5]);
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        return Err(Error::DegenerateConfiguration("fitted conic is not an ellipse"));
    }
    // center: gradient of the quadratic form vanishes
    let det = 4.0 * a * c - b * b;
    let x0 = (b * e - 2.0 * c * d) / det;
    let y0 = (b * d - 2.0 * a * e) / det;
    let f0 = a * x0 * x0 + b * x0 * y0 + c * y0 * y0 + d * x0 + e * y0 + f;
    // eigen-decomposition of [[a, b/2], [b/2, c]]
    let mean_ac = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + 0.25 * b * b).sqrt();
    let (l1, l2) = (mean_ac + rad, mean_ac - rad);
    let phi1 = 0.5 * b.atan2(a - c); // direction of the l1 eigenvector
    let ax1 = -f0 / l1;
    let ax2 = -f0 / l2;
    if !(ax1 > 0.0 && ax2 > 0.0) {
        return Err(Error::DegenerateConfiguration("fitted conic is imaginary"));
    }
    let (s1, s2) = (ax1.sqrt(), ax2.sqrt());
    let (major, minor, rotation) = if s1 >= s2 {
        (s1, s2, phi1)
    } else {
        (s2, s1, phi1 + std::f64::consts::FRAC_PI_2)
    };
    let center_n = Complex64::new(x0, y0);
    let dir = Complex64::from_polar(1.0, rotation);
    let rms = (q
        .iter()
        .map(|p| {
            let local = (p - center_n) * dir.conj();
            point_ellipse_distance(major, minor, local.re.abs(), local.im.abs()).powi(2)
        })
        .sum::<f64>()
        / q.len() as f64)
        .sqrt();
    let lin = (major * major - minor * minor).max(0.0).sqrt();
    let center = mean + center_n * s;
    let mut foci = [center + dir * (lin * s), center - dir * (lin * s)];
    foci.sort_by(|p, q| (p.re, p.im).partial_cmp(&(q.re, q.im)).unwrap());
    Ok(ArcFit {
        kind: ArcKind::Ellipse,
        center,
        foci,
        semi_axes: (major * s, minor * s),
        rotation: rotation.rem_euclid(std::f64::consts::PI),
        residual: rms * s,
    })
}

/// Distance from `(y0, y1)` (first quadrant) to the ellipse with semi-axes `e0 ≥ e1 > 0`.
fn point_ellipse_distance(e0: f64, e1: f64, y0: f64, y1: f64) -> f64 {
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g == 0.0 {
                return 0.0;
            }
            let r0 = (e0 / e1) * (e0 / e1);
            let sbar = ellipse_root(r0, z0, z1, g);
            let x0 = r0 * y0 / (sbar + r0);
            let x1 = y1 / (sbar + 1.0);
            ((x0 - y0).powi(2) + (x1 - y1).powi(2)).sqrt()
        } else {
            (y1 - e1).abs()
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            let x0 = e0 * xde0;
            let x1 = e1 * (1.0 - xde0 * xde0).max(0.0).sqrt();
            ((x0 - y0).powi(2) + x1 * x1).sqrt()
        } else {
            (y0 - e0).abs()
        }
    }
}

fn ellipse_root(r0: f64, z0: f64, z1: f64, mut g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..1100 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if g > 0.0 {
            s0 = s;
        } else if g < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}
