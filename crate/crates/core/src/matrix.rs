//! Dense complex matrices and the rotated Hermitian part `H_θ(A)`.

use std::fmt;
use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest entry magnitude accepted by the checked constructors.
pub const MAX_ENTRY: f64 = 1e12;

/// Relative asymmetry accepted when wrapping a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-14;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds an `n×n` matrix from row-major data, enforcing finiteness and the scale guard.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        let m = Self { n, data };
        m.validate()?;
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    row,
                    len: r.len(),
                });
            }
            data.extend(r);
        }
        Self::new(n, data)
    }

    /// Convenience constructor for real matrices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diag(values: &[Complex64]) -> Result<Self> {
        let n = values.len();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self::new(n, data)
    }

    pub fn real_diag(values: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Jordan block of size `n` with eigenvalue `lambda` and unit superdiagonal.
    pub fn jordan_block(n: usize, lambda: Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = lambda;
            if i + 1 < n {
                m.data[i * n + i + 1] = Complex64::new(1.0, 0.0);
            }
        }
        m
    }

    /// The `n` roots of unity on the diagonal.
    pub fn roots_of_unity(n: usize) -> Self {
        let v: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        Self::diag(&v).expect("roots of unity are finite")
    }

    pub(crate) fn from_raw(n: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    fn validate(&self) -> Result<()> {
        for (idx, z) in self.data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: idx / self.n,
                    col: idx % self.n,
                });
            }
            let mag = z.re.abs().max(z.im.abs());
            if mag > MAX_ENTRY {
                return Err(Error::ScaleGuard {
                    magnitude: mag,
                    limit: MAX_ENTRY,
                });
            }
        }
        Ok(())
    }

    /// Re-checks finiteness and the scale guard on a derived matrix.
    pub fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.n)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Self { n, data }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self + lambda·I`
    pub fn shift(&self, lambda: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] += lambda;
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Self { n, data }
    }

    /// `x·A + y·A*`
    pub fn pencil(&self, x: Complex64, y: Complex64) -> Self {
        self.scale(x).add(&self.adjoint().scale(y))
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let mut m = Self::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[i * n + j] = self[(i, j)];
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                m.data[(i + self.n) * n + j + self.n] = other[(i, j)];
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest row sum of moduli (the induced ∞-norm).
    pub fn row_sum_norm(&self) -> f64 {
        self.rows()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest modulus of `A - A*`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL * self.max_abs()
    }

    /// Largest modulus of `AA* - A*A`.
    pub fn commutator_defect(&self) -> f64 {
        let adj = self.adjoint();
        self.mul(&adj).sub(&adj.mul(self)).max_abs()
    }

    /// `H_θ(A) = (e^{iθ}A + e^{-iθ}A*)/2`, symmetrized so it is exactly Hermitian.
    pub fn herm_part(&self, theta: f64) -> HermitianMatrix {
        let n = self.n;
        let rot = Complex64::from_polar(0.5, theta);
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let v = rot * self.data[i * n + j] + (rot * self.data[j * n + i]).conj();
                if i == j {
                    data[i * n + i] = Complex64::new(v.re, 0.0);
                } else {
                    data[i * n + j] = v;
                    data[j * n + i] = v.conj();
                }
            }
        }
        HermitianMatrix { n, data }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.n, self.n)?;
        for r in self.rows() {
            let cells: Vec<String> = r.iter().map(|z| format!("{:.6}", z)).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// A matrix known to be Hermitian; the diagonal is real and the lower triangle mirrors the upper.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Wraps `m` after checking it is Hermitian to within [`HERMITIAN_TOL`] relative.
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL * m.max_abs() {
            return Err(Error::NotHermitian { asymmetry: defect });
        }
        Ok(Self::symmetrize(m))
    }

    /// Projects onto the Hermitian matrices: `(M + M*)/2`.
    pub fn symmetrize(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(m[(i, i)].re, 0.0);
            for j in i + 1..n {
                let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                data[i * n + j] = v;
                data[j * n + i] = v.conj();
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_raw(self.n, self.data.clone())
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }

    /// `x* H x` (real for Hermitian `H`).
    pub fn quadratic_form(&self, x: &[Complex64]) -> f64 {
        let n = self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += self.data[i * n + j] * x[j];
            }
            acc += x[i].conj() * row;
        }
        acc.re
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}
