#![allow(dead_code)]

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use weighted_range::{eig_hermitian, ComplexMatrix, HermitianMatrix, WeightVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(gauss(rng), gauss(rng))
}

pub fn matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(n, (0..n * n).map(|_| complex(rng)).collect()).unwrap()
}

pub fn hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let m = matrix(rng, n);
    m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0))
}

pub fn weights(rng: &mut ChaCha8Rng, n: usize) -> WeightVector {
    WeightVector::new((0..n).map(|_| gauss(rng)).collect()).unwrap()
}

pub fn sorted_weights(rng: &mut ChaCha8Rng, n: usize) -> WeightVector {
    let mut c: Vec<f64> = (0..n).map(|_| gauss(rng)).collect();
    c.sort_by(|x, y| y.total_cmp(x));
    WeightVector::new(c).unwrap()
}

/// Unitary from the eigenvectors of a random Hermitian matrix.
pub fn unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let h = hermitian(rng, n);
    let eig = eig_hermitian(&HermitianMatrix::new(&h).unwrap()).unwrap();
    ComplexMatrix::new(n, eig.vectors).unwrap()
}

pub fn conjugate(u: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    u.mul(a).mul(&u.adjoint())
}

pub fn column(u: &ComplexMatrix, j: usize) -> Vec<Complex64> {
    let n = u.dim();
    (0..n).map(|i| u.as_slice()[i * n + j]).collect()
}

pub fn rayleigh(a: &ComplexMatrix, x: &[Complex64]) -> Complex64 {
    let n = a.dim();
    let d = a.as_slice();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[i].conj() * d[i * n + j] * x[j];
        }
    }
    acc
}
