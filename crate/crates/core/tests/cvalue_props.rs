mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use weighted_range::cvalues::{cpolynomial, cvalue_set, degree, CValueSet};
use weighted_range::{ComplexMatrix, WeightVector};

use common::*;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

/// Weights drawn from a few levels so that equal groups and zeros occur.
fn grouped_weights(seed: u64, n: usize) -> WeightVector {
    let levels = [0.0, 1.0, -0.5, 2.0];
    let mut r = rng(seed ^ 0xABCD);
    let c = (0..n)
        .map(|_| levels[(gauss(&mut r).abs() * 10.0) as usize % levels.len()])
        .collect();
    WeightVector::new(c).unwrap()
}

/// Every value of `x` has a distinct partner in `y` within `tol`.
fn same_multiset(x: &[Complex64], y: &[Complex64], tol: f64) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let mut used = vec![false; y.len()];
    x.iter().all(|&p| {
        let best = (0..y.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| (y[i] - p).norm().total_cmp(&(y[j] - p).norm()));
        match best {
            Some(j) if (y[j] - p).norm() <= tol => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

fn values(set: &CValueSet) -> Vec<Complex64> {
    set.values.iter().map(|v| v.value).collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn count_matches_degree(seed in any::<u64>(), n in 1usize..=6) {
        let a = matrix(&mut rng(seed), n);
        let c = grouped_weights(seed, n);
        let set = cvalue_set(&a, &c).unwrap();
        prop_assert_eq!(set.len() as u128, degree(&c, n).unwrap().degree);
    }

    #[test]
    fn witnesses_reproduce_values(seed in any::<u64>(), n in 1usize..=6) {
        let a = matrix(&mut rng(seed), n);
        let c = grouped_weights(seed, n);
        let set = cvalue_set(&a, &c).unwrap();
        let nonzero: Vec<f64> = c.as_slice().iter().copied().filter(|&w| w != 0.0).collect();
        for v in &set.values {
            let mut idx = v.witness.clone();
            let z: Complex64 = nonzero.iter().zip(&idx).map(|(w, &i)| set.spectrum[i] * *w).sum();
            prop_assert!((z - v.value).norm() <= 1e-12 * set.scale);
            idx.sort_unstable();
            idx.dedup();
            prop_assert_eq!(idx.len(), nonzero.len());
        }
    }

    #[test]
    fn values_sum_to_scaled_trace(seed in any::<u64>(), n in 1usize..=6) {
        let a = matrix(&mut rng(seed), n);
        let c = grouped_weights(seed, n);
        let set = cvalue_set(&a, &c).unwrap();
        let total: Complex64 = set.values.iter().map(|v| v.value).sum();
        let want = a.trace() * (c.sum() * set.len() as f64 / n as f64);
        prop_assert!((total - want).norm() <= 1e-9 * set.scale * set.len() as f64);
    }

    #[test]
    fn values_move_with_the_matrix(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let a = matrix(&mut r, n);
        let c = grouped_weights(seed, n);
        let s = complex(&mut r);
        let lambda = complex(&mut r);
        let base = cvalue_set(&a, &c).unwrap();
        let moved = cvalue_set(&a.scale(s).shift(lambda), &c).unwrap();
        let want: Vec<Complex64> = values(&base).iter().map(|v| v * s + lambda * c.sum()).collect();
        prop_assert!(same_multiset(&values(&moved), &want, 1e-7 * moved.scale));
    }

    #[test]
    fn polynomial_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let a = matrix(&mut r, n);
        let c = grouped_weights(seed, n);
        let u = unitary(&mut r, n);
        let p = cpolynomial(&a, &c).unwrap();
        let q = cpolynomial(&conjugate(&u, &a), &c).unwrap();
        prop_assert_eq!(p.degree, q.degree);
        let size = p.coefficients.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (x, y) in p.coefficients.iter().zip(&q.coefficients) {
            prop_assert!((x - y).norm() <= 1e-7 * size, "{} vs {}", x, y);
        }
    }
}

#[test]
fn diagonal_fixture_values() {
    let a = ComplexMatrix::real_diag(&[1.0, 2.0, 3.0]).unwrap();
    let c = WeightVector::new(vec![1.0, 1.0, 0.0]).unwrap();
    let mut got: Vec<f64> = values(&cvalue_set(&a, &c).unwrap()).iter().map(|z| z.re).collect();
    got.sort_by(f64::total_cmp);
    for (g, w) in got.iter().zip([3.0, 4.0, 5.0]) {
        assert!((g - w).abs() < 1e-12, "{got:?}");
    }
}
