//! Random matrix ensembles and the soundness stress run.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{verify_theorem_main_seeded, Verdict};
use crate::cvalues::{cvalue_set, min_separation};
use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::support::{sort_weights_desc, WeightVector};

/// Pairs whose value sets come closer than this (relative) are redrawn.
pub const SEPARATION_TOL: f64 = 1e-3;

/// Entries i.i.d. complex standard normal (`E|z|² = 1`).
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let half = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid deviation");
    let data = (0..n * n)
        .map(|_| Complex64::new(half.sample(rng), half.sample(rng)))
        .collect();
    ComplexMatrix::new(n, data).expect("normal samples are finite")
}

/// Weights i.i.d. standard normal, optionally sorted descending.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize, sorted: bool) -> WeightVector {
    let c: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let c = WeightVector::new(c).expect("normal samples are finite");
    if sorted {
        sort_weights_desc(&c).0
    } else {
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleTrial {
    pub dims: [usize; 2],
    pub bound: u64,
    pub angles: usize,
    pub separation: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub trials: Vec<EnsembleTrial>,
    /// Draws rejected because their value sets were not separated.
    pub redrawn: usize,
    /// Trials whose angle count exceeded the bound.
    pub violations: usize,
    pub inconsistent: usize,
    pub seed: u64,
    #[serde(rename = "gridN")]
    pub grid_n: usize,
}

/// Counts equal-support angles for `trials` random pairs with well separated value sets;
/// none may exceed `deg(A;c)·deg(B;d)`.
pub fn soundness_ensemble(trials: usize, max_dim: usize, seed: u64, grid: usize) -> Result<EnsembleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = EnsembleReport {
        trials: Vec::with_capacity(trials),
        redrawn: 0,
        violations: 0,
        inconsistent: 0,
        seed,
        grid_n: grid,
    };
    while out.trials.len() < trials {
        let na = rng.gen_range(1..=max_dim);
        let nb = rng.gen_range(1..=max_dim);
        let a = random_matrix(&mut rng, na);
        let b = random_matrix(&mut rng, nb);
        let sorted = rng.gen_bool(0.5);
        let c = random_weights(&mut rng, na, sorted);
        let d = random_weights(&mut rng, nb, sorted);
        let set_a = cvalue_set(&a, &c)?;
        let set_b = cvalue_set(&b, &d)?;
        let separation = min_separation(&set_a, &set_b);
        if separation <= SEPARATION_TOL * set_a.scale.max(set_b.scale) {
            out.redrawn += 1;
            continue;
        }
        let report = verify_theorem_main_seeded(&a, &c, &b, &d, grid, seed)?;
        let angles = report.angles.distinct();
        let excess = report.angles.identically_zero
            || report.angles.zero_arcs > 0
            || angles as u64 > report.bound;
        out.violations += usize::from(excess);
        out.inconsistent += usize::from(report.verdict == Verdict::Inconsistent);
        out.trials.push(EnsembleTrial {
            dims: [na, nb],
            bound: report.bound,
            angles,
            separation,
            verdict: report.verdict,
        });
    }
    Ok(out)
}
