//! c-values `Σ_t c_{i_t} λ_{j_t}(A)`, the c-polynomial and `r(A;c)(x, y, t)`.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::eig_general;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::support::WeightVector;

/// Largest dimension accepted by [`cpolynomial`].
pub const CPOLY_MAX_DIM: usize = 8;
/// Largest degree accepted by [`cpolynomial`].
pub const CPOLY_MAX_DEGREE: u128 = 5000;
/// Largest number of c-values [`enumerate_cvalues`] will list.
pub const ENUMERATE_MAX: u128 = 1_000_000;
/// Default matching tolerance for c-values, relative to the value scale.
pub const MATCH_TOL: f64 = 1e-7;
/// Seed of the factor shuffle in [`cpolynomial`].
pub const SHUFFLE_SEED: u64 = 0x00C0_FFEE;

/// `deg(A;c) = n! / ((n − r)! · Π_g m_g!)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeInfo {
    pub n: usize,
    pub r: usize,
    /// Multiplicities of the distinct nonzero weights, in descending weight order.
    pub multiplicities: Vec<usize>,
    pub degree: u128,
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub fn degree(c: &WeightVector, n: usize) -> Result<DegreeInfo> {
    let r = c.nonzero_count();
    if r > n {
        return Err(Error::WeightCountExceedsDimension { nonzero: r, n });
    }
    let multiplicities: Vec<usize> = c.signature().into_iter().map(|(_, m)| m).collect();
    // choose the index set of each weight group in turn
    let mut left = n;
    let mut degree: u128 = 1;
    for &m in &multiplicities {
        degree = binomial(left, m)
            .and_then(|b| degree.checked_mul(b))
            .ok_or(Error::DegreeTooLarge {
                degree: u128::MAX,
                limit: u128::MAX,
            })?;
        left -= m;
    }
    Ok(DegreeInfo {
        n,
        r,
        multiplicities,
        degree,
    })
}

/// One c-value with the eigenvalue indices assigned to the nonzero weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CValue {
    #[serde(with = "crate::io::complex_pair")]
    pub value: Complex64,
    /// `witness[t]` is the (0-based) eigenvalue index paired with the `t`-th nonzero weight,
    /// weights taken in their original positions.
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CValueSet {
    pub degree: DegreeInfo,
    #[serde(with = "crate::io::complex_pairs")]
    pub spectrum: Vec<Complex64>,
    pub values: Vec<CValue>,
    /// Magnitude used to make tolerances relative: `1 + max|λ|·Σ|c_i|`.
    pub scale: f64,
}

impl CValueSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CValue> {
        self.values.iter()
    }

    /// Number of listed values within `tol·scale` of `z`.
    pub fn multiplicity(&self, z: Complex64, tol: f64) -> usize {
        let eps = tol * self.scale;
        self.values.iter().filter(|v| (v.value - z).norm() <= eps).count()
    }

    /// The listed value closest to `z`.
    pub fn nearest(&self, z: Complex64) -> Option<&CValue> {
        self.values
            .iter()
            .min_by(|a, b| (a.value - z).norm().total_cmp(&(b.value - z).norm()))
    }
}

/// All k-subsets of `pool` in lexicographic order.
fn combinations(pool: &[usize], k: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(pool: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < k - cur.len() {
                break;
            }
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(pool, k, 0, &mut Vec::with_capacity(k), out);
}

/// One value per assignment of distinct eigenvalue indices to the nonzero weights, with
/// assignments differing only inside an equal-weight group identified.
pub fn enumerate_cvalues(spectrum: &[Complex64], c: &WeightVector) -> Result<CValueSet> {
    let n = spectrum.len();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    let info = degree(c, n)?;
    if info.degree > ENUMERATE_MAX {
        return Err(Error::DegreeTooLarge {
            degree: info.degree,
            limit: ENUMERATE_MAX,
        });
    }
    let w = c.as_slice();
    let nonzero: Vec<usize> = (0..n).filter(|&i| w[i] != 0.0).collect();
    let groups: Vec<(f64, Vec<usize>)> = c
        .signature()
        .into_iter()
        .map(|(value, _)| {
            let slots = nonzero
                .iter()
                .enumerate()
                .filter(|&(_, &i)| w[i] == value)
                .map(|(t, _)| t)
                .collect();
            (value, slots)
        })
        .collect();

    let mut values = Vec::with_capacity(info.degree as usize);
    let mut witness = vec![0usize; nonzero.len()];
    fn assign(
        g: usize,
        groups: &[(f64, Vec<usize>)],
        used: &mut Vec<bool>,
        witness: &mut Vec<usize>,
        spectrum: &[Complex64],
        out: &mut Vec<CValue>,
    ) {
        if g == groups.len() {
            let value = groups
                .iter()
                .flat_map(|(wv, slots)| slots.iter().map(move |&t| (wv, t)))
                .map(|(wv, t)| spectrum[witness[t]] * *wv)
                .sum();
            out.push(CValue {
                value,
                witness: witness.clone(),
            });
            return;
        }
        let pool: Vec<usize> = (0..spectrum.len()).filter(|&j| !used[j]).collect();
        let mut subsets = Vec::new();
        combinations(&pool, groups[g].1.len(), &mut subsets);
        for subset in subsets {
            for (&t, &j) in groups[g].1.iter().zip(&subset) {
                witness[t] = j;
                used[j] = true;
            }
            assign(g + 1, groups, used, witness, spectrum, out);
            for &j in &subset {
                used[j] = false;
            }
        }
    }
    assign(0, &groups, &mut vec![false; n], &mut witness, spectrum, &mut values);

    let max_mod = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(CValueSet {
        degree: info,
        spectrum: spectrum.to_vec(),
        values,
        scale: 1.0 + max_mod * c.l1_norm(),
    })
}

/// Spectrum of `A` followed by [`enumerate_cvalues`].
pub fn cvalue_set(a: &ComplexMatrix, c: &WeightVector) -> Result<CValueSet> {
    if a.dim() != c.len() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: c.len(),
        });
    }
    let spectrum = eig_general(a)?;
    enumerate_cvalues(&spectrum.eigenvalues, c)
}

/// Monic `p(A;c)(t) = Π (t − v)`; coefficients low-to-high.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CPolynomial {
    pub degree: usize,
    #[serde(with = "crate::io::complex_pairs")]
    pub coefficients: Vec<Complex64>,
}

impl CPolynomial {
    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    /// Roots recomputed from the coefficients.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let bound = 1.0
            + self.coefficients[..self.degree]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
        crate::eigen::aberth(
            &self.coefficients,
            bound,
            crate::eigen::ABERTH_TOL,
            10 * crate::eigen::ABERTH_MAX_ITER,
        )
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `a − v·b` with its rounding error.
fn fms_eft(a: Complex64, v: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let (p1, e1) = two_prod(v.re, b.re);
    let (p2, e2) = two_prod(-v.im, b.im);
    let (q1, e3) = two_prod(v.re, b.im);
    let (q2, e4) = two_prod(v.im, b.re);
    let (pr, e5) = two_sum(p1, p2);
    let (pi, e6) = two_sum(q1, q2);
    let (sr, e7) = two_sum(a.re, -pr);
    let (si, e8) = two_sum(a.im, -pi);
    (
        Complex64::new(sr, si),
        Complex64::new(e7 - (e1 + e2 + e5), e8 - (e3 + e4 + e6)),
    )
}

/// Expands `Π (t − v)` with compensated arithmetic, factors taken in a fixed shuffled order.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut order: Vec<Complex64> = roots.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(SHUFFLE_SEED));
    let zero = Complex64::new(0.0, 0.0);
    let mut p = vec![Complex64::new(1.0, 0.0)];
    let mut e = vec![zero];
    for v in order {
        let m = p.len();
        let mut np = vec![zero; m + 1];
        let mut ne = vec![zero; m + 1];
        np[m] = p[m - 1];
        ne[m] = e[m - 1];
        for k in (0..m).rev() {
            let prev = if k > 0 { p[k - 1] } else { zero };
            let prev_e = if k > 0 { e[k - 1] } else { zero };
            let (val, err) = fms_eft(prev, v, p[k]);
            np[k] = val;
            ne[k] = err + prev_e - v * e[k];
        }
        p = np;
        e = ne;
    }
    p.iter().zip(&e).map(|(a, b)| a + b).collect()
}

pub fn cpolynomial(a: &ComplexMatrix, c: &WeightVector) -> Result<CPolynomial> {
    let n = a.dim();
    if n > CPOLY_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            n,
            max: CPOLY_MAX_DIM,
        });
    }
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    let info = degree(c, n)?;
    if info.degree > CPOLY_MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: info.degree,
            limit: CPOLY_MAX_DEGREE,
        });
    }
    let set = cvalue_set(a, c)?;
    let roots: Vec<Complex64> = set.values.iter().map(|v| v.value).collect();
    Ok(CPolynomial {
        degree: roots.len(),
        coefficients: poly_from_roots(&roots),
    })
}

/// `r(A;c)(x, y, t) = p(xA + yA*; c)(t)`, evaluated in product form.
pub fn eval_r(
    a: &ComplexMatrix,
    c: &WeightVector,
    x: Complex64,
    y: Complex64,
    t: Complex64,
) -> Result<Complex64> {
    let n = a.dim();
    if n > CPOLY_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            n,
            max: CPOLY_MAX_DIM,
        });
    }
    let info = degree(c, n)?;
    if info.degree > CPOLY_MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: info.degree,
            limit: CPOLY_MAX_DEGREE,
        });
    }
    let set = cvalue_set(&a.pencil(x, y), c)?;
    Ok(set
        .values
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, v| acc * (t - v.value)))
}

/// A c-value of `A` matching a d-value of `B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonValue {
    #[serde(with = "crate::io::complex_pair")]
    pub value: Complex64,
    #[serde(rename = "witnessA")]
    pub witness_a: Vec<usize>,
    #[serde(rename = "witnessB")]
    pub witness_b: Vec<usize>,
}

fn pair_scale(a: &CValueSet, b: &CValueSet) -> f64 {
    a.scale.max(b.scale)
}

/// All pairs within `tol·scale`; the reported value is their midpoint.
pub fn common_cvalue(a: &CValueSet, b: &CValueSet, tol: f64) -> Vec<CommonValue> {
    let eps = tol * pair_scale(a, b);
    let mut out = Vec::new();
    for u in &a.values {
        for v in &b.values {
            if (u.value - v.value).norm() <= eps {
                out.push(CommonValue {
                    value: 0.5 * (u.value + v.value),
                    witness_a: u.witness.clone(),
                    witness_b: v.witness.clone(),
                });
            }
        }
    }
    out
}

/// Whether every c-value of `a` is within `tol·scale` of some value of `b`.
pub fn all_cvalues_subset(a: &CValueSet, b: &CValueSet, tol: f64) -> bool {
    let eps = tol * pair_scale(a, b);
    a.values
        .iter()
        .all(|u| b.values.iter().any(|v| (u.value - v.value).norm() <= eps))
}

/// Smallest distance between a value of `a` and a value of `b`.
pub fn min_separation(a: &CValueSet, b: &CValueSet) -> f64 {
    a.values
        .iter()
        .flat_map(|u| b.values.iter().map(move |v| (u.value - v.value).norm()))
        .fold(f64::INFINITY, f64::min)
}
