//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and exits
//! non-zero if any failed.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use weighted_range::cvalues::{common_cvalue, cpolynomial, cvalue_set, degree, eval_r, MATCH_TOL};
use weighted_range::io::to_json;
use weighted_range::region::{polygon_for_normal, ConvexRegion};
use weighted_range::verify::{
    check_circle_corollary, check_ellipse_corollary, check_nilpotent_corollary,
    soundness_ensemble, verify_boundary_points, verify_theorem_main, Verdict,
};
use weighted_range::{
    build_region, eig_general, eig_hermitian, weighted_support, ComplexMatrix, HermitianMatrix,
    RegionKind, WeightVector,
};

type Outcome = Result<String, String>;

/// Verdicts seen anywhere in the suite.
#[derive(Default)]
struct Tally {
    verdicts: usize,
    inconsistent: usize,
}

impl Tally {
    fn record(&mut self, v: Verdict) {
        self.verdicts += 1;
        self.inconsistent += usize::from(v == Verdict::Inconsistent);
    }
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    c64(gauss(rng), gauss(rng))
}

fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(n, (0..n * n).map(|_| random_complex(rng)).collect()).unwrap()
}

fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let m = random_matrix(rng, n);
    m.add(&m.adjoint()).scale(c64(0.5, 0.0))
}

fn random_weights<R: Rng>(rng: &mut R, n: usize) -> WeightVector {
    WeightVector::new((0..n).map(|_| gauss(rng)).collect()).unwrap()
}

fn e1(n: usize) -> WeightVector {
    WeightVector::unit(n, 1)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Debug>(e: E) -> String {
    format!("error: {e:?}")
}

fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| random_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn rayleigh(a: &ComplexMatrix, x: &[Complex64]) -> Complex64 {
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

/// `max |x*Ax|` over unit vectors: random sampling followed by a shrinking random search
/// from the best sample.
fn rayleigh_radius<R: Rng>(a: &ComplexMatrix, samples: usize, rng: &mut R) -> f64 {
    let n = a.dim();
    let mut best = random_unit(rng, n);
    let mut best_r = rayleigh(a, &best).norm();
    for _ in 1..samples {
        let x = random_unit(rng, n);
        let r = rayleigh(a, &x).norm();
        if r > best_r {
            best = x;
            best_r = r;
        }
    }
    let mut step = 0.1;
    while step > 1e-9 {
        let mut improved = false;
        for _ in 0..200 {
            let mut x: Vec<Complex64> = best.iter().map(|z| z + random_complex(rng) * step).collect();
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            x.iter_mut().for_each(|z| *z /= norm);
            let r = rayleigh(a, &x).norm();
            if r > best_r {
                best = x;
                best_r = r;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best_r
}

fn polygon_support(vertices: &[Complex64], theta: f64) -> f64 {
    let u = Complex64::from_polar(1.0, theta);
    vertices
        .iter()
        .map(|v| (u * v).re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Hausdorff distance of two convex polygons as the sup-norm of their support difference,
/// sampled on a fine grid.
fn support_hausdorff(p: &[Complex64], q: &[Complex64]) -> f64 {
    let m = 1 << 14;
    (0..m)
        .map(|k| {
            let t = TAU * k as f64 / m as f64;
            (polygon_support(p, t) - polygon_support(q, t)).abs()
        })
        .fold(0.0, f64::max)
}

/// Counts distinct assignments of indices to weights up to permutations inside groups
/// of equal weights.
fn brute_force_degree(c: &[f64], n: usize) -> u128 {
    let nonzero: Vec<f64> = c.iter().copied().filter(|&w| w != 0.0).collect();
    let mut seen = std::collections::HashSet::new();
    let mut chosen = Vec::new();
    fn walk(
        nonzero: &[f64],
        n: usize,
        chosen: &mut Vec<usize>,
        seen: &mut std::collections::HashSet<Vec<(u64, usize)>>,
    ) {
        if chosen.len() == nonzero.len() {
            let mut key: Vec<(u64, usize)> = nonzero
                .iter()
                .zip(chosen.iter())
                .map(|(w, &i)| (w.to_bits(), i))
                .collect();
            key.sort_unstable();
            seen.insert(key);
            return;
        }
        for i in 0..n {
            if !chosen.contains(&i) {
                chosen.push(i);
                walk(nonzero, n, chosen, seen);
                chosen.pop();
            }
        }
    }
    walk(&nonzero, n, &mut chosen, &mut seen);
    seen.len() as u128
}

fn criterion_1(_: &mut Tally) -> Outcome {
    let fixture = degree(&WeightVector::new(vec![1.0, 0.0, 1.0, 2.0]).unwrap(), 4)
        .map_err(fail)?
        .degree;
    if fixture != 12 {
        return Err(format!("degree((1,0,1,2),4) = {fixture}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let levels = [0.0, 0.0, 1.0, 2.0, -1.0];
    for trial in 0..50 {
        let n = rng.gen_range(1..=6);
        let c: Vec<f64> = (0..n).map(|_| levels[rng.gen_range(0..levels.len())]).collect();
        let got = degree(&WeightVector::new(c.clone()).unwrap(), n).map_err(fail)?.degree;
        let want = brute_force_degree(&c, n);
        if got != want {
            return Err(format!("trial {trial}: c={c:?} degree {got}, enumeration {want}"));
        }
    }
    Ok("degree 12 and 50/50 enumerations agree".into())
}

fn criterion_2(_: &mut Tally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut empties = 0;
    for trial in 0..100 {
        let n = rng.gen_range(1..=6);
        let a = random_hermitian(&mut rng, n);
        let c = random_weights(&mut rng, n);
        let eig = eig_hermitian(&HermitianMatrix::new(&a).map_err(fail)?).map_err(fail)?;
        let w = c.as_slice();
        let upper: f64 = w.iter().zip(eig.values.iter()).map(|(c, l)| c * l).sum();
        let lower: f64 = w.iter().zip(eig.values.iter().rev()).map(|(c, l)| c * l).sum();
        let region = build_region(&a, &c, 4096).map_err(fail)?;
        let scale = region.scale();
        let tol = 1e-8 * scale;
        if lower > upper + tol {
            empties += 1;
            if !region.is_empty() {
                return Err(format!("trial {trial}: interval [{lower}, {upper}] empty, region {:?}", region.kind()));
            }
            continue;
        }
        if region.is_empty() {
            return Err(format!("trial {trial}: region empty, interval [{lower}, {upper}]"));
        }
        let vs = region.vertices();
        let lo = vs.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        let hi = vs.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
        let off_axis = vs.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        let err = (lo - lower.min(upper)).abs().max((hi - upper.max(lower)).abs()).max(off_axis);
        worst = worst.max(err / scale);
        if err > tol {
            return Err(format!("trial {trial}: endpoint error {err:e} > {tol:e}"));
        }
    }
    let empty = build_region(&ComplexMatrix::real_diag(&[1.0, -1.0]).unwrap(), &WeightVector::new(vec![0.0, 1.0]).unwrap(), 4096)
        .map_err(fail)?;
    check(
        empty.is_empty(),
        format!("worst relative endpoint error {worst:.2e}, {empties} empty draws, diag(1,-1) c=(0,1) {:?}", empty.kind()),
    )
}

fn criterion_3(_: &mut Tally) -> Outcome {
    let a = ComplexMatrix::jordan_block(2, c64(0.0, 0.0));
    let region = build_region(&a, &e1(2), 4096).map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let radius = rayleigh_radius(&a, 100_000, &mut rng);
    let m = 1 << 16;
    let d = (0..m)
        .map(|k| (region.support(TAU * k as f64 / m as f64) - radius).abs())
        .fold(0.0, f64::max);
    check(
        d <= 1e-4 && (radius - 0.5).abs() <= 1e-6,
        format!("Hausdorff to disc {d:.2e}, Rayleigh radius {radius:.10}"),
    )
}

fn criterion_4(_: &mut Tally) -> Outcome {
    let a = ComplexMatrix::real_diag(&[1.0, 1.0, -1.0, -1.0]).unwrap();
    let r = build_region(&a, &WeightVector::unit(4, 2), 4096).map_err(fail)?;
    if r.kind() != RegionKind::Segment {
        return Err(format!("Λ_2(diag(1,1,-1,-1)) is {:?}", r.kind()));
    }
    let (p, q) = (r.vertices()[0], r.vertices()[1]);
    let err = (p - c64(-1.0, 0.0)).norm().max((q - c64(1.0, 0.0)).norm());
    let empty = build_region(&ComplexMatrix::real_diag(&[1.0, -1.0]).unwrap(), &WeightVector::unit(2, 2), 4096)
        .map_err(fail)?;
    check(
        err <= 1e-6 && empty.is_empty(),
        format!("segment endpoint error {err:.2e}, Λ_2(diag(1,-1)) {:?}", empty.kind()),
    )
}

fn criterion_5(tally: &mut Tally) -> Outcome {
    let b = ComplexMatrix::jordan_block(2, c64(0.0, 0.0)).scale(c64(1.9, 0.0));
    let mut details = Vec::new();
    for n in [4usize, 6] {
        let a = ComplexMatrix::roots_of_unity(n);
        let (c, d) = (e1(n), e1(2));
        let ra = build_region(&a, &c, 4096).map_err(fail)?;
        let rb = build_region(&b, &d, 4096).map_err(fail)?;
        let hits = weighted_range::region::boundary_intersections(&ra, &rb);
        let report = verify_theorem_main(&a, &c, &b, &d, 4096).map_err(fail)?;
        tally.record(report.verdict);
        let points = verify_boundary_points(&a, &c, &b, &d, 4096).map_err(fail)?;
        tally.record(points.verdict);
        let set_a = cvalue_set(&a, &c).map_err(fail)?;
        let set_b = cvalue_set(&b, &d).map_err(fail)?;
        let common = common_cvalue(&set_a, &set_b, MATCH_TOL);
        let ok = hits.points.len() == 2 * n
            && hits.overlaps.is_empty()
            && report.angles.crossing == 2 * n
            && report.angles.distinct() == 2 * n
            && report.bound == 2 * n as u64
            && !report.hypothesis_met
            && common.is_empty()
            && report.verdict == Verdict::ConsistentHypothesisNotMet;
        let line = format!(
            "n={n}: {} intersections, {} crossing / {} distinct angles, bound {}, {:?}",
            hits.points.len(),
            report.angles.crossing,
            report.angles.distinct(),
            report.bound,
            report.verdict
        );
        if !ok {
            return Err(line);
        }
        details.push(line);
    }
    Ok(details.join("; "))
}

fn criterion_6(tally: &mut Tally) -> Outcome {
    let a = ComplexMatrix::jordan_block(3, c64(0.0, 0.0));
    let report = check_circle_corollary(&a, &e1(3), 4096).map_err(fail)?;
    tally.record(report.verdict);
    let fit = report.fit.as_ref().ok_or("no circle fit")?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let oracle = rayleigh_radius(&a, 100_000, &mut rng);
    let radius = fit.semi_axes[0];
    let m = report.matches.first().ok_or("no center match")?;
    check(
        fit.center.norm() <= 1e-4
            && (radius - FRAC_PI_4.cos()).abs() <= 1e-4
            && (radius - oracle).abs() <= 1e-4
            && m.matched
            && m.multiplicity >= 2
            && report.holds,
        format!(
            "center {:.2e}, radius {radius:.8} (Rayleigh {oracle:.8}), c-value {} multiplicity {}",
            fit.center.norm(),
            m.cvalue,
            m.multiplicity
        ),
    )
}

fn criterion_7(tally: &mut Tally) -> Outcome {
    let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 2.0]]).unwrap();
    let report = check_ellipse_corollary(&a, &e1(2), 4096).map_err(fail)?;
    tally.record(report.verdict);
    let fit = report.fit.as_ref().ok_or("no ellipse fit")?;
    let mut spectrum = eig_general(&a).map_err(fail)?.eigenvalues;
    spectrum.sort_by(|p, q| p.re.total_cmp(&q.re));
    let mut foci = fit.foci.clone();
    foci.sort_by(|p, q| p.re.total_cmp(&q.re));
    let err = foci
        .iter()
        .zip(spectrum.iter())
        .map(|(f, s)| (f - s).norm())
        .fold(0.0, f64::max);
    let exact = (foci[0] - c64(0.0, 0.0)).norm().max((foci[1] - c64(2.0, 0.0)).norm());
    check(
        err <= 1e-4 && exact <= 1e-4 && report.holds,
        format!("foci {:?}, error vs spectrum {err:.2e}", foci),
    )
}

fn criterion_8(_: &mut Tally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let n = rng.gen_range(1..=5);
        let a = random_matrix(&mut rng, n);
        let c = random_weights(&mut rng, n);
        let gamma = random_complex(&mut rng);
        let lambda = random_complex(&mut rng);
        let moved = a.scale(gamma).shift(lambda);
        let theta = rng.gen_range(0.0..TAU);
        let lhs = weighted_support(&moved, &c, theta).map_err(fail)?;
        let rhs = gamma.norm() * weighted_support(&a, &c, theta + gamma.arg()).map_err(fail)?
            + c.sum() * (Complex64::from_polar(1.0, theta) * lambda).re;
        let scale = 1.0 + moved.max_abs() * c.l1_norm();
        let err = (lhs - rhs).abs() / scale;
        worst = worst.max(err);
        if err > 1e-9 {
            return Err(format!("trial {trial}: support identity off by {err:e}"));
        }
    }
    let mut region_worst: f64 = 0.0;
    for trial in 0..20 {
        let n = rng.gen_range(1..=4);
        let a = random_matrix(&mut rng, n);
        let c = random_weights(&mut rng, n);
        let gamma = random_complex(&mut rng);
        let lambda = random_complex(&mut rng);
        let direct = build_region(&a.scale(gamma).shift(lambda), &c, 4096).map_err(fail)?;
        let mapped = build_region(&a, &c, 4096)
            .map_err(fail)?
            .map_affine(gamma, lambda * c.sum());
        if direct.is_empty() != mapped.is_empty() {
            return Err(format!("trial {trial}: emptiness differs"));
        }
        if direct.is_empty() {
            continue;
        }
        let d = direct.hausdorff(&mapped) / direct.scale();
        region_worst = region_worst.max(d);
        if d > 2e-3 {
            return Err(format!("trial {trial}: region Hausdorff {d:e}·scale"));
        }
    }
    Ok(format!("support {worst:.2e}, region {region_worst:.2e}·scale"))
}

fn criterion_9(_: &mut Tally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = rng.gen_range(1..=4);
        let a = random_matrix(&mut rng, n);
        let c = random_weights(&mut rng, n);
        let deg = degree(&c, n).map_err(fail)?.degree as i32;
        let (x, y, t) = (random_complex(&mut rng), random_complex(&mut rng), random_complex(&mut rng));
        let s = random_complex(&mut rng);
        let base = eval_r(&a, &c, x, y, t).map_err(fail)?;
        let scaled = eval_r(&a, &c, s * x, s * y, s * t).map_err(fail)?;
        let want = s.powi(deg) * base;
        let err = (scaled - want).norm() / want.norm();
        worst = worst.max(err);
        if err > 1e-8 {
            return Err(format!("trial {trial}: relative error {err:e} at degree {deg}"));
        }
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

fn criterion_10(tally: &mut Tally) -> Outcome {
    let report = soundness_ensemble(500, 3, 10, 1024).map_err(fail)?;
    for t in &report.trials {
        tally.record(t.verdict);
    }
    let over = report
        .trials
        .iter()
        .filter(|t| t.angles as u64 > t.bound)
        .count();
    check(
        report.trials.len() == 500 && over == 0 && report.violations == 0 && tally.inconsistent == 0,
        format!(
            "{} pairs ({} redrawn), {over} over the bound; {} INCONSISTENT among {} verdicts",
            report.trials.len(),
            report.redrawn,
            tally.inconsistent,
            tally.verdicts
        ),
    )
}

fn random_normal<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, n);
    let eig = eig_hermitian(&HermitianMatrix::new(&h).unwrap()).unwrap();
    let mu: Vec<Complex64> = (0..n).map(|_| random_complex(rng)).collect();
    let u = &eig.vectors;
    let mut data = vec![c64(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = (0..n).map(|k| u[i * n + k] * mu[k] * u[j * n + k].conj()).sum();
        }
    }
    ComplexMatrix::new(n, data).unwrap()
}

fn criterion_11(_: &mut Tally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut empties = 0;
    for trial in 0..50 {
        let n = rng.gen_range(1..=5);
        let a = random_normal(&mut rng, n);
        let c = random_weights(&mut rng, n);
        let exact: ConvexRegion = polygon_for_normal(&a, &c).map_err(fail)?;
        let sampled = build_region(&a, &c, 8192).map_err(fail)?;
        if exact.is_empty() != sampled.is_empty() {
            return Err(format!("trial {trial}: emptiness differs ({:?} vs {:?})", exact.kind(), sampled.kind()));
        }
        if exact.is_empty() {
            empties += 1;
            continue;
        }
        let scale = sampled.scale();
        let d = support_hausdorff(exact.vertices(), sampled.vertices()).max(exact.hausdorff(&sampled)) / scale;
        worst = worst.max(d);
        if d > 1e-5 {
            return Err(format!("trial {trial}: n={n} Hausdorff {d:e}·scale"));
        }
    }
    Ok(format!("worst {worst:.2e}·scale, {empties} empty"))
}

fn criterion_12(tally: &mut Tally) -> Outcome {
    let run = || -> Result<Vec<String>, String> {
        let a = ComplexMatrix::roots_of_unity(6);
        let b = ComplexMatrix::jordan_block(2, c64(0.0, 0.0)).scale(c64(1.9, 0.0));
        let main = verify_theorem_main(&a, &e1(6), &b, &e1(2), 4096).map_err(fail)?;
        let nil = check_nilpotent_corollary(&ComplexMatrix::jordan_block(3, c64(0.0, 0.0)), 5, 0x5EED, 1024)
            .map_err(fail)?;
        let ens = soundness_ensemble(20, 3, 0x5EED, 512).map_err(fail)?;
        let poly = cpolynomial(&ComplexMatrix::roots_of_unity(4), &WeightVector::new(vec![1.0, 0.0, 1.0, 2.0]).unwrap())
            .map_err(fail)?;
        Ok(vec![
            main.to_json(),
            nil.to_json(),
            to_json(&ens),
            to_json(&poly),
        ])
    };
    let first = run()?;
    let second = std::thread::spawn(run).join().map_err(|_| "second run panicked")??;
    for json in &first[..2] {
        let v: serde_json::Value = serde_json::from_str(json).map_err(fail)?;
        if v["verdict"] == "INCONSISTENT" {
            tally.inconsistent += 1;
        }
        tally.verdicts += 1;
    }
    let bytes: usize = first.iter().map(String::len).sum();
    check(first == second, format!("{} reports, {bytes} bytes identical", first.len()))
}

type Criterion = (&'static str, fn(&mut Tally) -> Outcome);

fn main() {
    // The soundness criterion also checks every verdict in the suite, so it runs last.
    let criteria: [(usize, Criterion); 12] = [
        (1, ("degree formula", criterion_1)),
        (2, ("hermitian segments", criterion_2)),
        (3, ("classical disc", criterion_3)),
        (4, ("rank-k special case", criterion_4)),
        (5, ("sharpness", criterion_5)),
        (6, ("circle corollary", criterion_6)),
        (7, ("ellipse corollary", criterion_7)),
        (8, ("affine covariance", criterion_8)),
        (9, ("homogeneity", criterion_9)),
        (11, ("normal polygon", criterion_11)),
        (12, ("determinism", criterion_12)),
        (10, ("soundness stress", criterion_10)),
    ];
    let mut tally = Tally::default();
    let mut lines = Vec::new();
    let mut failed = 0;
    let start = Instant::now();
    for (id, (name, f)) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&mut tally)))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        lines.push((id, format!("{tag} criterion {id:>2} {name} ({secs:.2}s): {detail}")));
    }
    lines.sort_by_key(|(id, _)| *id);
    for (_, line) in &lines {
        println!("{line}");
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        lines.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
