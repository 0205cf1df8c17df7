//! The subcommands.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use weighted_range::cvalues::{common_cvalue, cpolynomial, cvalue_set, CPolynomial, CValueSet};
use weighted_range::io::to_json;
use weighted_range::region::{boundary_intersections, build_region_with, BoundaryIntersections};
use weighted_range::support::uniform_grid;
use weighted_range::verify::{
    check_circle_corollary, check_curve_overlap, check_ellipse_corollary, check_equal_ranges,
    check_nilpotent_corollary, check_sharp_point_corollary, verify_boundary_points,
    verify_supporting_lines, verify_theorem_main_seeded, CorollaryReport, TheoremReport, Verdict,
};
use weighted_range::{eig_general, ComplexMatrix, ConvexRegion, Error, RegionKind, Support, WeightVector};

use crate::output::{boundary_csv, csv_table, read_boundary_csv, write_atomic};
use crate::svg::{Outline, Plot};
use crate::{core, read_matrix, read_weights, CliError, Format, Outcome, RunConfig, Theorem};

fn build(cfg: &RunConfig, a: &ComplexMatrix, c: &WeightVector, what: &str) -> Result<ConvexRegion, CliError> {
    let mut support = core(what, Support::new(a, c))?;
    if let Some(tol) = cfg.tol_eig {
        support = support.with_eig_tol(tol);
    }
    core(what, build_region_with(&support, cfg.grid))
}

fn emit(cfg: &RunConfig, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let path = write_atomic(&cfg.out, name, bytes)?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn spectrum(a: &ComplexMatrix) -> Result<Vec<Complex64>, CliError> {
    Ok(core("eigenvalues", eig_general(a))?.eigenvalues)
}

/// Plot of one region with its eigenvalues and, when within the guards, its c-values.
pub fn boundary_plot(vertices: Vec<Complex64>, a: &ComplexMatrix, c: &WeightVector) -> Result<Plot, CliError> {
    let cvalues = match cvalue_set(a, c) {
        Ok(set) => set.values.iter().map(|v| v.value).collect(),
        Err(_) => Vec::new(),
    };
    Ok(Plot {
        outlines: vec![Outline { vertices }],
        eigenvalues: spectrum(a)?,
        cvalues,
        marks: Vec::new(),
    })
}

#[derive(Serialize)]
struct RegionJson<'a> {
    kind: RegionKind,
    scale: f64,
    #[serde(rename = "gridN")]
    grid_n: usize,
    #[serde(with = "weighted_range::io::complex_pairs")]
    vertices: &'a [Complex64],
}

fn region_json(r: &ConvexRegion) -> String {
    to_json(&RegionJson {
        kind: r.kind(),
        scale: r.scale(),
        grid_n: r.grid(),
        vertices: r.vertices(),
    })
}

fn write_boundary(cfg: &RunConfig, stem: &str, a: &ComplexMatrix, c: &WeightVector, r: &ConvexRegion, formats: [bool; 3]) -> Result<(), CliError> {
    let [csv, json, svg] = formats;
    let table = boundary_csv(r.vertices());
    if csv {
        emit(cfg, &format!("{stem}.csv"), &table)?;
    }
    if json {
        emit(cfg, &format!("{stem}.json"), region_json(r).as_bytes())?;
    }
    if svg {
        // plotted from the CSV text so that a re-read file re-plots identically
        let plot = boundary_plot(read_boundary_csv(&table)?, a, c)?;
        emit(cfg, &format!("{stem}.svg"), plot.render().as_bytes())?;
    }
    Ok(())
}

pub fn boundary(cfg: &RunConfig, matrix: &Path, weights: &Path) -> Result<Outcome, CliError> {
    let a = read_matrix(matrix)?;
    let c = read_weights(weights)?;
    let r = build(cfg, &a, &c, "boundary")?;
    if r.is_empty() {
        println!("EMPTY");
        return Ok(Outcome::Empty);
    }
    println!("{:?} region with {} vertices", r.kind(), r.vertices().len());
    let default = [Format::Csv, Format::Svg];
    let formats = [Format::Csv, Format::Json, Format::Svg].map(|f| cfg.wants(f, &default));
    write_boundary(cfg, "boundary", &a, &c, &r, formats)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct CValuesJson<'a> {
    cvalues: &'a CValueSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    polynomial: Option<&'a CPolynomial>,
}

pub fn cvalues(cfg: &RunConfig, matrix: &Path, weights: &Path) -> Result<Outcome, CliError> {
    let a = read_matrix(matrix)?;
    let c = read_weights(weights)?;
    let set = core("c-values", cvalue_set(&a, &c))?;
    // the polynomial has tighter guards than the enumeration; omit it past them
    let poly = match cpolynomial(&a, &c) {
        Ok(p) => Some(p),
        Err(Error::DimensionTooLarge { .. } | Error::DegreeTooLarge { .. }) => None,
        Err(e) => return core("c-polynomial", Err(e)),
    };
    println!("degree {}", set.degree.degree);
    if cfg.wants(Format::Json, &[Format::Json]) {
        let json = to_json(&CValuesJson {
            cvalues: &set,
            polynomial: poly.as_ref(),
        });
        emit(cfg, "cvalues.json", json.as_bytes())?;
    }
    if cfg.wants(Format::Csv, &[Format::Json]) {
        let rows = set.values.iter().map(|v| vec![v.value.re, v.value.im]);
        emit(cfg, "cvalues.csv", &csv_table(&["re", "im"], rows))?;
    }
    if cfg.wants(Format::Svg, &[Format::Json]) {
        let plot = Plot {
            eigenvalues: set.spectrum.clone(),
            cvalues: set.values.iter().map(|v| v.value).collect(),
            ..Plot::default()
        };
        emit(cfg, "cvalues.svg", plot.render().as_bytes())?;
    }
    Ok(Outcome::Ok)
}

pub fn cpoly(cfg: &RunConfig, matrix: &Path, weights: &Path) -> Result<Outcome, CliError> {
    let a = read_matrix(matrix)?;
    let c = read_weights(weights)?;
    let poly = core("c-polynomial", cpolynomial(&a, &c))?;
    println!("degree {}", poly.degree);
    if cfg.wants(Format::Json, &[Format::Json]) {
        emit(cfg, "cpoly.json", to_json(&poly).as_bytes())?;
    }
    if cfg.wants(Format::Csv, &[Format::Json]) {
        let rows = poly
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, z)| vec![k as f64, z.re, z.im]);
        emit(cfg, "cpoly.csv", &csv_table(&["power", "re", "im"], rows))?;
    }
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct SupportJson {
    #[serde(rename = "gridN")]
    grid_n: usize,
    theta: Vec<f64>,
    h: Vec<f64>,
}

pub fn support(cfg: &RunConfig, matrix: &Path, weights: &Path) -> Result<Outcome, CliError> {
    let a = read_matrix(matrix)?;
    let c = read_weights(weights)?;
    let mut s = core("support", Support::new(&a, &c))?;
    if let Some(tol) = cfg.tol_eig {
        s = s.with_eig_tol(tol);
    }
    let theta = uniform_grid(cfg.grid);
    let h = theta
        .iter()
        .map(|&t| core("support", s.value(t)))
        .collect::<Result<Vec<f64>, _>>()?;
    let max = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = h.iter().copied().fold(f64::INFINITY, f64::min);
    println!("{} samples, h in [{min}, {max}]", h.len());
    if cfg.wants(Format::Csv, &[Format::Csv]) {
        let rows = theta.iter().zip(&h).map(|(&t, &v)| vec![t, v]);
        emit(cfg, "support.csv", &csv_table(&["theta", "h"], rows))?;
    }
    if cfg.wants(Format::Json, &[Format::Csv]) {
        let json = to_json(&SupportJson {
            grid_n: cfg.grid,
            theta,
            h,
        });
        emit(cfg, "support.json", json.as_bytes())?;
    }
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct IntersectJson {
    #[serde(with = "weighted_range::io::complex_pairs")]
    points: Vec<Complex64>,
    overlaps: Vec<[[f64; 2]; 2]>,
    identical: bool,
}

fn intersect_plot(ra: &ConvexRegion, rb: &ConvexRegion, a: &ComplexMatrix, b: &ComplexMatrix, hits: &BoundaryIntersections) -> Result<Plot, CliError> {
    let mut eigenvalues = spectrum(a)?;
    eigenvalues.extend(spectrum(b)?);
    Ok(Plot {
        outlines: vec![
            Outline {
                vertices: ra.vertices().to_vec(),
            },
            Outline {
                vertices: rb.vertices().to_vec(),
            },
        ],
        eigenvalues,
        cvalues: Vec::new(),
        marks: hits.points.clone(),
    })
}

fn write_intersect(cfg: &RunConfig, stem: &str, ra: &ConvexRegion, rb: &ConvexRegion, a: &ComplexMatrix, b: &ComplexMatrix, formats: [bool; 3]) -> Result<BoundaryIntersections, CliError> {
    let [csv, json, svg] = formats;
    let hits = boundary_intersections(ra, rb);
    if csv {
        let rows = hits.points.iter().map(|p| vec![p.re, p.im]);
        emit(cfg, &format!("{stem}.csv"), &csv_table(&["x", "y"], rows))?;
        let rows = hits
            .overlaps
            .iter()
            .map(|(p, q)| vec![p.re, p.im, q.re, q.im]);
        emit(cfg, &format!("{stem}_overlaps.csv"), &csv_table(&["x0", "y0", "x1", "y1"], rows))?;
    }
    if json {
        let doc = IntersectJson {
            points: hits.points.clone(),
            overlaps: hits
                .overlaps
                .iter()
                .map(|(p, q)| [[p.re, p.im], [q.re, q.im]])
                .collect(),
            identical: hits.identical,
        };
        emit(cfg, &format!("{stem}.json"), to_json(&doc).as_bytes())?;
    }
    if svg {
        let plot = intersect_plot(ra, rb, a, b, &hits)?;
        emit(cfg, &format!("{stem}.svg"), plot.render().as_bytes())?;
    }
    Ok(hits)
}

pub fn intersect(cfg: &RunConfig, paths: [&PathBuf; 4]) -> Result<Outcome, CliError> {
    let a = read_matrix(paths[0])?;
    let c = read_weights(paths[1])?;
    let b = read_matrix(paths[2])?;
    let d = read_weights(paths[3])?;
    let ra = build(cfg, &a, &c, "first region")?;
    let rb = build(cfg, &b, &d, "second region")?;
    if ra.is_empty() || rb.is_empty() {
        println!("EMPTY");
        return Ok(Outcome::Empty);
    }
    let default = [Format::Csv, Format::Svg];
    let formats = [Format::Csv, Format::Json, Format::Svg].map(|f| cfg.wants(f, &default));
    let hits = write_intersect(cfg, "intersections", &ra, &rb, &a, &b, formats)?;
    if hits.identical {
        println!("boundaries coincide");
    }
    println!(
        "{} intersection points, {} shared segments",
        hits.points.len(),
        hits.overlaps.len()
    );
    Ok(Outcome::Ok)
}

/// Re-matches common values at the requested tolerance and re-derives the verdict.
fn rematch(report: &mut TheoremReport, a: &ComplexMatrix, c: &WeightVector, b: &ComplexMatrix, d: &WeightVector, tol: f64) -> Result<(), CliError> {
    let set_a = core("c-values", cvalue_set(a, c))?;
    let set_b = core("c-values", cvalue_set(b, d))?;
    report.common_values = common_cvalue(&set_a, &set_b, tol);
    if report.applicable != Some(false) {
        report.verdict = Verdict::from_outcome(report.hypothesis_met, !report.common_values.is_empty());
    }
    Ok(())
}

pub fn theorem_summary(r: &TheoremReport) -> String {
    let mut s = format!(
        "{}: {} distinct angles ({} crossing, {} tangential), bound {}, hypothesis {}, {} common values -> {:?}",
        r.theorem,
        r.angles.distinct(),
        r.angles.crossing,
        r.angles.tangential,
        r.bound,
        if r.hypothesis_met { "met" } else { "not met" },
        r.common_values.len(),
        r.verdict
    );
    if let Some(k) = r.boundary_points {
        s.push_str(&format!("; {k} boundary points"));
    }
    for note in &r.notes {
        s.push_str(&format!("; {note}"));
    }
    s
}

pub fn corollary_summary(r: &CorollaryReport) -> String {
    let mut s = format!(
        "{}: {}, {} -> {:?}",
        r.corollary,
        if r.triggered { "triggered" } else { "not triggered" },
        if r.holds { "conclusion holds" } else { "conclusion fails" },
        r.verdict
    );
    for note in &r.notes {
        s.push_str(&format!("; {note}"));
    }
    s
}

enum Report {
    Theorem(TheoremReport),
    Corollary(CorollaryReport),
}

impl Report {
    fn verdict(&self) -> Verdict {
        match self {
            Report::Theorem(r) => r.verdict,
            Report::Corollary(r) => r.verdict,
        }
    }

    fn json(&self) -> String {
        match self {
            Report::Theorem(r) => r.to_json(),
            Report::Corollary(r) => r.to_json(),
        }
    }

    fn summary(&self) -> String {
        match self {
            Report::Theorem(r) => theorem_summary(r),
            Report::Corollary(r) => corollary_summary(r),
        }
    }
}

fn theorem_name(t: Theorem) -> &'static str {
    match t {
        Theorem::EqualAngles => "equal_angles",
        Theorem::SupportingLines => "supporting_lines",
        Theorem::BoundaryPoints => "boundary_points",
        Theorem::Circle => "circle",
        Theorem::Ellipse => "ellipse",
        Theorem::SharpPoints => "sharp_points",
        Theorem::Nilpotent => "nilpotent",
        Theorem::Overlap => "overlap",
        Theorem::EqualRanges => "equal_ranges",
    }
}

fn run_check(cfg: &RunConfig, theorem: Theorem, inputs: &[PathBuf], trials: usize) -> Result<Report, CliError> {
    let expected = match theorem {
        Theorem::Nilpotent => 1,
        Theorem::Circle | Theorem::Ellipse | Theorem::SharpPoints => 2,
        _ => 4,
    };
    if inputs.len() != expected {
        return Err(CliError::Input(format!(
            "{} takes {expected} input files, got {}",
            theorem_name(theorem),
            inputs.len()
        )));
    }
    let a = read_matrix(&inputs[0])?;
    let grid = cfg.grid;
    let with_seed = |mut r: CorollaryReport| {
        r.seed = cfg.seed;
        Report::Corollary(r)
    };
    if theorem == Theorem::Nilpotent {
        let r = core("nilpotent", check_nilpotent_corollary(&a, trials, cfg.seed, grid))?;
        return Ok(Report::Corollary(r));
    }
    let c = read_weights(&inputs[1])?;
    match theorem {
        Theorem::Circle => return Ok(with_seed(core("circle", check_circle_corollary(&a, &c, grid))?)),
        Theorem::Ellipse => return Ok(with_seed(core("ellipse", check_ellipse_corollary(&a, &c, grid))?)),
        Theorem::SharpPoints => {
            return Ok(with_seed(core("sharp points", check_sharp_point_corollary(&a, &c, grid))?))
        }
        _ => {}
    }
    let b = read_matrix(&inputs[2])?;
    let d = read_weights(&inputs[3])?;
    let mut report = match theorem {
        Theorem::EqualAngles => core("equal angles", verify_theorem_main_seeded(&a, &c, &b, &d, grid, cfg.seed))?,
        Theorem::SupportingLines => core("supporting lines", verify_supporting_lines(&a, &c, &b, &d, grid))?,
        Theorem::BoundaryPoints => core("boundary points", verify_boundary_points(&a, &c, &b, &d, grid))?,
        Theorem::Overlap => return Ok(with_seed(core("overlap", check_curve_overlap(&a, &c, &b, &d, grid))?)),
        _ => return Ok(with_seed(core("equal ranges", check_equal_ranges(&a, &c, &b, &d, grid))?)),
    };
    report.seed = cfg.seed;
    if let Some(tol) = cfg.tol_match {
        rematch(&mut report, &a, &c, &b, &d, tol)?;
    }
    Ok(Report::Theorem(report))
}

pub fn verify(cfg: &RunConfig, theorem: Theorem, inputs: &[PathBuf], trials: usize) -> Result<Outcome, CliError> {
    let report = run_check(cfg, theorem, inputs, trials)?;
    println!("{}", report.summary());
    if cfg.wants(Format::Json, &[Format::Json]) {
        emit(cfg, &format!("verify_{}.json", theorem_name(theorem)), report.json().as_bytes())?;
    }
    Ok(if report.verdict() == Verdict::Inconsistent {
        Outcome::Inconsistent
    } else {
        Outcome::Ok
    })
}

/// The fixtures run by `demo`.
pub mod fixtures {
    use num_complex::Complex64;
    use weighted_range::{ComplexMatrix, WeightVector};

    pub fn disc(radius: f64) -> ComplexMatrix {
        ComplexMatrix::jordan_block(2, Complex64::new(0.0, 0.0)).scale(Complex64::new(2.0 * radius, 0.0))
    }

    pub fn hexagon() -> ComplexMatrix {
        ComplexMatrix::roots_of_unity(6)
    }

    pub fn ellipse() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 2.0]]).expect("square literal")
    }

    pub fn e1(n: usize) -> WeightVector {
        WeightVector::unit(n, 1)
    }
}

pub fn demo(cfg: &RunConfig) -> Result<Outcome, CliError> {
    use fixtures::*;
    let grid = cfg.grid;
    let mut inconsistent = false;
    let all = [true; 3];

    let j2 = disc(0.5);
    let r = build(cfg, &j2, &e1(2), "disc")?;
    println!("disc: {:?} region with {} vertices", r.kind(), r.vertices().len());
    write_boundary(cfg, "demo_disc", &j2, &e1(2), &r, all)?;

    let (a, b) = (hexagon(), disc(0.95));
    let report = core("sharpness", verify_theorem_main_seeded(&a, &e1(6), &b, &e1(2), grid, cfg.seed))?;
    println!("sharpness: {}", theorem_summary(&report));
    inconsistent |= report.verdict == Verdict::Inconsistent;
    emit(cfg, "demo_sharpness.json", report.to_json().as_bytes())?;
    let ra = build(cfg, &a, &e1(6), "hexagon")?;
    let rb = build(cfg, &b, &e1(2), "disc")?;
    let hits = write_intersect(cfg, "demo_sharpness_points", &ra, &rb, &a, &b, all)?;
    println!("sharpness: {} common boundary points", hits.points.len());

    let j3 = ComplexMatrix::jordan_block(3, Complex64::new(0.0, 0.0));
    let mut circle = core("circle", check_circle_corollary(&j3, &e1(3), grid))?;
    circle.seed = cfg.seed;
    println!("{}", corollary_summary(&circle));
    inconsistent |= circle.verdict == Verdict::Inconsistent;
    emit(cfg, "demo_circle.json", circle.to_json().as_bytes())?;

    let mut ell = core("ellipse", check_ellipse_corollary(&ellipse(), &e1(2), grid))?;
    ell.seed = cfg.seed;
    println!("{}", corollary_summary(&ell));
    inconsistent |= ell.verdict == Verdict::Inconsistent;
    emit(cfg, "demo_ellipse.json", ell.to_json().as_bytes())?;

    let diag = ComplexMatrix::real_diag(&[1.0, 2.0, 3.0, 4.0]).expect("diagonal literal");
    let c = WeightVector::new(vec![1.0, 0.0, 1.0, 2.0]).expect("finite literal");
    let set = core("c-values", cvalue_set(&diag, &c))?;
    let poly = core("c-polynomial", cpolynomial(&diag, &c))?;
    println!("c-values of diag(1,2,3,4), c=(1,0,1,2): degree {}", set.degree.degree);
    let json = to_json(&CValuesJson {
        cvalues: &set,
        polynomial: Some(&poly),
    });
    emit(cfg, "demo_cvalues.json", json.as_bytes())?;

    Ok(if inconsistent {
        Outcome::Inconsistent
    } else {
        Outcome::Ok
    })
}
