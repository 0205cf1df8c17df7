//! Static SVG plots: region outlines, axes, eigenvalue crosses and c-value dots.

use std::fmt::Write;

use num_complex::Complex64;
use weighted_range::io::format_f64;

const MARGIN: f64 = 0.1;
const COLORS: [&str; 3] = ["#1f5fa8", "#b2452c", "#3a7d2c"];

/// One outlined region; a single vertex is a point, two a segment.
pub struct Outline {
    pub vertices: Vec<Complex64>,
}

#[derive(Default)]
pub struct Plot {
    pub outlines: Vec<Outline>,
    pub eigenvalues: Vec<Complex64>,
    pub cvalues: Vec<Complex64>,
    /// Highlighted points such as boundary intersections.
    pub marks: Vec<Complex64>,
}

fn num(x: f64) -> String {
    format_f64(x)
}

impl Plot {
    /// Bounding box of the outlines (or of every point when there is no outline), padded.
    fn view(&self) -> (f64, f64, f64, f64) {
        let mut pts: Vec<Complex64> = self.outlines.iter().flat_map(|o| o.vertices.iter().copied()).collect();
        if pts.is_empty() {
            pts = self.eigenvalues.iter().chain(&self.cvalues).chain(&self.marks).copied().collect();
        }
        if pts.is_empty() {
            pts.push(Complex64::new(0.0, 0.0));
        }
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in &pts {
            x0 = x0.min(p.re);
            x1 = x1.max(p.re);
            y0 = y0.min(p.im);
            y1 = y1.max(p.im);
        }
        // segments and points still need some extent
        let size = (x1 - x0).max(y1 - y0);
        let floor = if size > 0.0 { size } else { 1.0 + x1.abs().max(y1.abs()) };
        let (w, h) = ((x1 - x0).max(floor * 0.05), (y1 - y0).max(floor * 0.05));
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let (w, h) = (w * (1.0 + 2.0 * MARGIN), h * (1.0 + 2.0 * MARGIN));
        (cx - 0.5 * w, cy - 0.5 * h, w, h)
    }

    /// The SVG document. The imaginary axis points up.
    pub fn render(&self) -> String {
        let (x, y, w, h) = self.view();
        let unit = w.max(h);
        let stroke = num(unit * 0.004);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="600" height="{}">"#,
            num(x),
            num(-(y + h)),
            num(w),
            num(h),
            (600.0 * h / w).round().max(1.0)
        );
        // axes where they cross the view
        if y <= 0.0 && 0.0 <= y + h {
            let _ = writeln!(
                s,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#999999" stroke-width="{stroke}"/>"##,
                num(x),
                num(0.0),
                num(x + w),
                num(0.0)
            );
        }
        if x <= 0.0 && 0.0 <= x + w {
            let _ = writeln!(
                s,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#999999" stroke-width="{stroke}"/>"##,
                num(0.0),
                num(-(y + h)),
                num(0.0),
                num(-y)
            );
        }
        for (k, o) in self.outlines.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let pts: Vec<String> = o
                .vertices
                .iter()
                .map(|v| format!("{},{}", num(v.re), num(-v.im)))
                .collect();
            match o.vertices.len() {
                0 => {}
                1 => {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{}" cy="{}" r="{}" fill="{color}"/>"#,
                        num(o.vertices[0].re),
                        num(-o.vertices[0].im),
                        num(unit * 0.01)
                    );
                }
                2 => {
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{stroke}"/>"#,
                        pts.join(" ")
                    );
                }
                _ => {
                    let _ = writeln!(
                        s,
                        r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="{stroke}"/>"#,
                        pts.join(" ")
                    );
                }
            }
        }
        let arm = unit * 0.015;
        for e in &self.eigenvalues {
            let (ex, ey) = (e.re, -e.im);
            let _ = writeln!(
                s,
                r##"<path d="M{} {}L{} {}M{} {}L{} {}" stroke="#000000" stroke-width="{stroke}"/>"##,
                num(ex - arm),
                num(ey - arm),
                num(ex + arm),
                num(ey + arm),
                num(ex - arm),
                num(ey + arm),
                num(ex + arm),
                num(ey - arm)
            );
        }
        for c in &self.cvalues {
            let _ = writeln!(
                s,
                r##"<circle cx="{}" cy="{}" r="{}" fill="#6a3d9a"/>"##,
                num(c.re),
                num(-c.im),
                num(unit * 0.006)
            );
        }
        for m in &self.marks {
            let _ = writeln!(
                s,
                r##"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="#d62728" stroke-width="{stroke}"/>"##,
                num(m.re),
                num(-m.im),
                num(unit * 0.012)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
