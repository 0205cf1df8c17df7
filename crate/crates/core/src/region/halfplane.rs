//! Sorted-angle deque intersection of half-planes `{v : Re(e^{iθ}v) ≤ offset}`.

use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::support::{directional, wrap_angle};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub theta: f64,
    pub offset: f64,
}

impl HalfPlane {
    pub fn new(theta: f64, offset: f64) -> Self {
        Self {
            theta: wrap_angle(theta),
            offset,
        }
    }

    /// Outward unit normal `e^{-iθ}`.
    pub fn normal(&self) -> Complex64 {
        Complex64::from_polar(1.0, -self.theta)
    }

    /// `Re(e^{iθ}v) - offset`; positive outside.
    pub fn excess(&self, v: Complex64) -> f64 {
        directional(self.theta, v) - self.offset
    }

    pub fn contains(&self, v: Complex64, slack: f64) -> bool {
        self.excess(v) <= slack
    }

    /// Boundary direction with the interior on its left.
    fn direction(&self) -> Complex64 {
        Complex64::new(self.theta.sin(), self.theta.cos())
    }

    fn sort_key(&self) -> f64 {
        wrap_angle(FRAC_PI_2 - self.theta)
    }

    pub fn line_intersection(&self, other: &Self) -> Option<Complex64> {
        let (s1, c1) = self.theta.sin_cos();
        let (s2, c2) = other.theta.sin_cos();
        let det = s1 * c2 - c1 * s2;
        if det.abs() < 1e-300 {
            return None;
        }
        let x = (s1 * other.offset - s2 * self.offset) / det;
        let y = (c1 * other.offset - c2 * self.offset) / det;
        Some(Complex64::new(x, y))
    }
}

/// Intersection polygon: vertex `k` is the meet of `planes[k]` and `planes[(k+1) % m]`
/// (indices into the caller's slice). Vertices run counterclockwise.
#[derive(Clone, Debug)]
pub struct Clipped {
    pub vertices: Vec<Complex64>,
    pub planes: Vec<usize>,
}

impl Clipped {
    /// Plane indices meeting at vertex `k`.
    pub fn vertex_planes(&self, k: usize) -> (usize, usize) {
        (self.planes[k], self.planes[(k + 1) % self.planes.len()])
    }
}

/// Returns `None` when the system is infeasible (or the deque collapses below three planes).
///
/// A vertex is removed only when outside a newer plane by more than `cert_tol / 100`.
/// After the sweep, every discarded plane is re-checked against the vertex whose normal
/// cone contains it, and every edge is required to run along its plane's direction;
/// `cert_tol` bounds both.
pub fn clip(planes: &[HalfPlane], cert_tol: f64) -> Option<Clipped> {
    let mut order: Vec<usize> = (0..planes.len()).collect();
    order.sort_by(|&a, &b| planes[a].sort_key().total_cmp(&planes[b].sort_key()));

    let meet = |a: usize, b: usize| planes[a].line_intersection(&planes[b]);
    // concurrent planes meet with rounding noise; a plane is only dropped when clearly cut
    let sweep_tol = 0.01 * cert_tol;
    let outside = |p: usize, v: Option<Complex64>| match v {
        Some(v) => planes[p].excess(v) > sweep_tol,
        None => false,
    };

    let mut dq: VecDeque<usize> = VecDeque::new();
    for &p in &order {
        while dq.len() > 1 && outside(p, meet(dq[dq.len() - 1], dq[dq.len() - 2])) {
            dq.pop_back();
        }
        while dq.len() > 1 && outside(p, meet(dq[0], dq[1])) {
            dq.pop_front();
        }
        if let Some(&last) = dq.back() {
            let d = planes[p].direction();
            let e = planes[last].direction();
            let cross = e.re * d.im - e.im * d.re;
            if cross.abs() < 1e-15 {
                if e.re * d.re + e.im * d.im < 0.0 {
                    return None;
                }
                if planes[p].offset < planes[last].offset {
                    dq.pop_back();
                } else {
                    continue;
                }
            }
        }
        dq.push_back(p);
    }
    while dq.len() > 2 && outside(dq[0], meet(dq[dq.len() - 1], dq[dq.len() - 2])) {
        dq.pop_back();
    }
    while dq.len() > 2 && outside(dq[dq.len() - 1], meet(dq[0], dq[1])) {
        dq.pop_front();
    }
    if dq.len() < 3 {
        return None;
    }

    let active: Vec<usize> = dq.into_iter().collect();
    let m = active.len();
    let mut vertices = Vec::with_capacity(m);
    for k in 0..m {
        vertices.push(meet(active[k], active[(k + 1) % m])?);
    }

    // edges must follow their planes' directions
    for k in 0..m {
        let from = vertices[(k + m - 1) % m];
        let to = vertices[k];
        let d = planes[active[k]].direction();
        let along = (to - from).re * d.re + (to - from).im * d.im;
        if along < -cert_tol {
            return None;
        }
    }

    // discarded planes must hold at the vertex covering their direction
    let pos_of: Vec<usize> = {
        let mut pos = vec![usize::MAX; planes.len()];
        for (rank, &p) in order.iter().enumerate() {
            pos[p] = rank;
        }
        pos
    };
    for k in 0..m {
        let a = pos_of[active[k]];
        let b = pos_of[active[(k + 1) % m]];
        let v = vertices[k];
        let mut r = (a + 1) % order.len();
        while r != b {
            if planes[order[r]].excess(v) > cert_tol {
                return None;
            }
            r = (r + 1) % order.len();
        }
    }

    Some(Clipped {
        vertices,
        planes: active,
    })
}
