//! Quadratic (P2) Lagrange finite elements on straight-sided triangles.
//!
//! Degrees of freedom are the mesh vertices followed by one midpoint per
//! edge, numbered in order of first encounter. The local order on a triangle
//! `(v0, v1, v2)` is `v0, v1, v2, m01, m12, m20`.

pub mod linalg;
pub mod quadrature;
pub mod recovery;

use std::collections::HashMap;

use crate::mesh::{BoundaryEdge, Mesh};
use crate::Vec2;

pub use linalg::{Factorization, SolveError, SparseBuilder};

/// Values of the six P2 basis functions at barycentric point `l`.
#[inline]
pub fn basis(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

/// Quadratic trace basis on an edge `a -- mid -- b` at parameter `s`.
#[inline]
pub fn edge_basis(s: f64) -> [f64; 3] {
    [
        (1.0 - s) * (1.0 - 2.0 * s),
        4.0 * s * (1.0 - s),
        s * (2.0 * s - 1.0),
    ]
}

/// Quadratic finite-element space on a mesh.
#[derive(Debug, Clone)]
pub struct P2Space {
    mesh: Mesh,
    dof_coords: Vec<Vec2>,
    element_dofs: Vec<[usize; 6]>,
    midpoints: HashMap<(usize, usize), usize>,
    grad_lambda: Vec<[Vec2; 3]>,
    areas: Vec<f64>,
    locator: Locator,
}

impl P2Space {
    pub fn new(mesh: Mesh) -> Self {
        let nv = mesh.n_nodes();
        let mut dof_coords = mesh.nodes.clone();
        let mut midpoints = HashMap::new();
        let mut element_dofs = Vec::with_capacity(mesh.n_triangles());
        let mut grad_lambda = Vec::with_capacity(mesh.n_triangles());
        let mut areas = Vec::with_capacity(mesh.n_triangles());
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let mut dofs = [tri[0], tri[1], tri[2], 0, 0, 0];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let next = nv + midpoints.len();
                let id = *midpoints.entry(key).or_insert_with(|| {
                    dof_coords.push(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
                    next
                });
                dofs[3 + k] = id;
            }
            element_dofs.push(dofs);
            let [p0, p1, p2] = mesh.vertices(t);
            let area2 = (p1 - p0).perp(&(p2 - p0));
            // grad lambda_i = rot90(opposite edge) / (2 area)
            let g = |a: Vec2, b: Vec2| Vec2::new(a.y - b.y, b.x - a.x) / area2;
            grad_lambda.push([g(p1, p2), g(p2, p0), g(p0, p1)]);
            areas.push(0.5 * area2);
        }
        let locator = Locator::new(&mesh);
        Self {
            mesh,
            dof_coords,
            element_dofs,
            midpoints,
            grad_lambda,
            areas,
            locator,
        }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.mesh.n_nodes()
    }

    pub fn dof_coords(&self) -> &[Vec2] {
        &self.dof_coords
    }

    pub fn element_dofs(&self, t: usize) -> &[usize; 6] {
        &self.element_dofs[t]
    }

    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn midpoint_dof(&self, a: usize, b: usize) -> Option<usize> {
        self.midpoints.get(&(a.min(b), a.max(b))).copied()
    }

    /// `[start vertex, midpoint, end vertex]` dofs of a boundary edge.
    pub fn edge_dofs(&self, e: &BoundaryEdge) -> [usize; 3] {
        let [a, b] = e.nodes;
        [
            a,
            self.midpoint_dof(a, b)
                .expect("boundary edge belongs to the mesh"),
            b,
        ]
    }

    pub fn point(&self, t: usize, l: [f64; 3]) -> Vec2 {
        let [p0, p1, p2] = self.mesh.vertices(t);
        l[0] * p0 + l[1] * p1 + l[2] * p2
    }

    /// Gradients of the six basis functions at barycentric point `l`.
    pub fn basis_gradients(&self, t: usize, l: [f64; 3]) -> [Vec2; 6] {
        let g = &self.grad_lambda[t];
        [
            (4.0 * l[0] - 1.0) * g[0],
            (4.0 * l[1] - 1.0) * g[1],
            (4.0 * l[2] - 1.0) * g[2],
            4.0 * (l[0] * g[1] + l[1] * g[0]),
            4.0 * (l[1] * g[2] + l[2] * g[1]),
            4.0 * (l[2] * g[0] + l[0] * g[2]),
        ]
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(Vec2) -> f64) -> Vec<f64> {
        self.dof_coords.iter().map(|&p| f(p)).collect()
    }

    pub fn evaluate(&self, field: &[f64], t: usize, l: [f64; 3]) -> f64 {
        let n = basis(l);
        self.element_dofs[t]
            .iter()
            .zip(n)
            .map(|(&d, n)| field[d] * n)
            .sum()
    }

    pub fn gradient(&self, field: &[f64], t: usize, l: [f64; 3]) -> Vec2 {
        let g = self.basis_gradients(t, l);
        self.element_dofs[t]
            .iter()
            .zip(g)
            .fold(Vec2::zeros(), |acc, (&d, g)| acc + field[d] * g)
    }

    /// Element containing `p` and the barycentric coordinates of `p` in it.
    pub fn locate(&self, p: Vec2) -> Option<(usize, [f64; 3])> {
        self.locator.locate(&self.mesh, p)
    }

    /// Value of `field` at an arbitrary point of the mesh.
    pub fn evaluate_at(&self, field: &[f64], p: Vec2) -> Option<f64> {
        self.locate(p).map(|(t, l)| self.evaluate(field, t, l))
    }

    /// `int f dx` of a pointwise integrand over the mesh (degree-5 rule).
    pub fn integrate(&self, f: impl Fn(usize, [f64; 3], Vec2) -> f64) -> f64 {
        let mut total = 0.0;
        for t in 0..self.element_dofs.len() {
            let mut s = 0.0;
            for &(l, w) in &quadrature::TRIANGLE_DEGREE_5 {
                s += w * f(t, l, self.point(t, l));
            }
            total += self.areas[t] * s;
        }
        total
    }
}

pub fn barycentric(p: Vec2, [a, b, c]: [Vec2; 3]) -> [f64; 3] {
    let det = (b - a).perp(&(c - a));
    let l1 = (p - a).perp(&(c - a)) / det;
    let l2 = (b - a).perp(&(p - a)) / det;
    [1.0 - l1 - l2, l1, l2]
}

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Debug, Clone)]
struct Locator {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    fn new(mesh: &Mesh) -> Self {
        let (mut lo, mut hi) = (Vec2::repeat(f64::MAX), Vec2::repeat(f64::MIN));
        for p in &mesh.nodes {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let extent = (hi - lo).max().max(1e-300);
        let cell = (mesh.h_max.max(extent / 1024.0)).max(1e-300);
        let nx = (((hi.x - lo.x) / cell) as usize + 1).min(4096);
        let ny = (((hi.y - lo.y) / cell) as usize + 1).min(4096);
        let mut buckets = vec![Vec::new(); nx * ny];
        let clampi = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);
        for (t, _) in mesh.triangles.iter().enumerate() {
            let v = mesh.vertices(t);
            let bl = v[0].inf(&v[1]).inf(&v[2]);
            let tr = v[0].sup(&v[1]).sup(&v[2]);
            for j in clampi((bl.y - lo.y) / cell, ny)..=clampi((tr.y - lo.y) / cell, ny) {
                for i in clampi((bl.x - lo.x) / cell, nx)..=clampi((tr.x - lo.x) / cell, nx) {
                    buckets[j * nx + i].push(t);
                }
            }
        }
        Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    fn locate(&self, mesh: &Mesh, p: Vec2) -> Option<(usize, [f64; 3])> {
        let fi = (p.x - self.origin.x) / self.cell;
        let fj = (p.y - self.origin.y) / self.cell;
        if !fi.is_finite() || !fj.is_finite() {
            return None;
        }
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        let (ci, cj) = (fi.floor() as i64, fj.floor() as i64);
        for j in cj - 1..=cj + 1 {
            for i in ci - 1..=ci + 1 {
                if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
                    continue;
                }
                for &t in &self.buckets[j as usize * self.nx + i as usize] {
                    let l = barycentric(p, mesh.vertices(t));
                    let m = l[0].min(l[1]).min(l[2]);
                    if best.is_none_or(|b| m > b.2) {
                        best = Some((t, l, m));
                    }
                }
            }
        }
        match best {
            Some((t, l, m)) if m >= -1e-8 => {
                let l = l.map(|v| v.max(0.0));
                let s = l[0] + l[1] + l[2];
                Some((t, [l[0] / s, l[1] / s, l[2] / s]))
            }
            _ => None,
        }
    }
}
