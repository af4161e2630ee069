//! Conforming triangular meshes with tagged boundary edges.
//!
//! Meshes come from three sources: constrained Delaunay refinement of a
//! tagged planar straight-line graph ([`triangulate`]), the structured
//! rectangle generator used by convergence studies, and the plain text format
//! in [`io`].

mod generate;
pub mod io;
mod structured;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::GeometryError;
use crate::{BoundaryTag, Vec2};

pub use generate::{
    mesh_fluid, mesh_fluid_region, mesh_fluid_with, mesh_solid, mesh_solid_region, mesh_solid_with,
    triangulate, Curve, MeshFamily, MeshOptions, Pslg, MIN_ANGLE_FLOOR,
};
pub use structured::{annulus, structured_rectangle, RectangleTags};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("mesh generation failed: {0}")]
    MeshFailure(String),
    #[error("invalid mesh: {0}")]
    Invalid(String),
    #[error("mesh text line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Fluid,
    Solid,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Fluid => "fluid",
            Region::Solid => "solid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Triangulation of a fluid or solid region.
///
/// Triangles are counter-clockwise. Boundary edges are oriented with the
/// region on their left.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Vec2>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub region: Region,
    pub h_max: f64,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn signed_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    0.5 * (b - a).perp(&(c - a))
}

impl Mesh {
    /// Validates connectivity, orientation and boundary tagging. Boundary
    /// edges are re-oriented so the region lies on their left.
    pub fn new(
        nodes: Vec<Vec2>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
        region: Region,
    ) -> Result<Self, MeshError> {
        let n = nodes.len();
        if triangles.is_empty() {
            return Err(MeshError::Invalid("mesh has no triangles".into()));
        }
        if nodes.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(MeshError::Invalid("non-finite node coordinate".into()));
        }
        let mut used = vec![false; n];
        // directed edge -> owning triangle count
        let mut edges: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(MeshError::Invalid(format!(
                    "triangle {t} references a missing node"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::Invalid(format!("triangle {t} repeats a node")));
            }
            if signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) <= 0.0 {
                return Err(MeshError::Invalid(format!(
                    "triangle {t} is not positively oriented"
                )));
            }
            for k in 0..3 {
                used[tri[k]] = true;
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let entry = edges.entry(edge_key(a, b)).or_insert((0, [a, b]));
                entry.0 += 1;
                if entry.0 > 2 {
                    return Err(MeshError::Invalid(format!(
                        "edge ({a}, {b}) is shared by more than two triangles"
                    )));
                }
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(MeshError::Invalid(format!(
                "node {v} belongs to no triangle"
            )));
        }
        let mut tagged: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        for e in &boundary_edges {
            let key = edge_key(e.nodes[0], e.nodes[1]);
            match edges.get(&key) {
                Some((1, _)) => {}
                _ => {
                    return Err(MeshError::Invalid(format!(
                        "tagged edge ({}, {}) is not on the mesh boundary",
                        e.nodes[0], e.nodes[1]
                    )))
                }
            }
            if tagged.insert(key, e.tag).is_some() {
                return Err(MeshError::Invalid(format!(
                    "boundary edge ({}, {}) is tagged twice",
                    e.nodes[0], e.nodes[1]
                )));
            }
        }
        let boundary_count = edges.values().filter(|(c, _)| *c == 1).count();
        if boundary_count != boundary_edges.len() {
            return Err(MeshError::Invalid(format!(
                "{} boundary edges but {} tags",
                boundary_count,
                boundary_edges.len()
            )));
        }
        let boundary_edges = boundary_edges
            .into_iter()
            .map(|e| {
                let (_, directed) = edges[&edge_key(e.nodes[0], e.nodes[1])];
                BoundaryEdge {
                    nodes: directed,
                    tag: e.tag,
                }
            })
            .collect();
        let mut mesh = Mesh {
            nodes,
            triangles,
            boundary_edges,
            region,
            h_max: 0.0,
        };
        mesh.h_max = (0..mesh.triangles.len())
            .map(|t| mesh.diameter(t))
            .fold(0.0, f64::max);
        Ok(mesh)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.vertices(t);
        signed_area(a, b, c)
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.vertices(t);
        (b - a).norm().max((c - b).norm()).max((a - c).norm())
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut best = 180.0_f64;
        for t in 0..self.triangles.len() {
            let v = self.vertices(t);
            for k in 0..3 {
                let (p, q, r) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
                let (u, w) = (q - p, r - p);
                let ang = u.perp(&w).atan2(u.dot(&w)).abs().to_degrees();
                best = best.min(ang);
            }
        }
        best
    }

    /// Unique undirected edges in order of first appearance.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let key = edge_key(tri[k], tri[(k + 1) % 3]);
                if seen.insert(key, ()).is_none() {
                    out.push([key.0, key.1]);
                }
            }
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.nodes.len() as i64 - self.edges().len() as i64 + self.triangles.len() as i64
    }

    pub fn edges_with_tag(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundaryEdge> + '_ {
        self.boundary_edges.iter().filter(move |e| e.tag == tag)
    }

    pub fn has_tag(&self, tag: BoundaryTag) -> bool {
        self.boundary_edges.iter().any(|e| e.tag == tag)
    }

    /// Total length of the boundary edges carrying `tag`.
    pub fn tagged_length(&self, tag: BoundaryTag) -> f64 {
        self.edges_with_tag(tag)
            .map(|e| (self.nodes[e.nodes[1]] - self.nodes[e.nodes[0]]).norm())
            .sum()
    }

    /// Sorted list of nodes touching an edge with `tag`.
    pub fn nodes_with_tag(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut v: Vec<usize> = self.edges_with_tag(tag).flat_map(|e| e.nodes).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Index of a node within `tol` of `p`, if any.
    pub fn find_node(&self, p: Vec2, tol: f64) -> Option<usize> {
        self.nodes.iter().position(|q| (q - p).norm() <= tol)
    }

    /// Smallest distance between two distinct nodes.
    pub fn min_node_separation(&self) -> f64 {
        let mut idx: Vec<usize> = (0..self.nodes.len()).collect();
        idx.sort_by(|&a, &b| self.nodes[a].x.total_cmp(&self.nodes[b].x));
        let mut best = f64::INFINITY;
        for (i, &a) in idx.iter().enumerate() {
            for &b in &idx[i + 1..] {
                if self.nodes[b].x - self.nodes[a].x >= best {
                    break;
                }
                best = best.min((self.nodes[b] - self.nodes[a]).norm());
            }
        }
        best
    }

    /// Same mesh with nodes renumbered so that old node `i` becomes
    /// `permutation[i]`.
    pub fn renumbered(&self, permutation: &[usize]) -> Result<Mesh, MeshError> {
        if permutation.len() != self.nodes.len() {
            return Err(MeshError::Invalid(
                "permutation length differs from node count".into(),
            ));
        }
        let mut nodes = vec![Vec2::zeros(); self.nodes.len()];
        let mut hit = vec![false; self.nodes.len()];
        for (old, &new) in permutation.iter().enumerate() {
            if new >= nodes.len() || hit[new] {
                return Err(MeshError::Invalid("not a permutation".into()));
            }
            hit[new] = true;
            nodes[new] = self.nodes[old];
        }
        let triangles = self
            .triangles
            .iter()
            .map(|t| [permutation[t[0]], permutation[t[1]], permutation[t[2]]])
            .collect();
        let boundary_edges = self
            .boundary_edges
            .iter()
            .map(|e| BoundaryEdge {
                nodes: [permutation[e.nodes[0]], permutation[e.nodes[1]]],
                tag: e.tag,
            })
            .collect();
        Mesh::new(nodes, triangles, boundary_edges, self.region)
    }

    /// Same connectivity with every node moved by `map`.
    pub fn mapped(&self, map: impl Fn(usize, Vec2) -> Vec2) -> Result<Mesh, MeshError> {
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &p)| map(i, p))
            .collect();
        Mesh::new(
            nodes,
            self.triangles.clone(),
            self.boundary_edges.clone(),
            self.region,
        )
    }
}
