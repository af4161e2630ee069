use std::f64::consts::TAU;

use super::{BoundaryEdge, Mesh, MeshError, Region};
use crate::{BoundaryTag, Vec2};

/// Tags of the four sides of a structured rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangleTags {
    pub left: BoundaryTag,
    pub right: BoundaryTag,
    pub bottom: BoundaryTag,
    pub top: BoundaryTag,
}

impl RectangleTags {
    /// Inlet on the left, outlet on the right, walls above and below.
    pub fn channel() -> Self {
        Self {
            left: BoundaryTag::Inlet,
            right: BoundaryTag::Outlet,
            bottom: BoundaryTag::Wall,
            top: BoundaryTag::Wall,
        }
    }

    fn region(&self) -> Region {
        if [self.left, self.right, self.bottom, self.top]
            .iter()
            .any(|t| matches!(t, BoundaryTag::Clamp | BoundaryTag::Root))
        {
            Region::Solid
        } else {
            Region::Fluid
        }
    }
}

/// `nx x ny` cells over `[x0, x1] x [y0, y1]`, each split along alternating
/// diagonals so the mesh has no preferred direction.
pub fn structured_rectangle(
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nx: usize,
    ny: usize,
    tags: RectangleTags,
) -> Result<Mesh, MeshError> {
    if nx == 0 || ny == 0 || !(x1 > x0) || !(y1 > y0) {
        return Err(MeshError::MeshFailure(
            "degenerate structured rectangle".into(),
        ));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = if i == nx {
                x1
            } else {
                x0 + (x1 - x0) * i as f64 / nx as f64
            };
            let y = if j == ny {
                y1
            } else {
                y0 + (y1 - y0) * j as f64 / ny as f64
            };
            nodes.push(Vec2::new(x, y));
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..nx {
        edges.push(BoundaryEdge {
            nodes: [id(i, 0), id(i + 1, 0)],
            tag: tags.bottom,
        });
        edges.push(BoundaryEdge {
            nodes: [id(i + 1, ny), id(i, ny)],
            tag: tags.top,
        });
    }
    for j in 0..ny {
        edges.push(BoundaryEdge {
            nodes: [id(nx, j), id(nx, j + 1)],
            tag: tags.right,
        });
        edges.push(BoundaryEdge {
            nodes: [id(0, j + 1), id(0, j)],
            tag: tags.left,
        });
    }
    Mesh::new(nodes, triangles, edges, tags.region())
}

/// Structured annulus `a <= |x - center| <= b` with `n_r` radial layers and
/// `n_theta` sectors.
pub fn annulus(
    center: Vec2,
    a: f64,
    b: f64,
    n_r: usize,
    n_theta: usize,
    inner: BoundaryTag,
    outer: BoundaryTag,
) -> Result<Mesh, MeshError> {
    if !(a > 0.0 && b > a) || n_r == 0 || n_theta < 3 {
        return Err(MeshError::MeshFailure("degenerate annulus".into()));
    }
    let id = |i: usize, k: usize| i * n_theta + (k % n_theta);
    let mut nodes = Vec::with_capacity((n_r + 1) * n_theta);
    for i in 0..=n_r {
        let r = a + (b - a) * i as f64 / n_r as f64;
        for k in 0..n_theta {
            let t = TAU * k as f64 / n_theta as f64;
            nodes.push(center + r * Vec2::new(t.cos(), t.sin()));
        }
    }
    let mut triangles = Vec::with_capacity(2 * n_r * n_theta);
    for i in 0..n_r {
        for k in 0..n_theta {
            let (p, q, r, s) = (id(i, k), id(i, k + 1), id(i + 1, k + 1), id(i + 1, k));
            if (i + k) % 2 == 0 {
                triangles.push([p, r, q]);
                triangles.push([p, s, r]);
            } else {
                triangles.push([p, s, q]);
                triangles.push([q, s, r]);
            }
        }
    }
    let mut edges = Vec::new();
    for k in 0..n_theta {
        edges.push(BoundaryEdge {
            nodes: [id(0, k), id(0, k + 1)],
            tag: inner,
        });
        edges.push(BoundaryEdge {
            nodes: [id(n_r, k), id(n_r, k + 1)],
            tag: outer,
        });
    }
    let region = if [inner, outer]
        .iter()
        .any(|t| matches!(t, BoundaryTag::Clamp | BoundaryTag::Root))
    {
        Region::Solid
    } else {
        Region::Fluid
    };
    Mesh::new(nodes, triangles, edges, region)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_counts_and_area() {
        let m = structured_rectangle(0.0, 2.0, 0.0, 1.0, 4, 2, RectangleTags::channel()).unwrap();
        assert_eq!(m.n_nodes(), 15);
        assert_eq!(m.n_triangles(), 16);
        assert!((m.area() - 2.0).abs() < 1e-14);
        assert!((m.tagged_length(BoundaryTag::Inlet) - 1.0).abs() < 1e-14);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn annulus_has_one_hole() {
        let m = annulus(
            Vec2::zeros(),
            1.0,
            2.0,
            3,
            24,
            BoundaryTag::Clamp,
            BoundaryTag::Component,
        )
        .unwrap();
        assert_eq!(m.region, Region::Solid);
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.edges_with_tag(BoundaryTag::Clamp).count(), 24);
    }
}
