//! Patch recovery of nodal derivatives.
//!
//! At each P2 node a full quadratic is fitted by least squares to the raw
//! element values sampled at the six-point quadrature nodes of the
//! surrounding patch; the fit evaluated at the node is the recovered value.
//! Patches with too few samples grow by one ring of elements.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector, Matrix6, Vector6};

use super::quadrature::TRIANGLE_DEGREE_4;
use super::P2Space;
use crate::Vec2;

/// Elements around each mesh vertex.
#[derive(Debug, Clone)]
pub struct Patches {
    /// Elements touching each vertex.
    vertex_elements: Vec<Vec<usize>>,
}

impl Patches {
    pub fn new(space: &P2Space) -> Self {
        let mesh = space.mesh();
        let mut vertex_elements = vec![Vec::new(); mesh.n_nodes()];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for &v in tri {
                vertex_elements[v].push(t);
            }
        }
        Self { vertex_elements }
    }
}

#[inline]
fn monomials(d: Vec2) -> [f64; 6] {
    [1.0, d.x, d.y, d.x * d.x, d.x * d.y, d.y * d.y]
}

/// Fits a quadratic in the offset from `center` (scaled by `scale`) to the
/// samples and returns its value at `center`.
fn fit_at(center: Vec2, scale: f64, samples: &[(Vec2, f64)]) -> f64 {
    let mut ata = Matrix6::<f64>::zeros();
    let mut atb = Vector6::<f64>::zeros();
    for &(p, v) in samples {
        let m = Vector6::from(monomials((p - center) / scale));
        ata += m * m.transpose();
        atb += m * v;
    }
    if let Some(c) = ata.cholesky() {
        let sol = c.solve(&atb);
        if sol.iter().all(|v| v.is_finite()) {
            return sol[0];
        }
    }
    // rank-deficient patch: minimum-norm least squares
    let a = DMatrix::from_fn(samples.len(), 6, |i, j| {
        monomials((samples[i].0 - center) / scale)[j]
    });
    let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    a.svd(true, true)
        .solve(&b, 1e-12)
        .map(|x| x[0])
        .unwrap_or_else(|_| samples.iter().map(|s| s.1).sum::<f64>() / samples.len() as f64)
}

/// Recovers `n_comp` smooth nodal fields from discontinuous element data.
/// `raw(t, l)` returns the element values at barycentric point `l` of
/// element `t`. The result holds one vector of length `n_dofs` per component;
/// only the dofs listed in `targets` (all dofs when `None`) are computed,
/// others are `NaN`.
pub fn recover(
    space: &P2Space,
    patches: &Patches,
    n_comp: usize,
    targets: Option<&[usize]>,
    raw: impl Fn(usize, [f64; 3]) -> Vec<f64>,
) -> Vec<Vec<f64>> {
    let n = space.n_dofs();
    let mut out = vec![vec![f64::NAN; n]; n_comp];
    let all: Vec<usize>;
    let targets = match targets {
        Some(t) => t,
        None => {
            all = (0..n).collect();
            &all
        }
    };
    // raw samples are cached per element
    let mut cache: Vec<Option<Vec<(Vec2, Vec<f64>)>>> = vec![None; space.mesh().n_triangles()];
    let mut midpoint_edges: Option<Vec<[usize; 2]>> = None;
    for &dof in targets {
        let mut elems: Vec<usize> = if dof < space.n_vertices() {
            patches.vertex_elements[dof].clone()
        } else {
            let edges = midpoint_edges.get_or_insert_with(|| midpoint_owner_edges(space));
            let [a, b] = edges[dof - space.n_vertices()];
            let mut set: BTreeSet<usize> = BTreeSet::new();
            set.extend(&patches.vertex_elements[a]);
            set.extend(&patches.vertex_elements[b]);
            set.into_iter().collect()
        };
        if elems.len() < 3 {
            // thin patch (corner vertex): grow by one ring
            let mesh = space.mesh();
            let mut set: BTreeSet<usize> = elems.iter().copied().collect();
            for &t in &elems {
                for &v in &mesh.triangles[t] {
                    set.extend(&patches.vertex_elements[v]);
                }
            }
            elems = set.into_iter().collect();
        }
        let center = space.dof_coords()[dof];
        let mut scale = 0.0_f64;
        let mut samples: Vec<Vec<(Vec2, f64)>> = vec![Vec::new(); n_comp];
        for &t in &elems {
            let entry = cache[t].get_or_insert_with(|| {
                TRIANGLE_DEGREE_4
                    .iter()
                    .map(|&(l, _)| (space.point(t, l), raw(t, l)))
                    .collect()
            });
            for (p, vals) in entry.iter() {
                scale = scale.max((p - center).norm());
                for c in 0..n_comp {
                    samples[c].push((*p, vals[c]));
                }
            }
        }
        let scale = if scale > 0.0 { scale } else { 1.0 };
        for c in 0..n_comp {
            out[c][dof] = fit_at(center, scale, &samples[c]);
        }
    }
    out
}

/// Vertices of the edge carrying each midpoint dof.
fn midpoint_owner_edges(space: &P2Space) -> Vec<[usize; 2]> {
    let nv = space.n_vertices();
    let mut edges = vec![[0, 0]; space.n_dofs() - nv];
    let mesh = space.mesh();
    for t in 0..mesh.n_triangles() {
        let tri = mesh.triangles[t];
        let dofs = space.element_dofs(t);
        for k in 0..3 {
            edges[dofs[3 + k] - nv] = [tri[k], tri[(k + 1) % 3]];
        }
    }
    edges
}

/// Recovered gradient of a P2 field at the requested dofs: `[d/dx, d/dy]`.
pub fn recover_gradient(
    space: &P2Space,
    patches: &Patches,
    field: &[f64],
    targets: Option<&[usize]>,
) -> [Vec<f64>; 2] {
    let mut r = recover(space, patches, 2, targets, |t, l| {
        let g = space.gradient(field, t, l);
        vec![g.x, g.y]
    });
    let gy = r.pop().expect("two components");
    let gx = r.pop().expect("two components");
    [gx, gy]
}

/// Two-stage recovered Hessian `[dxx, dxy, dyy]` of a P2 field at `targets`:
/// the gradient is recovered at every dof, then the gradient of each
/// recovered component is recovered again at the targets.
pub fn recover_hessian(
    space: &P2Space,
    patches: &Patches,
    field: &[f64],
    targets: &[usize],
) -> [Vec<f64>; 3] {
    let [gx, gy] = recover_gradient(space, patches, field, None);
    let r = recover(space, patches, 4, Some(targets), |t, l| {
        let a = space.gradient(&gx, t, l);
        let b = space.gradient(&gy, t, l);
        vec![a.x, a.y, b.x, b.y]
    });
    let dxy: Vec<f64> = r[1].iter().zip(&r[2]).map(|(a, b)| 0.5 * (a + b)).collect();
    [r[0].clone(), dxy, r[3].clone()]
}
