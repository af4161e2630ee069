//! Plane-strain linear elasticity on the solid region with the clamp imposed
//! strongly and traction on every other boundary edge.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use crate::fem::quadrature::{gauss3, TRIANGLE_DEGREE_2, TRIANGLE_DEGREE_5};
use crate::fem::recovery::{recover, recover_gradient, recover_hessian, Patches};
use crate::fem::{edge_basis, Factorization, P2Space, SolveError, SparseBuilder};
use crate::flow::BoundaryTraction;
use crate::mesh::{Mesh, Region};
use crate::{BoundaryTag, Vec2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ElasticityError {
    #[error("singular elasticity system: {0}")]
    SingularSystem(String),
    #[error("solid mesh has no clamp edges")]
    MissingClamp,
    #[error("invalid elasticity problem: {0}")]
    InvalidProblem(String),
}

impl From<SolveError> for ElasticityError {
    fn from(e: SolveError) -> Self {
        ElasticityError::SingularSystem(e.to_string())
    }
}

pub type VectorFunction = Arc<dyn Fn(Vec2) -> Vec2 + Send + Sync>;

#[derive(Clone)]
pub enum VolumeLoad {
    Constant(Vec2),
    Function(VectorFunction),
}

#[derive(Clone)]
pub enum TractionLoad {
    Zero,
    /// Evaluated on every non-clamp boundary edge.
    Function(Arc<dyn Fn(Vec2, BoundaryTag) -> Vec2 + Send + Sync>),
    /// Fluid traction sampled on the component outline; applied on
    /// component edges only.
    Sampled(BoundaryTraction),
}

impl fmt::Debug for VolumeLoad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeLoad::Constant(v) => write!(f, "Constant({}, {})", v.x, v.y),
            VolumeLoad::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl fmt::Debug for TractionLoad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TractionLoad::Zero => f.write_str("Zero"),
            TractionLoad::Function(_) => f.write_str("Function(..)"),
            TractionLoad::Sampled(t) => write!(f, "Sampled({} vertices)", t.boundary.len()),
        }
    }
}

#[derive(Clone)]
pub struct ElasticityProblem {
    pub mesh: Mesh,
    pub lame_lambda: f64,
    pub lame_mu: f64,
    pub volume_load: VolumeLoad,
    pub traction: TractionLoad,
    /// Prescribed clamp displacement; `None` means `u = 0`.
    pub clamp_displacement: Option<VectorFunction>,
    pub rel_tol: f64,
}

impl fmt::Debug for ElasticityProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ElasticityProblem")
            .field("nodes", &self.mesh.n_nodes())
            .field("lame_lambda", &self.lame_lambda)
            .field("lame_mu", &self.lame_mu)
            .field("volume_load", &self.volume_load)
            .field("traction", &self.traction)
            .field("prescribed_clamp", &self.clamp_displacement.is_some())
            .finish()
    }
}

impl ElasticityProblem {
    pub fn new(mesh: Mesh, lame_lambda: f64, lame_mu: f64) -> Self {
        Self {
            mesh,
            lame_lambda,
            lame_mu,
            volume_load: VolumeLoad::Constant(Vec2::zeros()),
            traction: TractionLoad::Zero,
            clamp_displacement: None,
            rel_tol: 1e-10,
        }
    }

    fn validate(&self) -> Result<(), ElasticityError> {
        if self.mesh.region != Region::Solid {
            return Err(ElasticityError::InvalidProblem(
                "elasticity requires a solid mesh".into(),
            ));
        }
        if !(self.lame_lambda > 0.0
            && self.lame_lambda.is_finite()
            && self.lame_mu > 0.0
            && self.lame_mu.is_finite())
        {
            return Err(ElasticityError::InvalidProblem(format!(
                "Lamé constants must be positive, got lambda = {}, mu = {}",
                self.lame_lambda, self.lame_mu
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(ElasticityError::InvalidProblem(
                "solver tolerance must be positive".into(),
            ));
        }
        if !self.mesh.has_tag(BoundaryTag::Clamp) {
            return Err(ElasticityError::MissingClamp);
        }
        Ok(())
    }

    fn body_force(&self, p: Vec2) -> Vec2 {
        match &self.volume_load {
            VolumeLoad::Constant(v) => *v,
            VolumeLoad::Function(f) => f(p),
        }
    }

    /// Traction on boundary edge `a -> b` with `tag` at fraction `s`.
    fn traction(&self, a: Vec2, b: Vec2, s: f64, tag: BoundaryTag) -> Vec2 {
        match &self.traction {
            TractionLoad::Zero => Vec2::zeros(),
            TractionLoad::Function(g) => g(a + s * (b - a), tag),
            TractionLoad::Sampled(t) if tag == BoundaryTag::Component => {
                t.at_point(a + s * (b - a))
            }
            TractionLoad::Sampled(_) => Vec2::zeros(),
        }
    }
}

/// Element stiffness in interleaved ordering `(2i, 2i + 1)`.
fn element_stiffness(space: &P2Space, t: usize, lambda: f64, mu: f64) -> [[f64; 12]; 12] {
    let mut k = [[0.0; 12]; 12];
    let area = space.area(t);
    for &(l, w) in &TRIANGLE_DEGREE_2 {
        let g = space.basis_gradients(t, l);
        let c = w * area;
        for a in 0..6 {
            for b in 0..6 {
                let (ax, ay, bx, by) = (g[a].x, g[a].y, g[b].x, g[b].y);
                k[2 * a][2 * b] += c * ((lambda + 2.0 * mu) * ax * bx + mu * ay * by);
                k[2 * a][2 * b + 1] += c * (lambda * ax * by + mu * ay * bx);
                k[2 * a + 1][2 * b] += c * (lambda * ay * bx + mu * ax * by);
                k[2 * a + 1][2 * b + 1] += c * ((lambda + 2.0 * mu) * ay * by + mu * ax * bx);
            }
        }
    }
    k
}

/// Displacement, recovered stress and boundary derivatives.
#[derive(Debug, Clone)]
pub struct ElasticitySolution {
    space: Arc<P2Space>,
    pub lame_lambda: f64,
    pub lame_mu: f64,
    /// `(ux, uy)` at every P2 dof.
    pub displacement: [Vec<f64>; 2],
    /// Recovered `(sxx, syy, sxy)` at every P2 dof.
    pub stress: [Vec<f64>; 3],
    /// Recovered `d u_c / d x_d` at every dof, indexed `[c][d]`.
    pub grad_u: [[Vec<f64>; 2]; 2],
    /// Dofs on component edges, sorted; the Hessian is valid there.
    pub boundary_dofs: Vec<usize>,
    /// Recovered `(dxx, dxy, dyy)` of each component at `boundary_dofs`
    /// (NaN elsewhere).
    pub hess_u: [[Vec<f64>; 3]; 2],
    /// `F . u` over the assembled loads.
    pub external_work: f64,
    pub residual: f64,
}

/// Derivatives of `u` at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryJet {
    /// `grad[c][d] = d u_c / d x_d`.
    pub grad: [[f64; 2]; 2],
    /// `hess[c] = (dxx, dxy, dyy)` of `u_c`.
    pub hess: [[f64; 3]; 2],
}

impl ElasticitySolution {
    pub fn space(&self) -> &P2Space {
        &self.space
    }

    pub fn mesh(&self) -> &Mesh {
        self.space.mesh()
    }

    pub fn displacement_at(&self, p: Vec2) -> Option<Vec2> {
        let (t, l) = self.space.locate(p)?;
        Some(Vec2::new(
            self.space.evaluate(&self.displacement[0], t, l),
            self.space.evaluate(&self.displacement[1], t, l),
        ))
    }

    /// Stress from the raw element gradient at `(t, l)`.
    pub fn element_stress(&self, t: usize, l: [f64; 3]) -> [f64; 3] {
        let gx = self.space.gradient(&self.displacement[0], t, l);
        let gy = self.space.gradient(&self.displacement[1], t, l);
        stress_from_gradient([[gx.x, gx.y], [gy.x, gy.y]], self.lame_lambda, self.lame_mu)
    }

    /// `1/2 int sigma : eps` with the assembly quadrature.
    pub fn strain_energy(&self) -> f64 {
        let mut e = 0.0;
        for t in 0..self.mesh().n_triangles() {
            let mut q = 0.0;
            for &(l, w) in &TRIANGLE_DEGREE_2 {
                let gx = self.space.gradient(&self.displacement[0], t, l);
                let gy = self.space.gradient(&self.displacement[1], t, l);
                let s = stress_from_gradient(
                    [[gx.x, gx.y], [gy.x, gy.y]],
                    self.lame_lambda,
                    self.lame_mu,
                );
                let exy = 0.5 * (gx.y + gy.x);
                q += w * (s[0] * gx.x + s[1] * gy.y + 2.0 * s[2] * exy);
            }
            e += 0.5 * self.space.area(t) * q;
        }
        e
    }

    /// Recovered derivatives at a point on a component edge, interpolated
    /// along the nearest such edge.
    pub fn boundary_jet(&self, p: Vec2) -> Option<BoundaryJet> {
        let mesh = self.mesh();
        let mut best: Option<(usize, f64, f64)> = None;
        for (k, e) in mesh.boundary_edges.iter().enumerate() {
            if e.tag != BoundaryTag::Component {
                continue;
            }
            let (a, b) = (mesh.nodes[e.nodes[0]], mesh.nodes[e.nodes[1]]);
            let d = b - a;
            let s = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
            let dist = (a + s * d - p).norm();
            if best.is_none_or(|(_, _, bd)| dist < bd) {
                best = Some((k, s, dist));
            }
        }
        let (k, s, _) = best?;
        let dofs = self.space.edge_dofs(&mesh.boundary_edges[k]);
        let nb = edge_basis(s);
        let interp = |f: &[f64]| nb[0] * f[dofs[0]] + nb[1] * f[dofs[1]] + nb[2] * f[dofs[2]];
        let mut jet = BoundaryJet {
            grad: [[0.0; 2]; 2],
            hess: [[0.0; 3]; 2],
        };
        for c in 0..2 {
            for d in 0..2 {
                jet.grad[c][d] = interp(&self.grad_u[c][d]);
            }
            for d in 0..3 {
                jet.hess[c][d] = interp(&self.hess_u[c][d]);
            }
        }
        Some(jet)
    }

    /// CSV with columns `node,x,y,ux,uy,sxx,syy,sxy,von_mises` over vertices.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "node,x,y,ux,uy,sxx,syy,sxy,von_mises")?;
        for (i, p) in self.mesh().nodes.iter().enumerate() {
            let s = [self.stress[0][i], self.stress[1][i], self.stress[2][i]];
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                i,
                p.x,
                p.y,
                self.displacement[0][i],
                self.displacement[1][i],
                s[0],
                s[1],
                s[2],
                von_mises(s, self.lame_lambda, self.lame_mu)
            )?;
        }
        Ok(())
    }
}

/// `sigma = lambda tr(eps) I + 2 mu eps` as `(sxx, syy, sxy)`.
pub fn stress_from_gradient(g: [[f64; 2]; 2], lambda: f64, mu: f64) -> [f64; 3] {
    let div = g[0][0] + g[1][1];
    [
        lambda * div + 2.0 * mu * g[0][0],
        lambda * div + 2.0 * mu * g[1][1],
        mu * (g[0][1] + g[1][0]),
    ]
}

/// Plane-strain von Mises stress with `szz = nu (sxx + syy)`,
/// `nu = lambda / (2 (lambda + mu))`.
pub fn von_mises(s: [f64; 3], lambda: f64, mu: f64) -> f64 {
    let nu = lambda / (2.0 * (lambda + mu));
    let szz = nu * (s[0] + s[1]);
    let j2 =
        ((s[0] - s[1]).powi(2) + (s[1] - szz).powi(2) + (szz - s[0]).powi(2)) / 6.0 + s[2] * s[2];
    (3.0 * j2).sqrt()
}

pub fn solve_elasticity(
    problem: &ElasticityProblem,
) -> Result<ElasticitySolution, ElasticityError> {
    problem.validate()?;
    let (lambda, mu) = (problem.lame_lambda, problem.lame_mu);
    let space = Arc::new(P2Space::new(problem.mesh.clone()));
    let mesh = space.mesh();
    let n = space.n_dofs();

    // clamp values, by nodal interpolation of the prescribed displacement
    let mut fixed: Vec<Option<Vec2>> = vec![None; n];
    for e in mesh.edges_with_tag(BoundaryTag::Clamp) {
        for d in space.edge_dofs(e) {
            let p = space.dof_coords()[d];
            fixed[d] = Some(
                problem
                    .clamp_displacement
                    .as_ref()
                    .map_or(Vec2::zeros(), |f| f(p)),
            );
        }
    }
    let mut free_index = vec![usize::MAX; n];
    let mut n_free = 0;
    for d in 0..n {
        if fixed[d].is_none() {
            free_index[d] = n_free;
            n_free += 1;
        }
    }
    if n_free == 0 {
        return Err(ElasticityError::InvalidProblem(
            "every dof is clamped".into(),
        ));
    }

    // full load vector, interleaved
    let mut load = vec![0.0; 2 * n];
    for t in 0..mesh.n_triangles() {
        let dofs = space.element_dofs(t);
        let area = space.area(t);
        for &(l, w) in &TRIANGLE_DEGREE_5 {
            let f = problem.body_force(space.point(t, l));
            if f == Vec2::zeros() {
                continue;
            }
            let nb = crate::fem::basis(l);
            for a in 0..6 {
                load[2 * dofs[a]] += w * area * f.x * nb[a];
                load[2 * dofs[a] + 1] += w * area * f.y * nb[a];
            }
        }
    }
    for e in &mesh.boundary_edges {
        if e.tag == BoundaryTag::Clamp {
            continue;
        }
        let dofs = space.edge_dofs(e);
        let (a, b) = (mesh.nodes[e.nodes[0]], mesh.nodes[e.nodes[1]]);
        let len = (b - a).norm();
        for (s, w) in gauss3() {
            let g = problem.traction(a, b, s, e.tag);
            let nb = edge_basis(s);
            for k in 0..3 {
                load[2 * dofs[k]] += w * len * g.x * nb[k];
                load[2 * dofs[k] + 1] += w * len * g.y * nb[k];
            }
        }
    }

    let mut mat = SparseBuilder::with_capacity(2 * n_free, 144 * mesh.n_triangles());
    let mut rhs = vec![0.0; 2 * n_free];
    for d in (0..n).filter(|&d| fixed[d].is_none()) {
        let fi = free_index[d];
        rhs[2 * fi] = load[2 * d];
        rhs[2 * fi + 1] = load[2 * d + 1];
    }
    for t in 0..mesh.n_triangles() {
        let dofs = *space.element_dofs(t);
        let ke = element_stiffness(&space, t, lambda, mu);
        for a in 0..6 {
            let fa = free_index[dofs[a]];
            if fa == usize::MAX {
                continue;
            }
            for ca in 0..2 {
                let row = 2 * fa + ca;
                for b in 0..6 {
                    for cb in 0..2 {
                        let v = ke[2 * a + ca][2 * b + cb];
                        match fixed[dofs[b]] {
                            Some(u) => rhs[row] -= v * u[cb],
                            None => mat.add(row, 2 * free_index[dofs[b]] + cb, v),
                        }
                    }
                }
            }
        }
    }
    let sol = mat.solve(&rhs, Factorization::Cholesky, problem.rel_tol)?;
    let ax = mat.mul(&sol);
    let bnorm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rnorm = rhs
        .iter()
        .zip(&ax)
        .map(|(b, a)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt();
    let residual = if bnorm > 0.0 { rnorm / bnorm } else { rnorm };

    let mut ux = vec![0.0; n];
    let mut uy = vec![0.0; n];
    for d in 0..n {
        let u = match fixed[d] {
            Some(u) => u,
            None => Vec2::new(sol[2 * free_index[d]], sol[2 * free_index[d] + 1]),
        };
        ux[d] = u.x;
        uy[d] = u.y;
    }
    let external_work = (0..n)
        .map(|d| load[2 * d] * ux[d] + load[2 * d + 1] * uy[d])
        .sum();

    let patches = Patches::new(&space);
    let stress_vec = recover(&space, &patches, 3, None, |t, l| {
        let gx = space.gradient(&ux, t, l);
        let gy = space.gradient(&uy, t, l);
        stress_from_gradient([[gx.x, gx.y], [gy.x, gy.y]], lambda, mu).to_vec()
    });
    let [s0, s1, s2]: [Vec<f64>; 3] = stress_vec.try_into().expect("three stress components");
    let grad_x = recover_gradient(&space, &patches, &ux, None);
    let grad_y = recover_gradient(&space, &patches, &uy, None);

    let mut boundary_dofs: Vec<usize> = mesh
        .edges_with_tag(BoundaryTag::Component)
        .flat_map(|e| space.edge_dofs(e))
        .collect();
    boundary_dofs.sort_unstable();
    boundary_dofs.dedup();
    let (hx, hy) = if boundary_dofs.is_empty() {
        let nan = || [vec![f64::NAN; n], vec![f64::NAN; n], vec![f64::NAN; n]];
        (nan(), nan())
    } else {
        (
            recover_hessian(&space, &patches, &ux, &boundary_dofs),
            recover_hessian(&space, &patches, &uy, &boundary_dofs),
        )
    };

    Ok(ElasticitySolution {
        lame_lambda: lambda,
        lame_mu: mu,
        displacement: [ux, uy],
        stress: [s0, s1, s2],
        grad_u: [grad_x, grad_y],
        boundary_dofs,
        hess_u: [hx, hy],
        external_work,
        residual,
        space,
    })
}
