//! Potential flow in the fluid region: `Laplace(phi) = 0` with Neumann data
//! `g` on the inlet and outlet and zero flux on walls and the component.
//!
//! The pure-Neumann system is solved for its mean-zero solution and then
//! shifted so that `phi(x0) = 0`.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use crate::fem::quadrature::{gauss3, TRIANGLE_DEGREE_2};
use crate::fem::recovery::{recover_gradient, Patches};
use crate::fem::{edge_basis, Factorization, P2Space, SolveError, SparseBuilder};
use crate::geometry::BoundaryGeometry;
use crate::mesh::{Mesh, Region};
use crate::{BoundaryTag, Vec2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("incompatible Neumann data: boundary integral of g is {integral:.3e} (must vanish)")]
    IncompatibleData { integral: f64 },
    #[error("singular flow system: {0}")]
    SingularSystem(String),
    #[error("invalid flow problem: {0}")]
    InvalidProblem(String),
}

impl From<SolveError> for FlowError {
    fn from(e: SolveError) -> Self {
        FlowError::SingularSystem(e.to_string())
    }
}

/// Normal velocity `g = d phi / d n` (outward normal) on inlet and outlet.
#[derive(Clone)]
pub enum InflowProfile {
    /// Mean speed `U` across the channel height `H` (the vertical extent of
    /// the mesh): `-U H / |inlet|` on the inlet and `+U H / |outlet|` on the
    /// outlet. The volume flow is `U H` even when rounded corners shorten the
    /// inlet, and the compatibility condition holds by construction.
    Uniform { speed: f64 },
    /// Arbitrary data evaluated on inlet and outlet edges only.
    Function(Arc<dyn Fn(Vec2, BoundaryTag) -> f64 + Send + Sync>),
}

impl fmt::Debug for InflowProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InflowProfile::Uniform { speed } => write!(f, "Uniform {{ speed: {speed} }}"),
            InflowProfile::Function(_) => f.write_str("Function(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowProblem {
    pub mesh: Mesh,
    pub inflow: InflowProfile,
    /// `x0` with `phi(x0) = 0`.
    pub pin_point: Vec2,
    pub density: f64,
    pub stagnation_pressure: f64,
    /// Relative residual tolerance of the linear solve.
    pub rel_tol: f64,
}

impl FlowProblem {
    pub fn new(mesh: Mesh, inflow: InflowProfile, pin_point: Vec2) -> Self {
        Self {
            mesh,
            inflow,
            pin_point,
            density: 1.0,
            stagnation_pressure: 0.0,
            rel_tol: 1e-10,
        }
    }

    /// Boundary data on an edge with `tag` at point `p`; zero away from the
    /// inlet and outlet.
    fn neumann(&self, p: Vec2, tag: BoundaryTag, lengths: (f64, f64, f64)) -> f64 {
        match (&self.inflow, tag) {
            (InflowProfile::Uniform { speed }, BoundaryTag::Inlet) => {
                -speed * lengths.2 / lengths.0
            }
            (InflowProfile::Uniform { speed }, BoundaryTag::Outlet) => {
                speed * lengths.2 / lengths.1
            }
            (InflowProfile::Function(g), BoundaryTag::Inlet | BoundaryTag::Outlet) => g(p, tag),
            _ => 0.0,
        }
    }

    /// Inlet length, outlet length and channel height.
    fn lengths(&self) -> (f64, f64, f64) {
        let (lo, hi) = self
            .mesh
            .nodes
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.y), hi.max(p.y))
            });
        (
            self.mesh.tagged_length(BoundaryTag::Inlet),
            self.mesh.tagged_length(BoundaryTag::Outlet),
            hi - lo,
        )
    }

    /// `(int g, int |g|)` over the boundary by three-point Gauss per edge.
    pub fn neumann_integrals(&self) -> (f64, f64) {
        let lengths = self.lengths();
        let (mut total, mut abs) = (0.0, 0.0);
        for e in &self.mesh.boundary_edges {
            if !matches!(e.tag, BoundaryTag::Inlet | BoundaryTag::Outlet) {
                continue;
            }
            let (a, b) = (self.mesh.nodes[e.nodes[0]], self.mesh.nodes[e.nodes[1]]);
            let len = (b - a).norm();
            for (s, w) in gauss3() {
                let g = self.neumann(a + s * (b - a), e.tag, lengths);
                total += w * len * g;
                abs += w * len * g.abs();
            }
        }
        (total, abs)
    }

    /// Solvability check for the pure Neumann problem: `|int g| <= 1e-10 max(1, int |g|)`.
    pub fn check_compatibility(&self) -> Result<(), FlowError> {
        let (total, abs) = self.neumann_integrals();
        if !total.is_finite() || total.abs() > 1e-10 * abs.max(1.0) {
            return Err(FlowError::IncompatibleData { integral: total });
        }
        Ok(())
    }
}

/// Discrete potential, recovered velocity and boundary speed.
#[derive(Debug, Clone)]
pub struct FlowSolution {
    space: Arc<P2Space>,
    /// Nodal values at every P2 dof (vertices first).
    pub phi: Vec<f64>,
    /// Recovered velocity `(vx, vy)` at every P2 dof.
    pub velocity: [Vec<f64>; 2],
    /// Component-boundary mesh vertices, sorted.
    pub component_nodes: Vec<usize>,
    /// `|v|` at `component_nodes`.
    pub boundary_speed: Vec<f64>,
    /// Relative residual of the final linear solve.
    pub residual: f64,
    pub inlet_flux: f64,
    pub outlet_flux: f64,
}

impl FlowSolution {
    pub fn space(&self) -> &P2Space {
        &self.space
    }

    pub fn mesh(&self) -> &Mesh {
        self.space.mesh()
    }

    pub fn phi_at(&self, p: Vec2) -> Option<f64> {
        self.space.evaluate_at(&self.phi, p)
    }

    /// Recovered (continuous) velocity at any point of the fluid mesh.
    pub fn velocity_at(&self, p: Vec2) -> Option<Vec2> {
        let (t, l) = self.space.locate(p)?;
        Some(Vec2::new(
            self.space.evaluate(&self.velocity[0], t, l),
            self.space.evaluate(&self.velocity[1], t, l),
        ))
    }

    pub fn speed_at(&self, p: Vec2) -> Option<f64> {
        self.velocity_at(p).map(|v| v.norm())
    }

    /// Recovered velocity traced along the component edge nearest to `p`;
    /// `None` when the mesh has no component edges.
    pub fn boundary_velocity(&self, p: Vec2) -> Option<Vec2> {
        let mesh = self.mesh();
        let mut best: Option<(usize, f64, f64)> = None;
        for (k, e) in mesh.boundary_edges.iter().enumerate() {
            if e.tag != BoundaryTag::Component {
                continue;
            }
            let (a, b) = (mesh.nodes[e.nodes[0]], mesh.nodes[e.nodes[1]]);
            let d = b - a;
            let s = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
            let dist = (a + s * d - p).norm_squared();
            if best.is_none_or(|(_, _, bd)| dist < bd) {
                best = Some((k, s, dist));
            }
        }
        let (k, s, _) = best?;
        let dofs = self.space.edge_dofs(&mesh.boundary_edges[k]);
        let nb = edge_basis(s);
        let trace = |f: &[f64]| nb[0] * f[dofs[0]] + nb[1] * f[dofs[1]] + nb[2] * f[dofs[2]];
        Some(Vec2::new(
            trace(&self.velocity[0]),
            trace(&self.velocity[1]),
        ))
    }

    pub fn boundary_speed_at(&self, p: Vec2) -> Option<f64> {
        self.boundary_velocity(p).map(|v| v.norm())
    }

    /// `1/2 int |grad phi|^2` using the raw element gradients.
    pub fn dirichlet_energy(&self) -> f64 {
        let s = &self.space;
        let mut e = 0.0;
        for t in 0..s.mesh().n_triangles() {
            let q: f64 = TRIANGLE_DEGREE_2
                .iter()
                .map(|&(l, w)| w * s.gradient(&self.phi, t, l).norm_squared())
                .sum();
            e += 0.5 * s.area(t) * q;
        }
        e
    }

    /// CSV with columns `node,x,y,phi,vx,vy` over the mesh vertices.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "node,x,y,phi,vx,vy")?;
        for (i, p) in self.mesh().nodes.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                i, p.x, p.y, self.phi[i], self.velocity[0][i], self.velocity[1][i]
            )?;
        }
        Ok(())
    }
}

pub fn solve_flow(problem: &FlowProblem) -> Result<FlowSolution, FlowError> {
    if problem.mesh.region != Region::Fluid {
        return Err(FlowError::InvalidProblem(
            "flow requires a fluid mesh".into(),
        ));
    }
    if !(problem.density > 0.0) {
        return Err(FlowError::InvalidProblem("density must be positive".into()));
    }
    if !(problem.rel_tol > 0.0) {
        return Err(FlowError::InvalidProblem(
            "solver tolerance must be positive".into(),
        ));
    }
    problem.check_compatibility()?;

    let space = Arc::new(P2Space::new(problem.mesh.clone()));
    let pin = space
        .locate(problem.pin_point)
        .ok_or_else(|| FlowError::InvalidProblem("pin point lies outside the fluid mesh".into()))?;
    let n = space.n_dofs();
    let mesh = space.mesh();
    // Stiffness with dof 0 eliminated; `k_full` keeps the singular operator
    // for the residual check.
    let mut k_free = SparseBuilder::with_capacity(n - 1, 36 * mesh.n_triangles());
    let mut k_full = SparseBuilder::with_capacity(n, 36 * mesh.n_triangles());
    let mut mass = vec![0.0; n];
    for t in 0..mesh.n_triangles() {
        let dofs = *space.element_dofs(t);
        let area = space.area(t);
        let mut ke = [[0.0; 6]; 6];
        for &(l, w) in &TRIANGLE_DEGREE_2 {
            let g = space.basis_gradients(t, l);
            for i in 0..6 {
                for j in 0..6 {
                    ke[i][j] += w * area * g[i].dot(&g[j]);
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                k_full.add(dofs[i], dofs[j], ke[i][j]);
                if dofs[i] != 0 && dofs[j] != 0 {
                    k_free.add(dofs[i] - 1, dofs[j] - 1, ke[i][j]);
                }
            }
        }
        // int N_i: vertex functions integrate to 0, midpoint functions to area/3
        for &d in &dofs[3..] {
            mass[d] += area / 3.0;
        }
    }
    let lengths = problem.lengths();
    let mut rhs = vec![0.0; n];
    let (mut inlet_flux, mut outlet_flux) = (0.0, 0.0);
    for e in &mesh.boundary_edges {
        if !matches!(e.tag, BoundaryTag::Inlet | BoundaryTag::Outlet) {
            continue;
        }
        let dofs = space.edge_dofs(e);
        let (pa, pb) = (mesh.nodes[e.nodes[0]], mesh.nodes[e.nodes[1]]);
        let len = (pb - pa).norm();
        for (s, w) in gauss3() {
            let g = problem.neumann(pa + s * (pb - pa), e.tag, lengths);
            let nb = edge_basis(s);
            for k in 0..3 {
                rhs[dofs[k]] += w * len * g * nb[k];
            }
            if e.tag == BoundaryTag::Inlet {
                inlet_flux += w * len * g;
            } else {
                outlet_flux += w * len * g;
            }
        }
    }
    // With compatible data the multiplier of the mean-value constraint is
    // zero, so pinning one dof and then removing the mean gives the same
    // solution as the bordered system while keeping it positive definite.
    let reduced = k_free.solve(&rhs[1..], Factorization::Cholesky, problem.rel_tol)?;
    let mut phi = Vec::with_capacity(n);
    phi.push(0.0);
    phi.extend_from_slice(&reduced);
    let volume: f64 = mass.iter().sum();
    let mean = mass.iter().zip(&phi).map(|(m, v)| m * v).sum::<f64>() / volume;
    for v in &mut phi {
        *v -= mean;
    }
    let kx = k_full.mul(&phi);
    let bnorm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rnorm = rhs
        .iter()
        .zip(&kx)
        .map(|(b, a)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt();
    let residual = if bnorm > 0.0 { rnorm / bnorm } else { rnorm };
    if !(residual <= problem.rel_tol) {
        return Err(FlowError::SingularSystem(format!(
            "relative residual {residual:.3e} above tolerance {:.1e}",
            problem.rel_tol
        )));
    }
    let shift = space.evaluate(&phi, pin.0, pin.1);
    for v in &mut phi {
        *v -= shift;
    }
    let patches = Patches::new(&space);
    let velocity = recover_gradient(&space, &patches, &phi, None);
    let component_nodes = problem.mesh.nodes_with_tag(BoundaryTag::Component);
    let boundary_speed = component_nodes
        .iter()
        .map(|&i| velocity[0][i].hypot(velocity[1][i]))
        .collect();
    Ok(FlowSolution {
        space,
        phi,
        velocity,
        component_nodes,
        boundary_speed,
        residual,
        inlet_flux,
        outlet_flux,
    })
}

/// Static pressure `p_st - rho |v|^2 / 2` on the wetted boundary, zero on the
/// dry part.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPressure {
    /// At each boundary vertex.
    pub at_vertices: Vec<f64>,
    /// At the midpoint of each boundary segment.
    pub at_midpoints: Vec<f64>,
}

/// Samples the static pressure at the vertices and segment midpoints of
/// `boundary`. Values on dry segments (and at vertices touching only dry
/// segments) are zero.
pub fn static_pressure(
    solution: &FlowSolution,
    problem: &FlowProblem,
    boundary: &BoundaryGeometry,
) -> Result<BoundaryPressure, FlowError> {
    static_pressure_with(
        boundary,
        problem.density,
        problem.stagnation_pressure,
        |p| solution.boundary_speed_at(p),
    )
}

/// [`static_pressure`] for an arbitrary speed field.
pub fn static_pressure_with(
    boundary: &BoundaryGeometry,
    density: f64,
    stagnation_pressure: f64,
    speed: impl Fn(Vec2) -> Option<f64>,
) -> Result<BoundaryPressure, FlowError> {
    let n = boundary.len();
    let bernoulli = |p: Vec2| -> Result<f64, FlowError> {
        let s = speed(p).ok_or_else(|| {
            FlowError::InvalidProblem(format!(
                "boundary point ({}, {}) outside the fluid mesh",
                p.x, p.y
            ))
        })?;
        Ok(stagnation_pressure - 0.5 * density * s * s)
    };
    let mut at_vertices = vec![0.0; n];
    for i in boundary.wetted_vertices() {
        at_vertices[i] = bernoulli(boundary.vertices[i])?;
    }
    let mut at_midpoints = vec![0.0; n];
    for (i, m) in at_midpoints.iter_mut().enumerate() {
        if boundary.is_wetted(i) {
            let (a, b) = boundary.segment(i);
            *m = bernoulli(0.5 * (a + b))?;
        }
    }
    Ok(BoundaryPressure {
        at_vertices,
        at_midpoints,
    })
}

/// Traction `g_s = -p_s n` sampled like the pressure; zero on dry segments.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTraction {
    pub boundary: BoundaryGeometry,
    pub at_vertices: Vec<Vec2>,
    pub at_midpoints: Vec<Vec2>,
}

pub fn traction_from_pressure(
    pressure: &BoundaryPressure,
    boundary: &BoundaryGeometry,
) -> BoundaryTraction {
    let n = boundary.len();
    let at_vertices = (0..n)
        .map(|i| -pressure.at_vertices[i] * boundary.normals[i])
        .collect();
    let at_midpoints = (0..n)
        .map(|i| {
            if !boundary.is_wetted(i) {
                return Vec2::zeros();
            }
            let nm = boundary.normals[i] + boundary.normals[(i + 1) % n];
            let nm = if nm.norm() > 0.0 {
                nm.normalize()
            } else {
                boundary.normals[i]
            };
            -pressure.at_midpoints[i] * nm
        })
        .collect();
    BoundaryTraction {
        boundary: boundary.clone(),
        at_vertices,
        at_midpoints,
    }
}

impl BoundaryTraction {
    /// Quadratic interpolation along segment `i` at parameter `s`; zero on
    /// dry segments.
    pub fn on_segment(&self, i: usize, s: f64) -> Vec2 {
        if !self.boundary.is_wetted(i) {
            return Vec2::zeros();
        }
        let n = self.boundary.len();
        let [a, m, b] = edge_basis(s);
        a * self.at_vertices[i] + m * self.at_midpoints[i] + b * self.at_vertices[(i + 1) % n]
    }

    /// Traction at a point on (or within `tol` of) the sampled boundary.
    pub fn at_point(&self, p: Vec2) -> Vec2 {
        let (i, s) = self.boundary.project(p);
        self.on_segment(i, s)
    }

    /// `int g_s dA` by three-point Gauss per segment.
    pub fn net_force(&self) -> Vec2 {
        let mut f = Vec2::zeros();
        for i in 0..self.boundary.len() {
            let len = self.boundary.segment_length(i);
            for (s, w) in gauss3() {
                f += w * len * self.on_segment(i, s);
            }
        }
        f
    }
}
