//! Objective functionals: friction power loss `J_E` and the failure
//! functional `J_R` with its probability of failure, both instances of a
//! generic local cost functional (volume plus surface integral).

mod life;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use life::{CmbRule, LifeRule, StressSample, N_MAX};

use crate::coupled::CoupledSolution;
use crate::elasticity::{stress_from_gradient, ElasticitySolution};
use crate::fem::quadrature::{gauss3, TRIANGLE_DEGREE_2};
use crate::flow::FlowSolution;
use crate::geometry::BoundaryGeometry;
use crate::mesh::Mesh;
use crate::{BoundaryTag, Vec2};

/// Blasius-type skin-friction constant.
pub const WALL_SHEAR_CONSTANT: f64 = 0.322;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObjectiveError {
    #[error("invalid objective model: {0}")]
    InvalidModel(String),
    #[error("life computation did not converge: {0}")]
    NonConvergence(String),
    #[error("non-finite {0}")]
    NonFinite(String),
    #[error("no solution data at boundary point ({x}, {y})")]
    MissingBoundaryData { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluidLossModel {
    pub dynamic_viscosity: f64,
    pub kinematic_viscosity: f64,
}

impl Default for FluidLossModel {
    fn default() -> Self {
        Self {
            dynamic_viscosity: 1e-3,
            kinematic_viscosity: 1e-3,
        }
    }
}

impl FluidLossModel {
    pub fn validate(&self) -> Result<(), ObjectiveError> {
        if self.dynamic_viscosity > 0.0
            && self.kinematic_viscosity > 0.0
            && self.dynamic_viscosity.is_finite()
            && self.kinematic_viscosity.is_finite()
        {
            Ok(())
        } else {
            Err(ObjectiveError::InvalidModel(format!(
                "viscosities must be positive, got {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReliabilityModel {
    /// Weibull shape `m > 0`.
    pub weibull_m: f64,
    /// Load cycles `t` at which the failure probability is reported.
    pub cycles: f64,
    pub life: Arc<dyn LifeRule>,
}

impl ReliabilityModel {
    pub fn new(
        weibull_m: f64,
        cycles: f64,
        life: Arc<dyn LifeRule>,
    ) -> Result<Self, ObjectiveError> {
        if !(weibull_m > 0.0 && weibull_m.is_finite()) {
            return Err(ObjectiveError::InvalidModel(format!(
                "Weibull modulus must be positive, got {weibull_m}"
            )));
        }
        if !(cycles >= 0.0 && cycles.is_finite()) {
            return Err(ObjectiveError::InvalidModel(format!(
                "cycle count must be nonnegative, got {cycles}"
            )));
        }
        Ok(Self {
            weibull_m,
            cycles,
            life,
        })
    }

    pub fn with_cmb(weibull_m: f64, cycles: f64, rule: CmbRule) -> Result<Self, ObjectiveError> {
        rule.validate()?;
        Self::new(weibull_m, cycles, Arc::new(rule))
    }
}

/// `tau_w = 0.322 mu_f |v|^(3/2) / sqrt(nu dist)`.
pub fn wall_shear(speed: f64, dist_le: f64, model: &FluidLossModel) -> f64 {
    WALL_SHEAR_CONSTANT * model.dynamic_viscosity * speed.powf(1.5)
        / (model.kinematic_viscosity * dist_le).sqrt()
}

/// `PoF(t) = 1 - exp(-t^m J_R)`.
pub fn probability_of_failure(j_r: f64, cycles: f64, weibull_m: f64) -> f64 {
    let x = cycles.powf(weibull_m) * j_r;
    (-(-x).exp_m1()).clamp(0.0, 1.0)
}

/// Gauss point on a boundary segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub point: Vec2,
    /// Outward normal of the segment.
    pub normal: Vec2,
    pub segment: usize,
    /// Fraction along the segment.
    pub s: f64,
    pub tag: BoundaryTag,
    /// Leading-edge distance, clamped below by `eps_LE`.
    pub dist_le: f64,
}

/// `sum over segments and 3 Gauss points of w |e| F(x)`, in a fixed order.
pub fn surface_integral<E>(
    boundary: &BoundaryGeometry,
    mut integrand: impl FnMut(&SurfacePoint) -> Result<f64, E>,
) -> Result<f64, E> {
    let mut total = 0.0;
    for i in 0..boundary.len() {
        let (a, b) = boundary.segment(i);
        let len = (b - a).norm();
        let d = b - a;
        let normal = Vec2::new(d.y, -d.x) / len;
        for (s, w) in gauss3() {
            let sp = SurfacePoint {
                point: a + s * d,
                normal,
                segment: i,
                s,
                tag: boundary.segment_tags[i],
                dist_le: boundary.dist_le_at(i, s),
            };
            total += w * len * integrand(&sp)?;
        }
    }
    Ok(total)
}

/// `sum over triangles of |T| sum_q w_q F(t, l_q, x_q)` with the degree-2
/// rule.
pub fn volume_integral<E>(
    mesh: &Mesh,
    mut integrand: impl FnMut(usize, [f64; 3], Vec2) -> Result<f64, E>,
) -> Result<f64, E> {
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let [a, b, c] = mesh.vertices(t);
        let area = mesh.triangle_area(t);
        let mut q = 0.0;
        for &(l, w) in &TRIANGLE_DEGREE_2 {
            q += w * integrand(t, l, l[0] * a + l[1] * b + l[2] * c)?;
        }
        total += area * q;
    }
    Ok(total)
}

/// `J = int_Omega F_vol + int_dOmega F_sur`. Both integrands see the
/// quadrature point; solution fields enter through what they capture.
pub fn local_cost_functional<E>(
    mesh: &Mesh,
    boundary: &BoundaryGeometry,
    f_vol: impl FnMut(usize, [f64; 3], Vec2) -> Result<f64, E>,
    f_sur: impl FnMut(&SurfacePoint) -> Result<f64, E>,
) -> Result<f64, E> {
    Ok(volume_integral(mesh, f_vol)? + surface_integral(boundary, f_sur)?)
}

/// Friction integrand `|v| tau_w` on wetted segments, zero elsewhere.
pub fn friction_integrand(
    model: &FluidLossModel,
    speed: impl Fn(Vec2) -> Option<f64>,
) -> impl Fn(&SurfacePoint) -> Result<f64, ObjectiveError> {
    let model = *model;
    move |sp| {
        if sp.tag != BoundaryTag::Component {
            return Ok(0.0);
        }
        let v = speed(sp.point).ok_or(ObjectiveError::MissingBoundaryData {
            x: sp.point.x,
            y: sp.point.y,
        })?;
        Ok(v * wall_shear(v, sp.dist_le, &model))
    }
}

/// `J_E` for an arbitrary boundary speed.
pub fn friction_loss_with(
    boundary: &BoundaryGeometry,
    model: &FluidLossModel,
    speed: impl Fn(Vec2) -> Option<f64>,
) -> Result<f64, ObjectiveError> {
    model.validate()?;
    surface_integral(boundary, friction_integrand(model, speed))
}

/// `J_E = int_{wetted} |v| tau_w dA`.
pub fn friction_loss(
    flow: &FlowSolution,
    boundary: &BoundaryGeometry,
    model: &FluidLossModel,
) -> Result<f64, ObjectiveError> {
    friction_loss_with(boundary, model, |p| flow.boundary_speed_at(p))
}

/// Stress sample (with plane-strain `szz`) at a point on the component
/// boundary, from the recovered boundary derivatives.
pub fn boundary_stress(solid: &ElasticitySolution, p: Vec2) -> Option<StressSample> {
    let jet = solid.boundary_jet(p)?;
    let (lambda, mu) = (solid.lame_lambda, solid.lame_mu);
    let nu = lambda / (2.0 * (lambda + mu));
    let with_zz = |s: [f64; 3]| [s[0], s[1], s[2], nu * (s[0] + s[1])];
    let sigma = with_zz(stress_from_gradient(jet.grad, lambda, mu));
    // d(grad u)/dx_d from the Hessians: hess[c] = (dxx, dxy, dyy)
    let dgrad = |d: usize| {
        let h = |c: usize, k: usize| jet.hess[c][if d == 0 { k } else { k + 1 }];
        [[h(0, 0), h(0, 1)], [h(1, 0), h(1, 1)]]
    };
    let grad = [
        with_zz(stress_from_gradient(dgrad(0), lambda, mu)),
        with_zz(stress_from_gradient(dgrad(1), lambda, mu)),
    ];
    Some(StressSample { sigma, grad })
}

/// Failure integrand `N_det^(-m)` on wetted segments, zero elsewhere.
pub fn reliability_integrand<'a>(
    model: &'a ReliabilityModel,
    stress: impl Fn(Vec2) -> Option<StressSample> + 'a,
) -> impl Fn(&SurfacePoint) -> Result<f64, ObjectiveError> + 'a {
    move |sp| {
        if sp.tag != BoundaryTag::Component {
            return Ok(0.0);
        }
        let sample = stress(sp.point).ok_or(ObjectiveError::MissingBoundaryData {
            x: sp.point.x,
            y: sp.point.y,
        })?;
        let n = model.life.cycles(&sample)?;
        Ok(n.powf(-model.weibull_m))
    }
}

/// `(J_R, PoF(t))`.
pub fn reliability_functional(
    solid: &ElasticitySolution,
    boundary: &BoundaryGeometry,
    model: &ReliabilityModel,
) -> Result<(f64, f64), ObjectiveError> {
    let j_r = surface_integral(
        boundary,
        reliability_integrand(model, |p| boundary_stress(solid, p)),
    )?;
    if !j_r.is_finite() {
        return Err(ObjectiveError::NonFinite("failure functional".into()));
    }
    Ok((
        j_r,
        probability_of_failure(j_r, model.cycles, model.weibull_m),
    ))
}

/// Objective values of one shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValues {
    pub j_e: f64,
    pub j_r: f64,
    pub pof: f64,
}

impl ObjectiveValues {
    /// The minimized vector `(J_E, J_R)`.
    pub fn vector(&self) -> ObjectiveVector {
        ObjectiveVector::new(vec![self.j_e, self.j_r], vec!["J_E".into(), "J_R".into()])
            .expect("objective values are finite")
    }
}

pub fn evaluate_objectives(
    solution: &CoupledSolution,
    fluid: &FluidLossModel,
    reliability: &ReliabilityModel,
) -> Result<ObjectiveValues, ObjectiveError> {
    let j_e = friction_loss(&solution.flow, &solution.boundary, fluid)?;
    let (j_r, pof) = reliability_functional(&solution.solid, &solution.boundary, reliability)?;
    Ok(ObjectiveValues { j_e, j_r, pof })
}

/// `J = (J_1, ..., J_l)` with component labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    values: Vec<f64>,
    labels: Vec<String>,
}

impl ObjectiveVector {
    pub fn new(values: Vec<f64>, labels: Vec<String>) -> Result<Self, ObjectiveError> {
        if values.len() != labels.len() {
            return Err(ObjectiveError::InvalidModel(
                "one label per objective is required".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(ObjectiveError::NonFinite(format!("objective value {v}")));
        }
        Ok(Self { values, labels })
    }

    /// Unlabelled vector, labels `J1..Jl`.
    pub fn from_values(values: Vec<f64>) -> Result<Self, ObjectiveError> {
        let labels = (1..=values.len()).map(|i| format!("J{i}")).collect();
        Self::new(values, labels)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
