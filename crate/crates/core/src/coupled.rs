//! One-way coupling: flow around a shape, then the solid loaded by the
//! static pressure of that flow.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::elasticity::{
    solve_elasticity, ElasticityError, ElasticityProblem, ElasticitySolution, TractionLoad,
    VolumeLoad,
};
use crate::flow::{
    solve_flow, static_pressure, traction_from_pressure, BoundaryPressure, BoundaryTraction,
    FlowError, FlowProblem, FlowSolution, InflowProfile,
};
use crate::geometry::{boundary_geometry, BoundaryGeometry, GeometryError, Shape};
use crate::mesh::{MeshError, MeshFamily};
use crate::{BoundaryTag, Vec2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoupledError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Elasticity(#[from] ElasticityError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSettings {
    /// Uniform inflow speed `U`.
    pub inflow_speed: f64,
    pub density: f64,
    pub stagnation_pressure: f64,
    /// `phi(pin) = 0`; defaults to a point just inside the inlet at mid-height.
    pub pin_x: Option<f64>,
    pub pin_y: Option<f64>,
    /// Literal normal inflow speed on the inlet. When set together with
    /// `outlet_velocity` it replaces the uniform profile and is not
    /// rebalanced, so incompatible data is reported rather than fixed.
    pub inlet_velocity: Option<f64>,
    pub outlet_velocity: Option<f64>,
    pub rel_tol: f64,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self {
            inflow_speed: 1.0,
            density: 1.0,
            stagnation_pressure: 1.0,
            pin_x: None,
            pin_y: None,
            inlet_velocity: None,
            outlet_velocity: None,
            rel_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolidSettings {
    #[serde(rename = "lambda")]
    pub lame_lambda: f64,
    #[serde(rename = "mu")]
    pub lame_mu: f64,
    pub body_force: [f64; 2],
    pub rel_tol: f64,
}

impl Default for SolidSettings {
    fn default() -> Self {
        Self {
            lame_lambda: 150.0,
            lame_mu: 100.0,
            body_force: [0.0, 0.0],
            rel_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoupledSolution {
    pub boundary: BoundaryGeometry,
    pub flow_problem: FlowProblem,
    pub flow: FlowSolution,
    pub pressure: BoundaryPressure,
    pub traction: BoundaryTraction,
    pub solid: ElasticitySolution,
}

/// Flow problem on a fluid mesh of `shape`'s shape space.
pub fn flow_problem(
    shape: &Shape,
    mesh: crate::mesh::Mesh,
    settings: &FlowSettings,
) -> FlowProblem {
    let d = shape.config().shroud();
    let pin = Vec2::new(
        settings.pin_x.unwrap_or(d.x_min + 0.05 * d.width()),
        settings.pin_y.unwrap_or(d.y_min + 0.5 * d.height()),
    );
    let inflow = match (settings.inlet_velocity, settings.outlet_velocity) {
        (None, None) => InflowProfile::Uniform {
            speed: settings.inflow_speed,
        },
        (vin, vout) => {
            let (vin, vout) = (vin.unwrap_or(0.0), vout.unwrap_or(0.0));
            InflowProfile::Function(Arc::new(move |_, tag| match tag {
                BoundaryTag::Inlet => -vin,
                BoundaryTag::Outlet => vout,
                _ => 0.0,
            }))
        }
    };
    FlowProblem {
        density: settings.density,
        stagnation_pressure: settings.stagnation_pressure,
        rel_tol: settings.rel_tol,
        ..FlowProblem::new(mesh, inflow, pin)
    }
}

pub fn coupled_solve(
    shape: &Shape,
    meshes: &MeshFamily,
    flow: &FlowSettings,
    solid: &SolidSettings,
) -> Result<CoupledSolution, CoupledError> {
    let boundary = boundary_geometry(shape, meshes.resolution())?;
    let (fluid_mesh, solid_mesh) = meshes.meshes_for(shape)?;
    let flow_problem = flow_problem(shape, fluid_mesh, flow);
    let flow_solution = solve_flow(&flow_problem)?;
    let pressure = static_pressure(&flow_solution, &flow_problem, &boundary)?;
    let traction = traction_from_pressure(&pressure, &boundary);
    let problem = ElasticityProblem {
        volume_load: VolumeLoad::Constant(Vec2::new(solid.body_force[0], solid.body_force[1])),
        traction: TractionLoad::Sampled(traction.clone()),
        rel_tol: solid.rel_tol,
        ..ElasticityProblem::new(solid_mesh, solid.lame_lambda, solid.lame_mu)
    };
    let solid_solution = solve_elasticity(&problem)?;
    Ok(CoupledSolution {
        boundary,
        flow_problem,
        flow: flow_solution,
        pressure,
        traction,
        solid: solid_solution,
    })
}
