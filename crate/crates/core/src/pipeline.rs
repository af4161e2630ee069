//! Run orchestration shared by the command-line tools: one evaluator built
//! from a [`Config`], pool sampling, and ordered (possibly parallel)
//! evaluation of many designs.

use std::io::{self, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Config, PoolSection, Sampler};
use crate::coupled::{coupled_solve, CoupledError, CoupledSolution, FlowSettings, SolidSettings};
use crate::geometry::{realize_shape, GeometryError, Shape, ShapeSpaceConfig};
use crate::mesh::{MeshError, MeshFamily};
use crate::multicrit::{DesignPool, EvaluatedDesign, MulticritError, Provenance};
use crate::objectives::{
    evaluate_objectives, FluidLossModel, ObjectiveError, ObjectiveValues, ReliabilityModel,
};
use crate::Vec2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Setup(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("shape {id}: {failure}")]
    Shape { id: usize, failure: ShapeFailure },
    #[error(transparent)]
    Pool(#[from] MulticritError),
    #[error("worker pool: {0}")]
    Workers(String),
}

/// What went wrong while evaluating one design.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShapeFailure {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Coupled(#[from] CoupledError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// Objective values of one design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub id: usize,
    pub coefficients: Vec<f64>,
    pub values: ObjectiveValues,
}

/// Everything needed to evaluate designs of one configuration.
#[derive(Debug)]
pub struct Evaluator {
    space: Arc<ShapeSpaceConfig>,
    family: MeshFamily,
    flow: FlowSettings,
    solid: SolidSettings,
    fluid: FluidLossModel,
    reliability: ReliabilityModel,
}

impl Evaluator {
    pub fn from_config(config: &Config) -> Result<Self, PipelineError> {
        let space = config.shape_space().map_err(PipelineError::Setup)?;
        let family = MeshFamily::new(&space, config.mesh.h, config.mesh_options())?;
        Ok(Self {
            space,
            family,
            flow: config.flow.clone(),
            solid: config.elasticity.clone(),
            fluid: config.fluidloss,
            reliability: config.reliability_model().map_err(PipelineError::Setup)?,
        })
    }

    pub fn space(&self) -> &Arc<ShapeSpaceConfig> {
        &self.space
    }

    pub fn family(&self) -> &MeshFamily {
        &self.family
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            mesh_h: self.family.h(),
            flow_tol: self.flow.rel_tol,
            elasticity_tol: self.solid.rel_tol,
        }
    }

    pub fn shape(&self, coefficients: &[f64]) -> Result<Shape, ShapeFailure> {
        Ok(realize_shape(&self.space, coefficients)?)
    }

    pub fn solve(&self, coefficients: &[f64]) -> Result<CoupledSolution, ShapeFailure> {
        let shape = self.shape(coefficients)?;
        Ok(coupled_solve(
            &shape,
            &self.family,
            &self.flow,
            &self.solid,
        )?)
    }

    pub fn objectives(&self, coefficients: &[f64]) -> Result<ObjectiveValues, ShapeFailure> {
        let solution = self.solve(coefficients)?;
        Ok(evaluate_objectives(
            &solution,
            &self.fluid,
            &self.reliability,
        )?)
    }

    /// Evaluates designs `(id, coefficients)` on `workers` threads. Results
    /// come back in input order whatever the completion order.
    pub fn evaluate_all(
        &self,
        designs: &[(usize, Vec<f64>)],
        workers: usize,
    ) -> Result<Vec<Result<DesignReport, PipelineError>>, PipelineError> {
        let run = |(id, c): &(usize, Vec<f64>)| {
            self.objectives(c)
                .map(|values| DesignReport {
                    id: *id,
                    coefficients: c.clone(),
                    values,
                })
                .map_err(|failure| PipelineError::Shape { id: *id, failure })
        };
        if workers <= 1 {
            return Ok(designs.iter().map(run).collect());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| PipelineError::Workers(e.to_string()))?;
        Ok(pool.install(|| designs.par_iter().map(run).collect()))
    }

    /// Like [`Evaluator::evaluate_all`], failing on the lowest-id error.
    pub fn evaluate_strict(
        &self,
        designs: &[(usize, Vec<f64>)],
        workers: usize,
    ) -> Result<Vec<DesignReport>, PipelineError> {
        self.evaluate_all(designs, workers)?.into_iter().collect()
    }

    /// Boundary point cloud of a design, used for shape distances.
    pub fn outline(&self, coefficients: &[f64], samples: usize) -> Result<Vec<Vec2>, ShapeFailure> {
        Ok(self.shape(coefficients)?.outline(samples))
    }
}

/// Coefficient vectors of the configured pool, duplicates removed (first
/// occurrence kept) and numbered from 0 in order.
pub fn sample_pool(pool: &PoolSection, n_modes: usize) -> Vec<(usize, Vec<f64>)> {
    let mut raw: Vec<Vec<f64>> = Vec::new();
    if pool.include_baseline {
        raw.push(vec![0.0; n_modes]);
    }
    match pool.sampler {
        Sampler::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(pool.seed);
            let b = pool.bound;
            while raw.len() < pool.size {
                raw.push(
                    (0..n_modes)
                        .map(|_| if b > 0.0 { rng.gen_range(-b..=b) } else { 0.0 })
                        .collect(),
                );
                if b == 0.0 {
                    break;
                }
            }
        }
        Sampler::Grid => {
            if let Some(g) = &pool.grid {
                raw.extend(g.coefficients(n_modes));
            }
        }
        Sampler::List => raw.extend(pool.designs.iter().cloned()),
    }
    dedup(raw)
}

/// Removes repeated coefficient vectors (`-0.0` equals `0.0`) and numbers
/// the survivors.
pub fn dedup(raw: Vec<Vec<f64>>) -> Vec<(usize, Vec<f64>)> {
    let mut seen = std::collections::HashSet::new();
    raw.into_iter()
        .filter(|c| seen.insert(c.iter().map(|v| (v + 0.0).to_bits()).collect::<Vec<u64>>()))
        .enumerate()
        .collect()
}

pub fn design_pool(
    reports: &[DesignReport],
    provenance: Provenance,
) -> Result<DesignPool, PipelineError> {
    Ok(DesignPool::new(
        reports
            .iter()
            .map(|r| EvaluatedDesign {
                id: r.id,
                coefficients: r.coefficients.clone(),
                objectives: r.values.vector(),
                provenance,
            })
            .collect(),
    )?)
}

/// `shape_id,c_1..c_n,J_E,J_R,PoF`, rows in the given order.
pub fn write_objectives_csv<W: Write>(
    reports: &[DesignReport],
    n_modes: usize,
    mut out: W,
) -> io::Result<()> {
    let coeffs: Vec<String> = (1..=n_modes).map(|i| format!("c_{i}")).collect();
    writeln!(out, "shape_id,{},J_E,J_R,PoF", coeffs.join(","))?;
    for r in reports {
        let c: Vec<String> = r.coefficients.iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "{},{},{},{},{}",
            r.id,
            c.join(","),
            r.values.j_e,
            r.values.j_r,
            r.values.pof
        )?;
    }
    Ok(())
}
