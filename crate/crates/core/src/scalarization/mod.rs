//! Scalarization `S_theta(J)`: weighted sums and epsilon constraints, their
//! set-valued argmins over a design pool or by derivative-free search, and
//! stability diagnostics for the optimal-set mapping.

mod search;

use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use search::{pattern_search, SearchConfig, SearchOutcome};

use crate::geometry::{directed_hausdorff, hausdorff_distance, GeometryError, MetricPoint};
use crate::multicrit::{nondominated_mask, DesignPool, EvaluatedDesign};
use crate::Vec2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScalarizationError {
    #[error("no feasible design for {0}")]
    InfeasibleProblem(String),
    #[error("invalid scalarization: {0}")]
    InvalidSpec(String),
    #[error("design pool is empty")]
    EmptyPool,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarizationSpec {
    /// `S_theta(J) = sum_i theta_i J_i`.
    WeightedSum { weights: Vec<f64> },
    /// Minimize `J_j` subject to `J_i <= eps_i` for `i != j`; `eps[j]` is
    /// ignored.
    EpsilonConstraint { objective: usize, eps: Vec<f64> },
}

/// Result of `S_theta` at one objective vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalarized {
    Feasible(f64),
    Infeasible,
}

impl Scalarized {
    pub fn value(self) -> Option<f64> {
        match self {
            Scalarized::Feasible(v) => Some(v),
            Scalarized::Infeasible => None,
        }
    }
}

impl ScalarizationSpec {
    /// Checks the parameter against `l` objectives.
    pub fn validate(&self, l: usize) -> Result<(), ScalarizationError> {
        match self {
            ScalarizationSpec::WeightedSum { weights } => {
                if weights.len() != l || weights.iter().any(|w| !w.is_finite()) {
                    return Err(ScalarizationError::InvalidSpec(format!(
                        "weighted sum needs {l} finite weights, got {weights:?}"
                    )));
                }
            }
            ScalarizationSpec::EpsilonConstraint { objective, eps } => {
                if *objective >= l || eps.len() != l || eps.iter().any(|e| e.is_nan()) {
                    return Err(ScalarizationError::InvalidSpec(format!(
                        "epsilon constraint needs an objective index below {l} and {l} bounds"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The parameter `theta` as a flat vector (weights, or the bounds).
    pub fn theta(&self) -> Vec<f64> {
        match self {
            ScalarizationSpec::WeightedSum { weights } => weights.clone(),
            ScalarizationSpec::EpsilonConstraint { eps, .. } => eps.clone(),
        }
    }

    pub fn has_positive_weights(&self) -> bool {
        matches!(self, ScalarizationSpec::WeightedSum { weights } if weights.iter().all(|&w| w > 0.0))
    }
}

impl std::fmt::Display for ScalarizationSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarizationSpec::WeightedSum { weights } => write!(f, "weighted sum {weights:?}"),
            ScalarizationSpec::EpsilonConstraint { objective, eps } => {
                write!(
                    f,
                    "epsilon constraint on J{} with bounds {eps:?}",
                    objective + 1
                )
            }
        }
    }
}

pub fn scalarize(spec: &ScalarizationSpec, objectives: &[f64]) -> Scalarized {
    match spec {
        ScalarizationSpec::WeightedSum { weights } => {
            Scalarized::Feasible(weights.iter().zip(objectives).map(|(w, j)| w * j).sum())
        }
        ScalarizationSpec::EpsilonConstraint { objective, eps } => {
            let feasible = objectives
                .iter()
                .zip(eps)
                .enumerate()
                .all(|(i, (j, e))| i == *objective || j <= e);
            if feasible {
                Scalarized::Feasible(objectives[*objective])
            } else {
                Scalarized::Infeasible
            }
        }
    }
}

/// `delta_tol = 1e-9 |tau| + 1e-12`.
pub fn argmin_tolerance(tau: f64) -> f64 {
    1e-9 * tau.abs() + 1e-12
}

/// Set-valued argmin: every design within `tolerance` of `optimal_value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgminSet {
    /// Design ids, ascending.
    pub members: Vec<usize>,
    pub optimal_value: f64,
    pub tolerance: f64,
}

impl ArgminSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Exact argmin over a finite pool.
pub fn argmin_over_pool(
    spec: &ScalarizationSpec,
    pool: &DesignPool,
) -> Result<ArgminSet, ScalarizationError> {
    let first = pool
        .designs()
        .first()
        .ok_or(ScalarizationError::EmptyPool)?;
    spec.validate(first.objectives.len())?;
    let values: Vec<(usize, f64)> = pool
        .designs()
        .iter()
        .filter_map(|d| {
            scalarize(spec, d.objectives.values())
                .value()
                .map(|v| (d.id, v))
        })
        .collect();
    let tau = values
        .iter()
        .map(|&(_, v)| v)
        .min_by(f64::total_cmp)
        .ok_or_else(|| ScalarizationError::InfeasibleProblem(spec.to_string()))?;
    let tolerance = argmin_tolerance(tau);
    let mut members: Vec<usize> = values
        .iter()
        .filter(|&&(_, v)| v <= tau + tolerance)
        .map(|&(id, _)| id)
        .collect();
    members.sort_unstable();
    Ok(ArgminSet {
        members,
        optimal_value: tau,
        tolerance,
    })
}

/// Positive-weights sufficiency: every argmin member is nondominated in the
/// pool. Errors unless the spec is a weighted sum with positive weights.
pub fn argmin_is_pareto(
    spec: &ScalarizationSpec,
    pool: &DesignPool,
) -> Result<bool, ScalarizationError> {
    if !spec.has_positive_weights() {
        return Err(ScalarizationError::InvalidSpec(
            "the sufficiency check needs strictly positive weights".into(),
        ));
    }
    let argmin = argmin_over_pool(spec, pool)?;
    let mask = nondominated_mask(pool);
    Ok(pool
        .designs()
        .iter()
        .zip(mask)
        .all(|(d, nd)| nd || argmin.members.binary_search(&d.id).is_err()))
}

/// Outline of one design, compared to others by Hausdorff distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeCloud(pub Arc<Vec<Vec2>>);

impl MetricPoint for ShapeCloud {
    fn distance(&self, other: &Self) -> f64 {
        hausdorff_distance(&self.0, &other.0).unwrap_or(f64::INFINITY)
    }
}

/// One step of a stability sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: Vec<f64>,
    /// `tau(theta)`, `None` when infeasible.
    pub optimal_value: Option<f64>,
    pub argmin_size: usize,
    /// `sup_{x in zeta_n} inf_{x' in zeta*} d_H(x, x')` on shape outlines.
    pub deviation: Option<f64>,
    /// The same deviation on coefficient vectors.
    pub coefficient_deviation: Option<f64>,
}

/// Deviation of each `zeta_{theta_n}` from `zeta_{theta*}` over a fixed
/// pool. `outline(design)` supplies the boundary point cloud of a design.
pub fn stability_sweep(
    sequence: &[ScalarizationSpec],
    limit: &ScalarizationSpec,
    pool: &DesignPool,
    outline: impl Fn(&EvaluatedDesign) -> Result<Vec<Vec2>, ScalarizationError>,
) -> Result<Vec<SweepRow>, ScalarizationError> {
    let reference = argmin_over_pool(limit, pool)?;
    let clouds = |set: &ArgminSet| -> Result<(Vec<ShapeCloud>, Vec<Vec<f64>>), ScalarizationError> {
        let mut shapes = Vec::with_capacity(set.len());
        let mut coeffs = Vec::with_capacity(set.len());
        for id in &set.members {
            let d = pool.get(*id).expect("argmin members come from the pool");
            shapes.push(ShapeCloud(Arc::new(outline(d)?)));
            coeffs.push(d.coefficients.clone());
        }
        Ok((shapes, coeffs))
    };
    let (ref_shapes, ref_coeffs) = clouds(&reference)?;
    let mut rows = Vec::with_capacity(sequence.len());
    for spec in sequence {
        let row = match argmin_over_pool(spec, pool) {
            Ok(set) => {
                let (shapes, coeffs) = clouds(&set)?;
                SweepRow {
                    theta: spec.theta(),
                    optimal_value: Some(set.optimal_value),
                    argmin_size: set.len(),
                    deviation: Some(directed_hausdorff(&shapes, &ref_shapes)?),
                    coefficient_deviation: Some(directed_hausdorff(&coeffs, &ref_coeffs)?),
                }
            }
            Err(ScalarizationError::InfeasibleProblem(_)) => SweepRow {
                theta: spec.theta(),
                optimal_value: None,
                argmin_size: 0,
                deviation: None,
                coefficient_deviation: None,
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(rows)
}

/// CSV with columns `theta_1..theta_l,tau,argmin_size,d_H,d_coeff`; empty
/// cells mark infeasible steps.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    let l = rows.first().map_or(0, |r| r.theta.len());
    let thetas: Vec<String> = (1..=l).map(|i| format!("theta_{i}")).collect();
    writeln!(out, "{},tau,argmin_size,d_H,d_coeff", thetas.join(","))?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for r in rows {
        let t: Vec<String> = r.theta.iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "{},{},{},{},{}",
            t.join(","),
            opt(r.optimal_value),
            r.argmin_size,
            opt(r.deviation),
            opt(r.coefficient_deviation)
        )?;
    }
    Ok(())
}

/// Outcome of an epsilon-chain check.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonChainReport {
    /// `tau(eps_k)`, `None` where the feasible set is empty.
    pub values: Vec<Option<f64>>,
    /// `tau` weakly increases along the chain (an empty set counts as
    /// `+inf`).
    pub monotone: bool,
    /// Each feasible subset contains the next one.
    pub nested: bool,
}

impl EpsilonChainReport {
    pub fn holds(&self) -> bool {
        self.monotone && self.nested
    }
}

/// Checks monotonicity of `tau` and nesting of the feasible sets along a
/// componentwise nonincreasing chain of bounds for objective `j`.
pub fn epsilon_monotonicity(
    objective: usize,
    chain: &[Vec<f64>],
    pool: &DesignPool,
) -> Result<EpsilonChainReport, ScalarizationError> {
    for w in chain.windows(2) {
        if w[1].len() != w[0].len() || w[1].iter().zip(&w[0]).any(|(a, b)| a > b) {
            return Err(ScalarizationError::InvalidSpec(
                "epsilon chain must be componentwise nonincreasing".into(),
            ));
        }
    }
    let mut values = Vec::with_capacity(chain.len());
    let mut feasible_sets: Vec<Vec<usize>> = Vec::with_capacity(chain.len());
    for eps in chain {
        let spec = ScalarizationSpec::EpsilonConstraint {
            objective,
            eps: eps.clone(),
        };
        let feasible: Vec<usize> = pool
            .designs()
            .iter()
            .filter(|d| scalarize(&spec, d.objectives.values()).value().is_some())
            .map(|d| d.id)
            .collect();
        feasible_sets.push(feasible);
        values.push(match argmin_over_pool(&spec, pool) {
            Ok(set) => Some(set.optimal_value),
            Err(ScalarizationError::InfeasibleProblem(_)) => None,
            Err(e) => return Err(e),
        });
    }
    let as_inf = |v: Option<f64>| v.unwrap_or(f64::INFINITY);
    let monotone = values.windows(2).all(|w| as_inf(w[0]) <= as_inf(w[1]));
    let nested = feasible_sets
        .windows(2)
        .all(|w| w[1].iter().all(|id| w[0].contains(id)));
    Ok(EpsilonChainReport {
        values,
        monotone,
        nested,
    })
}
