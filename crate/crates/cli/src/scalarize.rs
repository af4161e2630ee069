use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use anyhow::Result;

use pareto_shape_core::config::SearchMode;
use pareto_shape_core::geometry::directed_hausdorff;
use pareto_shape_core::multicrit::{nondominated_mask, DesignPool};
use pareto_shape_core::pipeline::{design_pool, Evaluator};
use pareto_shape_core::scalarization::{
    argmin_over_pool, pattern_search, ScalarizationError, ScalarizationSpec, SearchConfig,
    ShapeCloud,
};

use crate::{evaluate_pool, evaluator, Run};

/// Boundary samples per shape for the Hausdorff deviation.
const OUTLINE_SAMPLES: usize = 256;

#[derive(Debug, Clone)]
struct Member {
    id: usize,
    coefficients: Vec<f64>,
    objectives: Vec<f64>,
    nondominated: bool,
}

#[derive(Debug, Clone)]
struct Argmin {
    tau: f64,
    members: Vec<Member>,
}

fn members_of(pool: &DesignPool, ids: &[usize]) -> Vec<Member> {
    let mask = nondominated_mask(pool);
    let index: HashMap<usize, usize> = pool
        .designs()
        .iter()
        .enumerate()
        .map(|(k, d)| (d.id, k))
        .collect();
    ids.iter()
        .map(|id| {
            let k = index[id];
            let d = &pool.designs()[k];
            Member {
                id: *id,
                coefficients: d.coefficients.clone(),
                objectives: d.objectives.values().to_vec(),
                nondominated: mask[k],
            }
        })
        .collect()
}

/// `None` when the scalarized problem has no feasible design.
fn from_pool(spec: &ScalarizationSpec, pool: &DesignPool) -> Result<Option<Argmin>> {
    match argmin_over_pool(spec, pool) {
        Ok(set) => Ok(Some(Argmin {
            tau: set.optimal_value,
            members: members_of(pool, &set.members),
        })),
        Err(ScalarizationError::InfeasibleProblem(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn from_search(
    spec: &ScalarizationSpec,
    config: &SearchConfig,
    ev: &Evaluator,
    workers: usize,
) -> Result<Option<Argmin>> {
    let outcome = pattern_search(spec, config, |batch: &[Vec<f64>]| {
        let designs: Vec<(usize, Vec<f64>)> = batch.iter().cloned().enumerate().collect();
        match ev.evaluate_all(&designs, workers) {
            Ok(results) => results
                .into_iter()
                .map(|r| r.map(|rep| rep.values.vector()).map_err(|e| e.to_string()))
                .collect(),
            Err(e) => batch.iter().map(|_| Err(e.to_string())).collect(),
        }
    });
    let outcome = match outcome {
        Ok(o) => o,
        Err(ScalarizationError::InfeasibleProblem(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    // nondominance is judged among the successfully evaluated points
    let evaluated: Vec<(usize, Vec<f64>, Vec<f64>)> = outcome
        .points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            p.objectives
                .as_ref()
                .map(|j| (i, p.coefficients.clone(), j.values().to_vec()))
        })
        .collect();
    let pool = DesignPool::new(
        evaluated
            .iter()
            .map(|(i, c, j)| pareto_shape_core::multicrit::EvaluatedDesign {
                id: *i,
                coefficients: c.clone(),
                objectives: pareto_shape_core::objectives::ObjectiveVector::new(
                    j.clone(),
                    vec!["J_E".into(), "J_R".into()],
                )
                .expect("finite objectives"),
                provenance: ev.provenance(),
            })
            .collect(),
    )?;
    Ok(Some(Argmin {
        tau: outcome.argmin.optimal_value,
        members: members_of(&pool, &outcome.argmin.members),
    }))
}

pub(crate) fn cmd_scalarize(run: &mut Run) -> Result<()> {
    let ev = evaluator(run)?;
    let sc = run.config.scalarization.clone();
    let thetas = sc.theta_list();
    let star = sc.theta_star();

    let pool = match sc.mode {
        SearchMode::Pool => Some(design_pool(&evaluate_pool(run, &ev)?, ev.provenance())?),
        SearchMode::Search => None,
    };
    let b = run.config.pool.bound;
    let n = run.config.geometry.n_modes;
    let search = SearchConfig {
        lower: vec![-b; n],
        upper: vec![b; n],
        starts: sc.starts,
        max_evaluations: sc.max_evaluations,
        min_step: sc.min_step,
        candidates: None,
    };
    let solve = |theta: &[f64]| -> Result<Option<Argmin>> {
        let spec = sc.spec(theta);
        match &pool {
            Some(p) => from_pool(&spec, p),
            None => from_search(&spec, &search, &ev, run.workers),
        }
    };

    let mut results = Vec::with_capacity(thetas.len());
    for theta in &thetas {
        results.push(solve(theta)?);
    }
    let reference = match thetas.iter().position(|t| *t == star) {
        Some(k) => results[k].clone(),
        None => solve(&star)?,
    };

    let mut outlines: HashMap<Vec<u64>, ShapeCloud> = HashMap::new();
    let mut clouds = |members: &[Member]| -> Result<Vec<ShapeCloud>> {
        members
            .iter()
            .map(|m| {
                let key: Vec<u64> = m.coefficients.iter().map(|v| v.to_bits()).collect();
                if let Some(c) = outlines.get(&key) {
                    return Ok(c.clone());
                }
                let c = ShapeCloud(Arc::new(ev.outline(&m.coefficients, OUTLINE_SAMPLES)?));
                outlines.insert(key, c.clone());
                Ok(c)
            })
            .collect()
    };
    let reference_clouds = match &reference {
        Some(r) => Some((
            clouds(&r.members)?,
            r.members
                .iter()
                .map(|m| m.coefficients.clone())
                .collect::<Vec<_>>(),
        )),
        None => {
            run.notes.push(format!(
                "reference theta* {star:?} has no feasible design; deviations left empty"
            ));
            None
        }
    };

    let mut rows: Vec<String> = Vec::with_capacity(thetas.len());
    let mut argmin_rows: Vec<String> = Vec::new();
    let mut best_so_far = f64::NEG_INFINITY;
    let mut monotone = true;
    let fmt_list = |v: &[f64]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    for (k, (theta, res)) in thetas.iter().zip(&results).enumerate() {
        let tau = res.as_ref().map_or(f64::INFINITY, |r| r.tau);
        monotone &= tau >= best_so_far;
        best_so_far = best_so_far.max(tau);
        let row = match res {
            Some(r) => {
                let (d, dc) = match &reference_clouds {
                    Some((ref_shapes, ref_coeffs)) => {
                        let shapes = clouds(&r.members)?;
                        let coeffs: Vec<Vec<f64>> =
                            r.members.iter().map(|m| m.coefficients.clone()).collect();
                        (
                            directed_hausdorff(&shapes, ref_shapes)?.to_string(),
                            directed_hausdorff(&coeffs, ref_coeffs)?.to_string(),
                        )
                    }
                    None => (String::new(), String::new()),
                };
                for m in &r.members {
                    argmin_rows.push(format!(
                        "{k},{},{},{}",
                        m.id,
                        fmt_list(&m.coefficients),
                        fmt_list(&m.objectives)
                    ));
                }
                let ids: Vec<String> = r.members.iter().map(|m| m.id.to_string()).collect();
                format!(
                    "{},{},{},{},{},{},{},{},feasible",
                    fmt_list(theta),
                    r.tau,
                    r.members.len(),
                    d,
                    dc,
                    ids.join(";"),
                    r.members.iter().all(|m| m.nondominated),
                    monotone
                )
            }
            None => {
                run.notes
                    .push(format!("theta {theta:?}: no feasible design"));
                format!("{},,0,,,,,{},infeasible", fmt_list(theta), monotone)
            }
        };
        rows.push(row);
    }

    let l = thetas.first().map_or(0, |t| t.len());
    let theta_cols: Vec<String> = (1..=l).map(|i| format!("theta_{i}")).collect();
    let header = format!(
        "{},tau,argmin_size,d_H,d_coeff,argmin_ids,argmin_nondominated,tau_monotone,status",
        theta_cols.join(",")
    );
    run.csv("sweep.csv", |w: &mut dyn Write| {
        writeln!(w, "{header}")?;
        rows.iter().try_for_each(|r| writeln!(w, "{r}"))
    })?;
    let coeff_cols: Vec<String> = (1..=n).map(|i| format!("c_{i}")).collect();
    run.csv("sweep_argmin.csv", |w: &mut dyn Write| {
        writeln!(w, "theta_index,shape_id,{},J_E,J_R", coeff_cols.join(","))?;
        argmin_rows.iter().try_for_each(|r| writeln!(w, "{r}"))
    })?;
    Ok(())
}
