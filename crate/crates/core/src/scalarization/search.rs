//! Deterministic multi-start compass search over the coefficient box.

use std::collections::HashMap;
use std::fmt::Display;

use serde::{Deserialize, Serialize};

use super::{argmin_tolerance, scalarize, ArgminSet, ScalarizationError, ScalarizationSpec};
use crate::objectives::ObjectiveVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Number of lattice starts: the box center, then the corners of the
    /// half-size box in binary order.
    pub starts: usize,
    pub max_evaluations: usize,
    /// Stop once every poll step is below this fraction of the box width.
    pub min_step: f64,
    /// Pool mode: evaluate exactly these points instead of searching.
    pub candidates: Option<Vec<Vec<f64>>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            lower: Vec::new(),
            upper: Vec::new(),
            starts: 3,
            max_evaluations: 400,
            min_step: 1.0 / 64.0,
            candidates: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), ScalarizationError> {
        let bad = |m: &str| Err(ScalarizationError::InvalidSpec(m.to_string()));
        if self.candidates.is_some() {
            return Ok(());
        }
        if self.lower.len() != self.upper.len() || self.lower.is_empty() {
            return bad("search box bounds must be nonempty and of equal length");
        }
        if self
            .lower
            .iter()
            .zip(&self.upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u))
        {
            return bad("search box needs finite bounds with lower <= upper");
        }
        if self.starts == 0 || self.max_evaluations == 0 {
            return bad("search needs at least one start and one evaluation");
        }
        if !(self.min_step > 0.0 && self.min_step < 1.0) {
            return bad("min_step must lie in (0, 1)");
        }
        Ok(())
    }

    /// Starting points, deterministic in the box alone.
    pub fn start_lattice(&self) -> Vec<Vec<f64>> {
        let n = self.lower.len();
        let center: Vec<f64> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect();
        let mut out = vec![center.clone()];
        let corners = if n < usize::BITS as usize {
            1usize << n
        } else {
            usize::MAX
        };
        for mask in 0..corners {
            if out.len() >= self.starts {
                break;
            }
            out.push(
                (0..n)
                    .map(|i| {
                        let quarter = 0.25 * (self.upper[i] - self.lower[i]);
                        if mask >> i & 1 == 1 {
                            center[i] + quarter
                        } else {
                            center[i] - quarter
                        }
                    })
                    .collect(),
            );
        }
        out.truncate(self.starts);
        out
    }
}

/// One evaluated point of a search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchPoint {
    pub coefficients: Vec<f64>,
    /// `None` when the evaluation failed; the message is kept.
    pub objectives: Option<ObjectiveVector>,
    pub error: Option<String>,
}

/// Every evaluated point, in evaluation order, and the argmin over them.
/// Argmin member ids index into `points`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub points: Vec<SearchPoint>,
    pub argmin: ArgminSet,
}

impl SearchOutcome {
    pub fn argmin_coefficients(&self) -> Vec<&[f64]> {
        self.argmin
            .members
            .iter()
            .map(|&i| self.points[i].coefficients.as_slice())
            .collect()
    }
}

struct Evaluations<'a, E, F> {
    spec: &'a ScalarizationSpec,
    evaluate: F,
    cache: HashMap<Vec<u64>, f64>,
    points: Vec<SearchPoint>,
    _err: std::marker::PhantomData<E>,
}

impl<E: Display, F: FnMut(&[Vec<f64>]) -> Vec<Result<ObjectiveVector, E>>> Evaluations<'_, E, F> {
    fn key(x: &[f64]) -> Vec<u64> {
        // +0.0 and -0.0 are the same design
        x.iter().map(|v| (v + 0.0).to_bits()).collect()
    }

    /// Scalarized values of a batch; failures and infeasible points map to
    /// `+inf`.
    fn values(&mut self, batch: &[Vec<f64>]) -> Vec<f64> {
        let mut fresh: Vec<Vec<f64>> = Vec::new();
        for x in batch {
            let k = Self::key(x);
            if !self.cache.contains_key(&k) && !fresh.iter().any(|y| Self::key(y) == k) {
                fresh.push(x.clone());
            }
        }
        if !fresh.is_empty() {
            let results = (self.evaluate)(&fresh);
            for (x, r) in fresh.into_iter().zip(results) {
                let (value, point) = match r {
                    Ok(j) => (
                        scalarize(self.spec, j.values())
                            .value()
                            .unwrap_or(f64::INFINITY),
                        SearchPoint {
                            coefficients: x.clone(),
                            objectives: Some(j),
                            error: None,
                        },
                    ),
                    Err(e) => (
                        f64::INFINITY,
                        SearchPoint {
                            coefficients: x.clone(),
                            objectives: None,
                            error: Some(e.to_string()),
                        },
                    ),
                };
                self.cache.insert(Self::key(&x), value);
                self.points.push(point);
            }
        }
        batch.iter().map(|x| self.cache[&Self::key(x)]).collect()
    }
}

/// Minimizes `S_theta(J(c))` over the coefficient box. `evaluate` receives
/// batches of coefficient vectors (so it may run them concurrently) and must
/// return results in the same order. In pool mode the candidates are
/// evaluated once and the result is the exact argmin over them.
pub fn pattern_search<E, F>(
    spec: &ScalarizationSpec,
    config: &SearchConfig,
    evaluate: F,
) -> Result<SearchOutcome, ScalarizationError>
where
    E: Display,
    F: FnMut(&[Vec<f64>]) -> Vec<Result<ObjectiveVector, E>>,
{
    config.validate()?;
    let mut ev = Evaluations {
        spec,
        evaluate,
        cache: HashMap::new(),
        points: Vec::new(),
        _err: std::marker::PhantomData,
    };
    if let Some(candidates) = &config.candidates {
        if candidates.is_empty() {
            return Err(ScalarizationError::EmptyPool);
        }
        ev.values(candidates);
    } else {
        let n = config.lower.len();
        let width: Vec<f64> = config
            .lower
            .iter()
            .zip(&config.upper)
            .map(|(l, u)| u - l)
            .collect();
        let starts = config.start_lattice();
        ev.values(&starts);
        'starts: for start in starts {
            let mut x = start;
            let mut fx = ev.values(std::slice::from_ref(&x))[0];
            let mut frac = 0.25;
            while frac >= config.min_step {
                if ev.points.len() >= config.max_evaluations {
                    break 'starts;
                }
                let mut poll = Vec::with_capacity(2 * n);
                for i in 0..n {
                    for sign in [1.0, -1.0] {
                        let mut y = x.clone();
                        y[i] =
                            (y[i] + sign * frac * width[i]).clamp(config.lower[i], config.upper[i]);
                        if y != x {
                            poll.push(y);
                        }
                    }
                }
                let values = ev.values(&poll);
                let best = values
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)));
                match best {
                    Some((k, &v)) if v < fx - argmin_tolerance(fx) => {
                        x = poll[k].clone();
                        fx = v;
                    }
                    _ => frac *= 0.5,
                }
            }
        }
    }
    let spec_text = spec.to_string();
    let values: Vec<(usize, f64)> = ev
        .points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            p.objectives
                .as_ref()
                .and_then(|j| scalarize(spec, j.values()).value())
                .map(|v| (i, v))
        })
        .collect();
    let tau = values
        .iter()
        .map(|&(_, v)| v)
        .min_by(f64::total_cmp)
        .ok_or(ScalarizationError::InfeasibleProblem(spec_text))?;
    let tolerance = argmin_tolerance(tau);
    let members = values
        .iter()
        .filter(|&&(_, v)| v <= tau + tolerance)
        .map(|&(i, _)| i)
        .collect();
    Ok(SearchOutcome {
        points: ev.points,
        argmin: ArgminSet {
            members,
            optimal_value: tau,
            tolerance,
        },
    })
}
