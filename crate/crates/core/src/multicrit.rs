//! Pareto dominance and nondominated filtering over finite design pools.

use std::cmp::Ordering;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::objectives::ObjectiveVector;

/// Objective differences up to this size count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MulticritError {
    #[error("objective vectors have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("design pool is empty")]
    EmptyPool,
    #[error("designs {0} and {1} have identical coefficients")]
    DuplicateDesign(usize, usize),
}

/// `a` dominates `b` (minimization): `a_i <= b_i` for all `i` and
/// `a_i < b_i - TIE_TOLERANCE` for some `i`.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool, MulticritError> {
    if a.len() != b.len() {
        return Err(MulticritError::LengthMismatch(a.len(), b.len()));
    }
    Ok(dominates_unchecked(a, b))
}

fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strict |= *x < y - TIE_TOLERANCE;
    }
    strict
}

/// Mesh size and solver tolerances an objective vector was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub mesh_h: f64,
    pub flow_tol: f64,
    pub elasticity_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedDesign {
    pub id: usize,
    pub coefficients: Vec<f64>,
    pub objectives: ObjectiveVector,
    pub provenance: Provenance,
}

/// Finite set of evaluated designs, kept in insertion order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DesignPool {
    designs: Vec<EvaluatedDesign>,
}

impl DesignPool {
    /// Rejects mismatched objective lengths and repeated coefficient vectors.
    pub fn new(designs: Vec<EvaluatedDesign>) -> Result<Self, MulticritError> {
        if let Some(first) = designs.first() {
            for d in &designs {
                if d.objectives.len() != first.objectives.len() {
                    return Err(MulticritError::LengthMismatch(
                        first.objectives.len(),
                        d.objectives.len(),
                    ));
                }
            }
        }
        let mut order: Vec<usize> = (0..designs.len()).collect();
        order.sort_by(|&a, &b| lex_cmp(&designs[a].coefficients, &designs[b].coefficients));
        for w in order.windows(2) {
            if designs[w[0]].coefficients == designs[w[1]].coefficients {
                let (a, b) = (designs[w[0]].id, designs[w[1]].id);
                return Err(MulticritError::DuplicateDesign(a.min(b), a.max(b)));
            }
        }
        Ok(Self { designs })
    }

    /// Pool of bare objective vectors; design `i` gets id `i` and the
    /// coefficient vector `[i]`.
    pub fn from_objectives(vectors: Vec<Vec<f64>>) -> Result<Self, MulticritError> {
        let designs = vectors
            .into_iter()
            .enumerate()
            .map(|(i, v)| EvaluatedDesign {
                id: i,
                coefficients: vec![i as f64],
                objectives: ObjectiveVector::from_values(v).expect("finite objective values"),
                provenance: Provenance::default(),
            })
            .collect();
        Self::new(designs)
    }

    pub fn designs(&self) -> &[EvaluatedDesign] {
        &self.designs
    }

    pub fn len(&self) -> usize {
        self.designs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.designs.is_empty()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.designs.iter().map(|d| d.id).collect()
    }

    pub fn get(&self, id: usize) -> Option<&EvaluatedDesign> {
        self.designs.iter().find(|d| d.id == id)
    }

    /// Subpool of the designs accepted by `keep`, in pool order.
    pub fn filtered(&self, mut keep: impl FnMut(&EvaluatedDesign) -> bool) -> DesignPool {
        DesignPool {
            designs: self.designs.iter().filter(|d| keep(d)).cloned().collect(),
        }
    }

    /// CSV with columns `shape_id,<labels>,is_nondominated`.
    pub fn write_front_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let front: Vec<bool> = nondominated_mask(self);
        let labels = self
            .designs
            .first()
            .map(|d| d.objectives.labels().join(","))
            .unwrap_or_default();
        writeln!(out, "shape_id,{labels},is_nondominated")?;
        for (d, nd) in self.designs.iter().zip(front) {
            let values: Vec<String> = d
                .objectives
                .values()
                .iter()
                .map(|v| v.to_string())
                .collect();
            writeln!(out, "{},{},{}", d.id, values.join(","), nd)?;
        }
        Ok(())
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// `mask[i]` is true when design `i` is dominated by no pool member.
///
/// Designs are swept in lexicographic objective order: a dominator is never
/// later in that order, and a dominated dominator is itself dominated by a
/// front member, so each design is only checked against the front so far.
pub fn nondominated_mask(pool: &DesignPool) -> Vec<bool> {
    let d = &pool.designs;
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| {
        lex_cmp(d[a].objectives.values(), d[b].objectives.values()).then(a.cmp(&b))
    });
    let mut mask = vec![false; d.len()];
    let mut front: Vec<usize> = Vec::new();
    for i in order {
        let v = d[i].objectives.values();
        if !front
            .iter()
            .any(|&f| dominates_unchecked(d[f].objectives.values(), v))
        {
            front.push(i);
            mask[i] = true;
        }
    }
    mask
}

/// The designs dominated by no pool member, in pool order.
pub fn nondominated_set(pool: &DesignPool) -> Result<DesignPool, MulticritError> {
    if pool.is_empty() {
        return Err(MulticritError::EmptyPool);
    }
    let mask = nondominated_mask(pool);
    Ok(DesignPool {
        designs: pool
            .designs
            .iter()
            .zip(mask)
            .filter(|(_, m)| *m)
            .map(|(d, _)| d.clone())
            .collect(),
    })
}

/// Every dominated design is dominated by some member of the front.
pub fn front_maximality_check(pool: &DesignPool) -> bool {
    let Ok(front) = nondominated_set(pool) else {
        return false;
    };
    let mask = nondominated_mask(pool);
    pool.designs.iter().zip(mask).all(|(d, on_front)| {
        on_front
            || front
                .designs
                .iter()
                .any(|f| dominates_unchecked(f.objectives.values(), d.objectives.values()))
    })
}
