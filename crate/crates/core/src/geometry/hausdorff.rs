//! Hausdorff distance between finite point sets.
//!
//! `d_H(A, B) = max(sup_a inf_b |a - b|, sup_b inf_a |a - b|)`. Works for
//! planar outlines and for coefficient vectors alike.

use super::GeometryError;
use crate::Vec2;

/// A point in some metric space.
pub trait MetricPoint {
    fn distance(&self, other: &Self) -> f64;
}

impl MetricPoint for Vec2 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl MetricPoint for Vec<f64> {
    fn distance(&self, other: &Self) -> f64 {
        euclidean(self, other)
    }
}

impl<const N: usize> MetricPoint for [f64; N] {
    fn distance(&self, other: &Self) -> f64 {
        euclidean(self, other)
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// One-sided deviation `sup_{a in A} inf_{b in B} d(a, b)`; zero whenever
/// `A` is a subset of `B`.
pub fn directed_hausdorff<P: MetricPoint>(a: &[P], b: &[P]) -> Result<f64, GeometryError> {
    if a.is_empty() || b.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let mut worst = 0.0_f64;
    for p in a {
        let mut nearest = f64::INFINITY;
        for q in b {
            let d = p.distance(q);
            if d < nearest {
                nearest = d;
                // cannot raise the running maximum any more
                if nearest <= worst {
                    break;
                }
            }
        }
        worst = worst.max(nearest);
    }
    Ok(worst)
}

pub fn hausdorff_distance<P: MetricPoint>(a: &[P], b: &[P]) -> Result<f64, GeometryError> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}
