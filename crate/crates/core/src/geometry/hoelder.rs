//! Discrete Hölder norm of a function sampled on a uniform grid.
//!
//! `||f||_{k,alpha} = max_{|g| <= k} sup|D^g f| + max_{|g| = k} [D^g f]_alpha`
//! with derivatives taken by second-order finite differences and the
//! seminorm `sup |f(x) - f(y)| / |x - y|^alpha` taken over sampled pairs.

use super::GeometryError;

/// Above this many points a 1D seminorm is computed on a strided subsample.
const MAX_PAIR_POINTS_1D: usize = 20_000;
/// Target size of the subsample used for far pairs on 2D grids.
const PAIR_POINTS_2D: usize = 1024;

/// Scalar samples on a uniform 1D or 2D grid.
#[derive(Debug, Clone, PartialEq)]
pub enum SampledGrid {
    OneD {
        spacing: f64,
        values: Vec<f64>,
    },
    /// Row-major, `values[j * nx + i]` is the sample at `(i * hx, j * hy)`.
    TwoD {
        nx: usize,
        ny: usize,
        hx: f64,
        hy: f64,
        values: Vec<f64>,
    },
}

impl SampledGrid {
    pub fn one_d(spacing: f64, values: Vec<f64>) -> Self {
        SampledGrid::OneD { spacing, values }
    }

    pub fn two_d(nx: usize, ny: usize, hx: f64, hy: f64, values: Vec<f64>) -> Self {
        assert_eq!(
            nx * ny,
            values.len(),
            "grid size does not match sample count"
        );
        SampledGrid::TwoD {
            nx,
            ny,
            hx,
            hy,
            values,
        }
    }

    /// Samples `f` on `n` equispaced points of `[a, b]`.
    pub fn sample_1d(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let h = (b - a) / (n as f64 - 1.0);
        SampledGrid::one_d(h, (0..n).map(|i| f(a + h * i as f64)).collect())
    }

    fn min_axis_len(&self) -> usize {
        match self {
            SampledGrid::OneD { values, .. } => values.len(),
            SampledGrid::TwoD { nx, ny, .. } => (*nx).min(*ny),
        }
    }
}

/// Second-order finite-difference derivative of a uniformly sampled line.
fn differentiate(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            let d = (values[1] - values[0]) / h;
            out.fill(d);
        }
        return out;
    }
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    out
}

fn differentiate_2d(values: &[f64], nx: usize, ny: usize, h: f64, along_x: bool) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    if along_x {
        for j in 0..ny {
            let row = &values[j * nx..(j + 1) * nx];
            out[j * nx..(j + 1) * nx].copy_from_slice(&differentiate(row, h));
        }
    } else {
        let mut col = vec![0.0; ny];
        for i in 0..nx {
            for j in 0..ny {
                col[j] = values[j * nx + i];
            }
            for (j, d) in differentiate(&col, h).into_iter().enumerate() {
                out[j * nx + i] = d;
            }
        }
    }
    out
}

fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[inline]
fn quotient(df: f64, dist: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        df / dist
    } else {
        df / dist.powf(alpha)
    }
}

fn seminorm_1d(values: &[f64], h: f64, alpha: f64) -> f64 {
    let stride = values.len().div_ceil(MAX_PAIR_POINTS_1D).max(1);
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .step_by(stride)
        .map(|(i, &v)| (h * i as f64, v))
        .collect();
    let mut best = 0.0_f64;
    for (a, &(xa, fa)) in pts.iter().enumerate() {
        for &(xb, fb) in &pts[a + 1..] {
            best = best.max(quotient((fa - fb).abs(), xb - xa, alpha));
        }
    }
    best
}

fn seminorm_2d(values: &[f64], nx: usize, ny: usize, hx: f64, hy: f64, alpha: f64) -> f64 {
    let mut best = 0.0_f64;
    // neighbouring pairs at full resolution
    for j in 0..ny {
        for i in 0..nx {
            let f = values[j * nx + i];
            for (di, dj) in [(1_usize, 0_usize), (0, 1), (1, 1)] {
                let (i2, j2) = (i + di, j + dj);
                if i2 < nx && j2 < ny {
                    let dist = ((di as f64 * hx).powi(2) + (dj as f64 * hy).powi(2)).sqrt();
                    best = best.max(quotient((f - values[j2 * nx + i2]).abs(), dist, alpha));
                }
            }
            if i >= 1 && j + 1 < ny {
                let dist = (hx * hx + hy * hy).sqrt();
                let g = values[(j + 1) * nx + i - 1];
                best = best.max(quotient((f - g).abs(), dist, alpha));
            }
        }
    }
    // far pairs on a strided subsample
    let stride = ((nx * ny) as f64 / PAIR_POINTS_2D as f64)
        .sqrt()
        .ceil()
        .max(1.0) as usize;
    let pts: Vec<(f64, f64, f64)> = (0..ny)
        .step_by(stride)
        .flat_map(|j| (0..nx).step_by(stride).map(move |i| (i, j)))
        .map(|(i, j)| (hx * i as f64, hy * j as f64, values[j * nx + i]))
        .collect();
    for (a, &(xa, ya, fa)) in pts.iter().enumerate() {
        for &(xb, yb, fb) in &pts[a + 1..] {
            let dist = ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt();
            best = best.max(quotient((fa - fb).abs(), dist, alpha));
        }
    }
    best
}

pub fn hoelder_norm_estimate(
    field: &SampledGrid,
    k: u32,
    alpha: f64,
) -> Result<f64, GeometryError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(GeometryError::InvalidConfig(format!(
            "Hölder exponent must lie in (0, 1], got {alpha}"
        )));
    }
    let required = k as usize + 2;
    if field.min_axis_len() < required {
        return Err(GeometryError::GridTooCoarse {
            samples: field.min_axis_len(),
            required,
        });
    }
    match field {
        SampledGrid::OneD { spacing, values } => {
            let mut sup = sup_norm(values);
            let mut current = values.clone();
            for _ in 0..k {
                current = differentiate(&current, *spacing);
                sup = sup.max(sup_norm(&current));
            }
            Ok(sup + seminorm_1d(&current, *spacing, alpha))
        }
        SampledGrid::TwoD {
            nx,
            ny,
            hx,
            hy,
            values,
        } => {
            let (nx, ny, hx, hy) = (*nx, *ny, *hx, *hy);
            // derivatives[a] holds d^a/dx^a d^(order-a)/dy^(order-a) for the current order
            let mut sup = sup_norm(values);
            let mut layer = vec![values.clone()];
            for _ in 0..k {
                let mut next = Vec::with_capacity(layer.len() + 1);
                for (idx, f) in layer.iter().enumerate() {
                    if idx == 0 {
                        next.push(differentiate_2d(f, nx, ny, hy, false));
                    }
                    next.push(differentiate_2d(f, nx, ny, hx, true));
                }
                layer = next;
                for f in &layer {
                    sup = sup.max(sup_norm(f));
                }
            }
            let semi = layer
                .iter()
                .map(|f| seminorm_2d(f, nx, ny, hx, hy, alpha))
                .fold(0.0, f64::max);
            Ok(sup + semi)
        }
    }
}
