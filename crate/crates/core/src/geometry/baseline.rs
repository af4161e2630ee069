use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};

use super::GeometryError;
use crate::Vec2;

/// Baseline component outline in polar form `r = R(theta)` about a star
/// center. Every admissible baseline is star-shaped with respect to that
/// center, which is what the radial blend of the deformation relies on.
#[derive(Debug, Clone, PartialEq)]
pub enum Baseline {
    Circle {
        center: Vec2,
        radius: f64,
    },
    Ellipse {
        center: Vec2,
        semi_x: f64,
        semi_y: f64,
    },
    ControlPoints {
        center: Vec2,
        spline: PeriodicSpline,
    },
}

impl Baseline {
    pub fn circle(center: Vec2, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidConfig(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        Ok(Baseline::Circle { center, radius })
    }

    pub fn ellipse(center: Vec2, semi_x: f64, semi_y: f64) -> Result<Self, GeometryError> {
        if !(semi_x > 0.0 && semi_y > 0.0 && semi_x.is_finite() && semi_y.is_finite()) {
            return Err(GeometryError::InvalidConfig(format!(
                "ellipse semi-axes must be positive, got ({semi_x}, {semi_y})"
            )));
        }
        Ok(Baseline::Ellipse {
            center,
            semi_x,
            semi_y,
        })
    }

    /// Closed outline through `points`, listed counter-clockwise, interpolated
    /// by a periodic cubic spline in polar coordinates about `center` (the
    /// vertex mean when `None`).
    pub fn control_points(points: &[Vec2], center: Option<Vec2>) -> Result<Self, GeometryError> {
        if points.len() < 4 {
            return Err(GeometryError::InvalidConfig(format!(
                "control-point baseline needs at least 4 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(GeometryError::InvalidConfig(
                "control points must be finite".into(),
            ));
        }
        let center = center.unwrap_or_else(|| {
            points.iter().fold(Vec2::zeros(), |acc, p| acc + p) / points.len() as f64
        });
        let mut angles = Vec::with_capacity(points.len());
        let mut radii = Vec::with_capacity(points.len());
        for p in points {
            let d = p - center;
            let r = d.norm();
            if r <= 0.0 {
                return Err(GeometryError::InvalidConfig(
                    "control point coincides with the star center".into(),
                ));
            }
            angles.push(d.y.atan2(d.x));
            radii.push(r);
        }
        // unwrap into a strictly increasing sequence spanning one turn
        let mut unwrapped = vec![angles[0]];
        for i in 1..angles.len() {
            let step = (angles[i] - angles[i - 1]).rem_euclid(TAU);
            if step <= 1e-12 {
                return Err(GeometryError::NotStarShaped);
            }
            unwrapped.push(unwrapped[i - 1] + step);
        }
        let closing = (angles[0] - angles[angles.len() - 1]).rem_euclid(TAU);
        let total = unwrapped[unwrapped.len() - 1] - unwrapped[0] + closing;
        if closing <= 1e-12 || (total - TAU).abs() > 1e-9 {
            return Err(GeometryError::NotStarShaped);
        }
        let spline = PeriodicSpline::new(unwrapped, radii)?;
        let baseline = Baseline::ControlPoints { center, spline };
        let min_r = (0..2048)
            .map(|i| baseline.radius(TAU * i as f64 / 2048.0))
            .fold(f64::INFINITY, f64::min);
        if min_r <= 0.0 {
            return Err(GeometryError::NotStarShaped);
        }
        Ok(baseline)
    }

    pub fn center(&self) -> Vec2 {
        match self {
            Baseline::Circle { center, .. }
            | Baseline::Ellipse { center, .. }
            | Baseline::ControlPoints { center, .. } => *center,
        }
    }

    pub fn radius(&self, theta: f64) -> f64 {
        match self {
            Baseline::Circle { radius, .. } => *radius,
            Baseline::Ellipse { semi_x, semi_y, .. } => {
                let (s, c) = theta.sin_cos();
                let q = (semi_y * c).powi(2) + (semi_x * s).powi(2);
                semi_x * semi_y / q.sqrt()
            }
            Baseline::ControlPoints { spline, .. } => spline.value(theta),
        }
    }

    pub fn radius_derivative(&self, theta: f64) -> f64 {
        match self {
            Baseline::Circle { .. } => 0.0,
            Baseline::Ellipse { semi_x, semi_y, .. } => {
                let (s, c) = theta.sin_cos();
                let q = (semi_y * c).powi(2) + (semi_x * s).powi(2);
                -semi_x * semi_y * (semi_x * semi_x - semi_y * semi_y) * s * c / q.powf(1.5)
            }
            Baseline::ControlPoints { spline, .. } => spline.derivative(theta),
        }
    }

    pub fn point(&self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        self.center() + self.radius(theta) * Vec2::new(c, s)
    }

    /// Length scale used to give the dimensionless deformation coefficients
    /// a length unit.
    pub fn reference_radius(&self) -> f64 {
        match self {
            Baseline::Circle { radius, .. } => *radius,
            Baseline::Ellipse { semi_x, semi_y, .. } => (semi_x * semi_y).sqrt(),
            Baseline::ControlPoints { spline, .. } => {
                spline.values.iter().sum::<f64>() / spline.values.len() as f64
            }
        }
    }
}

/// Periodic (period 2*pi) cubic interpolating spline.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl PeriodicSpline {
    /// `knots` strictly increasing and spanning less than one period.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self, GeometryError> {
        let n = knots.len();
        if n < 3 || values.len() != n {
            return Err(GeometryError::InvalidConfig(
                "periodic spline needs at least 3 knots".into(),
            ));
        }
        let step = |i: usize| {
            if i + 1 < n {
                knots[i + 1] - knots[i]
            } else {
                knots[0] + TAU - knots[n - 1]
            }
        };
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DVector::<f64>::zeros(n);
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            let h_prev = step(prev);
            let h = step(i);
            a[(i, prev)] += h_prev;
            a[(i, i)] += 2.0 * (h_prev + h);
            a[(i, next)] += h;
            rhs[i] = 6.0 * ((values[next] - values[i]) / h - (values[i] - values[prev]) / h_prev);
        }
        let second = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| GeometryError::InvalidConfig("degenerate spline knots".into()))?;
        Ok(Self {
            knots,
            values,
            second: second.iter().copied().collect(),
        })
    }

    fn locate(&self, theta: f64) -> (usize, f64, f64) {
        let n = self.knots.len();
        let t0 = self.knots[0];
        let t = t0 + (theta - t0).rem_euclid(TAU);
        let i = match self.knots.partition_point(|&k| k <= t) {
            0 => n - 1,
            p => p - 1,
        };
        let right = if i + 1 < n {
            self.knots[i + 1]
        } else {
            t0 + TAU
        };
        (i, t, right)
    }

    pub fn value(&self, theta: f64) -> f64 {
        let n = self.knots.len();
        let (i, t, right) = self.locate(theta);
        let j = (i + 1) % n;
        let left = self.knots[i];
        let h = right - left;
        let (a, b) = (right - t, t - left);
        self.second[i] * a.powi(3) / (6.0 * h)
            + self.second[j] * b.powi(3) / (6.0 * h)
            + (self.values[i] / h - self.second[i] * h / 6.0) * a
            + (self.values[j] / h - self.second[j] * h / 6.0) * b
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        let n = self.knots.len();
        let (i, t, right) = self.locate(theta);
        let j = (i + 1) % n;
        let left = self.knots[i];
        let h = right - left;
        let (a, b) = (right - t, t - left);
        -self.second[i] * a * a / (2.0 * h) + self.second[j] * b * b / (2.0 * h)
            - (self.values[i] / h - self.second[i] * h / 6.0)
            + (self.values[j] / h - self.second[j] * h / 6.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_through_circle_points_is_constant() {
        let pts: Vec<Vec2> = (0..12)
            .map(|i| {
                let t = TAU * i as f64 / 12.0;
                Vec2::new(2.0 + 0.5 * t.cos(), 1.0 + 0.5 * t.sin())
            })
            .collect();
        let b = Baseline::control_points(&pts, None).unwrap();
        for i in 0..100 {
            let t = 0.0731 * i as f64;
            assert!((b.radius(t) - 0.5).abs() < 1e-12);
            assert!(b.radius_derivative(t).abs() < 1e-12);
        }
    }

    #[test]
    fn spline_interpolates_and_is_periodic() {
        let pts = [
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 0.7),
            Vec2::new(-1.2, 0.0),
            Vec2::new(0.0, -0.8),
            Vec2::new(0.9, -0.5),
        ];
        let b = Baseline::control_points(&pts, Some(Vec2::zeros())).unwrap();
        for p in &pts {
            let th = p.y.atan2(p.x);
            assert!((b.radius(th) - p.norm()).abs() < 1e-12);
        }
        let eps = 1e-7;
        for th in [0.3, 1.9, 3.0, -2.2] {
            let fd = (b.radius(th + eps) - b.radius(th - eps)) / (2.0 * eps);
            assert!((fd - b.radius_derivative(th)).abs() < 1e-6);
            assert!((b.radius(th) - b.radius(th + TAU)).abs() < 1e-12);
        }
    }

    #[test]
    fn clockwise_points_are_rejected() {
        let pts = [
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, -1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ];
        assert!(matches!(
            Baseline::control_points(&pts, Some(Vec2::zeros())),
            Err(GeometryError::NotStarShaped)
        ));
    }

    #[test]
    fn ellipse_derivative_matches_finite_difference() {
        let b = Baseline::ellipse(Vec2::zeros(), 2.0, 1.0).unwrap();
        let eps = 1e-6;
        for th in [0.1, 0.8, 2.5, 4.0] {
            let fd = (b.radius(th + eps) - b.radius(th - eps)) / (2.0 * eps);
            assert!((fd - b.radius_derivative(th)).abs() < 1e-7);
        }
        let p = b.point(0.0);
        assert!((p.x - 2.0).abs() < 1e-14);
    }
}
