//! Shape space: a baseline component outline, the shroud it sits in, and the
//! finite family of smooth boundary deformations that generate admissible
//! shapes.
//!
//! A design is a coefficient vector `c`. The boundary moves radially (about
//! the baseline's star center) by
//! `Delta(theta) = R_ref * sum_j c_j sin((j+1) pi t) w(t)`, where `t` runs over
//! the wetted arc and `w = (4t(1-t))^(k+2)` is a window that vanishes to high
//! order at both ends of that arc. The plane transform blends `Delta` into a collar around the
//! baseline, so it is the identity on the dry root, on the clamp disc and on
//! every shroud wall.

mod baseline;
pub mod hausdorff;
pub mod hoelder;

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};
use std::sync::Arc;

pub use baseline::{Baseline, PeriodicSpline};
pub use hausdorff::{directed_hausdorff, hausdorff_distance, MetricPoint};
pub use hoelder::{hoelder_norm_estimate, SampledGrid};

use crate::{BoundaryTag, Vec2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid shape-space configuration: {0}")]
    InvalidConfig(String),
    #[error("baseline is not star-shaped about its center")]
    NotStarShaped,
    #[error("expected {expected} deformation coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("deformation norm {estimate:.6e} exceeds bound {bound} ({})", if *.inverse { "inverse" } else { "forward" })]
    NormBoundViolation {
        estimate: f64,
        bound: f64,
        inverse: bool,
    },
    #[error("deformed boundary intersects itself")]
    SelfIntersection,
    #[error("deformed shape leaves its admissible region: {0}")]
    OutsideDomain(String),
    #[error("Hausdorff distance of an empty set")]
    EmptySet,
    #[error("grid has {samples} samples per axis, at least {required} needed")]
    GridTooCoarse { samples: usize, required: usize },
    #[error("boundary resolution {0} is below the minimum of 16")]
    InvalidResolution(usize),
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn is_valid(&self) -> bool {
        [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_max > self.x_min
            && self.y_max > self.y_min
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Euclidean distance from `p` to the closed rectangle.
    pub fn distance(&self, p: Vec2) -> f64 {
        let dx = (self.x_min - p.x).max(0.0).max(p.x - self.x_max);
        let dy = (self.y_min - p.y).max(0.0).max(p.y - self.y_max);
        (dx * dx + dy * dy).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: Vec2,
    pub radius: f64,
}

/// Raw inputs of a shape space, validated by [`ShapeSpaceConfig::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpaceParams {
    pub baseline: Baseline,
    /// Fluid channel `D`; the component is attached to its lower wall.
    pub shroud: Rect,
    /// Bounding region `Omega^ext` that every admissible shape stays inside.
    pub exterior_box: Rect,
    pub clamp: Disc,
    pub hoelder_k: u32,
    pub hoelder_alpha: f64,
    pub norm_bound: f64,
    pub n_modes: usize,
    /// Polar angle (about the baseline center) of the leading edge. `None`
    /// selects the upstream end of the wetted arc.
    pub leading_edge: Option<f64>,
    /// Relative half-width of the deformation collar around the baseline.
    pub collar_width: f64,
    /// Samples per axis of the grid used for the Hölder-norm screen.
    pub norm_grid: usize,
}

impl ShapeSpaceParams {
    pub fn new(baseline: Baseline, shroud: Rect, clamp: Disc) -> Self {
        let c = baseline.center();
        let reach = (0..256)
            .map(|i| baseline.radius(TAU * i as f64 / 256.0))
            .fold(0.0, f64::max)
            * 1.5;
        let exterior_box = Rect::new(
            shroud.x_min.min(c.x - reach) - 0.1 * shroud.width(),
            shroud.x_max.max(c.x + reach) + 0.1 * shroud.width(),
            shroud.y_min.min(c.y - reach) - 0.1 * shroud.height(),
            shroud.y_max.max(c.y + reach) + 0.1 * shroud.height(),
        );
        Self {
            baseline,
            shroud,
            exterior_box,
            clamp,
            hoelder_k: 2,
            hoelder_alpha: 0.5,
            norm_bound: 25.0,
            n_modes: 4,
            leading_edge: None,
            collar_width: 0.45,
            norm_grid: 128,
        }
    }
}

/// Validated shape space `O_{k,alpha}`: baseline, shroud, clamp and the
/// deformation family with its norm bound `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpaceConfig {
    params: ShapeSpaceParams,
    /// Wetted arc `(theta_a, theta_b)` with `theta_a < theta_b`.
    wetted: (f64, f64),
    leading_edge: f64,
    /// Leading edge position in the wetted-arc parameter, when it is interior.
    leading_edge_t: Option<f64>,
    reference_radius: f64,
    max_radius: f64,
}

const ANGLE_SAMPLES: usize = 4096;
/// Width (in wetted-arc parameter) of the notch that pins an interior
/// leading edge.
const LEADING_EDGE_NOTCH: f64 = 0.15;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    // invariant: f(lo) <= 0 < f(hi) or f(lo) > 0 >= f(hi), sign kept by flag
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let lo_nonpos = f_lo <= 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) <= 0.0) == lo_nonpos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo_nonpos {
        // entering the channel: keep the end that lies on or above the wall
        hi
    } else {
        lo
    }
}

impl ShapeSpaceConfig {
    pub fn new(params: ShapeSpaceParams) -> Result<Self, GeometryError> {
        let invalid = |msg: String| Err(GeometryError::InvalidConfig(msg));
        if params.hoelder_k < 2 {
            return invalid(format!(
                "Hölder order k must be >= 2, got {}",
                params.hoelder_k
            ));
        }
        if !(params.hoelder_alpha > 0.0 && params.hoelder_alpha <= 1.0) {
            return invalid(format!(
                "Hölder exponent must lie in (0, 1], got {}",
                params.hoelder_alpha
            ));
        }
        if !(params.norm_bound > 0.0) || params.norm_bound.is_nan() {
            return invalid(format!(
                "norm bound K must be positive, got {}",
                params.norm_bound
            ));
        }
        if params.n_modes == 0 {
            return invalid("at least one deformation mode is required".into());
        }
        if !(params.collar_width > 0.0 && params.collar_width < 0.5) {
            return invalid(format!(
                "collar width must lie in (0, 0.5), got {}",
                params.collar_width
            ));
        }
        if params.norm_grid < params.hoelder_k as usize + 2 {
            return invalid(format!(
                "norm grid of {} samples is too coarse",
                params.norm_grid
            ));
        }
        if !params.shroud.is_valid() || !params.exterior_box.is_valid() {
            return invalid("shroud and exterior box must be non-degenerate rectangles".into());
        }
        let d = params.shroud;
        let ext = params.exterior_box;
        if !(ext.contains(Vec2::new(d.x_min, d.y_min)) && ext.contains(Vec2::new(d.x_max, d.y_max)))
        {
            return invalid("exterior box must contain the shroud".into());
        }
        let base_owned = params.baseline.clone();
        let base = &base_owned;
        let c = base.center();
        if c.y > d.y_min {
            return invalid(format!(
                "baseline center (y = {}) must lie on or below the shroud's lower wall (y = {})",
                c.y, d.y_min
            ));
        }
        let samples: Vec<(f64, Vec2)> = (0..ANGLE_SAMPLES)
            .map(|i| {
                let th = TAU * i as f64 / ANGLE_SAMPLES as f64;
                (th, base.point(th))
            })
            .collect();
        if samples.iter().any(|(_, p)| !ext.contains(*p)) {
            return invalid("baseline leaves the exterior box".into());
        }

        // wetted arc: the part of the outline above the lower wall
        let height = |th: f64| base.point(th).y - d.y_min;
        let mut entering = Vec::new();
        let mut leaving = Vec::new();
        for i in 0..ANGLE_SAMPLES {
            let (t0, p0) = samples[i];
            let t1 = t0 + TAU / ANGLE_SAMPLES as f64;
            let h0 = p0.y - d.y_min;
            let h1 = samples[(i + 1) % ANGLE_SAMPLES].1.y - d.y_min;
            if h0 <= 0.0 && h1 > 0.0 {
                entering.push(bisect(height, t0, t1));
            } else if h0 > 0.0 && h1 <= 0.0 {
                leaving.push(bisect(height, t0, t1));
            }
        }
        if entering.len() != 1 || leaving.len() != 1 {
            return invalid(format!(
                "baseline must cross the shroud's lower wall exactly twice (found {} crossings)",
                entering.len() + leaving.len()
            ));
        }
        let theta_a = entering[0];
        let mut theta_b = leaving[0];
        while theta_b <= theta_a {
            theta_b += TAU;
        }
        for i in 1..256 {
            let th = theta_a + (theta_b - theta_a) * i as f64 / 256.0;
            let p = base.point(th);
            if !(p.x > d.x_min && p.x < d.x_max && p.y < d.y_max) {
                return invalid(
                    "wetted part of the baseline must lie strictly inside the shroud".into(),
                );
            }
        }

        let clamp = params.clamp;
        if !(clamp.radius > 0.0 && clamp.radius.is_finite()) {
            return invalid(format!(
                "clamp radius must be positive, got {}",
                clamp.radius
            ));
        }
        let cc = clamp.center - c;
        if cc.norm() >= base.radius(cc.y.atan2(cc.x)) {
            return invalid("clamp center lies outside the baseline component".into());
        }
        let gap = polyline_distance(clamp.center, samples.iter().map(|s| s.1));
        if gap <= clamp.radius {
            return invalid("clamp disc is not strictly inside the baseline component".into());
        }
        if d.distance(clamp.center) <= clamp.radius {
            return invalid("clamp disc must lie outside the shroud".into());
        }

        let reference_radius = base.reference_radius();
        let max_radius = samples
            .iter()
            .map(|(_, p)| (p - c).norm())
            .fold(0.0, f64::max);
        let span = theta_b - theta_a;
        let to_t = |th: f64| (th - theta_a).rem_euclid(TAU) / span;

        let (leading_edge, leading_edge_t) = match params.leading_edge {
            None => {
                let (pa, pb) = (base.point(theta_a), base.point(theta_b));
                (if pa.x <= pb.x { theta_a } else { theta_b }, None)
            }
            Some(th) => {
                if !th.is_finite() {
                    return invalid("leading-edge angle must be finite".into());
                }
                let t = to_t(th);
                if t > 1e-12 && t < 1.0 - 1e-12 {
                    (theta_a + t * span, Some(t))
                } else if t <= 1e-12 || (t - 1.0).abs() <= 1e-12 && t < 1.0 + 1e-12 {
                    (if t <= 1e-12 { theta_a } else { theta_b }, None)
                } else {
                    (th.rem_euclid(TAU), None)
                }
            }
        };

        let config = Self {
            params,
            wetted: (theta_a, theta_b),
            leading_edge,
            leading_edge_t,
            reference_radius,
            max_radius,
        };
        // the collar over the wetted arc must stay clear of the other walls
        let w = config.params.collar_width;
        for i in 0..=256 {
            let th = theta_a + span * i as f64 / 256.0;
            let (s, co) = th.sin_cos();
            let p = c + (1.0 + w) * base.radius(th) * Vec2::new(co, s);
            if !(p.x > d.x_min && p.x < d.x_max && p.y < d.y_max) {
                return invalid(
                    "deformation collar reaches the inlet, outlet or upper wall".into(),
                );
            }
        }
        // the transform must be the identity on the clamp disc
        for i in 0..=64 {
            let q = if i == 64 {
                clamp.center
            } else {
                let a = TAU * i as f64 / 64.0;
                clamp.center + clamp.radius * Vec2::new(a.cos(), a.sin())
            };
            let dq = q - c;
            let th = dq.y.atan2(dq.x);
            let t = to_t(th);
            let rho = dq.norm() / base.radius(th);
            if t > 0.0 && t < 1.0 && rho > 1.0 - w {
                return invalid("clamp disc reaches into the deformation collar".into());
            }
        }
        Ok(config)
    }

    pub fn params(&self) -> &ShapeSpaceParams {
        &self.params
    }

    pub fn baseline(&self) -> &Baseline {
        &self.params.baseline
    }

    pub fn shroud(&self) -> Rect {
        self.params.shroud
    }

    pub fn clamp(&self) -> Disc {
        self.params.clamp
    }

    pub fn n_modes(&self) -> usize {
        self.params.n_modes
    }

    pub fn norm_bound(&self) -> f64 {
        self.params.norm_bound
    }

    pub fn center(&self) -> Vec2 {
        self.params.baseline.center()
    }

    /// Polar angles bounding the wetted arc `dOmega ∩ D`.
    pub fn wetted_arc(&self) -> (f64, f64) {
        self.wetted
    }

    pub fn leading_edge_angle(&self) -> f64 {
        self.leading_edge
    }

    pub fn reference_radius(&self) -> f64 {
        self.reference_radius
    }

    /// True when `theta` lies on the fixed (dry) part of the outline, where
    /// every admissible transform is the identity.
    pub fn in_fixed_region(&self, theta: f64) -> bool {
        let t = self.arc_parameter(theta);
        !(t > 0.0 && t < 1.0)
    }

    fn arc_parameter(&self, theta: f64) -> f64 {
        let (a, b) = self.wetted;
        (theta - a).rem_euclid(TAU) / (b - a)
    }

    /// Exponent of the polynomial window and blend profiles. With `p = k + 2`
    /// both are `C^{k+1}`, so every transform lies in `C^{k,alpha}`.
    fn bump_power(&self) -> i32 {
        self.params.hoelder_k as i32 + 2
    }

    /// Deformation mode `j` at wetted-arc parameter `t` and its `t`-derivative.
    fn mode(&self, j: usize, t: f64) -> (f64, f64) {
        if !(t > 0.0 && t < 1.0) {
            return (0.0, 0.0);
        }
        let p = self.bump_power();
        let q = 4.0 * t * (1.0 - t);
        let w = q.powi(p);
        let dw = p as f64 * q.powi(p - 1) * 4.0 * (1.0 - 2.0 * t);
        let k = (j + 1) as f64 * PI;
        let (s, c) = (k * t).sin_cos();
        let (mut v, mut dv) = (s * w, k * c * w + s * dw);
        if let Some(t_le) = self.leading_edge_t {
            let z = (t - t_le) / LEADING_EDGE_NOTCH;
            if z.abs() < 1.0 {
                let e = 1.0 - z * z;
                let (l, dl) = (
                    1.0 - e.powi(p),
                    p as f64 * e.powi(p - 1) * 2.0 * z / LEADING_EDGE_NOTCH,
                );
                dv = dv * l + v * dl;
                v *= l;
            }
        }
        (v, dv)
    }

    /// Radial boundary displacement and its `theta`-derivative.
    fn displacement(&self, coefficients: &[f64], theta: f64) -> (f64, f64) {
        let t = self.arc_parameter(theta);
        if !(t > 0.0 && t < 1.0) {
            return (0.0, 0.0);
        }
        let span = self.wetted.1 - self.wetted.0;
        let (mut d, mut dd) = (0.0, 0.0);
        for (j, &c) in coefficients.iter().enumerate() {
            if c != 0.0 {
                let (v, dv) = self.mode(j, t);
                d += c * v;
                dd += c * dv;
            }
        }
        (self.reference_radius * d, self.reference_radius * dd / span)
    }

    /// Sup-norm of mode `j` along the boundary (length units).
    pub fn mode_sup_norm(&self, j: usize) -> f64 {
        (1..4096)
            .map(|i| self.mode(j, i as f64 / 4096.0).0.abs())
            .fold(0.0, f64::max)
            * self.reference_radius
    }

    fn blend(&self, rho: f64) -> f64 {
        let s = (rho - 1.0) / self.params.collar_width;
        if s.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - s * s).powi(self.bump_power())
        }
    }

    /// Maximum slope of the radial blend profile.
    fn blend_max_slope(&self) -> f64 {
        let w = self.params.collar_width;
        (0..2000)
            .map(|i| {
                let rho = 1.0 - w + 2.0 * w * (i as f64 + 0.5) / 2000.0;
                let e = 1e-7;
                ((self.blend(rho + e) - self.blend(rho - e)) / (2.0 * e)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Polar angles of the boundary samples used at `resolution`, together with
    /// the tag of the segment starting at each sample and the index of the
    /// leading-edge sample. Depends on the shape space only, never on the
    /// coefficients, so every shape shares the same parameter samples.
    pub fn sample_angles(
        &self,
        resolution: usize,
    ) -> Result<(Vec<f64>, Vec<BoundaryTag>, usize), GeometryError> {
        if resolution < 16 {
            return Err(GeometryError::InvalidResolution(resolution));
        }
        let (a, b) = self.wetted;
        let le = self.leading_edge;
        let mut breaks: Vec<(f64, bool)> = vec![(a, true)];
        if let Some(t) = self.leading_edge_t {
            breaks.push((a + t * (b - a), true));
        }
        breaks.push((b, false));
        let le_dry = self.in_fixed_region(le)
            && (le - a).rem_euclid(TAU) > 1e-12
            && (le - b).rem_euclid(TAU) > 1e-12;
        if le_dry {
            let mut th = le;
            while th <= b {
                th += TAU;
            }
            breaks.push((th, false));
        }
        let arcs: Vec<(f64, f64, bool)> = (0..breaks.len())
            .map(|i| {
                let end = if i + 1 < breaks.len() {
                    breaks[i + 1].0
                } else {
                    a + TAU
                };
                (breaks[i].0, end, breaks[i].1)
            })
            .collect();
        let base = self.baseline();
        let arc_len = |s: f64, e: f64| {
            (0..256)
                .map(|k| {
                    let t0 = s + (e - s) * k as f64 / 256.0;
                    let t1 = s + (e - s) * (k + 1) as f64 / 256.0;
                    (base.point(t1) - base.point(t0)).norm()
                })
                .sum::<f64>()
        };
        let lengths: Vec<f64> = arcs.iter().map(|&(s, e, _)| arc_len(s, e)).collect();
        let total: f64 = lengths.iter().sum();
        let mut counts: Vec<usize> = lengths
            .iter()
            .map(|l| ((resolution as f64 * l / total).round() as usize).max(2))
            .collect();
        let assigned: usize = counts.iter().sum();
        let largest = (0..counts.len())
            .max_by(|&i, &j| lengths[i].total_cmp(&lengths[j]))
            .unwrap_or(0);
        if assigned > resolution {
            counts[largest] -= (assigned - resolution).min(counts[largest] - 2);
        } else {
            counts[largest] += resolution - assigned;
        }

        let mut angles = Vec::with_capacity(resolution);
        let mut tags = Vec::with_capacity(resolution);
        let mut le_index = 0;
        for (arc, &(s, e, wet)) in arcs.iter().enumerate() {
            let start_index = angles.len();
            let tag = if wet {
                BoundaryTag::Component
            } else {
                BoundaryTag::Root
            };
            let n = counts[arc];
            for k in 0..n {
                angles.push(s + (e - s) * k as f64 / n as f64);
                tags.push(tag);
            }
            let start = s.rem_euclid(TAU);
            if (start - le.rem_euclid(TAU)).abs() < 1e-12
                || (TAU - (start - le.rem_euclid(TAU)).abs()) < 1e-12
            {
                le_index = start_index;
            }
        }
        Ok((angles, tags, le_index))
    }

    /// Number of boundary samples giving segments no longer than roughly
    /// `0.8 * spacing` on the baseline.
    pub fn resolution_for_spacing(&self, spacing: f64) -> usize {
        let base = self.baseline();
        let perimeter: f64 = (0..4096)
            .map(|k| {
                let t0 = TAU * k as f64 / 4096.0;
                let t1 = TAU * (k + 1) as f64 / 4096.0;
                (base.point(t1) - base.point(t0)).norm()
            })
            .sum();
        ((perimeter / (0.8 * spacing)).ceil() as usize).max(16)
    }
}

fn polyline_distance(p: Vec2, pts: impl Iterator<Item = Vec2>) -> f64 {
    let pts: Vec<Vec2> = pts.collect();
    (0..pts.len())
        .map(|i| point_segment_distance(p, pts[i], pts[(i + 1) % pts.len()]))
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + t * ab)).norm()
}

/// An admissible shape `Omega = psi(Omega_0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    config: Arc<ShapeSpaceConfig>,
    coefficients: Vec<f64>,
}

impl Shape {
    pub fn config(&self) -> &Arc<ShapeSpaceConfig> {
        &self.config
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Polar angle of the marked leading edge (identical for every shape).
    pub fn leading_edge(&self) -> f64 {
        self.config.leading_edge
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.config.baseline().radius(theta) + self.config.displacement(&self.coefficients, theta).0
    }

    pub fn boundary_point(&self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        self.config.center() + self.radius(theta) * Vec2::new(c, s)
    }

    fn boundary_tangent(&self, theta: f64) -> Vec2 {
        let base = self.config.baseline();
        let (s, c) = theta.sin_cos();
        let r = self.radius(theta);
        let dr =
            base.radius_derivative(theta) + self.config.displacement(&self.coefficients, theta).1;
        dr * Vec2::new(c, s) + r * Vec2::new(-s, c)
    }

    /// Displacement field `psi(x) - x` of the plane transform.
    pub fn displacement_field(&self, x: Vec2) -> Vec2 {
        let cfg = &self.config;
        let d = x - cfg.center();
        let r = d.norm();
        if r == 0.0 {
            return Vec2::zeros();
        }
        let theta = d.y.atan2(d.x);
        let b = cfg.blend(r / cfg.baseline().radius(theta));
        if b == 0.0 {
            return Vec2::zeros();
        }
        let delta = cfg.displacement(&self.coefficients, theta).0;
        (b * delta / r) * d
    }

    /// The plane transform `psi`.
    pub fn transform(&self, x: Vec2) -> Vec2 {
        x + self.displacement_field(x)
    }

    /// `psi^{-1}(y)` by fixed-point iteration `x <- y - V(x)`.
    pub fn inverse_transform(&self, y: Vec2) -> Option<Vec2> {
        let mut x = y;
        for _ in 0..1000 {
            let next = y - self.displacement_field(x);
            if (next - x).norm() <= 1e-10 {
                return Some(next);
            }
            x = next;
        }
        None
    }

    /// Hölder-norm estimates of the forward and inverse displacement fields on
    /// a `grid x grid` sampling of the collar's bounding square.
    pub fn deformation_norms(&self, grid: usize) -> Result<(f64, f64), GeometryError> {
        let cfg = &self.config;
        let c = cfg.center();
        let half = (1.0 + cfg.params.collar_width) * cfg.max_radius * 1.05;
        let h = 2.0 * half / (grid as f64 - 1.0);
        let mut fx = Vec::with_capacity(grid * grid);
        let mut fy = Vec::with_capacity(grid * grid);
        let mut ix = Vec::with_capacity(grid * grid);
        let mut iy = Vec::with_capacity(grid * grid);
        for j in 0..grid {
            for i in 0..grid {
                let y = c + Vec2::new(-half + h * i as f64, -half + h * j as f64);
                let v = self.displacement_field(y);
                fx.push(v.x);
                fy.push(v.y);
                let x = self
                    .inverse_transform(y)
                    .ok_or(GeometryError::NormBoundViolation {
                        estimate: f64::INFINITY,
                        bound: cfg.params.norm_bound,
                        inverse: true,
                    })?;
                ix.push(x.x - y.x);
                iy.push(x.y - y.y);
            }
        }
        let (k, alpha) = (cfg.params.hoelder_k, cfg.params.hoelder_alpha);
        let norm = |vals: Vec<f64>| {
            hoelder_norm_estimate(&SampledGrid::two_d(grid, grid, h, h, vals), k, alpha)
        };
        let forward = norm(fx)?.max(norm(fy)?);
        let inverse = norm(ix)?.max(norm(iy)?);
        Ok((forward, inverse))
    }

    /// Norm estimates used for admission: the estimate on the configured grid
    /// plus twice its growth since the half-resolution grid, so a shape accepted
    /// here keeps its estimate within the bound on finer grids. One growth step
    /// is not enough for large inverse deformations, whose estimates converge
    /// slowly and unevenly.
    pub fn screening_norms(&self) -> Result<(f64, f64), GeometryError> {
        let grid = self.config.params.norm_grid;
        let (f1, i1) = self.deformation_norms(grid)?;
        let coarse = (grid / 2).max(self.config.params.hoelder_k as usize + 2);
        let (f0, i0) = self.deformation_norms(coarse)?;
        let margin = |fine: f64, coarse: f64| fine + GROWTH_MARGIN * (fine - coarse).max(0.0);
        Ok((margin(f1, f0), margin(i1, i0)))
    }

    /// Closed outline sampled uniformly in the polar angle.
    pub fn outline(&self, n: usize) -> Vec<Vec2> {
        (0..n)
            .map(|i| self.boundary_point(TAU * i as f64 / n as f64))
            .collect()
    }
}

const GROWTH_MARGIN: f64 = 2.0;

/// Builds the shape `psi(Omega_0)` for a coefficient vector, screening the
/// norm bound, simplicity of the boundary and containment.
pub fn realize_shape(
    config: &Arc<ShapeSpaceConfig>,
    coefficients: &[f64],
) -> Result<Shape, GeometryError> {
    let cfg = config.as_ref();
    if coefficients.len() != cfg.n_modes() {
        return Err(GeometryError::CoefficientCount {
            expected: cfg.n_modes(),
            got: coefficients.len(),
        });
    }
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(GeometryError::InvalidConfig(
            "coefficients must be finite".into(),
        ));
    }
    let shape = Shape {
        config: Arc::clone(config),
        coefficients: coefficients.to_vec(),
    };
    if coefficients.iter().all(|&c| c == 0.0) {
        return Ok(shape);
    }
    let bound = cfg.norm_bound();

    // radial monotonicity of psi along every ray (injectivity)
    let slope = cfg.blend_max_slope();
    let (a, b) = cfg.wetted_arc();
    for i in 1..2048 {
        let th = a + (b - a) * i as f64 / 2048.0;
        let delta = cfg.displacement(coefficients, th).0;
        if slope * delta.abs() >= cfg.baseline().radius(th) {
            return Err(GeometryError::NormBoundViolation {
                estimate: f64::INFINITY,
                bound,
                inverse: true,
            });
        }
    }

    let (forward, inverse) = shape.screening_norms()?;
    if forward > bound {
        return Err(GeometryError::NormBoundViolation {
            estimate: forward,
            bound,
            inverse: false,
        });
    }
    if inverse > bound {
        return Err(GeometryError::NormBoundViolation {
            estimate: inverse,
            bound,
            inverse: true,
        });
    }

    let outline = shape.outline(512);
    if outline
        .iter()
        .any(|p| !cfg.params.exterior_box.contains(*p))
    {
        return Err(GeometryError::OutsideDomain(
            "boundary leaves the exterior box".into(),
        ));
    }
    let d = cfg.shroud();
    for i in 1..512 {
        let p = shape.boundary_point(a + (b - a) * i as f64 / 512.0);
        if !(p.x > d.x_min && p.x < d.x_max && p.y > d.y_min && p.y < d.y_max) {
            return Err(GeometryError::OutsideDomain(
                "wetted boundary must stay strictly inside the shroud".into(),
            ));
        }
    }
    if !polyline_is_simple(&outline) {
        return Err(GeometryError::SelfIntersection);
    }
    Ok(shape)
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).perp(&(c - a))
}

pub(crate) fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Vec2, b: Vec2, p: Vec2, o: f64| {
        o == 0.0
            && p.x >= a.x.min(b.x)
            && p.x <= a.x.max(b.x)
            && p.y >= a.y.min(b.y)
            && p.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// True when the closed polyline has no crossings between non-adjacent edges.
pub fn polyline_is_simple(points: &[Vec2]) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(a, b, points[j], points[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Sampled outline of a shape with the data the boundary integrals need.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGeometry {
    pub vertices: Vec<Vec2>,
    /// Outward unit normals.
    pub normals: Vec<Vec2>,
    /// Arc length along the outline to the leading edge (shorter direction).
    pub arclength_to_le: Vec<f64>,
    /// Tag of segment `i`, which joins vertex `i` to vertex `i + 1` (cyclic).
    pub segment_tags: Vec<BoundaryTag>,
    /// Polar angle of each vertex about the baseline center.
    pub angles: Vec<f64>,
    pub leading_edge: usize,
    cumulative: Vec<f64>,
    perimeter: f64,
}

impl BoundaryGeometry {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Lower clamp for the leading-edge distance inside singular integrands.
    pub fn eps_le(&self) -> f64 {
        1e-6 * self.perimeter
    }

    pub fn segment(&self, i: usize) -> (Vec2, Vec2) {
        (self.vertices[i], self.vertices[(i + 1) % self.len()])
    }

    pub fn segment_length(&self, i: usize) -> f64 {
        let (a, b) = self.segment(i);
        (b - a).norm()
    }

    pub fn is_wetted(&self, segment: usize) -> bool {
        self.segment_tags[segment] == BoundaryTag::Component
    }

    /// Vertex indices touching at least one wetted segment.
    pub fn wetted_vertices(&self) -> Vec<usize> {
        let n = self.len();
        (0..n)
            .filter(|&i| self.is_wetted(i) || self.is_wetted((i + n - 1) % n))
            .collect()
    }

    /// Leading-edge distance at fraction `tau` along segment `i`, clamped
    /// below by [`Self::eps_le`].
    pub fn dist_le_at(&self, i: usize, tau: f64) -> f64 {
        let s0 = self.cumulative[self.leading_edge];
        let s = (self.cumulative[i] + tau * self.segment_length(i) - s0).rem_euclid(self.perimeter);
        s.min(self.perimeter - s).max(self.eps_le())
    }

    /// Closed counter-clockwise polygon with explicit segment tags. Vertex
    /// normals average the normals of the two adjacent segments; angles are
    /// taken about the vertex centroid.
    pub fn from_polygon(
        vertices: Vec<Vec2>,
        segment_tags: Vec<BoundaryTag>,
        leading_edge: usize,
    ) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 || segment_tags.len() != n || leading_edge >= n {
            return Err(GeometryError::InvalidConfig(
                "polygon needs at least 3 vertices, one tag per segment and a valid leading edge"
                    .into(),
            ));
        }
        if vertices
            .iter()
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(GeometryError::InvalidConfig(
                "non-finite polygon vertex".into(),
            ));
        }
        let seg_normal = |i: usize| {
            let d = vertices[(i + 1) % n] - vertices[i];
            Vec2::new(d.y, -d.x).try_normalize(0.0)
        };
        let mut normals = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (seg_normal((i + n - 1) % n), seg_normal(i));
            let m = match (a, b) {
                (Some(a), Some(b)) => (a + b).try_normalize(0.0).unwrap_or(b),
                _ => {
                    return Err(GeometryError::InvalidConfig(
                        "repeated polygon vertex".into(),
                    ))
                }
            };
            normals.push(m);
        }
        let centroid = vertices.iter().sum::<Vec2>() / n as f64;
        let angles = vertices
            .iter()
            .map(|p| (p.y - centroid.y).atan2(p.x - centroid.x))
            .collect();
        Ok(Self::assemble(
            vertices,
            normals,
            segment_tags,
            angles,
            leading_edge,
        ))
    }

    fn assemble(
        vertices: Vec<Vec2>,
        normals: Vec<Vec2>,
        segment_tags: Vec<BoundaryTag>,
        angles: Vec<f64>,
        leading_edge: usize,
    ) -> Self {
        let n = vertices.len();
        let mut cumulative = Vec::with_capacity(n);
        let mut acc = 0.0;
        for i in 0..n {
            cumulative.push(acc);
            acc += (vertices[(i + 1) % n] - vertices[i]).norm();
        }
        let perimeter = acc;
        let s0 = cumulative[leading_edge];
        let arclength_to_le = cumulative
            .iter()
            .map(|&s| {
                let d = (s - s0).rem_euclid(perimeter);
                d.min(perimeter - d)
            })
            .collect();
        BoundaryGeometry {
            vertices,
            normals,
            arclength_to_le,
            segment_tags,
            angles,
            leading_edge,
            cumulative,
            perimeter,
        }
    }

    /// Nearest segment to `p` and the fraction along it of the foot point.
    pub fn project(&self, p: Vec2) -> (usize, f64) {
        let mut best = (0, 0.0, f64::INFINITY);
        for i in 0..self.len() {
            let (a, b) = self.segment(i);
            let d = b - a;
            let l2 = d.norm_squared();
            let s = if l2 > 0.0 {
                ((p - a).dot(&d) / l2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let dist = (a + s * d - p).norm_squared();
            if dist < best.2 {
                best = (i, s, dist);
            }
        }
        (best.0, best.1)
    }

    /// CSV with columns `x,y,nx,ny,dist_LE,tag`; the tag of a vertex is the
    /// tag of the segment leaving it.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,nx,ny,dist_LE,tag")?;
        for i in 0..self.len() {
            let (p, n) = (self.vertices[i], self.normals[i]);
            writeln!(
                out,
                "{},{},{},{},{},{}",
                p.x, p.y, n.x, n.y, self.arclength_to_le[i], self.segment_tags[i]
            )?;
        }
        Ok(())
    }
}

pub fn boundary_geometry(
    shape: &Shape,
    resolution: usize,
) -> Result<BoundaryGeometry, GeometryError> {
    let (angles, segment_tags, leading_edge) = shape.config.sample_angles(resolution)?;
    let vertices: Vec<Vec2> = angles.iter().map(|&t| shape.boundary_point(t)).collect();
    let normals = angles
        .iter()
        .map(|&t| {
            let tan = shape.boundary_tangent(t);
            Vec2::new(tan.y, -tan.x).normalize()
        })
        .collect();
    Ok(BoundaryGeometry::assemble(
        vertices,
        normals,
        segment_tags,
        angles,
        leading_edge,
    ))
}
