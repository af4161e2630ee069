//! Run configuration: one TOML file with the sections `geometry`, `mesh`,
//! `flow`, `elasticity` (alias `elast`), `reliability`, `fluidloss`, `pool`
//! and `scalarization`. Every section and key is optional; errors carry the
//! offending line and dotted field path.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coupled::{FlowSettings, SolidSettings};
use crate::geometry::{Baseline, Disc, Rect, ShapeSpaceConfig, ShapeSpaceParams};
use crate::mesh::MeshOptions;
use crate::objectives::{CmbRule, FluidLossModel, ReliabilityModel};
use crate::scalarization::ScalarizationSpec;
use crate::Vec2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read configuration {path}: {message}")]
    Io { path: String, message: String },
    #[error("{}field `{field}`: {message}", line.map(|l| format!("line {l}, ")).unwrap_or_default())]
    Invalid {
        /// 1-based line, when the field could be located in the source.
        line: Option<usize>,
        field: String,
        message: String,
    },
}

impl ConfigError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Invalid { line, .. } => *line,
            ConfigError::Io { .. } => None,
        }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
            ConfigError::Io { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub geometry: GeometrySection,
    pub mesh: MeshSection,
    pub flow: FlowSettings,
    #[serde(alias = "elast")]
    pub elasticity: SolidSettings,
    pub reliability: ReliabilitySection,
    pub fluidloss: FluidLossModel,
    pub pool: PoolSection,
    pub scalarization: ScalarizationSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBaseline", into = "RawBaseline")]
pub enum BaselineSpec {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        semi_x: f64,
        semi_y: f64,
    },
    ControlPoints {
        points: Vec<[f64; 2]>,
        center: Option<[f64; 2]>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum BaselineKind {
    Circle,
    Ellipse,
    ControlPoints,
}

/// Flat form of `[geometry.baseline]`. An internally tagged enum would
/// buffer the table and lose the key of a bad value.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBaseline {
    kind: BaselineKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    semi_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    semi_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<[f64; 2]>>,
}

impl TryFrom<RawBaseline> for BaselineSpec {
    type Error = String;

    fn try_from(raw: RawBaseline) -> Result<Self, String> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| format!("{:?} baseline needs `{key}`", raw.kind))
        };
        let unused = |present: bool, key: &str| {
            if present {
                Err(format!(
                    "`{key}` does not apply to a {:?} baseline",
                    raw.kind
                ))
            } else {
                Ok(())
            }
        };
        match raw.kind {
            BaselineKind::Circle => {
                unused(raw.semi_x.is_some(), "semi_x")?;
                unused(raw.semi_y.is_some(), "semi_y")?;
                unused(raw.points.is_some(), "points")?;
                Ok(BaselineSpec::Circle {
                    center: raw.center.ok_or("circle baseline needs `center`")?,
                    radius: need(raw.radius, "radius")?,
                })
            }
            BaselineKind::Ellipse => {
                unused(raw.radius.is_some(), "radius")?;
                unused(raw.points.is_some(), "points")?;
                Ok(BaselineSpec::Ellipse {
                    center: raw.center.ok_or("ellipse baseline needs `center`")?,
                    semi_x: need(raw.semi_x, "semi_x")?,
                    semi_y: need(raw.semi_y, "semi_y")?,
                })
            }
            BaselineKind::ControlPoints => {
                unused(raw.radius.is_some(), "radius")?;
                unused(raw.semi_x.is_some(), "semi_x")?;
                unused(raw.semi_y.is_some(), "semi_y")?;
                Ok(BaselineSpec::ControlPoints {
                    points: raw.points.ok_or("control_points baseline needs `points`")?,
                    center: raw.center,
                })
            }
        }
    }
}

impl From<BaselineSpec> for RawBaseline {
    fn from(spec: BaselineSpec) -> Self {
        let mut raw = RawBaseline {
            kind: BaselineKind::Circle,
            center: None,
            radius: None,
            semi_x: None,
            semi_y: None,
            points: None,
        };
        match spec {
            BaselineSpec::Circle { center, radius } => {
                raw.center = Some(center);
                raw.radius = Some(radius);
            }
            BaselineSpec::Ellipse {
                center,
                semi_x,
                semi_y,
            } => {
                raw.kind = BaselineKind::Ellipse;
                raw.center = Some(center);
                raw.semi_x = Some(semi_x);
                raw.semi_y = Some(semi_y);
            }
            BaselineSpec::ControlPoints { points, center } => {
                raw.kind = BaselineKind::ControlPoints;
                raw.points = Some(points);
                raw.center = center;
            }
        }
        raw
    }
}

/// Axis-aligned coefficient grid: `points` values in `[-bound, bound]` for
/// each listed mode (0-based), all other modes zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub modes: Vec<usize>,
    pub points: usize,
    pub bound: f64,
}

impl GridSpec {
    pub fn coefficients(&self, n_modes: usize) -> Vec<Vec<f64>> {
        let axis: Vec<f64> = if self.points == 1 {
            vec![0.0]
        } else {
            (0..self.points)
                .map(|i| -self.bound + 2.0 * self.bound * i as f64 / (self.points - 1) as f64)
                .collect()
        };
        let mut out = vec![vec![0.0; n_modes]];
        for &m in &self.modes {
            out = out
                .into_iter()
                .flat_map(|c| {
                    axis.iter().map(move |&v| {
                        let mut c = c.clone();
                        c[m] = v;
                        c
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub baseline: BaselineSpec,
    /// Channel `[x_min, x_max, y_min, y_max]`.
    pub shroud: [f64; 4],
    /// Defaults to the shroud grown by the baseline reach.
    pub exterior_box: Option<[f64; 4]>,
    pub clamp_center: [f64; 2],
    pub clamp_radius: f64,
    pub n_modes: usize,
    pub hoelder_k: u32,
    pub hoelder_alpha: f64,
    pub norm_bound: f64,
    pub leading_edge: Option<f64>,
    pub collar_width: f64,
    pub norm_grid: usize,
    /// Shape evaluated by `evaluate` and the `*-dump` commands.
    pub coefficients: Option<Vec<f64>>,
    /// Coefficient grid for `evaluate`; overrides `coefficients`.
    pub grid: Option<GridSpec>,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            baseline: BaselineSpec::Circle {
                center: [0.0, 0.0],
                radius: 1.0,
            },
            shroud: [-4.0, 6.0, 0.0, 3.0],
            exterior_box: None,
            clamp_center: [0.0, -0.5],
            clamp_radius: 0.25,
            n_modes: 4,
            hoelder_k: 2,
            hoelder_alpha: 0.5,
            norm_bound: 25.0,
            leading_edge: None,
            collar_width: 0.45,
            norm_grid: 128,
            coefficients: None,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    /// Maximum element diameter.
    pub h: f64,
    pub min_angle: f64,
    pub round_corners: bool,
}

impl Default for MeshSection {
    fn default() -> Self {
        Self {
            h: 0.2,
            min_angle: 25.0,
            round_corners: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReliabilitySection {
    pub weibull_m: f64,
    pub cycles: f64,
    pub sigma_f: f64,
    pub b: f64,
    pub eps_f: f64,
    pub c: f64,
    pub youngs_modulus: f64,
    pub notch_length: f64,
}

impl Default for ReliabilitySection {
    fn default() -> Self {
        let r = CmbRule::default();
        Self {
            weibull_m: 1.5,
            cycles: 3000.0,
            sigma_f: r.sigma_f,
            b: r.b,
            eps_f: r.eps_f,
            c: r.c,
            youngs_modulus: r.youngs_modulus,
            notch_length: r.notch_length,
        }
    }
}

impl ReliabilitySection {
    pub fn rule(&self) -> CmbRule {
        CmbRule {
            sigma_f: self.sigma_f,
            b: self.b,
            eps_f: self.eps_f,
            c: self.c,
            youngs_modulus: self.youngs_modulus,
            notch_length: self.notch_length,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    Random,
    Grid,
    List,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoolSection {
    pub sampler: Sampler,
    /// Number of designs drawn by the random sampler (baseline included).
    pub size: usize,
    pub seed: u64,
    /// Half-width of the coefficient box `[-bound, bound]^n`.
    pub bound: f64,
    pub include_baseline: bool,
    pub grid: Option<GridSpec>,
    /// Explicit coefficient vectors for the list sampler.
    pub designs: Vec<Vec<f64>>,
}

impl Default for PoolSection {
    fn default() -> Self {
        Self {
            sampler: Sampler::Random,
            size: 25,
            seed: 0,
            bound: 0.03,
            include_baseline: true,
            grid: None,
            designs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Exact argmin over the configured pool.
    Pool,
    /// Multi-start pattern search over the box `[-pool.bound, pool.bound]^n`.
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    WeightedSum,
    EpsilonConstraint,
}

/// Straight path `from -> to` sampled at `steps` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaPath {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalarizationSection {
    pub mode: SearchMode,
    pub method: Method,
    /// Objective minimized by the epsilon constraint, 1-based.
    pub objective: usize,
    pub thetas: Vec<Vec<f64>>,
    pub path: Option<ThetaPath>,
    /// Limit parameter of the stability sweep; defaults to the last theta.
    pub theta_star: Option<Vec<f64>>,
    pub starts: usize,
    pub max_evaluations: usize,
    pub min_step: f64,
}

impl Default for ScalarizationSection {
    fn default() -> Self {
        Self {
            mode: SearchMode::Pool,
            method: Method::WeightedSum,
            objective: 1,
            thetas: Vec::new(),
            path: None,
            theta_star: None,
            starts: 3,
            max_evaluations: 400,
            min_step: 1.0 / 64.0,
        }
    }
}

impl ScalarizationSection {
    /// Explicit thetas followed by the path samples; `[(1, 0)]` when neither
    /// is given.
    pub fn theta_list(&self) -> Vec<Vec<f64>> {
        let mut out = self.thetas.clone();
        if let Some(p) = &self.path {
            for k in 0..p.steps {
                let t = if p.steps == 1 {
                    0.0
                } else {
                    k as f64 / (p.steps - 1) as f64
                };
                out.push(
                    p.from
                        .iter()
                        .zip(&p.to)
                        .map(|(a, b)| a + t * (b - a))
                        .collect(),
                );
            }
        }
        if out.is_empty() {
            out.push(vec![1.0, 0.0]);
        }
        out
    }

    pub fn spec(&self, theta: &[f64]) -> ScalarizationSpec {
        match self.method {
            Method::WeightedSum => ScalarizationSpec::WeightedSum {
                weights: theta.to_vec(),
            },
            Method::EpsilonConstraint => ScalarizationSpec::EpsilonConstraint {
                objective: self.objective.saturating_sub(1),
                eps: theta.to_vec(),
            },
        }
    }

    pub fn theta_star(&self) -> Vec<f64> {
        self.theta_star
            .clone()
            .unwrap_or_else(|| self.theta_list().last().cloned().unwrap_or_default())
    }
}

/// Number of objectives every command reports (`J_E`, `J_R`).
pub const N_OBJECTIVES: usize = 2;

// sanity caps that keep parsing cheap on hostile input
const MAX_MODES: usize = 64;
const MAX_NORM_GRID: usize = 4096;
const MAX_CONTROL_POINTS: usize = 4096;
const MAX_DESIGNS: usize = 1_000_000;
const MAX_THETAS: usize = 100_000;

impl Config {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Parses and validates configuration text.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        let config: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let mut field = e.path().to_string();
            let inner = e.into_inner();
            let message = inner.message().to_string();
            if let Some(name) = message
                .strip_prefix("unknown field `")
                .and_then(|rest| rest.split('`').next())
            {
                if field == "." {
                    field = name.to_string();
                } else if !field.ends_with(name) {
                    field = format!("{field}.{name}");
                }
            }
            let line = inner
                .span()
                .map(|s| line_of_offset(text, s.start))
                .or_else(|| locate(text, &field));
            ConfigError::Invalid {
                line,
                field,
                message,
            }
        })?;
        config
            .validate()
            .map_err(|(field, message)| ConfigError::Invalid {
                line: locate(text, &field),
                field,
                message,
            })?;
        Ok(config)
    }

    /// Canonical text of the resolved configuration (defaults filled in).
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn validate(&self) -> Result<(), (String, String)> {
        let err = |f: &str, m: String| Err((f.to_string(), m));
        let g = &self.geometry;
        if g.n_modes == 0 || g.n_modes > MAX_MODES {
            return err(
                "geometry.n_modes",
                format!("must lie in 1..={MAX_MODES}, got {}", g.n_modes),
            );
        }
        if g.norm_grid > MAX_NORM_GRID || g.hoelder_k > 8 {
            return err(
                "geometry.norm_grid",
                format!("norm grid above {MAX_NORM_GRID} or k above 8"),
            );
        }
        if let BaselineSpec::ControlPoints { points, .. } = &g.baseline {
            if points.len() > MAX_CONTROL_POINTS {
                return err(
                    "geometry.baseline.points",
                    format!("at most {MAX_CONTROL_POINTS} points"),
                );
            }
        }
        if let Some(c) = &g.coefficients {
            if c.len() != g.n_modes {
                return err(
                    "geometry.coefficients",
                    format!("expected {} coefficients, got {}", g.n_modes, c.len()),
                );
            }
        }
        if let Some(grid) = &g.grid {
            check_grid(grid, g.n_modes, "geometry.grid")?;
        }
        self.shape_space()
            .map_err(|e| ("geometry".to_string(), e))?;

        let m = &self.mesh;
        if !(m.h > 0.0 && m.h.is_finite()) {
            return err("mesh.h", format!("must be positive, got {}", m.h));
        }
        if !(m.min_angle >= 20.0 && m.min_angle <= 33.0) {
            return err(
                "mesh.min_angle",
                format!("must lie in [20, 33] degrees, got {}", m.min_angle),
            );
        }

        let f = &self.flow;
        for (name, v) in [
            ("flow.inflow_speed", f.inflow_speed),
            ("flow.stagnation_pressure", f.stagnation_pressure),
        ] {
            if !v.is_finite() {
                return err(name, format!("must be finite, got {v}"));
            }
        }
        if !(f.density > 0.0 && f.density.is_finite()) {
            return err(
                "flow.density",
                format!("must be positive, got {}", f.density),
            );
        }
        if !(f.rel_tol > 0.0 && f.rel_tol < 1.0) {
            return err(
                "flow.rel_tol",
                format!("must lie in (0, 1), got {}", f.rel_tol),
            );
        }
        for (name, v) in [("flow.pin_x", f.pin_x), ("flow.pin_y", f.pin_y)] {
            if v.is_some_and(|v| !v.is_finite()) {
                return err(name, "must be finite".into());
            }
        }

        let s = &self.elasticity;
        if !(s.lame_lambda > 0.0 && s.lame_lambda.is_finite()) {
            return err(
                "elasticity.lambda",
                format!("must be positive, got {}", s.lame_lambda),
            );
        }
        if !(s.lame_mu > 0.0 && s.lame_mu.is_finite()) {
            return err(
                "elasticity.mu",
                format!("must be positive, got {}", s.lame_mu),
            );
        }
        if s.body_force.iter().any(|v| !v.is_finite()) {
            return err("elasticity.body_force", "must be finite".into());
        }
        if !(s.rel_tol > 0.0 && s.rel_tol < 1.0) {
            return err(
                "elasticity.rel_tol",
                format!("must lie in (0, 1), got {}", s.rel_tol),
            );
        }

        self.reliability_model()
            .map_err(|e| ("reliability".to_string(), e))?;
        self.fluidloss
            .validate()
            .map_err(|e| ("fluidloss".to_string(), e.to_string()))?;

        let p = &self.pool;
        if p.size > MAX_DESIGNS || p.designs.len() > MAX_DESIGNS {
            return err("pool.size", format!("at most {MAX_DESIGNS} designs"));
        }
        if !(p.bound >= 0.0 && p.bound.is_finite()) {
            return err(
                "pool.bound",
                format!("must be nonnegative, got {}", p.bound),
            );
        }
        match p.sampler {
            Sampler::Random if p.size == 0 => return err("pool.size", "must be positive".into()),
            Sampler::Grid => match &p.grid {
                Some(grid) => check_grid(grid, g.n_modes, "pool.grid")?,
                None => return err("pool.grid", "the grid sampler needs a grid table".into()),
            },
            Sampler::List => {
                if p.designs.is_empty() && !p.include_baseline {
                    return err(
                        "pool.designs",
                        "the list sampler needs at least one design".into(),
                    );
                }
                if let Some(d) = p.designs.iter().find(|d| d.len() != g.n_modes) {
                    return err(
                        "pool.designs",
                        format!(
                            "every design needs {} coefficients, got {}",
                            g.n_modes,
                            d.len()
                        ),
                    );
                }
            }
            _ => {}
        }

        let sc = &self.scalarization;
        if sc.thetas.len() > MAX_THETAS {
            return err(
                "scalarization.thetas",
                format!("at most {MAX_THETAS} parameters"),
            );
        }
        if let Some(path) = &sc.path {
            if path.from.len() != path.to.len() || path.steps == 0 || path.steps > MAX_THETAS {
                return err(
                    "scalarization.path",
                    "needs from/to of equal length and steps >= 1".into(),
                );
            }
        }
        if sc.method == Method::EpsilonConstraint && !(1..=N_OBJECTIVES).contains(&sc.objective) {
            return err(
                "scalarization.objective",
                format!("must lie in 1..={N_OBJECTIVES}, got {}", sc.objective),
            );
        }
        for theta in sc
            .theta_list()
            .iter()
            .chain(std::iter::once(&sc.theta_star()))
        {
            sc.spec(theta)
                .validate(N_OBJECTIVES)
                .map_err(|e| ("scalarization.thetas".to_string(), e.to_string()))?;
        }
        if sc.starts == 0 || sc.max_evaluations == 0 {
            return err(
                "scalarization.starts",
                "starts and max_evaluations must be positive".into(),
            );
        }
        if !(sc.min_step > 0.0 && sc.min_step < 1.0) {
            return err(
                "scalarization.min_step",
                format!("must lie in (0, 1), got {}", sc.min_step),
            );
        }
        Ok(())
    }

    pub fn shape_space(&self) -> Result<Arc<ShapeSpaceConfig>, String> {
        let g = &self.geometry;
        let v = |a: [f64; 2]| Vec2::new(a[0], a[1]);
        let baseline = match &g.baseline {
            BaselineSpec::Circle { center, radius } => Baseline::circle(v(*center), *radius),
            BaselineSpec::Ellipse {
                center,
                semi_x,
                semi_y,
            } => Baseline::ellipse(v(*center), *semi_x, *semi_y),
            BaselineSpec::ControlPoints { points, center } => {
                let pts: Vec<Vec2> = points.iter().map(|p| v(*p)).collect();
                Baseline::control_points(&pts, center.map(v))
            }
        }
        .map_err(|e| e.to_string())?;
        let r = |a: [f64; 4]| Rect::new(a[0], a[1], a[2], a[3]);
        let mut params = ShapeSpaceParams::new(
            baseline,
            r(g.shroud),
            Disc {
                center: v(g.clamp_center),
                radius: g.clamp_radius,
            },
        );
        if let Some(b) = g.exterior_box {
            params.exterior_box = r(b);
        }
        params.n_modes = g.n_modes;
        params.hoelder_k = g.hoelder_k;
        params.hoelder_alpha = g.hoelder_alpha;
        params.norm_bound = g.norm_bound;
        params.leading_edge = g.leading_edge;
        params.collar_width = g.collar_width;
        params.norm_grid = g.norm_grid;
        ShapeSpaceConfig::new(params)
            .map(Arc::new)
            .map_err(|e| e.to_string())
    }

    pub fn mesh_options(&self) -> MeshOptions {
        MeshOptions {
            round_corners: self.mesh.round_corners,
            min_angle_deg: self.mesh.min_angle,
            ..MeshOptions::default()
        }
    }

    pub fn reliability_model(&self) -> Result<ReliabilityModel, String> {
        let r = &self.reliability;
        ReliabilityModel::with_cmb(r.weibull_m, r.cycles, r.rule()).map_err(|e| e.to_string())
    }

    /// Coefficient vectors evaluated by `evaluate`.
    pub fn evaluation_designs(&self) -> Vec<Vec<f64>> {
        let g = &self.geometry;
        match &g.grid {
            Some(grid) => grid.coefficients(g.n_modes),
            None => vec![g
                .coefficients
                .clone()
                .unwrap_or_else(|| vec![0.0; g.n_modes])],
        }
    }
}

fn check_grid(grid: &GridSpec, n_modes: usize, field: &str) -> Result<(), (String, String)> {
    if grid.points == 0 || !(grid.bound >= 0.0 && grid.bound.is_finite()) {
        return Err((
            field.to_string(),
            "needs points >= 1 and a nonnegative bound".into(),
        ));
    }
    let total = (grid.points as f64).powi(grid.modes.len().min(64) as i32);
    if total > MAX_DESIGNS as f64 {
        return Err((
            field.to_string(),
            format!("expands to more than {MAX_DESIGNS} designs"),
        ));
    }
    if let Some(m) = grid.modes.iter().find(|&&m| m >= n_modes) {
        return Err((
            format!("{field}.modes"),
            format!("mode {m} out of range 0..{n_modes}"),
        ));
    }
    let mut sorted = grid.modes.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != grid.modes.len() {
        return Err((format!("{field}.modes"), "modes must be distinct".into()));
    }
    Ok(())
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}

/// Best-effort line of a dotted field path in TOML source: the key line if
/// found, else the closest enclosing table header.
pub fn locate(text: &str, field: &str) -> Option<usize> {
    let norm = |s: &str| -> String {
        s.split('.')
            .map(|seg| {
                let seg = seg
                    .split('[')
                    .next()
                    .unwrap_or(seg)
                    .trim()
                    .trim_matches('"');
                if seg == "elast" {
                    "elasticity"
                } else {
                    seg
                }
            })
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join(".")
    };
    let target = norm(field);
    if target.is_empty() {
        return None;
    }
    let mut table = String::new();
    let mut best: Option<(usize, usize)> = None; // (matched length, line)
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let full = if let Some(h) = line.strip_prefix('[') {
            table = norm(h.trim_start_matches('[').trim_end_matches(']'));
            table.clone()
        } else if let Some((key, _)) = line.split_once('=') {
            let key = norm(key);
            if table.is_empty() {
                key
            } else {
                format!("{table}.{key}")
            }
        } else {
            continue;
        };
        let matched = if full == target {
            usize::MAX
        } else if target.starts_with(&format!("{full}.")) {
            full.len()
        } else {
            0
        };
        if matched > 0 && best.is_none_or(|(m, _)| matched > m) {
            best = Some((matched, i + 1));
        }
    }
    best.map(|(_, l)| l)
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampler::Random => "random",
            Sampler::Grid => "grid",
            Sampler::List => "list",
        })
    }
}
