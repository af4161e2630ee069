use std::path::Path;

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use pareto_shape_core::config::Config;
use pareto_shape_core::multicrit::TIE_TOLERANCE;

pub const MANIFEST_FILE: &str = "manifest.toml";

/// Provenance of one run; referenced from the first line of every CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub config_path: Option<String>,
    /// SHA-256 of the resolved configuration (defaults filled in).
    pub config_hash: String,
    pub workers: usize,
    pub started: String,
    pub finished: Option<String>,
    pub tolerances: Tolerances,
    pub outputs: Vec<String>,
    pub config: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub mesh_h: f64,
    pub flow_rel_tol: f64,
    pub elasticity_rel_tol: f64,
    pub dominance_tie: f64,
    pub argmin_rel: f64,
    pub argmin_abs: f64,
}

pub fn config_hash(config: &Config) -> String {
    let digest = Sha256::digest(config.canonical().as_bytes());
    format!("sha256:{digest:x}")
}

impl RunManifest {
    pub fn start(
        command: &str,
        config_path: Option<&Path>,
        config: &Config,
        workers: usize,
    ) -> Self {
        Self {
            tool: "pareto-shape".to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_path: config_path.map(|p| p.display().to_string()),
            config_hash: config_hash(config),
            workers,
            started: now(),
            finished: None,
            tolerances: Tolerances {
                mesh_h: config.mesh.h,
                flow_rel_tol: config.flow.rel_tol,
                elasticity_rel_tol: config.elasticity.rel_tol,
                dominance_tie: TIE_TOLERANCE,
                argmin_rel: 1e-9,
                argmin_abs: 1e-12,
            },
            outputs: Vec::new(),
            config: config.canonical(),
        }
    }

    pub fn finish(&mut self) {
        self.finished = Some(now());
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}
