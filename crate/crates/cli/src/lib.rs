//! `pareto-shape`: batch front end over `pareto-shape-core`.
//!
//! Every command reads one TOML configuration, writes its CSV results and a
//! `manifest.toml` into the output directory, and fails with a nonzero exit
//! status exactly when it reports an error. Each CSV starts with a single
//! `#` line naming the manifest and the configuration hash; the rows below
//! it depend only on the configuration and the tool version.

mod manifest;
mod scalarize;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pareto_shape_core::config::Config;
use pareto_shape_core::geometry::boundary_geometry;
use pareto_shape_core::mesh::io::write_mesh;
use pareto_shape_core::multicrit::{front_maximality_check, nondominated_set};
use pareto_shape_core::pipeline::{
    dedup, design_pool, sample_pool, write_objectives_csv, DesignReport, Evaluator,
};

pub use manifest::RunManifest;

pub const WORKERS_ENV: &str = "PARETO_SHAPE_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "pareto-shape",
    version,
    about = "Coupled flow/elasticity shape evaluation and Pareto analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Objectives of one shape or a coefficient grid.
    Evaluate,
    /// Evaluate the design pool and extract its nondominated front.
    Pareto,
    /// Scalarized argmin per theta plus the stability sweep against theta*.
    Scalarize,
    /// Fluid and solid meshes plus the boundary geometry of one shape.
    MeshDump,
    /// Potential-flow solution of one shape.
    FlowDump,
    /// Displacements and stresses of one shape.
    ElastDump,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evaluate => "evaluate",
            Command::Pareto => "pareto",
            Command::Scalarize => "scalarize",
            Command::MeshDump => "mesh-dump",
            Command::FlowDump => "flow-dump",
            Command::ElastDump => "elast-dump",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for independent shape evaluations.
    #[arg(long, global = true, value_name = "N", env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Seed of the pool sampler (overrides `pool.seed`).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
}

/// Files written and informational notes of a successful run.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub outputs: Vec<PathBuf>,
    pub notes: Vec<String>,
}

/// Output directory, manifest bookkeeping and the resolved configuration.
pub(crate) struct Run {
    pub config: Config,
    pub workers: usize,
    pub out: PathBuf,
    pub manifest: RunManifest,
    pub notes: Vec<String>,
}

impl Run {
    /// Creates `name` in the output directory, writes the manifest reference
    /// line and hands the writer to `body`.
    pub fn csv(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<()> {
        let path = self.out.join(name);
        let mut w = BufWriter::new(
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        );
        writeln!(
            w,
            "# manifest={} config_hash={}",
            manifest::MANIFEST_FILE,
            self.manifest.config_hash
        )?;
        body(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush()?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    pub fn plain(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<()> {
        let path = self.out.join(name);
        let mut w = BufWriter::new(
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        );
        body(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush()?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }
}

pub fn load_config(path: Option<&Path>) -> Result<Config> {
    match path {
        Some(p) => Config::from_path(p).with_context(|| format!("configuration {}", p.display())),
        None => Ok(Config::default()),
    }
}

fn resolve_workers(requested: Option<usize>) -> Result<usize> {
    match requested {
        Some(0) => bail!("--workers (or {WORKERS_ENV}) must be at least 1"),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn run(cli: &Cli) -> Result<RunSummary> {
    let mut config = load_config(cli.options.config.as_deref())?;
    if let Some(seed) = cli.options.seed {
        config.pool.seed = seed;
    }
    let workers = resolve_workers(cli.options.workers)?;
    fs::create_dir_all(&cli.options.out)
        .with_context(|| format!("creating output directory {}", cli.options.out.display()))?;
    let manifest = RunManifest::start(
        cli.command.name(),
        cli.options.config.as_deref(),
        &config,
        workers,
    );
    let mut run = Run {
        config,
        workers,
        out: cli.options.out.clone(),
        manifest,
        notes: Vec::new(),
    };
    match cli.command {
        Command::Evaluate => cmd_evaluate(&mut run)?,
        Command::Pareto => cmd_pareto(&mut run)?,
        Command::Scalarize => scalarize::cmd_scalarize(&mut run)?,
        Command::MeshDump | Command::FlowDump | Command::ElastDump => {
            cmd_dump(&mut run, cli.command)?
        }
    }
    run.manifest.finish();
    let manifest_path = run.out.join(manifest::MANIFEST_FILE);
    fs::write(&manifest_path, run.manifest.to_toml()?)
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    let mut outputs: Vec<PathBuf> = run
        .manifest
        .outputs
        .iter()
        .map(|o| run.out.join(o))
        .collect();
    outputs.push(manifest_path);
    Ok(RunSummary {
        outputs,
        notes: run.notes,
    })
}

fn evaluator(run: &Run) -> Result<Evaluator> {
    Evaluator::from_config(&run.config).context("setting up the shape space and mesh family")
}

fn cmd_evaluate(run: &mut Run) -> Result<()> {
    let ev = evaluator(run)?;
    let designs = dedup(run.config.evaluation_designs());
    let reports = ev.evaluate_strict(&designs, run.workers)?;
    let n = run.config.geometry.n_modes;
    run.csv("objectives.csv", |w| write_objectives_csv(&reports, n, w))
}

/// Evaluates the configured pool, ordered by shape id.
pub(crate) fn evaluate_pool(run: &Run, ev: &Evaluator) -> Result<Vec<DesignReport>> {
    let designs = sample_pool(&run.config.pool, run.config.geometry.n_modes);
    Ok(ev.evaluate_strict(&designs, run.workers)?)
}

fn cmd_pareto(run: &mut Run) -> Result<()> {
    let ev = evaluator(run)?;
    let reports = evaluate_pool(run, &ev)?;
    let pool = design_pool(&reports, ev.provenance())?;
    let front = nondominated_set(&pool)?;
    if !front_maximality_check(&pool) {
        bail!("front maximality check failed: a dominated design is not dominated by the front");
    }
    let n = run.config.geometry.n_modes;
    run.csv("pool.csv", |w| write_objectives_csv(&reports, n, w))?;
    run.csv("front.csv", |w| pool.write_front_csv(w))?;
    run.notes.push(format!(
        "front has {} of {} designs",
        front.len(),
        pool.len()
    ));
    Ok(())
}

fn cmd_dump(run: &mut Run, command: Command) -> Result<()> {
    let ev = evaluator(run)?;
    let coefficients = run
        .config
        .geometry
        .coefficients
        .clone()
        .unwrap_or_else(|| vec![0.0; run.config.geometry.n_modes]);
    let shape = ev.shape(&coefficients).context("shape 0")?;
    let boundary = boundary_geometry(&shape, ev.family().resolution()).context("shape 0")?;
    run.csv("boundary.csv", |w| boundary.write_csv(w))?;
    match command {
        Command::MeshDump => {
            let (fluid, solid) = ev.family().meshes_for(&shape).context("shape 0")?;
            run.plain("fluid.mesh", |w| write_mesh(&fluid, w))?;
            run.plain("solid.mesh", |w| write_mesh(&solid, w))?;
        }
        Command::FlowDump => {
            let sol = ev.solve(&coefficients).context("shape 0")?;
            run.csv("flow.csv", |w| sol.flow.write_csv(w))?;
        }
        Command::ElastDump => {
            let sol = ev.solve(&coefficients).context("shape 0")?;
            run.csv("elast.csv", |w| sol.solid.write_csv(w))?;
        }
        _ => unreachable!("not a dump command"),
    }
    Ok(())
}
