//! Command-line driver: `mf`, `tsc`, `mc`, `scan`, `bounds`, `table-check`.

pub mod config;
pub mod output;
pub mod tables;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gxy_core::analysis::{self, OrderConfig, ScanPoint};
use gxy_core::bounds::{self, IntegrationSettings};
use gxy_core::montecarlo::{self, RunPlan, Start};
use gxy_core::variational::{self, SolveOptions};
use gxy_core::{meanfield, tsc, LatticeGeometry, ModelSpec};
use serde::Serialize;

use crate::config::{
    flag_table, resolve, BoundsConfig, Format, GlobalFlags, McConfig, MfConfig, RunConfig, ScanConfig, Section,
    StartKind, TableCheckConfig, TscConfig,
};
use crate::output::{Artifacts, Header};
use crate::tables::{CellStatus, MF_REFERENCE, MF_WAIVABLE_M_CELL, TSC_REFERENCE};

/// Environment variable that replaces the default output directory.
pub const OUT_ENV: &str = "GXY_OUT";

#[derive(Debug, Parser)]
#[command(name = "gxy", version, about = "Generalized XY lattice models: variational solvers, Monte Carlo and bound checks")]
pub struct Cli {
    /// TOML config file; flags override its values key by key.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory [default: $GXY_OUT or ./gxy-out].
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Artifact formats to write.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Master random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: available parallelism].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean-field transition table.
    Mf(MfFlags),
    /// Two-site-cluster transition table.
    Tsc(TscFlags),
    /// Monte Carlo run at one temperature or on a replica ladder.
    Mc(McFlags),
    /// Monte Carlo temperature scan with transition-order classification.
    Scan(ScanFlags),
    /// Partition-function bound checks on the 4x4 square-ditch torus.
    Bounds(BoundsFlags),
    /// Regression of the variational solvers against the reference tables.
    TableCheck(TableCheckFlags),
}

#[derive(Debug, Args, Serialize)]
pub struct MfFlags {
    /// Exponents p, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<u32>>,
    /// Lower end of the temperature search window.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_min: Option<f64>,
    /// Upper end of the temperature search window.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_max: Option<f64>,
    /// Bisection tolerance on the transition temperature.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Grid points used to bracket free-energy minima.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct TscFlags {
    /// Exponents p, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<u32>>,
    /// Lower end of the temperature search window.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_min: Option<f64>,
    /// Upper end of the temperature search window.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_max: Option<f64>,
    /// Bisection tolerance on the transition temperature.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Grid points used to bracket free-energy minima.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Gauss-Legendre nodes per polar angle in the pair integrals.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct McFlags {
    /// Lattice dimension (2 or 3).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Linear lattice size.
    #[arg(long = "L", value_name = "L")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub len: Option<usize>,
    /// Generalized-XY exponent (default model p = 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    /// Square-ditch half-width; selects the square-ditch model.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Inverse temperature of the coldest chain.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Temperature of the coldest chain (default 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Hottest temperature of the replica ladder.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_max: Option<f64>,
    /// Number of replicas on a geometric temperature ladder.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    /// Measurement sweeps after thermalization.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<u64>,
    /// Thermalization sweeps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub therm: Option<u64>,
    /// Sweeps between recorded measurements.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<u64>,
    /// Cluster moves after each Metropolis sweep.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster: Option<u32>,
    /// Sweeps between replica-exchange rounds (off when unset).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exchange_interval: Option<u64>,
    /// Sweeps between checkpoints; an existing checkpoint is resumed.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint_interval: Option<u64>,
    /// Initial configuration.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<StartKind>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanFlags {
    /// Lattice dimension (2 or 3).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Linear lattice size.
    #[arg(long = "L", value_name = "L")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub len: Option<usize>,
    /// Generalized-XY exponent (default model p = 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    /// Square-ditch half-width; selects the square-ditch model.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Lowest temperature of the grid.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_min: Option<f64>,
    /// Highest temperature of the grid.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_max: Option<f64>,
    /// Number of evenly spaced temperatures.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Measurement sweeps after thermalization.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<u64>,
    /// Thermalization sweeps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub therm: Option<u64>,
    /// Sweeps between recorded measurements.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<u64>,
    /// Cluster moves after each Metropolis sweep.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster: Option<u32>,
    /// Sweeps between replica-exchange rounds (off when unset).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exchange_interval: Option<u64>,
    /// Energy histogram bins.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    /// Largest valley-to-peak ratio counted as bimodal.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valley_threshold: Option<f64>,
    /// Smallest peak separation in bins.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_peak_separation: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsFlags {
    /// Lattice dimension (only 2).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Linear lattice size (only 4).
    #[arg(long = "L", value_name = "L")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub len: Option<usize>,
    /// Ditch half-widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    /// Inverse temperatures, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    /// Thermalization sweeps per integration node.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub therm: Option<u64>,
    /// Measurement sweeps per integration node.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<u64>,
    /// Widest coupling segment of the thermodynamic integration.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_segment: Option<f64>,
    /// Gauss-Legendre nodes per segment.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_per_segment: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct TableCheckFlags {
    /// Relative tolerance on MF transition temperatures.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mf_tolerance: Option<f64>,
    /// Relative tolerance on TSC transition temperatures.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tsc_tolerance: Option<f64>,
    /// Relative tolerance on MF energy jump and magnetization.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mf_jump_tolerance: Option<f64>,
    /// Relative tolerance on TSC energy jump and magnetization.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tsc_jump_tolerance: Option<f64>,
    /// Sets all four tolerances at once.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// Parses arguments, runs the subcommand and maps failures to exit codes:
/// 2 for configuration errors, 1 for everything else.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            if let Some(cfg) = e.downcast_ref::<ConfigErrors>() {
                eprintln!("configuration invalid:");
                for line in &cfg.0 {
                    eprintln!("  {line}");
                }
                return ExitCode::from(2);
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Every validation error of a config.
#[derive(Debug)]
pub struct ConfigErrors(pub Vec<String>);

impl std::fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0.join("; "))
    }
}

impl std::error::Error for ConfigErrors {}

fn load<S: Section, F: Serialize>(cli: &Cli, flags: &F) -> Result<RunConfig<S>> {
    let file = match &cli.config {
        Some(path) => Some(config::read_file(path).map_err(ConfigErrors)?),
        None => None,
    };
    let global = GlobalFlags { seed: cli.seed, format: cli.format };
    Ok(resolve::<S>(file, flag_table(flags), global).map_err(ConfigErrors)?)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("gxy-out"))
}

pub fn execute(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigErrors(vec!["threads: must be >= 1".into()]).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker pool")?;
    }
    let dir = out_dir(&cli);
    match &cli.command {
        Command::Mf(f) => run_mf(load(&cli, f)?, &dir),
        Command::Tsc(f) => run_tsc(load(&cli, f)?, &dir),
        Command::Mc(f) => run_mc(load(&cli, f)?, &dir),
        Command::Scan(f) => run_scan(load(&cli, f)?, &dir),
        Command::Bounds(f) => run_bounds(load(&cli, f)?, &dir),
        Command::TableCheck(f) => run_table_check(load(&cli, f)?, &dir),
    }
}

fn solve_options(lo: f64, hi: f64, tolerance: f64, grid: usize) -> SolveOptions {
    SolveOptions { window: (lo, hi), tolerance, grid }
}

fn finish(artifacts: Artifacts) -> Result<()> {
    let dir = artifacts.dir().to_path_buf();
    for name in artifacts.finish()? {
        println!("wrote {}", dir.join(name).display());
    }
    Ok(())
}

fn run_mf(cfg: RunConfig<MfConfig>, dir: &Path) -> Result<ExitCode> {
    let c = &cfg.params;
    let opts = solve_options(c.theta_min, c.theta_max, c.tolerance, c.grid);
    let reports = c
        .p
        .iter()
        .map(|&p| meanfield::solve_mf(p, &opts).with_context(|| format!("mean-field solve for p = {p}")))
        .collect::<Result<Vec<_>>>()?;
    write_table(cfg, dir, "mf_table", &reports)
}

fn run_tsc(cfg: RunConfig<TscConfig>, dir: &Path) -> Result<ExitCode> {
    let c = &cfg.params;
    let opts = solve_options(c.theta_min, c.theta_max, c.tolerance, c.grid);
    let reports = c
        .p
        .iter()
        .map(|&p| {
            let model = tsc::TwoSiteCluster { nodes: c.nodes, ..tsc::TwoSiteCluster::new(p) };
            tsc::solve_tsc_with(model, &opts).with_context(|| format!("two-site-cluster solve for p = {p}"))
        })
        .collect::<Result<Vec<_>>>()?;
    write_table(cfg, dir, "tsc_table", &reports)
}

fn write_table<S: Serialize>(
    cfg: RunConfig<S>,
    dir: &Path,
    stem: &str,
    reports: &[gxy_core::TransitionReport],
) -> Result<ExitCode> {
    let table = variational::table_csv(reports);
    print!("{table}");
    let mut out = Artifacts::create(dir, Header::new(&cfg))?;
    if cfg.format.csv() {
        out.csv(&format!("{stem}.csv"), &table)?;
    }
    if cfg.format.json() {
        out.json(&format!("{stem}.json"), "reports", &reports)?;
    }
    finish(out)?;
    Ok(ExitCode::SUCCESS)
}

fn model_spec(p: Option<u32>, epsilon: Option<f64>, beta: f64) -> Result<ModelSpec> {
    Ok(match epsilon {
        Some(e) => ModelSpec::square_ditch(e, beta)?,
        None => ModelSpec::generalized(p.unwrap_or(1), beta)?,
    })
}

const SAMPLES_CSV_HEADER: &str = "chain,theta,index,u,m_xy,m_p,rho";

fn samples_csv(out: &montecarlo::RunOutput) -> String {
    let mut text = format!("{SAMPLES_CSV_HEADER}\n");
    for (k, (t, samples)) in out.temperatures.iter().zip(&out.samples).enumerate() {
        for (i, s) in samples.iter().enumerate() {
            let rho = s.rho.map(|r| r.to_string()).unwrap_or_default();
            text.push_str(&format!("{k},{t},{i},{},{},{},{rho}\n", s.u, s.m_xy, s.m_p));
        }
    }
    text
}

#[derive(Serialize)]
struct McSummary<'a> {
    site_count: usize,
    temperatures: &'a [f64],
    acceptance: &'a [f64],
    swap_rates: Vec<f64>,
    rows: &'a [analysis::ScanRow],
}

fn run_mc(cfg: RunConfig<McConfig>, dir: &Path) -> Result<ExitCode> {
    let c = &cfg.params;
    let base = c.base_temperature();
    let mut plan = RunPlan::new(c.d, c.len, model_spec(c.p, c.epsilon, 1.0 / base)?);
    plan.thermalization = c.therm;
    plan.measurements = c.sweeps;
    plan.stride = c.stride;
    plan.seed = cfg.seed;
    plan.temperatures = c.temperatures();
    plan.cluster_updates = c.cluster;
    plan.exchange_interval = c.exchange_interval;
    plan.checkpoint_interval = c.checkpoint_interval;
    plan.start = match c.start {
        StartKind::Hot => Start::Hot,
        StartKind::Cold => Start::Cold,
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let checkpoint = dir.join("mc.checkpoint.json");
    let ck = c.checkpoint_interval.map(|_| checkpoint.as_path());
    let result = montecarlo::run(plan, ck).context("Monte Carlo run")?;
    let rows = result
        .temperatures
        .iter()
        .zip(&result.samples)
        .map(|(&t, s)| analysis::summarize(t, result.site_count, s))
        .collect::<gxy_core::Result<Vec<_>>>()
        .context("summarizing samples")?;
    let summary = analysis::scan_csv(&rows);
    print!("{summary}");
    let mut out = Artifacts::create(dir, Header::new(&cfg))?;
    if cfg.format.csv() {
        out.csv("mc_samples.csv", &samples_csv(&result))?;
        out.csv("mc_summary.csv", &summary)?;
    }
    if cfg.format.json() {
        let doc = McSummary {
            site_count: result.site_count,
            temperatures: &result.temperatures,
            acceptance: &result.acceptance,
            swap_rates: result.swaps.rates(),
            rows: &rows,
        };
        out.json("mc_summary.json", "summary", &doc)?;
    }
    finish(out)?;
    if ck.is_some() {
        std::fs::remove_file(&checkpoint).with_context(|| format!("removing {}", checkpoint.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run_scan(cfg: RunConfig<ScanConfig>, dir: &Path) -> Result<ExitCode> {
    let c = &cfg.params;
    let temps = c.temperatures();
    let mut plan = RunPlan::new(c.d, c.len, model_spec(c.p, c.epsilon, 1.0 / temps[0])?);
    plan.thermalization = c.therm;
    plan.measurements = c.sweeps;
    plan.stride = c.stride;
    plan.seed = cfg.seed;
    plan.temperatures = Some(temps);
    plan.cluster_updates = c.cluster;
    plan.exchange_interval = c.exchange_interval;
    let result = montecarlo::run(plan, None).context("Monte Carlo scan")?;
    let rows = result
        .temperatures
        .iter()
        .zip(&result.samples)
        .map(|(&t, s)| analysis::summarize(t, result.site_count, s))
        .collect::<gxy_core::Result<Vec<_>>>()
        .context("summarizing samples")?;
    let points: Vec<ScanPoint> = result
        .temperatures
        .iter()
        .zip(&result.samples)
        .map(|(&t, s)| ScanPoint { temperature: t, site_count: result.site_count, energies: s.iter().map(|o| o.u).collect() })
        .collect();
    let order = OrderConfig { bins: c.bins, valley_threshold: c.valley_threshold, min_peak_separation: c.min_peak_separation };
    let verdict = analysis::classify_order(&points, &order).context("classifying transition order")?;
    let table = analysis::scan_csv(&rows);
    print!("{table}");
    println!("classification: {:?}, theta* = {:.5}", verdict.classification, verdict.theta_star);
    let mut out = Artifacts::create(dir, Header::new(&cfg))?;
    if cfg.format.csv() {
        out.csv("scan.csv", &table)?;
    }
    if cfg.format.json() {
        out.json("scan.json", "rows", &rows)?;
    }
    out.json("order_verdict.json", "verdict", &verdict)?;
    finish(out)?;
    Ok(ExitCode::SUCCESS)
}

const BOUNDS_CSV_HEADER: &str = "epsilon,beta,Z,Z_err,lower_one,lower_restricted,Z_univ,Z_univ_err,upper_contour,ratio,ratio_err,pass_lower_one,pass_lower_restricted,pass_upper_contour";

fn run_bounds(cfg: RunConfig<BoundsConfig>, dir: &Path) -> Result<ExitCode> {
    let c = &cfg.params;
    let geom = Arc::new(LatticeGeometry::build(c.d, c.len)?);
    let settings = IntegrationSettings {
        thermalization: c.therm,
        measurements: c.sweeps,
        max_segment: c.max_segment,
        nodes_per_segment: c.nodes_per_segment,
        seed: cfg.seed,
    };
    let suite = bounds::check_bounds(geom, &c.epsilon, &c.beta, settings).context("bound checks")?;
    let mut table = format!("{BOUNDS_CSV_HEADER}\n");
    for r in &suite.reports {
        table.push_str(&format!(
            "{},{},{:e},{:e},{},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{}\n",
            r.epsilon,
            r.beta,
            r.z.value,
            r.z.error,
            r.lower_one,
            r.lower_restricted,
            r.z_univ.value,
            r.z_univ.error,
            r.upper_contour,
            r.ratio.value,
            r.ratio.error,
            r.pass_lower_one,
            r.pass_lower_restricted,
            r.pass_upper_contour
        ));
    }
    print!("{table}");
    let mut out = Artifacts::create(dir, Header::new(&cfg))?;
    if cfg.format.csv() {
        out.csv("bounds.csv", &table)?;
    }
    if cfg.format.json() {
        out.json("bounds.json", "suite", &suite)?;
    }
    finish(out)?;
    Ok(ExitCode::SUCCESS)
}

fn run_table_check(cfg: RunConfig<TableCheckConfig>, dir: &Path) -> Result<ExitCode> {
    let [mf_tol, tsc_tol, mf_jump, tsc_jump] = cfg.params.effective();
    let opts = SolveOptions::default();
    let mf = MF_REFERENCE
        .iter()
        .map(|r| meanfield::solve_mf(r.p, &opts).with_context(|| format!("mean-field solve for p = {}", r.p)))
        .collect::<Result<Vec<_>>>()?;
    let ts = TSC_REFERENCE
        .iter()
        .map(|r| tsc::solve_tsc(r.p, &opts).with_context(|| format!("two-site-cluster solve for p = {}", r.p)))
        .collect::<Result<Vec<_>>>()?;
    let mut cells = tables::compare(&MF_REFERENCE, &mf, mf_tol, mf_jump, Some(MF_WAIVABLE_M_CELL));
    cells.extend(tables::compare(&TSC_REFERENCE, &ts, tsc_tol, tsc_jump, None));
    let table = tables::cells_csv(&cells);
    print!("{table}");
    let failed = cells.iter().filter(|c| c.status == CellStatus::Fail).count();
    let waived = cells.iter().filter(|c| c.status == CellStatus::Waived).count();
    println!("{} cells, {failed} failed, {waived} waived", cells.len());
    let mut out = Artifacts::create(dir, Header::new(&cfg))?;
    if cfg.format.csv() {
        out.csv("table_check.csv", &table)?;
    }
    if cfg.format.json() {
        out.json("table_check.json", "cells", &cells)?;
    }
    finish(out)?;
    if failed > 0 {
        bail!("{failed} table cells outside tolerance");
    }
    Ok(ExitCode::SUCCESS)
}
