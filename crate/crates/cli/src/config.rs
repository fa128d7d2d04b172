//! Run configuration: TOML file sections merged with command-line flags.
//!
//! A config file has top-level `seed` and `format` keys and one table per
//! subcommand (`[mf]`, `[tsc]`, `[mc]`, `[scan]`, `[bounds]`,
//! `[table_check]`). Flags override file values key by key.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

pub const CONFIG_SCHEMA: &str = "gxy-config/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    #[default]
    Hot,
    Cold,
}

/// Subcommand parameters with their keys, defaults and range checks.
pub trait Section: Serialize + DeserializeOwned + Default {
    const NAME: &'static str;
    const KEYS: &'static [&'static str];
    fn validate(&self, errors: &mut Vec<String>);
}

fn default_p_list() -> Vec<u32> {
    vec![5, 6, 7, 8, 9, 10, 11, 12, 16, 20]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfConfig {
    pub p: Vec<u32>,
    pub theta_min: f64,
    pub theta_max: f64,
    pub tolerance: f64,
    pub grid: usize,
}

impl Default for MfConfig {
    fn default() -> Self {
        Self { p: default_p_list(), theta_min: 0.3, theta_max: 3.0, tolerance: 1e-9, grid: 80 }
    }
}

fn check_solver(p: &[u32], lo: f64, hi: f64, tol: f64, grid: usize, errors: &mut Vec<String>, name: &str) {
    if p.is_empty() {
        errors.push(format!("{name}.p: at least one exponent is required"));
    }
    if p.contains(&0) {
        errors.push(format!("{name}.p: exponents must be >= 1"));
    }
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        errors.push(format!("{name}.theta_min/theta_max: need 0 < theta_min < theta_max, got {lo}, {hi}"));
    }
    if !(tol > 0.0) {
        errors.push(format!("{name}.tolerance: must be positive, got {tol}"));
    }
    if grid < 4 {
        errors.push(format!("{name}.grid: must be >= 4, got {grid}"));
    }
}

impl Section for MfConfig {
    const NAME: &'static str = "mf";
    const KEYS: &'static [&'static str] = &["p", "theta_min", "theta_max", "tolerance", "grid"];
    fn validate(&self, errors: &mut Vec<String>) {
        check_solver(&self.p, self.theta_min, self.theta_max, self.tolerance, self.grid, errors, Self::NAME);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TscConfig {
    pub p: Vec<u32>,
    pub theta_min: f64,
    pub theta_max: f64,
    pub tolerance: f64,
    pub grid: usize,
    pub nodes: usize,
}

impl Default for TscConfig {
    fn default() -> Self {
        Self {
            p: default_p_list(),
            theta_min: 0.3,
            theta_max: 3.0,
            tolerance: 1e-9,
            grid: 80,
            nodes: gxy_core::tsc::DEFAULT_NODES,
        }
    }
}

impl Section for TscConfig {
    const NAME: &'static str = "tsc";
    const KEYS: &'static [&'static str] = &["p", "theta_min", "theta_max", "tolerance", "grid", "nodes"];
    fn validate(&self, errors: &mut Vec<String>) {
        check_solver(&self.p, self.theta_min, self.theta_max, self.tolerance, self.grid, errors, Self::NAME);
        if self.nodes < 8 {
            errors.push(format!("tsc.nodes: must be >= 8, got {}", self.nodes));
        }
    }
}

/// Model choice shared by `mc` and `scan`.
fn check_model(p: Option<u32>, epsilon: Option<f64>, errors: &mut Vec<String>, name: &str) {
    match (p, epsilon) {
        (Some(_), Some(_)) => errors.push(format!("{name}: p and epsilon are mutually exclusive")),
        (Some(0), None) => errors.push(format!("{name}.p: must be >= 1")),
        (None, Some(e)) if !(e > 0.0 && e <= std::f64::consts::FRAC_PI_2) => {
            errors.push(format!("{name}.epsilon: must be in (0, pi/2], got {e}"))
        }
        _ => {}
    }
}

fn check_lattice(d: usize, len: usize, errors: &mut Vec<String>, name: &str) {
    if d != 2 && d != 3 {
        errors.push(format!("{name}.d: must be 2 or 3, got {d}"));
    }
    if len < 2 {
        errors.push(format!("{name}.len: must be >= 2, got {len}"));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub d: usize,
    pub len: usize,
    pub p: Option<u32>,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub theta: Option<f64>,
    /// Hottest temperature of the replica ladder.
    pub theta_max: Option<f64>,
    pub replicas: usize,
    pub sweeps: u64,
    pub therm: u64,
    pub stride: u64,
    pub cluster: u32,
    pub exchange_interval: Option<u64>,
    pub checkpoint_interval: Option<u64>,
    pub start: StartKind,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            d: 3,
            len: 8,
            p: None,
            epsilon: None,
            beta: None,
            theta: None,
            theta_max: None,
            replicas: 1,
            sweeps: 10_000,
            therm: 1_000,
            stride: 1,
            cluster: 1,
            exchange_interval: None,
            checkpoint_interval: None,
            start: StartKind::Hot,
        }
    }
}

impl McConfig {
    /// Temperature of the coldest chain; `theta = 1` when neither `beta`
    /// nor `theta` is set.
    pub fn base_temperature(&self) -> f64 {
        match (self.beta, self.theta) {
            (Some(b), _) => 1.0 / b,
            (None, Some(t)) => t,
            (None, None) => 1.0,
        }
    }

    /// Geometric ladder from the base temperature to `theta_max`.
    pub fn temperatures(&self) -> Option<Vec<f64>> {
        if self.replicas < 2 {
            return None;
        }
        let (lo, hi) = (self.base_temperature(), self.theta_max?);
        let r = (hi / lo).powf(1.0 / (self.replicas - 1) as f64);
        Some((0..self.replicas).map(|k| if k + 1 == self.replicas { hi } else { lo * r.powi(k as i32) }).collect())
    }
}

impl Section for McConfig {
    const NAME: &'static str = "mc";
    const KEYS: &'static [&'static str] = &[
        "d",
        "len",
        "p",
        "epsilon",
        "beta",
        "theta",
        "theta_max",
        "replicas",
        "sweeps",
        "therm",
        "stride",
        "cluster",
        "exchange_interval",
        "checkpoint_interval",
        "start",
    ];
    fn validate(&self, errors: &mut Vec<String>) {
        check_lattice(self.d, self.len, errors, Self::NAME);
        check_model(self.p, self.epsilon, errors, Self::NAME);
        match (self.beta, self.theta) {
            (Some(_), Some(_)) => errors.push("mc: beta and theta are mutually exclusive".into()),
            (Some(b), None) if !(b > 0.0 && b.is_finite()) => {
                errors.push(format!("mc.beta: must be positive and finite, got {b}"))
            }
            (None, Some(t)) if !(t > 0.0 && t.is_finite()) => {
                errors.push(format!("mc.theta: must be positive and finite, got {t}"))
            }
            _ => {}
        }
        if self.replicas == 0 {
            errors.push("mc.replicas: must be >= 1".into());
        }
        if self.replicas > 1 {
            match self.theta_max {
                None => errors.push("mc.theta_max: required when replicas > 1".into()),
                Some(t) if !(t > self.base_temperature() && t.is_finite()) => {
                    errors.push(format!("mc.theta_max: must exceed the base temperature, got {t}"))
                }
                _ => {}
            }
        }
        if self.sweeps < 100 {
            errors.push(format!("mc.sweeps: need >= 100 measurement sweeps, got {}", self.sweeps));
        }
        if self.stride == 0 {
            errors.push("mc.stride: must be >= 1".into());
        }
        if self.exchange_interval == Some(0) {
            errors.push("mc.exchange_interval: must be >= 1".into());
        }
        if self.checkpoint_interval == Some(0) {
            errors.push("mc.checkpoint_interval: must be >= 1".into());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub d: usize,
    pub len: usize,
    pub p: Option<u32>,
    pub epsilon: Option<f64>,
    pub theta_min: f64,
    pub theta_max: f64,
    pub points: usize,
    pub sweeps: u64,
    pub therm: u64,
    pub stride: u64,
    pub cluster: u32,
    pub exchange_interval: Option<u64>,
    pub bins: usize,
    pub valley_threshold: f64,
    pub min_peak_separation: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        let order = gxy_core::analysis::OrderConfig::default();
        Self {
            d: 3,
            len: 8,
            p: None,
            epsilon: None,
            theta_min: 0.7,
            theta_max: 0.9,
            points: 9,
            sweeps: 10_000,
            therm: 1_000,
            stride: 1,
            cluster: 1,
            exchange_interval: None,
            bins: order.bins,
            valley_threshold: order.valley_threshold,
            min_peak_separation: order.min_peak_separation,
        }
    }
}

impl ScanConfig {
    /// Evenly spaced grid from `theta_min` to `theta_max`.
    pub fn temperatures(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.theta_min];
        }
        let step = (self.theta_max - self.theta_min) / (self.points - 1) as f64;
        (0..self.points).map(|k| if k + 1 == self.points { self.theta_max } else { self.theta_min + step * k as f64 }).collect()
    }
}

impl Section for ScanConfig {
    const NAME: &'static str = "scan";
    const KEYS: &'static [&'static str] = &[
        "d",
        "len",
        "p",
        "epsilon",
        "theta_min",
        "theta_max",
        "points",
        "sweeps",
        "therm",
        "stride",
        "cluster",
        "exchange_interval",
        "bins",
        "valley_threshold",
        "min_peak_separation",
    ];
    fn validate(&self, errors: &mut Vec<String>) {
        check_lattice(self.d, self.len, errors, Self::NAME);
        check_model(self.p, self.epsilon, errors, Self::NAME);
        if !(self.theta_min > 0.0 && self.theta_max.is_finite()) {
            errors.push(format!("scan.theta_min/theta_max: need positive finite temperatures, got {}, {}", self.theta_min, self.theta_max));
        }
        if self.points == 0 {
            errors.push("scan.points: must be >= 1".into());
        } else if self.points > 1 && !(self.theta_max > self.theta_min) {
            errors.push("scan.theta_max: must exceed theta_min when points > 1".into());
        }
        if self.sweeps < 1000 {
            errors.push(format!("scan.sweeps: need >= 1000 measurement sweeps for histograms, got {}", self.sweeps));
        }
        if self.stride == 0 {
            errors.push("scan.stride: must be >= 1".into());
        }
        if self.exchange_interval == Some(0) {
            errors.push("scan.exchange_interval: must be >= 1".into());
        }
        if self.bins < 2 {
            errors.push(format!("scan.bins: must be >= 2, got {}", self.bins));
        }
        if !(self.valley_threshold > 0.0 && self.valley_threshold < 1.0) {
            errors.push(format!("scan.valley_threshold: must be in (0, 1), got {}", self.valley_threshold));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub d: usize,
    pub len: usize,
    pub epsilon: Vec<f64>,
    pub beta: Vec<f64>,
    pub therm: u64,
    pub sweeps: u64,
    pub max_segment: f64,
    pub nodes_per_segment: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        let s = gxy_core::bounds::IntegrationSettings::default();
        Self {
            d: 2,
            len: 4,
            epsilon: vec![0.05, 0.1, 0.2],
            beta: vec![0.5, 1.0, 2.0, 3.0],
            therm: s.thermalization,
            sweeps: s.measurements,
            max_segment: s.max_segment,
            nodes_per_segment: s.nodes_per_segment,
        }
    }
}

impl Section for BoundsConfig {
    const NAME: &'static str = "bounds";
    const KEYS: &'static [&'static str] =
        &["d", "len", "epsilon", "beta", "therm", "sweeps", "max_segment", "nodes_per_segment"];
    fn validate(&self, errors: &mut Vec<String>) {
        if self.d != 2 {
            errors.push(format!("bounds.d: only d = 2 is supported, got {}", self.d));
        }
        if self.len != 4 {
            errors.push(format!("bounds.len: only L = 4 is enumerable, got {}", self.len));
        }
        if self.epsilon.is_empty() || self.epsilon.iter().any(|e| !(*e > 0.0 && *e <= std::f64::consts::FRAC_PI_2)) {
            errors.push("bounds.epsilon: need a non-empty list in (0, pi/2]".into());
        }
        if self.beta.is_empty() || self.beta.iter().any(|b| !(*b >= 0.0 && b.is_finite())) {
            errors.push("bounds.beta: need a non-empty list of finite values >= 0".into());
        }
        if self.sweeps < 100 {
            errors.push(format!("bounds.sweeps: need >= 100, got {}", self.sweeps));
        }
        if !(self.max_segment > 0.0) {
            errors.push(format!("bounds.max_segment: must be positive, got {}", self.max_segment));
        }
        if self.nodes_per_segment == 0 {
            errors.push("bounds.nodes_per_segment: must be >= 1".into());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableCheckConfig {
    /// Relative tolerance on the MF transition temperatures.
    pub mf_tolerance: f64,
    pub tsc_tolerance: f64,
    /// Relative tolerance on MF jump columns.
    pub mf_jump_tolerance: f64,
    pub tsc_jump_tolerance: f64,
    /// Sets all four tolerances at once.
    pub tolerance: Option<f64>,
}

impl Default for TableCheckConfig {
    fn default() -> Self {
        Self { mf_tolerance: 1e-3, tsc_tolerance: 0.02, mf_jump_tolerance: 0.02, tsc_jump_tolerance: 0.05, tolerance: None }
    }
}

impl TableCheckConfig {
    /// `(mf, tsc, mf_jump, tsc_jump)` after applying `tolerance`.
    pub fn effective(&self) -> [f64; 4] {
        match self.tolerance {
            Some(t) => [t; 4],
            None => [self.mf_tolerance, self.tsc_tolerance, self.mf_jump_tolerance, self.tsc_jump_tolerance],
        }
    }
}

impl Section for TableCheckConfig {
    const NAME: &'static str = "table_check";
    const KEYS: &'static [&'static str] =
        &["mf_tolerance", "tsc_tolerance", "mf_jump_tolerance", "tsc_jump_tolerance", "tolerance"];
    fn validate(&self, errors: &mut Vec<String>) {
        for (k, v) in Self::KEYS.iter().zip(self.effective()) {
            if !(v >= 0.0 && v.is_finite()) {
                errors.push(format!("table_check.{k}: must be finite and >= 0, got {v}"));
            }
        }
    }
}

/// Top-level keys of a config file.
const FILE_KEYS: &[&str] = &["seed", "format", "mf", "tsc", "mc", "scan", "bounds", "table_check"];

/// Fully resolved configuration; its hash identifies a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig<S> {
    pub schema: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub format: Format,
    pub params: S,
    /// Keys set on the command line, as `section.key`.
    pub flag_keys: Vec<String>,
    /// Subset of `flag_keys` that replaced a config-file value.
    pub overrides: Vec<String>,
}

impl<S: Serialize> RunConfig<S> {
    /// SHA-256 of the parameters that determine the outputs.
    pub fn hash(&self) -> String {
        let identity = serde_json::json!({
            "schema": self.schema,
            "command": self.command,
            "seed": self.seed,
            "params": &self.params,
        });
        let bytes = serde_json::to_vec(&identity).expect("config serialises");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Global options as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct GlobalFlags {
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

/// Reads a config file into its top-level table.
pub fn read_file(path: &Path) -> Result<Table, Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| vec![format!("{}: {e}", path.display())])?;
    text.parse::<Table>().map_err(|e| vec![format!("{}: {e}", path.display())])
}

fn decode<T: DeserializeOwned>(value: Value, what: &str, errors: &mut Vec<String>) -> Option<T> {
    match value.try_into() {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(format!("{what}: {}", e.to_string().trim()));
            None
        }
    }
}

/// Merges file and flag values for subcommand `S` and validates the result,
/// collecting every error found.
pub fn resolve<S: Section>(
    file: Option<Table>,
    flags: Table,
    global: GlobalFlags,
) -> Result<RunConfig<S>, Vec<String>> {
    let mut errors = Vec::new();
    let mut file = file.unwrap_or_default();
    for key in file.keys() {
        if !FILE_KEYS.contains(&key.as_str()) {
            errors.push(format!("config: unknown key `{key}`"));
        }
    }
    let mut section = match file.remove(S::NAME) {
        Some(Value::Table(t)) => t,
        Some(_) => {
            errors.push(format!("config: `{}` must be a table", S::NAME));
            Table::new()
        }
        None => Table::new(),
    };
    for (key, value) in &file {
        if FILE_KEYS[2..].contains(&key.as_str()) && !value.is_table() {
            errors.push(format!("config: `{key}` must be a table"));
        }
    }
    for key in section.keys() {
        if !S::KEYS.contains(&key.as_str()) {
            errors.push(format!("{}: unknown key `{key}`", S::NAME));
        }
    }
    let mut flag_keys = Vec::new();
    let mut overrides = Vec::new();
    for (key, value) in flags {
        let name = format!("{}.{key}", S::NAME);
        if section.insert(key, value).is_some() {
            overrides.push(name.clone());
        }
        flag_keys.push(name);
    }
    // decode key by key so that every type error is reported
    let mut decodable = Table::new();
    for (key, value) in section {
        if !S::KEYS.contains(&key.as_str()) {
            continue;
        }
        let mut single = Table::new();
        single.insert(key.clone(), value.clone());
        if decode::<S>(Value::Table(single), &format!("{}.{key}", S::NAME), &mut errors).is_some() {
            decodable.insert(key, value);
        }
    }
    let params: S = decode(Value::Table(decodable), S::NAME, &mut errors).unwrap_or_default();
    params.validate(&mut errors);

    let file_seed = file.contains_key("seed");
    let mut seed = match file.remove("seed") {
        None => 0,
        Some(Value::Integer(s)) if s >= 0 => s as u64,
        Some(v) => {
            errors.push(format!("config.seed: must be a non-negative integer, got {v}"));
            0
        }
    };
    if let Some(s) = global.seed {
        if file_seed {
            overrides.push("seed".into());
        }
        flag_keys.push("seed".into());
        seed = s;
    }
    let file_format = file.contains_key("format");
    let mut format = match file.remove("format") {
        None => Format::default(),
        Some(v) => decode::<FormatOnly>(Value::Table(Table::from_iter([("format".to_string(), v)])), "config.format", &mut errors)
            .map(|f| f.format)
            .unwrap_or_default(),
    };
    if let Some(f) = global.format {
        if file_format {
            overrides.push("format".into());
        }
        flag_keys.push("format".into());
        format = f;
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(RunConfig { schema: CONFIG_SCHEMA, command: S::NAME, seed, format, params, flag_keys, overrides })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormatOnly {
    format: Format,
}

/// Converts a serializable flag struct into a table, dropping unset flags.
pub fn flag_table<T: Serialize>(flags: &T) -> Table {
    Table::try_from(flags).expect("flags serialise to a table")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> Table {
        text.parse().unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = resolve::<MfConfig>(None, table("p = [5]"), GlobalFlags::default()).unwrap();
        assert_eq!(cfg.params.p, vec![5]);
        assert_eq!(cfg.params.grid, 80);
        assert_eq!(cfg.flag_keys, vec!["mf.p"]);
    }

    #[test]
    fn flag_wins_and_is_recorded() {
        let file = table("seed = 3\n[mc]\nsweeps = 500\nd = 2\n");
        let cfg = resolve::<McConfig>(Some(file), table("sweeps = 900"), GlobalFlags::default()).unwrap();
        assert_eq!(cfg.params.sweeps, 900);
        assert_eq!(cfg.params.d, 2);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.overrides, vec!["mc.sweeps"]);
    }

    #[test]
    fn all_errors_reported() {
        let file = table("colour = 1\n[mc]\nd = 4\nbogus = 2\nsweeps = \"many\"\np = 2\nepsilon = 0.1\n");
        let errs = resolve::<McConfig>(Some(file), Table::new(), GlobalFlags::default()).unwrap_err();
        let joined = errs.join("\n");
        for needle in ["colour", "bogus", "mc.sweeps", "mc.d", "mutually exclusive"] {
            assert!(joined.contains(needle), "missing {needle} in {joined}");
        }
    }

    #[test]
    fn hash_ignores_flag_bookkeeping() {
        let a = resolve::<MfConfig>(None, table("p = [5]"), GlobalFlags::default()).unwrap();
        let b = resolve::<MfConfig>(Some(table("[mf]\np = [5]")), Table::new(), GlobalFlags::default()).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = resolve::<MfConfig>(None, table("p = [6]"), GlobalFlags::default()).unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn replica_ladder() {
        let cfg = McConfig { theta: Some(1.0), theta_max: Some(4.0), replicas: 3, ..Default::default() };
        let t = cfg.temperatures().unwrap();
        assert!((t[1] - 2.0).abs() < 1e-12);
        assert_eq!(t[2], 4.0);
    }
}
