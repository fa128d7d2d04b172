//! Seeded, checkpointable Monte Carlo runs.
//!
//! # Checkpoint format
//!
//! A checkpoint is a UTF-8 JSON document:
//!
//! ```text
//! {
//!   "format": "gxy-checkpoint",
//!   "version": 1,
//!   "plan_hash": "<sha-256 of the JSON-serialised RunPlan>",
//!   "sweep_count": <completed sweeps>,
//!   "chains": [ { "beta", "rng", "window", "theta": [..], "phi": [..],
//!                 "energy", "local_tries", "local_accepts",
//!                 "proposals", "accepts" }, .. ],
//!   "exchange_rng": { .. },
//!   "swaps": { "attempted": [..], "accepted": [..] },
//!   "samples": [ [ {"u", "m_xy", "m_p", "rho"}, .. ], .. ]
//! }
//! ```
//!
//! Floats are written with shortest round-trip formatting, and the random
//! streams carry their seed, stream id and word position, so a resumed run
//! continues bit-for-bit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{replica_exchange_step, Chain};
use crate::lattice::LatticeGeometry;
use crate::model::{ModelSpec, ObservableSample, SpinConfiguration};
use crate::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;
const CHECKPOINT_FORMAT: &str = "gxy-checkpoint";
/// Sweeps between window adjustments during thermalization.
const TUNE_INTERVAL: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    /// Independent Haar draws.
    #[default]
    Hot,
    /// All spins in plane along `phi = 0`.
    Cold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub dim: usize,
    pub len: usize,
    pub spec: ModelSpec,
    pub thermalization: u64,
    /// Sweeps after thermalization.
    pub measurements: u64,
    pub stride: u64,
    pub seed: u64,
    /// Strictly increasing temperatures; when present one chain runs per
    /// temperature and `spec.beta` is ignored.
    pub temperatures: Option<Vec<f64>>,
    /// Cluster moves after every Metropolis sweep.
    pub cluster_updates: u32,
    /// Sweeps between replica-exchange rounds; `None` disables exchange.
    pub exchange_interval: Option<u64>,
    pub checkpoint_interval: Option<u64>,
    pub start: Start,
}

impl RunPlan {
    pub fn new(dim: usize, len: usize, spec: ModelSpec) -> Self {
        Self {
            dim,
            len,
            spec,
            thermalization: 1000,
            measurements: 10_000,
            stride: 1,
            seed: 0,
            temperatures: None,
            cluster_updates: 0,
            exchange_interval: None,
            checkpoint_interval: None,
            start: Start::Hot,
        }
    }

    pub fn validate(&self) -> Result<()> {
        LatticeGeometry::build(self.dim, self.len)?;
        self.spec.validate()?;
        if self.stride < 1 {
            return Err(Error::Parameter("measurement stride must be >= 1".into()));
        }
        if self.exchange_interval == Some(0) {
            return Err(Error::Parameter("exchange interval must be >= 1".into()));
        }
        if self.checkpoint_interval == Some(0) {
            return Err(Error::Parameter("checkpoint interval must be >= 1".into()));
        }
        if let Some(temps) = &self.temperatures {
            if temps.is_empty() {
                return Err(Error::Parameter("temperature grid is empty".into()));
            }
            if temps.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
                return Err(Error::Parameter("temperatures must be positive and finite".into()));
            }
            if temps.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Parameter("temperature grid must be strictly increasing".into()));
            }
        }
        Ok(())
    }

    pub fn total_sweeps(&self) -> u64 {
        self.thermalization + self.measurements
    }

    /// Inverse temperatures of the chains, in chain order.
    pub fn betas(&self) -> Vec<f64> {
        match &self.temperatures {
            Some(t) => t.iter().map(|t| 1.0 / t).collect(),
            None => vec![self.spec.beta],
        }
    }

    /// SHA-256 of the plan's JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("plan serialises");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SwapStats {
    pub attempted: Vec<u64>,
    pub accepted: Vec<u64>,
}

impl SwapStats {
    pub fn rates(&self) -> Vec<f64> {
        self.attempted
            .iter()
            .zip(&self.accepted)
            .map(|(&a, &b)| if a == 0 { 0.0 } else { b as f64 / a as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub site_count: usize,
    /// Temperature of each sample stream.
    pub temperatures: Vec<f64>,
    pub samples: Vec<Vec<ObservableSample>>,
    pub swaps: SwapStats,
    pub acceptance: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ChainSnapshot {
    beta: f64,
    rng: ChaCha8Rng,
    window: f64,
    theta: Vec<f64>,
    phi: Vec<f64>,
    energy: f64,
    local_tries: u64,
    local_accepts: u64,
    proposals: u64,
    accepts: u64,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    plan_hash: String,
    sweep_count: u64,
    chains: Vec<ChainSnapshot>,
    exchange_rng: ChaCha8Rng,
    swaps: SwapStats,
    samples: Vec<Vec<ObservableSample>>,
}

/// A run in progress.
pub struct Runner {
    plan: RunPlan,
    chains: Vec<Chain>,
    exchange_rng: ChaCha8Rng,
    sweeps: u64,
    samples: Vec<Vec<ObservableSample>>,
    swaps: SwapStats,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl Runner {
    pub fn new(plan: RunPlan) -> Result<Self> {
        plan.validate()?;
        let geom = Arc::new(LatticeGeometry::build(plan.dim, plan.len)?);
        let chains: Vec<Chain> = plan
            .betas()
            .into_iter()
            .enumerate()
            .map(|(k, beta)| {
                let mut rng = stream_rng(plan.seed, k as u64 + 1);
                let cfg = match plan.start {
                    Start::Hot => SpinConfiguration::random(Arc::clone(&geom), &mut rng),
                    Start::Cold => SpinConfiguration::aligned(Arc::clone(&geom)),
                };
                Chain::new(plan.spec.with_beta(beta), cfg, rng)
            })
            .collect();
        let pairs = chains.len().saturating_sub(1);
        Ok(Self {
            samples: vec![Vec::new(); chains.len()],
            chains,
            exchange_rng: stream_rng(plan.seed, 0),
            sweeps: 0,
            swaps: SwapStats { attempted: vec![0; pairs], accepted: vec![0; pairs] },
            plan,
        })
    }

    /// Restores a run from a checkpoint written for the same plan.
    pub fn resume(plan: RunPlan, path: &Path) -> Result<Self> {
        let mut runner = Self::new(plan)?;
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        let ck: Checkpoint = serde_json::from_str(&text)?;
        let bad = |reason: String| Error::Checkpoint { path: path.into(), reason };
        if ck.format != CHECKPOINT_FORMAT || ck.version != CHECKPOINT_VERSION {
            return Err(bad(format!("unsupported format {} v{}", ck.format, ck.version)));
        }
        if ck.plan_hash != runner.plan.hash() {
            return Err(bad("written for a different run plan".into()));
        }
        if ck.chains.len() != runner.chains.len() || ck.samples.len() != runner.chains.len() {
            return Err(bad("chain count does not match the plan".into()));
        }
        let geom = Arc::clone(runner.chains[0].geometry());
        for (chain, snap) in runner.chains.iter_mut().zip(ck.chains) {
            let cfg = SpinConfiguration::from_angles(Arc::clone(&geom), snap.theta, snap.phi)
                .map_err(|e| bad(e.to_string()))?;
            let mut restored = Chain::new(chain.spec.with_beta(snap.beta), cfg, snap.rng);
            restored.energy = snap.energy;
            restored.window = snap.window;
            restored.sweeps = ck.sweep_count;
            restored.local_tries = snap.local_tries;
            restored.local_accepts = snap.local_accepts;
            restored.proposals = snap.proposals;
            restored.accepts = snap.accepts;
            *chain = restored;
        }
        runner.exchange_rng = ck.exchange_rng;
        runner.sweeps = ck.sweep_count;
        runner.swaps = ck.swaps;
        runner.samples = ck.samples;
        Ok(runner)
    }

    pub fn plan(&self) -> &RunPlan {
        &self.plan
    }

    pub fn sweep_count(&self) -> u64 {
        self.sweeps
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn is_complete(&self) -> bool {
        self.sweeps >= self.plan.total_sweeps()
    }

    fn step(&mut self) -> Result<()> {
        let thermalizing = self.sweeps < self.plan.thermalization;
        let clusters = self.plan.cluster_updates;
        let next = self.sweeps + 1;
        self.chains.par_iter_mut().for_each(|c| {
            c.metropolis_sweep();
            for _ in 0..clusters {
                c.cluster_update_phi();
            }
            if thermalizing && next % TUNE_INTERVAL == 0 {
                c.tune_window();
            }
        });
        self.sweeps = next;
        let exchange = self.plan.exchange_interval.filter(|&e| self.chains.len() > 1 && next % e == 0);
        if let Some(every) = exchange {
            let offset = ((next / every) % 2) as usize;
            for (pair, accepted) in replica_exchange_step(&mut self.chains, offset, &mut self.exchange_rng)? {
                self.swaps.attempted[pair] += 1;
                self.swaps.accepted[pair] += accepted as u64;
            }
        }
        if next > self.plan.thermalization && (next - self.plan.thermalization) % self.plan.stride == 0 {
            for (chain, out) in self.chains.iter().zip(self.samples.iter_mut()) {
                out.push(chain.measure());
            }
        }
        Ok(())
    }

    /// Runs until `target` sweeps have completed (capped at the plan's
    /// total), writing a checkpoint to `checkpoint` every configured
    /// interval and once more on return.
    pub fn advance(&mut self, target: u64, checkpoint: Option<&Path>) -> Result<()> {
        let target = target.min(self.plan.total_sweeps());
        while self.sweeps < target {
            self.step()?;
            if let (Some(path), Some(every)) = (checkpoint, self.plan.checkpoint_interval) {
                if self.sweeps % every == 0 {
                    self.save_checkpoint(path)?;
                }
            }
        }
        if let Some(path) = checkpoint {
            self.save_checkpoint(path)?;
        }
        Ok(())
    }

    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        let ck = Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            plan_hash: self.plan.hash(),
            sweep_count: self.sweeps,
            chains: self
                .chains
                .iter()
                .map(|c| ChainSnapshot {
                    beta: c.spec.beta,
                    rng: c.rng.clone(),
                    window: c.window,
                    theta: c.cfg.theta.clone(),
                    phi: c.cfg.phi.clone(),
                    energy: c.energy,
                    local_tries: c.local_tries,
                    local_accepts: c.local_accepts,
                    proposals: c.proposals,
                    accepts: c.accepts,
                })
                .collect(),
            exchange_rng: self.exchange_rng.clone(),
            swaps: self.swaps.clone(),
            samples: self.samples.clone(),
        };
        let bytes = serde_json::to_vec(&ck)?;
        write_atomic(path, &bytes)
    }

    pub fn finish(self) -> RunOutput {
        RunOutput {
            site_count: self.chains[0].config().site_count(),
            temperatures: self.chains.iter().map(|c| 1.0 / c.beta()).collect(),
            acceptance: self.chains.iter().map(Chain::acceptance).collect(),
            samples: self.samples,
            swaps: self.swaps,
        }
    }
}

/// Writes through a sibling temporary file and renames it into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io { path: path.into(), source };
    let mut tmp = PathBuf::from(path);
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    tmp.set_file_name(format!(".{name}.tmp"));
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Executes a plan from scratch, or from `checkpoint` if that file exists.
pub fn run(plan: RunPlan, checkpoint: Option<&Path>) -> Result<RunOutput> {
    let mut runner = match checkpoint {
        Some(path) if path.exists() => Runner::resume(plan, path)?,
        _ => Runner::new(plan)?,
    };
    let total = runner.plan.total_sweeps();
    runner.advance(total, checkpoint)?;
    Ok(runner.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan() -> RunPlan {
        let mut plan = RunPlan::new(2, 4, ModelSpec::generalized(2, 1.2).unwrap());
        plan.thermalization = 100;
        plan.measurements = 300;
        plan.stride = 2;
        plan.seed = 17;
        plan.cluster_updates = 1;
        plan
    }

    #[test]
    fn sample_count_and_determinism() {
        let a = run(plan(), None).unwrap();
        let b = run(plan(), None).unwrap();
        assert_eq!(a.samples[0].len(), 150);
        assert_eq!(a, b);
        let mut other = plan();
        other.seed = 18;
        assert_ne!(run(other, None).unwrap().samples, a.samples);
    }

    #[test]
    fn invalid_plans_are_rejected() {
        let mut p = plan();
        p.stride = 0;
        assert!(Runner::new(p).is_err());
        let mut p = plan();
        p.temperatures = Some(vec![1.0, 0.9]);
        assert!(Runner::new(p).is_err());
        let mut p = plan();
        p.dim = 4;
        assert!(Runner::new(p).is_err());
    }

    #[test]
    fn plan_hash_tracks_content() {
        let mut p = plan();
        let h = p.hash();
        assert_eq!(h.len(), 64);
        p.seed += 1;
        assert_ne!(h, p.hash());
    }
}
