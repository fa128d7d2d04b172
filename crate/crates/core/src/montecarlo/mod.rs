//! Markov-chain sampling of `exp(-beta H)` against the product Haar measure.
//!
//! A [`Chain`] owns one configuration together with per-site caches of the
//! weight `s_i` and `(cos phi_i, sin phi_i)`, its own random stream and the
//! running total energy. Sweeps visit the colour classes of the geometry in
//! order (the checkerboard for even hypercubic lattices), so the sites of one
//! class never share a bond.

mod run;

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use run::{run, RunOutput, RunPlan, Runner, Start, SwapStats, CHECKPOINT_VERSION};

use crate::lattice::LatticeGeometry;
use crate::model::{self, haar_sample, wrap_phi, KahanSum, ModelSpec, ObservableSample, SpinConfiguration};
use crate::{Error, Result};

/// Target acceptance of the local window moves while tuning.
pub const TARGET_ACCEPTANCE: f64 = 0.4;
/// Sweeps between full energy recomputations.
pub const RESYNC_INTERVAL: u64 = 1000;

#[derive(Debug, Clone)]
pub struct Chain {
    spec: ModelSpec,
    cfg: SpinConfiguration,
    weight: Vec<f64>,
    cos_phi: Vec<f64>,
    sin_phi: Vec<f64>,
    rng: ChaCha8Rng,
    energy: f64,
    sweeps: u64,
    window: f64,
    freeze_theta: bool,
    colors: Arc<Vec<Vec<usize>>>,
    local_tries: u64,
    local_accepts: u64,
    proposals: u64,
    accepts: u64,
    cluster_buf: Vec<bool>,
    stack: Vec<usize>,
}

impl Chain {
    pub fn new(spec: ModelSpec, cfg: SpinConfiguration, rng: ChaCha8Rng) -> Self {
        let colors = Arc::new(cfg.geometry().color_classes());
        let n = cfg.site_count();
        let mut chain = Self {
            spec,
            cfg,
            weight: vec![0.0; n],
            cos_phi: vec![0.0; n],
            sin_phi: vec![0.0; n],
            rng,
            energy: 0.0,
            sweeps: 0,
            window: 0.5,
            freeze_theta: false,
            colors,
            local_tries: 0,
            local_accepts: 0,
            proposals: 0,
            accepts: 0,
            cluster_buf: vec![false; n],
            stack: Vec::new(),
        };
        chain.rebuild_caches();
        chain.energy = model::energy(&chain.spec, &chain.cfg);
        chain
    }

    fn rebuild_caches(&mut self) {
        for i in 0..self.cfg.site_count() {
            self.weight[i] = self.spec.variant.weight(self.cfg.theta[i]);
            let (s, c) = self.cfg.phi[i].sin_cos();
            self.sin_phi[i] = s;
            self.cos_phi[i] = c;
        }
    }

    /// Keeps every `theta` fixed; only azimuthal moves are proposed.
    pub fn with_frozen_theta(mut self, freeze: bool) -> Self {
        self.freeze_theta = freeze;
        self
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn beta(&self) -> f64 {
        self.spec.beta
    }

    pub fn config(&self) -> &SpinConfiguration {
        &self.cfg
    }

    pub fn geometry(&self) -> &Arc<LatticeGeometry> {
        self.cfg.geometry()
    }

    /// Running total energy.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn sweep_count(&self) -> u64 {
        self.sweeps
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn set_window(&mut self, window: f64) {
        self.window = window.clamp(1e-4, 1.0);
    }

    /// Fraction of accepted single-site proposals since construction.
    pub fn acceptance(&self) -> f64 {
        if self.proposals == 0 {
            return 0.0;
        }
        self.accepts as f64 / self.proposals as f64
    }

    pub fn measure(&self) -> ObservableSample {
        let mut obs = model::measure(&self.spec, &self.cfg);
        obs.u = self.energy / self.cfg.site_count() as f64;
        obs
    }

    /// Replaces the running energy with a full recomputation and returns the
    /// drift that was removed.
    pub fn resync_energy(&mut self) -> f64 {
        let exact = model::energy(&self.spec, &self.cfg);
        let drift = self.energy - exact;
        self.energy = exact;
        drift
    }

    #[inline]
    fn field(&self, site: usize) -> (f64, f64) {
        let (mut hx, mut hy) = (0.0, 0.0);
        for &j in self.cfg.geometry().neighbors(site) {
            let s = self.weight[j];
            if s != 0.0 {
                hx += s * self.cos_phi[j];
                hy += s * self.sin_phi[j];
            }
        }
        (hx, hy)
    }

    fn propose(&mut self, site: usize) -> (f64, f64, bool) {
        let theta = self.cfg.theta[site];
        let phi = self.cfg.phi[site];
        if self.rng.gen::<bool>() {
            let (t, f) = haar_sample(&mut self.rng);
            return (if self.freeze_theta { theta } else { t }, f, false);
        }
        let f = wrap_phi(phi + self.window * PI * (2.0 * self.rng.gen::<f64>() - 1.0));
        if self.freeze_theta {
            return (theta, f, true);
        }
        // symmetric reflected random walk in cos(theta); uniform in
        // (cos theta, phi) is exactly the Haar measure
        let mut c = theta.cos() + self.window * (2.0 * self.rng.gen::<f64>() - 1.0);
        if c > 1.0 {
            c = 2.0 - c;
        } else if c < -1.0 {
            c = -2.0 - c;
        }
        (c.clamp(-1.0, 1.0).acos(), f, true)
    }

    /// One Metropolis proposal at `site`; returns whether it was accepted.
    pub fn update_site(&mut self, site: usize) -> bool {
        let (t, f, local) = self.propose(site);
        let (hx, hy) = self.field(site);
        let old = self.weight[site] * (self.cos_phi[site] * hx + self.sin_phi[site] * hy);
        let s_new = self.spec.variant.weight(t);
        let (sf, cf) = f.sin_cos();
        let delta = -(s_new * (cf * hx + sf * hy) - old);
        let beta = self.spec.beta;
        let accept = beta == 0.0 || delta <= 0.0 || self.rng.gen::<f64>() < (-beta * delta).exp();
        self.proposals += 1;
        if local {
            self.local_tries += 1;
        }
        if accept {
            self.accepts += 1;
            if local {
                self.local_accepts += 1;
            }
            self.cfg.theta[site] = t;
            self.cfg.phi[site] = f;
            self.weight[site] = s_new;
            self.cos_phi[site] = cf;
            self.sin_phi[site] = sf;
            self.energy += delta;
        }
        accept
    }

    /// One proposal per site, colour class by colour class.
    pub fn metropolis_sweep(&mut self) {
        let colors = Arc::clone(&self.colors);
        for class in colors.iter() {
            for &site in class {
                self.update_site(site);
            }
        }
        self.sweeps += 1;
        if self.sweeps % RESYNC_INTERVAL == 0 {
            self.resync_energy();
        }
    }

    /// Rescales the local window toward [`TARGET_ACCEPTANCE`] using the
    /// local-move statistics gathered since the previous call.
    pub fn tune_window(&mut self) {
        if self.local_tries >= 20 {
            let rate = self.local_accepts as f64 / self.local_tries as f64;
            let factor = (rate / TARGET_ACCEPTANCE).clamp(0.5, 2.0);
            self.set_window(self.window * factor);
        }
        self.local_tries = 0;
        self.local_accepts = 0;
    }

    /// Embedded-rotor (Wolff) move on the azimuthal angles.
    ///
    /// A random in-plane axis `r` is drawn; with `q_i = s_i (cos phi_i,
    /// sin phi_i) . r`, bonds join the cluster with probability
    /// `1 - exp(min(0, -2 beta q_i q_j))`, and the cluster's in-plane
    /// components along `r` are reversed. Returns the cluster size.
    pub fn cluster_update_phi(&mut self) -> usize {
        let n = self.cfg.site_count();
        if n == 0 {
            return 0;
        }
        let alpha = self.rng.gen::<f64>() * TAU;
        let (sa, ca) = alpha.sin_cos();
        let beta = self.spec.beta;
        let proj = |c: &Self, i: usize| c.weight[i] * (c.cos_phi[i] * ca + c.sin_phi[i] * sa);
        let seed = self.rng.gen_range(0..n);
        let mut members = Vec::new();
        self.cluster_buf[seed] = true;
        self.stack.push(seed);
        let geom = Arc::clone(self.cfg.geometry());
        while let Some(i) = self.stack.pop() {
            members.push(i);
            let qi = proj(self, i);
            for &j in geom.neighbors(i) {
                if self.cluster_buf[j] {
                    continue;
                }
                let x = 2.0 * beta * qi * proj(self, j);
                if x > 0.0 && self.rng.gen::<f64>() < -(-x).exp_m1() {
                    self.cluster_buf[j] = true;
                    self.stack.push(j);
                }
            }
        }
        let mut delta = KahanSum::default();
        for &i in &members {
            let u = self.cos_phi[i] * ca + self.sin_phi[i] * sa;
            let (nc, ns) = (self.cos_phi[i] - 2.0 * u * ca, self.sin_phi[i] - 2.0 * u * sa);
            for &j in geom.neighbors(i) {
                if !self.cluster_buf[j] && self.weight[j] != 0.0 {
                    let old = self.cos_phi[i] * self.cos_phi[j] + self.sin_phi[i] * self.sin_phi[j];
                    let new = nc * self.cos_phi[j] + ns * self.sin_phi[j];
                    delta.add(-self.weight[i] * self.weight[j] * (new - old));
                }
            }
        }
        for &i in &members {
            let f = wrap_phi(PI + 2.0 * alpha - self.cfg.phi[i]);
            self.cfg.phi[i] = f;
            let (s, c) = f.sin_cos();
            self.sin_phi[i] = s;
            self.cos_phi[i] = c;
            self.cluster_buf[i] = false;
        }
        self.energy += delta.value();
        members.len()
    }

    /// Exchanges configurations (and their caches) with `other`, leaving
    /// each chain's temperature and random stream in place.
    fn swap_configuration(&mut self, other: &mut Chain) {
        std::mem::swap(&mut self.cfg.theta, &mut other.cfg.theta);
        std::mem::swap(&mut self.cfg.phi, &mut other.cfg.phi);
        std::mem::swap(&mut self.weight, &mut other.weight);
        std::mem::swap(&mut self.cos_phi, &mut other.cos_phi);
        std::mem::swap(&mut self.sin_phi, &mut other.sin_phi);
        std::mem::swap(&mut self.energy, &mut other.energy);
    }
}

/// Attempts swaps between neighbouring chains of a temperature ladder,
/// starting with pair `(offset, offset + 1)` and stepping by two. Each swap
/// is accepted with `min(1, exp((beta_i - beta_j)(E_i - E_j)))`. Returns the
/// accepted flag for every attempted pair, keyed by the lower index.
pub fn replica_exchange_step<R: Rng + ?Sized>(
    chains: &mut [Chain],
    offset: usize,
    rng: &mut R,
) -> Result<Vec<(usize, bool)>> {
    for w in chains.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.geometry() != b.geometry() {
            return Err(Error::Precondition("replicas live on different geometries".into()));
        }
        if a.spec.variant != b.spec.variant {
            return Err(Error::Precondition("replicas use different model variants".into()));
        }
    }
    let mut out = Vec::new();
    let mut i = offset;
    while i + 1 < chains.len() {
        let (lo, hi) = chains.split_at_mut(i + 1);
        let (a, b) = (&mut lo[i], &mut hi[0]);
        let x = (a.beta() - b.beta()) * (a.energy - b.energy);
        let accept = x >= 0.0 || rng.gen::<f64>() < x.exp();
        if accept {
            a.swap_configuration(b);
        }
        out.push((i, accept));
        i += 2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::model::Variant;

    fn chain(geom: LatticeGeometry, spec: ModelSpec, seed: u64) -> Chain {
        let geom = Arc::new(geom);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = SpinConfiguration::random(geom, &mut rng);
        Chain::new(spec, cfg, rng)
    }

    #[test]
    fn infinite_temperature_accepts_everything() {
        let spec = ModelSpec::generalized(4, 0.0).unwrap();
        let mut c = chain(LatticeGeometry::build(2, 4).unwrap(), spec, 3);
        for _ in 0..50 {
            c.metropolis_sweep();
        }
        assert_eq!(c.acceptance(), 1.0);
    }

    #[test]
    fn running_energy_tracks_full_recompute() {
        for spec in [
            ModelSpec::generalized(3, 1.3).unwrap(),
            ModelSpec::square_ditch(0.3, 2.0).unwrap(),
        ] {
            let mut c = chain(LatticeGeometry::build(2, 8).unwrap(), spec, 5);
            for sweep in 0..300 {
                c.metropolis_sweep();
                if sweep % 3 == 0 {
                    c.cluster_update_phi();
                }
                let exact = model::energy(&spec, c.config());
                assert!((c.energy() - exact).abs() < 1e-10 * (sweep + 1) as f64);
            }
        }
    }

    #[test]
    fn cluster_on_empty_ditch_is_one_site() {
        let spec = ModelSpec::square_ditch(0.05, 3.0).unwrap();
        let geom = Arc::new(LatticeGeometry::build(2, 4).unwrap());
        let cfg = SpinConfiguration::from_angles(geom, vec![0.1; 16], vec![0.4; 16]).unwrap();
        let mut c = Chain::new(spec, cfg, ChaCha8Rng::seed_from_u64(1));
        for _ in 0..100 {
            assert_eq!(c.cluster_update_phi(), 1);
            assert_eq!(c.energy(), 0.0);
        }
    }

    #[test]
    fn cluster_keeps_theta_and_phi_window() {
        let spec = ModelSpec::generalized(1, 2.0).unwrap();
        let mut c = chain(LatticeGeometry::build(3, 4).unwrap(), spec, 9);
        let theta = c.config().theta.clone();
        for _ in 0..200 {
            c.cluster_update_phi();
        }
        assert_eq!(theta, c.config().theta);
        assert!(c.config().phi.iter().all(|f| (-PI..PI).contains(f)));
        assert!((c.energy() - model::energy(&spec, c.config())).abs() < 1e-9);
    }

    #[test]
    fn frozen_theta_stays_put() {
        let spec = ModelSpec::generalized(1, 1.0).unwrap();
        let geom = Arc::new(LatticeGeometry::build(2, 4).unwrap());
        let cfg = SpinConfiguration::aligned(geom);
        let mut c = Chain::new(spec, cfg, ChaCha8Rng::seed_from_u64(2)).with_frozen_theta(true);
        for _ in 0..100 {
            c.metropolis_sweep();
        }
        assert!(c.config().theta.iter().all(|&t| t == std::f64::consts::FRAC_PI_2));
    }

    #[test]
    fn exchange_at_equal_beta_always_swaps() {
        let spec = ModelSpec::generalized(2, 1.0).unwrap();
        let geom = LatticeGeometry::build(2, 4).unwrap();
        let mut chains = vec![chain(geom.clone(), spec, 1), chain(geom, spec, 2)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            for c in chains.iter_mut() {
                c.metropolis_sweep();
            }
            let before: Vec<_> = chains.iter().map(|c| c.config().phi.clone()).collect();
            let out = replica_exchange_step(&mut chains, 0, &mut rng).unwrap();
            assert_eq!(out, vec![(0, true)]);
            assert_eq!(chains[0].config().phi, before[1]);
            assert_eq!(chains[1].config().phi, before[0]);
        }
    }

    #[test]
    fn exchange_preserves_configuration_multiset() {
        let geom = LatticeGeometry::build(2, 4).unwrap();
        let mut chains: Vec<_> = [0.5, 0.8, 1.1, 1.4]
            .iter()
            .enumerate()
            .map(|(k, &b)| chain(geom.clone(), ModelSpec::generalized(2, b).unwrap(), k as u64))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let key = |c: &Chain| c.config().phi.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
        let mut before: Vec<_> = chains.iter().map(key).collect();
        for round in 0..10 {
            replica_exchange_step(&mut chains, round % 2, &mut rng).unwrap();
        }
        let mut after: Vec<_> = chains.iter().map(key).collect();
        before.sort();
        after.sort();
        assert_eq!(before, after);
        for c in &chains {
            assert!((c.energy() - model::energy(c.spec(), c.config())).abs() < 1e-12);
        }
    }

    #[test]
    fn exchange_rejects_mismatched_geometry() {
        let spec = ModelSpec::generalized(2, 1.0).unwrap();
        let mut chains = vec![
            chain(LatticeGeometry::build(2, 4).unwrap(), spec, 1),
            chain(LatticeGeometry::build(2, 6).unwrap(), spec.with_beta(2.0), 2),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(replica_exchange_step(&mut chains, 0, &mut rng).is_err());
        let mut mixed = vec![
            chain(LatticeGeometry::build(2, 4).unwrap(), spec, 1),
            chain(
                LatticeGeometry::build(2, 4).unwrap(),
                ModelSpec::new(Variant::SquareDitch { epsilon: 0.2 }, 2.0).unwrap(),
                2,
            ),
        ];
        assert!(replica_exchange_step(&mut mixed, 0, &mut rng).is_err());
    }

    #[test]
    fn window_tuning_moves_toward_target() {
        let spec = ModelSpec::generalized(1, 5.0).unwrap();
        let mut c = chain(LatticeGeometry::build(2, 8).unwrap(), spec, 12);
        c.set_window(1.0);
        for _ in 0..40 {
            for _ in 0..20 {
                c.metropolis_sweep();
            }
            c.tune_window();
        }
        assert!(c.window() < 1.0);
    }
}
