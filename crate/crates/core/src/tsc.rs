//! Two-site cluster (Bethe pair) approximation of the d = 3 generalized XY
//! model.
//!
//! One bond is treated exactly; each of its two sites couples to the
//! remaining `z - 1` neighbours through a variational field `lambda`:
//!
//! ```text
//! Z2(lambda) = <exp{beta [s1 s2 cos(phi1 - phi2) + (z-1) lambda (s1 cos phi1 + s2 cos phi2)]}>
//! f(lambda)  = -Theta [ (z/2) ln Z2(lambda) - (z-1) ln Z1(beta z lambda) ]
//! ```
//!
//! with `s = sin^p(theta)` and `<.>` the product Haar measure. The azimuthal
//! integrals reduce to products of modified Bessel functions,
//! `int dphi1 dphi2 / (2 pi)^2 e^{K cos(phi1-phi2) + a cos phi1 + b cos phi2}
//!  = I0(K) I0(a) I0(b) + 2 sum_k I_k(K) I_k(a) I_k(b)`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::meanfield::{self, single_site_partition, Z};
use crate::quadrature::GaussLegendre;
use crate::special::{bessel_i_scaled_into, truncation_order};
use crate::variational::{self, Landscape, Method, SolveOptions, StationaryState, VariationalModel};
use crate::{Error, Result, TransitionReport};

/// Gauss-Legendre nodes on `[0, pi/2]` per polar angle.
pub const DEFAULT_NODES: usize = 96;

/// Largest boundary field searched.
const LAMBDA_MAX: f64 = 1.0;

const TAIL_TOL: f64 = 1e-12;

/// Treatment of the explicit bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterBond {
    /// The bond is summed exactly.
    Exact,
    /// The bond is replaced by its mean-field decoupling, which turns the
    /// pair into two independent sites in the field `beta z lambda`; the
    /// solver then reproduces mean-field theory.
    MeanField,
}

/// Pair-cluster averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMoments {
    pub ln_z: f64,
    /// `<s1 cos phi1>`
    pub m: f64,
    /// `<s1 s2 cos(phi1 - phi2)>`, the bond energy with reversed sign.
    pub bond: f64,
    /// `<sin(theta1) cos phi1>`
    pub m1: f64,
}

/// Polar quadrature and bond Bessel table at one temperature.
#[derive(Debug, Clone)]
pub struct PairCluster {
    p: u32,
    beta: f64,
    kmax: usize,
    /// `sin^p theta` at the nodes.
    s: Vec<f64>,
    sin: Vec<f64>,
    /// Haar weights, normalised to one.
    w: Vec<f64>,
    /// `e^{-K} I_k(K)` for `K = beta s_i s_j`, `k = 0..=kmax+1`.
    bond_bessel: Vec<f64>,
}

impl PairCluster {
    pub fn new(p: u32, theta_temp: f64, nodes: usize) -> Result<Self> {
        if p == 0 || !(theta_temp > 0.0) || nodes < 2 {
            return Err(Error::Parameter(format!(
                "need p >= 1, Theta > 0 and at least 2 nodes (p = {p}, Theta = {theta_temp}, nodes = {nodes})"
            )));
        }
        let beta = 1.0 / theta_temp;
        let rule = GaussLegendre::new(nodes);
        let mut s = Vec::with_capacity(nodes);
        let mut sin = Vec::with_capacity(nodes);
        let mut w = Vec::with_capacity(nodes);
        for (theta, wt) in rule.on(0.0, FRAC_PI_2) {
            sin.push(theta.sin());
            s.push(theta.sin().powi(p as i32));
            // (sin theta / 2) on [0, pi], folded onto [0, pi/2]
            w.push(wt * theta.sin());
        }
        let norm: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= norm);
        let x_max = beta * 1f64.max((Z - 1.0) * LAMBDA_MAX);
        let kmax = truncation_order(x_max, TAIL_TOL).max(2);
        let stride = kmax + 2;
        let mut bond_bessel = vec![0.0; nodes * nodes * stride];
        for i in 0..nodes {
            for j in 0..nodes {
                let off = (i * nodes + j) * stride;
                bessel_i_scaled_into(beta * s[i] * s[j], &mut bond_bessel[off..off + stride]);
            }
        }
        Ok(Self { p, beta, kmax, s, sin, w, bond_bessel })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    fn nodes(&self) -> usize {
        self.s.len()
    }

    /// `ln Z2(lambda)`, the one-site magnetizations and the bond average.
    pub fn moments(&self, lambda: f64) -> PairMoments {
        assert!(lambda >= 0.0, "boundary field must be non-negative");
        let n = self.nodes();
        let stride = self.kmax + 2;
        let field = self.beta * (Z - 1.0) * lambda;
        let mut site_bessel = vec![0.0; n * stride];
        for i in 0..n {
            bessel_i_scaled_into(field * self.s[i], &mut site_bessel[i * stride..(i + 1) * stride]);
        }
        // shift keeps every exponential <= 1
        let shift = self.beta + 2.0 * field;
        let (mut z, mut zm, mut zm1, mut zb) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let a = &site_bessel[i * stride..(i + 1) * stride];
            for j in 0..n {
                let b = &site_bessel[j * stride..(j + 1) * stride];
                let kk = &self.bond_bessel[(i * n + j) * stride..(i * n + j + 1) * stride];
                let mut sum = kk[0] * a[0] * b[0];
                let mut d_a = kk[0] * a[1] * b[0];
                let mut d_k = kk[1] * a[0] * b[0];
                for k in 1..=self.kmax {
                    sum += 2.0 * kk[k] * a[k] * b[k];
                    d_a += kk[k] * (a[k - 1] + a[k + 1]) * b[k];
                    d_k += (kk[k - 1] + kk[k + 1]) * a[k] * b[k];
                }
                let e = self.w[i]
                    * self.w[j]
                    * (self.beta * self.s[i] * self.s[j] + field * (self.s[i] + self.s[j]) - shift).exp();
                z += e * sum;
                zm += e * self.s[i] * d_a;
                zm1 += e * self.sin[i] * d_a;
                zb += e * self.s[i] * self.s[j] * d_k;
            }
        }
        PairMoments { ln_z: shift + z.ln(), m: zm / z, bond: zb / z, m1: zm1 / z }
    }

    /// Linear-stability function of `lambda = 0`:
    /// `(z-1) (<m1^2> + <m1 m2>) - z <m^2>_0`, positive when ordered
    /// fluctuations grow.
    pub fn instability_margin(&self) -> f64 {
        let n = self.nodes();
        let stride = self.kmax + 2;
        let (mut z, mut m11, mut m12, mut m0) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            m0 += self.w[i] * 0.5 * self.s[i] * self.s[i];
            for j in 0..n {
                let kk = &self.bond_bessel[(i * n + j) * stride..];
                let e = self.w[i] * self.w[j] * (self.beta * (self.s[i] * self.s[j] - 1.0)).exp();
                z += e * kk[0];
                m11 += e * 0.5 * self.s[i] * self.s[i] * kk[0];
                m12 += e * 0.5 * self.s[i] * self.s[j] * kk[1];
            }
        }
        (Z - 1.0) * (m11 + m12) / z - Z * m0
    }
}

/// `ln Z2(lambda)` with `<s1 cos phi1>` and `<s1 s2 cos(phi1 - phi2)>`.
pub fn pair_partition(lambda: f64, theta_temp: f64, p: u32) -> Result<PairMoments> {
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("boundary field must be non-negative, got {lambda}")));
    }
    Ok(PairCluster::new(p, theta_temp, DEFAULT_NODES)?.moments(lambda))
}

/// Pair-cluster state at a given boundary field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TscState {
    pub p: u32,
    pub theta_temp: f64,
    pub z: f64,
    pub lambda: f64,
    pub ln_z2: f64,
    pub ln_z1: f64,
    pub f: f64,
    /// Pair-cluster `<sin^p(theta) cos(phi)>`.
    pub m_p: f64,
    /// Single-site `<sin(theta) cos(phi)>` in the field `beta z lambda`.
    pub m_1: f64,
    /// Single-site `<sin^p(theta) cos(phi)>`.
    pub m_site: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TwoSiteCluster {
    pub p: u32,
    pub bond: ClusterBond,
    pub nodes: usize,
}

impl TwoSiteCluster {
    pub fn new(p: u32) -> Self {
        Self { p, bond: ClusterBond::Exact, nodes: DEFAULT_NODES }
    }
}

pub struct TscLandscape {
    theta: f64,
    bond: ClusterBond,
    cluster: PairCluster,
}

impl TscLandscape {
    pub fn tsc_state(&self, lambda: f64) -> TscState {
        let beta = self.cluster.beta;
        let p = self.cluster.p;
        let site = single_site_partition(beta * Z * lambda, p);
        let pair = match self.bond {
            ClusterBond::Exact => self.cluster.moments(lambda),
            ClusterBond::MeanField => PairMoments {
                ln_z: 2.0 * site.ln_z - beta * lambda * lambda,
                m: site.m,
                bond: site.m * site.m,
                m1: site.m1,
            },
        };
        TscState {
            p,
            theta_temp: self.theta,
            z: Z,
            lambda,
            ln_z2: pair.ln_z,
            ln_z1: site.ln_z,
            f: -self.theta * (0.5 * Z * pair.ln_z - (Z - 1.0) * site.ln_z),
            m_p: pair.m,
            m_1: site.m1,
            m_site: site.m,
            u: -0.5 * Z * pair.bond,
        }
    }
}

impl Landscape for TscLandscape {
    fn free_energy(&self, lambda: f64) -> f64 {
        self.tsc_state(lambda).f
    }

    fn gradient(&self, lambda: f64) -> f64 {
        match self.bond {
            ClusterBond::Exact => {
                let pair = self.cluster.moments(lambda);
                let site = single_site_partition(self.cluster.beta * Z * lambda, self.cluster.p);
                -Z * (Z - 1.0) * (pair.m - site.m)
            }
            ClusterBond::MeanField => {
                let site = single_site_partition(self.cluster.beta * Z * lambda, self.cluster.p);
                Z * (lambda - site.m)
            }
        }
    }

    fn state(&self, lambda: f64) -> StationaryState {
        let s = self.tsc_state(lambda);
        StationaryState { x: lambda, free_energy: s.f, u: s.u, m_p: s.m_p, m_1: s.m_1 }
    }
}

impl VariationalModel for TwoSiteCluster {
    type Landscape = TscLandscape;

    fn method(&self) -> Method {
        Method::TwoSiteCluster
    }

    fn p(&self) -> u32 {
        self.p
    }

    fn landscape(&self, theta: f64) -> TscLandscape {
        let cluster = PairCluster::new(self.p, theta, self.nodes).expect("validated parameters");
        TscLandscape { theta, bond: self.bond, cluster }
    }

    fn x_max(&self) -> f64 {
        LAMBDA_MAX
    }

    fn instability_temperature(&self, (lo, hi): (f64, f64)) -> Result<f64> {
        if self.bond == ClusterBond::MeanField {
            return meanfield::MeanField { p: self.p }.instability_temperature((lo, hi));
        }
        let margin = |t: f64| PairCluster::new(self.p, t, self.nodes).map(|c| c.instability_margin());
        // scan downwards from the hot end for the first sign change
        let steps = 200;
        let mut t_hi = hi;
        if margin(t_hi)? >= 0.0 {
            return Err(Error::NoTransition { p: self.p, lo, hi });
        }
        for k in 1..=steps {
            let t = hi - (hi - lo) * k as f64 / steps as f64;
            if margin(t)? >= 0.0 {
                let mut t_lo = t;
                while t_hi - t_lo > 1e-13 {
                    let mid = 0.5 * (t_lo + t_hi);
                    if margin(mid)? >= 0.0 {
                        t_lo = mid;
                    } else {
                        t_hi = mid;
                    }
                }
                return Ok(0.5 * (t_lo + t_hi));
            }
            t_hi = t;
        }
        Err(Error::NoTransition { p: self.p, lo, hi })
    }
}

/// Two-site-cluster transition for exponent `p`.
pub fn solve_tsc(p: u32, opts: &SolveOptions) -> Result<TransitionReport> {
    solve_tsc_with(TwoSiteCluster::new(p), opts)
}

pub fn solve_tsc_with(model: TwoSiteCluster, opts: &SolveOptions) -> Result<TransitionReport> {
    if model.p == 0 || model.nodes < 2 {
        return Err(Error::Parameter("need p >= 1 and at least 2 nodes".into()));
    }
    variational::solve(&model, opts)
}
