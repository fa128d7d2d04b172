//! Hamiltonians, the single-site Haar measure and observables.
//!
//! Both model variants share the form
//!
//! ```text
//! H = - sum_<ij> s_i s_j cos(phi_i - phi_j)
//! ```
//!
//! with the site weight `s = sin^p(theta)` for the generalized XY model and
//! `s = n(theta)`, the indicator of the closed ditch
//! `[pi/2 - eps, pi/2 + eps]`, for the square-ditch model.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::LatticeGeometry;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    GeneralizedXY { p: u32 },
    SquareDitch { epsilon: f64 },
}

impl Variant {
    /// Single-site weight `s(theta)`.
    #[inline]
    pub fn weight(&self, theta: f64) -> f64 {
        match *self {
            Variant::GeneralizedXY { p } => theta.sin().powi(p as i32),
            Variant::SquareDitch { epsilon } => {
                if in_ditch(theta, epsilon) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn is_ditch(&self) -> bool {
        matches!(self, Variant::SquareDitch { .. })
    }
}

/// Closed ditch indicator, `|theta - pi/2| <= eps`.
#[inline]
pub fn in_ditch(theta: f64, epsilon: f64) -> bool {
    (theta - FRAC_PI_2).abs() <= epsilon
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: Variant,
    pub beta: f64,
}

impl ModelSpec {
    pub fn new(variant: Variant, beta: f64) -> Result<Self> {
        let spec = Self { variant, beta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn generalized(p: u32, beta: f64) -> Result<Self> {
        Self::new(Variant::GeneralizedXY { p }, beta)
    }

    pub fn square_ditch(epsilon: f64, beta: f64) -> Result<Self> {
        Self::new(Variant::SquareDitch { epsilon }, beta)
    }

    pub fn validate(&self) -> Result<()> {
        match self.variant {
            Variant::GeneralizedXY { p } if p < 1 => {
                return Err(Error::Parameter(format!("exponent p must be >= 1, got {p}")))
            }
            Variant::SquareDitch { epsilon } if !(epsilon > 0.0 && epsilon <= FRAC_PI_2) => {
                return Err(Error::Parameter(format!("ditch half-width must be in (0, pi/2], got {epsilon}")))
            }
            _ => {}
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::Parameter(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        Ok(())
    }

    /// Dimensionless temperature `1 / beta`.
    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self { beta, ..*self }
    }
}

/// Per-site polar and azimuthal angles on a fixed geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinConfiguration {
    geom: Arc<LatticeGeometry>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl SpinConfiguration {
    /// Fully aligned in-plane state: every `theta = pi/2`, `phi = 0`.
    pub fn aligned(geom: Arc<LatticeGeometry>) -> Self {
        let n = geom.site_count();
        Self { geom, theta: vec![FRAC_PI_2; n], phi: vec![0.0; n] }
    }

    pub fn from_angles(geom: Arc<LatticeGeometry>, theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        let n = geom.site_count();
        if theta.len() != n || phi.len() != n {
            return Err(Error::Parameter(format!(
                "angle arrays have lengths {} / {}, geometry has {n} sites",
                theta.len(),
                phi.len()
            )));
        }
        if let Some(t) = theta.iter().find(|t| !(0.0..=PI).contains(*t)) {
            return Err(Error::Parameter(format!("theta {t} outside [0, pi]")));
        }
        let phi = phi.into_iter().map(wrap_phi).collect();
        Ok(Self { geom, theta, phi })
    }

    /// Independent Haar draws on every site.
    pub fn random<R: Rng + ?Sized>(geom: Arc<LatticeGeometry>, rng: &mut R) -> Self {
        let n = geom.site_count();
        let (theta, phi) = (0..n).map(|_| haar_sample(rng)).unzip();
        Self { geom, theta, phi }
    }

    pub fn geometry(&self) -> &Arc<LatticeGeometry> {
        &self.geom
    }

    pub fn site_count(&self) -> usize {
        self.theta.len()
    }

    pub fn set(&mut self, site: usize, theta: f64, phi: f64) {
        self.theta[site] = theta;
        self.phi[site] = wrap_phi(phi);
    }
}

/// Maps an angle into `[-pi, pi)`.
#[inline]
pub fn wrap_phi(phi: f64) -> f64 {
    let r = (phi + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to TAU for tiny negative inputs
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// Draws `(theta, phi)` from the uniform measure on the unit sphere.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u: f64 = rng.gen();
    let theta = (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
    let phi = rng.gen::<f64>() * TAU - PI;
    (theta, phi)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Total energy, each bond counted once.
pub fn energy(spec: &ModelSpec, cfg: &SpinConfiguration) -> f64 {
    let geom = cfg.geometry();
    let weights: Vec<f64> = cfg.theta.iter().map(|&t| spec.variant.weight(t)).collect();
    let mut acc = KahanSum::default();
    for i in 0..geom.site_count() {
        if weights[i] == 0.0 {
            continue;
        }
        for &j in geom.neighbors(i) {
            if i < j && weights[j] != 0.0 {
                acc.add(-weights[i] * weights[j] * (cfg.phi[i] - cfg.phi[j]).cos());
            }
        }
    }
    acc.value()
}

/// Energy change from moving `site` to `(new_theta, new_phi)`, using only
/// the bonds touching that site.
pub fn local_energy_delta(
    spec: &ModelSpec,
    cfg: &SpinConfiguration,
    site: usize,
    new_theta: f64,
    new_phi: f64,
) -> f64 {
    let (mut hx, mut hy) = (0.0, 0.0);
    for &j in cfg.geometry().neighbors(site) {
        let s = spec.variant.weight(cfg.theta[j]);
        if s != 0.0 {
            let (sin, cos) = cfg.phi[j].sin_cos();
            hx += s * cos;
            hy += s * sin;
        }
    }
    let old = spec.variant.weight(cfg.theta[site]);
    let new = spec.variant.weight(new_theta);
    let (os, oc) = cfg.phi[site].sin_cos();
    let (ns, nc) = new_phi.sin_cos();
    -(new * (nc * hx + ns * hy) - old * (oc * hx + os * hy))
}

/// One measurement record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableSample {
    /// Energy per site.
    pub u: f64,
    /// `|N^-1 sum (sin t cos f, sin t sin f)|`.
    pub m_xy: f64,
    /// `|N^-1 sum s (cos f, sin f)|` with the model's site weight.
    pub m_p: f64,
    /// Ditch occupation density, square-ditch model only.
    pub rho: Option<f64>,
}

/// In-plane magnetization vectors `(x, y)` for the plain projection and the
/// weighted order parameter.
pub fn magnetization_vectors(spec: &ModelSpec, cfg: &SpinConfiguration) -> ([f64; 2], [f64; 2]) {
    let n = cfg.site_count() as f64;
    let mut plain = [0.0; 2];
    let mut weighted = [0.0; 2];
    for (&t, &f) in cfg.theta.iter().zip(&cfg.phi) {
        let (sf, cf) = f.sin_cos();
        let st = t.sin();
        let s = spec.variant.weight(t);
        plain[0] += st * cf;
        plain[1] += st * sf;
        weighted[0] += s * cf;
        weighted[1] += s * sf;
    }
    (plain.map(|v| v / n), weighted.map(|v| v / n))
}

pub fn measure(spec: &ModelSpec, cfg: &SpinConfiguration) -> ObservableSample {
    let n = cfg.site_count() as f64;
    let (plain, weighted) = magnetization_vectors(spec, cfg);
    let rho = match spec.variant {
        Variant::SquareDitch { epsilon } => {
            Some(cfg.theta.iter().filter(|&&t| in_ditch(t, epsilon)).count() as f64 / n)
        }
        Variant::GeneralizedXY { .. } => None,
    };
    ObservableSample {
        u: energy(spec, cfg) / n,
        m_xy: plain[0].hypot(plain[1]).min(1.0),
        m_p: weighted[0].hypot(weighted[1]).min(1.0),
        rho,
    }
}

/// Lattice-gas chemical potential equivalent to a ditch half-width,
/// `nu = ln(sin eps / (1 - sin eps)) / beta`.
pub fn chemical_potential(epsilon: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(epsilon > 0.0 && epsilon < FRAC_PI_2) {
        return Err(Error::Domain(format!("half-width must be in (0, pi/2), got {epsilon}")));
    }
    let s = epsilon.sin();
    Ok((s / (1.0 - s)).ln() / beta)
}
