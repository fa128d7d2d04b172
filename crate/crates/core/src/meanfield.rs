//! Single-site mean-field theory of the d = 3 generalized XY model.
//!
//! Every site feels the field `h = z M / Theta` of its `z = 6` neighbours
//! along x. With `m = sin^p(theta) cos(phi)` the free energy per site is
//! `f(M) = (z/2) M^2 - Theta ln Z1(z M / Theta)`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::quadrature::adaptive;
use crate::special::bessel_i_scaled_into;
use crate::variational::{self, Landscape, Method, SolveOptions, StationaryState, VariationalModel};
use crate::{Error, Result, TransitionReport};

/// Coordination number of the simple cubic lattice.
pub const Z: f64 = 6.0;

const QUAD_TOL: f64 = 1e-12;

/// Single-site averages in the field `h` along x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteMoments {
    pub ln_z: f64,
    /// `<sin^p(theta) cos(phi)>`
    pub m: f64,
    /// `<sin^{2p}(theta) cos^2(phi)>`
    pub m2: f64,
    /// `<sin(theta) cos(phi)>`
    pub m1: f64,
}

/// `ln Z1(h) = ln int (sin(theta)/2) I0(h sin^p theta) d theta` with the
/// first two moments of `m`, plus the plain in-plane magnetization.
pub fn single_site_partition(h: f64, p: u32) -> SiteMoments {
    assert!(h >= 0.0 && p >= 1, "need h >= 0 and p >= 1");
    let pi = p as i32;
    let mut bessel = [0.0; 3];
    // integrand symmetric about pi/2; scaled by e^{-h}
    let [z, zm, zm2, zm1] = adaptive(0.0, FRAC_PI_2, QUAD_TOL, |theta| {
        let st = theta.sin();
        let s = st.powi(pi);
        let x = h * s;
        bessel_i_scaled_into(x, &mut bessel);
        let [i0, i1, i2] = bessel;
        let w = st * (x - h).exp();
        [w * i0, w * s * i1, w * s * s * 0.5 * (i0 + i2), w * st * i1]
    });
    if h == 0.0 {
        // odd moments vanish and Z1 = 1 exactly
        return SiteMoments { ln_z: 0.0, m: 0.0, m2: zm2 / z, m1: 0.0 };
    }
    SiteMoments { ln_z: h + z.ln(), m: zm / z, m2: zm2 / z, m1: zm1 / z }
}

/// `<m^2>` at zero field: `(1/2) (2p)!! / (2p+1)!!`.
pub fn zero_field_m2(p: u32) -> f64 {
    0.5 * (1..=p).map(|k| 2.0 * k as f64 / (2.0 * k as f64 + 1.0)).product::<f64>()
}

/// Temperature where `M = 0` loses local stability, `z <m^2>_0`.
pub fn instability_temperature(p: u32) -> f64 {
    Z * zero_field_m2(p)
}

/// `f(M) = (z/2) M^2 - Theta ln Z1(z M / Theta)`.
pub fn mf_free_energy(m: f64, theta: f64, p: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) || !(theta > 0.0) || p == 0 {
        return Err(Error::Parameter(format!("need 0 <= M <= 1, Theta > 0, p >= 1 (M = {m}, Theta = {theta}, p = {p})")));
    }
    Ok(0.5 * Z * m * m - theta * single_site_partition(Z * m / theta, p).ln_z)
}

/// Mean-field state at a given order parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MfState {
    pub p: u32,
    pub theta_temp: f64,
    pub z: f64,
    pub m_p: f64,
    pub m_1: f64,
    pub f: f64,
    pub u: f64,
    /// `M - <m>(z M / Theta)`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MeanField {
    pub p: u32,
}

pub struct MfLandscape {
    p: u32,
    theta: f64,
}

impl MfLandscape {
    pub fn mf_state(&self, m: f64) -> MfState {
        let site = single_site_partition(Z * m / self.theta, self.p);
        MfState {
            p: self.p,
            theta_temp: self.theta,
            z: Z,
            m_p: m,
            m_1: site.m1,
            f: 0.5 * Z * m * m - self.theta * site.ln_z,
            u: -0.5 * Z * m * m,
            residual: m - site.m,
        }
    }
}

impl Landscape for MfLandscape {
    fn free_energy(&self, m: f64) -> f64 {
        0.5 * Z * m * m - self.theta * single_site_partition(Z * m / self.theta, self.p).ln_z
    }

    fn gradient(&self, m: f64) -> f64 {
        Z * (m - single_site_partition(Z * m / self.theta, self.p).m)
    }

    fn state(&self, m: f64) -> StationaryState {
        let s = self.mf_state(m);
        StationaryState { x: m, free_energy: s.f, u: s.u, m_p: s.m_p, m_1: s.m_1 }
    }
}

impl VariationalModel for MeanField {
    type Landscape = MfLandscape;

    fn method(&self) -> Method {
        Method::MeanField
    }

    fn p(&self) -> u32 {
        self.p
    }

    fn landscape(&self, theta: f64) -> MfLandscape {
        MfLandscape { p: self.p, theta }
    }

    fn x_max(&self) -> f64 {
        1.0
    }

    fn instability_temperature(&self, (lo, hi): (f64, f64)) -> Result<f64> {
        let t = instability_temperature(self.p);
        if t < lo || t > hi {
            return Err(Error::NoTransition { p: self.p, lo, hi });
        }
        Ok(t)
    }
}

/// Mean-field transition for exponent `p`.
pub fn solve_mf(p: u32, opts: &SolveOptions) -> Result<TransitionReport> {
    if p == 0 {
        return Err(Error::Parameter("p must be at least 1".into()));
    }
    variational::solve(&MeanField { p }, opts)
}

/// Global free-energy minimum at `theta`.
pub fn equilibrium(theta: f64, p: u32) -> MfState {
    let m = variational::equilibrium(&MeanField { p }, theta, SolveOptions::default().grid).x;
    MeanField { p }.landscape(theta).mf_state(m)
}
