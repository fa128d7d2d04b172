//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};
use std::io::Write;

use gxy_core::analysis::series_stats;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Writes a report line straight to stderr so it survives output capture.
pub fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

/// Gauss-Legendre nodes and weights on `[a, b]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..200 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w));
    }
    out
}

/// Exact averages of `(u, m_xy, m_p)` for two generalized-XY spins joined
/// by one bond, by tensor quadrature over `(theta1, phi1, theta2, phi2)`:
/// Gauss-Legendre in the polar angles, uniform nodes in the azimuths.
pub fn two_site_oracle(p: u32, beta: f64, polar: usize, azimuthal: usize) -> [f64; 3] {
    let thetas: Vec<(f64, f64, f64, f64)> = gauss_legendre(polar, 0.0, PI)
        .into_iter()
        .map(|(t, w)| (t.sin(), t.sin().powi(p as i32), w * 0.5 * t.sin(), t))
        .collect();
    let phis: Vec<(f64, f64)> = (0..azimuthal).map(|k| (TAU * k as f64 / azimuthal as f64).sin_cos()).collect();
    let wphi = 1.0 / azimuthal as f64;
    let (mut z, mut u, mut mxy, mut mp) = (0.0, 0.0, 0.0, 0.0);
    for &(st1, s1, w1, _) in &thetas {
        for &(st2, s2, w2, _) in &thetas {
            for &(sf1, cf1) in &phis {
                for &(sf2, cf2) in &phis {
                    let cosd = cf1 * cf2 + sf1 * sf2;
                    let e = -s1 * s2 * cosd;
                    let w = w1 * w2 * wphi * wphi * (-beta * e).exp();
                    z += w;
                    u += w * e / 2.0;
                    mxy += w * 0.5 * (st1 * cf1 + st2 * cf2).hypot(st1 * sf1 + st2 * sf2);
                    mp += w * 0.5 * (s1 * cf1 + s2 * cf2).hypot(s1 * sf1 + s2 * sf2);
                }
            }
        }
    }
    [u / z, mxy / z, mp / z]
}

/// Plain Metropolis reference sampler for the generalized XY model on a
/// periodic `len x len` square lattice: fresh Haar proposals, energy
/// recomputed from scratch, its own random generator.
pub struct ReferenceSampler {
    len: usize,
    p: i32,
    beta: f64,
    theta: Vec<f64>,
    phi: Vec<f64>,
    rng: StdRng,
}

impl ReferenceSampler {
    pub fn new(len: usize, p: u32, beta: f64, seed: u64) -> Self {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = len * len;
        let theta = (0..n).map(|_| (1.0 - 2.0 * rng.gen::<f64>()).acos()).collect();
        let phi = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
        Self { len, p: p as i32, beta, theta, phi, rng }
    }

    pub fn energy(&self) -> f64 {
        let l = self.len;
        let mut e = 0.0;
        for x in 0..l {
            for y in 0..l {
                let i = x * l + y;
                for j in [((x + 1) % l) * l + y, x * l + (y + 1) % l] {
                    e -= (self.theta[i].sin() * self.theta[j].sin()).powi(self.p) * (self.phi[i] - self.phi[j]).cos();
                }
            }
        }
        e
    }

    pub fn sweep(&mut self) {
        for i in 0..self.theta.len() {
            let before = self.energy();
            let (t, f) = (self.theta[i], self.phi[i]);
            self.theta[i] = (1.0 - 2.0 * self.rng.gen::<f64>()).acos();
            self.phi[i] = self.rng.gen::<f64>() * TAU;
            let delta = self.energy() - before;
            if delta > 0.0 && self.rng.gen::<f64>() >= (-self.beta * delta).exp() {
                self.theta[i] = t;
                self.phi[i] = f;
            }
        }
    }

    /// `(u, m_xy, m_p)` of the current state.
    pub fn observables(&self) -> [f64; 3] {
        let n = self.theta.len() as f64;
        let (mut ax, mut ay, mut bx, mut by) = (0.0, 0.0, 0.0, 0.0);
        for (t, f) in self.theta.iter().zip(&self.phi) {
            let s = t.sin();
            ax += s * f.cos();
            ay += s * f.sin();
            bx += s.powi(self.p) * f.cos();
            by += s.powi(self.p) * f.sin();
        }
        [self.energy() / n, ax.hypot(ay) / n, bx.hypot(by) / n]
    }
}

/// Mean and autocorrelation-aware error of each column.
pub fn column_stats(rows: &[[f64; 3]]) -> [(f64, f64); 3] {
    std::array::from_fn(|k| {
        let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        let s = series_stats(&col).expect("enough samples");
        (s.mean, s.error)
    })
}

/// Asymptotic Kolmogorov-Smirnov p-value for `n` samples against `cdf`.
pub fn ks_p_value(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let d = samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..200 {
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * (k as f64 * lambda).powi(2)).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Upper 0.1% point of the chi-square distribution with 2 degrees of
/// freedom, `-2 ln 0.001`.
pub const CHI2_2_999: f64 = 13.815_510_557_964_274;

/// `(ln Z2, <s1 cos phi1>, <s1 s2 cos(phi1 - phi2)>, <sin(theta1) cos phi1>)`
/// of a bond in the boundary field `field` (already multiplied by beta),
/// by the same tensor quadrature as [`two_site_oracle`].
pub fn pair_cluster_oracle(p: u32, beta: f64, field: f64, polar: usize, azimuthal: usize) -> [f64; 4] {
    let thetas: Vec<(f64, f64, f64)> = gauss_legendre(polar, 0.0, PI)
        .into_iter()
        .map(|(t, w)| (t.sin(), t.sin().powi(p as i32), w * 0.5 * t.sin()))
        .collect();
    let phis: Vec<(f64, f64)> = (0..azimuthal).map(|k| (TAU * k as f64 / azimuthal as f64).sin_cos()).collect();
    let wphi = 1.0 / azimuthal as f64;
    let (mut z, mut m, mut bond, mut m1) = (0.0, 0.0, 0.0, 0.0);
    for &(st1, s1, w1) in &thetas {
        for &(_, s2, w2) in &thetas {
            for &(sf1, cf1) in &phis {
                for &(sf2, cf2) in &phis {
                    let b = s1 * s2 * (cf1 * cf2 + sf1 * sf2);
                    let w = w1 * w2 * wphi * wphi * (beta * b + field * (s1 * cf1 + s2 * cf2)).exp();
                    z += w;
                    m += w * s1 * cf1;
                    bond += w * b;
                    m1 += w * st1 * cf1;
                }
            }
        }
    }
    [z.ln(), m / z, bond / z, m1 / z]
}

/// `(ln Z1, <s cos phi>, <sin(theta) cos phi>)` of one site in the field `h`.
pub fn single_site_oracle(p: u32, h: f64, polar: usize, azimuthal: usize) -> [f64; 3] {
    let (mut z, mut m, mut m1) = (0.0, 0.0, 0.0);
    for (t, w) in gauss_legendre(polar, 0.0, PI) {
        let (st, s) = (t.sin(), t.sin().powi(p as i32));
        for k in 0..azimuthal {
            let c = (TAU * k as f64 / azimuthal as f64).cos();
            let e = w * 0.5 * st / azimuthal as f64 * (h * s * c).exp();
            z += e;
            m += e * s * c;
            m1 += e * st * c;
        }
    }
    [z.ln(), m / z, m1 / z]
}
