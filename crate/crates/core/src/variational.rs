//! Transition location for one-parameter variational free energies.
//!
//! A [`VariationalModel`] supplies, for every temperature, a free-energy
//! landscape `f(x)` over an order-parameter-like variable `x >= 0` with the
//! disordered state at `x = 0`. The transition is where the global minimum
//! leaves `x = 0`. It is continuous (type II) when that happens at the
//! linear instability of `x = 0`, and discontinuous (type I) when an ordered
//! minimum overtakes `x = 0` at a higher temperature.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MF")]
    MeanField,
    #[serde(rename = "TSC")]
    TwoSiteCluster,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::MeanField => "MF",
            Method::TwoSiteCluster => "TSC",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderType {
    /// Discontinuous.
    I,
    /// Continuous.
    II,
}

impl std::fmt::Display for OrderType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OrderType::I => "I",
            OrderType::II => "II",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub method: Method,
    pub p: u32,
    pub theta_star: f64,
    /// Temperature at which `x = 0` stops being a local minimum.
    pub theta_instability: f64,
    pub order_type: OrderType,
    /// Energy jump per site (type I only).
    pub delta_u: Option<f64>,
    /// `<sin^p(theta) cos(phi)>` on the ordered side (type I only).
    pub m_bar_p: Option<f64>,
    /// `<sin(theta) cos(phi)>` on the ordered side (type I only).
    pub m_bar_1: Option<f64>,
}

/// Thermodynamics at a stationary point of a landscape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryState {
    pub x: f64,
    pub free_energy: f64,
    pub u: f64,
    pub m_p: f64,
    pub m_1: f64,
}

pub trait Landscape {
    fn free_energy(&self, x: f64) -> f64;
    fn gradient(&self, x: f64) -> f64;
    fn state(&self, x: f64) -> StationaryState;
}

pub trait VariationalModel {
    type Landscape: Landscape;

    fn method(&self) -> Method;
    fn p(&self) -> u32;
    fn landscape(&self, temperature: f64) -> Self::Landscape;
    /// Upper end of the order-parameter search range.
    fn x_max(&self) -> f64;
    /// Linear instability temperature of the disordered state.
    fn instability_temperature(&self, window: (f64, f64)) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Temperature window that must bracket the transition.
    pub window: (f64, f64),
    /// Bisection tolerance on the transition temperature.
    pub tolerance: f64,
    /// Grid points used to bracket stationary points.
    pub grid: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { window: (0.3, 3.0), tolerance: 1e-9, grid: 80 }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.window;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Parameter(format!("temperature window [{lo}, {hi}] must satisfy 0 < lo < hi")));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Parameter("tolerance must be positive".into()));
        }
        if self.grid < 4 {
            return Err(Error::Parameter("grid needs at least 4 points".into()));
        }
        Ok(())
    }
}

/// Local minima with `x > 0`, found as `-` to `+` sign changes of the
/// gradient on a uniform grid and refined by bisection.
pub fn ordered_minima<L: Landscape>(land: &L, x_max: f64, grid: usize) -> Vec<f64> {
    let xs: Vec<f64> = (1..=grid).map(|k| x_max * k as f64 / grid as f64).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| land.gradient(x)).collect();
    let mut out = Vec::new();
    for k in 0..grid - 1 {
        if gs[k] < 0.0 && gs[k + 1] >= 0.0 {
            let (mut a, mut b) = (xs[k], xs[k + 1]);
            while b - a > 1e-14 * b.max(1.0) {
                let m = 0.5 * (a + b);
                if land.gradient(m) < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
    }
    out
}

/// Lowest ordered minimum and its free energy relative to `x = 0`.
pub fn best_ordered<L: Landscape>(land: &L, x_max: f64, grid: usize) -> Option<(f64, f64)> {
    let f0 = land.free_energy(0.0);
    ordered_minima(land, x_max, grid)
        .into_iter()
        .map(|x| (x, land.free_energy(x) - f0))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Locates the transition of `model` and classifies its order.
pub fn solve<M: VariationalModel>(model: &M, opts: &SolveOptions) -> Result<TransitionReport> {
    opts.validate()?;
    let (lo, hi) = opts.window;
    let no_transition = || Error::NoTransition { p: model.p(), lo, hi };
    let theta_inst = model.instability_temperature(opts.window)?;
    let x_max = model.x_max();
    // ordered minimum strictly below x = 0 in free energy
    let ordered_wins = |t: f64| -> Option<f64> {
        best_ordered(&model.landscape(t), x_max, opts.grid).filter(|&(_, df)| df < 0.0).map(|(x, _)| x)
    };
    let probe = theta_inst * (1.0 + 1e-5);
    let base = TransitionReport {
        method: model.method(),
        p: model.p(),
        theta_star: theta_inst,
        theta_instability: theta_inst,
        order_type: OrderType::II,
        delta_u: None,
        m_bar_p: None,
        m_bar_1: None,
    };
    if probe >= hi || ordered_wins(probe).is_none() {
        return Ok(base);
    }
    let mut t_lo = probe;
    let mut t_hi = probe;
    loop {
        t_hi = (t_hi * 1.02).min(hi);
        if ordered_wins(t_hi).is_none() {
            break;
        }
        t_lo = t_hi;
        if t_hi >= hi {
            return Err(no_transition());
        }
    }
    while t_hi - t_lo > opts.tolerance {
        let mid = 0.5 * (t_lo + t_hi);
        if ordered_wins(mid).is_some() {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
    }
    let land = model.landscape(t_lo);
    let x = ordered_wins(t_lo).ok_or_else(no_transition)?;
    let ordered = land.state(x);
    let disordered = land.state(0.0);
    Ok(TransitionReport {
        theta_star: 0.5 * (t_lo + t_hi),
        order_type: OrderType::I,
        delta_u: Some(disordered.u - ordered.u),
        m_bar_p: Some(ordered.m_p),
        m_bar_1: Some(ordered.m_1),
        ..base
    })
}

/// Global-minimum state at one temperature.
pub fn equilibrium<M: VariationalModel>(model: &M, temperature: f64, grid: usize) -> StationaryState {
    let land = model.landscape(temperature);
    match best_ordered(&land, model.x_max(), grid) {
        Some((x, df)) if df < 0.0 => land.state(x),
        _ => land.state(0.0),
    }
}

pub const TABLE_CSV_HEADER: &str = "p,theta_star,type,delta_u,m_bar_p,m_bar_1";

/// Table-shaped CSV; jump columns are empty for type II rows.
pub fn table_csv(reports: &[TransitionReport]) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    let mut out = String::from(TABLE_CSV_HEADER);
    out.push('\n');
    for r in reports {
        writeln!(
            out,
            "{},{:.6},{},{},{},{}",
            r.p,
            r.theta_star,
            r.order_type,
            opt(r.delta_u),
            opt(r.m_bar_p),
            opt(r.m_bar_1)
        )
        .expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Landau toy `f = a(t) x^2 + b x^4 + c x^6` with `a = t - 1`.
    struct Landau {
        b: f64,
    }

    struct LandauAt {
        a: f64,
        b: f64,
    }

    impl Landscape for LandauAt {
        fn free_energy(&self, x: f64) -> f64 {
            self.a * x * x + self.b * x.powi(4) + x.powi(6)
        }
        fn gradient(&self, x: f64) -> f64 {
            2.0 * self.a * x + 4.0 * self.b * x.powi(3) + 6.0 * x.powi(5)
        }
        fn state(&self, x: f64) -> StationaryState {
            StationaryState { x, free_energy: self.free_energy(x), u: -x * x, m_p: x, m_1: x }
        }
    }

    impl VariationalModel for Landau {
        type Landscape = LandauAt;
        fn method(&self) -> Method {
            Method::MeanField
        }
        fn p(&self) -> u32 {
            1
        }
        fn landscape(&self, t: f64) -> LandauAt {
            LandauAt { a: t - 1.0, b: self.b }
        }
        fn x_max(&self) -> f64 {
            2.0
        }
        fn instability_temperature(&self, _: (f64, f64)) -> Result<f64> {
            Ok(1.0)
        }
    }

    #[test]
    fn continuous_landau() {
        let r = solve(&Landau { b: 1.0 }, &SolveOptions::default()).unwrap();
        assert_eq!(r.order_type, OrderType::II);
        assert_eq!(r.theta_star, 1.0);
        assert!(r.delta_u.is_none());
    }

    #[test]
    fn discontinuous_landau() {
        // coexistence of x = 0 with the ordered minimum: a = b^2 / 4
        let b = -1.0;
        let r = solve(&Landau { b }, &SolveOptions::default()).unwrap();
        assert_eq!(r.order_type, OrderType::I);
        assert!((r.theta_star - 1.25).abs() < 1e-8, "{}", r.theta_star);
        let x2 = -b / 2.0;
        assert!((r.delta_u.unwrap() - x2).abs() < 1e-6);
    }

    #[test]
    fn csv_shape() {
        let r = solve(&Landau { b: -1.0 }, &SolveOptions::default()).unwrap();
        let csv = table_csv(&[r]);
        assert!(csv.starts_with(TABLE_CSV_HEADER));
        assert!(csv.lines().nth(1).unwrap().starts_with("1,1.250000,I,"));
    }

    #[test]
    fn bad_window() {
        let opts = SolveOptions { window: (2.0, 1.0), ..Default::default() };
        assert!(matches!(solve(&Landau { b: 1.0 }, &opts), Err(Error::Parameter(_))));
    }
}
