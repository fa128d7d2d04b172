//! Post-processing of Monte Carlo time series.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::ObservableSample;
use crate::{Error, Result};

/// Window constant of the automatic windowing procedure.
const WINDOW_C: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub mean: f64,
    /// Integrated autocorrelation time, in samples.
    pub tau_int: f64,
    /// Jackknife error of the mean.
    pub error: f64,
    pub count: usize,
}

/// Mean, integrated autocorrelation time (automatic windowing: the
/// smallest window `W >= 6 tau(W)`), and a jackknife error over blocks of
/// about `4 tau_int` samples.
pub fn series_stats(samples: &[f64]) -> Result<SeriesStats> {
    let n = samples.len();
    if n < 100 {
        return Err(Error::Precondition(format!("need at least 100 samples, got {n}")));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if var <= f64::EPSILON * mean * mean || var == 0.0 {
        return Ok(SeriesStats { mean, tau_int: 0.5, error: 0.0, count: n });
    }
    let mut tau = 0.5;
    for lag in 1..n / 2 {
        let c: f64 = samples[..n - lag]
            .iter()
            .zip(&samples[lag..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum::<f64>()
            / (n - lag) as f64;
        tau += c / var;
        if lag as f64 >= WINDOW_C * tau {
            break;
        }
    }
    let tau_int = tau.max(0.5);
    let mut block = (4.0 * tau_int).ceil() as usize;
    block = block.clamp(1, (n / 10).max(1));
    let error = mean_jackknife_error(samples, block);
    Ok(SeriesStats { mean, tau_int, error, count: n })
}

/// [`jackknife_error`] of the mean, in one pass over block sums.
fn mean_jackknife_error(samples: &[f64], block: usize) -> f64 {
    let nb = samples.len() / block;
    if nb < 2 {
        return 0.0;
    }
    let sums: Vec<f64> = samples[..nb * block].chunks_exact(block).map(|c| c.iter().sum()).collect();
    let total: f64 = sums.iter().sum();
    let rest = ((nb - 1) * block) as f64;
    let values: Vec<f64> = sums.iter().map(|b| (total - b) / rest).collect();
    let mean = values.iter().sum::<f64>() / nb as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    ((nb as f64 - 1.0) / nb as f64 * ss).sqrt()
}

/// Delete-one-block jackknife error of `estimator` with blocks of `block`
/// consecutive samples (the trailing partial block is dropped).
pub fn jackknife_error(samples: &[f64], block: usize, estimator: impl Fn(&[f64]) -> f64) -> f64 {
    let nb = samples.len() / block;
    if nb < 2 {
        return 0.0;
    }
    let used = &samples[..nb * block];
    let mut rest = Vec::with_capacity(used.len() - block);
    let values: Vec<f64> = (0..nb)
        .map(|b| {
            rest.clear();
            rest.extend_from_slice(&used[..b * block]);
            rest.extend_from_slice(&used[(b + 1) * block..]);
            estimator(&rest)
        })
        .collect();
    let mean = values.iter().sum::<f64>() / nb as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    ((nb as f64 - 1.0) / nb as f64 * ss).sqrt()
}

/// Smallest prominence, relative to the tallest smoothed bin, of a maximum
/// that counts as a histogram peak.
pub const MIN_PEAK_PROMINENCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` increasing edges.
    pub edges: Vec<f64>,
    /// Probability mass per bin; sums to one.
    pub mass: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    pub fn center(&self, bin: usize) -> f64 {
        0.5 * (self.edges[bin] + self.edges[bin + 1])
    }

    pub fn width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    /// Histogram of `samples` on these same edges.
    pub fn rebin(&self, samples: &[f64]) -> Histogram {
        fill(self.edges.clone(), samples)
    }

    /// Convolution with the binomial kernel `[1, 4, 6, 4, 1] / 16`,
    /// renormalised at the edges.
    pub fn smoothed(&self) -> Vec<f64> {
        const K: [f64; 5] = [1.0, 4.0, 6.0, 4.0, 1.0];
        let n = self.mass.len() as isize;
        (0..n)
            .map(|i| {
                let (mut acc, mut norm) = (0.0, 0.0);
                for (k, w) in K.iter().enumerate() {
                    let j = i + k as isize - 2;
                    if (0..n).contains(&j) {
                        acc += w * self.mass[j as usize];
                        norm += w;
                    }
                }
                acc / norm
            })
            .collect()
    }

    /// Local maxima of the smoothed histogram whose prominence exceeds
    /// `min_prominence` times the global maximum, as bin indices.
    pub fn modes(&self, min_prominence: f64) -> Vec<usize> {
        let s = self.smoothed();
        let top = s.iter().cloned().fold(0.0, f64::max);
        let n = s.len();
        let mut out = Vec::new();
        let mut i = 0;
        while i < n {
            // plateau [i, j)
            let mut j = i + 1;
            while j < n && s[j] == s[i] {
                j += 1;
            }
            let left_ok = i == 0 || s[i - 1] < s[i];
            let right_ok = j == n || s[j] < s[i];
            if left_ok && right_ok && s[i] > 0.0 {
                let left_min = s[..i].iter().rev().scan(s[i], |hi, &v| {
                    if v > s[i] {
                        None
                    } else {
                        *hi = hi.min(v);
                        Some(*hi)
                    }
                });
                let lmin = left_min.last().unwrap_or(0.0);
                let right_min = s[j..].iter().scan(s[i], |lo, &v| {
                    if v > s[i] {
                        None
                    } else {
                        *lo = lo.min(v);
                        Some(*lo)
                    }
                });
                let rmin = right_min.last().unwrap_or(0.0);
                if s[i] - lmin.max(rmin) >= min_prominence * top {
                    out.push((i + j - 1) / 2);
                }
            }
            i = j;
        }
        out
    }

    /// Two-peak structure: the two highest smoothed maxima at least
    /// `min_separation` bins apart, with the valley between them. Maxima
    /// less prominent than [`MIN_PEAK_PROMINENCE`] of the tallest one (tail
    /// noise) are ignored.
    pub fn double_peak(&self, min_separation: usize) -> Option<DoublePeak> {
        let s = self.smoothed();
        let mut modes = self.modes(MIN_PEAK_PROMINENCE);
        modes.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
        let first = *modes.first()?;
        let second = *modes.iter().skip(1).find(|&&m| m.abs_diff(first) >= min_separation)?;
        let (lo, hi) = if first < second { (first, second) } else { (second, first) };
        let (valley_bin, valley) = (lo..=hi).map(|k| (k, s[k])).min_by(|a, b| a.1.total_cmp(&b.1))?;
        let lower_weight: f64 = self.mass[..valley_bin].iter().sum::<f64>() + 0.5 * self.mass[valley_bin];
        Some(DoublePeak {
            low_peak: self.center(lo),
            high_peak: self.center(hi),
            valley_ratio: valley / s[lo].min(s[hi]),
            lower_weight,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublePeak {
    pub low_peak: f64,
    pub high_peak: f64,
    /// Smoothed valley height over the lower of the two peak heights.
    pub valley_ratio: f64,
    /// Mass below the valley.
    pub lower_weight: f64,
}

fn fill(edges: Vec<f64>, samples: &[f64]) -> Histogram {
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    let mut counts = vec![0u64; bins];
    for &x in samples {
        let k = ((x - lo) / (hi - lo) * bins as f64).floor();
        let k = (k.max(0.0) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = samples.len().max(1) as f64;
    Histogram { edges, mass: counts.iter().map(|&c| c as f64 / n).collect() }
}

/// Unit-mass histogram over the sample range.
pub fn energy_histogram(samples: &[f64], bins: usize) -> Result<Histogram> {
    if samples.len() < 1000 {
        return Err(Error::Precondition(format!("histogram needs at least 1000 samples, got {}", samples.len())));
    }
    if bins < 2 {
        return Err(Error::Parameter("histogram needs at least 2 bins".into()));
    }
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1e-12_f64.max(lo.abs() * 1e-12);
    }
    let edges = (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect();
    Ok(fill(edges, samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderConfig {
    pub bins: usize,
    /// Valley over peak below which a histogram counts as bimodal.
    pub valley_threshold: f64,
    pub min_peak_separation: usize,
}

impl Default for OrderConfig {
    fn default() -> Self {
        Self { bins: 50, valley_threshold: 0.5, min_peak_separation: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    FirstOrder,
    SecondOrder,
    Undecided,
}

/// Energy series at one temperature of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub temperature: f64,
    pub site_count: usize,
    /// Energy per site, one entry per measurement.
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEvidence {
    pub temperature: f64,
    pub specific_heat: f64,
    pub binder: f64,
    pub double_peak: Option<DoublePeak>,
    /// Bimodal in the full series and in both halves.
    pub stable_bimodal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub schema: String,
    pub classification: Classification,
    /// Smallest valley ratio seen in the scan (1 if never two peaks).
    pub bimodality: f64,
    pub delta_u: Option<f64>,
    pub theta_star: f64,
    pub specific_heat_peak: f64,
    pub binder_min: f64,
    pub thresholds: OrderConfig,
    pub points: Vec<PointEvidence>,
}

pub const VERDICT_SCHEMA: &str = "gxy-order-verdict/1";

fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n
}

/// Per-site specific heat `beta^2 N var(u)`.
pub fn specific_heat(temperature: f64, site_count: usize, energies: &[f64]) -> f64 {
    site_count as f64 * variance(energies) / (temperature * temperature)
}

/// Energy cumulant `1 - <E^4> / (3 <E^2>^2)`.
pub fn binder_cumulant(site_count: usize, energies: &[f64]) -> f64 {
    let n = energies.len() as f64;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &u in energies {
        let e2 = (u * site_count as f64).powi(2);
        m2 += e2;
        m4 += e2 * e2;
    }
    m2 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return 2.0 / 3.0;
    }
    1.0 - m4 / (3.0 * m2 * m2)
}

/// Decides the transition order from energy histograms over a temperature
/// scan. First order needs a stably bimodal histogram somewhere; latent
/// heat and `theta_star` come from the point whose two peaks carry the most
/// equal weight (interpolated when the equal-weight point is bracketed).
/// Second order needs unimodal histograms everywhere and an interior
/// specific-heat maximum.
pub fn classify_order(points: &[ScanPoint], cfg: &OrderConfig) -> Result<OrderVerdict> {
    if points.is_empty() {
        return Err(Error::Precondition("temperature scan is empty".into()));
    }
    let mut sorted: Vec<&ScanPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.temperature.total_cmp(&b.temperature));
    let mut evidence = Vec::with_capacity(sorted.len());
    for p in &sorted {
        let hist = energy_histogram(&p.energies, cfg.bins)?;
        let bimodal = |h: &Histogram| {
            h.double_peak(cfg.min_peak_separation).filter(|d| d.valley_ratio < cfg.valley_threshold)
        };
        let double_peak = hist.double_peak(cfg.min_peak_separation);
        let half = p.energies.len() / 2;
        let stable = bimodal(&hist).is_some()
            && bimodal(&hist.rebin(&p.energies[..half])).is_some()
            && bimodal(&hist.rebin(&p.energies[half..])).is_some();
        evidence.push(PointEvidence {
            temperature: p.temperature,
            specific_heat: specific_heat(p.temperature, p.site_count, &p.energies),
            binder: binder_cumulant(p.site_count, &p.energies),
            double_peak,
            stable_bimodal: stable,
        });
    }
    let peak_idx = (0..evidence.len())
        .max_by(|&a, &b| evidence[a].specific_heat.total_cmp(&evidence[b].specific_heat))
        .expect("non-empty");
    let c_peak_theta = evidence[peak_idx].temperature;
    let bimodality = evidence
        .iter()
        .filter_map(|e| e.double_peak.map(|d| d.valley_ratio))
        .fold(1.0, f64::min);
    let binder_min = evidence.iter().map(|e| e.binder).fold(f64::INFINITY, f64::min);
    let any_bimodal = evidence
        .iter()
        .any(|e| e.double_peak.is_some_and(|d| d.valley_ratio < cfg.valley_threshold));

    let stable: Vec<usize> = (0..evidence.len()).filter(|&k| evidence[k].stable_bimodal).collect();
    let (classification, delta_u, theta_star) = if !stable.is_empty() {
        let weight = |k: usize| evidence[k].double_peak.expect("bimodal").lower_weight;
        let best = *stable
            .iter()
            .min_by(|&&a, &&b| (weight(a) - 0.5).abs().total_cmp(&(weight(b) - 0.5).abs()))
            .expect("non-empty");
        let d = evidence[best].double_peak.expect("bimodal");
        let mut theta = evidence[best].temperature;
        // neighbouring stable point on the other side of equal weight
        for &k in &stable {
            if k.abs_diff(best) == 1 && (weight(k) - 0.5) * (weight(best) - 0.5) < 0.0 {
                let (w0, w1) = (weight(best), weight(k));
                let (t0, t1) = (evidence[best].temperature, evidence[k].temperature);
                theta = t0 + (0.5 - w0) * (t1 - t0) / (w1 - w0);
            }
        }
        (Classification::FirstOrder, Some(d.high_peak - d.low_peak), theta)
    } else if !any_bimodal && peak_idx > 0 && peak_idx + 1 < evidence.len() {
        (Classification::SecondOrder, None, c_peak_theta)
    } else {
        (Classification::Undecided, None, c_peak_theta)
    };
    Ok(OrderVerdict {
        schema: VERDICT_SCHEMA.into(),
        classification,
        bimodality,
        delta_u,
        theta_star,
        specific_heat_peak: c_peak_theta,
        binder_min,
        thresholds: *cfg,
        points: evidence,
    })
}

/// One CSV row of a temperature scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub theta: f64,
    pub u: SeriesStats,
    pub m_xy: SeriesStats,
    pub m_p: SeriesStats,
    pub rho: Option<SeriesStats>,
    pub specific_heat: f64,
    pub binder: f64,
}

pub fn summarize(temperature: f64, site_count: usize, samples: &[ObservableSample]) -> Result<ScanRow> {
    let col = |f: fn(&ObservableSample) -> f64| samples.iter().map(f).collect::<Vec<_>>();
    let u = col(|s| s.u);
    let rho = if samples.first().is_some_and(|s| s.rho.is_some()) {
        Some(series_stats(&col(|s| s.rho.unwrap_or(0.0)))?)
    } else {
        None
    };
    Ok(ScanRow {
        theta: temperature,
        u: series_stats(&u)?,
        m_xy: series_stats(&col(|s| s.m_xy))?,
        m_p: series_stats(&col(|s| s.m_p))?,
        rho,
        specific_heat: specific_heat(temperature, site_count, &u),
        binder: binder_cumulant(site_count, &u),
    })
}

pub const SCAN_CSV_HEADER: &str = "theta,u,u_err,m_xy,m_xy_err,m_p,m_p_err,rho,rho_err,C,V";

/// Scan rows as CSV (no comment header); empty `rho` cells for the
/// generalized model.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::new();
    out.push_str(SCAN_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let (rho, rho_err) = match r.rho {
            Some(s) => (format!("{}", s.mean), format!("{}", s.error)),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.theta, r.u.mean, r.u.error, r.m_xy.mean, r.m_xy.error, r.m_p.mean, r.m_p.error, rho, rho_err,
            r.specific_heat, r.binder
        )
        .expect("string write");
    }
    out
}
