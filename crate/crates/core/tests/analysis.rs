use gxy_core::analysis::{
    binder_cumulant, classify_order, energy_histogram, jackknife_error, series_stats, specific_heat, Classification,
    OrderConfig, ScanPoint,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

const SITES: usize = 512;

/// Energies drawn from a two-Gaussian mixture; `weight` is the mass of the
/// low-energy (ordered) peak.
fn mixture(weight: f64, low: f64, high: f64, width: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let (a, b) = (Normal::new(low, width).unwrap(), Normal::new(high, width).unwrap());
    (0..n).map(|_| if rng.gen::<f64>() < weight { a.sample(&mut rng) } else { b.sample(&mut rng) }).collect()
}

/// Scan across a coexistence point at `theta = 1`: ordered weight falls
/// linearly from 0.9 to 0.1 across the grid.
fn first_order_scan(shift: f64) -> Vec<ScanPoint> {
    (0..5)
        .map(|k| {
            let w = 0.9 - 0.2 * k as f64;
            ScanPoint {
                temperature: 0.98 + 0.01 * k as f64,
                site_count: SITES,
                energies: mixture(w, -1.5 + shift, -0.5 + shift, 0.05, 40_000, k),
            }
        })
        .collect()
}

/// Unimodal energies whose variance peaks in the middle of the grid.
fn second_order_scan() -> Vec<ScanPoint> {
    (0..7)
        .map(|k| {
            let width = 0.02 + 0.03 * (1.0 - (k as f64 - 3.0).abs() / 3.0);
            ScanPoint {
                temperature: 1.0 + 0.05 * k as f64,
                site_count: SITES,
                energies: mixture(1.0, -1.0 + 0.1 * k as f64, 0.0, width, 20_000, 100 + k),
            }
        })
        .collect()
}

#[test]
fn bimodal_scan_is_first_order_with_latent_heat() {
    let v = classify_order(&first_order_scan(0.0), &OrderConfig::default()).unwrap();
    assert_eq!(v.classification, Classification::FirstOrder);
    // histogram peaks sit within one bin of the mixture centres
    let du = v.delta_u.unwrap();
    assert!((du - 1.0).abs() < 0.05, "delta_u = {du}");
    // equal weight is reached at the middle temperature
    assert!((v.theta_star - 1.0).abs() < 0.003, "theta* = {}", v.theta_star);
    assert!(v.bimodality < 0.5);
}

#[test]
fn unimodal_scan_is_second_order_at_specific_heat_peak() {
    let v = classify_order(&second_order_scan(), &OrderConfig::default()).unwrap();
    assert_eq!(v.classification, Classification::SecondOrder);
    assert_eq!(v.delta_u, None);
    assert!((v.theta_star - 1.15).abs() < 1e-12);
}

#[test]
fn monotone_specific_heat_is_undecided() {
    let mut scan = second_order_scan();
    scan.truncate(3);
    let v = classify_order(&scan, &OrderConfig::default()).unwrap();
    assert_eq!(v.classification, Classification::Undecided);
}

#[test]
fn verdict_ignores_point_order_and_energy_shift() {
    let cfg = OrderConfig::default();
    let base = classify_order(&first_order_scan(0.0), &cfg).unwrap();
    let mut reversed = first_order_scan(0.0);
    reversed.reverse();
    assert_eq!(classify_order(&reversed, &cfg).unwrap(), base);
    let shifted = classify_order(&first_order_scan(3.25), &cfg).unwrap();
    assert_eq!(shifted.classification, base.classification);
    assert!((shifted.delta_u.unwrap() - base.delta_u.unwrap()).abs() < 1e-9);
    assert!((shifted.theta_star - base.theta_star).abs() < 1e-12);
}

#[test]
fn specific_heat_and_binder_of_known_distributions() {
    // var(u) = w^2 for u = +-w with equal weight
    let u: Vec<f64> = (0..1000).map(|k| if k % 2 == 0 { -0.1 } else { 0.1 }).collect();
    assert!((specific_heat(2.0, 100, &u) - 100.0 * 0.01 / 4.0).abs() < 1e-12);
    // constant energy: E^4 = E^2^2
    assert!((binder_cumulant(10, &[-0.7; 500]) - 2.0 / 3.0).abs() < 1e-12);
    // two equal peaks at +-a give the same value
    assert!((binder_cumulant(10, &u) - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn error_of_independent_samples_scales_as_root_n() {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    for n in [4_000, 16_000, 64_000] {
        let xs: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let s = series_stats(&xs).unwrap();
        let expected = 1.0 / (n as f64).sqrt();
        assert!((s.error / expected - 1.0).abs() < 0.15, "n={n}: {} vs {expected}", s.error);
        assert!(s.tau_int < 0.7, "tau_int {}", s.tau_int);
    }
}

#[test]
fn correlated_series_error_includes_autocorrelation() {
    // AR(1) with coefficient a: tau_int = (1 + a) / (2 (1 - a))
    let a: f64 = 0.8;
    let normal = Normal::new(0.0, (1.0 - a * a).sqrt()).unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    let mut x = 0.0;
    let xs: Vec<f64> = (0..200_000)
        .map(|_| {
            x = a * x + normal.sample(&mut rng);
            x
        })
        .collect();
    let s = series_stats(&xs).unwrap();
    let tau = (1.0 + a) / (2.0 * (1.0 - a));
    assert!((s.tau_int / tau - 1.0).abs() < 0.15, "tau_int {} vs {tau}", s.tau_int);
    let expected = (2.0 * tau / xs.len() as f64).sqrt();
    assert!((s.error / expected - 1.0).abs() < 0.25, "{} vs {expected}", s.error);
}

#[test]
fn jackknife_of_mean_matches_standard_error() {
    let xs: Vec<f64> = (0..1000).map(|k| ((k * 37) % 101) as f64).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let jk = jackknife_error(&xs, 1, |s| s.iter().sum::<f64>() / s.len() as f64);
    // delete-one jackknife of the mean is the standard error exactly
    assert!((jk - sd / n.sqrt()).abs() < 1e-9 * jk);
}

#[test]
fn histograms_have_unit_mass_and_reject_short_series() {
    let xs = mixture(0.5, 0.0, 1.0, 0.1, 5000, 3);
    let h = energy_histogram(&xs, 40).unwrap();
    assert!((h.mass.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert_eq!(h.edges.len(), 41);
    assert!(energy_histogram(&xs[..999], 40).is_err());
    assert!(series_stats(&xs[..99]).is_err());
}
