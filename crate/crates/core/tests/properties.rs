use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use gxy_core::meanfield::single_site_partition;
use gxy_core::model::{chemical_potential, energy, local_energy_delta, wrap_phi, KahanSum};
use gxy_core::{LatticeGeometry, ModelSpec, SpinConfiguration, Variant};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![
        (1u32..=20).prop_map(|p| Variant::GeneralizedXY { p }),
        (0.01f64..1.5).prop_map(|epsilon| Variant::SquareDitch { epsilon }),
    ]
}

fn config(dim: usize, len: usize, seed: u64) -> SpinConfiguration {
    let geom = Arc::new(LatticeGeometry::build(dim, len).unwrap());
    SpinConfiguration::random(geom, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wrapped_angles_are_congruent(phi in -1e3f64..1e3) {
        let w = wrap_phi(phi);
        prop_assert!((-PI..PI).contains(&w));
        let turns = (phi - w) / TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn local_delta_matches_full_recomputation(
        v in variant(), dim in 2usize..=3, seed in any::<u64>(), site in 0usize..27,
        theta in 0.0f64..PI, phi in -PI..PI,
    ) {
        let spec = ModelSpec::new(v, 1.0).unwrap();
        let mut cfg = config(dim, 3, seed);
        let site = site % cfg.site_count();
        let before = energy(&spec, &cfg);
        let delta = local_energy_delta(&spec, &cfg, site, theta, phi);
        cfg.set(site, theta, phi);
        prop_assert!((energy(&spec, &cfg) - before - delta).abs() < 1e-10);
    }

    #[test]
    fn global_rotation_leaves_energy_invariant(v in variant(), seed in any::<u64>(), alpha in -PI..PI) {
        let spec = ModelSpec::new(v, 1.0).unwrap();
        let cfg = config(2, 4, seed);
        let rotated = SpinConfiguration::from_angles(
            Arc::clone(cfg.geometry()),
            cfg.theta.clone(),
            cfg.phi.iter().map(|f| f + alpha).collect(),
        ).unwrap();
        prop_assert!((energy(&spec, &cfg) - energy(&spec, &rotated)).abs() < 1e-12);
    }

    #[test]
    fn energy_is_bounded_by_the_bond_count(v in variant(), seed in any::<u64>()) {
        let spec = ModelSpec::new(v, 1.0).unwrap();
        let cfg = config(3, 3, seed);
        let bonds = cfg.geometry().bond_count() as f64;
        prop_assert!(energy(&spec, &cfg).abs() <= bonds);
    }

    #[test]
    fn compensated_sum_is_exact_on_cancelling_terms(xs in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let mut acc = KahanSum::default();
        acc.add(1e16);
        for &x in &xs {
            acc.add(x);
        }
        acc.add(-1e16);
        for &x in &xs {
            acc.add(-x);
        }
        prop_assert!(acc.value().abs() < 1e-6);
    }

    #[test]
    fn chemical_potential_sign_follows_the_ditch_mass(eps in 0.001f64..1.5, beta in 0.1f64..10.0) {
        let nu = chemical_potential(eps, beta).unwrap();
        let q = eps.sin();
        prop_assert!(((q / (1.0 - q)).ln() / beta - nu).abs() < 1e-12 * nu.abs().max(1.0));
        // nu scales as 1 / beta
        let half = chemical_potential(eps, 2.0 * beta).unwrap();
        prop_assert!((2.0 * half - nu).abs() < 1e-12 * nu.abs().max(1.0));
    }

    #[test]
    fn site_magnetization_grows_with_field(p in 1u32..=20, h in 0.0f64..20.0, dh in 0.01f64..2.0) {
        let a = single_site_partition(h, p);
        let b = single_site_partition(h + dh, p);
        prop_assert!(b.m > a.m);
        prop_assert!(b.ln_z > a.ln_z);
        // Cauchy-Schwarz: <s cos>^2 <= <s^2 cos^2>
        prop_assert!(a.m * a.m <= a.m2 + 1e-12);
        prop_assert!(b.m <= 1.0);
    }
}
