mod common;

use common::{pair_cluster_oracle, single_site_oracle};
use gxy_core::meanfield::{self, single_site_partition, solve_mf, MeanField, Z};
use gxy_core::tsc::{pair_partition, solve_tsc_with, ClusterBond, TwoSiteCluster};
use gxy_core::variational::{best_ordered, ordered_minima, Landscape, SolveOptions, VariationalModel};
use gxy_core::OrderType;

#[test]
fn single_site_matches_tensor_quadrature() {
    for p in [1, 4, 11] {
        for h in [0.0, 0.3, 2.5, 12.0] {
            let got = single_site_partition(h, p);
            let [ln_z, m, m1] = single_site_oracle(p, h, 400, 256);
            assert!((got.ln_z - ln_z).abs() < 1e-10, "p={p} h={h}: {} vs {ln_z}", got.ln_z);
            assert!((got.m - m).abs() < 1e-10, "p={p} h={h}");
            assert!((got.m1 - m1).abs() < 1e-10, "p={p} h={h}");
        }
    }
}

#[test]
fn pair_partition_matches_tensor_quadrature() {
    for (p, theta, lambda) in [(1, 1.0, 0.0), (1, 1.0, 0.2), (1, 1.0, 0.6), (4, 0.9, 0.3), (12, 0.85, 0.5)] {
        let got = pair_partition(lambda, theta, p).unwrap();
        let beta = 1.0 / theta;
        let [ln_z, m, bond, m1] = pair_cluster_oracle(p, beta, beta * (Z - 1.0) * lambda, 160, 96);
        let tag = format!("p={p} theta={theta} lambda={lambda}");
        assert!((got.ln_z - ln_z).abs() < 1e-9, "{tag}: ln Z {} vs {ln_z}", got.ln_z);
        assert!((got.m - m).abs() < 1e-9, "{tag}: m {} vs {m}", got.m);
        assert!((got.bond - bond).abs() < 1e-9, "{tag}: bond {} vs {bond}", got.bond);
        assert!((got.m1 - m1).abs() < 1e-9, "{tag}: m1 {} vs {m1}", got.m1);
    }
}

#[test]
fn continuous_transitions_sit_at_the_instability() {
    for p in 1..=5 {
        let r = solve_mf(p, &SolveOptions::default()).unwrap();
        assert_eq!(r.order_type, OrderType::II);
        assert_eq!(r.theta_star, meanfield::instability_temperature(p));
    }
    // planar limit: z <sin^2 cos^2> = 6 / 3
    assert!((meanfield::instability_temperature(1) - 2.0).abs() < 1e-15);
}

#[test]
fn mean_field_coexistence_is_self_consistent() {
    for p in [11, 20] {
        let r = solve_mf(p, &SolveOptions::default()).unwrap();
        let m = r.m_bar_p.unwrap();
        let h = Z * m / r.theta_star;
        assert!((single_site_partition(h, p).m - m).abs() < 1e-9, "p={p}");
        // equal free energies with M = 0 at coexistence
        let f = meanfield::mf_free_energy(m, r.theta_star, p).unwrap();
        assert!(f.abs() < 1e-7, "p={p}: f = {f}");
        // u = -(z/2) M^2 on the ordered side, 0 on the disordered side
        assert!((r.delta_u.unwrap() - 0.5 * Z * m * m).abs() < 1e-12);
        assert!((r.m_bar_1.unwrap() - single_site_partition(h, p).m1).abs() < 1e-8);
    }
}

#[test]
fn decoupled_cluster_reproduces_mean_field() {
    let opts = SolveOptions::default();
    for p in [5, 8, 11] {
        let decoupled = TwoSiteCluster { bond: ClusterBond::MeanField, ..TwoSiteCluster::new(p) };
        let a = solve_tsc_with(decoupled, &opts).unwrap();
        let b = solve_mf(p, &opts).unwrap();
        assert_eq!(a.order_type, b.order_type, "p={p}");
        assert!((a.theta_star - b.theta_star).abs() < 1e-6, "p={p}: {} vs {}", a.theta_star, b.theta_star);
    }
}

#[test]
fn cluster_coexistence_is_stationary() {
    let model = TwoSiteCluster::new(12);
    let r = solve_tsc_with(model, &SolveOptions::default()).unwrap();
    assert_eq!(r.order_type, OrderType::I);
    let land = model.landscape(r.theta_star);
    let (lambda, df) = best_ordered(&land, model.x_max(), 80).unwrap();
    assert!(df.abs() < 1e-8, "free-energy gap {df}");
    assert!(land.gradient(lambda).abs() < 1e-9);
    let s = land.tsc_state(lambda);
    // pair and single-site magnetizations agree at a stationary point
    assert!((s.m_p - s.m_site).abs() < 1e-9);
    // above the transition only the disordered minimum is left or wins
    let hot = model.landscape(r.theta_star * 1.01);
    assert!(best_ordered(&hot, model.x_max(), 80).map_or(true, |(_, df)| df > 0.0));
}

#[test]
fn cluster_transition_lies_below_its_instability_ordering() {
    // type II rows: transition at the linear instability
    let model = TwoSiteCluster::new(7);
    let r = solve_tsc_with(model, &SolveOptions::default()).unwrap();
    assert_eq!(r.order_type, OrderType::II);
    assert_eq!(r.theta_star, r.theta_instability);
    let cold = model.landscape(r.theta_star * 0.98);
    assert!(!ordered_minima(&cold, model.x_max(), 80).is_empty());
}

#[test]
fn window_without_transition_is_reported() {
    let opts = SolveOptions { window: (2.5, 3.0), ..Default::default() };
    assert!(solve_mf(5, &opts).is_err());
    assert!(MeanField { p: 5 }.instability_temperature((2.5, 3.0)).is_err());
}
