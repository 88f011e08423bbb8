use proptest::prelude::*;

use vsph::calibration::calibrate;
use vsph::classification::classify_all;
use vsph::forces::{wall_delta_v, WallCondition};
use vsph::geometry::build_neighbors;
use vsph::kernel::{KernelFamily, KernelSpec};
use vsph::neighborhood::Neighborhood;
use vsph::ppe::{compute_source, PressureSystem};
use vsph::staggered::{pair_masses, raw_alpha};
use vsph::Vec2;

const D0: f64 = 0.01;

fn kernel() -> KernelSpec<f64> {
    KernelSpec::new(KernelFamily::ProposedQuartic, 2.5 * D0, D0).unwrap()
}

fn cloud() -> impl Strategy<Value = Vec<Vec2>> {
    prop::collection::vec((0.0..0.1f64, 0.0..0.1f64), 2..120)
        .prop_map(|pts| pts.into_iter().map(|(x, y)| Vec2::from_fn(|k| if k == 0 { x } else { y })).collect())
}

fn vec2() -> impl Strategy<Value = Vec2> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| Vec2::from_fn(|k| if k == 0 { x } else { y }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_masses_conserve_mass(neighbors in cloud(), mass in 0.01..10.0f64) {
        let k = kernel();
        let centre = Vec2::from_fn(|_| 0.05);
        let inside: Vec<Vec2> = neighbors.into_iter().filter(|x| (*x - centre).norm() < k.h()).collect();
        prop_assume!(!inside.is_empty());
        let alpha = raw_alpha(centre, &inside, &k);
        let total: f64 = pair_masses(centre, mass, alpha, &inside, &k).iter().sum();
        prop_assert!((total - mass).abs() <= 1e-12 * mass);
    }

    #[test]
    fn operator_is_symmetric_and_semidefinite(positions in cloud(), seed in 0u64..1000) {
        let k = kernel();
        let constants = calibrate::<f64, 2>(D0, &k, 1000.0).unwrap();
        let table = build_neighbors(&positions, &[], k.h());
        let cl = classify_all(&positions, &[], &table, &k, &constants, 0.0);
        let nb = Neighborhood { positions: &positions, ghosts: &[], table: &table, kernel: &k };
        let system = PressureSystem::assemble(&nb, &cl.weights, &cl.classes, 1000.0);
        let n = positions.len();
        let u: Vec<f64> = (0..n).map(|i| ((i as u64 * 7919 + seed) % 101) as f64 - 50.0).collect();
        let v: Vec<f64> = (0..n).map(|i| ((i as u64 * 104_729 + seed) % 97) as f64 - 48.0).collect();
        let lu = system.apply_laplacian(&u);
        let lv = system.apply_laplacian(&v);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let scale = dot(&lu, &lu).sqrt() * dot(&v, &v).sqrt() + f64::MIN_POSITIVE;
        prop_assert!((dot(&lu, &v) - dot(&u, &lv)).abs() <= 1e-10 * scale);
        prop_assert!(dot(&u, &lu) >= -1e-10 * dot(&lu, &lu).sqrt() * dot(&u, &u).sqrt());
    }

    #[test]
    fn uniform_velocity_has_no_source(positions in cloud(), v in vec2()) {
        let k = kernel();
        let constants = calibrate::<f64, 2>(D0, &k, 1000.0).unwrap();
        let table = build_neighbors(&positions, &[], k.h());
        let cl = classify_all(&positions, &[], &table, &k, &constants, 0.0);
        let nb = Neighborhood { positions: &positions, ghosts: &[], table: &table, kernel: &k };
        let source = compute_source(&nb, &vec![v; positions.len()], &cl.alpha_hat(), &[], 1e-3).unwrap();
        prop_assert!(source.iter().all(|d| d.abs() <= 1e-10 * v.norm() / (1e-3 * D0)));
    }

    #[test]
    fn approaching_wall_motion_is_fully_cancelled(
        v in vec2(), ghost in vec2(), cn in 0.0..1.0f64, ct in 0.0..1.0f64, angle in 0.0..std::f64::consts::TAU,
    ) {
        let normal = Vec2::from_fn(|k| if k == 0 { angle.cos() } else { angle.sin() });
        let delta = wall_delta_v(v, ghost, normal, WallCondition::new(cn, ct).unwrap());
        let relative = ghost - v;
        let normal_in = relative.dot(&normal);
        let expected_normal = if normal_in > 0.0 { normal_in } else { cn * normal_in };
        prop_assert!((delta.dot(&normal) - expected_normal).abs() <= 1e-12 * (1.0 + relative.norm()));
        let tangent = Vec2::from_fn(|k| if k == 0 { -normal[1] } else { normal[0] });
        prop_assert!((delta.dot(&tangent) - ct * relative.dot(&tangent)).abs() <= 1e-12 * (1.0 + relative.norm()));
    }
}
