use proptest::prelude::*;
use snapcs_core::imaging::{adjoint, apply_normal_operator, cassi_forward, forward, generate_mask, linear_dispersion, pan_forward};
use snapcs_core::{HsiCube, Measurement, Plane, SystemMode, SystemModel};

fn cube(rows: usize, cols: usize, bands: usize) -> impl Strategy<Value = HsiCube> {
    prop::collection::vec(-1.0f64..1.0, rows * cols * bands)
        .prop_map(move |v| HsiCube::from_vec(rows, cols, bands, v).unwrap())
}

fn system(rows: usize, cols: usize, bands: usize, mode: SystemMode) -> impl Strategy<Value = SystemModel> {
    (any::<u64>(), 1usize..3, prop::collection::vec(0.2f64..1.5, bands), prop::collection::vec(0.2f64..1.5, bands))
        .prop_map(move |(seed, step, resp, pan)| {
            let mask = generate_mask(rows, cols, 0.5, seed).unwrap();
            SystemModel::with_parts(mask, linear_dispersion(bands, step), resp, pan, mode).unwrap()
        })
}

fn measurement_like(sys: &SystemModel, seed: u64) -> Measurement {
    let mut m = Measurement::zeros(sys);
    let mut x = seed as f64 * 0.001 + 0.3;
    let mut next = || {
        x = (x * 3.7 + 0.123).fract();
        x - 0.5
    };
    m.cassi.as_mut_slice().iter_mut().for_each(|v| *v = next());
    if let Some(p) = m.pan.as_mut() {
        p.as_mut_slice().iter_mut().for_each(|v| *v = next());
    }
    m
}

proptest! {
    #[test]
    fn adjoint_identity(sys in system(8, 8, 4, SystemMode::DualCamera), f in cube(8, 8, 4), seed in 0u64..10_000) {
        let y = measurement_like(&sys, seed);
        let lhs = forward(&f, &sys).unwrap().dot(&y);
        let rhs = f.dot(&adjoint(&y, &sys).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * f.norm() * y.norm());
    }

    #[test]
    fn normal_operator_symmetric_psd(sys in system(6, 7, 3, SystemMode::DualCamera), a in cube(6, 7, 3), b in cube(6, 7, 3)) {
        let na = apply_normal_operator(&a, &sys).unwrap();
        let nb = apply_normal_operator(&b, &sys).unwrap();
        prop_assert!((na.dot(&b) - a.dot(&nb)).abs() <= 1e-12 * (1.0 + a.norm() * b.norm()));
        prop_assert!(a.dot(&na) >= -1e-12);
        let fa = forward(&a, &sys).unwrap();
        prop_assert!((a.dot(&na) - fa.dot(&fa)).abs() <= 1e-10 * (1.0 + fa.dot(&fa)));
    }

    #[test]
    fn dual_camera_cassi_plane_matches_cassi(sys in system(7, 5, 4, SystemMode::DualCamera), f in cube(7, 5, 4)) {
        let dual = forward(&f, &sys).unwrap();
        let single = forward(&f, &sys.with_mode(SystemMode::Cassi)).unwrap();
        prop_assert_eq!(&dual.cassi, &single.cassi);
        prop_assert!(single.pan.is_none());
        prop_assert_eq!(dual.pan.unwrap(), pan_forward(&f, &sys).unwrap());
    }

    #[test]
    fn forward_is_linear(sys in system(5, 5, 3, SystemMode::Cassi), a in cube(5, 5, 3), b in cube(5, 5, 3), s in -2.0f64..2.0) {
        let combo = a.combine(1.0, &b, s).unwrap();
        let lhs = cassi_forward(&combo, &sys).unwrap();
        let pa = cassi_forward(&a, &sys).unwrap();
        let pb = cassi_forward(&b, &sys).unwrap();
        for ((l, x), y) in lhs.as_slice().iter().zip(pa.as_slice()).zip(pb.as_slice()) {
            prop_assert!((l - (x + s * y)).abs() < 1e-12);
        }
    }

    #[test]
    fn mask_is_seed_deterministic(seed in any::<u64>()) {
        prop_assert_eq!(generate_mask(9, 11, 0.3, seed).unwrap(), generate_mask(9, 11, 0.3, seed).unwrap());
    }
}

#[test]
fn cassi_hand_example() {
    // 2x2 image, 2 bands, all-open mask: band 1 lands one row lower.
    let sys = SystemModel::new(Plane::filled(2, 2, 1.0), 2, SystemMode::Cassi).unwrap();
    let f = HsiCube::from_fn(2, 2, 2, |i, j, b| (1 + i * 2 + j + 4 * b) as f64);
    let y = cassi_forward(&f, &sys).unwrap();
    assert_eq!(y.dims(), (3, 2));
    assert_eq!(y.as_slice(), &[1.0, 2.0, 3.0 + 5.0, 4.0 + 6.0, 7.0, 8.0]);
}
