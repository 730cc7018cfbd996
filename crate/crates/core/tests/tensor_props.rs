use proptest::prelude::*;
use snapcs_core::linalg::{symmetric_eigen, Matrix};
use snapcs_core::{hosvd, Mode, Tensor3};

fn tensor(max: usize) -> impl Strategy<Value = Tensor3> {
    (1..=max, 1..=max, 1..=max).prop_flat_map(|(a, b, c)| {
        prop::collection::vec(-5.0f64..5.0, a * b * c).prop_map(move |v| Tensor3::from_vec([a, b, c], v).unwrap())
    })
}

fn rel_err(a: &Tensor3, b: &Tensor3) -> f64 {
    let num: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum();
    num.sqrt() / b.frobenius_norm().max(1e-300)
}

proptest! {
    #[test]
    fn fold_inverts_unfold(t in tensor(6), m in 1usize..=3) {
        let mode = Mode::from_index(m).unwrap();
        let back = Tensor3::fold(&t.unfold(mode), mode, t.dims()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn unfolding_keeps_norm(t in tensor(6), m in 1usize..=3) {
        let u = t.unfold(Mode::from_index(m).unwrap());
        let n: f64 = u.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((n - t.frobenius_norm()).abs() <= 1e-12 * (1.0 + n));
    }

    #[test]
    fn hosvd_round_trip_and_energy(t in tensor(7)) {
        let tf = hosvd(&t).unwrap();
        prop_assert!(rel_err(&tf.reconstruct().unwrap(), &t) < 1e-9 || t.frobenius_norm() == 0.0);
        prop_assert!((tf.core.frobenius_norm() - t.frobenius_norm()).abs() < 1e-9 * (1.0 + t.frobenius_norm()));
        for u in &tf.factors {
            prop_assert!(u.orthonormality_defect() < 1e-10);
        }
    }

    #[test]
    fn products_along_distinct_modes_commute(t in tensor(5), seed in 0u64..1000) {
        let [a, b, _] = t.dims();
        let mut x = seed as f64;
        let mut next = || { x = (x * 1.37 + 0.61) % 3.0; x - 1.5 };
        let ma = Matrix::from_fn(3, a, |_, _| next());
        let mb = Matrix::from_fn(2, b, |_, _| next());
        let one_two = t.mode_product(&ma, Mode::One).unwrap().mode_product(&mb, Mode::Two).unwrap();
        let two_one = t.mode_product(&mb, Mode::Two).unwrap().mode_product(&ma, Mode::One).unwrap();
        prop_assert!(rel_err(&one_two, &two_one) < 1e-12 || two_one.frobenius_norm() == 0.0);
    }

    #[test]
    fn same_mode_products_compose(t in tensor(5)) {
        let d = t.dims()[2];
        let a = Matrix::from_fn(4, d, |i, j| (i as f64 - j as f64 * 0.5).sin());
        let b = Matrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64 * 0.1 - 0.5);
        let stepwise = t.mode_product(&a, Mode::Three).unwrap().mode_product(&b, Mode::Three).unwrap();
        let fused = t.mode_product(&b.matmul(&a).unwrap(), Mode::Three).unwrap();
        prop_assert!(rel_err(&stepwise, &fused) < 1e-12 || fused.frobenius_norm() == 0.0);
    }

    #[test]
    fn eigen_reconstructs_gram(m in (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3.0f64..3.0, r * c).prop_map(move |v| Matrix::from_vec(r, c, v).unwrap())
    })) {
        let g = m.gram();
        let e = symmetric_eigen(&g).unwrap();
        let n = g.rows();
        let scale = 1.0 + g.as_slice().iter().map(|v| v.abs()).fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|k| e.vectors.get(i, k) * e.values[k] * e.vectors.get(j, k)).sum();
                prop_assert!((v - g.get(i, j)).abs() < 1e-10 * scale);
            }
        }
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn group_shaped_hosvd_round_trip() {
    let t = Tensor3::from_fn([25, 8, 45], |i, j, k| ((i * 7 + j * 3 + k) as f64 * 0.013).sin() + 0.01 * (k as f64));
    let tf = hosvd(&t).unwrap();
    assert!(rel_err(&tf.reconstruct().unwrap(), &t) < 1e-8);
    assert_eq!(tf.core.dims(), [25, 8, 45]);
    for u in &tf.factors {
        assert!(u.orthonormality_defect() < 1e-10);
    }
}
