use proptest::prelude::*;
use snapcs_core::metrics::{ergas, psnr, psnr_band_mean, rmse, ssim, QualityReport};
use snapcs_core::HsiCube;

fn cube(rows: usize, cols: usize, bands: usize) -> impl Strategy<Value = HsiCube> {
    prop::collection::vec(0.05f64..1.0, rows * cols * bands)
        .prop_map(move |v| HsiCube::from_vec(rows, cols, bands, v).unwrap())
}

fn reverse_bands(c: &HsiCube) -> HsiCube {
    let b = c.bands();
    HsiCube::from_fn(c.rows(), c.cols(), b, |i, j, k| c.get(i, j, b - 1 - k))
}

/// Direct windowed SSIM: 2D Gaussian weights, every valid 11x11 window.
fn ssim_textbook(x: &[f64], y: &[f64], rows: usize, cols: usize) -> f64 {
    let (win, sigma) = (11usize, 1.5f64);
    let c = 5.0;
    let mut w = vec![0.0; win * win];
    for u in 0..win {
        for v in 0..win {
            let d2 = (u as f64 - c).powi(2) + (v as f64 - c).powi(2);
            w[u * win + v] = (-d2 / (2.0 * sigma * sigma)).exp();
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let mut acc = 0.0;
    let mut n = 0;
    for i in 0..=rows - win {
        for j in 0..=cols - win {
            let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for u in 0..win {
                for v in 0..win {
                    let q = w[u * win + v];
                    let (a, b) = (x[(i + u) * cols + j + v], y[(i + u) * cols + j + v]);
                    mx += q * a;
                    my += q * b;
                    sxx += q * a * a;
                    syy += q * b * b;
                    sxy += q * a * b;
                }
            }
            let (vx, vy, cxy) = (sxx - mx * mx, syy - my * my, sxy - mx * my);
            acc += (2.0 * mx * my + c1) * (2.0 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            n += 1;
        }
    }
    acc / n as f64
}

#[test]
fn ssim_matches_direct_formula() {
    let x = HsiCube::from_fn(16, 16, 1, |i, j, _| 0.5 + 0.3 * ((i as f64) * 0.9).sin() * ((j as f64) * 0.4).cos());
    let y = HsiCube::from_fn(16, 16, 1, |i, j, _| {
        (x.get(i, j, 0) * 0.8 + 0.05 + 0.02 * (((i * 16 + j) * 7919 % 101) as f64 / 101.0 - 0.5)).clamp(0.0, 1.0)
    });
    let fast = ssim(&x, &y).unwrap();
    let slow = ssim_textbook(x.band(0), y.band(0), 16, 16);
    assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
    assert!(fast < 1.0 && fast > 0.0);
}

proptest! {
    #[test]
    fn band_order_does_not_matter(a in cube(12, 12, 3), b in cube(12, 12, 3)) {
        let (ra, rb) = (reverse_bands(&a), reverse_bands(&b));
        prop_assert!((psnr(&a, &b).unwrap() - psnr(&ra, &rb).unwrap()).abs() < 1e-9);
        prop_assert!((rmse(&a, &b).unwrap() - rmse(&ra, &rb).unwrap()).abs() < 1e-12);
        prop_assert!((ssim(&a, &b).unwrap() - ssim(&ra, &rb).unwrap()).abs() < 1e-12);
        prop_assert!((ergas(&a, &b, 1.0).unwrap() - ergas(&ra, &rb, 1.0).unwrap()).abs() < 1e-9);
        prop_assert!((psnr_band_mean(&a, &b).unwrap() - psnr_band_mean(&ra, &rb).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn psnr_falls_as_error_grows(a in cube(11, 11, 2), d in prop::collection::vec(-1.0f64..1.0, 242), s in 0.01f64..0.5) {
        let noise = HsiCube::from_vec(11, 11, 2, d).unwrap();
        prop_assume!(noise.norm() > 1e-2);
        let small = a.combine(1.0, &noise, s).unwrap();
        let large = a.combine(1.0, &noise, 2.0 * s).unwrap();
        prop_assert!(psnr(&a, &large).unwrap() < psnr(&a, &small).unwrap());
    }

    #[test]
    fn rmse_squared_times_count_is_squared_error(a in cube(11, 11, 2), b in cube(11, 11, 2)) {
        let sse: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum();
        let r = rmse(&a, &b).unwrap();
        prop_assert!((r * r * 242.0 - sse).abs() < 1e-10 * (1.0 + sse));
    }

    #[test]
    fn report_agrees_with_individual_metrics(a in cube(11, 11, 2), b in cube(11, 11, 2)) {
        let q = QualityReport::compute(&a, &b).unwrap();
        prop_assert_eq!(q.psnr, psnr(&a, &b).unwrap());
        prop_assert_eq!(q.ssim, ssim(&a, &b).unwrap());
        prop_assert_eq!(q.band_psnr.len(), 2);
    }
}
