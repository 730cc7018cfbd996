use proptest::prelude::*;
use snapcs_core::patch::{aggregate, build_group, match_all, match_blocks, patch_distance, plan_grid};
use snapcs_core::{HsiCube, Position};

fn cube(rows: usize, cols: usize, bands: usize) -> impl Strategy<Value = HsiCube> {
    prop::collection::vec(0.0f64..1.0, rows * cols * bands)
        .prop_map(move |v| HsiCube::from_vec(rows, cols, bands, v).unwrap())
}

proptest! {
    #[test]
    fn aggregating_unmodified_groups_gives_counts_times_image(f in cube(20, 20, 4), k in 1usize..8, step in 1usize..5) {
        let s = 5;
        let grid = plan_grid(20, 20, s, step).unwrap();
        let groups: Vec<_> = match_all(&f, &grid, k, 6, 1)
            .unwrap()
            .iter()
            .map(|m| build_group(&f, m, s).unwrap())
            .collect();
        let (sum, counts) = aggregate(groups.iter().map(|g| (g, &g.stacked)), f.dims(), s).unwrap();
        prop_assert!(counts.as_slice().iter().all(|&c| c >= 1.0));
        let expect: Vec<f64> = counts.as_slice().iter().zip(f.as_slice()).map(|(c, v)| c * v).collect();
        let num: f64 = sum.as_slice().iter().zip(&expect).map(|(a, b)| (a - b) * (a - b)).sum();
        let den: f64 = expect.iter().map(|v| v * v).sum();
        prop_assert!(num.sqrt() <= 1e-12 * den.sqrt());
    }

    #[test]
    fn distance_is_symmetric_and_zero_on_self(f in cube(9, 9, 3), a in (0usize..6, 0usize..6), b in (0usize..6, 0usize..6)) {
        let (pa, pb) = (Position::new(a.0, a.1), Position::new(b.0, b.1));
        prop_assert_eq!(patch_distance(&f, pa, pb, 4), patch_distance(&f, pb, pa, 4));
        prop_assert_eq!(patch_distance(&f, pa, pa, 4), 0.0);
    }

    #[test]
    fn matching_is_deterministic_and_sorted(f in cube(16, 16, 2), r in 0usize..12, c in 0usize..12, k in 1usize..30) {
        let anchor = Position::new(r, c);
        let m1 = match_blocks(&f, anchor, 5, k, 4).unwrap();
        let m2 = match_blocks(&f, anchor, 5, k, 4).unwrap();
        prop_assert_eq!(&m1, &m2);
        prop_assert_eq!(m1.len(), k);
        prop_assert_eq!(m1[0], anchor);
        for p in &m1 {
            prop_assert!(p.row.abs_diff(r) <= 4 && p.col.abs_diff(c) <= 4);
        }
        let span = |x: usize| (x.min(4) + (11 - x).min(4)) + 1;
        let distinct = k.min(span(r) * span(c));
        let d: Vec<f64> = m1[1..distinct].iter().map(|&p| patch_distance(&f, anchor, p, 5)).collect();
        prop_assert!(d.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn full_scale_grid_covers_every_pixel() {
    let grid = plan_grid(256, 256, 5, 4).unwrap();
    assert_eq!(grid.anchors.len(), 64 * 64);
    let mut covered = vec![false; 256 * 256];
    for a in &grid.anchors {
        for dr in 0..5 {
            for dc in 0..5 {
                covered[(a.row + dr) * 256 + a.col + dc] = true;
            }
        }
    }
    assert!(covered.iter().all(|&c| c));
}
