mod common;

use common::{random_instance, rel_err, stacked_oracle, Instance};
use nalgebra::DVector;
use pbe::{gls_extend, mahalanobis_score, squared_mahalanobis, PrecisionBlock};
use proptest::prelude::*;

fn objective(inst: &Instance, y: &DVector<f64>) -> f64 {
    squared_mahalanobis(y, &inst.blocks, &inst.image_refs()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closed_form_matches_stacked_system(k in 1usize..=10, d in 1usize..=6, seed in any::<u64>()) {
        let inst = random_instance(k, d, seed);
        let y = gls_extend(&inst.blocks, &inst.image_refs()).unwrap();
        let (oracle, resid) = stacked_oracle(&inst);
        prop_assert!(rel_err(&y, &oracle) <= 1e-8);
        let score = mahalanobis_score(&y, &inst.blocks, &inst.image_refs()).unwrap();
        prop_assert!((score - resid).abs() <= 1e-8 * resid.max(1.0));
    }

    #[test]
    fn estimate_minimizes_the_weighted_residual(
        k in 1usize..=8, d in 1usize..=5, seed in any::<u64>(),
        dir in prop::collection::vec(-1.0f64..1.0, 5), t in 1e-3f64..1.0,
    ) {
        let inst = random_instance(k, d, seed);
        let y = gls_extend(&inst.blocks, &inst.image_refs()).unwrap();
        let v = DVector::from_column_slice(&dir[..d]);
        let base = objective(&inst, &y);
        prop_assert!(objective(&inst, &(&y + &v * t)) >= base * (1.0 - 1e-12));
        prop_assert!(objective(&inst, &(&y - &v * t)) >= base * (1.0 - 1e-12));
    }

    #[test]
    fn scaling_all_weights_changes_only_the_score(
        k in 1usize..=8, d in 1usize..=5, seed in any::<u64>(), s in 1e-3f64..1e3,
    ) {
        let inst = random_instance(k, d, seed);
        let scaled = Instance {
            blocks: inst.blocks.iter().map(|b| b.scaled(s)).collect(),
            images: inst.images.clone(),
        };
        let y = gls_extend(&inst.blocks, &inst.image_refs()).unwrap();
        let ys = gls_extend(&scaled.blocks, &scaled.image_refs()).unwrap();
        prop_assert!(rel_err(&ys, &y) <= 1e-10);
        let m = mahalanobis_score(&y, &inst.blocks, &inst.image_refs()).unwrap();
        let ms = mahalanobis_score(&ys, &scaled.blocks, &scaled.image_refs()).unwrap();
        prop_assert!((ms - m * s.sqrt()).abs() <= 1e-8 * (m * s.sqrt()).max(1e-12));
    }

    #[test]
    fn translating_images_translates_the_estimate(
        k in 1usize..=8, d in 1usize..=5, seed in any::<u64>(),
        shift in prop::collection::vec(-10.0f64..10.0, 5),
    ) {
        let inst = random_instance(k, d, seed);
        let c = DVector::from_column_slice(&shift[..d]);
        let moved = Instance {
            blocks: inst.blocks.clone(),
            images: inst.images.iter().map(|y| y.iter().zip(&shift).map(|(a, b)| a + b).collect()).collect(),
        };
        let y = gls_extend(&inst.blocks, &inst.image_refs()).unwrap();
        let ym = gls_extend(&moved.blocks, &moved.image_refs()).unwrap();
        prop_assert!((&ym - (&y + &c)).norm() <= 1e-9 * (1.0 + y.norm() + c.norm()));
        let m = mahalanobis_score(&y, &inst.blocks, &inst.image_refs()).unwrap();
        let mm = mahalanobis_score(&ym, &moved.blocks, &moved.image_refs()).unwrap();
        prop_assert!((m - mm).abs() <= 1e-7 * m.max(1.0));
    }

    #[test]
    fn scalar_weights_stay_in_the_bounding_box(
        k in 1usize..=10, d in 1usize..=6, seed in any::<u64>(),
        w in prop::collection::vec(1e-3f64..1e3, 10),
    ) {
        let inst = random_instance(k, d, seed);
        let blocks: Vec<PrecisionBlock> = w[..k].iter().map(|&s| PrecisionBlock::scalar(d, s).unwrap()).collect();
        let y = gls_extend(&blocks, &inst.image_refs()).unwrap();
        for i in 0..d {
            let lo = inst.images.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min);
            let hi = inst.images.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(y[i] >= lo - 1e-12 && y[i] <= hi + 1e-12);
        }
    }

    #[test]
    fn neighbor_order_does_not_matter(k in 2usize..=10, d in 1usize..=6, seed in any::<u64>()) {
        let inst = random_instance(k, d, seed);
        let y = gls_extend(&inst.blocks, &inst.image_refs()).unwrap();
        let rev_blocks: Vec<PrecisionBlock> = inst.blocks.iter().rev().cloned().collect();
        let rev_images: Vec<&[f64]> = inst.images.iter().rev().map(Vec::as_slice).collect();
        let yr = gls_extend(&rev_blocks, &rev_images).unwrap();
        prop_assert!(rel_err(&yr, &y) <= 1e-10);
    }
}
