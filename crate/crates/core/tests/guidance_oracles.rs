mod common;

use std::sync::Arc;

use guidemap_core::guidance::{object_guidance, scale_filtered_object, superpixel_guidance};
use guidemap_core::imaging::{euclidean_guidance, rescale_to_255};
use guidemap_core::interaction::estimate_scale;
use guidemap_core::{
    generate_proposals, ChannelKind, Grid, Pixel, Polarity, ScaleEstimate, ScaleParams,
    SuperpixelPartition,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn guidance_matches_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, 16);
        let bad = common::check_guidance(&inst);
        prop_assert!(bad.is_empty(), "{:?}", bad);
    }

    #[test]
    fn open_scale_filter_is_bit_identical(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, 16);
        let open = ScaleEstimate::new(
            rng.gen_range(0.1..50.0),
            ScaleParams { f1: 0.0, f2: f64::INFINITY, ..ScaleParams::default() },
        ).unwrap();
        let plain = object_guidance::<f64>(&inst.proposals, &inst.positives).unwrap();
        let filtered = scale_filtered_object::<f64>(&inst.proposals, &inst.positives, Some(&open)).unwrap();
        let same = plain.values().iter().zip(filtered.values()).all(|(a, b)| a.to_bits() == b.to_bits());
        prop_assert!(same);
    }

    #[test]
    fn one_pixel_superpixels_are_euclidean(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let part = SuperpixelPartition::singletons(32, 32).unwrap();
        let clicks: Vec<Pixel> = (0..rng.gen_range(1..5))
            .map(|_| Pixel::new(rng.gen_range(0..32), rng.gen_range(0..32)))
            .collect();
        let sp = superpixel_guidance::<f64>(&part, &clicks, Polarity::Positive).unwrap();
        let e = euclidean_guidance::<f64>(&clicks, Polarity::Positive, 32, 32).unwrap();
        let e = rescale_to_255(&Grid::from_vec(32, 32, e.values().to_vec()).unwrap(), false, ChannelKind::SpPos).unwrap();
        prop_assert_eq!(sp.values(), e.values());
    }

    #[test]
    fn scale_is_sqrt_pi_times_distance(x0 in 0usize..500, y0 in 0usize..500, x1 in 0usize..500, y1 in 0usize..500) {
        prop_assume!((x0, y0) != (x1, y1));
        let s = estimate_scale(Pixel::new(x0, y0), Pixel::new(x1, y1), ScaleParams::default()).unwrap();
        let d = ((x0 as f64 - x1 as f64).powi(2) + (y0 as f64 - y1 as f64).powi(2)).sqrt();
        let expected = std::f64::consts::PI.sqrt() * d;
        prop_assert!((s.s - expected).abs() / expected <= 1e-9);
    }
}

#[test]
fn generated_proposals_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let (w, h) = (rng.gen_range(2..=16), rng.gen_range(2..=16));
        let img = common::random_image(&mut rng, w, h);
        let k = rng.gen_range(1..=(w * h).min(20));
        let labels = common::random_labels(&mut rng, w, h, k);
        let part = Arc::new(SuperpixelPartition::from_labels(w, h, labels.clone()).unwrap());
        let proposals = generate_proposals(&img, Arc::clone(&part), 2 * k).unwrap();
        let supports: Vec<_> = proposals
            .proposals()
            .iter()
            .map(|p| p.to_mask(w, h).unwrap())
            .collect();
        let inst = common::Instance {
            width: w,
            height: h,
            labels,
            partition: part,
            supports,
            proposals,
            positives: vec![Pixel::new(0, 0), Pixel::new(w - 1, h - 1)],
            negatives: vec![Pixel::new(w / 2, h / 2)],
            scale: common::random_scale(&mut rng),
        };
        assert!(common::check_guidance(&inst).is_empty());
    }
}

#[test]
fn f32_channels_track_f64() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let inst = common::random_instance(&mut rng, 16);
        let a = superpixel_guidance::<f64>(&inst.partition, &inst.positives, Polarity::Positive)
            .unwrap();
        let b = superpixel_guidance::<f32>(&inst.partition, &inst.positives, Polarity::Positive)
            .unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - *y as f64).abs() < 1e-3);
        }
    }
}
