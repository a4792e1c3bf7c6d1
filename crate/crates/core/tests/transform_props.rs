use iragft::ragft::{BlockSizes, MultiresTransform, Ragft, ResolutionHierarchy};
use iragft::raht::Raht;
use proptest::prelude::*;

fn cloud() -> impl Strategy<Value = (Vec<[u32; 3]>, u32)> {
    (1u32..6).prop_flat_map(|depth| {
        let side = 1u32 << depth;
        (
            prop::collection::btree_set([0..side, 0..side, 0..side], 1..200),
            Just(depth),
        )
            .prop_map(|(s, d)| (s.into_iter().collect(), d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn both_transforms_reconstruct((coords, depth) in cloud(), head in 1u32..4, seed in any::<u64>()) {
        let x: Vec<f64> = (0..coords.len()).map(|i| ((i as u64 ^ seed) % 509) as f64 - 254.0).collect();
        let sizes = BlockSizes::expand(&[1 << head], depth).unwrap();
        let hier = ResolutionHierarchy::build(&coords, depth, &sizes).unwrap();
        let gft = Ragft::new(hier).unwrap();
        let c = gft.forward_full(&x).unwrap();
        let e: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((c.energy() - e).abs() <= 1e-9 * e.max(1.0));
        let back = gft.inverse_full(&c).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-8);
        }

        let dyadic = ResolutionHierarchy::build(&coords, depth, &BlockSizes::dyadic(depth)).unwrap();
        let raht = Raht::new(dyadic).unwrap();
        let back = raht.inverse_full(&raht.forward_full(&x).unwrap()).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn dc_is_weighted_sum((coords, depth) in cloud()) {
        let hier = ResolutionHierarchy::build(&coords, depth, &BlockSizes::dyadic(depth)).unwrap();
        let x: Vec<f64> = (0..coords.len()).map(|i| (i % 7) as f64).collect();
        let c = Ragft::new(hier).unwrap().forward_full(&x).unwrap();
        let expect = x.iter().sum::<f64>() / (coords.len() as f64).sqrt();
        prop_assert!((c.approx()[0] - expect).abs() < 1e-9 * (1.0 + expect.abs()));
    }
}
