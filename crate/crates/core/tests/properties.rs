use proptest::prelude::*;

use repack_core::coloring::{is_universal, linear_universal};
use repack_core::gadget::{dyadic_pitch, round_up, Transform};
use repack_core::geom::{validate_packing, Point, Rect, Tolerance};
use repack_core::io::{parse_instance, parse_witness, serialize_instance, serialize_witness, verify_witness, Instance, Witness};
use repack_core::knapsack::knapsack_profile;
use repack_core::oracle::random_packing;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn packing(seed: u64, a: f64, b: f64, n: usize) -> Instance {
    let rect = Rect::new(a, b);
    let disks = random_packing(rect, n, &mut ChaCha8Rng::seed_from_u64(seed));
    Instance::new(rect, disks, 1, 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instances_round_trip_bit_exactly(seed in any::<u64>(), a in 2.0..12.0f64, b in 2.0..12.0f64, n in 0usize..20) {
        let inst = packing(seed, a, b, n);
        let back = parse_instance(&serialize_instance(&inst), &Tolerance::default()).unwrap();
        prop_assert_eq!(back.disks.len(), inst.disks.len());
        for (p, q) in back.disks.iter().zip(&inst.disks) {
            prop_assert_eq!(p.x.to_bits(), q.x.to_bits());
            prop_assert_eq!(p.y.to_bits(), q.y.to_bits());
        }
        prop_assert_eq!((back.rect.a, back.rect.b, back.h, back.k), (inst.rect.a, inst.rect.b, inst.h, inst.k));
    }

    #[test]
    fn random_packings_validate(seed in any::<u64>(), a in 2.0..12.0f64, b in 2.0..12.0f64) {
        let inst = packing(seed, a, b, 30);
        prop_assert!(validate_packing(&inst.packing(), &Tolerance::default()).is_ok());
    }

    #[test]
    fn overlapping_additions_are_rejected(seed in any::<u64>(), dx in -1.9..1.9f64, dy in -1.9..1.9f64) {
        let inst = packing(seed, 10.0, 10.0, 12);
        prop_assume!(!inst.disks.is_empty());
        let p = inst.disks[0];
        let q = Point::new(p.x + dx * 0.7, p.y + dy * 0.7);
        let w = Witness { added: vec![q], relocated: vec![] };
        prop_assert!(verify_witness(&inst.with_budgets(0, 1), &w, &Tolerance::default()).is_err());
        let back = parse_witness(&serialize_witness(&w)).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn knapsack_profile_is_monotone_and_consistent(items in prop::collection::vec((0usize..=10, 0usize..=20), 0..12), cap in 0usize..40) {
        let prof = knapsack_profile(&items, cap);
        prop_assert!(prof.values.windows(2).all(|w| w[0] <= w[1]));
        for b in 0..=cap {
            let c = prof.chosen(b);
            prop_assert!(c.iter().map(|&i| items[i].0).sum::<usize>() <= b);
            prop_assert_eq!(c.iter().map(|&i| items[i].1).sum::<usize>(), prof.values[b]);
        }
    }

    #[test]
    fn rounding_up_stays_within_one_pitch(x in -1e3..1e3f64, e in 1u32..30) {
        let delta = 2f64.powi(-(e as i32)) * 1.5;
        let r = round_up(x, delta);
        let pitch = dyadic_pitch(delta);
        prop_assert!(r >= x && r - x < pitch);
        prop_assert_eq!((r / pitch).fract(), 0.0);
    }

    #[test]
    fn transforms_compose(i in 0usize..8, j in 0usize..8, x in 0.0..10.0f64, y in 0.0..10.0f64) {
        let all: Vec<Transform> = Transform::all().collect();
        let (a, b) = (all[i], all[j]);
        let p = Point::new(x, y);
        let two = a.apply(b.apply(p, 10.0), 10.0);
        let one = a.compose(&b).apply(p, 10.0);
        prop_assert!((two.x - one.x).abs() < 1e-12 && (two.y - one.y).abs() < 1e-12);
    }

    #[test]
    fn linear_families_are_universal(n in 1usize..=9, t in 1usize..=3) {
        let fam = linear_universal(n, t).unwrap();
        prop_assert_eq!(is_universal(&fam, n, t), Ok(true));
    }
}
