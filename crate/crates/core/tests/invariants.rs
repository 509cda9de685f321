//! Structural laws on random finite systems.

mod common;

use odolab::maps::{self, odometer_add, odometer_step, InducedBijection};
use odolab::space::{DepthSet, Radix};
use odolab::spec::{Alphabet, Measure, Repeat};
use odolab::{AnySpec, MapKind, Rational, SystemSpec};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = MapKind> {
    prop_oneof![Just(MapKind::Odometer), Just(MapKind::Translation)]
}

/// A system with explicit, cycled weight vectors on 1–4 coordinates.
fn listed_spec() -> impl Strategy<Value = SystemSpec> {
    (kind(), prop::collection::vec(prop::collection::vec(1u64..=9, 2..=4), 1..=4)).prop_map(|(kind, ws)| {
        let list: Vec<u64> = ws.iter().map(|w| w.len() as u64).collect();
        let weights: Vec<Vec<Rational>> = ws.iter().map(|w| common::to_measure(w)).collect();
        SystemSpec::new(kind, Alphabet::List { list, repeat: Repeat::Cycle }, Measure::List { weights, repeat: Repeat::Cycle })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn induced_bijection_laws(spec in listed_spec(), depth in 1usize..=4, a in -40i128..40, b in -40i128..40) {
        let sp = common::truncation::<Rational>(&spec, depth);
        prop_assert_eq!(common::bijection_laws(&sp, a, b), Ok(()));
        prop_assert_eq!(common::normalized(&sp), Ok(()));
    }

    #[test]
    fn preimage_measure_is_a_cell_sum(spec in listed_spec(), digits in prop::collection::vec(0u64..4, 1..=3), n in -12i128..12) {
        let depth = digits.len();
        let sp = common::truncation::<Rational>(&spec, depth);
        let radices = sp.radix.radices().to_vec();
        let x: Vec<u64> = digits.iter().zip(&radices).map(|(d, m)| d % m).collect();
        let cyl = DepthSet::cylinder(&radices, &x);
        let bij = InducedBijection::of(&sp);
        let target = sp.radix.encode(&x);
        let by_cells: Rational = (0..sp.cells()).filter(|&c| bij.apply(c, n) == target).map(|c| sp.cell_measure[c as usize].clone()).sum();
        prop_assert_eq!(maps::preimage_measure(&sp, &cyl, n), by_cells);
        let forward = sp.cell_measure[bij.apply(target, n) as usize].clone();
        prop_assert_eq!(maps::forward_image_measure(&sp, &cyl, n), forward);
    }

    #[test]
    fn radon_nikodym_identity(spec in listed_spec(), depth in 1usize..=4) {
        let spec = SystemSpec { kind: MapKind::Odometer, ..spec };
        let sp = common::truncation::<Rational>(&spec, depth);
        prop_assert_eq!(common::rn_identity(&spec, &sp), Ok(()));
    }

    #[test]
    fn periods_divide_the_order(spec in listed_spec(), depth in 1usize..=4, digits in prop::collection::vec(0u64..4, 1..=4)) {
        let sp = common::truncation::<Rational>(&spec, depth);
        let digits: Vec<u64> = digits.into_iter().take(depth).collect();
        prop_assert_eq!(common::period_laws(&sp, &digits), Ok(()));
    }

    #[test]
    fn addition_is_repeated_stepping(radices in prop::collection::vec(2u64..=5, 1..=5), k in 0u128..200) {
        let spec = SystemSpec::new(MapKind::Odometer, Alphabet::List { list: radices.clone(), repeat: Repeat::Last }, Measure::Uniform);
        let n = radices.len();
        let cells: u128 = radices.iter().map(|&m| m as u128).product();
        let mut x = vec![0u64; n];
        let mut wrapped = false;
        for _ in 0..k {
            let (y, c) = odometer_step(&radices, &x);
            wrapped |= c;
            x = y;
        }
        match odometer_add(&spec, &vec![0; n], k) {
            Ok(sum) => {
                prop_assert!(k < cells);
                prop_assert_eq!(sum.digits, x);
                prop_assert!(!wrapped);
            }
            Err(_) => prop_assert!(k >= cells),
        }
    }

    #[test]
    fn mixed_radix_round_trip(radices in prop::collection::vec(2u64..=7, 1..=6), seed in any::<u64>()) {
        let r = Radix::new(radices, 1 << 20).unwrap();
        let c = seed % r.cells();
        prop_assert_eq!(r.encode(&r.decode(c)), c);
    }

    #[test]
    fn listed_specs_round_trip_through_json(spec in listed_spec()) {
        let any = AnySpec::Product(spec);
        let text = any.to_json().to_string();
        prop_assert_eq!(AnySpec::parse(&text).unwrap(), any);
    }
}

#[test]
fn gallery_specs_round_trip_through_json() {
    for e in odolab::gallery::all() {
        let text = e.spec.to_json().to_string();
        assert_eq!(AnySpec::parse(&text).unwrap(), e.spec, "{}", e.id);
    }
}
