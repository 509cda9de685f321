//! Optimizers against exhaustive enumeration, and worked examples checked
//! against an independent route before their values are frozen.

mod common;

use odolab::criteria::optimize::{self, Optimizer, GAMMA_NODE_BUDGET};
use odolab::maps::{self, odometer_add, odometer_step, preimage_cylinder, rn_derivative};
use odolab::scalar::rat;
use odolab::space::{build_truncation, DepthSet, DEFAULT_CAP};
use odolab::spec::{Alphabet, Measure, Repeat};
use odolab::{MapKind, Rational, SystemSpec};
use proptest::prelude::*;

fn weights(max_m: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=30, 2..=max_m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_matches_enumeration(w in weights(12)) {
        let mu = common::to_measure(&w);
        for k in 1..w.len() {
            prop_assert_eq!(optimize::theta_shift(&mu, k as u64), common::over(common::theta_shift(&w, k), &w));
        }
        prop_assert_eq!(optimize::theta(&mu).0, common::over(common::theta(&w), &w));
    }

    #[test]
    fn drop_set_attains_theta_shift(w in weights(12), k in 1usize..12) {
        let k = 1 + k % (w.len() - 1);
        let mu = common::to_measure(&w);
        let d = optimize::drop_set(&mu, k as u64);
        let m = w.len();
        let gain: i64 = (0..m).filter(|&j| d[j]).map(|j| w[j] as i64 - w[(j + k) % m] as i64).sum();
        prop_assert_eq!(gain as u64, common::theta_shift(&w, k));
    }

    #[test]
    fn kappa_matches_enumeration(w in weights(12)) {
        let mu = common::to_measure(&w);
        for j in 1..w.len() {
            let (v, set) = optimize::disjoint_set_zplus(&mu, j as u64);
            prop_assert_eq!(&v, &common::over(common::disjoint_zplus(&w, j), &w));
            // the returned set is admissible and carries the value
            for x in 0..w.len() {
                prop_assert!(!(set[x] && x + j < w.len() && set[x + j]));
            }
            let sum: u64 = (0..w.len()).filter(|&x| set[x]).map(|x| w[x]).sum();
            prop_assert_eq!(common::over(sum, &w), v);
        }
        prop_assert_eq!(optimize::kappa(&mu).0, common::over(common::kappa(&w), &w));
    }

    #[test]
    fn alpha_beta_match_enumeration(w in weights(12)) {
        let mu = common::to_measure(&w);
        let m = w.len();
        for n in 1..m {
            prop_assert_eq!(optimize::alpha(&mu, n as u64), common::over(common::alpha(&w, n), &w));
            let (_, set) = optimize::disjoint_set_cyclic(&mu, n as u64);
            for x in 0..m {
                prop_assert!(!(set[x] && set[(x + n) % m]));
            }
        }
        prop_assert_eq!(optimize::beta(&mu).0, common::over(common::beta(&w), &w));
    }

    #[test]
    fn gamma_search_matches_enumeration(w in weights(12)) {
        let mu = common::to_measure(&w);
        for j in 1..w.len() {
            let g = optimize::gamma_search(&mu, j as u64, GAMMA_NODE_BUDGET);
            prop_assert!(g.optimizer != Optimizer::SearchLowerBound);
            prop_assert_eq!(g.value, common::over(common::gamma_shift(&w, j), &w));
        }
        prop_assert_eq!(optimize::gamma_odometer(&mu).value, common::over(common::gamma(&w), &w));
    }

    #[test]
    fn gamma_tilde_matches_enumeration(v in prop::collection::vec(0u64..=50, 1..=12)) {
        let vals: Vec<Rational> = v.iter().map(|&x| rat(x as i64, 50)).collect();
        let (num, card) = common::gamma_tilde(&v);
        let expected = Rational::new((num as i64).into(), ((card as i64) * 2500).into());
        let (got, chosen) = optimize::gamma_tilde(&vals);
        prop_assert_eq!(&got, &expected);
        let s: Rational = chosen.iter().map(|&i| vals[i].clone()).sum();
        prop_assert_eq!(&s * &s / Rational::from_integer((chosen.len() as i64).into()), got);
    }

    #[test]
    fn path_mwis_matches_enumeration(w in weights(14)) {
        let mu = common::to_measure(&w);
        let (v, set) = optimize::path_mwis(&mu);
        prop_assert_eq!(v, common::over(common::path_mwis(&w), &w));
        prop_assert!(set.windows(2).all(|p| !(p[0] && p[1])));
    }
}

fn binary(p0: Rational) -> SystemSpec {
    SystemSpec::new(MapKind::Odometer, Alphabet::Constant(2), Measure::Binary { p0 })
}

fn radix_23() -> SystemSpec {
    SystemSpec::new(MapKind::Odometer, Alphabet::Linear { offset: 1 }, Measure::Uniform)
}

#[test]
fn adding_five_equals_five_steps() {
    let spec = radix_23();
    let radices = spec.radices(2).unwrap();
    let mut x = vec![0, 0];
    for _ in 0..5 {
        x = odometer_step(&radices, &x).0;
    }
    let sum = odometer_add(&spec, &[0, 0], 5).unwrap();
    assert_eq!(sum.digits, x);
    assert_eq!(sum.digits, vec![1, 2]);
    assert!(!sum.carry_out);
}

#[test]
fn preimage_cylinders_by_stepping() {
    let spec = binary(rat(1, 2));
    let radices = spec.radices(2).unwrap();
    for (x, frozen) in [(vec![1, 0], vec![0, 0]), (vec![0, 1], vec![1, 0]), (vec![0, 0], vec![1, 1])] {
        let pre = preimage_cylinder(&spec, &x).unwrap();
        assert_eq!(odometer_step(&radices, &pre).0, x);
        assert_eq!(pre, frozen);
    }
}

#[test]
fn rn_derivative_is_a_ratio_of_cell_measures() {
    let spec = binary(rat(2, 3));
    for (x, frozen) in [(vec![1u64], rat(2, 1)), (vec![0, 1], rat(1, 1)), (vec![1, 1], rat(2, 1))] {
        let sp = build_truncation::<Rational>(&spec, x.len(), DEFAULT_CAP).unwrap();
        let cyl = DepthSet::cylinder(sp.radix.radices(), &x);
        let ratio = maps::preimage_measure(&sp, &cyl, 1) / sp.measure(&cyl);
        assert_eq!(rn_derivative::<Rational>(&spec, &x).unwrap(), ratio);
        assert_eq!(ratio, frozen);
    }
}

#[test]
fn ornstein_cylinder_measure_by_cells() {
    let spec = SystemSpec::new(MapKind::Odometer, Alphabet::Linear { offset: 1 }, Measure::Ornstein);
    let sp = build_truncation::<Rational>(&spec, 2, DEFAULT_CAP).unwrap();
    let set = DepthSet::cylinder(sp.radix.radices(), &[1, 2]);
    let by_cells: Rational = (0..sp.cells())
        .filter(|&c| sp.radix.decode(c) == vec![1, 2])
        .map(|c| sp.cell_measure[c as usize].clone())
        .sum();
    assert_eq!(sp.measure(&set), by_cells);
    assert_eq!(by_cells, rat(1, 8));
}

#[test]
fn translation_preimage_by_permutation() {
    let mu = vec![rat(1, 6), rat(1, 3), rat(1, 2)];
    let spec = SystemSpec::new(MapKind::Translation, Alphabet::Constant(3), Measure::List { weights: vec![mu.clone()], repeat: Repeat::Cycle });
    let sp = build_truncation::<Rational>(&spec, 1, DEFAULT_CAP).unwrap();
    let set = DepthSet::from_symbols(&[3], &[vec![0, 1]]);
    // x ∈ 𝔱^{-1}S iff x + 1 ∈ S, i.e. x ∈ {2, 0}
    let direct: Rational = (0..3u64).filter(|x| [0, 1].contains(&((x + 1) % 3))).map(|x| mu[x as usize].clone()).sum();
    assert_eq!(maps::preimage_measure(&sp, &set, 1), direct);
    assert_eq!(direct, rat(2, 3));
}

#[test]
fn worked_optimizer_examples() {
    // θ with k = 1 on (1/2, 1/3, 1/6)
    let w = [3u64, 2, 1];
    assert_eq!(common::over(common::theta_shift(&w, 1), &w), rat(1, 3));
    assert_eq!(optimize::theta_shift(&common::to_measure(&w), 1), rat(1, 3));
    // κ on three uniform symbols
    let u = [1u64, 1, 1];
    assert_eq!(common::over(common::kappa(&u), &u), rat(2, 3));
    // α on four uniform symbols with n = 2
    let u4 = [1u64; 4];
    assert_eq!(common::over(common::alpha(&u4, 2), &u4), rat(1, 2));
    assert_eq!(optimize::alpha(&common::to_measure(&u4), 2), rat(1, 2));
    // γ on uniform even alphabets
    for m in [2usize, 4, 6] {
        let u = vec![1u64; m];
        assert_eq!(common::over(common::gamma(&u), &u), rat(1, 2));
    }
    // γ̃ on (0.5, 0.5, 0.1)
    assert_eq!(common::gamma_tilde(&[5, 5, 1]), (100, 2));
}
