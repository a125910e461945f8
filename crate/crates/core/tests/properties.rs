use proptest::prelude::*;
use tanaka_splitting::walk::{check_identities, recover_sign_parity, x_to_z, z_to_x};
use tanaka_splitting::walsh::{inverse_walsh, walsh_transform, FunctionTable};
use tanaka_splitting::{DyadicRational, Region, TimeSet, WalkPath};

fn steps(max: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 0..max)
}

fn time_set() -> impl Strategy<Value = TimeSet> {
    prop::collection::vec((0u64..=64, 0u64..=64), 0..4).prop_map(|pairs| {
        let intervals = pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            (
                DyadicRational::new(lo, 6).unwrap(),
                DyadicRational::new(hi, 6).unwrap(),
            )
        });
        TimeSet::new(intervals).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn long_paths_satisfy_identities(s in steps(200)) {
        let x = WalkPath::from_increments(s).unwrap();
        prop_assert!(check_identities(&x));
        prop_assert_eq!(z_to_x(&x_to_z(&x)), x);
    }

    #[test]
    fn parity_rule_on_long_paths(s in steps(200)) {
        let z = WalkPath::from_increments(s).unwrap();
        let x = z_to_x(&z);
        for n in 0..=z.len() {
            let expected = if x.positions()[n] >= 0 { 1 } else { -1 };
            prop_assert_eq!(recover_sign_parity(&z, n).unwrap(), expected);
        }
    }

    #[test]
    fn path_text_round_trip(s in steps(64)) {
        let x = WalkPath::from_increments(s).unwrap();
        prop_assert_eq!(x.to_string().parse::<WalkPath>().unwrap(), x);
    }

    #[test]
    fn time_set_text_round_trip(a in time_set()) {
        prop_assert_eq!(a.to_string().parse::<TimeSet>().unwrap(), a);
    }

    #[test]
    fn complement_splits_the_unit_interval(a in time_set()) {
        let gaps: f64 = a.complement_components().iter().map(|(l, h)| h.to_f64() - l.to_f64()).sum();
        prop_assert!((a.measure() + gaps - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_preimage_membership(a in time_set(), t in 0.01f64..0.99, x in 0.0f64..=1.0) {
        let right = a.affine_preimage(1.0 - t, t).unwrap();
        let left = a.affine_preimage(-t, t).unwrap();
        let y = t + (1.0 - t) * x;
        let w = t * (1.0 - x);
        let near = |v: f64| a.components().iter().any(|(l, h)| (v - l.to_f64()).abs() < 1e-9 || (v - h.to_f64()).abs() < 1e-9);
        if !near(y) {
            prop_assert_eq!(right.contains_time(x), a.contains_time(y));
        }
        if !near(w) {
            prop_assert_eq!(left.contains_time(x), a.contains_time(w));
        }
    }

    #[test]
    fn walsh_round_trip(values in prop::collection::vec(-1.0f64..1.0, 1usize << 6)) {
        let table = FunctionTable::new(6, values.clone()).unwrap();
        let back = inverse_walsh(&walsh_transform(&table));
        for (a, b) in back.values().iter().zip(&values) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
