mod common;

use proptest::prelude::*;
use weighted_range::verify::{verify_theorem_main, Verdict};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn counting_is_symmetric_and_consistent(seed in any::<u64>(), na in 1usize..=3, nb in 1usize..=3) {
        let mut r = rng(seed);
        let a = matrix(&mut r, na);
        let b = matrix(&mut r, nb);
        let c = weights(&mut r, na);
        let d = weights(&mut r, nb);
        let ab = verify_theorem_main(&a, &c, &b, &d, 512).unwrap();
        let ba = verify_theorem_main(&b, &d, &a, &c, 512).unwrap();
        prop_assert_eq!(ab.bound, ba.bound);
        prop_assert_eq!(ab.angles.distinct(), ba.angles.distinct());
        prop_assert_ne!(ab.verdict, Verdict::Inconsistent);
        prop_assert_ne!(ba.verdict, Verdict::Inconsistent);
    }

    #[test]
    fn a_matrix_meets_itself(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let a = matrix(&mut r, n);
        let c = weights(&mut r, n);
        let report = verify_theorem_main(&a, &c, &a, &c, 256).unwrap();
        prop_assert!(report.angles.identically_zero && report.hypothesis_met);
        prop_assert_eq!(report.verdict, Verdict::ConsistentHypothesisMet);
    }
}
