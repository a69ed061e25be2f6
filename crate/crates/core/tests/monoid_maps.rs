mod common;

use common::{map_corpus, MapOracle};
use polystrata::monoid::{pushout, saturation_index, SearchBounds};
use polystrata::monoid::{AffineMonoid, MonoidMap};
use proptest::prelude::*;

#[test]
fn oracle_agrees_on_corpus() {
    let bounds = SearchBounds { degree: Some(6), primes: Vec::new() };
    for (name, h) in map_corpus() {
        let c = h.classify(&bounds);
        let o = MapOracle::new(&h);
        assert!(!c.integral.is_undecided() && !c.saturated.is_undecided(), "{name}: undecided");
        assert_eq!(c.integral.holds(), o.integral(6), "{name}: integrality");
        assert_eq!(c.saturated.holds(), o.saturated(6), "{name}: saturation");
    }
}

#[test]
fn known_classifications() {
    let bounds = SearchBounds { degree: Some(6), primes: Vec::new() };
    let expected = [
        ("times1", true),
        ("times2", false),
        ("times3", false),
        ("times6", false),
        ("diagonal", true),
        ("chart_node", true),
    ];
    let corpus = map_corpus();
    for (name, sat) in expected {
        let h = &corpus.iter().find(|(n, _)| n == name).unwrap().1;
        assert_eq!(h.classify(&bounds).saturated.holds(), sat, "{name}");
    }
    let sum = &corpus.iter().find(|(n, _)| n == "sum").unwrap().1;
    assert!(sum.classify(&bounds).integral.fails());
}

#[test]
fn saturation_index_of_multiplication() {
    let n = AffineMonoid::free(1);
    for (k, idx) in [(2, 2), (6, 6)] {
        let h = MonoidMap::new(n.clone(), n.clone(), vec![vec![k]]).unwrap();
        assert_eq!(saturation_index(&h, 6, 12).unwrap().0, idx);
    }
}

#[test]
fn pushout_of_multiplications_has_torsion() {
    let n = AffineMonoid::free(1);
    let two = MonoidMap::new(n.clone(), n.clone(), vec![vec![2]]).unwrap();
    let three = MonoidMap::new(n.clone(), n.clone(), vec![vec![3]]).unwrap();
    assert!(pushout(&two, &two).unwrap().torsion.contains(&2));
    assert!(pushout(&two, &three).unwrap().torsion.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diagonal_maps_match_oracle(a in 1i64..4, b in 1i64..4) {
        let h = MonoidMap::new(AffineMonoid::free(1), AffineMonoid::free(2), vec![vec![a], vec![b]]).unwrap();
        let c = h.classify(&SearchBounds { degree: Some(6), primes: Vec::new() });
        let o = MapOracle::new(&h);
        prop_assert_eq!(c.saturated.holds(), o.saturated(6));
        // the fiber x^a y^b = 0 is reduced only for a = b = 1
        prop_assert_eq!(c.saturated.holds(), a == 1 && b == 1);
    }

    #[test]
    fn saturation_is_idempotent(gens in proptest::collection::vec(proptest::collection::vec(0i64..4, 2), 1..4)) {
        prop_assume!(gens.iter().all(|g| g.iter().any(|&x| x > 0)));
        let m = AffineMonoid::new(2, gens).unwrap();
        let s = m.saturate().unwrap();
        prop_assert!(s.is_saturated().unwrap());
        prop_assert!(s.saturate().unwrap().same_as(&s));
        for g in m.generators() {
            prop_assert!(s.contains(g));
        }
    }
}
