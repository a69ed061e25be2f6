mod common;

use common::{charts, glued_corpus, two_parameter_chart};
use polystrata::fibration::{corpus, cospecialize_c};
use polystrata::monoid::AffineMonoid;
use polystrata::strata::cospecialize_strata;

#[test]
fn cell_posets_of_pieces_are_strata() {
    for (name, chart) in charts() {
        for face in chart.base.face_poset().faces {
            let (cx, cell_strata) = chart.cell_strata(&face).unwrap();
            let o = cx.cell_poset();
            let s = chart.fiber_datum().unwrap().strata_over(&face);
            assert_eq!(o.poset.canonical_hash(), s.poset.canonical_hash(), "{name}");
            assert!(o.poset.isomorphism_to(&s.poset).is_some(), "{name}");
            let map: Vec<usize> = o.classes.iter().map(|m| cell_strata[m[0]]).collect();
            assert!(o.poset.is_isomorphism(&s.poset, &map), "{name}: explicit map");
        }
    }
}

#[test]
fn cell_posets_of_glued_fibers_are_strata() {
    let closed = AffineMonoid::free(1).bottom_face();
    for (name, d) in glued_corpus() {
        let o = corpus::closed(&d).complex.cell_poset().poset;
        let s = d.strata(&closed).unwrap();
        assert_eq!(o.len(), s.len(), "{name}");
        assert_eq!(o.canonical_hash(), s.canonical_hash(), "{name}");
        assert!(o.isomorphism_to(&s).is_some(), "{name}");
    }
}

#[test]
fn theta_has_two_components_and_three_nodes() {
    let s = corpus::theta().strata(&AffineMonoid::free(1).bottom_face()).unwrap();
    assert_eq!(s.len(), 5);
    assert_eq!(s.minimal_elements().len(), 2);
    assert_eq!(s.maximal_elements().len(), 3);
}

#[test]
fn same_point_cospecialization_is_an_isomorphism() {
    for (name, chart) in charts() {
        for face in chart.base.face_poset().faces {
            let c = cospecialize_c(&chart, &face, &face).unwrap();
            assert!(c.morphism.is_iso(), "{name}");
            assert_eq!(c.strata.map, (0..c.strata.source.len()).collect::<Vec<_>>(), "{name}");
        }
    }
}

#[test]
fn cospecialization_composes() {
    let chart = two_parameter_chart();
    let p = &chart.base;
    let bottom = p.bottom_face();
    let middle = p.face(&[0]).unwrap();
    let top = p.top_face();
    let datum = chart.fiber_datum().unwrap();
    let a = cospecialize_strata(&datum, &bottom, &middle).unwrap();
    let b = cospecialize_strata(&datum, &middle, &top).unwrap();
    let direct = cospecialize_strata(&datum, &bottom, &top).unwrap();
    assert_eq!(a.then(&b), direct.map);
    // two nodes over the closed point, one over the first generization,
    // none generically
    assert_eq!((a.source.len(), a.target.len(), direct.target.len()), (9, 3, 1));
}

#[test]
fn cospecialization_runs_one_way() {
    let chart = two_parameter_chart();
    let p = &chart.base;
    let datum = chart.fiber_datum().unwrap();
    assert!(cospecialize_strata(&datum, &p.top_face(), &p.bottom_face()).is_err());
    assert!(cospecialize_c(&chart, &p.top_face(), &p.bottom_face()).is_err());
}

#[test]
fn node_degenerates_to_a_point() {
    let chart = polystrata::fibration::PolystableChart::node(1);
    let p = &chart.base;
    let c = cospecialize_c(&chart, &p.bottom_face(), &p.top_face()).unwrap();
    assert_eq!(c.morphism.target.len(), 1);
    assert!(c.morphism.images.iter().all(|e| e.cell == 0));
    assert!(!c.morphism.is_iso());
}
