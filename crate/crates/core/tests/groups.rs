mod common;

use common::complex_corpus;
use polystrata::complex::{PolyMorphism, PolysimplicialSet};
use polystrata::fibration::corpus;
use polystrata::group::PermGroup;
use polystrata::pi1::{h1_rank, pi1_presentation, two_skeleton};
use polystrata::tempered::*;
use polystrata::Error;

// Betti numbers of the underlying spaces, worked out by hand.
fn expected_h1(name: &str) -> usize {
    match name {
        "loop" | "loop_x_edge" | "loop_plus_edge" => 1,
        "theta" | "torus" => 2,
        n if n.starts_with("cycle") => 1,
        n if n.starts_with("banana") => n["banana".len()..].parse::<usize>().unwrap() - 1,
        _ => 0,
    }
}

#[test]
fn h1_matches_known_betti_numbers() {
    for (name, c) in complex_corpus() {
        assert_eq!(h1_rank(&c), expected_h1(&name), "{name}");
    }
}

#[test]
fn abelianized_pi1_is_h1() {
    for (name, c) in complex_corpus() {
        let sk = two_skeleton(&c);
        assert!(sk.is_valid(), "{name}");
        match pi1_presentation(&sk, None) {
            Ok(p) => {
                let ab = p.presentation.abelianization();
                assert_eq!(ab.free_rank, expected_h1(&name), "{name}");
                assert!(ab.torsion.is_empty(), "{name}");
            }
            Err(Error::Disconnected(_)) => assert_eq!(name, "loop_plus_edge"),
            Err(e) => panic!("{name}: {e}"),
        }
    }
}

#[test]
fn graphs_have_free_fundamental_groups() {
    for (name, d) in common::glued_corpus() {
        let c = corpus::closed(&d).complex;
        let p = pi1_presentation(&two_skeleton(&c), None).unwrap();
        // a connected graph has free pi1 of rank E - V + 1
        let rank = c.count_of_dimension(1) + 1 - c.count_of_dimension(0);
        assert_eq!(p.free_rank(), Some(rank), "{name}");
    }
    let theta = corpus::closed(&corpus::theta()).complex;
    assert_eq!(pi1_presentation(&two_skeleton(&theta), None).unwrap().free_rank(), Some(2));
}

#[test]
fn refinement_keeps_h1() {
    for (name, c) in complex_corpus().into_iter().filter(|(_, c)| c.len() <= 20) {
        let sk = two_skeleton(&c);
        let r = sk.barycentric_refinement();
        assert!(r.is_valid(), "{name}");
        assert_eq!(r.h1_rank(), sk.h1_rank(), "{name}");
        assert_eq!(r.components().len(), sk.components().len(), "{name}");
    }
}

#[test]
fn every_basepoint_gives_the_same_group() {
    let theta = corpus::closed(&corpus::theta()).complex;
    let sk = two_skeleton(&theta);
    for v in 0..sk.vertex_count() {
        let p = pi1_presentation(&sk, Some(v)).unwrap();
        assert_eq!(p.free_rank(), Some(2));
    }
}

fn rotation_action(n: usize) -> GaloisAction {
    let glued = corpus::closed(&corpus::cycle(n));
    let rot = glued
        .induced_morphism(&glued, |s| match s.split_once('.') {
            Some((p, rest)) if p.starts_with('p') => {
                let k: usize = p[1..].parse().unwrap();
                format!("p{}.{rest}", (k + 1) % n)
            }
            _ => s.to_string(),
        })
        .unwrap();
    let mut p: Vec<u32> = (0..n as u32).collect();
    p.rotate_left(1);
    GaloisAction::new(glued.complex.clone(), PermGroup::new(n, vec![p]).unwrap(), vec![rot]).unwrap()
}

#[test]
fn free_rotation_of_a_cycle_gives_z() {
    // Z/n acting freely on an n-cycle: the quotient is a loop and the
    // extension is its universal deck group, Z
    for n in 2..=5 {
        let e = lift_extension(rotation_action(n), None).unwrap();
        assert!(e.is_abelian(), "n = {n}");
        assert_eq!(e.abelianization().to_string(), "Z", "n = {n}");
        assert_eq!(e.kernel_rank(), 1);
        assert_eq!(e.coset_index, Some(n));
    }
}

#[test]
fn tate_levels() {
    for m in [2, 3, 4, 6] {
        let t = tate_level(m).unwrap();
        assert!(t.is_abelian(), "m = {m}");
        let ab = t.abelianization();
        assert_eq!((ab.free_rank, ab.torsion.clone()), (1, vec![m as i64]), "m = {m}");
        // the loop of the cycle lies over the identity of G
        for w in &t.kernel {
            assert_eq!(t.quotient_of(w), t.group().identity());
        }
        assert_eq!(t.kernel_rank(), 1);
        if m * m <= COSET_CHECK_ORDER {
            assert_eq!(t.coset_index, Some(m * m));
        }
    }
}

#[test]
fn good_levels_are_the_galois_group() {
    for m in [2, 3, 4, 6] {
        let g = good_level(m).unwrap();
        assert_eq!(g.kernel_rank(), 0);
        assert_eq!(g.group().order(), m * m);
        assert_eq!(g.abelianization().torsion, vec![m as i64, m as i64]);
        assert_eq!(g.abelianization().free_rank, 0);
    }
}

#[test]
fn lifts_satisfy_the_relators() {
    let t = tate_level(3).unwrap();
    for r in &t.presentation.relators {
        assert_eq!(t.eval(r), t.identity_lift());
    }
    for k in 0..t.presentation.rank() {
        let l = t.generator_lift(k).clone();
        assert_eq!(t.mul_lift(&l, &t.inverse_lift(&l)), t.identity_lift());
    }
}

#[test]
fn node_collapses_to_trivial_group() {
    let lp = corpus::closed(&corpus::nodal_cubic()).complex;
    let e = lift_extension(GaloisAction::trivial(lp.clone(), PermGroup::trivial()), None).unwrap();
    let pt = lift_extension(GaloisAction::trivial(PolysimplicialSet::point(), PermGroup::trivial()), None).unwrap();
    let h = induced_hom(&e, &pt, &collapse_to_point(&lp).unwrap(), &GroupHom::identity(&PermGroup::trivial()), 1).unwrap();
    assert!(h.images.iter().all(|w| pt.eval(w) == pt.identity_lift()));
    assert!(!h.is_isomorphism());
}

#[test]
fn connecting_maps_compose() {
    let t = tate_tower(&[2, 4, 8]).unwrap();
    assert_eq!(t.connecting.len(), 3);
    let a = t.connecting_map(8, 4).unwrap();
    let b = t.connecting_map(4, 2).unwrap();
    let direct = t.connecting_map(8, 2).unwrap();
    assert!(a.then(b).agrees_with(direct, t.level(2).unwrap()));
    let g = good_tower(&[2, 4, 8]).unwrap();
    let (a, b, direct) = (g.connecting_map(8, 4).unwrap(), g.connecting_map(4, 2).unwrap(), g.connecting_map(8, 2).unwrap());
    assert!(a.then(b).agrees_with(direct, g.level(2).unwrap()));
}

#[test]
fn tate_specializes_to_good_only() {
    let t = tate_tower(&[2, 3, 6]).unwrap();
    let g = good_tower(&[2, 3, 6]).unwrap();
    let down = cospecialize_tower(&t, &g, &tate_to_good_maps(&t).unwrap()).unwrap();
    assert_eq!(down.levels.len(), 3);
    assert!(!down.is_levelwise_isomorphism());
    for (_, _, m) in &down.levels {
        assert!(m.group_map.table.iter().enumerate().all(|(i, &j)| i == j));
    }
    let up = cospecialize_tower(&g, &t, &good_to_tate_maps(&g, &t).unwrap());
    assert!(matches!(up, Err(Error::NonCommuting { .. })));
}

#[test]
fn identity_tower_maps_are_isomorphisms() {
    let t = tate_tower(&[2, 4]).unwrap();
    let same = cospecialize_tower(&t, &t, &identity_maps(&t)).unwrap();
    assert!(same.is_levelwise_isomorphism());
    for (id, _, m) in &same.levels {
        let level = t.level(*id).unwrap();
        for (k, w) in m.images.iter().enumerate() {
            assert_eq!(level.eval(w), *level.generator_lift(k));
        }
    }
}

#[test]
fn report_lists_levels() {
    let t = tate_tower(&[2, 4]).unwrap();
    let r = t.report();
    assert!(r.lines().any(|l| l.starts_with("2\t4\t1\tZ x Z/2")));
    assert!(r.contains("map 4 -> 2"));
}

#[test]
fn identity_complex_map_with_wrong_group_map_fails() {
    let e = lift_extension(rotation_action(3), None).unwrap();
    let g = e.group().clone();
    // send the rotation to its inverse while the complex map is the identity
    let inv = g.inv(g.index_of(&g.generators[0]).unwrap());
    let psi = GroupHom::from_generators(&g, &g, &[inv]).unwrap();
    let r = induced_hom(&e, &e, &PolyMorphism::identity(&e.action.complex), &psi, 0);
    assert!(matches!(r, Err(Error::NonCommuting { .. })));
}
