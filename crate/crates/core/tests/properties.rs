//! Randomized invariants over small universes.

use proptest::prelude::*;

use largescale::entourage::{
    compose, delta_of_family, image_of_set, reflexive_symmetric_interior, Entourage,
};
use largescale::higson::{higson_defect, RealFunction};
use largescale::metric::{generate_chain, metrize};
use largescale::sets::{
    refines, refines_mod_singletons, star, star_family, trivial_extension, union_families, Family,
    GroundSet, PointSet, Universe,
};

fn build_family(u: &Universe, raw: &[Vec<usize>]) -> Family {
    let n = u.size();
    Family::new(
        u,
        raw.iter()
            .map(|m| PointSet::from_indices(u, m.iter().map(|x| x % n)).unwrap())
            .collect(),
    )
    .unwrap()
}

fn build_set(u: &Universe, raw: &[usize]) -> PointSet {
    let n = u.size();
    PointSet::from_indices(u, raw.iter().map(|x| x % n)).unwrap()
}

fn raw_family() -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(0usize..64, 1..=3), 1..=3)
}

fn raw_pairs() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0usize..64, 0usize..64), 0..=12)
}

fn build_entourage(u: &Universe, raw: &[(usize, usize)]) -> Entourage {
    let n = u.size();
    Entourage::from_pairs(u, raw.iter().map(|&(x, y)| (x % n, y % n))).unwrap()
}

proptest! {
    // St(K,·) and St(·,B) are monotone.
    #[test]
    fn star_is_monotone(n in 2usize..=8, b in raw_family(), extra in raw_family(), k in prop::collection::vec(0usize..64, 0..=4), more in prop::collection::vec(0usize..64, 0..=4)) {
        let u = GroundSet::new(n);
        let small = build_family(&u, &b);
        let big = union_families(&small, &build_family(&u, &extra)).unwrap();
        let kk = build_set(&u, &k);
        prop_assert!(star(&kk, &small).unwrap().is_subset_of(&star(&kk, &big).unwrap()));
        let kk_big = kk.union(&build_set(&u, &more));
        prop_assert!(star(&kk, &small).unwrap().is_subset_of(&star(&kk_big, &small).unwrap()));
    }

    // B refines e(B), e(B) refines B modulo singletons, and every member
    // of B sits inside its own star-family member.
    #[test]
    fn trivial_extension_refinements(n in 2usize..=8, b in raw_family(), c in raw_family()) {
        let u = GroundSet::new(n);
        let b = build_family(&u, &b);
        let c = build_family(&u, &c);
        let e = trivial_extension(&b);
        prop_assert!(refines(&b, &e).unwrap());
        prop_assert!(refines_mod_singletons(&e, &b).unwrap());
        let st = star_family(&b, &trivial_extension(&c)).unwrap();
        for (m, s) in b.members().iter().zip(st.members()) {
            prop_assert!(m.is_subset_of(s));
        }
    }

    // Relation composition is associative and E[K] is the star of K in
    // the maximal family picture's entourage.
    #[test]
    fn entourage_algebra(n in 2usize..=6, e in raw_pairs(), f in raw_pairs(), g in raw_pairs(), k in prop::collection::vec(0usize..64, 0..=4)) {
        let u = GroundSet::new(n);
        let e = build_entourage(&u, &e);
        let f = build_entourage(&u, &f);
        let g = build_entourage(&u, &g);
        let left = compose(&compose(&e, &f).unwrap(), &g).unwrap();
        let right = compose(&e, &compose(&f, &g).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(e.inverse().inverse(), e.clone());
        let interior = reflexive_symmetric_interior(&e);
        prop_assert_eq!(reflexive_symmetric_interior(&interior), interior);
        let kk = build_set(&u, &k);
        let bigger = e.union(&f).unwrap();
        prop_assert!(image_of_set(&e, &kk).unwrap().is_subset_of(&image_of_set(&bigger, &kk).unwrap()));
    }

    // Δ is monotone and symmetric.
    #[test]
    fn delta_is_monotone(n in 2usize..=8, b in raw_family(), extra in raw_family()) {
        let u = GroundSet::new(n);
        let small = build_family(&u, &b);
        let big = union_families(&small, &build_family(&u, &extra)).unwrap();
        prop_assert!(delta_of_family(&small).is_subset_of(&delta_of_family(&big)).unwrap());
        let d = delta_of_family(&small);
        prop_assert!(d.is_symmetric());
    }

    // Chain metrics validate and satisfy the sharpened triangle bound.
    #[test]
    fn chain_metric_invariants(n in 2usize..=8, seed in raw_family()) {
        let u = GroundSet::new(n);
        let chain = generate_chain(&build_family(&u, &seed), 3).unwrap();
        let d = metrize(&chain);
        d.validate().unwrap();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let rhs = d.dist(x, y).max(d.dist(y, z));
                    if rhs.is_finite() {
                        prop_assert!(d.dist(x, z) <= rhs + 1.0);
                    }
                }
            }
        }
    }

    // Multiplicity is subadditive under family union.
    #[test]
    fn multiplicity_subadditive(n in 2usize..=8, b1 in raw_family(), b2 in raw_family()) {
        use largescale::asdim::multiplicity;
        let u = GroundSet::new(n);
        let b1 = build_family(&u, &b1);
        let b2 = build_family(&u, &b2);
        let both = union_families(&b1, &b2).unwrap();
        prop_assert!(multiplicity(&both) <= multiplicity(&b1) + multiplicity(&b2));
    }

    // A larger truncation never increases the defect, and the defect of a
    // subfamily never exceeds the full family's.
    #[test]
    fn defect_monotonicity(n in 2usize..=8, b in raw_family(), extra in raw_family(), vals in prop::collection::vec(-10.0f64..10.0, 8), k in prop::collection::vec(0usize..64, 0..=4), more in prop::collection::vec(0usize..64, 0..=4)) {
        let u = GroundSet::new(n);
        let f = RealFunction::new(&u, vals[..n].to_vec()).unwrap();
        let small = build_family(&u, &b);
        let big = union_families(&small, &build_family(&u, &extra)).unwrap();
        let kk = build_set(&u, &k);
        let kk_big = kk.union(&build_set(&u, &more));
        prop_assert!(higson_defect(&f, &small, &kk_big).unwrap() <= higson_defect(&f, &small, &kk).unwrap());
        prop_assert!(higson_defect(&f, &small, &kk).unwrap() <= higson_defect(&f, &big, &kk).unwrap());
    }
}
