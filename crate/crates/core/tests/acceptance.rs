//! End-to-end acceptance run. Each criterion prints a single pass/fail
//! line; the process exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use largescale::asdim::{
    brick_decomposition, components_to_cover, find_decomposition_bruteforce, hurewicz_report,
    max_component_diameter, metric_decomposition_check, multiplicity,
};
use largescale::entourage::{
    delta_of_family, maximal_family_of_entourage, reflexive_symmetric_interior, Entourage,
};
use largescale::group::{
    bs12_search_space, divergence_search, Dyadic, Element, FiniteSubset, GroupOracle,
};
use largescale::higson::{higson_defect, minimal_truncation, Exhaustion, RealFunction};
use largescale::laws::{run_law_exhaustive, run_laws, CaseSpec};
use largescale::metric::{
    ball_family, chain_metric_equivalence, diameter, generate_chain, metrize, step_family,
    ExtMetric,
};
use largescale::sets::{refines, star, star_family, Family, GroundSet, PointSet, Universe};

fn fam(u: &Universe, xss: &[&[usize]]) -> Family {
    Family::new(
        u,
        xss.iter()
            .map(|xs| PointSet::from_indices(u, xs.iter().copied()).unwrap())
            .collect(),
    )
    .unwrap()
}

fn random_family(rng: &mut ChaCha8Rng, u: &Universe, members: usize, size: usize) -> Family {
    let n = u.size();
    let count = rng.gen_range(1..=members);
    let sets = (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=size.min(n));
            PointSet::from_indices(u, (0..len).map(|_| rng.gen_range(0..n))).unwrap()
        })
        .collect();
    Family::new(u, sets).unwrap()
}

// 1. Exhaustive small-universe tier plus the seeded random tier, under a
// minute in total.
fn law_suite() {
    let started = Instant::now();
    let ids = ["lemma-2.3a", "lemma-2.3b", "lemma-3.4", "prop-1.2", "prop-3.5"];
    for id in ids {
        for n in 2..=5 {
            let report = run_law_exhaustive(id, n, 3, 3).unwrap();
            assert_eq!(report.failures, 0, "{id} failed exhaustively at n={n}");
            assert!(report.trials > 0);
        }
    }
    let spec = CaseSpec::new(7, 12, 3, 4, 500).unwrap();
    let suite = run_laws(&spec, &ids).unwrap();
    assert!(suite.all_pass);
    for report in &suite.reports {
        assert!(report.trials >= 500);
        assert_eq!(report.failures, 0);
    }
    assert!(started.elapsed().as_secs() < 60, "law suite exceeded 60 s");
}

// 2. Star diameters never exceed 2M2+M1; the collinear witness meets the
// bound exactly.
fn star_diameter_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let n = rng.gen_range(3..=10);
        let u = GroundSet::new(n);
        let mut edges = Vec::new();
        for x in 0..n {
            for y in (x + 1)..n {
                if rng.gen_bool(0.4) {
                    edges.push((x, y));
                }
            }
        }
        let d = ExtMetric::from_edges(&u, &edges).unwrap();
        let b1 = random_family(&mut rng, &u, 3, 4);
        let b2 = random_family(&mut rng, &u, 3, 4);
        let m1 = b1
            .members()
            .iter()
            .map(|m| diameter(m, &d).unwrap())
            .fold(0.0f64, f64::max);
        let m2 = b2
            .members()
            .iter()
            .map(|m| diameter(m, &d).unwrap())
            .fold(0.0f64, f64::max);
        for m in star_family(&b1, &b2).unwrap().members() {
            assert!(diameter(m, &d).unwrap() <= 2.0 * m2 + m1);
        }
    }

    // collinear equality witness: M1 = 3, M2 = 2, star diameter 7
    let (u, d) = ExtMetric::line(8);
    let b1 = fam(&u, &[&[2, 5]]);
    let b2 = fam(&u, &[&[0, 1, 2], &[5, 6, 7]]);
    let st = star_family(&b1, &b2).unwrap();
    assert_eq!(diameter(&st.members()[0], &d).unwrap(), 2.0 * 2.0 + 3.0);
}

// 3. Chain metrics validate, satisfy the sharpened triangle inequality
// and stay equivalent to their chains.
fn metrization() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.gen_range(4..=10);
        let u = GroundSet::new(n);
        let seed = random_family(&mut rng, &u, 3, 3);
        let chain = generate_chain(&seed, 6).unwrap();
        let d = metrize(&chain);
        d.validate().unwrap();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let rhs = d.dist(x, y).max(d.dist(y, z));
                    if rhs.is_finite() {
                        assert!(d.dist(x, z) <= rhs + 1.0);
                    }
                }
            }
        }
        assert!(chain_metric_equivalence(&chain, &d).unwrap().all_pass);
    }
}

// 4. Entourage/family conversions round-trip.
fn conversion_round_trips() {
    for n in 1..=4usize {
        let u = GroundSet::new(n);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .collect();
        for mask in 0u32..(1 << (n * n)) {
            let e = Entourage::from_pairs(
                &u,
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &p)| p),
            )
            .unwrap();
            let round = delta_of_family(&maximal_family_of_entourage(&e));
            assert_eq!(round, reflexive_symmetric_interior(&e));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let u = GroundSet::new(rng.gen_range(2..=8));
        let b = random_family(&mut rng, &u, 4, 4);
        let max = maximal_family_of_entourage(&delta_of_family(&b));
        assert!(refines(&b, &max).unwrap());
    }
}

// 5. Exact, brick and cover constructions on integer windows.
fn asdim_demos() {
    // exact finder on the 8-point line at r=1, n=1
    let (_, d) = ExtMetric::line(8);
    let dec = find_decomposition_bruteforce(&d, 1.0, 1, 2.0)
        .unwrap()
        .expect("line window decomposes");
    assert_eq!(dec.n(), 1);
    assert!(metric_decomposition_check(&dec, &d, 1.0, 2.0).unwrap());

    // 32r x 32r plane windows at r = 1 and 2: 3 bricks parts, components <= 16r
    for r in [1.0f64, 2.0] {
        let side = (32.0 * r) as usize;
        let (gu, g) = ExtMetric::grid(side, side);
        let dec = brick_decomposition(&gu, &[side, side], r).unwrap();
        assert_eq!(dec.parts().len(), 3);
        assert!(max_component_diameter(&dec, &g, r).unwrap() <= 16.0 * r);
        let steps = step_family(&g, r).unwrap();
        let c = ball_family(&g, 8.0 * r).unwrap();
        assert!(largescale::asdim::decomposition_check(&dec, &steps, &c).unwrap());
    }

    // components_to_cover: line multiplicity <= 2, plane multiplicity <= 3
    let (lu, ld) = ExtMetric::line(64);
    let ldec = brick_decomposition(&lu, &[64], 1.0).unwrap();
    let balls = ball_family(&ld, 1.0).unwrap();
    let cover = components_to_cover(&ldec, &balls).unwrap();
    assert!(multiplicity(&cover) <= 2);
    assert!(cover.covers());
    assert!(refines(&balls, &cover).unwrap());

    let (gu, gd) = ExtMetric::grid(24, 24);
    let gdec = brick_decomposition(&gu, &[24, 24], 1.0).unwrap();
    let gballs = ball_family(&gd, 1.0).unwrap();
    let gcover = components_to_cover(&gdec, &gballs).unwrap();
    assert!(multiplicity(&gcover) <= 3);
    assert!(gcover.covers());
    assert!(refines(&gballs, &gcover).unwrap());
}

// 6. Fiberwise inequality on the 64x64 projection, under 30 s.
fn hurewicz_demo() {
    let started = Instant::now();
    let (w, h) = (64usize, 64usize);
    let (_, dx) = ExtMetric::grid(w, h);
    let (_, dy) = ExtMetric::line(w);
    let f: Vec<usize> = (0..w * h).map(|i| i % w).collect();
    let rep = hurewicz_report(&f, &dx, &dy, &[1.0, 2.0, 4.0]).unwrap();
    assert!(rep.skipped.is_empty());
    assert_eq!(rep.scales.len(), 3);
    for s in &rep.scales {
        assert!(s.inequality_holds);
        assert!(s.n_x <= s.n_f + s.n_y);
        assert!(s.n_x <= 2);
    }
    assert!(started.elapsed().as_secs() < 30, "hurewicz exceeded 30 s");
}

// 7. Left shifts escape right shifts in BS(1,2) but not in the plane.
fn shift_divergence() {
    let started = Instant::now();
    let bs = GroupOracle::bs12();
    let t = Element::Bs12 {
        q: Dyadic::ZERO,
        n: 1,
    };
    let e = FiniteSubset::from_elements(vec![bs.identity(), t]);
    let space = bs12_search_space(64, 6, 2);
    for k in 1..=3 {
        let f = bs.word_ball(k);
        let witness = divergence_search(&bs, &e, &f, &space).unwrap();
        assert!(witness.is_some(), "no witness at radius {k}");
    }

    let zz = GroupOracle::zn(2);
    let ze = zz.word_ball(1);
    let zspace: Vec<Element> = (-3i64..=3)
        .flat_map(|a| (-3i64..=3).map(move |b| Element::Zn(vec![a, b])))
        .collect();
    for k in 1..=3 {
        let f = zz.word_ball(k);
        assert!(divergence_search(&zz, &ze, &f, &zspace).unwrap().is_none());
    }
    assert!(started.elapsed().as_secs() < 60, "divergence exceeded 60 s");
}

// 8. Defect monotonicity, the log1p/sin truncation contrast and the
// quantitative 3eps/4 star bound.
fn higson_calculus() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let n = rng.gen_range(3..=12);
        let u = GroundSet::new(n);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let f = RealFunction::new(&u, values).unwrap();
        let b = random_family(&mut rng, &u, 3, 4);
        let big = PointSet::from_indices(&u, (0..n).filter(|_| rng.gen_bool(0.5))).unwrap();
        let small = PointSet::from_indices(&u, big.iter().filter(|_| rng.gen_bool(0.5))).unwrap();
        assert!(
            higson_defect(&f, &b, &big).unwrap() <= higson_defect(&f, &b, &small).unwrap()
        );
    }

    // slowly oscillating vs. oscillating on the 10^4-point window
    let n = 10_001usize;
    let u = GroundSet::new(n);
    let blocks = Family::new(
        &u,
        (0..(n - 1) / 10)
            .map(|i| PointSet::from_indices(&u, 10 * i..=(10 * i + 10).min(n - 1)).unwrap())
            .collect(),
    )
    .unwrap();
    let ex = Exhaustion::new(
        &u,
        (1..=9)
            .map(|k| PointSet::from_indices(&u, 0..=1000 * k).unwrap())
            .collect(),
    )
    .unwrap();
    let log1p = RealFunction::from_fn(&u, |x| (1.0 + x as f64).ln()).unwrap();
    assert!(minimal_truncation(&log1p, &blocks, 0.01, &ex).unwrap().is_some());
    let wave = RealFunction::from_fn(&u, |x| (x as f64).sin()).unwrap();
    assert!(minimal_truncation(&wave, &blocks, 0.1, &ex).unwrap().is_none());

    // quantitative star bound: defects < eps/4 beyond K give star-family
    // defect < 3eps/4 beyond L = St(St(K,B1),B2) union K
    let check = |f: &RealFunction, b1: &Family, b2: &Family, k: &PointSet| {
        let d1 = higson_defect(f, b1, k).unwrap();
        let d2 = higson_defect(f, b2, k).unwrap();
        let eps = 4.0 * d1.max(d2) + 1e-9;
        let l = star(&star(k, b1).unwrap(), b2).unwrap().union(k);
        let st = star_family(b1, b2).unwrap();
        assert!(higson_defect(f, &st, &l).unwrap() < 0.75 * eps);
    };
    let wu = GroundSet::new(100);
    let wf = RealFunction::from_fn(&wu, |x| (1.0 + x as f64).ln()).unwrap();
    let b1 = Family::new(
        &wu,
        (0..14).map(|i| PointSet::from_indices(&wu, 7 * i..7 * i + 7).unwrap()).collect(),
    )
    .unwrap();
    let b2 = Family::new(
        &wu,
        (0..19).map(|i| PointSet::from_indices(&wu, 5 * i + 3..5 * i + 8).unwrap()).collect(),
    )
    .unwrap();
    let k = PointSet::from_indices(&wu, 0..=40).unwrap();
    check(&wf, &b1, &b2, &k);
    for _ in 0..20 {
        let m = rng.gen_range(4..=12);
        let u = GroundSet::new(m);
        let values: Vec<f64> = (0..m).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let f = RealFunction::new(&u, values).unwrap();
        let b1 = random_family(&mut rng, &u, 3, 3);
        let b2 = random_family(&mut rng, &u, 3, 3);
        let k = PointSet::from_indices(&u, (0..m).filter(|_| rng.gen_bool(0.5))).unwrap();
        check(&f, &b1, &b2, &k);
    }
}

// 9. Oracle axioms on 10^4 random triples each; the BS relation exactly.
fn oracle_self_tests() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cyclic: Vec<Vec<usize>> = (0..6).map(|i| (0..6).map(|j| (i + j) % 6).collect()).collect();
    let oracles = [
        GroupOracle::zn(2),
        GroupOracle::free(2),
        GroupOracle::bs12(),
        GroupOracle::table(cyclic).unwrap(),
    ];
    for oracle in &oracles {
        oracle.self_test(&mut rng, 10_000).unwrap();
    }
    let bs = GroupOracle::bs12();
    let a = Element::Bs12 {
        q: Dyadic::from_int(1),
        n: 0,
    };
    let t = Element::Bs12 {
        q: Dyadic::ZERO,
        n: 1,
    };
    let conj = bs
        .multiply(&bs.multiply(&t, &a).unwrap(), &bs.invert(&t).unwrap())
        .unwrap();
    assert_eq!(conj, bs.multiply(&a, &a).unwrap());
}

fn main() {
    let criteria: [(&str, fn()); 9] = [
        ("law suite", law_suite),
        ("star diameter bound", star_diameter_bound),
        ("metrization", metrization),
        ("conversion round-trips", conversion_round_trips),
        ("asdim demos", asdim_demos),
        ("hurewicz demo", hurewicz_demo),
        ("shift divergence", shift_divergence),
        ("higson calculus", higson_calculus),
        ("oracle self-tests", oracle_self_tests),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let ok = catch_unwind(AssertUnwindSafe(run)).is_ok();
        println!("criterion {} ({name}): {}", i + 1, if ok { "pass" } else { "fail" });
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
