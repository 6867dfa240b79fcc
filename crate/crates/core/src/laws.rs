//! Executable law suite: every proved identity and inclusion becomes a
//! predicate over randomly generated or exhaustively enumerated small
//! instances, with reproducible seeds and minimized counterexamples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::entourage::{compose, delta_of_family, image_of_set};
use crate::error::{Error, Result};
use crate::metric::{diameter, generate_chain, metrize, chain_metric_equivalence, ExtMetric};
use crate::sets::{
    refines, refines_mod_singletons, star, star_family, trivial_extension, union_families,
    Family, GroundSet, PointSet, Universe,
};

pub const LAW_IDS: &[&str] = &[
    "lemma-2.3a",
    "lemma-2.3b",
    "lemma-3.4",
    "prop-1.2",
    "prop-1.3",
    "prop-3.5",
    "prop-1.6",
    "thm-1.7",
];

/// A deliberately wrong variant of lemma-2.3a with the composition chain
/// reordered; kept as a fixture so failure reporting stays honest.
pub const MUTANT_LAW_ID: &str = "mutant-2.3a";

/// Reproducible random-instance parameters.
#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub seed: u64,
    pub universe_size: usize,
    pub family_count: usize,
    pub member_size: usize,
    pub trial_count: usize,
}

impl CaseSpec {
    pub fn new(
        seed: u64,
        universe_size: usize,
        family_count: usize,
        member_size: usize,
        trial_count: usize,
    ) -> Result<CaseSpec> {
        if !(2..=12).contains(&universe_size) {
            return Err(Error::InvalidArgument(
                "universe_size must be between 2 and 12".into(),
            ));
        }
        if family_count == 0 || member_size == 0 {
            return Err(Error::InvalidArgument(
                "family_count and member_size must be positive".into(),
            ));
        }
        Ok(CaseSpec {
            seed,
            universe_size,
            family_count,
            member_size,
            trial_count,
        })
    }
}

/// A concrete trial: two families, a base set and an edge list (the edge
/// list induces the path metric used by the metric laws).
#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub n: usize,
    pub b1: Vec<Vec<usize>>,
    pub b2: Vec<Vec<usize>>,
    pub k: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Instance {
    fn universe(&self) -> Universe {
        GroundSet::new(self.n)
    }

    fn family(&self, members: &[Vec<usize>], u: &Universe) -> Result<Family> {
        Family::new(
            u,
            members
                .iter()
                .map(|m| PointSet::from_indices(u, m.iter().copied()))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    fn support_points(&self) -> Vec<usize> {
        let mut pts: Vec<usize> = self
            .b1
            .iter()
            .chain(&self.b2)
            .flatten()
            .copied()
            .chain(self.k.iter().copied())
            .chain(self.edges.iter().flat_map(|&(a, b)| [a, b]))
            .collect();
        pts.sort_unstable();
        pts.dedup();
        pts
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub law_id: String,
    pub trials: usize,
    pub failures: usize,
    pub counterexample: Option<Instance>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub reports: Vec<LawReport>,
    pub all_pass: bool,
}

/// Member sizes are drawn uniformly in 1..=member_size and points without
/// replacement, so other implementations can reproduce the stream.
fn random_instance(rng: &mut ChaCha8Rng, spec: &CaseSpec) -> Instance {
    let n = rng.gen_range(2..=spec.universe_size);
    let family = |rng: &mut ChaCha8Rng| -> Vec<Vec<usize>> {
        let count = rng.gen_range(0..=spec.family_count);
        (0..count)
            .map(|_| {
                let size = rng.gen_range(1..=spec.member_size.min(n));
                let mut pool: Vec<usize> = (0..n).collect();
                let mut member = Vec::with_capacity(size);
                for _ in 0..size {
                    member.push(pool.swap_remove(rng.gen_range(0..pool.len())));
                }
                member.sort_unstable();
                member
            })
            .collect()
    };
    let b1 = family(rng);
    let b2 = family(rng);
    let k_size = rng.gen_range(0..=n.min(3));
    let mut pool: Vec<usize> = (0..n).collect();
    let mut k = Vec::with_capacity(k_size);
    for _ in 0..k_size {
        k.push(pool.swap_remove(rng.gen_range(0..pool.len())));
    }
    k.sort_unstable();
    let edge_count = rng.gen_range(0..=2 * n);
    let edges = (0..edge_count)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    Instance { n, b1, b2, k, edges }
}

fn check_law(law_id: &str, inst: &Instance) -> Result<bool> {
    let u = inst.universe();
    let b1 = inst.family(&inst.b1, &u)?;
    let b2 = inst.family(&inst.b2, &u)?;
    let k = PointSet::from_indices(&u, inst.k.iter().copied())?;
    check_law_on(law_id, &u, &b1, &b2, &k, &inst.edges)
}

fn check_law_on(
    law_id: &str,
    u: &Universe,
    b1: &Family,
    b2: &Family,
    k: &PointSet,
    edges: &[(usize, usize)],
) -> Result<bool> {
    match law_id {
        "lemma-2.3a" => {
            let e1 = delta_of_family(b1);
            let e2 = delta_of_family(b2);
            let lhs = delta_of_family(&star_family(b1, b2)?);
            let rhs = compose(&compose(&e2, &e1)?, &e2)?;
            lhs.is_subset_of(&rhs)
        }
        "lemma-2.3b" => {
            let e1 = delta_of_family(b1);
            let e2 = delta_of_family(b2);
            let lhs = compose(&e1, &e2)?;
            let rhs = delta_of_family(&star_family(b2, &union_families(b1, b2)?)?);
            lhs.is_subset_of(&rhs)
        }
        "lemma-3.4" => {
            let via_entourage = image_of_set(&delta_of_family(b1), k)?;
            let via_star = star(k, b1)?;
            Ok(via_entourage == via_star)
        }
        "prop-1.2" => {
            let both = union_families(b1, b2)?;
            let stars = star_family(&trivial_extension(b1), &trivial_extension(b2))?;
            refines(&both, &stars)
        }
        "prop-1.3" => {
            let d = ExtMetric::from_edges(u, edges)?;
            let bound_of = |b: &Family| -> Result<f64> {
                let mut m: f64 = 0.0;
                for mem in b.members() {
                    m = m.max(diameter(mem, &d)?);
                }
                Ok(m)
            };
            let m1 = bound_of(b1)?;
            let m2 = bound_of(b2)?;
            for mem in star_family(b1, b2)?.members() {
                if diameter(mem, &d)? > 2.0 * m2 + m1 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        "prop-3.5" => {
            // the corrected three-star hull; see star_proper_inclusion_check
            let lhs = star(k, &star_family(b1, b2)?)?;
            let rhs = star(&star(&star(k, b2)?, b1)?, b2)?;
            Ok(lhs.is_subset_of(&rhs))
        }
        "prop-1.6" => {
            let layers = generated_closure(&[b1.clone(), b2.clone()], 3)?;
            for w in layers.windows(2) {
                for f in &w[0] {
                    if closure_layer_contains(&w[1], f)?.is_none() {
                        return Ok(false);
                    }
                }
            }
            // union and mutual star of generators land in the closure
            let both = union_families(b1, b2)?;
            let e1 = trivial_extension(b1);
            let e2 = trivial_extension(b2);
            let mutual = star_family(&e1, &e2)?;
            Ok(closure_layer_contains(layers.last().expect("depth >= 1"), &both)?.is_some()
                && closure_layer_contains(layers.last().expect("depth >= 1"), &mutual)?
                    .is_some())
        }
        "thm-1.7" => {
            let chain = generate_chain(b1, 3)?;
            let d = metrize(&chain);
            d.validate()?;
            let n = u.size();
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let rhs = d.dist(x, y).max(d.dist(y, z));
                        if rhs.is_finite() && d.dist(x, z) > rhs + 1.0 {
                            return Ok(false);
                        }
                    }
                }
            }
            Ok(chain_metric_equivalence(&chain, &d)?.all_pass)
        }
        MUTANT_LAW_ID => {
            // corrupted composition order: the outer legs use E1 instead
            // of E2, which the true lemma does not permit
            let e1 = delta_of_family(b1);
            let e2 = delta_of_family(b2);
            let lhs = delta_of_family(&star_family(b1, b2)?);
            let rhs = compose(&compose(&e1, &e2)?, &e1)?;
            lhs.is_subset_of(&rhs)
        }
        other => Err(Error::UnknownLaw(other.to_string())),
    }
}

/// Greedy shrink: drop members, then points, then edges, then compact the
/// support to a minimal universe — keeping the instance failing.
fn minimize(law_id: &str, inst: &Instance) -> Result<Instance> {
    let mut best = inst.clone();
    loop {
        let mut improved = false;
        let mut candidates: Vec<Instance> = Vec::new();
        for i in 0..best.b1.len() {
            let mut c = best.clone();
            c.b1.remove(i);
            candidates.push(c);
        }
        for i in 0..best.b2.len() {
            let mut c = best.clone();
            c.b2.remove(i);
            candidates.push(c);
        }
        for (i, m) in best.b1.iter().enumerate() {
            for j in 0..m.len() {
                let mut c = best.clone();
                c.b1[i].remove(j);
                if c.b1[i].is_empty() {
                    c.b1.remove(i);
                }
                candidates.push(c);
            }
        }
        for (i, m) in best.b2.iter().enumerate() {
            for j in 0..m.len() {
                let mut c = best.clone();
                c.b2[i].remove(j);
                if c.b2[i].is_empty() {
                    c.b2.remove(i);
                }
                candidates.push(c);
            }
        }
        for i in 0..best.k.len() {
            let mut c = best.clone();
            c.k.remove(i);
            candidates.push(c);
        }
        for i in 0..best.edges.len() {
            let mut c = best.clone();
            c.edges.remove(i);
            candidates.push(c);
        }
        for c in candidates {
            if !check_law(law_id, &c)? {
                best = c;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }
    // compact unused points away
    let used = best.support_points();
    if !used.is_empty() && used.len() < best.n {
        let remap = |x: usize| used.binary_search(&x).expect("support point");
        let compacted = Instance {
            n: used.len().max(2),
            b1: best
                .b1
                .iter()
                .map(|m| m.iter().map(|&x| remap(x)).collect())
                .collect(),
            b2: best
                .b2
                .iter()
                .map(|m| m.iter().map(|&x| remap(x)).collect())
                .collect(),
            k: best.k.iter().map(|&x| remap(x)).collect(),
            edges: best
                .edges
                .iter()
                .map(|&(a, b)| (remap(a), remap(b)))
                .collect(),
        };
        if !check_law(law_id, &compacted)? {
            best = compacted;
        }
    }
    Ok(best)
}

/// Runs the listed laws over `trial_count` seeded random instances each.
/// A failing law's report carries the minimized counterexample.
pub fn run_laws(spec: &CaseSpec, law_ids: &[&str]) -> Result<SuiteReport> {
    for id in law_ids {
        // reject unknown ids up front
        let probe = Instance {
            n: 2,
            b1: vec![],
            b2: vec![],
            k: vec![],
            edges: vec![],
        };
        check_law(id, &probe)?;
    }
    let mut reports = Vec::new();
    let mut all_pass = true;
    for id in law_ids {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut failures = 0;
        let mut counterexample = None;
        for _ in 0..spec.trial_count {
            let inst = random_instance(&mut rng, spec);
            if !check_law(id, &inst)? {
                failures += 1;
                if counterexample.is_none() {
                    counterexample = Some(minimize(id, &inst)?);
                }
            }
        }
        all_pass &= failures == 0;
        reports.push(LawReport {
            law_id: id.to_string(),
            trials: spec.trial_count,
            failures,
            counterexample,
        });
    }
    Ok(SuiteReport { reports, all_pass })
}

/// Exhaustive tier: all ordered pairs of families with at most
/// `max_members` nonempty members of size ≤ `max_member_size` on an
/// n-point universe, with K ranging over the empty set and singletons
/// (stars are unions over the points of K, so singleton K decide the
/// K-indexed laws pointwise; arbitrary K are covered by the random tier).
pub fn run_law_exhaustive(
    law_id: &str,
    n: usize,
    max_members: usize,
    max_member_size: usize,
) -> Result<LawReport> {
    if n == 0 || n > 8 {
        return Err(Error::InvalidArgument(
            "exhaustive tier supports 1..=8 points".into(),
        ));
    }
    // subsets as bitmasks
    let mut subsets: Vec<u32> = (1u32..(1 << n))
        .filter(|m| m.count_ones() as usize <= max_member_size)
        .collect();
    subsets.sort_unstable();
    let mut families: Vec<Vec<u32>> = vec![vec![]];
    let mut frontier: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..max_members {
        let mut next = Vec::new();
        for f in &frontier {
            let start = f.last().map_or(0, |&m| {
                subsets.binary_search(&m).expect("member is a subset") + 1
            });
            for &s in &subsets[start..] {
                let mut g = f.clone();
                g.push(s);
                next.push(g);
            }
        }
        families.extend(next.iter().cloned());
        frontier = next;
    }

    // prebuilt objects shared across the pair loop
    let u = GroundSet::new(n);
    let set_of = |mask: u32| -> PointSet {
        PointSet::from_indices(&u, mask_to_vec(mask)).expect("mask within range")
    };
    let built: Vec<Family> = families
        .iter()
        .map(|f| Family::new(&u, f.iter().map(|&m| set_of(m)).collect()).expect("shared universe"))
        .collect();
    let ks: Vec<PointSet> = std::iter::once(PointSet::empty(&u))
        .chain((0..n).map(|x| PointSet::singleton(&u, x).expect("in range")))
        .collect();
    let empty_k = PointSet::empty(&u);

    let to_instance = |b1: &[u32], b2: &[u32], k: &PointSet| Instance {
        n,
        b1: b1.iter().map(|&m| mask_to_vec(m)).collect(),
        b2: b2.iter().map(|&m| mask_to_vec(m)).collect(),
        k: k.iter().collect(),
        edges: vec![],
    };

    let mut trials = 0;
    let mut failures = 0;
    let mut counterexample = None;

    if law_id == "lemma-3.4" {
        // one-family law: the b2 loop would only repeat work
        for (i1, b1) in built.iter().enumerate() {
            for k in &ks {
                trials += 1;
                if !check_law_on(law_id, &u, b1, b1, k, &[])? {
                    failures += 1;
                    if counterexample.is_none() {
                        counterexample =
                            Some(minimize(law_id, &to_instance(&families[i1], &[], k))?);
                    }
                }
            }
        }
    } else {
        let uses_k = law_id == "prop-3.5";
        for (i1, b1) in built.iter().enumerate() {
            for (i2, b2) in built.iter().enumerate() {
                if uses_k {
                    for k in &ks {
                        trials += 1;
                        if !check_law_on(law_id, &u, b1, b2, k, &[])? {
                            failures += 1;
                            if counterexample.is_none() {
                                counterexample = Some(minimize(
                                    law_id,
                                    &to_instance(&families[i1], &families[i2], k),
                                )?);
                            }
                        }
                    }
                } else {
                    trials += 1;
                    if !check_law_on(law_id, &u, b1, b2, &empty_k, &[])? {
                        failures += 1;
                        if counterexample.is_none() {
                            counterexample = Some(minimize(
                                law_id,
                                &to_instance(&families[i1], &families[i2], &empty_k),
                            )?);
                        }
                    }
                }
            }
        }
    }
    Ok(LawReport {
        law_id: law_id.to_string(),
        trials,
        failures,
        counterexample,
    })
}

fn mask_to_vec(m: u32) -> Vec<usize> {
    (0..32).filter(|&b| m & (1 << b) != 0).collect()
}

/// Layers of the structure generated by the seeds: layer 1 holds the
/// trivial extensions of the seeds; each next layer adds the trivial
/// extensions of unions and mutual stars of the previous layer's pairs.
pub fn generated_closure(seeds: &[Family], depth: usize) -> Result<Vec<Vec<Family>>> {
    if depth == 0 || depth > 6 {
        return Err(Error::InvalidArgument("closure depth must be 1..=6".into()));
    }
    let mut layers: Vec<Vec<Family>> = Vec::with_capacity(depth);
    let mut current: Vec<Family> = Vec::new();
    for s in seeds {
        push_unique(&mut current, trivial_extension(s));
    }
    layers.push(current.clone());
    for _ in 1..depth {
        let mut next = current.clone();
        for f in &current {
            for g in &current {
                push_unique(&mut next, trivial_extension(&union_families(f, g)?));
                push_unique(&mut next, trivial_extension(&star_family(f, g)?));
            }
        }
        layers.push(next.clone());
        current = next;
    }
    Ok(layers)
}

fn push_unique(layer: &mut Vec<Family>, f: Family) {
    if !layer.iter().any(|g| g.same_members(&f)) {
        layer.push(f);
    }
}

/// "Member by this layer": the candidate refines (mod singletons) some
/// family of the layer. Returns the index of the witnessing family.
pub fn closure_layer_contains(layer: &[Family], candidate: &Family) -> Result<Option<usize>> {
    for (i, f) in layer.iter().enumerate() {
        if refines_mod_singletons(candidate, f)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}
