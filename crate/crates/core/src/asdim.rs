//! Asymptotic-dimension machinery: multiplicity, B-components,
//! decomposition checks, the cover/decomposition transforms, exhaustive
//! and brick decomposition finders, and the fiberwise inequality demo.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{diameter, ExtMetric};
use crate::sets::{
    check_universe, star, star_family, trivial_extension, Family, PointSet, Universe,
};

/// Exact decomposition search refuses universes above this size.
pub const EXACT_SEARCH_CAP: usize = 16;

/// A partition X₀ ∪ … ∪ X_n of the universe into pairwise disjoint parts.
#[derive(Clone, Debug)]
pub struct Decomposition {
    universe: Universe,
    parts: Vec<PointSet>,
}

impl Decomposition {
    pub fn new(universe: &Universe, parts: Vec<PointSet>) -> Result<Decomposition> {
        let mut seen = PointSet::empty(universe);
        for p in &parts {
            check_universe(universe, p.universe())?;
            if seen.intersects(p) {
                return Err(Error::InvalidArgument(
                    "decomposition parts must be pairwise disjoint".into(),
                ));
            }
            seen.union_with(p);
        }
        if seen.len() != universe.size() {
            return Err(Error::InvalidArgument(
                "decomposition parts must cover the universe".into(),
            ));
        }
        Ok(Decomposition {
            universe: universe.clone(),
            parts,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn parts(&self) -> &[PointSet] {
        &self.parts
    }

    /// Number of parts minus one (the n of an (n+1)-part decomposition).
    pub fn n(&self) -> usize {
        self.parts.len().saturating_sub(1)
    }
}

/// Equivalence classes of ∼_B restricted to a subset.
#[derive(Clone, Debug)]
pub struct ComponentPartition {
    classes: Vec<PointSet>,
}

impl ComponentPartition {
    pub fn classes(&self) -> &[PointSet] {
        &self.classes
    }

    pub fn class_of(&self, x: usize) -> Option<&PointSet> {
        self.classes.iter().find(|c| c.contains(x))
    }
}

/// Max over points of the number of members containing the point,
/// counted with duplicity.
pub fn multiplicity(b: &Family) -> usize {
    let n = b.universe().size();
    let mut counts = vec![0usize; n];
    for m in b.members() {
        for x in m.iter() {
            counts[x] += 1;
        }
    }
    counts.into_iter().max().unwrap_or(0)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            // deterministic representative: the smaller index wins
            let (lo, hi) = (rx.min(ry), rx.max(ry));
            self.parent[hi] = lo;
        }
    }
}

fn classes_from(uf: &mut UnionFind, points: &[usize], universe: &Universe) -> Vec<PointSet> {
    let mut by_root: Vec<(usize, PointSet)> = Vec::new();
    for &x in points {
        let r = uf.find(x);
        match by_root.iter_mut().find(|(root, _)| *root == r) {
            Some((_, class)) => class.insert(x).expect("in range"),
            None => {
                let mut class = PointSet::empty(universe);
                class.insert(x).expect("in range");
                by_root.push((r, class));
            }
        }
    }
    by_root.sort_by_key(|(root, _)| *root);
    by_root.into_iter().map(|(_, c)| c).collect()
}

/// Components of ∼_B on S: x ∼ y when a chain x₀=x,…,x_k=y with every
/// x_i ∈ S has each consecutive pair inside some member of B.
pub fn b_components(b: &Family, s: &PointSet) -> Result<ComponentPartition> {
    check_universe(b.universe(), s.universe())?;
    let mut uf = UnionFind::new(s.universe().size());
    for m in b.members() {
        let inside = m.intersection(s);
        let mut prev: Option<usize> = None;
        for x in inside.iter() {
            if let Some(p) = prev {
                uf.union(p, x);
            }
            prev = Some(x);
        }
    }
    let points: Vec<usize> = s.iter().collect();
    Ok(ComponentPartition {
        classes: classes_from(&mut uf, &points, s.universe()),
    })
}

/// r-components of S: chains inside S with steps of distance ≤ r.
pub fn r_components(d: &ExtMetric, s: &PointSet, r: f64) -> Result<ComponentPartition> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument("scale must be nonnegative".into()));
    }
    let points: Vec<usize> = s.iter().collect();
    let mut uf = UnionFind::new(s.universe().size());
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            if d.dist(x, y) <= r {
                uf.union(x, y);
            }
        }
    }
    Ok(ComponentPartition {
        classes: classes_from(&mut uf, &points, s.universe()),
    })
}

/// True iff every B-component of every part is contained in some member
/// of C.
pub fn decomposition_check(dec: &Decomposition, b: &Family, c: &Family) -> Result<bool> {
    check_universe(dec.universe(), b.universe())?;
    check_universe(dec.universe(), c.universe())?;
    for part in dec.parts() {
        for class in b_components(b, part)?.classes() {
            if !c.members().iter().any(|m| class.is_subset_of(m)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Metric form of the check: every r-component of every part has
/// diameter ≤ bound.
pub fn metric_decomposition_check(
    dec: &Decomposition,
    d: &ExtMetric,
    r: f64,
    bound: f64,
) -> Result<bool> {
    Ok(max_component_diameter(dec, d, r)? <= bound)
}

/// Largest diameter among per-part r-components.
pub fn max_component_diameter(dec: &Decomposition, d: &ExtMetric, r: f64) -> Result<f64> {
    check_universe(dec.universe(), d.universe())?;
    let mut worst: f64 = 0.0;
    for part in dec.parts() {
        for class in r_components(d, part, r)?.classes() {
            worst = worst.max(diameter(class, d)?);
        }
    }
    Ok(worst)
}

/// Turns a decomposition into a cover: with B₂ = St(e(B₁), e(B₁)), every
/// B₂-component C of every part contributes St(C, B₁) ∪ C.
pub fn components_to_cover(dec: &Decomposition, b1: &Family) -> Result<Family> {
    check_universe(dec.universe(), b1.universe())?;
    let e1 = trivial_extension(b1);
    let b2 = star_family(&e1, &e1)?;
    let mut members = Vec::new();
    for part in dec.parts() {
        for class in b_components(&b2, part)?.classes() {
            members.push(star(class, b1)?.union(class));
        }
    }
    Family::new(dec.universe(), members)
}

/// Exhaustive search for an (n+1)-part decomposition whose per-part
/// r-components all have diameter ≤ d_bound. Backtracks over colorings
/// in lexicographic order, so the returned witness is canonical.
pub fn find_decomposition_bruteforce(
    d: &ExtMetric,
    r: f64,
    n: usize,
    d_bound: f64,
) -> Result<Option<Decomposition>> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    if !(d_bound >= 0.0) {
        return Err(Error::InvalidArgument("diameter bound must be nonnegative".into()));
    }
    let size = d.universe().size();
    if size > EXACT_SEARCH_CAP {
        return Err(Error::SearchCapExceeded {
            cap: EXACT_SEARCH_CAP,
            size,
        });
    }
    let colors = n + 1;
    let mut assignment = vec![usize::MAX; size];

    fn partial_ok(
        d: &ExtMetric,
        r: f64,
        d_bound: f64,
        assignment: &[usize],
        upto: usize,
        color: usize,
    ) -> bool {
        // r-components among the already-colored points of this color,
        // including the candidate point `upto`
        let pts: Vec<usize> = (0..=upto)
            .filter(|&x| x == upto || assignment[x] == color)
            .collect();
        let mut uf = UnionFind::new(upto + 1);
        for (i, &x) in pts.iter().enumerate() {
            for &y in &pts[i + 1..] {
                if d.dist(x, y) <= r {
                    uf.union(x, y);
                }
            }
        }
        for &x in &pts {
            for &y in &pts {
                if uf.find(x) == uf.find(y) && d.dist(x, y) > d_bound {
                    return false;
                }
            }
        }
        true
    }

    fn search(
        d: &ExtMetric,
        r: f64,
        d_bound: f64,
        colors: usize,
        assignment: &mut [usize],
        at: usize,
    ) -> bool {
        if at == assignment.len() {
            return true;
        }
        for c in 0..colors {
            if partial_ok(d, r, d_bound, assignment, at, c) {
                assignment[at] = c;
                if search(d, r, d_bound, colors, assignment, at + 1) {
                    return true;
                }
                assignment[at] = usize::MAX;
            }
        }
        false
    }

    if size == 0 {
        let parts = (0..colors).map(|_| PointSet::empty(d.universe())).collect();
        return Ok(Some(Decomposition::new(d.universe(), parts)?));
    }
    if !search(d, r, d_bound, colors, &mut assignment, 0) {
        return Ok(None);
    }
    let mut parts: Vec<PointSet> = (0..colors).map(|_| PointSet::empty(d.universe())).collect();
    for (x, &c) in assignment.iter().enumerate() {
        parts[c].insert(x)?;
    }
    Ok(Some(Decomposition::new(d.universe(), parts)?))
}

/// Brick decompositions of line and grid windows: dim+1 parts of
/// axis-aligned 4r bricks with same-part bricks more than r apart.
/// Expects the index convention of the line/grid constructors
/// (grid index = row·w + col).
pub fn brick_decomposition(
    universe: &Universe,
    extents: &[usize],
    r: f64,
) -> Result<Decomposition> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    let total: usize = extents.iter().product();
    if total != universe.size() {
        return Err(Error::InvalidArgument(format!(
            "extents {extents:?} do not match a {}-point universe",
            universe.size()
        )));
    }
    let side = 4.0 * r;
    match extents {
        [n] => {
            let mut parts = vec![PointSet::empty(universe); 2];
            for x in 0..*n {
                let block = (x as f64 / side).floor() as i64;
                parts[(block.rem_euclid(2)) as usize].insert(x)?;
            }
            Decomposition::new(universe, parts)
        }
        [w, h] => {
            // staggered bricks: each brick row is shifted by 2r, so the
            // three colors never let same-color bricks touch, even at
            // corners
            let mut parts = vec![PointSet::empty(universe); 3];
            for row in 0..*h {
                let j = (row as f64 / side).floor() as i64;
                for col in 0..*w {
                    let i = ((col as f64 + 2.0 * r * j as f64) / side).floor() as i64;
                    parts[((i + j).rem_euclid(3)) as usize].insert(row * w + col)?;
                }
            }
            Decomposition::new(universe, parts)
        }
        _ => Err(Error::InvalidArgument(
            "brick decompositions support dimensions 1 and 2 only".into(),
        )),
    }
}

/// One scale's entry of the fiberwise-inequality report.
#[derive(Clone, Debug, Serialize)]
pub struct HurewiczScaleReport {
    pub scale: f64,
    /// Largest diameter of an image of an r-ball under f.
    pub image_diameter_bound: f64,
    pub n_f: usize,
    #[serde(rename = "n_Y")]
    pub n_y: usize,
    #[serde(rename = "n_X")]
    pub n_x: usize,
    /// Largest r-component diameter over fiber decompositions.
    pub fiber_component_bound: f64,
    /// Largest r-component diameter over the base decomposition's parts.
    pub base_component_bound: f64,
    /// Largest r-component diameter over the assembled parts.
    pub assembled_component_bound: f64,
    pub inequality_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HurewiczReport {
    pub scales: Vec<HurewiczScaleReport>,
    /// Scales where f was not large-scale uniform, with the reason.
    pub skipped: Vec<(f64, String)>,
}

/// Layers a subset by distance from the base of each finite-distance
/// component inside the subset, in 4r blocks; returns each point's block
/// index. Chains are taken inside the subset.
fn layer_blocks(d: &ExtMetric, subset: &PointSet, r: f64) -> Result<Vec<(usize, i64)>> {
    let comps = r_components(d, subset, f64::INFINITY)?;
    let mut out = Vec::new();
    for class in comps.classes() {
        let base = class.min().expect("classes are nonempty");
        for x in class.iter() {
            let block = (d.dist(base, x) / (4.0 * r)).floor() as i64;
            out.push((x, block));
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn partition_diameter_bound(
    d: &ExtMetric,
    parts: &[PointSet],
    r: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in parts {
        for class in r_components(d, p, r)?.classes() {
            worst = worst.max(diameter(class, d)?);
        }
    }
    Ok(worst)
}

/// Runs the fiberwise inequality demo: decomposes ball fibers of f, the
/// base, and assembles a decomposition of the total space, reporting the
/// achieved part counts and whether n_X ≤ n_f + n_Y held.
pub fn hurewicz_report(
    f: &[usize],
    dx: &ExtMetric,
    dy: &ExtMetric,
    scales: &[f64],
) -> Result<HurewiczReport> {
    let nx = dx.universe().size();
    let ny = dy.universe().size();
    if f.len() != nx {
        return Err(Error::InvalidArgument(format!(
            "point map has {} entries for a {nx}-point domain",
            f.len()
        )));
    }
    if let Some(&bad) = f.iter().find(|&&y| y >= ny) {
        return Err(Error::IndexOutOfRange { index: bad, size: ny });
    }

    let mut report = HurewiczReport {
        scales: Vec::new(),
        skipped: Vec::new(),
    };

    for &r in scales {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument("scales must be positive".into()));
        }

        // uniformity: images of r-balls must stay bounded
        let mut image_bound: f64 = 0.0;
        for x in 0..nx {
            let ball: Vec<usize> = (0..nx).filter(|&z| dx.dist(x, z) <= r).collect();
            for (i, &a) in ball.iter().enumerate() {
                for &b in &ball[i + 1..] {
                    image_bound = image_bound.max(dy.dist(f[a], f[b]));
                }
            }
        }
        if !image_bound.is_finite() {
            report
                .skipped
                .push((r, "images of r-balls are unbounded".into()));
            continue;
        }

        // base decomposition: 4r blocks of distance-from-base layers
        let full_y = PointSet::full(dy.universe());
        let mut y_block = vec![0i64; ny];
        for (y, k) in layer_blocks(dy, &full_y, r)? {
            y_block[y] = k;
        }
        let max_block = y_block.iter().copied().max().unwrap_or(0);
        let y_parts: Vec<PointSet> = if max_block == 0 {
            vec![full_y.clone()]
        } else {
            let mut parts = vec![PointSet::empty(dy.universe()); 2];
            for y in 0..ny {
                parts[(y_block[y].rem_euclid(2)) as usize].insert(y)?;
            }
            parts
        };
        let n_y = y_parts.len() - 1;
        let base_bound = partition_diameter_bound(dy, &y_parts, r)?;

        // fiber count n_f: decompose each r-ball fiber f⁻¹(B(y,r)) by the
        // same layering; the count is the worst over fibers
        let mut n_f = 0usize;
        let mut fiber_bound: f64 = 0.0;
        for y in 0..ny {
            let fiber = PointSet::from_indices(
                dx.universe(),
                (0..nx).filter(|&x| dy.dist(f[x], y) <= r),
            )?;
            if fiber.is_empty() {
                continue;
            }
            let blocks = layer_blocks(dx, &fiber, r)?;
            let top = blocks.iter().map(|&(_, k)| k).max().unwrap_or(0);
            let parts: Vec<PointSet> = if top == 0 {
                vec![fiber.clone()]
            } else {
                let mut parts = vec![PointSet::empty(dx.universe()); 2];
                for (x, k) in blocks {
                    parts[(k.rem_euclid(2)) as usize].insert(x)?;
                }
                parts
            };
            n_f = n_f.max(parts.len() - 1);
            fiber_bound = fiber_bound.max(partition_diameter_bound(dx, &parts, r)?);
        }

        // assembly
        let x_parts: Vec<PointSet> = if n_f == 0 {
            // fibers are already small: pull the base parts back
            let mut parts = vec![PointSet::empty(dx.universe()); y_parts.len()];
            for x in 0..nx {
                let part = y_parts
                    .iter()
                    .position(|p| p.contains(f[x]))
                    .expect("base parts cover");
                parts[part].insert(x)?;
            }
            parts
        } else if max_block == 0 {
            // one base block: the fiber layering of the whole space
            let blocks = layer_blocks(dx, &PointSet::full(dx.universe()), r)?;
            let top = blocks.iter().map(|&(_, k)| k).max().unwrap_or(0);
            if top == 0 {
                vec![PointSet::full(dx.universe())]
            } else {
                let mut parts = vec![PointSet::empty(dx.universe()); 2];
                for (x, k) in blocks {
                    parts[(k.rem_euclid(2)) as usize].insert(x)?;
                }
                parts
            }
        } else {
            // staircase assembly: within the preimage of base block k,
            // layer in 4r blocks staggered by 2r·k, and color by
            // (layer + k) mod 3 so overlapping cross-block bricks never
            // share a color
            let mut parts = vec![PointSet::empty(dx.universe()); 3];
            let blocks_present: Vec<i64> = {
                let mut v: Vec<i64> = (0..ny).map(|y| y_block[y]).collect();
                v.sort_unstable();
                v.dedup();
                v
            };
            for &k in &blocks_present {
                let pre = PointSet::from_indices(
                    dx.universe(),
                    (0..nx).filter(|&x| y_block[f[x]] == k),
                )?;
                for class in r_components(dx, &pre, f64::INFINITY)?.classes() {
                    let base = class.min().expect("nonempty");
                    for x in class.iter() {
                        let g = dx.dist(base, x);
                        let j = ((g + 2.0 * r * k as f64) / (4.0 * r)).floor() as i64;
                        parts[((j + k).rem_euclid(3)) as usize].insert(x)?;
                    }
                }
            }
            parts
        };
        let x_parts: Vec<PointSet> = x_parts.into_iter().filter(|p| !p.is_empty()).collect();
        let n_x = x_parts.len().saturating_sub(1);
        let assembled_bound = partition_diameter_bound(dx, &x_parts, r)?;

        report.scales.push(HurewiczScaleReport {
            scale: r,
            image_diameter_bound: image_bound,
            n_f,
            n_y,
            n_x,
            fiber_component_bound: fiber_bound,
            base_component_bound: base_bound,
            assembled_component_bound: assembled_bound,
            inequality_holds: n_x <= n_f + n_y,
        });
    }
    Ok(report)
}
