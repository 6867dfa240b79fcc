//! ∞-metrics on finite windows, ball families, scale chains and the
//! metrization of a chain.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sets::{
    check_universe, refines, star_family, trivial_extension, Family, GroundSet, PointSet, Universe,
};

/// A symmetric matrix of distances valued in the nonnegative reals extended
/// with ∞ (`f64::INFINITY`, with the usual absorbing addition).
#[derive(Clone, Debug, PartialEq)]
pub struct ExtMetric {
    universe: Universe,
    dist: Vec<f64>,
}

impl ExtMetric {
    /// Builds a metric from a row-major matrix, checking every axiom.
    /// Triangle checking is cubic; intended for window-sized inputs.
    pub fn from_matrix(universe: &Universe, dist: Vec<f64>) -> Result<ExtMetric> {
        let n = universe.size();
        if dist.len() != n * n {
            return Err(Error::InvalidMetric(format!(
                "matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        let m = ExtMetric {
            universe: universe.clone(),
            dist,
        };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn from_matrix_unchecked(universe: &Universe, dist: Vec<f64>) -> ExtMetric {
        debug_assert_eq!(dist.len(), universe.size() * universe.size());
        ExtMetric {
            universe: universe.clone(),
            dist,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.universe.size();
        for x in 0..n {
            if self.dist(x, x) != 0.0 {
                return Err(Error::InvalidMetric(format!("d({x},{x}) != 0")));
            }
            for y in 0..n {
                let d = self.dist(x, y);
                if d < 0.0 || d.is_nan() {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) = {d}")));
                }
                if d != self.dist(y, x) {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) not symmetric")));
                }
                if x != y && d == 0.0 {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) = 0 for x != y")));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.dist(x, z) > self.dist(x, y) + self.dist(y, z) {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails on ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The window {0..n-1} of the integer line with the path metric |x-y|.
    pub fn line(n: usize) -> (Universe, ExtMetric) {
        let u = GroundSet::new(n);
        let mut dist = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                dist[x * n + y] = (x as f64 - y as f64).abs();
            }
        }
        (u.clone(), ExtMetric::from_matrix_unchecked(&u, dist))
    }

    /// A w×h window of the integer plane with the l∞ (Chebyshev) metric.
    /// Point (col, row) has index row*w + col.
    pub fn grid(w: usize, h: usize) -> (Universe, ExtMetric) {
        let n = w * h;
        let u = GroundSet::new(n);
        let mut dist = vec![0.0; n * n];
        for a in 0..n {
            let (ac, ar) = (a % w, a / w);
            for b in 0..n {
                let (bc, br) = (b % w, b / w);
                let dc = (ac as f64 - bc as f64).abs();
                let dr = (ar as f64 - br as f64).abs();
                dist[a * n + b] = dc.max(dr);
            }
        }
        (u.clone(), ExtMetric::from_matrix_unchecked(&u, dist))
    }

    /// Shortest-path metric of an undirected unit-weight graph; pairs in
    /// different graph components get ∞.
    pub fn from_edges(universe: &Universe, edges: &[(usize, usize)]) -> Result<ExtMetric> {
        let n = universe.size();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            for i in [a, b] {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, size: n });
                }
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut dist = vec![f64::INFINITY; n * n];
        for s in 0..n {
            // BFS
            let mut q = std::collections::VecDeque::new();
            dist[s * n + s] = 0.0;
            q.push_back(s);
            while let Some(x) = q.pop_front() {
                for &y in &adj[x] {
                    if dist[s * n + y].is_infinite() {
                        dist[s * n + y] = dist[s * n + x] + 1.0;
                        q.push_back(y);
                    }
                }
            }
        }
        Ok(ExtMetric::from_matrix_unchecked(universe, dist))
    }

    /// Block metric on the concatenated universes: cross-block distances ∞.
    pub fn disjoint_union(parts: &[ExtMetric]) -> (Universe, ExtMetric) {
        let n: usize = parts.iter().map(|m| m.universe().size()).sum();
        let u = GroundSet::new(n);
        let mut dist = vec![f64::INFINITY; n * n];
        let mut offset = 0;
        for m in parts {
            let k = m.universe().size();
            for x in 0..k {
                for y in 0..k {
                    dist[(offset + x) * n + (offset + y)] = m.dist(x, y);
                }
            }
            offset += k;
        }
        (u.clone(), ExtMetric::from_matrix_unchecked(&u, dist))
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn dist(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.universe.size() + y]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.dist
    }
}

/// A map point → positive real, the variable radius of the sublinear
/// ball construction.
#[derive(Clone, Debug)]
pub struct RadiusFunction {
    values: Vec<f64>,
}

impl RadiusFunction {
    pub fn new(values: Vec<f64>) -> Result<RadiusFunction> {
        if values.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidArgument(
                "radius function values must be positive".into(),
            ));
        }
        Ok(RadiusFunction { values })
    }

    pub fn constant(n: usize, r: f64) -> Result<RadiusFunction> {
        RadiusFunction::new(vec![r; n])
    }

    pub fn value(&self, x: usize) -> Option<f64> {
        self.values.get(x).copied()
    }
}

/// Sup of pairwise distances over B; 0 for empty and singleton sets.
pub fn diameter(b: &PointSet, d: &ExtMetric) -> Result<f64> {
    check_universe(b.universe(), d.universe())?;
    let pts: Vec<usize> = b.iter().collect();
    let mut sup: f64 = 0.0;
    for (i, &x) in pts.iter().enumerate() {
        for &y in &pts[i + 1..] {
            sup = sup.max(d.dist(x, y));
        }
    }
    Ok(sup)
}

/// True iff every member of the family has diameter ≤ M.
pub fn is_uniformly_bounded(b: &Family, d: &ExtMetric, m: f64) -> Result<bool> {
    check_universe(b.universe(), d.universe())?;
    for s in b.members() {
        if diameter(s, d)? > m {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The family of closed balls {B(x, r)} over all points x.
pub fn ball_family(d: &ExtMetric, r: f64) -> Result<Family> {
    if !(r > 0.0) || r.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "ball radius must be positive and finite, got {r}"
        )));
    }
    let n = d.universe().size();
    let mut sets = Vec::with_capacity(n);
    for x in 0..n {
        let mut b = PointSet::empty(d.universe());
        for y in 0..n {
            if d.dist(x, y) <= r {
                b.insert(y)?;
            }
        }
        sets.push(b);
    }
    Family::new(d.universe(), sets)
}

/// The family {B(x, f(x))} of variable-radius balls. The sublinearity of f
/// itself is an asymptotic condition and is not checked on a window.
pub fn sublinear_ball_family(
    d: &ExtMetric,
    _basepoint: usize,
    f: &RadiusFunction,
) -> Result<Family> {
    let n = d.universe().size();
    let mut sets = Vec::with_capacity(n);
    for x in 0..n {
        let r = f
            .value(x)
            .ok_or_else(|| Error::InvalidArgument(format!("radius undefined at point {x}")))?;
        let mut b = PointSet::empty(d.universe());
        for y in 0..n {
            if d.dist(x, y) <= r {
                b.insert(y)?;
            }
        }
        sets.push(b);
    }
    Family::new(d.universe(), sets)
}

/// All two-point sets {x, y} with 0 < d(x, y) ≤ r, plus all singletons.
/// The B-components of this family are exactly the r-components (chains
/// with steps of distance ≤ r).
pub fn step_family(d: &ExtMetric, r: f64) -> Result<Family> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step radius must be positive, got {r}"
        )));
    }
    let n = d.universe().size();
    let mut sets = Vec::new();
    for x in 0..n {
        sets.push(PointSet::singleton(d.universe(), x)?);
        for y in x + 1..n {
            if d.dist(x, y) <= r {
                sets.push(PointSet::from_indices(d.universe(), [x, y])?);
            }
        }
    }
    Family::new(d.universe(), sets)
}

/// A nonempty list of families, 1-indexed in the API, with St(L_i, L_i)
/// refining L_{i+1} and every level covering the universe.
#[derive(Clone, Debug)]
pub struct ScaleChain {
    universe: Universe,
    levels: Vec<Family>,
}

impl ScaleChain {
    pub fn new(universe: &Universe, levels: Vec<Family>) -> Result<ScaleChain> {
        if levels.is_empty() {
            return Err(Error::InvalidChain("chain has no levels".into()));
        }
        for (i, l) in levels.iter().enumerate() {
            check_universe(universe, l.universe())?;
            if !l.covers() {
                return Err(Error::InvalidChain(format!(
                    "level {} does not cover the universe",
                    i + 1
                )));
            }
        }
        for i in 0..levels.len() - 1 {
            let st = star_family(&levels[i], &levels[i])?;
            if !refines(&st, &levels[i + 1])? {
                return Err(Error::InvalidChain(format!(
                    "St(L_{i1}, L_{i1}) does not refine L_{i2}",
                    i1 = i + 1,
                    i2 = i + 2
                )));
            }
        }
        Ok(ScaleChain {
            universe: universe.clone(),
            levels,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Level i, 1-indexed.
    pub fn level(&self, i: usize) -> &Family {
        &self.levels[i - 1]
    }

    pub fn levels(&self) -> &[Family] {
        &self.levels
    }
}

/// levels[1] = e(seed); levels[i+1] = St(levels[i], levels[i]).
pub fn generate_chain(seed: &Family, depth: usize) -> Result<ScaleChain> {
    if depth == 0 {
        return Err(Error::InvalidArgument("chain depth must be >= 1".into()));
    }
    let mut levels = vec![trivial_extension(seed)];
    for _ in 1..depth {
        let last = levels.last().expect("nonempty");
        levels.push(star_family(last, last)?);
    }
    ScaleChain::new(seed.universe(), levels)
}

/// The chain metric: d(x,y) is the smallest level index whose family has a
/// member containing both x and y, or ∞ when no level within the chain
/// depth does. Values are positive integers off the diagonal, so the full
/// triangle inequality follows from d(x,z) ≤ max(d(x,y), d(y,z)) + 1.
pub fn metrize(chain: &ScaleChain) -> ExtMetric {
    let n = chain.universe().size();
    let mut dist = vec![f64::INFINITY; n * n];
    for x in 0..n {
        dist[x * n + x] = 0.0;
    }
    for (idx, level) in chain.levels().iter().enumerate() {
        let i = (idx + 1) as f64;
        for m in level.members() {
            let pts: Vec<usize> = m.iter().collect();
            for (a, &x) in pts.iter().enumerate() {
                for &y in &pts[a + 1..] {
                    if dist[x * n + y].is_infinite() {
                        dist[x * n + y] = i;
                        dist[y * n + x] = i;
                    }
                }
            }
        }
    }
    ExtMetric::from_matrix_unchecked(chain.universe(), dist)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelEquivalence {
    pub level: usize,
    /// L_i refines the family of i-balls of the chain metric.
    pub level_refines_balls: bool,
    /// For each integer radius r < level: the r-ball family refines L_i.
    pub balls_refine_level: Vec<(usize, bool)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub depth: usize,
    pub levels: Vec<LevelEquivalence>,
    pub all_pass: bool,
}

/// Replays both refinement directions of the metrization argument for all
/// levels and all integer radii within the chain depth. The report is
/// restricted to values below the depth; deeper scales are not decidable
/// on the window.
pub fn chain_metric_equivalence(chain: &ScaleChain, d: &ExtMetric) -> Result<EquivalenceReport> {
    check_universe(chain.universe(), d.universe())?;
    let mut levels = Vec::new();
    let mut all_pass = true;
    for i in 1..=chain.depth() {
        let balls_i = ball_family(d, i as f64)?;
        let level_refines_balls = refines(chain.level(i), &balls_i)?;
        let mut balls_refine_level = Vec::new();
        for r in 1..i {
            let balls_r = ball_family(d, r as f64)?;
            let ok = refines(&balls_r, chain.level(i))?;
            all_pass &= ok;
            balls_refine_level.push((r, ok));
        }
        all_pass &= level_refines_balls;
        levels.push(LevelEquivalence {
            level: i,
            level_refines_balls,
            balls_refine_level,
        });
    }
    Ok(EquivalenceReport {
        depth: chain.depth(),
        levels,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::GroundSet;

    fn fam(u: &Universe, xss: &[&[usize]]) -> Family {
        Family::new(
            u,
            xss.iter()
                .map(|xs| PointSet::from_indices(u, xs.iter().copied()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn diameter_examples() {
        let (u, d) = ExtMetric::line(6);
        let single = PointSet::singleton(&u, 3).unwrap();
        assert_eq!(diameter(&single, &d).unwrap(), 0.0);
        let pair = PointSet::from_indices(&u, [0, 5]).unwrap();
        assert_eq!(diameter(&pair, &d).unwrap(), 5.0);

        let (_, d1) = ExtMetric::line(2);
        let (u2, d2) = ExtMetric::disjoint_union(&[d1.clone(), d1]);
        let cross = PointSet::from_indices(&u2, [0, 2]).unwrap();
        assert_eq!(diameter(&cross, &d2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn uniform_boundedness_examples() {
        let (u, d) = ExtMetric::line(8);
        assert!(is_uniformly_bounded(&Family::singletons(&u), &d, 0.5).unwrap());
        let wide = fam(&u, &[&[0, 7]]);
        assert!(!is_uniformly_bounded(&wide, &d, 6.0).unwrap());
    }

    #[test]
    fn star_diameter_bound_on_path() {
        // diam(St(B, B2)) <= 2*M2 + M1, with equality on a collinear layout
        let (u, d) = ExtMetric::line(8);
        let b1 = fam(&u, &[&[2, 5]]); // M1 = 3
        let b2 = fam(&u, &[&[0, 2], &[5, 7]]); // M2 = 2
        let st = star_family(&b1, &b2).unwrap();
        assert!(is_uniformly_bounded(&st, &d, 2.0 * 2.0 + 3.0).unwrap());
        assert_eq!(diameter(&st.members()[0], &d).unwrap(), 7.0);
    }

    #[test]
    fn ball_family_examples() {
        let (u, d) = ExtMetric::line(6);
        let b = ball_family(&d, 0.5).unwrap();
        assert!(b.same_members(&Family::singletons(&u)));

        let b1 = ball_family(&d, 1.0).unwrap();
        let expected = fam(
            &u,
            &[&[0, 1], &[0, 1, 2], &[1, 2, 3], &[2, 3, 4], &[3, 4, 5], &[4, 5]],
        );
        assert!(b1.same_members(&expected));

        let whole = ball_family(&d, 5.0).unwrap();
        assert!(whole.members().iter().all(|m| m.len() == 6));
    }

    #[test]
    fn sublinear_ball_family_examples() {
        let (u, d) = ExtMetric::line(101);
        let f = RadiusFunction::new((0..101).map(|x| 1.0 + x as f64 / 10.0).collect()).unwrap();
        let fam_f = sublinear_ball_family(&d, 0, &f).unwrap();
        // ball at 100 has radius 11: covers 89..=100
        assert_eq!(fam_f.members()[100].len(), 12);

        let c = RadiusFunction::constant(101, 2.0).unwrap();
        let fam_c = sublinear_ball_family(&d, 0, &c).unwrap();
        assert!(fam_c.same_members(&ball_family(&d, 2.0).unwrap()));

        let eps = RadiusFunction::constant(101, 0.25).unwrap();
        assert!(sublinear_ball_family(&d, 0, &eps)
            .unwrap()
            .same_members(&Family::singletons(&u)));
    }

    #[test]
    fn disjoint_union_examples() {
        let (_, a) = ExtMetric::line(1);
        let (_, b) = ExtMetric::line(1);
        let (_, d) = ExtMetric::disjoint_union(&[a, b]);
        assert_eq!(d.dist(0, 1), f64::INFINITY);
        assert_eq!(d.dist(0, 0), 0.0);

        let (_, single) = ExtMetric::line(4);
        let (_, same) = ExtMetric::disjoint_union(&[single.clone()]);
        assert_eq!(same.matrix(), single.matrix());
    }

    #[test]
    fn generate_chain_examples() {
        let u = GroundSet::new(4);
        let seed = fam(&u, &[&[0, 1], &[2, 3]]);
        let chain = generate_chain(&seed, 3).unwrap();
        // blocks never merge across {0,1} | {2,3}
        for level in chain.levels() {
            for m in level.members() {
                assert!(!(m.contains(0) && m.contains(2)));
            }
        }

        let seed2 = fam(&u, &[&[0, 1], &[1, 2]]);
        let chain2 = generate_chain(&seed2, 2).unwrap();
        let merged = PointSet::from_indices(&u, [0, 1, 2]).unwrap();
        assert!(chain2.level(2).members().iter().any(|m| merged.is_subset_of(m)));

        let chain3 = generate_chain(&Family::empty(&u), 3).unwrap();
        for level in chain3.levels() {
            assert!(level.members().iter().all(|m| m.len() == 1));
        }
    }

    #[test]
    fn metrize_examples() {
        let u = GroundSet::new(4);
        let chain = generate_chain(&fam(&u, &[&[0, 1], &[2, 3]]), 4).unwrap();
        let d = metrize(&chain);
        assert_eq!(d.dist(0, 1), 1.0);
        assert_eq!(d.dist(0, 2), f64::INFINITY);

        let chain2 = generate_chain(&fam(&u, &[&[0, 1], &[1, 2]]), 4).unwrap();
        let d2 = metrize(&chain2);
        assert_eq!(d2.dist(0, 2), 2.0);
        d2.validate().unwrap();
    }

    #[test]
    fn metrize_sharpened_triangle() {
        let u = GroundSet::new(6);
        let chain = generate_chain(&fam(&u, &[&[0, 1], &[1, 2], &[3, 4], &[4, 5]]), 5).unwrap();
        let d = metrize(&chain);
        let n = u.size();
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
    }

    #[test]
    fn equivalence_report_examples() {
        let u = GroundSet::new(5);
        let chain = generate_chain(&fam(&u, &[&[0, 1], &[1, 2], &[3, 4]]), 4).unwrap();
        let d = metrize(&chain);
        let report = chain_metric_equivalence(&chain, &d).unwrap();
        assert!(report.all_pass);

        let depth1 = generate_chain(&fam(&u, &[&[0, 1]]), 1).unwrap();
        let d1 = metrize(&depth1);
        let r1 = chain_metric_equivalence(&depth1, &d1).unwrap();
        assert_eq!(r1.levels.len(), 1);
        assert!(r1.levels[0].balls_refine_level.is_empty());
        assert!(r1.all_pass);
    }

    #[test]
    fn chain_invariant_violation_is_an_error() {
        let u = GroundSet::new(3);
        let l1 = trivial_extension(&fam(&u, &[&[0, 1], &[1, 2]]));
        let l2 = trivial_extension(&fam(&u, &[&[0, 1]]));
        // St(l1, l1) contains {0,1,2} which does not refine l2
        assert!(ScaleChain::new(&u, vec![l1, l2]).is_err());
    }

    #[test]
    fn from_edges_path_metric() {
        let u = GroundSet::new(5);
        let d = ExtMetric::from_edges(&u, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(d.dist(0, 2), 2.0);
        assert_eq!(d.dist(0, 3), f64::INFINITY);
    }

    #[test]
    fn from_matrix_validates() {
        let u = GroundSet::new(2);
        assert!(ExtMetric::from_matrix(&u, vec![0.0, 1.0, 1.0, 0.0]).is_ok());
        assert!(ExtMetric::from_matrix(&u, vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(ExtMetric::from_matrix(&u, vec![0.0, 0.0, 0.0, 0.0]).is_err());
    }
}
