//! Group oracles with exact normal-form arithmetic, shift families,
//! divergence search, orbit maps and the finiteness condition behind the
//! Švarc–Milnor argument.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::metric::ExtMetric;
use crate::sets::{check_universe, Family, PointSet, Universe};

/// An exact dyadic rational mant·2^pow, canonical with mant odd (or the
/// zero value (0, 0)). Never floating point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: i128,
    pow: i32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { mant: 0, pow: 0 };

    pub fn new(mant: i128, pow: i32) -> Dyadic {
        Dyadic { mant, pow }.normalize()
    }

    pub fn from_int(v: i128) -> Dyadic {
        Dyadic::new(v, 0)
    }

    fn normalize(mut self) -> Dyadic {
        if self.mant == 0 {
            return Dyadic::ZERO;
        }
        while self.mant % 2 == 0 {
            self.mant /= 2;
            self.pow += 1;
        }
        self
    }

    pub fn add(self, other: Dyadic) -> Dyadic {
        if self.mant == 0 {
            return other;
        }
        if other.mant == 0 {
            return self;
        }
        let p = self.pow.min(other.pow);
        let a = shl_exact(self.mant, (self.pow - p) as u32);
        let b = shl_exact(other.mant, (other.pow - p) as u32);
        Dyadic::new(a + b, p)
    }

    pub fn neg(self) -> Dyadic {
        Dyadic {
            mant: -self.mant,
            pow: self.pow,
        }
    }

    /// Multiply by 2^k.
    pub fn shift(self, k: i64) -> Dyadic {
        if self.mant == 0 {
            return Dyadic::ZERO;
        }
        Dyadic {
            mant: self.mant,
            pow: self.pow + i32::try_from(k).expect("dyadic exponent overflow"),
        }
    }

    /// Numerator/denominator-exponent view m/2^j with j ≥ 0.
    pub fn as_fraction(self) -> (i128, u32) {
        if self.pow >= 0 {
            (shl_exact(self.mant, self.pow as u32), 0)
        } else {
            (self.mant, (-self.pow) as u32)
        }
    }
}

fn shl_exact(v: i128, k: u32) -> i128 {
    v.checked_shl(k)
        .filter(|r| r >> k == v)
        .expect("dyadic overflow")
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let sign = |d: &Dyadic| d.mant.signum();
        match sign(self).cmp(&sign(other)) {
            Ordering::Equal => {}
            ord => return ord,
        }
        if self.mant == 0 {
            return Ordering::Equal;
        }
        let p = self.pow.min(other.pow);
        let a = shl_exact(self.mant, (self.pow - p) as u32);
        let b = shl_exact(other.mant, (other.pow - p) as u32);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, j) = self.as_fraction();
        write!(f, "{m}/2^{j}")
    }
}

/// A canonical normal form owned by a group oracle. Payload equality is
/// equality in the group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    /// ℤⁿ vector.
    Zn(Vec<i64>),
    /// Reduced word in a free group; letter k > 0 is generator x_k,
    /// letter -k its inverse, with no adjacent cancellations.
    Free(Vec<i32>),
    /// BS(1,2) = ⟨a, t | t a t⁻¹ = a²⟩ as pairs (q, n) with q dyadic,
    /// multiplying by (q1, n1)(q2, n2) = (q1 + 2^{n1} q2, n1 + n2).
    Bs12 { q: Dyadic, n: i64 },
    /// Index into a finite multiplication table.
    Table(usize),
}

impl Element {
    pub fn canonical_string(&self) -> String {
        match self {
            Element::Zn(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                format!("({})", parts.join(","))
            }
            Element::Free(w) => {
                if w.is_empty() {
                    "1".to_string()
                } else {
                    let parts: Vec<String> = w
                        .iter()
                        .map(|&l| {
                            if l > 0 {
                                format!("x{l}")
                            } else {
                                format!("x{}^-1", -l)
                            }
                        })
                        .collect();
                    parts.join(".")
                }
            }
            Element::Bs12 { q, n } => format!("{q}|{n}"),
            Element::Table(i) => i.to_string(),
        }
    }
}

/// A group given by total multiplication and inversion on canonical
/// normal forms.
#[derive(Clone, Debug)]
pub enum GroupOracle {
    Zn { rank: usize },
    Free { rank: usize },
    Bs12,
    Table { mul: Vec<Vec<usize>>, inv: Vec<usize>, identity: usize },
}

impl GroupOracle {
    pub fn zn(rank: usize) -> GroupOracle {
        GroupOracle::Zn { rank }
    }

    pub fn free(rank: usize) -> GroupOracle {
        GroupOracle::Free { rank }
    }

    pub fn bs12() -> GroupOracle {
        GroupOracle::Bs12
    }

    /// Builds a finite-table oracle, locating the identity and inverses
    /// and rejecting tables that are not groups.
    pub fn table(mul: Vec<Vec<usize>>) -> Result<GroupOracle> {
        let n = mul.len();
        let valid = mul.iter().all(|row| row.len() == n && row.iter().all(|&v| v < n));
        if n == 0 || !valid {
            return Err(Error::InvalidArgument("malformed multiplication table".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e][x] == x && mul[x][e] == x))
            .ok_or_else(|| Error::InvalidArgument("table has no identity".into()))?;
        let mut inv = vec![usize::MAX; n];
        for x in 0..n {
            inv[x] = (0..n)
                .find(|&y| mul[x][y] == identity && mul[y][x] == identity)
                .ok_or_else(|| Error::InvalidArgument(format!("element {x} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(Error::InvalidArgument(format!(
                            "table is not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(GroupOracle::Table { mul, inv, identity })
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupOracle::Zn { rank } => Element::Zn(vec![0; *rank]),
            GroupOracle::Free { .. } => Element::Free(Vec::new()),
            GroupOracle::Bs12 => Element::Bs12 { q: Dyadic::ZERO, n: 0 },
            GroupOracle::Table { identity, .. } => Element::Table(*identity),
        }
    }

    pub fn owns(&self, e: &Element) -> bool {
        matches!(
            (self, e),
            (GroupOracle::Zn { rank }, Element::Zn(v)) if v.len() == *rank
        ) || matches!((self, e), (GroupOracle::Free { .. }, Element::Free(_)))
            || matches!((self, e), (GroupOracle::Bs12, Element::Bs12 { .. }))
            || matches!(
                (self, e),
                (GroupOracle::Table { mul, .. }, Element::Table(i)) if *i < mul.len()
            )
    }

    fn check(&self, e: &Element) -> Result<()> {
        if self.owns(e) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "element {} does not belong to this oracle",
                e.canonical_string()
            )))
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (self, a, b) {
            (GroupOracle::Zn { .. }, Element::Zn(x), Element::Zn(y)) => {
                Element::Zn(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupOracle::Free { .. }, Element::Free(x), Element::Free(y)) => {
                let mut w = x.clone();
                for &l in y {
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Element::Free(w)
            }
            (GroupOracle::Bs12, Element::Bs12 { q: q1, n: n1 }, Element::Bs12 { q: q2, n: n2 }) => {
                Element::Bs12 {
                    q: q1.add(q2.shift(*n1)),
                    n: n1 + n2,
                }
            }
            (GroupOracle::Table { mul, .. }, Element::Table(i), Element::Table(j)) => {
                Element::Table(mul[*i][*j])
            }
            _ => unreachable!("ownership checked above"),
        })
    }

    pub fn invert(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(match (self, a) {
            (GroupOracle::Zn { .. }, Element::Zn(x)) => Element::Zn(x.iter().map(|v| -v).collect()),
            (GroupOracle::Free { .. }, Element::Free(w)) => {
                Element::Free(w.iter().rev().map(|l| -l).collect())
            }
            (GroupOracle::Bs12, Element::Bs12 { q, n }) => Element::Bs12 {
                q: q.neg().shift(-n),
                n: -n,
            },
            (GroupOracle::Table { inv, .. }, Element::Table(i)) => Element::Table(inv[*i]),
            _ => unreachable!("ownership checked above"),
        })
    }

    /// The fixed generator set (identity excluded).
    pub fn generators(&self) -> Vec<Element> {
        match self {
            GroupOracle::Zn { rank } => (0..*rank)
                .map(|i| {
                    let mut v = vec![0; *rank];
                    v[i] = 1;
                    Element::Zn(v)
                })
                .collect(),
            GroupOracle::Free { rank } => {
                (1..=*rank as i32).map(|k| Element::Free(vec![k])).collect()
            }
            GroupOracle::Bs12 => vec![
                Element::Bs12 { q: Dyadic::from_int(1), n: 0 }, // a
                Element::Bs12 { q: Dyadic::ZERO, n: 1 },        // t
            ],
            GroupOracle::Table { mul, identity, .. } => (0..mul.len())
                .filter(|i| i != identity)
                .map(Element::Table)
                .collect(),
        }
    }

    /// All products of at most `radius` generators or generator inverses.
    pub fn word_ball(&self, radius: usize) -> FiniteSubset {
        let mut gens = self.generators();
        let inverses: Vec<Element> = gens.iter().map(|g| self.invert(g).expect("own")).collect();
        gens.extend(inverses);
        let mut ball: BTreeSet<Element> = BTreeSet::new();
        ball.insert(self.identity());
        let mut frontier: Vec<Element> = vec![self.identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in &frontier {
                for g in &gens {
                    let y = self.multiply(x, g).expect("own");
                    if ball.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        FiniteSubset::from_elements(ball.into_iter().collect())
    }

    /// Randomized associativity/identity/inverse checks plus the defining
    /// BS(1,2) relation; any failure is an oracle bug.
    pub fn self_test(&self, rng: &mut impl Rng, trials: usize) -> Result<()> {
        let e = self.identity();
        for _ in 0..trials {
            let a = self.sample(rng);
            let b = self.sample(rng);
            let c = self.sample(rng);
            let ab_c = self.multiply(&self.multiply(&a, &b)?, &c)?;
            let a_bc = self.multiply(&a, &self.multiply(&b, &c)?)?;
            if ab_c != a_bc {
                return Err(Error::InvalidArgument("associativity failed".into()));
            }
            if self.multiply(&a, &e)? != a || self.multiply(&e, &a)? != a {
                return Err(Error::InvalidArgument("identity law failed".into()));
            }
            let ai = self.invert(&a)?;
            if self.multiply(&a, &ai)? != e || self.multiply(&ai, &a)? != e {
                return Err(Error::InvalidArgument("inverse law failed".into()));
            }
        }
        if let GroupOracle::Bs12 = self {
            let gens = self.generators();
            let (a, t) = (&gens[0], &gens[1]);
            let lhs = self.multiply(&self.multiply(t, a)?, &self.invert(t)?)?;
            let a2 = self.multiply(a, a)?;
            if lhs != a2 {
                return Err(Error::InvalidArgument("t·a·t⁻¹ != a²".into()));
            }
        }
        Ok(())
    }

    /// A random element from a bounded slice of the group.
    pub fn sample(&self, rng: &mut impl Rng) -> Element {
        match self {
            GroupOracle::Zn { rank } => {
                Element::Zn((0..*rank).map(|_| rng.gen_range(-50..=50)).collect())
            }
            GroupOracle::Free { rank } => {
                let len = rng.gen_range(0..=6);
                let mut w: Vec<i32> = Vec::with_capacity(len);
                for _ in 0..len {
                    let k = rng.gen_range(1..=*rank as i32);
                    let l = if rng.gen() { k } else { -k };
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Element::Free(w)
            }
            GroupOracle::Bs12 => Element::Bs12 {
                q: Dyadic::new(rng.gen_range(-64..=64), rng.gen_range(-4..=4)),
                n: rng.gen_range(-3..=3),
            },
            GroupOracle::Table { mul, .. } => Element::Table(rng.gen_range(0..mul.len())),
        }
    }
}

/// A canonical, duplicate-free finite set of group elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSubset {
    elements: Vec<Element>,
}

impl FiniteSubset {
    pub fn from_elements(mut elements: Vec<Element>) -> FiniteSubset {
        elements.sort();
        elements.dedup();
        FiniteSubset { elements }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.elements.binary_search(e).is_ok()
    }

    /// The canonically least element.
    pub fn least(&self) -> Option<&Element> {
        self.elements.first()
    }

    pub fn is_subset_of(&self, other: &FiniteSubset) -> bool {
        self.elements.iter().all(|e| other.contains(e))
    }
}

/// x·F for each basepoint x.
pub fn left_shift_family(
    oracle: &GroupOracle,
    f: &FiniteSubset,
    basepoints: &[Element],
) -> Result<Vec<FiniteSubset>> {
    basepoints
        .iter()
        .map(|x| {
            let shifted = f
                .elements()
                .iter()
                .map(|h| oracle.multiply(x, h))
                .collect::<Result<Vec<_>>>()?;
            Ok(FiniteSubset::from_elements(shifted))
        })
        .collect()
}

/// F·x for each basepoint x.
pub fn right_shift_family(
    oracle: &GroupOracle,
    f: &FiniteSubset,
    basepoints: &[Element],
) -> Result<Vec<FiniteSubset>> {
    basepoints
        .iter()
        .map(|x| {
            let shifted = f
                .elements()
                .iter()
                .map(|h| oracle.multiply(h, x))
                .collect::<Result<Vec<_>>>()?;
            Ok(FiniteSubset::from_elements(shifted))
        })
        .collect()
}

/// The membership witness of the left shift structure: F = ∪_B b_B⁻¹·B
/// with b_B the least element of B; every B is then inside b_B·F.
pub fn left_witness(oracle: &GroupOracle, members: &[FiniteSubset]) -> Result<FiniteSubset> {
    let mut all = Vec::new();
    for b in members {
        let base = b
            .least()
            .ok_or_else(|| Error::InvalidArgument("empty member in left_witness".into()))?;
        let base_inv = oracle.invert(base)?;
        for e in b.elements() {
            all.push(oracle.multiply(&base_inv, e)?);
        }
    }
    Ok(FiniteSubset::from_elements(all))
}

/// Searches for y with x·E ⊆ F·y. The candidate set is the intersection
/// over e ∈ E of F⁻¹·(x·e); the canonically least candidate is returned.
pub fn shift_cover_search(
    oracle: &GroupOracle,
    x: &Element,
    e: &FiniteSubset,
    f: &FiniteSubset,
) -> Result<Option<Element>> {
    if e.is_empty() || f.is_empty() {
        return Err(Error::InvalidArgument(
            "shift_cover_search requires nonempty E and F".into(),
        ));
    }
    let mut candidates: Option<Vec<Element>> = None;
    for ee in e.elements() {
        let xe = oracle.multiply(x, ee)?;
        let mut set = Vec::with_capacity(f.len());
        for ff in f.elements() {
            set.push(oracle.multiply(&oracle.invert(ff)?, &xe)?);
        }
        set.sort();
        set.dedup();
        candidates = Some(match candidates {
            None => set,
            Some(prev) => prev
                .into_iter()
                .filter(|c| set.binary_search(c).is_ok())
                .collect(),
        });
    }
    Ok(candidates.and_then(|c| c.into_iter().next()))
}

/// First x in the search space whose left shift x·E is not covered by any
/// right shift F·y, or None when every listed x is covered.
pub fn divergence_search(
    oracle: &GroupOracle,
    e: &FiniteSubset,
    f: &FiniteSubset,
    search_space: &[Element],
) -> Result<Option<Element>> {
    for x in search_space {
        if shift_cover_search(oracle, x, e, f)?.is_none() {
            return Ok(Some(x.clone()));
        }
    }
    Ok(None)
}

/// All canonical BS(1,2) normal forms (m/2^j, n) in the given box.
pub fn bs12_search_space(m_max: i128, j_max: u32, n_max: i64) -> Vec<Element> {
    let mut out = BTreeSet::new();
    for m in -m_max..=m_max {
        for j in 0..=j_max {
            for n in -n_max..=n_max {
                out.insert(Element::Bs12 {
                    q: Dyadic::new(m, -(j as i32)),
                    n,
                });
            }
        }
    }
    out.into_iter().collect()
}

/// A left action of a group oracle on a metric window. Actions may be
/// partial at the window edge; partiality is reported, never hidden.
pub struct ActionOracle {
    oracle: GroupOracle,
    space: ExtMetric,
    act: Box<dyn Fn(&Element, usize) -> Option<usize> + Send + Sync>,
}

impl ActionOracle {
    pub fn new(
        oracle: GroupOracle,
        space: ExtMetric,
        act: Box<dyn Fn(&Element, usize) -> Option<usize> + Send + Sync>,
    ) -> ActionOracle {
        ActionOracle { oracle, space, act }
    }

    /// ℤ acting on the window {0..n-1} of the line by translation.
    pub fn z_translation(window: usize) -> ActionOracle {
        let (_, d) = ExtMetric::line(window);
        ActionOracle::new(
            GroupOracle::zn(1),
            d,
            Box::new(move |g, x| match g {
                Element::Zn(v) if v.len() == 1 => {
                    let y = x as i64 + v[0];
                    (0 <= y && (y as usize) < window).then_some(y as usize)
                }
                _ => None,
            }),
        )
    }

    /// Any oracle acting trivially on a space.
    pub fn trivial(oracle: GroupOracle, space: ExtMetric) -> ActionOracle {
        ActionOracle::new(oracle, space, Box::new(|_, x| Some(x)))
    }

    pub fn oracle(&self) -> &GroupOracle {
        &self.oracle
    }

    pub fn space(&self) -> &ExtMetric {
        &self.space
    }

    pub fn act(&self, g: &Element, x: usize) -> Option<usize> {
        (self.act)(g, x)
    }

    /// Spot-checks the action laws on the supplied elements and points:
    /// identity acts trivially, act(gh, x) = act(g, act(h, x)) where all
    /// sides are defined, and distances are preserved where defined.
    pub fn spot_check(&self, gs: &[Element], points: &[usize]) -> Result<()> {
        let e = self.oracle.identity();
        for &x in points {
            if self.act(&e, x) != Some(x) {
                return Err(Error::InvalidArgument("identity does not act trivially".into()));
            }
        }
        for g in gs {
            for h in gs {
                let gh = self.oracle.multiply(g, h)?;
                for &x in points {
                    if let (Some(l), Some(r)) =
                        (self.act(&gh, x), self.act(h, x).and_then(|y| self.act(g, y)))
                    {
                        if l != r {
                            return Err(Error::InvalidArgument("action is not compatible".into()));
                        }
                    }
                }
            }
            for &x in points {
                for &y in points {
                    if let (Some(gx), Some(gy)) = (self.act(g, x), self.act(g, y)) {
                        if self.space.dist(gx, gy) != self.space.dist(x, y) {
                            return Err(Error::InvalidArgument("action is not isometric".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// g ↦ g·x0 where defined; None marks window truncation.
pub fn orbit_map(
    action: &ActionOracle,
    x0: usize,
    gs: &[Element],
) -> Vec<(Element, Option<usize>)> {
    gs.iter().map(|g| (g.clone(), action.act(g, x0))).collect()
}

#[derive(Clone, Debug)]
pub struct SvarcMilnorReport {
    /// Candidates g with (g·U) ∩ U nonempty.
    pub finite_hits: Vec<Element>,
    /// True when the window truncated some orbit and the verdict for at
    /// least one candidate is therefore undetermined.
    pub boundary_truncated: bool,
    /// The orbit neighbourhood U that was used.
    pub neighbourhood: Vec<usize>,
}

/// Lists candidates g whose shift of U = B(x0, r) meets U, flagging
/// window truncation instead of claiming (in)finiteness.
pub fn svarc_milnor_finiteness_check(
    action: &ActionOracle,
    x0: usize,
    r: f64,
    candidates: &[Element],
) -> Result<SvarcMilnorReport> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument("radius must be nonnegative".into()));
    }
    let n = action.space().universe().size();
    if x0 >= n {
        return Err(Error::IndexOutOfRange { index: x0, size: n });
    }
    let u: Vec<usize> = (0..n).filter(|&y| action.space().dist(x0, y) <= r).collect();
    let mut hits = Vec::new();
    let mut truncated = false;
    for g in candidates {
        let mut hit = false;
        let mut partial = false;
        for &x in &u {
            match action.act(g, x) {
                Some(y) if u.binary_search(&y).is_ok() => {
                    hit = true;
                    break;
                }
                Some(_) => {}
                None => partial = true,
            }
        }
        if hit {
            hits.push(g.clone());
        } else if partial {
            truncated = true;
        }
    }
    Ok(SvarcMilnorReport {
        finite_hits: hits,
        boundary_truncated: truncated,
        neighbourhood: u,
    })
}

/// f⁻¹(C) for every member C, on the domain universe.
pub fn pullback_family(f: &[usize], c: &Family, domain: &Universe) -> Result<Family> {
    if f.len() != domain.size() {
        return Err(Error::InvalidArgument(format!(
            "point map has {} entries for a {}-point domain",
            f.len(),
            domain.size()
        )));
    }
    for (&y, _) in f.iter().zip(0..) {
        if y >= c.universe().size() {
            return Err(Error::IndexOutOfRange {
                index: y,
                size: c.universe().size(),
            });
        }
    }
    let mut sets = Vec::with_capacity(c.len());
    for m in c.members() {
        let mut pre = PointSet::empty(domain);
        for (x, &y) in f.iter().enumerate() {
            if m.contains(y) {
                pre.insert(x)?;
            }
        }
        sets.push(pre);
    }
    Family::new(domain, sets)
}

/// Convenience wrapper mirroring pullback on point sets.
pub fn pullback_set(f: &[usize], c: &PointSet, domain: &Universe) -> Result<PointSet> {
    check_universe(c.universe(), c.universe())?;
    let mut pre = PointSet::empty(domain);
    for (x, &y) in f.iter().enumerate() {
        if c.contains(y) {
            pre.insert(x)?;
        }
    }
    Ok(pre)
}
