//! Ground sets, subsets and family algebra: stars, trivial extensions,
//! refinement, unions.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite indexed universe. Points are the indices `0..size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    size: usize,
    labels: Option<Vec<String>>,
}

/// Shared handle to a ground set. Cloning is cheap; all values built on a
/// universe keep a handle to it.
pub type Universe = Arc<GroundSet>;

impl GroundSet {
    pub fn new(size: usize) -> Universe {
        Arc::new(GroundSet { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Universe> {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::InvalidArgument(format!("duplicate label {l:?}")));
            }
        }
        Ok(Arc::new(GroundSet {
            size: labels.len(),
            labels: Some(labels),
        }))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

pub(crate) fn same_universe(a: &Universe, b: &Universe) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn check_universe(a: &Universe, b: &Universe) -> Result<()> {
    if same_universe(a, b) {
        Ok(())
    } else {
        Err(Error::UniverseMismatch)
    }
}

const WORD_BITS: usize = 64;

fn words_for(n: usize) -> usize {
    (n + WORD_BITS - 1) / WORD_BITS
}

/// A subset of a ground set, stored as a bitset. Immutable in spirit: the
/// mutating helpers are only used while building a value.
#[derive(Clone, PartialEq, Eq)]
pub struct PointSet {
    universe: Universe,
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(universe: &Universe) -> PointSet {
        PointSet {
            universe: universe.clone(),
            words: vec![0; words_for(universe.size())],
        }
    }

    pub fn full(universe: &Universe) -> PointSet {
        let mut s = PointSet::empty(universe);
        for i in 0..universe.size() {
            s.insert_unchecked(i);
        }
        s
    }

    pub fn singleton(universe: &Universe, x: usize) -> Result<PointSet> {
        let mut s = PointSet::empty(universe);
        s.insert(x)?;
        Ok(s)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(
        universe: &Universe,
        indices: I,
    ) -> Result<PointSet> {
        let mut s = PointSet::empty(universe);
        for i in indices {
            s.insert(i)?;
        }
        Ok(s)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn insert(&mut self, x: usize) -> Result<()> {
        if x >= self.universe.size() {
            return Err(Error::IndexOutOfRange {
                index: x,
                size: self.universe.size(),
            });
        }
        self.insert_unchecked(x);
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, x: usize) {
        self.words[x / WORD_BITS] |= 1u64 << (x % WORD_BITS);
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.universe.size() && self.words[x / WORD_BITS] >> (x % WORD_BITS) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &PointSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        s
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        s
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite ordered list of subsets of a common universe. Duplicates are
/// permitted; equality checks in tests compare sets of members.
#[derive(Clone, PartialEq, Eq)]
pub struct Family {
    universe: Universe,
    sets: Vec<PointSet>,
}

impl Family {
    pub fn empty(universe: &Universe) -> Family {
        Family {
            universe: universe.clone(),
            sets: Vec::new(),
        }
    }

    pub fn new(universe: &Universe, sets: Vec<PointSet>) -> Result<Family> {
        for s in &sets {
            check_universe(universe, s.universe())?;
        }
        Ok(Family {
            universe: universe.clone(),
            sets,
        })
    }

    pub fn singletons(universe: &Universe) -> Family {
        let sets = (0..universe.size())
            .map(|x| PointSet::singleton(universe, x).expect("index in range"))
            .collect();
        Family {
            universe: universe.clone(),
            sets,
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn members(&self) -> &[PointSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn push(&mut self, set: PointSet) -> Result<()> {
        check_universe(&self.universe, set.universe())?;
        self.sets.push(set);
        Ok(())
    }

    /// Order-insensitive comparison of the sets of members.
    pub fn same_members(&self, other: &Family) -> bool {
        same_universe(&self.universe, &other.universe)
            && self.sets.iter().all(|s| other.sets.contains(s))
            && other.sets.iter().all(|s| self.sets.contains(s))
    }

    /// Union of all members.
    pub fn support(&self) -> PointSet {
        let mut acc = PointSet::empty(&self.universe);
        for s in &self.sets {
            acc.union_with(s);
        }
        acc
    }

    /// True when every point of the universe lies in some member.
    pub fn covers(&self) -> bool {
        self.support().len() == self.universe.size()
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.sets.iter()).finish()
    }
}

/// St(B, U): union of those members of `family` that intersect `base`.
/// `base` itself is not automatically included.
pub fn star(base: &PointSet, family: &Family) -> Result<PointSet> {
    check_universe(base.universe(), family.universe())?;
    let mut acc = PointSet::empty(base.universe());
    for m in family.members() {
        if m.intersects(base) {
            acc.union_with(m);
        }
    }
    Ok(acc)
}

/// St(B1, B2): the family of stars of members of `b1` with respect to `b2`,
/// in the order of `b1`.
pub fn star_family(b1: &Family, b2: &Family) -> Result<Family> {
    check_universe(b1.universe(), b2.universe())?;
    let sets = b1
        .members()
        .iter()
        .map(|b| star(b, b2))
        .collect::<Result<Vec<_>>>()?;
    Family::new(b1.universe(), sets)
}

/// e(B): the family with all singletons of the universe appended.
pub fn trivial_extension(b: &Family) -> Family {
    let mut sets = b.members().to_vec();
    for x in 0..b.universe().size() {
        sets.push(PointSet::singleton(b.universe(), x).expect("index in range"));
    }
    Family {
        universe: b.universe().clone(),
        sets,
    }
}

/// True iff every member of `b1` is contained in some member of `b2`.
pub fn refines(b1: &Family, b2: &Family) -> Result<bool> {
    check_universe(b1.universe(), b2.universe())?;
    Ok(b1
        .members()
        .iter()
        .all(|m| m.is_empty() || b2.members().iter().any(|n| m.is_subset_of(n))))
}

/// Condition (1) of the structure definition: every member of `b2` with at
/// least two points is contained in some member of `b1`.
pub fn refines_mod_singletons(b2: &Family, b1: &Family) -> Result<bool> {
    check_universe(b1.universe(), b2.universe())?;
    Ok(b2
        .members()
        .iter()
        .all(|m| m.len() <= 1 || b1.members().iter().any(|n| m.is_subset_of(n))))
}

/// Concatenation of the two member lists.
pub fn union_families(b1: &Family, b2: &Family) -> Result<Family> {
    check_universe(b1.universe(), b2.universe())?;
    let mut sets = b1.members().to_vec();
    sets.extend_from_slice(b2.members());
    Family::new(b1.universe(), sets)
}

/// The single-block generator family {K} used to seed the discrete
/// structure (generated by all families with finite support).
pub fn discrete_generators(k: &PointSet) -> Family {
    Family {
        universe: k.universe().clone(),
        sets: vec![k.clone()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(n: usize) -> Universe {
        GroundSet::new(n)
    }

    fn ps(u: &Universe, xs: &[usize]) -> PointSet {
        PointSet::from_indices(u, xs.iter().copied()).unwrap()
    }

    fn fam(u: &Universe, xss: &[&[usize]]) -> Family {
        Family::new(u, xss.iter().map(|xs| ps(u, xs)).collect()).unwrap()
    }

    #[test]
    fn star_basic() {
        let u = uni(6);
        let b = ps(&u, &[1, 2]);
        let f = fam(&u, &[&[2, 3], &[4, 5]]);
        assert_eq!(star(&b, &f).unwrap(), ps(&u, &[2, 3]));
    }

    #[test]
    fn star_spec_example_includes_b_only_via_members() {
        // B={1,2}, U={{2,3},{4,5}} -> {2,3}; with {1} also a member -> {1,2,3}
        let u = uni(6);
        let b = ps(&u, &[1, 2]);
        let f = fam(&u, &[&[2, 3], &[4, 5], &[1]]);
        assert_eq!(star(&b, &f).unwrap(), ps(&u, &[1, 2, 3]));
    }

    #[test]
    fn star_empty_base() {
        let u = uni(4);
        let f = fam(&u, &[&[0, 1], &[2, 3]]);
        assert!(star(&PointSet::empty(&u), &f).unwrap().is_empty());
    }

    #[test]
    fn star_no_member_meets_base() {
        let u = uni(3);
        let b = ps(&u, &[0]);
        let f = fam(&u, &[&[1, 2]]);
        assert!(star(&b, &f).unwrap().is_empty());
    }

    #[test]
    fn star_universe_mismatch() {
        let u = uni(3);
        let v = uni(4);
        let b = ps(&u, &[0]);
        let f = fam(&v, &[&[1]]);
        assert!(matches!(star(&b, &f), Err(Error::UniverseMismatch)));
    }

    #[test]
    fn star_family_examples() {
        let u = uni(4);
        let b1 = fam(&u, &[&[0, 1]]);
        let b2 = fam(&u, &[&[1, 2], &[3]]);
        assert!(star_family(&b1, &b2).unwrap().same_members(&fam(&u, &[&[1, 2]])));

        let empty = Family::empty(&u);
        assert!(star_family(&empty, &b2).unwrap().is_empty());

        let b1 = fam(&u, &[&[0]]);
        let b2 = fam(&u, &[&[0], &[0, 1]]);
        assert!(star_family(&b1, &b2).unwrap().same_members(&fam(&u, &[&[0, 1]])));
    }

    #[test]
    fn trivial_extension_examples() {
        let u = uni(3);
        let b = fam(&u, &[&[1, 2]]);
        let e = trivial_extension(&b);
        assert!(e.same_members(&fam(&u, &[&[1, 2], &[0], &[1], &[2]])));

        let u1 = uni(1);
        let e1 = trivial_extension(&Family::empty(&u1));
        assert!(e1.same_members(&fam(&u1, &[&[0]])));

        // idempotent up to set-of-members equality
        let ee = trivial_extension(&e);
        assert!(ee.same_members(&e));
    }

    #[test]
    fn refines_examples() {
        let u = uni(4);
        assert!(refines(&fam(&u, &[&[0], &[1, 2]]), &fam(&u, &[&[0, 1, 2]])).unwrap());
        assert!(!refines(&fam(&u, &[&[0, 3]]), &fam(&u, &[&[0, 1], &[2, 3]])).unwrap());
        assert!(refines(&Family::empty(&u), &Family::empty(&u)).unwrap());
        // empty members are contained in any member (and vacuously pass)
        assert!(refines(&fam(&u, &[&[]]), &Family::empty(&u)).unwrap());
    }

    #[test]
    fn refines_mod_singletons_examples() {
        let u = uni(6);
        assert!(refines_mod_singletons(&fam(&u, &[&[0], &[5]]), &Family::empty(&u)).unwrap());
        assert!(refines_mod_singletons(&fam(&u, &[&[0, 1]]), &fam(&u, &[&[0, 1, 2]])).unwrap());
        assert!(!refines_mod_singletons(&fam(&u, &[&[0, 1], &[2, 3]]), &fam(&u, &[&[0, 1]])).unwrap());
    }

    #[test]
    fn union_families_examples() {
        let u = uni(2);
        let a = fam(&u, &[&[0]]);
        let b = fam(&u, &[&[1]]);
        let ab = union_families(&a, &b).unwrap();
        assert!(ab.same_members(&fam(&u, &[&[0], &[1]])));
        assert!(union_families(&a, &Family::empty(&u)).unwrap().same_members(&a));
        // commutative up to set-of-members equality
        assert!(union_families(&b, &a).unwrap().same_members(&ab));
    }

    #[test]
    fn union_covered_by_star_of_trivial_extensions() {
        // every member of B1 ∪ B2 is contained in a member of St(e(B1), e(B2))
        let u = uni(5);
        let b1 = fam(&u, &[&[0, 1], &[2]]);
        let b2 = fam(&u, &[&[1, 3], &[4]]);
        let both = union_families(&b1, &b2).unwrap();
        let b3 = star_family(&trivial_extension(&b1), &trivial_extension(&b2)).unwrap();
        assert!(refines(&both, &b3).unwrap());
    }

    #[test]
    fn discrete_generators_examples() {
        let u = uni(3);
        let k = ps(&u, &[0, 1]);
        assert!(discrete_generators(&k).same_members(&fam(&u, &[&[0, 1]])));
        let e = PointSet::empty(&u);
        assert_eq!(discrete_generators(&e).len(), 1);
    }

    #[test]
    fn member_of_family_is_inside_its_star() {
        let u = uni(5);
        let f = fam(&u, &[&[0, 1], &[1, 2], &[3]]);
        for m in f.members() {
            assert!(m.is_subset_of(&star(m, &f).unwrap()));
        }
    }
}
