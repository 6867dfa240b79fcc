//! Relation algebra on X×X and the conversions between uniformly bounded
//! families and controlled sets.

use std::fmt;

use crate::error::Result;
use crate::sets::{check_universe, Family, PointSet, Universe};

const WORD_BITS: usize = 64;

/// A finite relation on the universe: a set of ordered pairs (x, y),
/// stored as an n×n bit matrix (row x holds the successors y).
/// Not required to be reflexive or symmetric.
#[derive(Clone, PartialEq, Eq)]
pub struct Entourage {
    universe: Universe,
    row_words: usize,
    words: Vec<u64>,
}

impl Entourage {
    pub fn empty(universe: &Universe) -> Entourage {
        let n = universe.size();
        let row_words = (n + WORD_BITS - 1) / WORD_BITS;
        Entourage {
            universe: universe.clone(),
            row_words,
            words: vec![0; n * row_words],
        }
    }

    /// The diagonal {(x, x)}.
    pub fn diagonal(universe: &Universe) -> Entourage {
        let mut e = Entourage::empty(universe);
        for x in 0..universe.size() {
            e.insert_unchecked(x, x);
        }
        e
    }

    /// The full relation X×X.
    pub fn full(universe: &Universe) -> Entourage {
        let mut e = Entourage::empty(universe);
        for x in 0..universe.size() {
            for y in 0..universe.size() {
                e.insert_unchecked(x, y);
            }
        }
        e
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(
        universe: &Universe,
        pairs: I,
    ) -> Result<Entourage> {
        let mut e = Entourage::empty(universe);
        for (x, y) in pairs {
            e.insert(x, y)?;
        }
        Ok(e)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn insert(&mut self, x: usize, y: usize) -> Result<()> {
        let n = self.universe.size();
        for i in [x, y] {
            if i >= n {
                return Err(crate::Error::IndexOutOfRange { index: i, size: n });
            }
        }
        self.insert_unchecked(x, y);
        Ok(())
    }

    fn insert_unchecked(&mut self, x: usize, y: usize) {
        self.words[x * self.row_words + y / WORD_BITS] |= 1u64 << (y % WORD_BITS);
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.universe.size()
            && y < self.universe.size()
            && self.words[x * self.row_words + y / WORD_BITS] >> (y % WORD_BITS) & 1 == 1
    }

    fn row(&self, x: usize) -> &[u64] {
        &self.words[x * self.row_words..(x + 1) * self.row_words]
    }

    pub fn iter_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.universe.size();
        (0..n).flat_map(move |x| (0..n).filter_map(move |y| self.contains(x, y).then_some((x, y))))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// E⁻¹: swap every pair.
    pub fn inverse(&self) -> Entourage {
        let mut e = Entourage::empty(&self.universe);
        for (x, y) in self.iter_pairs() {
            e.insert_unchecked(y, x);
        }
        e
    }

    pub fn union(&self, other: &Entourage) -> Result<Entourage> {
        check_universe(&self.universe, other.universe())?;
        let mut e = self.clone();
        for (a, b) in e.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(e)
    }

    pub fn is_subset_of(&self, other: &Entourage) -> Result<bool> {
        check_universe(&self.universe, other.universe())?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.universe.size()).all(|x| self.contains(x, x))
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter_pairs().all(|(x, y)| self.contains(y, x))
    }
}

impl fmt::Debug for Entourage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter_pairs()).finish()
    }
}

/// E∘F: pairs (x, y) admitting z with (x, z) ∈ E and (z, y) ∈ F.
/// The first argument supplies the first leg.
pub fn compose(e: &Entourage, f: &Entourage) -> Result<Entourage> {
    check_universe(e.universe(), f.universe())?;
    let n = e.universe.size();
    let mut out = Entourage::empty(e.universe());
    for x in 0..n {
        for z in 0..n {
            if e.contains(x, z) {
                let (dst, src) = (x * out.row_words, z * f.row_words);
                for w in 0..out.row_words {
                    out.words[dst + w] |= f.words[src + w];
                }
            }
        }
    }
    Ok(out)
}

/// Δ(B): the union of the full squares B×B over the members of `family`.
pub fn delta_of_family(family: &Family) -> Entourage {
    let mut e = Entourage::empty(family.universe());
    for m in family.members() {
        for x in m.iter() {
            let dst = x * e.row_words;
            for (w, word) in m.words().iter().enumerate() {
                e.words[dst + w] |= word;
            }
        }
    }
    e
}

/// B(E) represented by its inclusion-maximal members: all maximal B with
/// B×B ⊆ E. Points without a loop (x,x) ∈ E belong to no member; if E has
/// no loops at all the result is the empty family.
pub fn maximal_family_of_entourage(e: &Entourage) -> Family {
    let n = e.universe().size();
    let verts: Vec<usize> = (0..n).filter(|&x| e.contains(x, x)).collect();
    let adj = |x: usize, y: usize| {
        e.contains(x, y) && e.contains(y, x) && e.contains(x, x) && e.contains(y, y)
    };
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    bron_kerbosch(&verts, &adj, &mut Vec::new(), verts.clone(), Vec::new(), &mut cliques);
    let sets = cliques
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| PointSet::from_indices(e.universe(), c).expect("indices in range"))
        .collect();
    Family::new(e.universe(), sets).expect("same universe")
}

fn bron_kerbosch(
    verts: &[usize],
    adj: &dyn Fn(usize, usize) -> bool,
    r: &mut Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    // pivot on the candidate with most neighbours in P
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj(u, v)).count());
    let candidates: Vec<usize> = match pivot {
        Some(u) => p.iter().copied().filter(|&v| !adj(u, v) || v == u).collect(),
        None => p.clone(),
    };
    let mut p = p;
    let mut x = x;
    let _ = verts;
    for v in candidates {
        r.push(v);
        let p2: Vec<usize> = p.iter().copied().filter(|&w| w != v && adj(v, w)).collect();
        let x2: Vec<usize> = x.iter().copied().filter(|&w| adj(v, w)).collect();
        bron_kerbosch(verts, adj, r, p2, x2, out);
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
}

/// E[K]: all x' with some x ∈ K satisfying (x', x) ∈ E.
pub fn image_of_set(e: &Entourage, k: &PointSet) -> Result<PointSet> {
    check_universe(e.universe(), k.universe())?;
    let mut out = PointSet::empty(e.universe());
    for x_prime in 0..e.universe().size() {
        let row = e.row(x_prime);
        if row.iter().zip(k.words()).any(|(a, b)| a & b != 0) {
            out.insert_unchecked(x_prime);
        }
    }
    Ok(out)
}

/// Membership witness for the induced coarse structure: E is controlled
/// iff E ⊆ Δ(B) for some listed family B.
pub fn lss_to_coarse_witness(families: &[Family], e: &Entourage) -> Result<bool> {
    for b in families {
        check_universe(b.universe(), e.universe())?;
        if e.is_subset_of(&delta_of_family(b))? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Membership witness for the induced large scale structure: B is
/// uniformly bounded iff Δ(B) ⊆ E for some listed controlled set E.
pub fn coarse_to_lss_witness(entourages: &[Entourage], b: &Family) -> Result<bool> {
    let delta = delta_of_family(b);
    for e in entourages {
        check_universe(e.universe(), b.universe())?;
        if delta.is_subset_of(e)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The reflexive-symmetric interior of E: pairs (x, y) with all four of
/// (x,x), (y,y), (x,y), (y,x) in E. Equals Δ(maximal_family_of_entourage(E)).
pub fn reflexive_symmetric_interior(e: &Entourage) -> Entourage {
    let mut out = Entourage::empty(e.universe());
    for (x, y) in e.iter_pairs() {
        if e.contains(y, x) && e.contains(x, x) && e.contains(y, y) {
            out.insert_unchecked(x, y);
        }
    }
    out
}
