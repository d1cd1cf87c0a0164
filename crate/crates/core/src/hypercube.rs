//! Combinatorics of the n-cube `H_n`.
//!
//! Vertices are [`Profile`] codes and two vertices are adjacent when they
//! differ in exactly one coordinate. Everything here is recomputed from
//! scratch per call with plain breadth-first search; tie-breaks are by
//! smallest code and coordinates are scanned in ascending order, so every
//! result is reproducible.

use std::collections::{BTreeMap, VecDeque};

use crate::game_core::{Bits, Profile};
use crate::rational::{int, Rational};

/// Largest dimension the bitset-backed helpers accept.
pub const MAX_DIMENSION: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HypercubeError {
    #[error("no vertices remain after removal")]
    EmptyGraph,
    #[error("vertex {0} is not reachable from the root")]
    Disconnected(String),
    #[error("root {0} is not in the vertex set")]
    RootNotMember(String),
    #[error("sets overlap at vertex {0}")]
    Overlap(String),
    #[error("exact edge expansion is brute force and limited to n <= 4 (got {0}); use cheeger_lower_bound")]
    SizeLimit(usize),
    #[error("dimension {0} outside supported range 1..={max}", max = MAX_DIMENSION)]
    Dimension(usize),
}

/// A subset of the vertices of `H_n`, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
    len: usize,
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|s| s.bitstring(self.n)))
            .finish()
    }
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_DIMENSION, "dimension {n} too large");
        VertexSet {
            n,
            words: vec![0; (1usize << n).div_ceil(64)],
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut set = Self::empty(n);
        for s in Profile::all(n) {
            set.insert(s);
        }
        set
    }

    pub fn from_profiles(n: usize, profiles: impl IntoIterator<Item = Profile>) -> Self {
        let mut set = Self::empty(n);
        for s in profiles {
            set.insert(s);
        }
        set
    }

    /// Parses bitstring labels such as `["00", "11"]`.
    pub fn from_bitstrings<'a>(
        n: usize,
        labels: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, crate::game_core::GameError> {
        let mut set = Self::empty(n);
        for l in labels {
            let s = Profile::parse_bitstring(l)?;
            if l.len() != n {
                return Err(crate::game_core::GameError::BadProfile(l.to_string()));
            }
            set.insert(s);
        }
        Ok(set)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, s: Profile) -> bool {
        let k = s.index();
        k < (1 << self.n) && self.words[k / 64] >> (k % 64) & 1 == 1
    }

    /// Returns true if `s` was not already present.
    pub fn insert(&mut self, s: Profile) -> bool {
        assert!(s.is_valid(self.n), "profile outside the {}-cube", self.n);
        let k = s.index();
        let bit = 1u64 << (k % 64);
        let fresh = self.words[k / 64] & bit == 0;
        self.words[k / 64] |= bit;
        self.len += fresh as usize;
        fresh
    }

    pub fn remove(&mut self, s: Profile) -> bool {
        if !self.contains(s) {
            return false;
        }
        let k = s.index();
        self.words[k / 64] &= !(1u64 << (k % 64));
        self.len -= 1;
        true
    }

    /// Members in ascending code order.
    pub fn iter(&self) -> impl Iterator<Item = Profile> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                Some(Profile(w as u64 * 64 + b))
            })
        })
    }

    pub fn min(&self) -> Option<Profile> {
        self.iter().next()
    }

    pub fn complement(&self) -> Self {
        Self::from_profiles(self.n, Profile::all(self.n).filter(|s| !self.contains(*s)))
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self::from_profiles(self.n, self.iter().filter(|s| !other.contains(*s)))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    pub fn labels(&self) -> Vec<String> {
        self.iter().map(|s| s.bitstring(self.n)).collect()
    }
}

/// BFS tree rooted at `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: Profile,
    /// Child → (parent, coordinate of the connecting edge).
    pub parent: BTreeMap<Profile, (Profile, usize)>,
    /// Reverse BFS order: every child comes before its parent, root last.
    pub order: Vec<Profile>,
}

/// `s¬1 … s¬n` in player order.
pub fn neighbors(s: Profile, n: usize) -> Vec<Profile> {
    (0..n).map(|i| s.flip(i)).collect()
}

/// Connected components of the subgraph induced by `allowed`, sorted by
/// size descending then by smallest member.
pub fn components_within(allowed: &VertexSet) -> Vec<VertexSet> {
    let n = allowed.n();
    let mut seen = VertexSet::empty(n);
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in allowed.iter() {
        if seen.contains(start) {
            continue;
        }
        let mut comp = VertexSet::empty(n);
        seen.insert(start);
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            comp.insert(v);
            for i in 0..n {
                let w = v.flip(i);
                if allowed.contains(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        out.push(comp);
    }
    // Starts are scanned in ascending order, so each component's minimum is
    // its start and the stable sort keeps the min-code tie-break.
    out.sort_by_key(|c| std::cmp::Reverse(c.len()));
    out
}

/// Components of `V ∖ removed`.
pub fn components(n: usize, removed: &VertexSet) -> Vec<VertexSet> {
    assert_eq!(n, removed.n(), "dimension mismatch");
    components_within(&removed.complement())
}

/// The largest component of `V ∖ removed`, ties to the smallest member.
pub fn largest_component(n: usize, removed: &VertexSet) -> Result<VertexSet, HypercubeError> {
    components(n, removed)
        .into_iter()
        .next()
        .ok_or(HypercubeError::EmptyGraph)
}

/// BFS spanning tree of the subgraph induced by `vertices`, rooted at `root`.
pub fn spanning_tree(
    vertices: &VertexSet,
    root: Profile,
    n: usize,
) -> Result<SpanningTree, HypercubeError> {
    if !vertices.contains(root) {
        return Err(HypercubeError::RootNotMember(Bits(root, n).to_string()));
    }
    let mut seen = VertexSet::empty(n);
    let mut parent = BTreeMap::new();
    let mut bfs = Vec::with_capacity(vertices.len());
    seen.insert(root);
    bfs.push(root);
    let mut head = 0;
    while head < bfs.len() {
        let v = bfs[head];
        head += 1;
        for i in 0..n {
            let w = v.flip(i);
            if vertices.contains(w) && seen.insert(w) {
                parent.insert(w, (v, i));
                bfs.push(w);
            }
        }
    }
    if bfs.len() != vertices.len() {
        let lost = vertices
            .iter()
            .find(|s| !seen.contains(*s))
            .expect("some vertex was not reached");
        return Err(HypercubeError::Disconnected(Bits(lost, n).to_string()));
    }
    bfs.reverse();
    Ok(SpanningTree {
        root,
        parent,
        order: bfs,
    })
}

/// `|δ(S, T)|`: edges with one endpoint in each set.
pub fn edge_boundary(n: usize, s: &VertexSet, t: &VertexSet) -> Result<u64, HypercubeError> {
    if let Some(x) = s.iter().find(|v| t.contains(*v)) {
        return Err(HypercubeError::Overlap(Bits(x, n).to_string()));
    }
    Ok(s.iter()
        .map(|v| (0..n).filter(|&i| t.contains(v.flip(i))).count() as u64)
        .sum())
}

/// Exact `h(H_n)` by enumerating every proper nonempty cut. Only `n <= 4`.
pub fn edge_expansion_exact(n: usize) -> Result<Rational, HypercubeError> {
    if n == 0 {
        return Err(HypercubeError::Dimension(n));
    }
    if n > 4 {
        return Err(HypercubeError::SizeLimit(n));
    }
    let size = 1usize << n;
    let full: u64 = if size == 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    };
    let mut best: Option<Rational> = None;
    for mask in 1..full {
        let inside = mask.count_ones() as i64;
        let smaller = inside.min(size as i64 - inside);
        let mut cut = 0i64;
        for v in 0..size {
            if mask >> v & 1 == 1 {
                for i in 0..n {
                    if mask >> (v ^ (1 << i)) & 1 == 0 {
                        cut += 1;
                    }
                }
            }
        }
        let ratio = Rational::new(cut.into(), smaller.into());
        if best.as_ref().is_none_or(|b| ratio < *b) {
            best = Some(ratio);
        }
    }
    Ok(best.expect("n >= 1 has a proper cut"))
}

/// `1/n`, the expansion bound that follows from Cheeger's inequality and
/// the hypercube's second eigenvalue `1 - 2/n`.
pub fn cheeger_lower_bound(n: usize) -> Result<Rational, HypercubeError> {
    if n == 0 {
        return Err(HypercubeError::Dimension(n));
    }
    Ok(Rational::new(1.into(), (n as i64).into()))
}

/// Largest `|S|` with `|S| < 2^n / (n² + 1)`.
pub fn giant_component_budget(n: usize) -> usize {
    let d = (n * n + 1) as u128;
    let size = 1u128 << n;
    (size.div_ceil(d) - 1) as usize
}

/// True iff the largest component of `V ∖ S` has more than `2^(n-1)` vertices.
pub fn giant_component_holds(n: usize, removed: &VertexSet) -> bool {
    match largest_component(n, removed) {
        Ok(c) => c.len() > 1 << (n - 1),
        Err(_) => false,
    }
}

/// `|δ(C, V∖C)| ≥ min(|C|, |V∖C|) / n`, evaluated exactly.
pub fn expansion_inequality_holds(n: usize, c: &VertexSet) -> bool {
    let rest = c.complement();
    let cut = edge_boundary(n, c, &rest).expect("complement is disjoint");
    let smaller = c.len().min(rest.len()) as i64;
    int(cut as i64) * int(n as i64) >= int(smaller)
}
