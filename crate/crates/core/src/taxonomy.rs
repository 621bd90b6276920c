//! Set-valued ISA operators: depth-limited closures and sister families.

use alloc::collections::{BTreeMap, VecDeque};

use crate::kb::{ConceptId, KbError, KnowledgeGraph, NodeIx};

/// Default depth for both ISA closures and sister descent.
pub const DEFAULT_LIMIT: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaxonomyError {
    #[error(transparent)]
    Graph(#[from] KbError),
    #[error("depth limit must be at least 1, got {0}")]
    BadLimit(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn opposite(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

/// Concepts reachable from a start concept, each with its minimum hop count.
pub type HopSet = BTreeMap<ConceptId, u32>;

/// Index-level closure: every concept reachable in `1..=limit` steps along
/// `dir`, labelled with its minimum distance. The start concept is never
/// included, even on cyclic input.
pub fn hops_ix(g: &KnowledgeGraph, start: NodeIx, dir: Direction, limit: u32) -> BTreeMap<NodeIx, u32> {
    let mut seen: BTreeMap<NodeIx, u32> = BTreeMap::new();
    let mut queue = VecDeque::new();
    queue.push_back((start, 0u32));
    while let Some((node, d)) = queue.pop_front() {
        if d == limit {
            continue;
        }
        let next = match dir {
            Direction::Up => g.parents(node),
            Direction::Down => g.children(node),
        };
        for &n in next {
            if n == start || seen.contains_key(&n) {
                continue;
            }
            // BFS: first visit is the minimum distance
            seen.insert(n, d + 1);
            queue.push_back((n, d + 1));
        }
    }
    seen
}

/// Transitive ISA closure of `c` in direction `dir`, truncated at `limit`.
pub fn hops(g: &KnowledgeGraph, c: &ConceptId, dir: Direction, limit: u32) -> Result<HopSet, TaxonomyError> {
    if limit < 1 {
        return Err(TaxonomyError::BadLimit(limit));
    }
    let start = g.resolve(c)?;
    Ok(hops_ix(g, start, dir, limit).into_iter().map(|(n, k)| (g.id(n).clone(), k)).collect())
}

/// Index-level sister family: siblings of `c` under each of its parents
/// (distance 1) plus their descendants down to `depth - 1` further levels
/// (distance `1 + hops`). `c` and all of its descendants are excluded.
pub fn sister_family_ix(g: &KnowledgeGraph, c: NodeIx, depth: u32) -> BTreeMap<NodeIx, u32> {
    let mut family: BTreeMap<NodeIx, u32> = BTreeMap::new();
    if depth == 0 || g.parents(c).is_empty() {
        return family;
    }
    let own = hops_ix(g, c, Direction::Down, u32::MAX);
    let keep = |n: NodeIx, d: u32, family: &mut BTreeMap<NodeIx, u32>| {
        if n == c || own.contains_key(&n) {
            return;
        }
        family.entry(n).and_modify(|old| *old = (*old).min(d)).or_insert(d);
    };
    for &parent in g.parents(c) {
        for &sister in g.children(parent) {
            if sister == c {
                continue;
            }
            keep(sister, 1, &mut family);
            if depth > 1 {
                for (n, k) in hops_ix(g, sister, Direction::Down, depth - 1) {
                    keep(n, 1 + k, &mut family);
                }
            }
        }
    }
    family
}

/// The `depth`-deep sister family of `c`.
pub fn sister_family(g: &KnowledgeGraph, c: &ConceptId, depth: u32) -> Result<HopSet, TaxonomyError> {
    if depth < 1 {
        return Err(TaxonomyError::BadLimit(depth));
    }
    let ix = g.resolve(c)?;
    Ok(sister_family_ix(g, ix, depth).into_iter().map(|(n, k)| (g.id(n).clone(), k)).collect())
}
