//! Typed triple graph over atomic concepts.
//!
//! Every edge starts at a concept and is labelled with a [`Relation`]; the
//! target kind is fixed by the relation (definition text, example sentence,
//! word, or another concept for the two ISA directions). Graphs are built
//! through a [`GraphBuilder`] and then frozen into an immutable
//! [`KnowledgeGraph`] whose query results do not depend on insertion order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KbError {
    #[error("concept id must be non-empty")]
    EmptyConceptId,
    #[error("relation {rel} cannot target a {kind}")]
    TypeMismatch { rel: Relation, kind: TargetKind },
    #[error("unknown concept {0}")]
    UnknownConcept(ConceptId),
    #[error("isa_up cycle through {}", display_cycle(.0))]
    Cycle(Vec<ConceptId>),
}

fn display_cycle(ids: &[ConceptId]) -> String {
    let parts: Vec<&str> = ids.iter().map(ConceptId::as_str).collect();
    parts.join(" -> ")
}

/// Key of an atomic concept, e.g. `count.v.03`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConceptId(String);

impl ConceptId {
    pub fn new(key: impl Into<String>) -> Result<Self, KbError> {
        let key = key.into();
        if key.is_empty() {
            return Err(KbError::EmptyConceptId);
        }
        Ok(ConceptId(key))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ConceptId {
    type Error = KbError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        ConceptId::new(value)
    }
}

impl From<ConceptId> for String {
    fn from(value: ConceptId) -> Self {
        value.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    IsaUp,
    IsaDown,
    Def,
    Ex,
    Lemma,
}

impl Relation {
    pub const ALL: [Relation; 5] = [Relation::IsaUp, Relation::IsaDown, Relation::Def, Relation::Ex, Relation::Lemma];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::IsaUp => "isa_up",
            Relation::IsaDown => "isa_down",
            Relation::Def => "def",
            Relation::Ex => "ex",
            Relation::Lemma => "lemma",
        }
    }

    /// The only target kind this relation admits.
    pub fn target_kind(self) -> TargetKind {
        match self {
            Relation::IsaUp | Relation::IsaDown => TargetKind::Concept,
            Relation::Def => TargetKind::Definition,
            Relation::Ex => TargetKind::Sentence,
            Relation::Lemma => TargetKind::Word,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Concept,
    Definition,
    Sentence,
    Word,
}

impl TargetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetKind::Concept => "concept",
            TargetKind::Definition => "definition",
            TargetKind::Sentence => "sentence",
            TargetKind::Word => "word",
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Concept(ConceptId),
    Definition(String),
    Sentence(String),
    Word(String),
}

impl Target {
    pub fn kind(&self) -> TargetKind {
        match self {
            Target::Concept(_) => TargetKind::Concept,
            Target::Definition(_) => TargetKind::Definition,
            Target::Sentence(_) => TargetKind::Sentence,
            Target::Word(_) => TargetKind::Word,
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Target::Concept(c) => c.as_str(),
            Target::Definition(t) | Target::Sentence(t) | Target::Word(t) => t,
        }
    }

    pub fn from_parts(kind: TargetKind, text: impl Into<String>) -> Result<Self, KbError> {
        let text = text.into();
        Ok(match kind {
            TargetKind::Concept => Target::Concept(ConceptId::new(text)?),
            TargetKind::Definition => Target::Definition(text),
            TargetKind::Sentence => Target::Sentence(text),
            TargetKind::Word => Target::Word(text),
        })
    }
}

/// A `(relation, source, target)` edge. Only well-typed triples can be
/// constructed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    source: ConceptId,
    rel: Relation,
    target: Target,
}

impl Triple {
    pub fn new(rel: Relation, source: ConceptId, target: Target) -> Result<Self, KbError> {
        if rel.target_kind() != target.kind() {
            return Err(KbError::TypeMismatch { rel, kind: target.kind() });
        }
        Ok(Triple { source, rel, target })
    }

    pub fn isa_up(child: ConceptId, parent: ConceptId) -> Self {
        Triple { source: child, rel: Relation::IsaUp, target: Target::Concept(parent) }
    }

    pub fn rel(&self) -> Relation {
        self.rel
    }

    pub fn source(&self) -> &ConceptId {
        &self.source
    }

    pub fn target(&self) -> &Target {
        &self.target
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartOfSpeech {
    Noun,
    Verb,
    Adj,
    Adv,
    #[default]
    Other,
}

impl PartOfSpeech {
    pub fn as_str(self) -> &'static str {
        match self {
            PartOfSpeech::Noun => "noun",
            PartOfSpeech::Verb => "verb",
            PartOfSpeech::Adj => "adj",
            PartOfSpeech::Adv => "adv",
            PartOfSpeech::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "noun" => PartOfSpeech::Noun,
            "verb" => PartOfSpeech::Verb,
            "adj" => PartOfSpeech::Adj,
            "adv" => PartOfSpeech::Adv,
            "other" => PartOfSpeech::Other,
            _ => return None,
        })
    }
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Default, Clone)]
struct Draft {
    pos: PartOfSpeech,
    up: BTreeSet<ConceptId>,
    down: BTreeSet<ConceptId>,
    defs: BTreeSet<String>,
    examples: BTreeSet<String>,
    // word -> explicit display rank, if the source supplied one
    lemmas: BTreeMap<String, Option<u32>>,
}

/// Single-writer build phase of a [`KnowledgeGraph`].
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    allow_implicit: bool,
    drafts: BTreeMap<ConceptId, Draft>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Auto-register concepts referenced by triples instead of failing.
    pub fn allow_implicit(mut self, yes: bool) -> Self {
        self.allow_implicit = yes;
        self
    }

    /// Registers a concept. A known part of speech overrides `Other`.
    pub fn add_concept(&mut self, id: ConceptId, pos: PartOfSpeech) {
        let draft = self.drafts.entry(id).or_default();
        if draft.pos == PartOfSpeech::Other {
            draft.pos = pos;
        }
    }

    pub fn contains(&self, id: &ConceptId) -> bool {
        self.drafts.contains_key(id)
    }

    pub fn concept_count(&self) -> usize {
        self.drafts.len()
    }

    fn draft_mut(&mut self, id: &ConceptId) -> Result<&mut Draft, KbError> {
        if !self.drafts.contains_key(id) {
            if !self.allow_implicit {
                return Err(KbError::UnknownConcept(id.clone()));
            }
            self.drafts.insert(id.clone(), Draft::default());
        }
        Ok(self.drafts.get_mut(id).expect("registered above"))
    }

    /// Inserts a triple. ISA edges are mirrored, duplicates are no-ops.
    pub fn add_triple(&mut self, triple: Triple) -> Result<(), KbError> {
        let Triple { source, rel, target } = triple;
        match (rel, target) {
            (Relation::IsaUp, Target::Concept(parent)) => self.link(source, parent),
            (Relation::IsaDown, Target::Concept(child)) => self.link(child, source),
            (Relation::Def, Target::Definition(text)) => {
                self.draft_mut(&source)?.defs.insert(text);
                Ok(())
            }
            (Relation::Ex, Target::Sentence(text)) => {
                self.draft_mut(&source)?.examples.insert(text);
                Ok(())
            }
            (Relation::Lemma, Target::Word(text)) => {
                self.draft_mut(&source)?.lemmas.entry(text).or_insert(None);
                Ok(())
            }
            (rel, target) => Err(KbError::TypeMismatch { rel, kind: target.kind() }),
        }
    }

    /// Adds a lemma with an explicit display rank (lower ranks render first).
    pub fn add_ranked_lemma(&mut self, id: &ConceptId, word: String, rank: u32) -> Result<(), KbError> {
        let slot = self.draft_mut(id)?.lemmas.entry(word).or_insert(Some(rank));
        *slot = Some(slot.map_or(rank, |r| r.min(rank)));
        Ok(())
    }

    fn link(&mut self, child: ConceptId, parent: ConceptId) -> Result<(), KbError> {
        // both endpoints must resolve before either side is touched
        if !self.allow_implicit {
            for id in [&child, &parent] {
                if !self.drafts.contains_key(id) {
                    return Err(KbError::UnknownConcept(id.clone()));
                }
            }
        }
        self.draft_mut(&child)?.up.insert(parent.clone());
        self.draft_mut(&parent)?.down.insert(child);
        Ok(())
    }

    /// Freezes the graph, rejecting `isa_up` cycles.
    pub fn freeze(self) -> Result<KnowledgeGraph, KbError> {
        let graph = self.freeze_unchecked();
        match graph.check_acyclic() {
            Ok(()) => Ok(graph),
            Err(cycle) => Err(KbError::Cycle(cycle)),
        }
    }

    /// Freezes without the acyclicity check. Traversals still terminate on
    /// cyclic graphs, which is what this is for.
    pub fn freeze_unchecked(self) -> KnowledgeGraph {
        let ids: Vec<ConceptId> = self.drafts.keys().cloned().collect();
        let lookup = |id: &ConceptId| NodeIx(ids.binary_search(id).expect("endpoint registered") as u32);
        let nodes = self
            .drafts
            .values()
            .map(|d| {
                let mut display: Vec<(Option<u32>, &String)> = d.lemmas.iter().map(|(w, r)| (*r, w)).collect();
                // ranked lemmas first, in rank order, then the rest lexicographically
                display.sort_by(|a, b| match (a.0, b.0) {
                    (Some(x), Some(y)) => x.cmp(&y).then_with(|| a.1.cmp(b.1)),
                    (Some(_), None) => core::cmp::Ordering::Less,
                    (None, Some(_)) => core::cmp::Ordering::Greater,
                    (None, None) => a.1.cmp(b.1),
                });
                Node {
                    pos: d.pos,
                    up: d.up.iter().map(lookup).collect(),
                    down: d.down.iter().map(lookup).collect(),
                    defs: d.defs.iter().cloned().collect(),
                    examples: d.examples.iter().cloned().collect(),
                    lemmas: d.lemmas.keys().cloned().collect(),
                    ranks: d.lemmas.values().copied().collect(),
                    display: display.into_iter().map(|(_, w)| w.clone()).collect(),
                }
            })
            .collect();
        KnowledgeGraph { ids, nodes }
    }
}

/// Dense index of a concept inside one frozen graph. Indices follow the
/// lexicographic order of concept ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeIx(pub u32);

impl NodeIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    pos: PartOfSpeech,
    up: Vec<NodeIx>,
    down: Vec<NodeIx>,
    defs: Vec<String>,
    examples: Vec<String>,
    lemmas: Vec<String>,
    ranks: Vec<Option<u32>>,
    display: Vec<String>,
}

/// Immutable, shareable triple graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KnowledgeGraph {
    ids: Vec<ConceptId>,
    nodes: Vec<Node>,
}

impl KnowledgeGraph {
    pub fn concept_count(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn lookup(&self, id: &str) -> Option<NodeIx> {
        self.ids.binary_search_by(|c| c.as_str().cmp(id)).ok().map(|i| NodeIx(i as u32))
    }

    pub fn resolve(&self, id: &ConceptId) -> Result<NodeIx, KbError> {
        self.lookup(id.as_str()).ok_or_else(|| KbError::UnknownConcept(id.clone()))
    }

    pub fn id(&self, ix: NodeIx) -> &ConceptId {
        &self.ids[ix.index()]
    }

    pub fn ids(&self) -> &[ConceptId] {
        &self.ids
    }

    pub fn indices(&self) -> impl Iterator<Item = NodeIx> + '_ {
        (0..self.ids.len() as u32).map(NodeIx)
    }

    pub fn pos(&self, ix: NodeIx) -> PartOfSpeech {
        self.nodes[ix.index()].pos
    }

    pub fn parents(&self, ix: NodeIx) -> &[NodeIx] {
        &self.nodes[ix.index()].up
    }

    pub fn children(&self, ix: NodeIx) -> &[NodeIx] {
        &self.nodes[ix.index()].down
    }

    pub fn definitions(&self, ix: NodeIx) -> &[String] {
        &self.nodes[ix.index()].defs
    }

    pub fn examples(&self, ix: NodeIx) -> &[String] {
        &self.nodes[ix.index()].examples
    }

    /// Lemmas in lexicographic order.
    pub fn lemmas(&self, ix: NodeIx) -> &[String] {
        &self.nodes[ix.index()].lemmas
    }

    /// Lemmas in display order: ranked ones first, then lexicographic.
    pub fn display_lemmas(&self, ix: NodeIx) -> &[String] {
        &self.nodes[ix.index()].display
    }

    pub fn display_lemma(&self, ix: NodeIx) -> Option<&str> {
        self.nodes[ix.index()].display.first().map(String::as_str)
    }

    pub fn lemma_rank(&self, ix: NodeIx, word: &str) -> Option<u32> {
        let node = &self.nodes[ix.index()];
        let i = node.lemmas.binary_search_by(|w| w.as_str().cmp(word)).ok()?;
        node.ranks[i]
    }

    /// Targets of `rel` edges from `c`, in lexicographic order.
    pub fn neighbors(&self, c: &ConceptId, rel: Relation) -> Result<Vec<Target>, KbError> {
        let ix = self.resolve(c)?;
        let node = &self.nodes[ix.index()];
        let concepts = |xs: &[NodeIx]| xs.iter().map(|&n| Target::Concept(self.id(n).clone())).collect();
        Ok(match rel {
            Relation::IsaUp => concepts(&node.up),
            Relation::IsaDown => concepts(&node.down),
            Relation::Def => node.defs.iter().cloned().map(Target::Definition).collect(),
            Relation::Ex => node.examples.iter().cloned().map(Target::Sentence).collect(),
            Relation::Lemma => node.lemmas.iter().cloned().map(Target::Word).collect(),
        })
    }

    /// All triples, sorted by `(source, relation, target)`.
    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.indices().flat_map(move |ix| {
            let source = self.id(ix).clone();
            Relation::ALL.into_iter().flat_map(move |rel| {
                let source = source.clone();
                self.neighbors(&source, rel)
                    .expect("own concept")
                    .into_iter()
                    .map(move |target| Triple { source: source.clone(), rel, target })
            })
        })
    }

    pub fn triple_count(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.up.len() + n.down.len() + n.defs.len() + n.examples.len() + n.lemmas.len())
            .sum()
    }

    pub fn count(&self, rel: Relation) -> usize {
        self.nodes
            .iter()
            .map(|n| match rel {
                Relation::IsaUp => n.up.len(),
                Relation::IsaDown => n.down.len(),
                Relation::Def => n.defs.len(),
                Relation::Ex => n.examples.len(),
                Relation::Lemma => n.lemmas.len(),
            })
            .sum()
    }

    /// `Ok(())` when `isa_up` edges form a DAG, otherwise one cycle in edge
    /// order (the first concept is not repeated at the end).
    pub fn check_acyclic(&self) -> Result<(), Vec<ConceptId>> {
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let mut colour = alloc::vec![WHITE; self.nodes.len()];
        let mut path: Vec<NodeIx> = Vec::new();
        // explicit stack of (node, next edge position)
        let mut stack: Vec<(NodeIx, usize)> = Vec::new();
        for root in self.indices() {
            if colour[root.index()] != WHITE {
                continue;
            }
            stack.push((root, 0));
            colour[root.index()] = GREY;
            path.push(root);
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                let parents = &self.nodes[node.index()].up;
                if *next < parents.len() {
                    let p = parents[*next];
                    *next += 1;
                    match colour[p.index()] {
                        WHITE => {
                            colour[p.index()] = GREY;
                            path.push(p);
                            stack.push((p, 0));
                        }
                        GREY => {
                            let start = path.iter().position(|&x| x == p).expect("grey nodes are on the path");
                            return Err(path[start..].iter().map(|&x| self.id(x).clone()).collect());
                        }
                        _ => {}
                    }
                } else {
                    colour[node.index()] = BLACK;
                    path.pop();
                    stack.pop();
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for KnowledgeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KnowledgeGraph({} concepts, {} triples)", self.concept_count(), self.triple_count())
    }
}

/// Convenience for tests and fixtures: `cid("count.v.03")`.
pub fn cid(key: &str) -> ConceptId {
    ConceptId::new(key.to_string()).expect("non-empty concept id")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fig2() -> KnowledgeGraph {
        let mut b = GraphBuilder::new().allow_implicit(true);
        for (child, parent) in [
            ("parrot.v.02", "utter.v.01"),
            ("recite.v.02", "utter.v.01"),
            ("spell.v.01", "recite.v.02"),
            ("count.v.03", "recite.v.02"),
            ("mispell.v.01", "spell.v.01"),
            ("count-down.v.01", "count.v.03"),
        ] {
            b.add_triple(Triple::isa_up(cid(child), cid(parent))).unwrap();
        }
        b.freeze().unwrap()
    }

    #[test]
    fn isa_up_is_mirrored() {
        let g = fig2();
        let down = g.neighbors(&cid("recite.v.02"), Relation::IsaDown).unwrap();
        assert!(down.contains(&Target::Concept(cid("count.v.03"))));
    }

    #[test]
    fn neighbors_follow_figure() {
        let g = fig2();
        assert_eq!(g.neighbors(&cid("count.v.03"), Relation::IsaUp).unwrap(), vec![Target::Concept(cid("recite.v.02"))]);
        assert!(g.neighbors(&cid("utter.v.01"), Relation::IsaUp).unwrap().is_empty());
        assert_eq!(
            g.neighbors(&cid("recite.v.02"), Relation::IsaDown).unwrap(),
            vec![Target::Concept(cid("count.v.03")), Target::Concept(cid("spell.v.01"))]
        );
        assert!(matches!(g.neighbors(&cid("nope.n.01"), Relation::Def), Err(KbError::UnknownConcept(_))));
    }

    #[test]
    fn duplicate_insertion_is_idempotent() {
        let mut b = GraphBuilder::new();
        b.add_concept(cid("a"), PartOfSpeech::Noun);
        b.add_concept(cid("b"), PartOfSpeech::Noun);
        for _ in 0..2 {
            b.add_triple(Triple::isa_up(cid("a"), cid("b"))).unwrap();
            b.add_triple(Triple::new(Relation::IsaDown, cid("b"), Target::Concept(cid("a"))).unwrap()).unwrap();
        }
        let g = b.freeze().unwrap();
        assert_eq!(g.count(Relation::IsaUp), 1);
        assert_eq!(g.count(Relation::IsaDown), 1);
    }

    #[test]
    fn read_your_write_definition() {
        let mut b = GraphBuilder::new();
        b.add_concept(cid("c1"), PartOfSpeech::Noun);
        b.add_triple(Triple::new(Relation::Def, cid("c1"), Target::Definition("a thing".into())).unwrap()).unwrap();
        let g = b.freeze().unwrap();
        assert_eq!(g.neighbors(&cid("c1"), Relation::Def).unwrap(), vec![Target::Definition("a thing".into())]);
    }

    #[test]
    fn type_mismatch_is_rejected() {
        let err = Triple::new(Relation::Def, cid("c1"), Target::Sentence("x".into())).unwrap_err();
        assert_eq!(err, KbError::TypeMismatch { rel: Relation::Def, kind: TargetKind::Sentence });
        assert!(Triple::new(Relation::IsaUp, cid("c1"), Target::Word("x".into())).is_err());
    }

    #[test]
    fn unknown_concept_without_implicit_flag() {
        let mut b = GraphBuilder::new();
        b.add_concept(cid("a"), PartOfSpeech::Noun);
        let err = b.add_triple(Triple::isa_up(cid("a"), cid("ghost"))).unwrap_err();
        assert_eq!(err, KbError::UnknownConcept(cid("ghost")));
        // the failed link must not leave a half edge behind
        let g = b.freeze().unwrap();
        assert!(g.parents(g.lookup("a").unwrap()).is_empty());
    }

    #[test]
    fn cycle_report() {
        let mut b = GraphBuilder::new().allow_implicit(true);
        b.add_triple(Triple::isa_up(cid("a"), cid("b"))).unwrap();
        b.add_triple(Triple::isa_up(cid("b"), cid("a"))).unwrap();
        let g = b.clone().freeze_unchecked();
        assert_eq!(g.check_acyclic(), Err(vec![cid("a"), cid("b")]));
        assert!(matches!(b.freeze(), Err(KbError::Cycle(_))));
        assert_eq!(KnowledgeGraph::default().check_acyclic(), Ok(()));
        assert_eq!(fig2().check_acyclic(), Ok(()));
    }

    #[test]
    fn display_lemma_prefers_rank() {
        let mut b = GraphBuilder::new();
        let c = cid("gender.n.01");
        b.add_concept(c.clone(), PartOfSpeech::Noun);
        b.add_ranked_lemma(&c, "sex".into(), 1).unwrap();
        b.add_ranked_lemma(&c, "gender".into(), 0).unwrap();
        b.add_triple(Triple::new(Relation::Lemma, c.clone(), Target::Word("aardvark".into())).unwrap()).unwrap();
        let g = b.freeze().unwrap();
        let ix = g.lookup("gender.n.01").unwrap();
        assert_eq!(g.display_lemmas(ix), ["gender", "sex", "aardvark"]);
        assert_eq!(g.lemmas(ix), ["aardvark", "gender", "sex"]);
        assert_eq!(g.lemma_rank(ix, "sex"), Some(1));
    }
}
