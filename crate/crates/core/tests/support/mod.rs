//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lexprobe_core::kb::{cid, GraphBuilder, KnowledgeGraph, PartOfSpeech, Relation, Target, Triple};
use lexprobe_core::probe::{Dataset, ProbeMeta, ProbeQuestion, ProbeType, Split, Strategy, CHOICES};
use lexprobe_core::text::fold;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The verb fragment drawn in the distractor-generation figure:
/// (id, lemma, parent, gloss).
pub const FIG2: [(&str, &str, &str, &str); 7] = [
    ("utter.v.01", "utter", "", "articulate; either verbally or with a cry, shout, or noise"),
    ("parrot.v.02", "parrot", "utter.v.01", "repeat mechanically"),
    ("recite.v.02", "recite", "utter.v.01", "render verbally, or recite"),
    ("spell.v.01", "spell", "recite.v.02", "orally recite the letters of or give the spelling of"),
    ("count.v.03", "count", "recite.v.02", "name or recite the numbers"),
    ("mispell.v.01", "mispell", "spell.v.01", "spell incorrectly"),
    ("count-down.v.01", "count down", "count.v.03", "count backwards, towards zero"),
];

/// The figure's graph. The root is left unglossed unless `root_gloss`.
pub fn fig2_graph(root_gloss: bool) -> KnowledgeGraph {
    let mut b = GraphBuilder::new();
    for (id, lemma, _, def) in FIG2 {
        let id = cid(id);
        b.add_concept(id.clone(), PartOfSpeech::Verb);
        b.add_ranked_lemma(&id, lemma.into(), 0).unwrap();
        if root_gloss || lemma != "utter" {
            b.add_triple(Triple::new(Relation::Def, id.clone(), Target::Definition(def.into())).unwrap()).unwrap();
        }
    }
    for (id, _, parent, _) in FIG2 {
        if !parent.is_empty() {
            b.add_triple(Triple::isa_up(cid(id), cid(parent))).unwrap();
        }
    }
    let ex = Triple::new(Relation::Ex, cid("count.v.03"), Target::Sentence("the toddler could count".into())).unwrap();
    b.add_triple(ex).unwrap();
    b.freeze().unwrap()
}

/// A random DAG on `n` nodes; edges are (child, parent) with parent < child.
#[derive(Debug, Clone)]
pub struct Dag {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Dag {
    pub fn random(rng: &mut ChaCha8Rng, n: usize) -> Dag {
        let density = rng.random_range(0.02..0.25);
        let mut edges = Vec::new();
        for child in 1..n {
            for parent in 0..child {
                if rng.random_bool(density) {
                    edges.push((child, parent));
                }
            }
        }
        Dag { n, edges }
    }

    pub fn name(i: usize) -> String {
        format!("node{i:02}.n.01")
    }

    pub fn lemma(i: usize) -> String {
        format!("word{i:02}")
    }

    /// Noun graph with a lemma, gloss and example sentence on every node.
    pub fn graph(&self) -> KnowledgeGraph {
        let mut b = GraphBuilder::new();
        for i in 0..self.n {
            let id = cid(&Dag::name(i));
            b.add_concept(id.clone(), PartOfSpeech::Noun);
            b.add_ranked_lemma(&id, Dag::lemma(i), 0).unwrap();
            let def = format!("gloss number {i} of the test taxonomy");
            b.add_triple(Triple::new(Relation::Def, id.clone(), Target::Definition(def)).unwrap()).unwrap();
            let ex = format!("an example that mentions {}", Dag::lemma(i));
            b.add_triple(Triple::new(Relation::Ex, id, Target::Sentence(ex)).unwrap()).unwrap();
        }
        for &(c, p) in &self.edges {
            b.add_triple(Triple::isa_up(cid(&Dag::name(c)), cid(&Dag::name(p)))).unwrap();
        }
        b.freeze().unwrap()
    }

    /// `up[a][b]`: fewest upward steps from a to b, by Floyd-Warshall.
    pub fn up_distances(&self) -> Vec<Vec<Option<u32>>> {
        let n = self.n;
        let mut d = vec![vec![None; n]; n];
        for &(c, p) in &self.edges {
            d[c][p] = Some(1);
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                        if d[i][j].is_none_or(|x| a + b < x) {
                            d[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        d
    }

    pub fn parents(&self, c: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.0 == c).map(|e| e.1).collect()
    }

    pub fn children(&self, p: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.1 == p).map(|e| e.0).collect()
    }
}

/// Closure of `c` within `limit` steps up (`up = true`) or down.
pub fn oracle_hops(d: &[Vec<Option<u32>>], c: usize, up: bool, limit: u32) -> BTreeMap<usize, u32> {
    (0..d.len())
        .filter(|&x| x != c)
        .filter_map(|x| {
            let dist = if up { d[c][x] } else { d[x][c] };
            dist.filter(|&k| k <= limit).map(|k| (x, k))
        })
        .collect()
}

/// Sister family by definition: every x within `depth - 1` steps below a
/// sibling s of c (labelled 1 + that distance), minus c and c's descendants.
pub fn oracle_sisters(dag: &Dag, d: &[Vec<Option<u32>>], c: usize, depth: u32) -> BTreeMap<usize, u32> {
    let mut out: BTreeMap<usize, u32> = BTreeMap::new();
    for p in dag.parents(c) {
        for s in dag.children(p) {
            if s == c {
                continue;
            }
            for (x, row) in d.iter().enumerate() {
                let below = if x == s { Some(0) } else { row[s] };
                let Some(k) = below else { continue };
                if k + 1 > depth || x == c || row[c].is_some() {
                    continue;
                }
                let e = out.entry(x).or_insert(k + 1);
                *e = (*e).min(k + 1);
            }
        }
    }
    out
}

/// Every structural invariant of an emitted dataset; returns the first
/// violation.
pub fn well_formed(data: &Dataset, inoculation_max: usize) -> Result<(), String> {
    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    for c in &data.clusters {
        if c.members.is_empty() {
            return Err(format!("empty cluster {}", c.cluster_id));
        }
        for m in &c.members {
            if owner.insert(m, &c.cluster_id).is_some() {
                return Err(format!("{m} in two clusters"));
            }
        }
    }
    let mut ids = BTreeSet::new();
    let mut cluster_split: BTreeMap<&str, Option<Split>> = BTreeMap::new();
    let mut inoculation = 0;
    let mut keys: BTreeMap<Split, BTreeSet<(String, Vec<String>)>> = BTreeMap::new();
    for q in &data.questions {
        if !ids.insert(q.id.as_str()) {
            return Err(format!("duplicate id {}", q.id));
        }
        let folded: BTreeSet<String> = q.choices.iter().map(|c| fold(c)).collect();
        if folded.len() != CHOICES || q.choices.iter().any(|c| c.trim().is_empty()) {
            return Err(format!("{}: choices not 5 distinct texts", q.id));
        }
        if q.answer_idx as usize >= CHOICES || q.question.trim().is_empty() {
            return Err(format!("{}: bad answer index or empty question", q.id));
        }
        if owner.get(q.id.as_str()) != Some(&q.cluster_id.as_str()) {
            return Err(format!("{}: not a member of {}", q.id, q.cluster_id));
        }
        if !q.cluster_id.ends_with(&format!(":{}", q.meta.concept)) {
            return Err(format!("{}: cluster/concept mismatch", q.id));
        }
        if !q.probe_type.is_isa() && q.meta.hops_k != 0 {
            return Err(format!("{}: hops_k on a non-ISA probe", q.id));
        }
        let split = q.meta.split;
        match cluster_split.insert(&q.cluster_id, split) {
            Some(prev) if prev != split => return Err(format!("cluster {} straddles splits", q.cluster_id)),
            _ => {}
        }
        match split {
            None => return Err(format!("{}: no split", q.id)),
            Some(Split::Inoculation) => inoculation += 1,
            Some(s) => {
                let mut d: Vec<String> = q.distractors().map(fold).collect();
                d.sort();
                if !keys.entry(s).or_default().insert((fold(q.gold()), d)) {
                    return Err(format!("{}: duplicate (gold, distractors) in {s}", q.id));
                }
            }
        }
    }
    if inoculation > inoculation_max {
        return Err(format!("inoculation split has {inoculation} questions"));
    }
    let members: usize = data.clusters.iter().map(|c| c.members.len()).sum();
    if members != data.questions.len() {
        return Err(format!("{members} cluster members for {} questions", data.questions.len()));
    }
    Ok(())
}

/// A hand-made question with fixed split and meta.
pub fn question(id: &str, concept: &str, choices: [&str; CHOICES], answer: u8, split: Split) -> ProbeQuestion {
    ProbeQuestion {
        id: id.into(),
        cluster_id: format!("definitions:{concept}"),
        probe_type: ProbeType::Definitions,
        question: format!("what is {concept}"),
        choices: choices.map(String::from),
        answer_idx: answer,
        meta: ProbeMeta {
            concept: cid(concept),
            hops_k: 0,
            distractor_strategy: Strategy::Random,
            distractor_k: 0,
            split: Some(split),
            backfill: Vec::new(),
        },
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic pseudo-random unit-scale vector for `word` (FNV-1a seeded
/// xorshift), so tests need no embedding file.
pub fn hashed_vector(word: &str, dim: usize) -> Vec<f32> {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in word.bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3);
    }
    (0..dim)
        .map(|_| {
            h ^= h << 13;
            h ^= h >> 7;
            h ^= h << 17;
            (h >> 40) as f32 / (1u64 << 24) as f32 * 2.0 - 1.0
        })
        .collect()
}

pub fn hashed_table<'a>(words: impl IntoIterator<Item = &'a str>, dim: usize) -> lexprobe_core::baselines::EmbeddingTable {
    let mut t = lexprobe_core::baselines::EmbeddingTable::new(dim);
    for w in words {
        t.insert(w, &hashed_vector(w, dim));
    }
    t
}
