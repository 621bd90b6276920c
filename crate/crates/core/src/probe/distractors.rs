//! Distractor assembly for one concept.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::gen::render_answer;
use super::{BuildConfig, ProbeType, Strategy, StrategySpec, CHOICES};
use crate::kb::{KnowledgeGraph, NodeIx, PartOfSpeech};
use crate::rng::Stream;
use crate::taxonomy::{hops_ix, sister_family_ix, Direction};
use crate::text::fold;

const NEED: usize = CHOICES - 1;
const RANDOM_TRIES: usize = 48;

/// Graph-wide pools shared by every concept.
#[derive(Debug, Default)]
pub(super) struct Pools {
    /// Renderable concepts per part of speech, for random draws.
    pub random: BTreeMap<PartOfSpeech, Vec<NodeIx>>,
    /// Concepts per case-folded lemma.
    pub by_lemma: BTreeMap<String, Vec<NodeIx>>,
}

impl Pools {
    pub fn new(g: &KnowledgeGraph, probe: ProbeType, cfg: &BuildConfig) -> Pools {
        let mut pools = Pools::default();
        for ix in g.indices() {
            for l in g.lemmas(ix) {
                pools.by_lemma.entry(fold(l)).or_default().push(ix);
            }
            let eligible = render_answer(g, probe, ix, cfg.answer_chars).is_some()
                && (probe != ProbeType::Wordsense || !cfg.filter_distractors || !g.examples(ix).is_empty());
            if eligible {
                pools.random.entry(g.pos(ix)).or_default().push(ix);
            }
        }
        for v in pools.by_lemma.values_mut() {
            v.dedup();
        }
        pools
    }
}

/// Neighbourhood of one probed concept.
#[derive(Debug)]
pub(super) struct Neighbourhood {
    c: NodeIx,
    sisters: BTreeMap<NodeIx, u32>,
    updown: BTreeMap<NodeIx, u32>,
    /// Never usable as a distractor (the concept and every correct answer).
    excluded: BTreeSet<NodeIx>,
    /// Also kept out of random draws.
    related: BTreeSet<NodeIx>,
    /// Same-word alternative senses (word-sense probe).
    senses: Vec<NodeIx>,
}

impl Neighbourhood {
    pub fn new(g: &KnowledgeGraph, pools: &Pools, c: NodeIx, probe: ProbeType, cfg: &BuildConfig) -> Neighbourhood {
        let mut excluded = BTreeSet::from([c]);
        let mut related = BTreeSet::new();
        let mut sisters = BTreeMap::new();
        let mut updown = BTreeMap::new();
        let mut senses = Vec::new();
        if probe == ProbeType::Wordsense {
            let pos = g.pos(c);
            let words: BTreeSet<String> = g.lemmas(c).iter().map(|l| fold(l)).collect();
            for w in &words {
                for &x in pools.by_lemma.get(w).into_iter().flatten() {
                    let filtered = cfg.filter_distractors && g.examples(x).is_empty();
                    if x != c && g.pos(x) == pos && !filtered && !senses.contains(&x) {
                        senses.push(x);
                    }
                }
            }
            senses.sort();
            related.extend(senses.iter().copied());
        } else {
            let up = hops_ix(g, c, Direction::Up, u32::MAX);
            let down = hops_ix(g, c, Direction::Down, u32::MAX);
            let limited = |m: &BTreeMap<NodeIx, u32>| -> BTreeMap<NodeIx, u32> {
                m.iter().filter(|(_, &k)| k <= cfg.hop_limit).map(|(&n, &k)| (n, k)).collect()
            };
            updown = match probe {
                ProbeType::Hypernymy => limited(&down),
                ProbeType::Hyponymy => limited(&up),
                _ => {
                    let mut both = limited(&up);
                    for (n, k) in limited(&down) {
                        both.entry(n).and_modify(|o| *o = (*o).min(k)).or_insert(k);
                    }
                    both
                }
            };
            sisters = sister_family_ix(g, c, sister_depth(cfg));
            match probe {
                ProbeType::Hypernymy => excluded.extend(up.keys().copied()),
                ProbeType::Hyponymy => excluded.extend(down.keys().copied()),
                _ => {}
            }
            related.extend(up.keys().copied());
            related.extend(down.keys().copied());
            related.extend(sisters.keys().copied());
            if probe == ProbeType::Synonymy {
                // sharing a word with the gold would make a distractor partly correct
                for l in g.lemmas(c) {
                    excluded.extend(pools.by_lemma.get(&fold(l)).into_iter().flatten().copied());
                }
            }
        }
        Neighbourhood { c, sisters, updown, excluded, related, senses }
    }

    pub fn sense_count(&self) -> usize {
        self.senses.len()
    }

    /// Whether `spec` yields a perturbation for this concept.
    pub fn applies(&self, spec: StrategySpec) -> bool {
        match spec.strategy {
            Strategy::Random | Strategy::AltSense => true,
            Strategy::Sister => self.sisters.values().any(|&k| k == spec.k),
            Strategy::Updown => self.updown.values().any(|&k| k == spec.k),
            Strategy::Mixed => self.sisters.values().chain(self.updown.values()).any(|&k| k <= spec.k),
        }
    }
}

/// Sister-family depth actually needed by the configured strategies.
fn sister_depth(cfg: &BuildConfig) -> u32 {
    let wanted = cfg
        .strategies
        .iter()
        .filter(|s| matches!(s.strategy, Strategy::Sister | Strategy::Mixed))
        .map(|s| s.k)
        .max()
        .unwrap_or(1);
    wanted.clamp(1, cfg.sister_depth)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Outcome {
    Picked { distractors: Vec<String>, backfill: Vec<Strategy> },
    Inapplicable,
    Exhausted,
}

struct Draft<'a> {
    g: &'a KnowledgeGraph,
    probe: ProbeType,
    chars: usize,
    n: &'a Neighbourhood,
    skip: BTreeSet<NodeIx>,
    seen: BTreeSet<String>,
    out: Vec<String>,
}

impl Draft<'_> {
    fn full(&self) -> bool {
        self.out.len() >= NEED
    }

    fn try_add(&mut self, x: NodeIx) -> bool {
        if self.full() || self.n.excluded.contains(&x) || !self.skip.insert(x) {
            return false;
        }
        let Some(text) = render_answer(self.g, self.probe, x, self.chars) else {
            return false;
        };
        if !self.seen.insert(fold(&text)) {
            return false;
        }
        self.out.push(text);
        true
    }

    fn take_shuffled(&mut self, pool: impl IntoIterator<Item = NodeIx>, rng: &mut Stream) -> usize {
        let mut pool: Vec<NodeIx> = pool.into_iter().collect();
        pool.shuffle(rng);
        let before = self.out.len();
        for x in pool {
            if self.full() {
                break;
            }
            self.try_add(x);
        }
        self.out.len() - before
    }

    fn take_random(&mut self, pools: &Pools, rng: &mut Stream) -> usize {
        let Some(pool) = pools.random.get(&self.g.pos(self.n.c)) else {
            return 0;
        };
        if pool.is_empty() {
            return 0;
        }
        let before = self.out.len();
        let usable = |x: &NodeIx| !self.n.related.contains(x);
        for _ in 0..RANDOM_TRIES {
            if self.full() {
                break;
            }
            let x = pool[rng.random_range(0..pool.len())];
            if usable(&x) {
                self.try_add(x);
            }
        }
        if !self.full() {
            // small graphs: deterministic scan from a random offset
            let start = rng.random_range(0..pool.len());
            for i in 0..pool.len() {
                if self.full() {
                    break;
                }
                let x = pool[(start + i) % pool.len()];
                if usable(&x) {
                    self.try_add(x);
                }
            }
        }
        self.out.len() - before
    }
}

/// Draws four distractors for one gold answer.
#[allow(clippy::too_many_arguments)]
pub(super) fn pick(
    g: &KnowledgeGraph,
    pools: &Pools,
    n: &Neighbourhood,
    probe: ProbeType,
    cfg: &BuildConfig,
    spec: StrategySpec,
    gold: &str,
    answer: NodeIx,
    rng: &mut Stream,
) -> Outcome {
    if !n.applies(spec) {
        return Outcome::Inapplicable;
    }
    let mut d = Draft {
        g,
        probe,
        chars: cfg.answer_chars,
        n,
        skip: BTreeSet::from([answer]),
        seen: BTreeSet::from([fold(gold)]),
        out: Vec::with_capacity(NEED),
    };
    let within = |m: &BTreeMap<NodeIx, u32>, k: u32| -> Vec<NodeIx> {
        m.iter().filter(|(_, &l)| l <= k).map(|(&x, _)| x).collect()
    };
    let exact = |m: &BTreeMap<NodeIx, u32>, k: u32| -> Vec<NodeIx> {
        m.iter().filter(|(_, &l)| l == k).map(|(&x, _)| x).collect()
    };
    match spec.strategy {
        Strategy::Sister | Strategy::Updown => {
            let family = if spec.strategy == Strategy::Sister { &n.sisters } else { &n.updown };
            // one distractor at exactly k′ fixes the perturbation's distance
            if d.take_shuffled_one(exact(family, spec.k), rng) == 0 {
                return Outcome::Inapplicable;
            }
            d.take_shuffled(within(family, spec.k), rng);
        }
        Strategy::Mixed => {
            let mut pool = within(&n.sisters, spec.k);
            pool.extend(within(&n.updown, spec.k));
            pool.sort();
            pool.dedup();
            d.take_shuffled(pool, rng);
        }
        Strategy::Random => {
            d.take_random(pools, rng);
        }
        Strategy::AltSense => {
            d.take_shuffled(n.senses.iter().copied(), rng);
        }
    }
    let mut backfill = Vec::new();
    let order: &[Strategy] = match spec.strategy {
        Strategy::Random => &[],
        Strategy::AltSense if cfg.random_fallback => &[Strategy::Random],
        Strategy::AltSense => &[],
        _ => &[Strategy::Sister, Strategy::Updown, Strategy::Random],
    };
    for &s in order {
        if d.full() {
            break;
        }
        let added = match s {
            Strategy::Sister => d.take_shuffled(n.sisters.keys().copied().collect::<Vec<_>>(), rng),
            Strategy::Updown => d.take_shuffled(n.updown.keys().copied().collect::<Vec<_>>(), rng),
            _ => d.take_random(pools, rng),
        };
        if added > 0 {
            backfill.push(s);
        }
    }
    if !d.full() {
        return Outcome::Exhausted;
    }
    Outcome::Picked { distractors: d.out, backfill }
}

impl Draft<'_> {
    fn take_shuffled_one(&mut self, mut pool: Vec<NodeIx>, rng: &mut Stream) -> usize {
        pool.shuffle(rng);
        pool.into_iter().any(|x| self.try_add(x)) as usize
    }
}
