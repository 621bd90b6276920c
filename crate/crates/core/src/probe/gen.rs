//! Gold question/answer pairs per concept.

use alloc::string::String;
use alloc::vec::Vec;

use super::{templates, BuildConfig, Contexts, ProbeType};
use crate::kb::{KnowledgeGraph, NodeIx, PartOfSpeech};
use crate::taxonomy::{hops_ix, Direction};
use crate::text::{surface_form, truncate_words};

/// One gold question with its answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldPair {
    pub question: String,
    pub gold: String,
    pub hops_k: u32,
    /// Concept rendered as the gold answer: the ISA target, or the probed
    /// concept itself.
    pub answer: NodeIx,
}

/// Why a concept produced no gold pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Skip {
    NoExample,
    NoDefinition,
    NoLemma,
    FewLemmas,
    NoTargets,
    NoContextMatch,
}

impl Skip {
    pub fn as_str(self) -> &'static str {
        match self {
            Skip::NoExample => "no_example",
            Skip::NoDefinition => "no_definition",
            Skip::NoLemma => "no_lemma",
            Skip::FewLemmas => "few_lemmas",
            Skip::NoTargets => "no_targets",
            Skip::NoContextMatch => "no_context_match",
        }
    }
}

/// Renders concept `x` in the answer shape of `probe`, or `None` when the
/// concept lacks the needed triples.
pub fn render_answer(g: &KnowledgeGraph, probe: ProbeType, x: NodeIx, chars: usize) -> Option<String> {
    match probe {
        ProbeType::Hypernymy | ProbeType::Hyponymy => {
            let lemma = g.display_lemma(x)?;
            let def = g.definitions(x).first()?;
            Some(templates::isa_answer(lemma, g.pos(x) == PartOfSpeech::Verb, &truncate_words(def, chars)))
        }
        ProbeType::Definitions | ProbeType::Wordsense => g.definitions(x).first().map(|d| truncate_words(d, chars)),
        ProbeType::Synonymy => {
            let lemmas = g.display_lemmas(x);
            (!lemmas.is_empty()).then(|| lemmas.join(", "))
        }
    }
}

/// Context sentences with the word as it appears in each.
fn contexts<'a>(g: &'a KnowledgeGraph, c: NodeIx, cfg: &BuildConfig) -> Result<Vec<(&'a str, String)>, Skip> {
    let examples = g.examples(c);
    if examples.is_empty() {
        return Err(Skip::NoExample);
    }
    let lemmas = g.display_lemmas(c);
    if lemmas.is_empty() {
        return Err(Skip::NoLemma);
    }
    let take = match cfg.contexts {
        Contexts::First => 1,
        Contexts::All => examples.len(),
    };
    let out: Vec<(&str, String)> = examples
        .iter()
        .take(take)
        .filter_map(|s| {
            let found = lemmas.iter().find_map(|l| surface_form(s, l));
            match found {
                Some(w) => Some((s.as_str(), String::from(w))),
                None if cfg.require_lemma_in_context => None,
                None => Some((s.as_str(), lemmas[0].clone())),
            }
        })
        .collect();
    if out.is_empty() {
        return Err(Skip::NoContextMatch);
    }
    Ok(out)
}

/// Enumerates the gold pairs of concept `c`.
pub fn gold_pairs(g: &KnowledgeGraph, c: NodeIx, probe: ProbeType, cfg: &BuildConfig) -> Result<Vec<GoldPair>, Skip> {
    let chars = cfg.answer_chars;
    let mut pairs = Vec::new();
    match probe {
        ProbeType::Definitions | ProbeType::Wordsense => {
            let gold = render_answer(g, probe, c, chars).ok_or(Skip::NoDefinition)?;
            for (s, w) in contexts(g, c, cfg)? {
                for &v in &cfg.templates {
                    pairs.push(GoldPair { question: templates::definitions(v, s, &w), gold: gold.clone(), hops_k: 0, answer: c });
                }
            }
        }
        ProbeType::Hypernymy | ProbeType::Hyponymy => {
            let dir = if probe == ProbeType::Hypernymy { Direction::Up } else { Direction::Down };
            let mut targets: Vec<(u32, NodeIx)> =
                hops_ix(g, c, dir, cfg.hop_limit).into_iter().map(|(n, k)| (k, n)).collect();
            if targets.is_empty() {
                return Err(Skip::NoTargets);
            }
            targets.sort();
            let ctx = contexts(g, c, cfg)?;
            for (k, t) in targets {
                let Some(gold) = render_answer(g, probe, t, chars) else {
                    continue;
                };
                for (s, w) in &ctx {
                    for &v in &cfg.templates {
                        pairs.push(GoldPair {
                            question: templates::contextual(probe, v, s, w),
                            gold: gold.clone(),
                            hops_k: k,
                            answer: t,
                        });
                    }
                }
            }
            if pairs.is_empty() {
                return Err(Skip::NoTargets);
            }
        }
        ProbeType::Synonymy => {
            let lemmas = g.display_lemmas(c);
            if lemmas.is_empty() {
                return Err(Skip::NoLemma);
            }
            if lemmas.len() < cfg.min_lemmas {
                return Err(Skip::FewLemmas);
            }
            if cfg.require_example && g.examples(c).is_empty() {
                return Err(Skip::NoExample);
            }
            let def = g.definitions(c).first().ok_or(Skip::NoDefinition)?;
            let gold = lemmas.join(", ");
            for &v in &cfg.templates {
                pairs.push(GoldPair { question: templates::synonymy(v, def), gold: gold.clone(), hops_k: 0, answer: c });
            }
        }
    }
    if let Some(cap) = cfg.max_per_concept {
        pairs = spread(pairs, cap);
    }
    Ok(pairs)
}

/// Keeps `cap` evenly spaced items so a capped ISA cluster still spans
/// several hop depths.
fn spread<T>(items: Vec<T>, cap: usize) -> Vec<T> {
    let n = items.len();
    if n <= cap {
        return items;
    }
    let mut keep = (0..cap).map(|i| i * n / cap).peekable();
    items
        .into_iter()
        .enumerate()
        .filter_map(|(j, x)| {
            if keep.peek() == Some(&j) {
                keep.next();
                Some(x)
            } else {
                None
            }
        })
        .collect()
}
