//! Probe dataset compilation: gold question/answer generation, distractor
//! perturbations, semantic clusters and splits.

mod build;
mod distractors;
mod gen;
mod split;
pub mod templates;


use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kb::ConceptId;

pub use build::{build_dataset, BuildOutput, BuildReport, Compiler, ConceptOutput, Dataset, DraftQuestion};
pub use gen::GoldPair;
pub use split::{dedup_key, split_dataset, SplitCounts, INOCULATION_MAX};

/// Number of answer choices per question.
pub const CHOICES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("build produced no questions")]
    Empty,
    #[error("probe type {probe} needs {needs}")]
    Unsupported { probe: ProbeType, needs: &'static str },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeType {
    Definitions,
    Hypernymy,
    Hyponymy,
    Synonymy,
    Wordsense,
}

impl ProbeType {
    pub const ALL: [ProbeType; 5] =
        [ProbeType::Definitions, ProbeType::Hypernymy, ProbeType::Hyponymy, ProbeType::Synonymy, ProbeType::Wordsense];

    pub fn as_str(self) -> &'static str {
        match self {
            ProbeType::Definitions => "definitions",
            ProbeType::Hypernymy => "hypernymy",
            ProbeType::Hyponymy => "hyponymy",
            ProbeType::Synonymy => "synonymy",
            ProbeType::Wordsense => "wordsense",
        }
    }

    pub fn is_isa(self) -> bool {
        matches!(self, ProbeType::Hypernymy | ProbeType::Hyponymy)
    }
}

impl fmt::Display for ProbeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProbeType {
    type Err = BuildError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProbeType::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| BuildError::Config(alloc::format!("unknown probe type {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Random,
    Sister,
    Updown,
    Mixed,
    AltSense,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Sister => "sister",
            Strategy::Updown => "updown",
            Strategy::Mixed => "mixed",
            Strategy::AltSense => "alt_sense",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A distractor perturbation: a strategy and its graph distance `k′`
/// (ignored for `random` and `alt_sense`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StrategySpec {
    pub strategy: Strategy,
    pub k: u32,
}

impl StrategySpec {
    pub const RANDOM: StrategySpec = StrategySpec { strategy: Strategy::Random, k: 0 };
    pub const ALT_SENSE: StrategySpec = StrategySpec { strategy: Strategy::AltSense, k: 0 };

    pub fn sister(k: u32) -> Self {
        StrategySpec { strategy: Strategy::Sister, k }
    }

    pub fn updown(k: u32) -> Self {
        StrategySpec { strategy: Strategy::Updown, k }
    }

    pub fn mixed(k: u32) -> Self {
        StrategySpec { strategy: Strategy::Mixed, k }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.strategy {
            Strategy::Random | Strategy::AltSense => f.write_str(self.strategy.as_str()),
            s => write!(f, "{}:{}", s.as_str(), self.k),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = BuildError;
    /// `random`, `alt_sense`, `sister:2`, `updown:1`, `mixed:5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BuildError::Config(alloc::format!("bad distractor strategy {s:?}"));
        let (name, k) = match s.split_once(':') {
            Some((n, k)) => (n, Some(k.parse::<u32>().map_err(|_| bad())?)),
            None => (s, None),
        };
        let spec = match (name, k) {
            ("random", None) => StrategySpec::RANDOM,
            ("alt_sense", None) => StrategySpec::ALT_SENSE,
            ("sister", Some(k)) if k >= 1 => StrategySpec::sister(k),
            ("updown", Some(k)) if k >= 1 => StrategySpec::updown(k),
            ("mixed", Some(k)) if k >= 1 => StrategySpec::mixed(k),
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

impl TryFrom<String> for StrategySpec {
    type Error = BuildError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<StrategySpec> for String {
    fn from(value: StrategySpec) -> Self {
        alloc::format!("{value}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Inoculation,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Inoculation, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Inoculation => "inoculation",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeMeta {
    pub concept: ConceptId,
    pub hops_k: u32,
    pub distractor_strategy: Strategy,
    pub distractor_k: u32,
    /// `None` only between generation and split assignment.
    pub split: Option<Split>,
    /// Pools used to top up the distractors when the primary pool was short.
    #[serde(default)]
    pub backfill: Vec<Strategy>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeQuestion {
    pub id: String,
    pub cluster_id: String,
    pub probe_type: ProbeType,
    pub question: String,
    pub choices: [String; CHOICES],
    pub answer_idx: u8,
    pub meta: ProbeMeta,
}

impl ProbeQuestion {
    pub fn gold(&self) -> &str {
        &self.choices[self.answer_idx as usize]
    }

    pub fn distractors(&self) -> impl Iterator<Item = &str> {
        let gold = self.answer_idx as usize;
        self.choices.iter().enumerate().filter(move |(i, _)| *i != gold).map(|(_, c)| c.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticCluster {
    pub cluster_id: String,
    pub concept: ConceptId,
    pub probe_type: ProbeType,
    pub members: Vec<String>,
}

pub fn cluster_id(probe: ProbeType, concept: &ConceptId) -> String {
    alloc::format!("{probe}:{concept}")
}

/// Which example sentences of a concept are used as question contexts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Contexts {
    #[default]
    First,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildConfig {
    pub hop_limit: u32,
    pub sister_depth: u32,
    pub strategies: Vec<StrategySpec>,
    /// Template variants (0 is the canonical wording).
    pub templates: Vec<u8>,
    pub seed: u64,
    /// Cap on gold pairs per concept (after ordering by hop count).
    pub max_per_concept: Option<usize>,
    pub contexts: Contexts,
    /// Skip a context sentence when no lemma of the concept occurs in it.
    pub require_lemma_in_context: bool,
    /// Only concepts with at least this many lemmas (synonymy).
    pub min_lemmas: usize,
    /// Synonymy: only concepts that carry an example sentence.
    pub require_example: bool,
    /// Gloss truncation length for rendered answers, in characters.
    pub answer_chars: usize,
    pub inoculation_max: usize,
    pub dev_max: Option<usize>,
    /// Word-sense probe: only senses that carry an example sentence may serve
    /// as distractors.
    pub filter_distractors: bool,
    /// Word-sense probe: top up with random definitions when a word has too
    /// few alternative senses.
    pub random_fallback: bool,
    /// Word-sense probe: minimum number of senses (incl. the target) in the
    /// distractor-eligible pool for a word to be probed.
    pub min_senses: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            hop_limit: crate::taxonomy::DEFAULT_LIMIT,
            sister_depth: crate::taxonomy::DEFAULT_LIMIT,
            strategies: alloc::vec![StrategySpec::RANDOM],
            templates: alloc::vec![0],
            seed: 0,
            max_per_concept: None,
            contexts: Contexts::First,
            require_lemma_in_context: false,
            min_lemmas: 1,
            require_example: false,
            answer_chars: 120,
            inoculation_max: INOCULATION_MAX,
            dev_max: None,
            filter_distractors: true,
            random_fallback: true,
            min_senses: 1,
        }
    }
}

impl BuildConfig {
    /// Default configuration for a probe type.
    pub fn for_probe(probe: ProbeType, seed: u64) -> Self {
        let base = BuildConfig { seed, ..BuildConfig::default() };
        match probe {
            ProbeType::Definitions => BuildConfig {
                strategies: alloc::vec![
                    StrategySpec::RANDOM,
                    StrategySpec::sister(1),
                    StrategySpec::sister(2),
                    StrategySpec::updown(1),
                    StrategySpec::updown(2),
                ],
                contexts: Contexts::All,
                ..base
            },
            // capped at two evenly spaced targets per concept
            ProbeType::Hypernymy => BuildConfig {
                strategies: alloc::vec![StrategySpec::RANDOM, StrategySpec::mixed(1)],
                max_per_concept: Some(2),
                ..base
            },
            ProbeType::Hyponymy => BuildConfig {
                strategies: alloc::vec![
                    StrategySpec::RANDOM,
                    StrategySpec::sister(1),
                    StrategySpec::sister(2),
                    StrategySpec::updown(1),
                    StrategySpec::updown(2),
                ],
                max_per_concept: Some(2),
                ..base
            },
            ProbeType::Synonymy => BuildConfig {
                strategies: alloc::vec![
                    StrategySpec::RANDOM,
                    StrategySpec::sister(1),
                    StrategySpec::sister(2),
                    StrategySpec::updown(1),
                ],
                templates: alloc::vec![0, 1],
                min_lemmas: 2,
                require_example: true,
                ..base
            },
            ProbeType::Wordsense => BuildConfig {
                strategies: alloc::vec![StrategySpec::ALT_SENSE],
                // the target word plus at least two other senses with examples
                min_senses: 3,
                dev_max: Some(INOCULATION_MAX),
                ..base
            },
        }
    }

    pub fn validate(&self, probe: ProbeType) -> Result<(), BuildError> {
        let bad = |m: &str| Err(BuildError::Config(String::from(m)));
        if self.hop_limit < 1 || self.sister_depth < 1 {
            return bad("hop_limit and sister_depth must be at least 1");
        }
        if self.strategies.is_empty() {
            return bad("at least one distractor strategy is required");
        }
        if self.templates.is_empty() || self.templates.iter().any(|&t| t as usize >= templates::VARIANTS) {
            return bad("templates must be a non-empty list of known variants");
        }
        if self.answer_chars < 8 {
            return bad("answer_chars must be at least 8");
        }
        for s in &self.strategies {
            let ok = match probe {
                ProbeType::Wordsense => matches!(s.strategy, Strategy::AltSense | Strategy::Random),
                _ => s.strategy != Strategy::AltSense,
            };
            if !ok {
                return Err(BuildError::Config(alloc::format!("strategy {s} does not apply to {probe}")));
            }
        }
        Ok(())
    }
}
