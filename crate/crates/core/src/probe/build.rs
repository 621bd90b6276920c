//! Dataset compilation: gold pairs × perturbations, ids, clusters, splits.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::Serialize;

use super::distractors::{pick, Neighbourhood, Outcome, Pools};
use super::gen::gold_pairs;
use super::split::{split_dataset, SplitCounts};
use super::{cluster_id, BuildConfig, BuildError, ProbeMeta, ProbeQuestion, ProbeType, SemanticCluster, Strategy, CHOICES};
use crate::kb::{KnowledgeGraph, NodeIx, Relation};
use crate::rng;

/// A question before ids and splits are assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DraftQuestion {
    pub question: String,
    pub choices: [String; CHOICES],
    pub answer_idx: u8,
    pub hops_k: u32,
    pub strategy: Strategy,
    pub distractor_k: u32,
    pub backfill: Vec<Strategy>,
}

/// Everything one concept contributes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptOutput {
    pub concept: Option<NodeIx>,
    pub questions: Vec<DraftQuestion>,
    pub unique_pairs: usize,
    pub skipped: Option<&'static str>,
    pub inapplicable: usize,
    pub exhausted: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BuildReport {
    pub probe_type: Option<ProbeType>,
    pub concepts_considered: usize,
    /// Concepts with at least one emitted question.
    pub concepts: usize,
    /// Gold pairs with at least one emitted question.
    pub unique_pairs: usize,
    /// All generated questions before split de-duplication.
    pub perturbed: usize,
    pub skipped: BTreeMap<String, usize>,
    pub inapplicable_perturbations: usize,
    pub exhausted_pools: usize,
    pub backfilled: usize,
    pub by_strategy: BTreeMap<String, usize>,
    pub split: SplitCounts,
    /// Questions written after de-duplication.
    pub emitted: usize,
    pub clusters: usize,
    pub avg_cluster_size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub questions: Vec<ProbeQuestion>,
    pub clusters: Vec<SemanticCluster>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildOutput {
    pub dataset: Dataset,
    pub report: BuildReport,
}

/// Per-probe compiler over a frozen graph. [`Compiler::compile_concept`] is
/// pure, so callers may run it in any order or in parallel and feed the
/// results to [`Compiler::assemble`].
pub struct Compiler<'g> {
    g: &'g KnowledgeGraph,
    probe: ProbeType,
    cfg: BuildConfig,
    pools: Pools,
}

impl<'g> Compiler<'g> {
    pub fn new(g: &'g KnowledgeGraph, probe: ProbeType, cfg: BuildConfig) -> Result<Self, BuildError> {
        cfg.validate(probe)?;
        let has_isa = g.count(Relation::IsaUp) > 0;
        if probe.is_isa() && !has_isa {
            return Err(BuildError::Unsupported { probe, needs: "a graph with ISA edges" });
        }
        if probe == ProbeType::Wordsense && has_isa {
            return Err(BuildError::Unsupported { probe, needs: "a lexicon graph without ISA edges" });
        }
        let pools = Pools::new(g, probe, &cfg);
        Ok(Compiler { g, probe, cfg, pools })
    }

    pub fn graph(&self) -> &'g KnowledgeGraph {
        self.g
    }

    pub fn config(&self) -> &BuildConfig {
        &self.cfg
    }

    pub fn concepts(&self) -> Vec<NodeIx> {
        self.g.indices().collect()
    }

    pub fn compile_concept(&self, c: NodeIx) -> ConceptOutput {
        let (g, probe, cfg) = (self.g, self.probe, &self.cfg);
        let mut out = ConceptOutput { concept: Some(c), ..ConceptOutput::default() };
        let pairs = match gold_pairs(g, c, probe, cfg) {
            Ok(p) => p,
            Err(skip) => {
                out.skipped = Some(skip.as_str());
                return out;
            }
        };
        let n = Neighbourhood::new(g, &self.pools, c, probe, cfg);
        if probe == ProbeType::Wordsense && n.sense_count() + 1 < cfg.min_senses {
            out.skipped = Some("few_senses");
            return out;
        }
        let mut stream = rng::derived(cfg.seed, &[probe.as_str(), g.id(c).as_str()]);
        for pair in pairs {
            let mut emitted = false;
            for &spec in &cfg.strategies {
                match pick(g, &self.pools, &n, probe, cfg, spec, &pair.gold, pair.answer, &mut stream) {
                    Outcome::Inapplicable => out.inapplicable += 1,
                    Outcome::Exhausted => out.exhausted += 1,
                    Outcome::Picked { distractors, backfill } => {
                        let answer_idx = stream.random_range(0..CHOICES);
                        let mut rest = distractors.into_iter();
                        let choices: [String; CHOICES] = core::array::from_fn(|i| {
                            if i == answer_idx {
                                pair.gold.clone()
                            } else {
                                rest.next().expect("four distractors")
                            }
                        });
                        out.questions.push(DraftQuestion {
                            question: pair.question.clone(),
                            choices,
                            answer_idx: answer_idx as u8,
                            hops_k: pair.hops_k,
                            strategy: spec.strategy,
                            distractor_k: spec.k,
                            backfill,
                        });
                        emitted = true;
                    }
                }
            }
            out.unique_pairs += usize::from(emitted);
        }
        out
    }

    /// Orders per-concept outputs, assigns ids, clusters and splits.
    pub fn assemble(&self, mut outputs: Vec<ConceptOutput>) -> Result<BuildOutput, BuildError> {
        outputs.sort_by_key(|o| o.concept);
        let probe = self.probe;
        let mut report = BuildReport { probe_type: Some(probe), ..BuildReport::default() };
        let mut questions = Vec::new();
        let mut clusters = Vec::new();
        for o in outputs {
            report.concepts_considered += 1;
            if let Some(s) = o.skipped {
                *report.skipped.entry(String::from(s)).or_default() += 1;
            }
            report.inapplicable_perturbations += o.inapplicable;
            report.exhausted_pools += o.exhausted;
            if o.questions.is_empty() {
                continue;
            }
            let Some(c) = o.concept else { continue };
            let concept = self.g.id(c).clone();
            report.concepts += 1;
            report.unique_pairs += o.unique_pairs;
            let cid = cluster_id(probe, &concept);
            let mut members = Vec::with_capacity(o.questions.len());
            for q in o.questions {
                let id = format!("{probe}-{:06}", questions.len());
                report.perturbed += 1;
                report.backfilled += usize::from(!q.backfill.is_empty());
                *report.by_strategy.entry(String::from(q.strategy.as_str())).or_default() += 1;
                members.push(id.clone());
                questions.push(ProbeQuestion {
                    id,
                    cluster_id: cid.clone(),
                    probe_type: probe,
                    question: q.question,
                    choices: q.choices,
                    answer_idx: q.answer_idx,
                    meta: ProbeMeta {
                        concept: concept.clone(),
                        hops_k: q.hops_k,
                        distractor_strategy: q.strategy,
                        distractor_k: q.distractor_k,
                        split: None,
                        backfill: q.backfill,
                    },
                });
            }
            clusters.push(SemanticCluster { cluster_id: cid, concept, probe_type: probe, members });
        }
        if questions.is_empty() {
            return Err(BuildError::Empty);
        }
        let mut dataset = Dataset { questions, clusters };
        report.split = split_dataset(&mut dataset, &self.cfg);
        report.emitted = dataset.questions.len();
        report.clusters = dataset.clusters.len();
        report.avg_cluster_size =
            if report.clusters == 0 { 0.0 } else { report.emitted as f64 / report.clusters as f64 };
        Ok(BuildOutput { dataset, report })
    }
}

/// Sequential build.
pub fn build_dataset(g: &KnowledgeGraph, probe: ProbeType, cfg: BuildConfig) -> Result<BuildOutput, BuildError> {
    let compiler = Compiler::new(g, probe, cfg)?;
    let outputs = compiler.concepts().into_iter().map(|c| compiler.compile_concept(c)).collect();
    compiler.assemble(outputs)
}
