//! Parallel dataset builds and their manifests.

use rayon::prelude::*;
use serde::Serialize;

use lexprobe_core::probe::{BuildConfig, BuildOutput, BuildReport, Compiler, ProbeType};
use lexprobe_core::KnowledgeGraph;

use crate::error::Result;

/// Builds across worker threads. Each concept draws from its own seeded
/// stream, so the output equals the sequential build byte for byte.
pub fn build_parallel(g: &KnowledgeGraph, probe: ProbeType, cfg: BuildConfig) -> Result<BuildOutput> {
    let compiler = Compiler::new(g, probe, cfg)?;
    let outputs = compiler.concepts().into_par_iter().map(|c| compiler.compile_concept(c)).collect();
    Ok(compiler.assemble(outputs)?)
}

/// Published dataset sizes used as a scale reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceCounts {
    pub unique: Option<usize>,
    pub perturbed: Option<usize>,
    pub concepts: usize,
    pub avg_cluster_size: f64,
}

pub fn reference_counts(probe: ProbeType) -> ReferenceCounts {
    let r = |unique, perturbed, concepts, avg| ReferenceCounts { unique, perturbed, concepts, avg_cluster_size: avg };
    match probe {
        ProbeType::Hypernymy => r(Some(19_705), Some(35_094), 7_849, 5.0),
        ProbeType::Hyponymy => r(Some(6_697), Some(35_243), 3_452, 11.0),
        ProbeType::Synonymy => r(Some(28_254), Some(91_069), 15_632, 6.0),
        ProbeType::Definitions => r(Some(31_380), Some(148_662), 15_159, 10.0),
        ProbeType::Wordsense => r(Some(7_000), None, 7_000, 1.0),
    }
}

/// Observed / reference ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceRatios {
    pub unique: Option<f64>,
    pub perturbed: Option<f64>,
    pub concepts: f64,
    pub avg_cluster_size: f64,
}

impl ReferenceRatios {
    /// Whether every available ratio lies within `[1/f, f]`.
    pub fn within_factor(&self, f: f64) -> bool {
        let ok = |x: f64| x >= 1.0 / f && x <= f;
        self.unique.is_none_or(ok) && self.perturbed.is_none_or(ok) && ok(self.concepts)
    }
}

pub fn ratios(report: &BuildReport, reference: &ReferenceCounts) -> ReferenceRatios {
    let div = |a: usize, b: usize| a as f64 / b as f64;
    // the word-sense reference is a question count
    let unique = match report.probe_type {
        Some(ProbeType::Wordsense) => report.emitted,
        _ => report.unique_pairs,
    };
    ReferenceRatios {
        unique: reference.unique.map(|r| div(unique, r)),
        perturbed: reference.perturbed.map(|r| div(report.perturbed, r)),
        concepts: div(report.concepts, reference.concepts),
        avg_cluster_size: report.avg_cluster_size / reference.avg_cluster_size,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub probe_type: ProbeType,
    pub seed: u64,
    pub graph: String,
    pub config: BuildConfig,
    pub counts: BuildReport,
    pub reference: ReferenceCounts,
    pub reference_ratio: ReferenceRatios,
}

impl Manifest {
    pub fn new(probe: ProbeType, graph: String, config: BuildConfig, counts: BuildReport) -> Self {
        let reference = reference_counts(probe);
        let reference_ratio = ratios(&counts, &reference);
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            probe_type: probe,
            seed: config.seed,
            graph,
            config,
            counts,
            reference,
            reference_ratio,
        }
    }
}
