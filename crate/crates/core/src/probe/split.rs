//! Cluster-level inoculation/dev/test split with de-duplication.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::Serialize;

use super::build::Dataset;
use super::{BuildConfig, ProbeQuestion, Split};
use crate::rng;
use crate::text::fold;

/// Upper bound on inoculation questions.
pub const INOCULATION_MAX: usize = 3000;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SplitCounts {
    pub inoculation: usize,
    pub dev: usize,
    pub test: usize,
    /// Questions dropped from dev/test as duplicates.
    pub deduplicated: usize,
}

/// Identity of a question for de-duplication: folded gold text and the
/// sorted folded distractors.
pub fn dedup_key(q: &ProbeQuestion) -> (String, Vec<String>) {
    let mut distractors: Vec<String> = q.distractors().map(fold).collect();
    distractors.sort();
    (fold(q.gold()), distractors)
}

/// Assigns every cluster to one split, de-duplicates dev and test, and
/// drops clusters left empty.
pub fn split_dataset(data: &mut Dataset, cfg: &BuildConfig) -> SplitCounts {
    let probe = data.questions.first().map_or("", |q| q.probe_type.as_str());
    let mut order: Vec<usize> = (0..data.clusters.len()).collect();
    order.shuffle(&mut rng::derived(cfg.seed, &["split", probe]));

    let mut assignment = alloc::vec![Split::Test; data.clusters.len()];
    let mut iter = order.into_iter().peekable();
    let mut inoc = 0;
    while let Some(&c) = iter.peek() {
        let size = data.clusters[c].members.len();
        if inoc + size > cfg.inoculation_max {
            break;
        }
        inoc += size;
        assignment[c] = Split::Inoculation;
        iter.next();
    }
    let rest: Vec<usize> = iter.collect();
    let remaining: usize = rest.iter().map(|&c| data.clusters[c].members.len()).sum();
    let dev_target = cfg.dev_max.unwrap_or(remaining / 2).min(remaining);
    let mut dev = 0;
    for &c in &rest {
        let size = data.clusters[c].members.len();
        if dev + size > dev_target {
            break;
        }
        dev += size;
        assignment[c] = Split::Dev;
    }

    let by_cluster: BTreeMap<&str, Split> =
        data.clusters.iter().zip(&assignment).map(|(c, &s)| (c.cluster_id.as_str(), s)).collect();
    let mut seen: BTreeMap<Split, BTreeSet<(String, Vec<String>)>> = BTreeMap::new();
    let mut dropped: BTreeSet<String> = BTreeSet::new();
    let mut counts = SplitCounts::default();
    for q in &mut data.questions {
        let split = by_cluster[q.cluster_id.as_str()];
        q.meta.split = Some(split);
        if split != Split::Inoculation && !seen.entry(split).or_default().insert(dedup_key(q)) {
            dropped.insert(q.id.clone());
            counts.deduplicated += 1;
            continue;
        }
        match split {
            Split::Inoculation => counts.inoculation += 1,
            Split::Dev => counts.dev += 1,
            Split::Test => counts.test += 1,
        }
    }
    if !dropped.is_empty() {
        data.questions.retain(|q| !dropped.contains(&q.id));
        for c in &mut data.clusters {
            c.members.retain(|m| !dropped.contains(m));
        }
        data.clusters.retain(|c| !c.members.is_empty());
    }
    counts
}
