//! Scoring of external predictions and inoculation bookkeeping.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::probe::{ProbeQuestion, SemanticCluster, Strategy, CHOICES, INOCULATION_MAX};
use crate::rng;

/// Cells with fewer questions than this are flagged in breakdowns.
pub const LOW_SUPPORT: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("prediction ids do not match probe ids ({} missing, {} duplicate, {} unknown)", .missing.len(), .duplicate.len(), .unknown.len())]
    IdMismatch { missing: Vec<String>, duplicate: Vec<String>, unknown: Vec<String> },
    #[error("prediction {0}: {1}")]
    BadPrediction(String, &'static str),
    #[error("question {0} belongs to no cluster")]
    Unclustered(String),
    #[error("{pool} pool has {have} items, {need} needed")]
    PoolExhausted { pool: &'static str, have: usize, need: usize },
}

impl EvalError {
    /// Offending ids for an id mismatch, missing first.
    pub fn offenders(&self) -> Vec<&str> {
        match self {
            EvalError::IdMismatch { missing, duplicate, unknown } => {
                missing.iter().chain(duplicate).chain(unknown).map(String::as_str).collect()
            }
            EvalError::BadPrediction(id, _) | EvalError::Unclustered(id) => alloc::vec![id.as_str()],
            EvalError::PoolExhausted { .. } => Vec::new(),
        }
    }
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<[f64; CHOICES]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred_idx: Option<u8>,
}

impl PredictionRecord {
    pub fn from_scores(id: impl Into<String>, scores: [f64; CHOICES]) -> Self {
        PredictionRecord { id: id.into(), scores: Some(scores), pred_idx: None }
    }

    pub fn from_index(id: impl Into<String>, idx: u8) -> Self {
        PredictionRecord { id: id.into(), scores: None, pred_idx: Some(idx) }
    }

    /// The predicted choice.
    pub fn predicted(&self) -> Result<usize, EvalError> {
        match (&self.scores, self.pred_idx) {
            (Some(s), None) => {
                if s.iter().all(|x| x.is_finite()) {
                    Ok(argmax(s))
                } else {
                    Err(EvalError::BadPrediction(self.id.clone(), "non-finite score"))
                }
            }
            (None, Some(i)) if (i as usize) < CHOICES => Ok(i as usize),
            (None, Some(_)) => Err(EvalError::BadPrediction(self.id.clone(), "pred_idx out of range")),
            _ => Err(EvalError::BadPrediction(self.id.clone(), "exactly one of scores or pred_idx required")),
        }
    }
}

/// Per-question correctness, in probe order. Every probe id needs exactly
/// one prediction and every prediction must name a probe.
pub fn correctness(probes: &[ProbeQuestion], preds: &[PredictionRecord]) -> Result<Vec<bool>, EvalError> {
    let mut by_id: BTreeMap<&str, &PredictionRecord> = BTreeMap::new();
    let mut duplicate = BTreeSet::new();
    for p in preds {
        if by_id.insert(p.id.as_str(), p).is_some() {
            duplicate.insert(p.id.clone());
        }
    }
    let known: BTreeSet<&str> = probes.iter().map(|q| q.id.as_str()).collect();
    let missing: Vec<String> = probes.iter().filter(|q| !by_id.contains_key(q.id.as_str())).map(|q| q.id.clone()).collect();
    let unknown: Vec<String> = by_id.keys().filter(|id| !known.contains(*id)).map(|id| String::from(*id)).collect();
    if !missing.is_empty() || !duplicate.is_empty() || !unknown.is_empty() {
        return Err(EvalError::IdMismatch { missing, duplicate: duplicate.into_iter().collect(), unknown });
    }
    probes.iter().map(|q| Ok(by_id[q.id.as_str()].predicted()? == q.answer_idx as usize)).collect()
}

fn fraction(hits: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        hits as f64 / n as f64
    }
}

pub fn instance_accuracy(probes: &[ProbeQuestion], preds: &[PredictionRecord]) -> Result<f64, EvalError> {
    let ok = correctness(probes, preds)?;
    Ok(fraction(ok.iter().filter(|&&b| b).count(), ok.len()))
}

/// Fraction of clusters whose members are all answered correctly.
pub fn cluster_accuracy(
    probes: &[ProbeQuestion],
    clusters: &[SemanticCluster],
    preds: &[PredictionRecord],
) -> Result<f64, EvalError> {
    let ok = correctness(probes, preds)?;
    cluster_accuracy_from(probes, clusters, &ok)
}

fn cluster_accuracy_from(probes: &[ProbeQuestion], clusters: &[SemanticCluster], ok: &[bool]) -> Result<f64, EvalError> {
    let by_id: BTreeMap<&str, bool> = probes.iter().zip(ok).map(|(q, &b)| (q.id.as_str(), b)).collect();
    let mut clustered = BTreeSet::new();
    let mut hits = 0;
    let mut total = 0;
    for c in clusters {
        let members: Vec<bool> = c.members.iter().filter_map(|m| by_id.get(m.as_str()).copied()).collect();
        clustered.extend(c.members.iter().map(String::as_str));
        if members.is_empty() {
            continue;
        }
        total += 1;
        hits += usize::from(members.iter().all(|&b| b));
    }
    if let Some(q) = probes.iter().find(|q| !clustered.contains(q.id.as_str())) {
        return Err(EvalError::Unclustered(q.id.clone()));
    }
    Ok(fraction(hits, total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub hops_k: u32,
    pub strategy: Strategy,
    pub distractor_k: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    #[serde(flatten)]
    pub key: CellKey,
    pub support: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub low_support: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Marginal {
    pub label: String,
    pub support: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Accuracy by (hops_k, distractor strategy, distractor k′), with row
/// (hops) and column (distractor) marginals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Breakdown {
    pub cells: Vec<Cell>,
    pub rows: Vec<Marginal>,
    pub columns: Vec<Marginal>,
    pub overall: Marginal,
}

fn column_label(strategy: Strategy, k: u32) -> String {
    match strategy {
        Strategy::Random | Strategy::AltSense => String::from(strategy.as_str()),
        s => format!("{}:{k}", s.as_str()),
    }
}

pub fn breakdown_from(probes: &[ProbeQuestion], ok: &[bool]) -> Breakdown {
    let mut cells: BTreeMap<CellKey, (usize, usize)> = BTreeMap::new();
    for (q, &b) in probes.iter().zip(ok) {
        let key = CellKey { hops_k: q.meta.hops_k, strategy: q.meta.distractor_strategy, distractor_k: q.meta.distractor_k };
        let e = cells.entry(key).or_default();
        e.0 += 1;
        e.1 += usize::from(b);
    }
    let mut rows: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    let mut cols: BTreeMap<(Strategy, u32), (usize, usize)> = BTreeMap::new();
    for (k, &(n, c)) in &cells {
        let r = rows.entry(k.hops_k).or_default();
        r.0 += n;
        r.1 += c;
        let col = cols.entry((k.strategy, k.distractor_k)).or_default();
        col.0 += n;
        col.1 += c;
    }
    let marginal = |label: String, (n, c): (usize, usize)| Marginal { label, support: n, correct: c, accuracy: fraction(c, n) };
    let total = (ok.len(), ok.iter().filter(|&&b| b).count());
    Breakdown {
        cells: cells
            .into_iter()
            .map(|(key, (n, c))| Cell { key, support: n, correct: c, accuracy: fraction(c, n), low_support: n < LOW_SUPPORT })
            .collect(),
        rows: rows.into_iter().map(|(k, v)| marginal(format!("k={k}"), v)).collect(),
        columns: cols.into_iter().map(|((s, k), v)| marginal(column_label(s, k), v)).collect(),
        overall: marginal(String::from("all"), total),
    }
}

pub fn breakdown(probes: &[ProbeQuestion], preds: &[PredictionRecord]) -> Result<Breakdown, EvalError> {
    Ok(breakdown_from(probes, &correctness(probes, preds)?))
}

impl Breakdown {
    /// Heat-map table: one row per hops count, one column per distractor
    /// setting, cells as accuracy (`*` marks low support).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("hops_k,strategy,distractor_k,support,correct,accuracy,low_support\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.4},{}",
                c.key.hops_k, c.key.strategy, c.key.distractor_k, c.support, c.correct, c.accuracy, c.low_support
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub questions: usize,
    pub clusters: usize,
    pub instance_acc: f64,
    pub cluster_acc: f64,
    pub delta: f64,
    pub breakdown: Breakdown,
}

pub fn evaluate(
    probes: &[ProbeQuestion],
    clusters: &[SemanticCluster],
    preds: &[PredictionRecord],
) -> Result<EvalReport, EvalError> {
    let ok = correctness(probes, preds)?;
    let instance_acc = fraction(ok.iter().filter(|&&b| b).count(), ok.len());
    let cluster_acc = cluster_accuracy_from(probes, clusters, &ok)?;
    Ok(EvalReport {
        questions: probes.len(),
        clusters: clusters.len(),
        instance_acc,
        cluster_acc,
        delta: cluster_acc - instance_acc,
        breakdown: breakdown_from(probes, &ok),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mixing {
    #[default]
    None,
    X1,
    X2,
}

impl Mixing {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(Mixing::None),
            "x1" => Some(Mixing::X1),
            "x2" => Some(Mixing::X2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InoculationRun {
    pub config_id: String,
    pub k: u32,
    #[serde(default)]
    pub mixing: Mixing,
    pub score_new: f64,
    pub score_orig: f64,
    /// Anything other than absent or `"ok"` marks a failed run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
}

impl InoculationRun {
    pub fn aggregate(&self) -> f64 {
        (self.score_new + self.score_orig) / 2.0
    }

    pub fn is_ok(&self) -> bool {
        self.status.as_deref().is_none_or(|s| s == "ok")
    }
}

/// Best run by mean of new- and original-task scores; ties prefer the higher
/// original score, then the smaller config id.
pub fn select_best(runs: &[InoculationRun]) -> Option<&InoculationRun> {
    runs.iter().min_by(|a, b| {
        b.aggregate()
            .total_cmp(&a.aggregate())
            .then(b.score_orig.total_cmp(&a.score_orig))
            .then_with(|| a.config_id.cmp(&b.config_id))
    })
}

/// Signed change of the original-task score (negative = degradation).
pub fn inoculation_cost(score_orig_before: f64, best: &InoculationRun) -> f64 {
    best.score_orig - score_orig_before
}

/// A cost in percentage points, rounded to two decimals.
pub fn percentage_points(cost: f64) -> f64 {
    libm::round(cost * 10_000.0) / 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Probe,
    Science,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestLine {
    pub source: Source,
    pub id: String,
}

/// Number of original-task items mixed with `k` probe items.
pub fn science_count(mode: Mixing, k: usize) -> usize {
    match mode {
        Mixing::None => 0,
        Mixing::X1 => k,
        Mixing::X2 => (2 * k).min(INOCULATION_MAX),
    }
}

/// Seeded sample of `k` probe ids plus the mode's share of science ids,
/// interleaved by a seeded shuffle.
pub fn mixing_plan(
    probe_ids: &[String],
    science_ids: &[String],
    mode: Mixing,
    k: usize,
    seed: u64,
) -> Result<Vec<ManifestLine>, EvalError> {
    let need_science = science_count(mode, k);
    if probe_ids.len() < k {
        return Err(EvalError::PoolExhausted { pool: "probe", have: probe_ids.len(), need: k });
    }
    if science_ids.len() < need_science {
        return Err(EvalError::PoolExhausted { pool: "science", have: science_ids.len(), need: need_science });
    }
    let mut stream = rng::derived(seed, &["mixing"]);
    let mut lines: Vec<ManifestLine> = probe_ids
        .choose_multiple(&mut stream, k)
        .map(|id| ManifestLine { source: Source::Probe, id: id.clone() })
        .collect();
    lines.extend(
        science_ids.choose_multiple(&mut stream, need_science).map(|id| ManifestLine { source: Source::Science, id: id.clone() }),
    );
    lines.shuffle(&mut stream);
    Ok(lines)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub k: u32,
    pub best: Option<InoculationRun>,
    pub cost: Option<f64>,
    pub cost_pp: Option<f64>,
    /// No usable run at this k.
    pub gap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearningCurve {
    pub score_orig_before: Option<f64>,
    pub rows: Vec<CurveRow>,
}

/// Original-task score before inoculation: the best `k = 0` run.
pub fn zero_shot_orig(runs: &[InoculationRun]) -> Option<f64> {
    let zero: Vec<InoculationRun> = runs.iter().filter(|r| r.k == 0 && r.is_ok()).cloned().collect();
    select_best(&zero).map(|r| r.score_orig)
}

/// Best run per k (failed runs ignored). `ks` lists the expected k values;
/// when empty, the k values present in `runs` are used.
pub fn learning_curve(runs: &[InoculationRun], ks: &[u32], score_orig_before: Option<f64>) -> LearningCurve {
    let before = score_orig_before.or_else(|| zero_shot_orig(runs));
    let wanted: BTreeSet<u32> = if ks.is_empty() { runs.iter().map(|r| r.k).collect() } else { ks.iter().copied().collect() };
    let rows = wanted
        .into_iter()
        .map(|k| {
            let at_k: Vec<InoculationRun> = runs.iter().filter(|r| r.k == k && r.is_ok()).cloned().collect();
            let best = select_best(&at_k).cloned();
            let cost = best.as_ref().zip(before).map(|(b, before)| inoculation_cost(before, b));
            CurveRow { k, gap: best.is_none(), cost_pp: cost.map(percentage_points), cost, best }
        })
        .collect();
    LearningCurve { score_orig_before: before, rows }
}

impl LearningCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,config_id,mixing,score_new,score_orig,aggregate,cost_pp,gap\n");
        for r in &self.rows {
            match &r.best {
                Some(b) => {
                    let cost = r.cost_pp.map(|c| format!("{c:.2}")).unwrap_or_default();
                    let mixing = match b.mixing {
                        Mixing::None => "none",
                        Mixing::X1 => "x1",
                        Mixing::X2 => "x2",
                    };
                    let _ = writeln!(
                        out,
                        "{},{},{},{:.4},{:.4},{:.4},{},false",
                        r.k, b.config_id, mixing, b.score_new, b.score_orig, b.aggregate(), cost
                    );
                }
                None => {
                    let _ = writeln!(out, "{},,,,,,,true", r.k);
                }
            }
        }
        out
    }
}
