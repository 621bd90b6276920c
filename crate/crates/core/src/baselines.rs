//! Embedding-based bias gates: partial-input and similarity baselines over
//! generated probes.
//!
//! Encoders are mean-pooled word vectors; the choice-only scorer is a linear
//! layer over pooled choice vectors plus three surface features (token count,
//! character count, out-of-vocabulary fraction), trained with softmax
//! cross-entropy over the five choices.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::eval::argmax;
use crate::probe::{ProbeQuestion, Split, CHOICES};
use crate::rng;
use crate::text::tokenize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BaselineError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("choice-only training diverged (loss {loss}) with {config}")]
    Diverged { loss: f64, config: String },
    #[error("no training questions")]
    EmptyTrain,
}

/// Word vectors of one fixed dimension. Lookups of unknown words yield
/// `None`; pooling treats them as zero vectors and counts them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    index: BTreeMap<String, u32>,
    data: Vec<f32>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable { dim, ..Default::default() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Adds a vector; the first occurrence of a word wins. Returns whether
    /// the word was new.
    pub fn insert(&mut self, word: &str, vector: &[f32]) -> bool {
        assert_eq!(vector.len(), self.dim, "vector dimension");
        if self.index.contains_key(word) {
            return false;
        }
        self.index.insert(word.to_string(), self.index.len() as u32);
        self.data.extend_from_slice(vector);
        true
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        let i = *self.index.get(word)? as usize * self.dim;
        Some(&self.data[i..i + self.dim])
    }

    /// Mean of the token vectors of `text`.
    pub fn pool(&self, text: &str) -> Pooled {
        let tokens = tokenize(text);
        let mut sum = vec![0f64; self.dim];
        let mut known = 0usize;
        for t in &tokens {
            if let Some(v) = self.get(t) {
                known += 1;
                for (s, &x) in sum.iter_mut().zip(v) {
                    *s += f64::from(x);
                }
            }
        }
        if known > 0 {
            for s in &mut sum {
                *s /= known as f64;
            }
        }
        Pooled { vector: sum, tokens: tokens.len(), oov: tokens.len() - known, chars: text.chars().count() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pooled {
    pub vector: Vec<f64>,
    pub tokens: usize,
    pub oov: usize,
    pub chars: usize,
}

/// Incremental reader for `word v1 … vd` lines. A leading `count dim`
/// header line is accepted and skipped.
#[derive(Debug, Default)]
pub struct EmbeddingParser {
    table: Option<EmbeddingTable>,
    lines: usize,
    scratch: Vec<f32>,
}

impl EmbeddingParser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_line(&mut self, line: &str) -> Result<(), BaselineError> {
        self.lines += 1;
        let line_no = self.lines;
        let line = line.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            return Ok(());
        }
        let mut fields = line.split(' ').filter(|f| !f.is_empty());
        let word = fields.next().unwrap_or_default();
        self.scratch.clear();
        for f in fields {
            let x: f32 = f
                .parse()
                .map_err(|_| BaselineError::Parse { line: line_no, message: alloc::format!("bad number {f:?}") })?;
            self.scratch.push(x);
        }
        if line_no == 1 && self.scratch.len() == 1 && word.parse::<usize>().is_ok() {
            return Ok(());
        }
        if self.scratch.is_empty() {
            return Err(BaselineError::Parse { line: line_no, message: "no vector components".into() });
        }
        let table = self.table.get_or_insert_with(|| EmbeddingTable::new(self.scratch.len()));
        if self.scratch.len() != table.dim {
            return Err(BaselineError::Parse {
                line: line_no,
                message: alloc::format!("expected {} components, found {}", table.dim, self.scratch.len()),
            });
        }
        table.insert(word, &self.scratch);
        Ok(())
    }

    pub fn finish(self) -> EmbeddingTable {
        self.table.unwrap_or_default()
    }
}

pub fn parse_embeddings(text: &str) -> Result<EmbeddingTable, BaselineError> {
    let mut p = EmbeddingParser::new();
    for line in text.lines() {
        p.push_line(line)?;
    }
    Ok(p.finish())
}

/// Cosine similarity; 0 when either vector is all zeros.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (libm::sqrt(na) * libm::sqrt(nb))
}

/// Question/choice cosine of mean-pooled vectors.
pub fn vec_similarity_score(table: &EmbeddingTable, question: &str, choices: &[String; CHOICES]) -> [f64; CHOICES] {
    let q = table.pool(question).vector;
    core::array::from_fn(|i| cosine(&q, &table.pool(&choices[i]).vector))
}

/// Negated similarity to the closest other choice: the most isolated choice
/// scores highest.
pub fn choice_to_choice_score(table: &EmbeddingTable, choices: &[String; CHOICES]) -> [f64; CHOICES] {
    let pooled: Vec<Vec<f64>> = choices.iter().map(|c| table.pool(c).vector).collect();
    core::array::from_fn(|i| {
        let closest = (0..CHOICES).filter(|&j| j != i).map(|j| cosine(&pooled[i], &pooled[j])).fold(f64::NEG_INFINITY, f64::max);
        -closest
    })
}

/// Seeded uniform guesses.
pub fn random_predictions(n: usize, seed: u64) -> Vec<usize> {
    let mut r = rng::derived(seed, &["random-baseline"]);
    (0..n).map(|_| r.random_range(0..CHOICES)).collect()
}

fn accuracy_of(preds: impl Iterator<Item = usize>, questions: &[&ProbeQuestion]) -> f64 {
    if questions.is_empty() {
        return 0.0;
    }
    let correct = preds.zip(questions).filter(|(p, q)| *p == q.answer_idx as usize).count();
    correct as f64 / questions.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChoiceOnlyConfig {
    pub epochs: usize,
    pub lr: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for ChoiceOnlyConfig {
    fn default() -> Self {
        ChoiceOnlyConfig { epochs: 15, lr: 0.05, l2: 1e-4, seed: 0 }
    }
}

/// Linear scorer over standardised choice features.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceOnlyModel {
    mean: Vec<f64>,
    scale: Vec<f64>,
    weights: Vec<f64>,
}

fn raw_features(table: &EmbeddingTable, text: &str) -> Vec<f64> {
    let p = table.pool(text);
    let mut f = p.vector;
    f.push(libm::log(1.0 + p.tokens as f64));
    f.push(libm::log(1.0 + p.chars as f64));
    f.push(if p.tokens == 0 { 0.0 } else { p.oov as f64 / p.tokens as f64 });
    f
}

impl ChoiceOnlyModel {
    fn features(&self, table: &EmbeddingTable, text: &str) -> Vec<f64> {
        let mut f = raw_features(table, text);
        for ((x, m), s) in f.iter_mut().zip(&self.mean).zip(&self.scale) {
            *x = (*x - m) / s;
        }
        f
    }

    fn logits(&self, feats: &[Vec<f64>]) -> [f64; CHOICES] {
        core::array::from_fn(|i| feats[i].iter().zip(&self.weights).map(|(x, w)| x * w).sum())
    }

    pub fn score(&self, table: &EmbeddingTable, choices: &[String; CHOICES]) -> [f64; CHOICES] {
        let feats: Vec<Vec<f64>> = choices.iter().map(|c| self.features(table, c)).collect();
        self.logits(&feats)
    }

    pub fn accuracy(&self, table: &EmbeddingTable, questions: &[&ProbeQuestion]) -> f64 {
        accuracy_of(questions.iter().map(|q| argmax(&self.score(table, &q.choices))), questions)
    }
}

/// Trains the choice-only scorer. The question text is never read.
pub fn train_choice_only(
    train: &[&ProbeQuestion],
    table: &EmbeddingTable,
    cfg: &ChoiceOnlyConfig,
) -> Result<ChoiceOnlyModel, BaselineError> {
    if train.is_empty() {
        return Err(BaselineError::EmptyTrain);
    }
    let raw: Vec<[Vec<f64>; CHOICES]> =
        train.iter().map(|q| core::array::from_fn(|i| raw_features(table, &q.choices[i]))).collect();
    let dim = table.dim() + 3;
    let n = (raw.len() * CHOICES) as f64;
    let mut mean = vec![0.0; dim];
    let mut var = vec![0.0; dim];
    for f in raw.iter().flatten() {
        for (m, x) in mean.iter_mut().zip(f) {
            *m += x / n;
        }
    }
    for f in raw.iter().flatten() {
        for ((v, x), m) in var.iter_mut().zip(f).zip(&mean) {
            *v += (x - m) * (x - m) / n;
        }
    }
    let scale: Vec<f64> = var.iter().map(|v| if *v > 1e-12 { libm::sqrt(*v) } else { 1.0 }).collect();
    let mut model = ChoiceOnlyModel { mean, scale, weights: vec![0.0; dim] };
    let data: Vec<([Vec<f64>; CHOICES], usize)> = raw
        .into_iter()
        .zip(train)
        .map(|(mut fs, q)| {
            for f in &mut fs {
                for ((x, m), s) in f.iter_mut().zip(&model.mean).zip(&model.scale) {
                    *x = (*x - m) / s;
                }
            }
            (fs, q.answer_idx as usize)
        })
        .collect();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut stream = rng::derived(cfg.seed, &["choice-only"]);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut stream);
        let mut loss = 0.0;
        for &i in &order {
            let (feats, gold) = &data[i];
            let logits = model.logits(feats);
            let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exps: [f64; CHOICES] = core::array::from_fn(|j| libm::exp(logits[j] - top));
            let z: f64 = exps.iter().sum();
            loss -= libm::log(exps[*gold] / z);
            for (j, f) in feats.iter().enumerate() {
                let grad = exps[j] / z - if j == *gold { 1.0 } else { 0.0 };
                for (w, x) in model.weights.iter_mut().zip(f) {
                    *w -= cfg.lr * grad * x;
                }
            }
            for w in &mut model.weights {
                *w -= cfg.lr * cfg.l2 * *w;
            }
        }
        if !loss.is_finite() {
            return Err(BaselineError::Diverged { loss, config: alloc::format!("{cfg:?}") });
        }
    }
    Ok(model)
}

/// Trains on `train` and reports accuracy on `eval`.
pub fn choice_only_train_eval(
    train: &[&ProbeQuestion],
    eval: &[&ProbeQuestion],
    table: &EmbeddingTable,
    cfg: &ChoiceOnlyConfig,
) -> Result<f64, BaselineError> {
    Ok(train_choice_only(train, table, cfg)?.accuracy(table, eval))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    /// baseline → split → accuracy.
    pub accuracy: BTreeMap<String, BTreeMap<String, f64>>,
    pub threshold: f64,
    pub train_questions: usize,
    pub eval_questions: usize,
    /// Partial-input baselines above the threshold.
    pub flags: Vec<String>,
    pub verdict: Verdict,
}

impl BiasReport {
    pub fn get(&self, baseline: &str, split: &str) -> Option<f64> {
        self.accuracy.get(baseline)?.get(split).copied()
    }
}

pub const DEFAULT_THRESHOLD: f64 = 0.45;

/// Runs every baseline. The choice-only scorer trains on the inoculation
/// split and is evaluated on dev and test; the training-free baselines are
/// evaluated on the same splits. Fails when a partial-input baseline
/// (choice-only, choice-to-choice) exceeds `threshold` on any evaluated split.
pub fn bias_gate(
    questions: &[ProbeQuestion],
    table: &EmbeddingTable,
    threshold: f64,
    cfg: &ChoiceOnlyConfig,
) -> Result<BiasReport, BaselineError> {
    let train: Vec<&ProbeQuestion> =
        questions.iter().filter(|q| q.meta.split == Some(Split::Inoculation)).collect();
    let model = train_choice_only(&train, table, cfg)?;
    let mut accuracy: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut flags = Vec::new();
    let mut eval_questions = 0;
    for split in [Split::Dev, Split::Test] {
        let qs: Vec<&ProbeQuestion> = questions.iter().filter(|q| q.meta.split == Some(split)).collect();
        if qs.is_empty() {
            continue;
        }
        eval_questions += qs.len();
        let mut put = |name: &str, acc: f64| {
            accuracy.entry(name.to_string()).or_default().insert(split.as_str().to_string(), acc);
        };
        let random = random_predictions(qs.len(), cfg.seed);
        put("random", accuracy_of(random.into_iter(), &qs));
        put("vec_similarity", accuracy_of(qs.iter().map(|q| argmax(&vec_similarity_score(table, &q.question, &q.choices))), &qs));
        put("choice_only", model.accuracy(table, &qs));
        put("choice_to_choice", accuracy_of(qs.iter().map(|q| argmax(&choice_to_choice_score(table, &q.choices))), &qs));
    }
    for name in ["choice_only", "choice_to_choice"] {
        if accuracy.get(name).is_some_and(|m| m.values().any(|&a| a > threshold)) {
            flags.push(name.to_string());
        }
    }
    let verdict = if flags.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(BiasReport { accuracy, threshold, train_questions: train.len(), eval_questions, flags, verdict })
}
