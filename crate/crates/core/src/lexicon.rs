//! Flat sense lexicon (dictionary entries) for the word-sense probe.
//!
//! Each accepted record becomes one concept: the entry is the sense.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::kb::{ConceptId, GraphBuilder, KnowledgeGraph, NodeIx, PartOfSpeech, Relation, Target, Triple};
use crate::text::fold;

/// One input record as read from the lexicon file. Mandatory fields are
/// optional here so that incomplete records can be counted and skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconRecord {
    #[serde(default)]
    pub word: Option<String>,
    #[serde(default)]
    pub pos: Option<String>,
    #[serde(default)]
    pub definition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SenseEntry {
    pub word: String,
    pub pos: String,
    pub definition: String,
    pub example: Option<String>,
    pub entry_id: ConceptId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SkippedRecord {
    pub record: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LexiconReport {
    pub records: usize,
    pub entries: usize,
    pub with_examples: usize,
    pub skipped: usize,
    pub skipped_sample: Vec<SkippedRecord>,
}

/// Canonical part-of-speech tag: `n`, `v`, `adj`, `adv`, or the trimmed,
/// lowercased input without trailing dots.
pub fn canonical_pos(pos: &str) -> String {
    let p = pos.trim().to_lowercase();
    let p = p.trim_end_matches('.');
    match p {
        "n" | "noun" => "n".into(),
        "v" | "verb" | "v. t" | "v. i" | "v.t" | "v.i" => "v".into(),
        "a" | "adj" | "adjective" => "adj".into(),
        "adv" | "adverb" | "r" => "adv".into(),
        other => other.to_string(),
    }
}

fn pos_kind(tag: &str) -> PartOfSpeech {
    match tag {
        "n" => PartOfSpeech::Noun,
        "v" => PartOfSpeech::Verb,
        "adj" => PartOfSpeech::Adj,
        "adv" => PartOfSpeech::Adv,
        _ => PartOfSpeech::Other,
    }
}

fn id_slug(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join("_").to_lowercase()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<SenseEntry>,
    by_word: BTreeMap<String, Vec<usize>>,
}

const SKIPPED_SAMPLE: usize = 20;

impl Lexicon {
    /// Streams records into a lexicon and its triple graph. Records missing a
    /// word, part of speech or definition are skipped and counted.
    pub fn load<I>(records: I) -> (Lexicon, KnowledgeGraph, LexiconReport)
    where
        I: IntoIterator<Item = LexiconRecord>,
    {
        let mut report = LexiconReport::default();
        let mut entries = Vec::new();
        let mut taken: BTreeSet<String> = BTreeSet::new();
        let mut ordinal: BTreeMap<(String, String), u32> = BTreeMap::new();
        for (i, rec) in records.into_iter().enumerate() {
            report.records += 1;
            let nonempty = |f: &Option<String>| f.as_deref().map(str::trim).filter(|s| !s.is_empty()).map(str::to_string);
            let (word, pos, definition) = match (nonempty(&rec.word), nonempty(&rec.pos), nonempty(&rec.definition)) {
                (Some(w), Some(p), Some(d)) => (w, p, d),
                (w, p, _) => {
                    let missing = if w.is_none() {
                        "word"
                    } else if p.is_none() {
                        "pos"
                    } else {
                        "definition"
                    };
                    report.skipped += 1;
                    if report.skipped_sample.len() < SKIPPED_SAMPLE {
                        report.skipped_sample.push(SkippedRecord { record: i + 1, reason: format!("missing {missing}") });
                    }
                    continue;
                }
            };
            let example = nonempty(&rec.example);
            let tag = canonical_pos(&pos);
            let slug = id_slug(&word);
            let n = ordinal.entry((slug.clone(), tag.clone())).or_insert(0);
            let mut id;
            loop {
                *n += 1;
                id = format!("{slug}.{}.{:02}", id_slug(&tag), n);
                if taken.insert(id.clone()) {
                    break;
                }
            }
            entries.push(SenseEntry { word, pos, definition, example, entry_id: ConceptId::new(id).expect("non-empty") });
        }
        let lexicon = Lexicon::from_entries(entries);
        report.entries = lexicon.entries.len();
        report.with_examples = lexicon.entries.iter().filter(|e| e.example.is_some()).count();
        let graph = lexicon.to_graph();
        (lexicon, graph, report)
    }

    fn from_entries(mut entries: Vec<SenseEntry>) -> Lexicon {
        entries.sort_by(|a, b| a.entry_id.cmp(&b.entry_id));
        let mut by_word: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_word.entry(fold(&e.word)).or_default().push(i);
        }
        Lexicon { entries, by_word }
    }

    fn to_graph(&self) -> KnowledgeGraph {
        let mut b = GraphBuilder::new();
        for e in &self.entries {
            let id = e.entry_id.clone();
            b.add_concept(id.clone(), pos_kind(&canonical_pos(&e.pos)));
            let mut add = |rel, target| {
                b.add_triple(Triple::new(rel, id.clone(), target).expect("well-typed")).expect("registered")
            };
            add(Relation::Lemma, Target::Word(e.word.clone()));
            add(Relation::Def, Target::Definition(e.definition.clone()));
            if let Some(ex) = &e.example {
                add(Relation::Ex, Target::Sentence(ex.clone()));
            }
        }
        b.freeze().expect("lexicon graphs carry no ISA edges")
    }

    /// Rebuilds the lexicon view of a graph produced by [`Lexicon::load`]
    /// (e.g. after a dump/load round trip). Part-of-speech text comes back in
    /// canonical form.
    pub fn from_graph(g: &KnowledgeGraph) -> Lexicon {
        let entries = g
            .indices()
            .filter_map(|ix| {
                let word = g.display_lemma(ix)?.to_string();
                let definition = g.definitions(ix).first()?.clone();
                Some(SenseEntry {
                    word,
                    pos: String::from(pos_tag(g.pos(ix), g.id(ix))),
                    definition,
                    example: g.examples(ix).first().cloned(),
                    entry_id: g.id(ix).clone(),
                })
            })
            .collect();
        Lexicon::from_entries(entries)
    }

    pub fn entries(&self) -> &[SenseEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &ConceptId) -> Option<&SenseEntry> {
        self.entries.binary_search_by(|e| e.entry_id.cmp(id)).ok().map(|i| &self.entries[i])
    }

    /// Entries for a word (case-folded), optionally restricted to one part of
    /// speech, in entry-id order.
    pub fn senses_of(&self, word: &str, pos: Option<&str>) -> Vec<&SenseEntry> {
        let want = pos.map(canonical_pos);
        self.by_word
            .get(&fold(word))
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i])
            .filter(|e| want.as_ref().is_none_or(|p| &canonical_pos(&e.pos) == p))
            .collect()
    }

    /// Distinct case-folded words, sorted.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.by_word.keys().map(String::as_str)
    }
}

fn pos_tag(pos: PartOfSpeech, id: &ConceptId) -> &str {
    match pos {
        PartOfSpeech::Noun => "n",
        PartOfSpeech::Verb => "v",
        PartOfSpeech::Adj => "adj",
        PartOfSpeech::Adv => "adv",
        // other tags survive in the id: `word.tag.nn`
        PartOfSpeech::Other => {
            let s = id.as_str();
            let mut parts = s.rsplitn(3, '.');
            parts.next();
            parts.next().unwrap_or("")
        }
    }
}

/// Index of an entry's concept in the lexicon graph.
pub fn entry_node(g: &KnowledgeGraph, e: &SenseEntry) -> Option<NodeIx> {
    g.lookup(e.entry_id.as_str())
}
