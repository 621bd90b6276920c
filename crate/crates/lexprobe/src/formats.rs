//! JSONL/JSON readers and writers, atomic output, graph dumps.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use lexprobe_core::kb::{ConceptId, GraphBuilder, KnowledgeGraph, PartOfSpeech, Relation, Target, TargetKind, Triple};

use crate::error::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read(path).map(|b| String::from_utf8_lossy(&b).into_owned()).map_err(|e| Error::io(path, e))
}

/// Calls `f` on every non-blank line with its 1-based number.
pub fn for_each_line(path: &Path, mut f: impl FnMut(usize, &str) -> Result<()>) -> Result<()> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 20, file);
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            return Ok(());
        }
        line_no += 1;
        let line = String::from_utf8_lossy(&buf);
        let line = line.trim_end_matches(['\n', '\r']);
        if !line.trim().is_empty() {
            f(line_no, line)?;
        }
    }
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for_each_line(path, |n, line| {
        out.push(serde_json::from_str(line).map_err(|e| Error::parse(path, n, e.to_string()))?);
        Ok(())
    })?;
    Ok(out)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
}

pub fn jsonl_bytes<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).expect("serializable");
        out.push(b'\n');
    }
    out
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// One triple of a graph dump. `pos` and `rank` ride on lemma lines so that
/// part of speech and display-lemma order survive a reload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphLine {
    pub rel: Relation,
    pub source: ConceptId,
    pub target: String,
    pub target_kind: TargetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<PartOfSpeech>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
}

/// Byte-stable dump: one JSON line per triple, lines sorted.
pub fn dump_graph(g: &KnowledgeGraph) -> Vec<u8> {
    let mut lines: Vec<String> = g
        .triples()
        .map(|t| {
            let lemma = t.rel() == Relation::Lemma;
            let ix = g.lookup(t.source().as_str()).expect("source registered");
            let line = GraphLine {
                rel: t.rel(),
                source: t.source().clone(),
                target: t.target().text().to_string(),
                target_kind: t.target().kind(),
                pos: lemma.then(|| g.pos(ix)),
                rank: if lemma { g.lemma_rank(ix, t.target().text()) } else { None },
            };
            serde_json::to_string(&line).expect("serializable")
        })
        .collect();
    lines.sort();
    let mut out = Vec::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.extend_from_slice(l.as_bytes());
        out.push(b'\n');
    }
    out
}

pub fn load_graph(path: &Path) -> Result<KnowledgeGraph> {
    let lines: Vec<GraphLine> = read_jsonl(path)?;
    let mut b = GraphBuilder::new().allow_implicit(true);
    for l in &lines {
        if let Some(pos) = l.pos {
            b.add_concept(l.source.clone(), pos);
        }
    }
    for (i, l) in lines.into_iter().enumerate() {
        let bad = |e: lexprobe_core::KbError| Error::parse(path, i + 1, e.to_string());
        match (l.rel, l.rank) {
            (Relation::Lemma, Some(rank)) => b.add_ranked_lemma(&l.source, l.target, rank).map_err(bad)?,
            _ => {
                let target = Target::from_parts(l.target_kind, l.target).map_err(bad)?;
                b.add_triple(Triple::new(l.rel, l.source, target).map_err(bad)?).map_err(bad)?;
            }
        }
    }
    b.freeze().map_err(|e| Error::parse(path, 0, e.to_string()))
}
