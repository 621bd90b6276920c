//! Reading WordNet database directories, lexicon JSONL and word vectors.

use std::path::Path;

use rayon::prelude::*;

use lexprobe_core::baselines::{BaselineError, EmbeddingParser, EmbeddingTable};
use lexprobe_core::lexicon::{Lexicon, LexiconRecord, LexiconReport};
use lexprobe_core::wndb::{self, DataPos, IngestReport, IsaSource, WndbError, WordnetInput};
use lexprobe_core::KnowledgeGraph;

use crate::error::{Error, Result};
use crate::formats::{for_each_line, read_text};

fn wndb_error(path: &Path, e: WndbError) -> Error {
    match e {
        WndbError::Parse { line, message } => Error::parse(path, line, message),
        WndbError::Graph(g) => Error::parse(path, 0, g.to_string()),
    }
}

/// Parses `data.{noun,verb,adj,adv}` (required) and `index.*` (optional)
/// from `dir`, one file per worker, then assembles the graph.
pub fn read_wordnet(dir: &Path, isa: IsaSource) -> Result<(KnowledgeGraph, IngestReport)> {
    type Parsed = (DataPos, Vec<wndb::RawSynsetRecord>, Option<Vec<wndb::IndexEntry>>);
    let parsed: Vec<Result<Parsed>> = DataPos::ALL
        .par_iter()
        .map(|&pos| {
            let data_path = dir.join(format!("data.{}", pos.file_suffix()));
            let text = read_text(&data_path)?;
            let records = wndb::parse_data_file(&text, pos).map_err(|e| wndb_error(&data_path, e))?;
            let index_path = dir.join(format!("index.{}", pos.file_suffix()));
            let index = if index_path.exists() {
                let text = read_text(&index_path)?;
                Some(wndb::parse_index_file(&text).map_err(|e| wndb_error(&index_path, e))?)
            } else {
                None
            };
            Ok((pos, records, index))
        })
        .collect();
    let mut input = WordnetInput::default();
    for p in parsed {
        let (pos, records, index) = p?;
        input.data.insert(pos, records);
        if let Some(index) = index {
            input.index.insert(pos, index);
        }
    }
    wndb::build_graph(&input, isa).map_err(|e| wndb_error(dir, e))
}

/// Reads lexicon JSONL. Malformed JSON is a parse error; records missing a
/// mandatory field are skipped and counted by the loader.
pub fn read_lexicon(path: &Path) -> Result<(Lexicon, KnowledgeGraph, LexiconReport)> {
    let mut records = Vec::new();
    for_each_line(path, |n, line| {
        let rec: LexiconRecord = serde_json::from_str(line).map_err(|e| Error::parse(path, n, e.to_string()))?;
        records.push(rec);
        Ok(())
    })?;
    Ok(Lexicon::load(records))
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let mut parser = EmbeddingParser::new();
    let mut seen = 0;
    for_each_line(path, |n, line| {
        // keep the parser's line count aligned across skipped blank lines
        while seen + 1 < n {
            seen += 1;
            parser.push_line("").expect("blank lines are accepted");
        }
        seen = n;
        parser.push_line(line).map_err(|e| match e {
            BaselineError::Parse { line, message } => Error::parse(path, line, message),
            other => Error::parse(path, n, other.to_string()),
        })
    })?;
    Ok(parser.finish())
}
