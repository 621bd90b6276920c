//! WordNet database (WNDB) records and graph assembly.
//!
//! Parsing works on file contents already in memory; reading the
//! `data.*` / `index.*` files from disk is left to the caller.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use crate::kb::{ConceptId, GraphBuilder, KbError, KnowledgeGraph, PartOfSpeech, Relation, Target, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WndbError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] KbError),
}

fn parse_err(line: usize, message: impl Into<String>) -> WndbError {
    WndbError::Parse { line, message: message.into() }
}

/// Which data file a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DataPos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl DataPos {
    pub const ALL: [DataPos; 4] = [DataPos::Noun, DataPos::Verb, DataPos::Adj, DataPos::Adv];

    pub fn file_suffix(self) -> &'static str {
        match self {
            DataPos::Noun => "noun",
            DataPos::Verb => "verb",
            DataPos::Adj => "adj",
            DataPos::Adv => "adv",
        }
    }

    /// Maps a pointer/synset pos character; satellites live in the adj file.
    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'n' => DataPos::Noun,
            'v' => DataPos::Verb,
            'a' | 's' => DataPos::Adj,
            'r' => DataPos::Adv,
            _ => return None,
        })
    }

    fn part_of_speech(self) -> PartOfSpeech {
        match self {
            DataPos::Noun => PartOfSpeech::Noun,
            DataPos::Verb => PartOfSpeech::Verb,
            DataPos::Adj => PartOfSpeech::Adj,
            DataPos::Adv => PartOfSpeech::Adv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPointer {
    pub symbol: String,
    pub offset: u64,
    pub pos: char,
    pub source_target: u16,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSynsetRecord {
    pub offset: u64,
    pub lex_filenum: u8,
    pub ss_type: char,
    /// `(lemma, lex_id)` in file order, lemma verbatim (underscores kept).
    pub words: Vec<(String, u8)>,
    pub pointers: Vec<RawPointer>,
    pub gloss: String,
}

/// Parses one `data.{pos}` file. License lines (two leading spaces) and
/// blank lines are skipped.
pub fn parse_data_file(text: &str, pos: DataPos) -> Result<Vec<RawSynsetRecord>, WndbError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        let rec = parse_data_line(line, line_no)?;
        if DataPos::from_char(rec.ss_type) != Some(pos) {
            return Err(parse_err(line_no, format!("synset type '{}' in {} file", rec.ss_type, pos.file_suffix())));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn parse_data_line(line: &str, line_no: usize) -> Result<RawSynsetRecord, WndbError> {
    let (head, gloss) = match line.find(" | ") {
        Some(i) => (&line[..i], line[i + 3..].trim()),
        None => match line.strip_suffix('|') {
            Some(h) => (h, ""),
            None => (line, ""),
        },
    };
    let mut fields = head.split_whitespace();
    let mut next = |what: &str| fields.next().ok_or_else(|| parse_err(line_no, format!("missing {what}")));

    let offset_s = next("synset offset")?;
    let offset = offset_s
        .parse::<u64>()
        .map_err(|_| parse_err(line_no, format!("non-integer offset {offset_s:?}")))?;
    let lex_filenum = parse_num(next("lex_filenum")?, 10, line_no, "lex_filenum")? as u8;
    let ss_type_s = next("ss_type")?;
    let ss_type = match ss_type_s {
        "n" | "v" | "a" | "s" | "r" => ss_type_s.chars().next().expect("non-empty"),
        other => return Err(parse_err(line_no, format!("bad ss_type {other:?}"))),
    };
    let w_cnt = parse_num(next("w_cnt")?, 16, line_no, "w_cnt")? as usize;
    if w_cnt == 0 {
        return Err(parse_err(line_no, "synset without words"));
    }
    let mut words = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = next("word")?.to_string();
        let lex_id = parse_num(next("lex_id")?, 16, line_no, "lex_id")? as u8;
        words.push((word, lex_id));
    }
    let p_cnt = parse_num(next("p_cnt")?, 10, line_no, "p_cnt")? as usize;
    let mut pointers = Vec::with_capacity(p_cnt);
    for _ in 0..p_cnt {
        let symbol = next("pointer symbol")?.to_string();
        let target = next("pointer offset")?;
        let offset = target
            .parse::<u64>()
            .map_err(|_| parse_err(line_no, format!("non-integer pointer offset {target:?}")))?;
        let pos_s = next("pointer pos")?;
        let pos = match pos_s {
            "n" | "v" | "a" | "s" | "r" => pos_s.chars().next().expect("non-empty"),
            other => return Err(parse_err(line_no, format!("bad pointer pos {other:?}"))),
        };
        let source_target = parse_num(next("source/target")?, 16, line_no, "source/target")? as u16;
        pointers.push(RawPointer { symbol, offset, pos, source_target });
    }
    // verb frames (and anything else before the gloss) are not needed
    Ok(RawSynsetRecord { offset, lex_filenum, ss_type, words, pointers, gloss: gloss.to_string() })
}

fn parse_num(s: &str, radix: u32, line: usize, what: &str) -> Result<u64, WndbError> {
    u64::from_str_radix(s, radix).map_err(|_| parse_err(line, format!("bad {what} {s:?}")))
}

/// One `index.{pos}` entry: the synsets of a lemma in sense order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub lemma: String,
    pub pos: char,
    pub offsets: Vec<u64>,
}

pub fn parse_index_file(text: &str) -> Result<Vec<IndexEntry>, WndbError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        let mut f = line.split_whitespace();
        let mut next = |what: &str| f.next().ok_or_else(|| parse_err(line_no, format!("missing {what}")));
        let lemma = next("lemma")?.to_string();
        let pos = next("pos")?.chars().next().unwrap_or('?');
        let synset_cnt = parse_num(next("synset_cnt")?, 10, line_no, "synset_cnt")? as usize;
        let p_cnt = parse_num(next("p_cnt")?, 10, line_no, "p_cnt")? as usize;
        for _ in 0..p_cnt {
            next("ptr_symbol")?;
        }
        next("sense_cnt")?;
        next("tagsense_cnt")?;
        let mut offsets = Vec::with_capacity(synset_cnt);
        for _ in 0..synset_cnt {
            let s = next("synset_offset")?;
            offsets.push(s.parse::<u64>().map_err(|_| parse_err(line_no, format!("non-integer offset {s:?}")))?);
        }
        out.push(IndexEntry { lemma, pos, offsets });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GlossParts {
    pub definition: String,
    pub examples: Vec<String>,
    /// Set when the gloss had an unbalanced double quote.
    pub unbalanced: bool,
}

/// Splits a gloss into its definition and the double-quoted examples.
pub fn split_gloss(gloss: &str) -> GlossParts {
    let mut prose: Vec<String> = Vec::new();
    let mut examples = Vec::new();
    let mut unbalanced = false;
    let mut rest = gloss;
    let mut after_example = false;
    loop {
        match rest.find('"') {
            None => {
                push_prose(&mut prose, rest, after_example);
                break;
            }
            Some(open) => {
                push_prose(&mut prose, &rest[..open], after_example);
                let tail = &rest[open + 1..];
                match tail.find('"') {
                    Some(close) => {
                        let ex = tail[..close].trim();
                        if !ex.is_empty() {
                            examples.push(ex.to_string());
                        }
                        rest = &tail[close + 1..];
                        after_example = true;
                    }
                    None => {
                        unbalanced = true;
                        push_prose(&mut prose, tail, false);
                        break;
                    }
                }
            }
        }
    }
    GlossParts { definition: prose.join("; "), examples, unbalanced }
}

fn push_prose(prose: &mut Vec<String>, chunk: &str, after_example: bool) {
    for (i, seg) in chunk.split(';').enumerate() {
        let seg = seg.trim();
        // `"..." - Shakespeare`: attribution trailing an example
        if i == 0 && after_example && seg.starts_with('-') {
            continue;
        }
        if !seg.is_empty() {
            prose.push(seg.to_string());
        }
    }
}

/// Strips the adjective position markers `(a)`, `(p)`, `(ip)`.
pub fn strip_adj_marker(word: &str) -> &str {
    for marker in ["(a)", "(p)", "(ip)"] {
        if let Some(w) = word.strip_suffix(marker) {
            return w;
        }
    }
    word
}

/// Lemma as it appears in text: markers stripped, underscores as spaces.
pub fn lemma_text(word: &str) -> String {
    strip_adj_marker(word).replace('_', " ")
}

/// Which pointer family ISA edges are taken from. WNDB stores both
/// directions, so all three give the same edge set on consistent data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsaSource {
    #[default]
    Both,
    Hypernyms,
    Hyponyms,
}

#[derive(Debug, Clone, Default)]
pub struct WordnetInput {
    pub data: BTreeMap<DataPos, Vec<RawSynsetRecord>>,
    /// Optional; only used for sense numbering in concept ids.
    pub index: BTreeMap<DataPos, Vec<IndexEntry>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DanglingPointer {
    pub source: String,
    pub symbol: String,
    pub offset: u64,
    pub pos: char,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub synsets: usize,
    pub synsets_by_pos: BTreeMap<DataPos, usize>,
    pub synsets_with_examples: usize,
    pub example_sentences: usize,
    pub definitions: usize,
    pub lemmas: usize,
    pub isa_edges: usize,
    pub unbalanced_glosses: usize,
    pub dangling_pointers: usize,
    pub dangling_sample: Vec<DanglingPointer>,
    pub renamed_ids: usize,
    /// ISA edges dropped because they closed a cycle, as `[child, parent]`.
    pub dropped_cycle_edges: Vec<[String; 2]>,
}

const DANGLING_SAMPLE: usize = 20;

/// Assembles the concept graph: one concept per synset named
/// `lemma.pos.nn`, def/ex/lemma triples from the gloss and words, and ISA
/// edges from `@`/`@i` (up) and `~`/`~i` (down) pointers.
pub fn build_graph(input: &WordnetInput, isa: IsaSource) -> Result<(KnowledgeGraph, IngestReport), WndbError> {
    let mut report = IngestReport::default();
    let names = assign_names(input, &mut report);

    let mut b = GraphBuilder::new();
    for (&pos, records) in &input.data {
        for rec in records {
            let id = &names[&(pos, rec.offset)];
            b.add_concept(id.clone(), pos.part_of_speech());
        }
    }

    // (child, parent)
    let mut isa_edges: BTreeSet<(ConceptId, ConceptId)> = BTreeSet::new();
    for (&pos, records) in &input.data {
        *report.synsets_by_pos.entry(pos).or_default() += records.len();
        for rec in records {
            report.synsets += 1;
            let id = &names[&(pos, rec.offset)];
            for (rank, (word, _)) in rec.words.iter().enumerate() {
                b.add_ranked_lemma(id, lemma_text(word), rank as u32)?;
            }
            let parts = split_gloss(&rec.gloss);
            if parts.unbalanced {
                report.unbalanced_glosses += 1;
            }
            if !parts.definition.is_empty() {
                b.add_triple(Triple::new(Relation::Def, id.clone(), Target::Definition(parts.definition))?)?;
            }
            if !parts.examples.is_empty() {
                report.synsets_with_examples += 1;
            }
            for ex in parts.examples {
                report.example_sentences += 1;
                b.add_triple(Triple::new(Relation::Ex, id.clone(), Target::Sentence(ex))?)?;
            }
            for p in &rec.pointers {
                let up = match (p.symbol.as_str(), isa) {
                    ("@" | "@i", IsaSource::Both | IsaSource::Hypernyms) => true,
                    ("~" | "~i", IsaSource::Both | IsaSource::Hyponyms) => false,
                    _ => continue,
                };
                let target = DataPos::from_char(p.pos).and_then(|tp| names.get(&(tp, p.offset)));
                match target {
                    Some(t) if up => {
                        isa_edges.insert((id.clone(), t.clone()));
                    }
                    Some(t) => {
                        isa_edges.insert((t.clone(), id.clone()));
                    }
                    None => {
                        report.dangling_pointers += 1;
                        if report.dangling_sample.len() < DANGLING_SAMPLE {
                            report.dangling_sample.push(DanglingPointer {
                                source: id.to_string(),
                                symbol: p.symbol.clone(),
                                offset: p.offset,
                                pos: p.pos,
                            });
                        }
                    }
                }
            }
        }
    }
    // edges in sorted order; one that would close a cycle is dropped
    let mut parents: BTreeMap<&ConceptId, Vec<&ConceptId>> = BTreeMap::new();
    for (child, parent) in &isa_edges {
        if reaches(&parents, parent, child) {
            report.dropped_cycle_edges.push([child.to_string(), parent.to_string()]);
            continue;
        }
        parents.entry(child).or_default().push(parent);
        b.add_triple(Triple::new(Relation::IsaUp, child.clone(), Target::Concept(parent.clone()))?)?;
    }
    let graph = b.freeze()?;
    report.definitions = graph.count(Relation::Def);
    report.lemmas = graph.count(Relation::Lemma);
    report.isa_edges = graph.count(Relation::IsaUp);
    Ok((graph, report))
}

/// Whether `to` is `from` or one of its accepted ancestors.
fn reaches(parents: &BTreeMap<&ConceptId, Vec<&ConceptId>>, from: &ConceptId, to: &ConceptId) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![from];
    while let Some(c) = stack.pop() {
        if c == to {
            return true;
        }
        if seen.insert(c) {
            stack.extend(parents.get(c).into_iter().flatten().copied());
        }
    }
    false
}

fn assign_names(input: &WordnetInput, report: &mut IngestReport) -> BTreeMap<(DataPos, u64), ConceptId> {
    // (lemma lowercase, index pos) -> offsets in sense order
    let mut senses: BTreeMap<(String, DataPos), &[u64]> = BTreeMap::new();
    for (&pos, entries) in &input.index {
        for e in entries {
            senses.insert((e.lemma.to_lowercase(), pos), &e.offsets);
        }
    }
    let mut ordinal: BTreeMap<(String, char), u32> = BTreeMap::new();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut names = BTreeMap::new();
    for (&pos, records) in &input.data {
        for rec in records {
            let lemma = strip_adj_marker(&rec.words[0].0).to_lowercase();
            let sense = senses
                .get(&(lemma.clone(), pos))
                .and_then(|offs| offs.iter().position(|&o| o == rec.offset))
                .map(|i| i as u32 + 1);
            let n = match sense {
                Some(n) => n,
                None => {
                    let slot = ordinal.entry((lemma.clone(), rec.ss_type)).or_insert(0);
                    *slot += 1;
                    *slot
                }
            };
            let mut name = format!("{lemma}.{}.{n:02}", rec.ss_type);
            let mut bump = n;
            while taken.contains(&name) {
                bump += 1;
                report.renamed_ids += 1;
                name = format!("{lemma}.{}.{bump:02}", rec.ss_type);
            }
            taken.insert(name.clone());
            names.insert((pos, rec.offset), ConceptId::new(name).expect("lemma is non-empty"));
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const WIDGET: &str = "00000001 03 n 01 widget 0 001 @ 00000002 n 0000 | a small device";

    #[test]
    fn parses_constructed_line() {
        let recs = parse_data_file(WIDGET, DataPos::Noun).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.offset, 1);
        assert_eq!(r.words, vec![("widget".to_string(), 0)]);
        assert_eq!(r.pointers.len(), 1);
        assert_eq!(r.pointers[0].symbol, "@");
        assert_eq!(r.pointers[0].offset, 2);
        assert_eq!(r.gloss, "a small device");
    }

    #[test]
    fn parses_verb_line_with_frames() {
        let line = "00118764 30 v 03 keep_up 0 keep_abreast 2 follow 1 001 $ 00729109 v 0000 02 + 02 00 + 22 00 | keep informed; \"He kept up on his country's foreign policies\"  ";
        let r = parse_data_line(line, 1).unwrap();
        assert_eq!(r.words.len(), 3);
        assert_eq!(r.words[1], ("keep_abreast".to_string(), 2));
        assert_eq!(r.pointers[0].symbol, "$");
        assert_eq!(r.gloss, "keep informed; \"He kept up on his country's foreign policies\"");
    }

    #[test]
    fn skips_license_lines() {
        let text = "  1 This software and database is being provided\n  2 more\n".to_string() + WIDGET + "\n";
        assert_eq!(parse_data_file(&text, DataPos::Noun).unwrap().len(), 1);
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let text = format!("{WIDGET}\nxx 03 n 01 widget 0 000 | bad offset");
        match parse_data_file(&text, DataPos::Noun) {
            Err(WndbError::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("offset"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        match parse_data_line("00000001 03 n 02 widget 0 | truncated", 7) {
            Err(WndbError::Parse { line: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_data_file(WIDGET, DataPos::Verb).is_err());
    }

    #[test]
    fn gloss_splitting() {
        let p = split_gloss("name or recite the numbers; \"the toddler could count\"");
        assert_eq!(p.definition, "name or recite the numbers");
        assert_eq!(p.examples, vec!["the toddler could count"]);
        let p = split_gloss("read aloud from memory");
        assert_eq!(p.definition, "read aloud from memory");
        assert!(p.examples.is_empty());
        let p = split_gloss("a; \"x\"; \"y\"");
        assert_eq!(p.definition, "a");
        assert_eq!(p.examples, vec!["x", "y"]);
        assert!(!p.unbalanced);
    }

    #[test]
    fn gloss_unbalanced_quote_becomes_definition() {
        let p = split_gloss("a thing; \"half quoted");
        assert!(p.unbalanced);
        assert_eq!(p.definition, "a thing; half quoted");
        assert!(p.examples.is_empty());
    }

    #[test]
    fn gloss_attribution_is_dropped() {
        let p = split_gloss("a sudden fear; \"fear is the mind-killer\" - Herbert; \"another\"");
        assert_eq!(p.definition, "a sudden fear");
        assert_eq!(p.examples, vec!["fear is the mind-killer", "another"]);
    }

    #[test]
    fn lemma_text_normalises() {
        assert_eq!(lemma_text("poet_laureate"), "poet laureate");
        assert_eq!(lemma_text("galore(ip)"), "galore");
    }

    fn tiny_input() -> WordnetInput {
        let verbs = "\
00000010 32 v 01 utter 0 001 ~ 00000020 v 0000 01 + 00 00 | articulate; \"He uttered a curse\"
00000020 32 v 02 recite 0 declaim 0 002 @ 00000010 v 0000 ~ 00000030 v 0000 01 + 00 00 | read aloud from memory
00000030 32 v 01 count 0 001 @ 00000020 v 0000 01 + 00 00 | name or recite the numbers; \"the toddler could count\"
";
        let index = "\
count v 1 1 @ 1 0 00000030
recite v 1 2 @ ~ 1 0 00000020
utter v 1 1 ~ 1 0 00000010
";
        let mut input = WordnetInput::default();
        input.data.insert(DataPos::Verb, parse_data_file(verbs, DataPos::Verb).unwrap());
        input.index.insert(DataPos::Verb, parse_index_file(index).unwrap());
        input
    }

    #[test]
    fn builds_named_graph() {
        let (g, report) = build_graph(&tiny_input(), IsaSource::Both).unwrap();
        assert_eq!(report.synsets, 3);
        assert_eq!(report.synsets_with_examples, 2);
        assert_eq!(report.isa_edges, 2);
        let count = g.lookup("count.v.01").unwrap();
        assert_eq!(g.id(g.parents(count)[0]).as_str(), "recite.v.01");
        assert_eq!(g.display_lemmas(g.lookup("recite.v.01").unwrap()), ["recite", "declaim"]);
        assert_eq!(g.examples(count), ["the toddler could count"]);
    }

    #[test]
    fn isa_source_directions_agree() {
        let input = tiny_input();
        let up = build_graph(&input, IsaSource::Hypernyms).unwrap().0;
        let down = build_graph(&input, IsaSource::Hyponyms).unwrap().0;
        assert_eq!(up.count(Relation::IsaUp), 2);
        assert_eq!(up, down);
    }

    #[test]
    fn dangling_pointer_is_reported() {
        let mut input = WordnetInput::default();
        input.data.insert(DataPos::Noun, parse_data_file(WIDGET, DataPos::Noun).unwrap());
        let (g, report) = build_graph(&input, IsaSource::Both).unwrap();
        assert_eq!(report.dangling_pointers, 1);
        assert_eq!(g.count(Relation::IsaUp), 0);
        // no index file: ordinal numbering
        assert!(g.lookup("widget.n.01").is_some());
    }

    #[test]
    fn cycle_closing_edge_is_dropped() {
        // restrain/inhibit point at each other as hypernyms in WordNet 3.0
        let verbs = "\
00000010 32 v 01 restrain 0 001 @ 00000020 v 0000 01 + 00 00 | keep under control
00000020 32 v 01 inhibit 0 001 @ 00000010 v 0000 01 + 00 00 | limit the range of
";
        let mut input = WordnetInput::default();
        input.data.insert(DataPos::Verb, parse_data_file(verbs, DataPos::Verb).unwrap());
        let (g, report) = build_graph(&input, IsaSource::Both).unwrap();
        assert_eq!(g.count(Relation::IsaUp), 1);
        assert_eq!(report.dropped_cycle_edges, vec![["restrain.v.01".to_string(), "inhibit.v.01".to_string()]]);
    }
}
