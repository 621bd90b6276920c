//! WNDB fixtures and a runner for the built binary.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One synset: offset, words, parent offsets, gloss text (examples quoted).
pub struct Synset<'a> {
    pub offset: u64,
    pub words: Vec<&'a str>,
    pub parents: Vec<u64>,
    pub gloss: String,
}

fn data_line(s: &Synset, ss_type: char) -> String {
    let mut line = format!("{:08} 00 {ss_type} {:02x}", s.offset, s.words.len());
    for w in &s.words {
        write!(line, " {w} 0").unwrap();
    }
    write!(line, " {:03}", s.parents.len()).unwrap();
    for p in &s.parents {
        write!(line, " @ {p:08} {ss_type} 0000").unwrap();
    }
    if ss_type == 'v' {
        line.push_str(" 01 + 02 00");
    }
    write!(line, " | {}", s.gloss).unwrap();
    line
}

/// Writes `data.{noun,verb,adj,adv}`; the unused parts of speech are empty.
pub fn write_wndb(dir: &Path, nouns: &[Synset], verbs: &[Synset]) {
    let text = |xs: &[Synset], t: char| xs.iter().map(|s| data_line(s, t) + "\n").collect::<String>();
    std::fs::write(dir.join("data.noun"), text(nouns, 'n')).unwrap();
    std::fs::write(dir.join("data.verb"), text(verbs, 'v')).unwrap();
    std::fs::write(dir.join("data.adj"), "").unwrap();
    std::fs::write(dir.join("data.adv"), "").unwrap();
}

/// The seven-verb fragment around `count`.
pub fn fig2_wndb(dir: &Path) {
    let s = |offset, word, parents: &[u64], gloss: &str| Synset {
        offset,
        words: vec![word],
        parents: parents.to_vec(),
        gloss: gloss.to_string(),
    };
    let verbs = [
        s(10, "utter", &[], "articulate; either verbally or with a cry, shout, or noise; \"She muttered some calming words\""),
        s(20, "parrot", &[10], "repeat mechanically; \"the students parroted the teacher\""),
        s(30, "recite", &[10], "render verbally, or recite; \"recite a poem\""),
        s(40, "spell", &[30], "orally recite the letters of or give the spelling of; \"How do you spell this word?\""),
        s(50, "count", &[30], "name or recite the numbers; \"the toddler could count\""),
        s(60, "mispell", &[40], "spell incorrectly; \"She mispelled many words\""),
        s(70, "count_down", &[50], "count backwards, towards zero; \"they counted down to the launch\""),
    ];
    write_wndb(dir, &[], &verbs);
}

/// A random noun taxonomy of `n` synsets (parents have smaller offsets),
/// most with an example sentence and some with a second lemma.
pub fn random_wndb(dir: &Path, seed: u64, n: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<String> = (0..n).map(|i| format!("thing{i}")).collect();
    let alts: Vec<String> = (0..n).map(|i| format!("item{i}")).collect();
    let nouns: Vec<Synset> = (0..n)
        .map(|i| {
            let mut parents: Vec<u64> = Vec::new();
            if i > 0 {
                for _ in 0..rng.random_range(1..=2) {
                    let p = 100 + rng.random_range(0..i) as u64;
                    if !parents.contains(&p) {
                        parents.push(p);
                    }
                }
            }
            let mut ws = vec![words[i].as_str()];
            if rng.random_bool(0.5) {
                ws.push(alts[i].as_str());
            }
            let mut gloss = format!("definition text for the {i}th thing in the tree");
            if rng.random_bool(0.8) {
                write!(gloss, "; \"a {} was seen\"", words[i]).unwrap();
            }
            Synset { offset: 100 + i as u64, words: ws, parents, gloss }
        })
        .collect();
    write_wndb(dir, &nouns, &[]);
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the `lexprobe` binary.
pub fn lexprobe(args: &[&str]) -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_lexprobe")).args(args).output().expect("binary runs");
    Outcome {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// Word vectors for every token of `words`, hashed into `dim` dimensions.
pub fn hashed_embeddings<'a>(words: impl IntoIterator<Item = &'a str>, dim: usize) -> String {
    let mut out = String::new();
    let mut seen = std::collections::BTreeSet::new();
    for w in words {
        if !seen.insert(w) {
            continue;
        }
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in w.bytes() {
            h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3);
        }
        out.push_str(w);
        for _ in 0..dim {
            h ^= h << 13;
            h ^= h >> 7;
            h ^= h << 17;
            write!(out, " {:.5}", (h >> 40) as f64 / (1u64 << 24) as f64 * 2.0 - 1.0).unwrap();
        }
        out.push('\n');
    }
    out
}
