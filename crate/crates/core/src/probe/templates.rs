//! Question and answer templates. Variant 0 of each probe type is the
//! canonical wording; variant 1 is a paraphrase.

use alloc::format;
use alloc::string::String;

use super::ProbeType;

pub const VARIANTS: usize = 2;

/// Definition-style question (also used by the word-sense probe).
pub fn definitions(variant: u8, sentence: &str, word: &str) -> String {
    match variant {
        0 => format!("In the sentence {sentence}, the word {word} is best defined as"),
        _ => format!("Given the sentence {sentence}, what is the meaning of the word {word}?"),
    }
}

pub fn hypernymy(variant: u8, sentence: &str, word: &str) -> String {
    match variant {
        0 => format!("In {sentence}, the word or concept {word} is best described as a type of"),
        _ => format!("In the context {sentence}, the word or concept {word} is a kind of"),
    }
}

pub fn hyponymy(variant: u8, sentence: &str, word: &str) -> String {
    match variant {
        0 => format!("Given the context {sentence}, which of the following word or concept is a specific type of {word}?"),
        _ => format!("In {sentence}, which of the following is a kind of {word}?"),
    }
}

pub fn synonymy(variant: u8, definition: &str) -> String {
    match variant {
        0 => format!("Which words best correspond to {definition}?"),
        _ => format!("Which set of words best corresponds to the definition {definition}?"),
    }
}

/// Contextual question for probes that introduce a word in a sentence.
pub fn contextual(probe: ProbeType, variant: u8, sentence: &str, word: &str) -> String {
    match probe {
        ProbeType::Hypernymy => hypernymy(variant, sentence, word),
        ProbeType::Hyponymy => hyponymy(variant, sentence, word),
        _ => definitions(variant, sentence, word),
    }
}

/// ISA answer: `<lemma>[ event] defined as <gloss>`.
pub fn isa_answer(lemma: &str, is_verb: bool, gloss: &str) -> String {
    if is_verb {
        format!("{lemma} event defined as {gloss}")
    } else {
        format!("{lemma} defined as {gloss}")
    }
}
