//! Small text utilities shared by generation and the baselines.

use alloc::string::String;
use alloc::vec::Vec;

/// Lowercased alphanumeric runs; everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            out.push(core::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Case-folded, whitespace-normalised form used for text-level equality of
/// answer choices.
pub fn fold(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

/// Cuts `text` to at most `max_chars` characters on a word boundary and
/// appends `…`. Text that already fits is returned unchanged.
pub fn truncate_words(text: &str, max_chars: usize) -> String {
    let text = text.trim();
    if text.chars().count() <= max_chars {
        return String::from(text);
    }
    // leave room for the ellipsis
    let budget = max_chars.saturating_sub(1);
    let cut = text.char_indices().nth(budget).map_or(text.len(), |(i, _)| i);
    let head = &text[..cut];
    let next_is_space = text[cut..].starts_with(char::is_whitespace);
    let head = if next_is_space {
        head
    } else {
        match head.rfind(char::is_whitespace) {
            Some(i) if i > 0 => &head[..i],
            _ => head,
        }
    };
    let head = head.trim_end_matches(|c: char| c.is_whitespace() || matches!(c, ',' | ';' | ':'));
    let mut out = String::from(head);
    out.push('…');
    out
}

/// Finds how `lemma` appears in `sentence` (e.g. `nestle` → `nestled`).
///
/// Tries an exact word-bounded, case-insensitive match first, then an
/// inflected single-word form sharing the lemma's stem.
pub fn surface_form<'a>(sentence: &'a str, lemma: &str) -> Option<&'a str> {
    let lemma = lemma.trim();
    if lemma.is_empty() {
        return None;
    }
    let lower = sentence.to_lowercase();
    let needle = lemma.to_lowercase();
    // to_lowercase can change byte lengths for some scripts; only use the
    // byte-offset shortcut when it does not
    if lower.len() == sentence.len() {
        let mut from = 0;
        while let Some(pos) = lower[from..].find(&needle) {
            let start = from + pos;
            let end = start + needle.len();
            let left_ok = lower[..start].chars().next_back().is_none_or(|c| !c.is_alphanumeric());
            let right_ok = lower[end..].chars().next().is_none_or(|c| !c.is_alphanumeric());
            if left_ok && right_ok {
                return Some(&sentence[start..end]);
            }
            from = start + needle.len().max(1);
            if from >= lower.len() {
                break;
            }
        }
    }
    if lemma.contains(char::is_whitespace) {
        return None;
    }
    let stem = inflection_stem(&needle);
    if stem.chars().count() < 3 {
        return None;
    }
    words_with_spans(sentence).find(|w| {
        let lw = w.to_lowercase();
        let extra = lw.chars().count().saturating_sub(stem.chars().count());
        lw.starts_with(stem) && extra <= 4
    })
}

fn inflection_stem(lemma: &str) -> &str {
    for suffix in ["ie", "e", "y"] {
        if let Some(s) = lemma.strip_suffix(suffix) {
            return s;
        }
    }
    lemma
}

fn words_with_spans(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| !(c.is_alphanumeric() || c == '\'' || c == '-')).filter(|w| !w.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn tokenize_lowercases_and_splits() {
        assert_eq!(tokenize("The baby-nestled, HER head!"), vec!["the", "baby", "nestled", "her", "head"]);
        assert!(tokenize(" ;; ").is_empty());
    }

    #[test]
    fn truncation_on_word_boundary() {
        assert_eq!(truncate_words("short gloss", 120), "short gloss");
        let long = "to run away from the police and all other people who might be looking for you";
        let t = truncate_words(long, 20);
        assert!(t.chars().count() <= 20, "{t}");
        assert_eq!(t, "to run away from…");
    }

    #[test]
    fn surface_forms() {
        assert_eq!(surface_form("The baby nestled her head", "nestle"), Some("nestled"));
        assert_eq!(surface_form("the toddler could count", "count"), Some("count"));
        assert_eq!(surface_form("he is the poet laureate of Arkansas", "poet laureate"), Some("poet laureate"));
        assert_eq!(surface_form("The thief eluded the police", "elude"), Some("eluded"));
        assert_eq!(surface_form("nothing here", "widget"), None);
        // word boundary: "count" must not match inside "discount"
        assert_eq!(surface_form("a discount", "count"), None);
    }
}
