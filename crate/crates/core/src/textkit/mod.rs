//! Text normalization, identifier splitting and BM25 retrieval.

mod index;
pub mod porter;

pub use index::{
    bm25_score, rank_documents, Bm25Params, Bm25Scorer, FieldMap, FieldStats, FieldedDocument, Index, TextError,
};

use std::collections::HashSet;
use std::sync::OnceLock;

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Normalizes raw text into index terms.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    stopwords: HashSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self::with_stopword_list(DEFAULT_STOPWORDS)
    }
}

impl Tokenizer {
    /// Builds a tokenizer from a whitespace-separated word list; `#` starts a comment line.
    pub fn with_stopword_list(text: &str) -> Self {
        let stopwords = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .flat_map(str::split_whitespace)
            .map(str::to_lowercase)
            .collect();
        Self { stopwords }
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    /// Punctuation split, CamelCase and digit/letter split, case folding,
    /// stopword removal and Porter stemming, in that order. With `is_code`,
    /// each compound identifier is also kept whole ahead of its parts.
    pub fn tokenize(&self, text: &str, is_code: bool) -> Vec<String> {
        let mut out = Vec::new();
        for chunk in text.split(|c: char| !c.is_alphanumeric()) {
            if chunk.is_empty() {
                continue;
            }
            let parts = split_identifier(chunk);
            if is_code && parts.len() > 1 {
                self.push_term(chunk, &mut out);
            }
            for part in parts {
                self.push_term(part, &mut out);
            }
        }
        out
    }

    fn push_term(&self, raw: &str, out: &mut Vec<String>) {
        let folded = raw.to_lowercase();
        if !self.is_stopword(&folded) {
            out.push(porter::stem(&folded));
        }
    }
}

/// Tokenizes with the default stopword list.
pub fn tokenize(text: &str, is_code: bool) -> Vec<String> {
    static DEFAULT: OnceLock<Tokenizer> = OnceLock::new();
    DEFAULT.get_or_init(Tokenizer::default).tokenize(text, is_code)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Lower,
    Upper,
    Digit,
}

fn class_of(c: char) -> CharClass {
    if c.is_numeric() {
        CharClass::Digit
    } else if c.is_uppercase() {
        CharClass::Upper
    } else {
        CharClass::Lower
    }
}

/// Splits an alphanumeric run at CamelCase humps and letter/digit boundaries.
///
/// `parseXMLDocument2` becomes `parse`, `XML`, `Document`, `2`.
pub fn split_identifier(word: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = word.char_indices().collect();
    let mut parts = Vec::new();
    let mut start = 0;
    for i in 1..chars.len() {
        let prev = class_of(chars[i - 1].1);
        let cur = class_of(chars[i].1);
        let boundary = match (prev, cur) {
            (CharClass::Lower, CharClass::Upper) => true,
            (CharClass::Digit, c) | (c, CharClass::Digit) if c != CharClass::Digit => true,
            // "XMLDocument": split before the last capital of an acronym run.
            (CharClass::Upper, CharClass::Upper) => {
                chars.get(i + 1).is_some_and(|&(_, n)| class_of(n) == CharClass::Lower)
            }
            _ => false,
        };
        if boundary {
            let at = chars[i].0;
            parts.push(&word[start..at]);
            start = at;
        }
    }
    if start < word.len() {
        parts.push(&word[start..]);
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn camel_case_keeps_compound_for_code() {
        assert_eq!(tokenize("getFooBar", true), ["getfoobar", "get", "foo", "bar"]);
        assert_eq!(tokenize("getFooBar", false), ["get", "foo", "bar"]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("", true).is_empty());
        assert!(tokenize(" ,;() ", false).is_empty());
    }

    #[test]
    fn prose_is_stopped_and_stemmed() {
        // the -> stopword; fails -> fail; parsing -> pars (Porter step 1b).
        assert_eq!(tokenize("The parser fails parsing!", false), ["parser", "fail", "pars"]);
    }

    #[test]
    fn identifier_splitting() {
        assert_eq!(split_identifier("parseXMLDocument2"), ["parse", "XML", "Document", "2"]);
        assert_eq!(split_identifier("HTTPServer"), ["HTTP", "Server"]);
        assert_eq!(split_identifier("utf8Decoder"), ["utf", "8", "Decoder"]);
        assert_eq!(split_identifier("lower"), ["lower"]);
        assert_eq!(split_identifier("ABC"), ["ABC"]);
    }

    #[test]
    fn snake_case_splits_on_underscore() {
        assert_eq!(tokenize("max_value", true), ["max", "valu"]);
    }

    #[test]
    fn java_keywords_are_stopwords() {
        assert_eq!(tokenize("return new Foo();", true), ["foo"]);
    }

    #[test]
    fn custom_stopwords() {
        let t = Tokenizer::with_stopword_list("# none\nfoo\n");
        assert_eq!(t.tokenize("foo the", false), ["the"]);
    }
}
