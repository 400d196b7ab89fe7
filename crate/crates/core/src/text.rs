//! Tokenization, stopwords and stable hashing shared by several stages.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// 64-bit FNV-1a. Stable across platforms and runs, unlike `DefaultHasher`.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Lowercased runs of alphanumeric characters, in order.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Parses a line-oriented list: one entry per line, `#` starts a comment
/// line, entries are trimmed and lowercased, duplicates keep the first
/// occurrence.
pub fn parse_term_list(contents: &str) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut terms = Vec::new();
    for line in contents.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let term = line.to_lowercase();
        if seen.insert(term.clone()) {
            terms.push(term);
        }
    }
    terms
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn empty() -> Self {
        Stopwords {
            words: HashSet::new(),
        }
    }

    pub fn parse(contents: &str) -> Self {
        Stopwords {
            words: parse_term_list(contents).into_iter().collect(),
        }
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Lowercased word tokens with stopwords removed.
pub fn content_words(text: &str, stopwords: &Stopwords) -> Vec<String> {
    words(text)
        .into_iter()
        .filter(|w| !stopwords.contains(w))
        .collect()
}
