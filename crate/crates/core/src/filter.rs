//! Keyword filtering and punctuation segmentation.
//!
//! A review is cut into short segments at punctuation; only segments that
//! mention at least one keyword are kept. English single-word terms match on
//! word boundaries (so "scam" does not hit "scampi"), English phrases and
//! Chinese terms match as substrings.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{MarketId, ReviewRecord};
use crate::text::parse_term_list;

const DEFAULT_EN: &str = include_str!("../data/keywords_en.txt");
const DEFAULT_ZH: &str = include_str!("../data/keywords_zh.txt");

/// Segment delimiters, ASCII and CJK.
pub const DELIMITERS: [char; 12] = [
    '.', '!', '?', ';', ',', '…', '。', '！', '？', '；', '，', '\n',
];

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("keyword file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("keyword set for {language:?} is empty")]
    EmptyKeywordSet { language: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordSet {
    language: String,
    terms: Vec<String>,
}

impl KeywordSet {
    /// Builds a set from raw terms: lowercased, trimmed, deduplicated
    /// keeping first occurrence.
    pub fn new<I, S>(language: &str, terms: I) -> Result<Self, FilterError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let joined: Vec<String> = terms.into_iter().map(|t| t.as_ref().to_string()).collect();
        Self::parse(&joined.join("\n"), language)
    }

    pub fn parse(contents: &str, language: &str) -> Result<Self, FilterError> {
        let terms = parse_term_list(contents);
        if terms.is_empty() {
            return Err(FilterError::EmptyKeywordSet {
                language: language.to_string(),
            });
        }
        Ok(KeywordSet {
            language: language.to_lowercase(),
            terms,
        })
    }

    pub fn load(path: &Path, language: &str) -> Result<Self, FilterError> {
        let contents = fs::read_to_string(path).map_err(|source| FilterError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&contents, language)
    }

    pub fn default_english() -> Self {
        Self::parse(DEFAULT_EN, "en").expect("bundled English keywords")
    }

    pub fn default_chinese() -> Self {
        Self::parse(DEFAULT_ZH, "zh").expect("bundled Chinese keywords")
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_english(&self) -> bool {
        self.language == "en" || self.language.starts_with("en-")
    }
}

/// Splits `text` at the delimiter set, trimming each piece and dropping
/// empty ones. Every segment is a slice of `text`.
pub fn segment_text(text: &str) -> Vec<&str> {
    text.split(&DELIMITERS[..])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum MatchRule {
    WordBoundary,
    Substring,
}

/// Compiled matcher over one or more keyword sets.
#[derive(Debug, Clone)]
pub struct KeywordFilter {
    terms: Vec<(String, MatchRule)>,
}

impl KeywordFilter {
    pub fn new(sets: &[KeywordSet]) -> Self {
        let mut terms = Vec::new();
        for set in sets {
            for t in set.terms() {
                let rule = if set.is_english() && !t.contains(char::is_whitespace) {
                    MatchRule::WordBoundary
                } else {
                    MatchRule::Substring
                };
                if !terms.iter().any(|(existing, _)| existing == t) {
                    terms.push((t.clone(), rule));
                }
            }
        }
        KeywordFilter { terms }
    }

    /// Keywords occurring in `segment`, case-insensitively.
    pub fn matches(&self, segment: &str) -> BTreeSet<String> {
        let lower = segment.to_lowercase();
        self.terms
            .iter()
            .filter(|(term, rule)| match rule {
                MatchRule::Substring => lower.contains(term.as_str()),
                MatchRule::WordBoundary => contains_word(&lower, term),
            })
            .map(|(t, _)| t.clone())
            .collect()
    }

    /// Segments of `text` that carry at least one keyword, with the union of
    /// matched terms.
    pub fn extract<'a>(&self, text: &'a str) -> (Vec<&'a str>, BTreeSet<String>) {
        let mut kept = Vec::new();
        let mut matched = BTreeSet::new();
        for seg in segment_text(text) {
            let hits = self.matches(seg);
            if !hits.is_empty() {
                kept.push(seg);
                matched.extend(hits);
            }
        }
        (kept, matched)
    }

    pub fn extract_review(&self, review: &ReviewRecord) -> Option<RedPacketReview> {
        let (segments, matched) = self.extract(&review.text);
        if segments.is_empty() {
            return None;
        }
        let retained: Vec<String> = segments.into_iter().map(str::to_string).collect();
        Some(RedPacketReview {
            review_id: review.review_id.clone(),
            app_id: review.app_id.clone(),
            market: review.market.clone(),
            category: review.category.clone(),
            rating: review.rating,
            language: review.language.clone(),
            joined_text: retained.join(" "),
            retained_segments: retained,
            matched_terms: matched,
            source_text: None,
        })
    }
}

fn contains_word(haystack: &str, word: &str) -> bool {
    if word.is_empty() {
        return false;
    }
    haystack.match_indices(word).any(|(start, _)| {
        let before = haystack[..start].chars().next_back();
        let after = haystack[start + word.len()..].chars().next();
        !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
    })
}

/// The red-packet part of a review, plus the metadata later stages need.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedPacketReview {
    pub review_id: String,
    pub app_id: String,
    pub market: MarketId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    pub rating: u8,
    pub language: String,
    pub retained_segments: Vec<String>,
    pub joined_text: String,
    pub matched_terms: BTreeSet<String>,
    /// Pre-translation `joined_text`, set once the review has been translated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_text: Option<String>,
}

impl RedPacketReview {
    pub fn is_low_rating(&self) -> bool {
        self.rating <= 2
    }
}

pub fn extract_red_packet_review(
    review: &ReviewRecord,
    sets: &[KeywordSet],
) -> Option<RedPacketReview> {
    KeywordFilter::new(sets).extract_review(review)
}
