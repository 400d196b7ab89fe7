//! Red-packet pop-up identification from hooked method calls.
//!
//! Two signals decide: which method displayed the window (matched against
//! rule tables for system dialogs, subclasses, third-party libraries and
//! hand-built views), and how close the window's text is to a fixed set of
//! twelve generic red-packet texts. A pop-up is a red packet when its best
//! cosine score against those texts is at least the threshold (0.6).

use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{cosine_similarity, EmbedError, Embedder, TextVector};

const DEFAULT_RULES: &str = include_str!("../data/popup_rules.toml");
const DEFAULT_GENERIC_TEXTS: &str = include_str!("../data/generic_texts.txt");

pub const GENERIC_TEXT_COUNT: usize = 12;
pub const DEFAULT_THRESHOLD: f64 = 0.6;

#[derive(Debug, Error)]
pub enum PopupError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid rule table: {0}")]
    Rules(String),
    #[error("expected exactly {GENERIC_TEXT_COUNT} generic texts, found {0}")]
    GenericTextCount(usize),
    #[error("pop-up carries no text to score")]
    Undecidable,
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopupEvent {
    pub class_name: String,
    pub method_name: String,
    #[serde(default)]
    pub resource_id: Option<String>,
    #[serde(default)]
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopupType {
    SystemClass,
    CustomClass,
    ThirdParty,
    CustomView,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ClassMethodRule {
    pub classes: Vec<String>,
    pub methods: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct LibraryRule {
    pub libraries: Vec<String>,
    pub methods: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ViewRule {
    pub classes: Vec<String>,
    pub methods: Vec<String>,
    pub resource_markers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct RuleTables {
    pub system: ClassMethodRule,
    pub third_party: LibraryRule,
    pub custom_view: ViewRule,
}

impl Default for RuleTables {
    fn default() -> Self {
        Self::parse(DEFAULT_RULES).expect("bundled pop-up rules")
    }
}

impl RuleTables {
    pub fn parse(contents: &str) -> Result<Self, PopupError> {
        toml::from_str(contents).map_err(|e| PopupError::Rules(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PopupError> {
        let contents = fs::read_to_string(path).map_err(|source| PopupError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&contents)
    }

    fn is_third_party(&self, class_name: &str) -> bool {
        let class = compact(class_name);
        self.third_party
            .libraries
            .iter()
            .map(|l| compact(l))
            .any(|lib| !lib.is_empty() && class.contains(&lib))
    }
}

/// `com.example.ui.RedPacketDialog$Builder` -> `Builder`.
fn simple_name(class_name: &str) -> &str {
    class_name.rsplit(['.', '$']).next().unwrap_or(class_name)
}

fn compact(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

fn contains(list: &[String], item: &str) -> bool {
    list.iter().any(|x| x == item)
}

/// Maps a hooked method call onto a pop-up type, or `None` when no rule
/// applies. Rules are tried in order: system class, third-party library,
/// custom view, custom class.
pub fn classify_popup_event(event: &PopupEvent, rules: &RuleTables) -> Option<PopupType> {
    let class = simple_name(event.class_name.trim());
    let method = event.method_name.trim();
    if class.is_empty() || method.is_empty() {
        return None;
    }
    let system_show = contains(&rules.system.methods, method);

    if contains(&rules.system.classes, class) && system_show {
        return Some(PopupType::SystemClass);
    }
    if rules.is_third_party(&event.class_name) && contains(&rules.third_party.methods, method) {
        return Some(PopupType::ThirdParty);
    }
    let view_class = contains(&rules.custom_view.classes, class);
    if view_class && contains(&rules.custom_view.methods, method) {
        let rid = event.resource_id.as_deref().unwrap_or("").to_lowercase();
        let marked = rules
            .custom_view
            .resource_markers
            .iter()
            .any(|m| rid.contains(&m.to_lowercase()));
        return marked.then_some(PopupType::CustomView);
    }
    let known = contains(&rules.system.classes, class)
        || view_class
        || rules.is_third_party(&event.class_name);
    if system_show && !known {
        return Some(PopupType::CustomClass);
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericTextSet {
    texts: Vec<String>,
}

impl Default for GenericTextSet {
    fn default() -> Self {
        Self::parse(DEFAULT_GENERIC_TEXTS).expect("bundled generic texts")
    }
}

impl GenericTextSet {
    /// One text per line; blank lines and `#` comments are ignored.
    pub fn parse(contents: &str) -> Result<Self, PopupError> {
        let texts: Vec<String> = contents
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        Self::new(texts)
    }

    pub fn new(texts: Vec<String>) -> Result<Self, PopupError> {
        if texts.len() != GENERIC_TEXT_COUNT || texts.iter().any(|t| t.trim().is_empty()) {
            return Err(PopupError::GenericTextCount(
                texts.iter().filter(|t| !t.trim().is_empty()).count(),
            ));
        }
        Ok(GenericTextSet { texts })
    }

    pub fn load(path: &Path) -> Result<Self, PopupError> {
        let contents = fs::read_to_string(path).map_err(|source| PopupError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&contents)
    }

    pub fn texts(&self) -> &[String] {
        &self.texts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RedPacketVerdict {
    pub max_score: f64,
    pub matched_index: usize,
    pub is_red_packet: bool,
    pub threshold: f64,
}

/// Scores pop-up text against the generic set. Generic vectors are embedded
/// on first use and cached for the scorer's lifetime.
pub struct RedPacketScorer<E: Embedder> {
    generic: GenericTextSet,
    embedder: E,
    threshold: f64,
    vectors: OnceLock<Vec<TextVector>>,
}

impl<E: Embedder> RedPacketScorer<E> {
    pub fn new(generic: GenericTextSet, embedder: E) -> Self {
        Self::with_threshold(generic, embedder, DEFAULT_THRESHOLD)
    }

    pub fn with_threshold(generic: GenericTextSet, embedder: E, threshold: f64) -> Self {
        RedPacketScorer {
            generic,
            embedder,
            threshold,
            vectors: OnceLock::new(),
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn generic_vectors(&self) -> Result<&[TextVector], PopupError> {
        if let Some(v) = self.vectors.get() {
            return Ok(v);
        }
        let texts: Vec<&str> = self.generic.texts.iter().map(String::as_str).collect();
        let vectors = self.embedder.embed(&texts)?;
        Ok(self.vectors.get_or_init(|| vectors))
    }

    /// Joins the event's texts with single spaces, embeds once and takes
    /// the best cosine against the generic set (lowest index on ties).
    pub fn score_popup_text(&self, event: &PopupEvent) -> Result<RedPacketVerdict, PopupError> {
        let parts: Vec<&str> = event
            .texts
            .iter()
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .collect();
        if parts.is_empty() {
            return Err(PopupError::Undecidable);
        }
        self.score_text(&parts.join(" "))
    }

    pub fn score_text(&self, text: &str) -> Result<RedPacketVerdict, PopupError> {
        let query = self.embedder.embed_one(text)?;
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, g) in self.generic_vectors()?.iter().enumerate() {
            let s = cosine_similarity(query.values(), g.values())?;
            if s > best.0 {
                best = (s, i);
            }
        }
        Ok(RedPacketVerdict {
            max_score: best.0,
            matched_index: best.1,
            is_red_packet: best.0 >= self.threshold,
            threshold: self.threshold,
        })
    }
}

/// Outcome of running both signals over one event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopupDetection {
    pub popup_type: Option<PopupType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<RedPacketVerdict>,
    pub is_red_packet: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Classifies the event and, if it is a pop-up, scores its text.
pub fn detect_event<E: Embedder>(
    event: &PopupEvent,
    rules: &RuleTables,
    scorer: &RedPacketScorer<E>,
) -> PopupDetection {
    let popup_type = classify_popup_event(event, rules);
    if popup_type.is_none() {
        return PopupDetection {
            popup_type,
            verdict: None,
            is_red_packet: false,
            error: None,
        };
    }
    match scorer.score_popup_text(event) {
        Ok(v) => PopupDetection {
            popup_type,
            is_red_packet: v.is_red_packet,
            verdict: Some(v),
            error: None,
        },
        Err(e) => PopupDetection {
            popup_type,
            verdict: None,
            is_red_packet: false,
            error: Some(e.to_string()),
        },
    }
}
