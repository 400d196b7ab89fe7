//! Cluster summaries: TF-IDF keywords, LLM prompting, and an extractive
//! fallback for when no completion endpoint is available.

mod prompt;
mod tfidf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::provider::{self, ProviderError, RetryPolicy};

pub use prompt::{
    rank_by_distance, render_prompt, PromptOptions, PromptTemplate, RankedReview, RenderedPrompt,
    DEFAULT_MAX_REVIEWS, REVIEWS_PLACEHOLDER,
};
pub use tfidf::{
    cluster_term_scores, smoothed_idf, terms, tfidf_top_keywords, ClusterKeywords, TermScores,
    TfIdfModel, DEFAULT_TOP_K,
};

#[derive(Debug, Error)]
pub enum SummarizeError {
    #[error("{texts} texts but {assignments} assignments")]
    LengthMismatch { texts: usize, assignments: usize },
    #[error("assignment refers to unknown cluster {0}")]
    UnknownCluster(usize),
    #[error("cluster {0} has no reviews")]
    EmptyCluster(usize),
    #[error("cluster has no reviews to summarize")]
    NoReviews,
    #[error("prompt template lacks the {{reviews}} placeholder")]
    MissingPlaceholder,
    #[error("character budget {0} cannot fit a single review")]
    BudgetTooSmall(usize),
    #[error("completion provider: {0}")]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Chat-completion style text generation.
pub trait CompletionClient {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError>;
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
}

#[derive(Deserialize)]
struct ChatReply {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatReplyMessage,
}

#[derive(Deserialize)]
struct ChatReplyMessage {
    content: String,
}

/// Posts `{model, messages}` and reads `choices[0].message.content`.
#[derive(Debug, Clone)]
pub struct HttpCompletionClient {
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
    pub retry: RetryPolicy,
}

impl HttpCompletionClient {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        HttpCompletionClient {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key: provider::api_key_from_env("LLM_API_KEY"),
            retry: RetryPolicy::default(),
        }
    }
}

impl CompletionClient for HttpCompletionClient {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        let body = ChatRequest {
            model: &self.model,
            messages: vec![ChatMessage {
                role: "user",
                content: prompt,
            }],
        };
        let reply: ChatReply = self
            .retry
            .run(|| provider::post_json(&self.endpoint, self.api_key.as_deref(), &body))?;
        reply
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| ProviderError::Protocol("no choices in completion".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryMethod {
    Llm,
    Extractive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub cluster_id: usize,
    pub summary: String,
    pub method: SummaryMethod,
    /// Number of reviews the summary was derived from.
    pub sample_size: usize,
}

const ASCII_TERMINATORS: [char; 3] = ['.', '!', '?'];
const CJK_TERMINATORS: [char; 3] = ['。', '！', '？'];

/// The first sentence of `text`, terminator included. A `.`, `!` or `?`
/// only ends a sentence when followed by whitespace or the end of text, so
/// "3.5 yuan" stays whole.
pub fn first_sentence(text: &str) -> Option<&str> {
    let text = text.trim();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let ends = CJK_TERMINATORS.contains(&c)
            || (ASCII_TERMINATORS.contains(&c)
                && chars.peek().is_none_or(|&(_, next)| next.is_whitespace()));
        if ends {
            let s = text[..i + c.len_utf8()].trim();
            return if s
                .chars()
                .all(|ch| ASCII_TERMINATORS.contains(&ch) || CJK_TERMINATORS.contains(&ch))
            {
                None
            } else {
                Some(s)
            };
        }
    }
    if text.is_empty() {
        None
    } else {
        Some(text)
    }
}

fn strip_terminators(s: &str) -> &str {
    s.trim_end_matches(|c| ASCII_TERMINATORS.contains(&c) || CJK_TERMINATORS.contains(&c))
        .trim_end()
}

/// `"<nearest review's first sentence> (keywords: a, b, c)."`
pub fn extractive_summary(nearest_review: &str, keywords: &ClusterKeywords) -> String {
    let top: Vec<&str> = keywords.terms().take(3).collect();
    let segment = first_sentence(nearest_review)
        .map(strip_terminators)
        .unwrap_or("");
    match (segment.is_empty(), top.is_empty()) {
        (false, false) => format!("{segment} (keywords: {}).", top.join(", ")),
        (false, true) => format!("{segment}."),
        (true, false) => format!("Reviews mention {}.", top.join(", ")),
        (true, true) => format!("Cluster {} reviews.", keywords.cluster_id),
    }
}

/// Summarises one cluster. With a client, the prompt is sent and the first
/// sentence of the reply is kept; if the prompt cannot be built, the
/// provider fails, or the reply is empty, the extractive fallback is used.
pub fn summarize_cluster(
    keywords: &ClusterKeywords,
    reviews: &[RankedReview<'_>],
    template: &PromptTemplate,
    options: &PromptOptions,
    client: Option<&dyn CompletionClient>,
) -> Result<ClusterSummary, SummarizeError> {
    if reviews.is_empty() {
        return Err(SummarizeError::NoReviews);
    }
    if let Some(client) = client {
        let attempt = render_prompt(template, reviews, options).and_then(|prompt| {
            let reply = client.complete(&prompt.text)?;
            Ok((prompt, reply))
        });
        match attempt {
            Ok((prompt, reply)) => {
                if let Some(sentence) = first_sentence(&reply) {
                    return Ok(ClusterSummary {
                        cluster_id: keywords.cluster_id,
                        summary: sentence.to_string(),
                        method: SummaryMethod::Llm,
                        sample_size: prompt.included.len(),
                    });
                }
                log::warn!(
                    "cluster {}: empty completion, using extractive summary",
                    keywords.cluster_id
                );
            }
            Err(e) => {
                log::warn!(
                    "cluster {}: {e}; using extractive summary",
                    keywords.cluster_id
                );
            }
        }
    }
    let nearest = rank_by_distance(reviews)[0];
    Ok(ClusterSummary {
        cluster_id: keywords.cluster_id,
        summary: extractive_summary(reviews[nearest].text, keywords),
        method: SummaryMethod::Extractive,
        sample_size: 1,
    })
}
