//! Prompt construction for cluster summaries.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SummarizeError;

pub const REVIEWS_PLACEHOLDER: &str = "{reviews}";
pub const DEFAULT_MAX_REVIEWS: usize = 200;

const DEFAULT_TEMPLATE: &str = include_str!("../../data/prompt_template.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    text: String,
}

impl PromptTemplate {
    pub fn new(text: impl Into<String>) -> Result<Self, SummarizeError> {
        let text = text.into();
        if !text.contains(REVIEWS_PLACEHOLDER) {
            return Err(SummarizeError::MissingPlaceholder);
        }
        Ok(PromptTemplate { text })
    }

    pub fn load(path: &Path) -> Result<Self, SummarizeError> {
        Self::new(std::fs::read_to_string(path)?)
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate::new(DEFAULT_TEMPLATE).expect("bundled template has a placeholder")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptOptions {
    pub max_reviews: usize,
    /// Upper bound on the rendered prompt length, in characters.
    pub char_budget: Option<usize>,
}

impl Default for PromptOptions {
    fn default() -> Self {
        PromptOptions {
            max_reviews: DEFAULT_MAX_REVIEWS,
            char_budget: None,
        }
    }
}

/// A cluster member with its distance to the centroid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedReview<'a> {
    pub text: &'a str,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedPrompt {
    pub text: String,
    /// Indices into the input slice of the reviews that were inserted, in
    /// prompt order.
    pub included: Vec<usize>,
}

/// Input indices ordered nearest-first, ties by input position.
pub fn rank_by_distance(reviews: &[RankedReview<'_>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..reviews.len()).collect();
    order.sort_by(|&a, &b| {
        reviews[a]
            .distance
            .total_cmp(&reviews[b].distance)
            .then(a.cmp(&b))
    });
    order
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Inserts the centroid-nearest reviews as numbered lines. Reviews that
/// would push the prompt past the character budget are dropped whole.
pub fn render_prompt(
    template: &PromptTemplate,
    reviews: &[RankedReview<'_>],
    options: &PromptOptions,
) -> Result<RenderedPrompt, SummarizeError> {
    if reviews.is_empty() {
        return Err(SummarizeError::NoReviews);
    }
    let frame_len = template.text.chars().count() - REVIEWS_PLACEHOLDER.chars().count();
    let mut block = String::new();
    let mut block_len = 0;
    let mut included = Vec::new();
    for idx in rank_by_distance(reviews)
        .into_iter()
        .take(options.max_reviews)
    {
        let line = format!("{}. {}", included.len() + 1, one_line(reviews[idx].text));
        let sep = usize::from(!block.is_empty());
        let line_len = line.chars().count();
        if let Some(budget) = options.char_budget {
            if frame_len + block_len + sep + line_len > budget {
                break;
            }
        }
        if sep == 1 {
            block.push('\n');
        }
        block.push_str(&line);
        block_len += sep + line_len;
        included.push(idx);
    }
    if included.is_empty() {
        return Err(SummarizeError::BudgetTooSmall(
            options.char_budget.unwrap_or(0),
        ));
    }
    Ok(RenderedPrompt {
        text: template.text.replacen(REVIEWS_PLACEHOLDER, &block, 1),
        included,
    })
}
