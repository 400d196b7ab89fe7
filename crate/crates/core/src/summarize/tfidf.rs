//! TF-IDF keyword extraction per cluster.
//!
//! Documents are individual reviews. Terms are lowercased unigrams plus
//! bigrams of adjacent tokens, formed after stopword removal. Term
//! frequency is `count / doc_length` and idf is smoothed:
//! `ln((1 + N) / (1 + df)) + 1`. A term's score in a cluster is the sum of
//! its tf-idf over the cluster's reviews.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::SummarizeError;
use crate::text::{content_words, Stopwords};

pub const DEFAULT_TOP_K: usize = 5;

/// Unigrams followed by adjacent bigrams.
pub fn terms(text: &str, stopwords: &Stopwords) -> Vec<String> {
    let words = content_words(text, stopwords);
    let bigrams: Vec<String> = words
        .windows(2)
        .map(|w| format!("{} {}", w[0], w[1]))
        .collect();
    let mut out = words;
    out.extend(bigrams);
    out
}

/// Term counts of one document and its length in terms.
fn term_counts(tokens: &[String]) -> (BTreeMap<&str, usize>, usize) {
    let mut counts = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.as_str()).or_insert(0) += 1;
    }
    (counts, tokens.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    pub vocabulary: BTreeMap<String, usize>,
    pub doc_count: usize,
    pub doc_freq: Vec<usize>,
    pub idf: Vec<f64>,
}

impl TfIdfModel {
    pub fn fit(docs: &[Vec<String>]) -> Self {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let (counts, _) = term_counts(doc);
            for term in counts.keys() {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        let n = docs.len();
        let mut vocabulary = BTreeMap::new();
        let mut doc_freq = Vec::with_capacity(df.len());
        let mut idf = Vec::with_capacity(df.len());
        for (i, (term, f)) in df.into_iter().enumerate() {
            vocabulary.insert(term.to_string(), i);
            doc_freq.push(f);
            idf.push(smoothed_idf(n, f));
        }
        TfIdfModel {
            vocabulary,
            doc_count: n,
            doc_freq,
            idf,
        }
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.vocabulary.get(term).map(|&i| self.idf[i])
    }

    pub fn doc_freq(&self, term: &str) -> Option<usize> {
        self.vocabulary.get(term).map(|&i| self.doc_freq[i])
    }

    /// tf-idf weight of every term in one tokenised document.
    pub fn weights(&self, tokens: &[String]) -> Vec<(String, f64)> {
        let (counts, len) = term_counts(tokens);
        if len == 0 {
            return Vec::new();
        }
        counts
            .into_iter()
            .filter_map(|(t, c)| {
                self.idf(t)
                    .map(|idf| (t.to_string(), c as f64 / len as f64 * idf))
            })
            .collect()
    }
}

pub fn smoothed_idf(doc_count: usize, doc_freq: usize) -> f64 {
    ((1.0 + doc_count as f64) / (1.0 + doc_freq as f64)).ln() + 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterKeywords {
    pub cluster_id: usize,
    pub top_terms: Vec<(String, f64)>,
}

impl ClusterKeywords {
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.top_terms.iter().map(|(t, _)| t.as_str())
    }
}

/// `(term, score)` pairs of one cluster.
pub type TermScores = Vec<(String, f64)>;

/// Full score table of every cluster, sorted by score descending then term.
pub fn cluster_term_scores(
    texts: &[&str],
    assignments: &[usize],
    n_clusters: usize,
    stopwords: &Stopwords,
) -> Result<(TfIdfModel, Vec<TermScores>), SummarizeError> {
    if texts.len() != assignments.len() {
        return Err(SummarizeError::LengthMismatch {
            texts: texts.len(),
            assignments: assignments.len(),
        });
    }
    if let Some(&bad) = assignments.iter().find(|&&a| a >= n_clusters) {
        return Err(SummarizeError::UnknownCluster(bad));
    }
    let mut sizes = vec![0usize; n_clusters];
    for &a in assignments {
        sizes[a] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(SummarizeError::EmptyCluster(empty));
    }

    let docs: Vec<Vec<String>> = texts.iter().map(|t| terms(t, stopwords)).collect();
    let model = TfIdfModel::fit(&docs);

    // Contributions are summed in sorted order so the totals do not depend
    // on the order reviews were supplied in.
    let mut contributions: Vec<HashMap<String, Vec<f64>>> = vec![HashMap::new(); n_clusters];
    for (doc, &cluster) in docs.iter().zip(assignments) {
        for (term, w) in model.weights(doc) {
            contributions[cluster].entry(term).or_default().push(w);
        }
    }
    let scores = contributions
        .into_iter()
        .map(|terms| {
            let mut scored: Vec<(String, f64)> = terms
                .into_iter()
                .map(|(t, mut ws)| {
                    ws.sort_by(f64::total_cmp);
                    (t, ws.iter().sum())
                })
                .collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            scored
        })
        .collect();
    Ok((model, scores))
}

/// Top `top_k` terms per cluster. Clusters are `0..n_clusters`; each must
/// have at least one review.
pub fn tfidf_top_keywords(
    texts: &[&str],
    assignments: &[usize],
    n_clusters: usize,
    top_k: usize,
    stopwords: &Stopwords,
) -> Result<Vec<ClusterKeywords>, SummarizeError> {
    let (_, scores) = cluster_term_scores(texts, assignments, n_clusters, stopwords)?;
    Ok(scores
        .into_iter()
        .enumerate()
        .map(|(cluster_id, mut s)| {
            s.truncate(top_k);
            ClusterKeywords {
                cluster_id,
                top_terms: s,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigrams_skip_stopwords() {
        let sw = Stopwords::english();
        assert_eq!(
            terms("I cannot cash out the coins", &sw),
            vec![
                "cannot",
                "cash",
                "out",
                "coins",
                "cannot cash",
                "cash out",
                "out coins"
            ]
        );
    }

    #[test]
    fn dominant_term_first() {
        let kw = tfidf_top_keywords(
            &["withdraw withdraw cash"],
            &[0],
            1,
            5,
            &Stopwords::english(),
        )
        .unwrap();
        assert_eq!(kw[0].top_terms[0].0, "withdraw");
    }

    #[test]
    fn idf_is_positive() {
        assert!((smoothed_idf(10, 10) - 1.0).abs() < 1e-15);
        assert!(smoothed_idf(10, 1) > smoothed_idf(10, 5));
    }

    #[test]
    fn empty_cluster_is_error() {
        let err =
            tfidf_top_keywords(&["a red packet"], &[0], 2, 5, &Stopwords::english()).unwrap_err();
        assert!(matches!(err, SummarizeError::EmptyCluster(1)));
    }

    #[test]
    fn all_stopword_doc_contributes_nothing() {
        let kw = tfidf_top_keywords(
            &["the and of", "fake coins"],
            &[0, 0],
            1,
            5,
            &Stopwords::english(),
        )
        .unwrap();
        assert!(kw[0]
            .terms()
            .all(|t| ["fake", "coins", "fake coins"].contains(&t)));
    }
}
