//! Dual-annotator labelling state: two tasks per review, consensus on
//! agreement, adjudication on disagreement.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use reckmine_core::sentiment::{Label, LabeledText, Provenance};

/// Each review is labelled by exactly this many distinct annotators.
pub const ANNOTATORS_PER_REVIEW: usize = 2;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Forbidden(String),
    #[error("{0}")]
    Invalid(String),
    #[error("snapshot {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },
}

/// A review waiting to be labelled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueItem {
    pub review_id: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Pending,
    Labeled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationTask {
    pub task_id: u64,
    pub review_id: String,
    pub text: String,
    pub assigned_annotator: Option<String>,
    pub status: TaskStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatorLabel {
    pub annotator: String,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjudication {
    pub review_id: String,
    pub text: String,
    pub labels: Vec<AnnotatorLabel>,
    pub final_label: Option<Label>,
    pub resolver: Option<String>,
}

impl Adjudication {
    pub fn is_open(&self) -> bool {
        self.final_label.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewStatus {
    /// Fewer than two labels so far.
    Awaiting,
    Consensus,
    Conflict,
    Resolved,
}

/// Annotation state of one review after a label is submitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReviewState {
    pub review_id: String,
    pub labels: Vec<AnnotatorLabel>,
    pub status: ReviewStatus,
    pub consensus: Option<Label>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub reviews: usize,
    pub tasks: usize,
    pub tasks_labeled: usize,
    pub tasks_unassigned: usize,
    pub consensus: usize,
    pub open_adjudications: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct State {
    items: Vec<QueueItem>,
    /// Task `2i + j` is the j-th task of review `i`.
    tasks: Vec<AnnotationTask>,
    adjudications: Vec<Adjudication>,
}

#[derive(Debug)]
pub struct AnnotationStore {
    state: State,
    index: HashMap<String, usize>,
    snapshot: Option<PathBuf>,
}

impl PartialEq for AnnotationStore {
    fn eq(&self, other: &Self) -> bool {
        self.state == other.state
    }
}

impl AnnotationStore {
    /// Fresh store with two unassigned tasks per review, in queue order.
    pub fn new(items: Vec<QueueItem>) -> Result<Self, StoreError> {
        let mut tasks = Vec::with_capacity(items.len() * ANNOTATORS_PER_REVIEW);
        for item in &items {
            for _ in 0..ANNOTATORS_PER_REVIEW {
                tasks.push(AnnotationTask {
                    task_id: tasks.len() as u64,
                    review_id: item.review_id.clone(),
                    text: item.text.clone(),
                    assigned_annotator: None,
                    status: TaskStatus::Pending,
                    label: None,
                });
            }
        }
        Self::from_state(
            State {
                items,
                tasks,
                adjudications: Vec::new(),
            },
            None,
        )
    }

    fn from_state(state: State, snapshot: Option<PathBuf>) -> Result<Self, StoreError> {
        let mut index = HashMap::new();
        for (i, item) in state.items.iter().enumerate() {
            if index.insert(item.review_id.clone(), i).is_some() {
                return Err(StoreError::Invalid(format!(
                    "duplicate review id {}",
                    item.review_id
                )));
            }
        }
        Ok(AnnotationStore {
            state,
            index,
            snapshot,
        })
    }

    /// Resumes from `path` when it exists, otherwise starts a fresh queue
    /// from `items`. Every later mutation rewrites the snapshot.
    pub fn open(path: &Path, items: Vec<QueueItem>) -> Result<Self, StoreError> {
        let snapshot_err = |reason: String| StoreError::Snapshot {
            path: path.to_path_buf(),
            reason,
        };
        let mut store = match fs::read_to_string(path) {
            Ok(text) => {
                let state: State =
                    serde_json::from_str(&text).map_err(|e| snapshot_err(e.to_string()))?;
                Self::from_state(state, None)?
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => Self::new(items)?,
            Err(e) => return Err(snapshot_err(e.to_string())),
        };
        store.snapshot = Some(path.to_path_buf());
        store.persist()?;
        Ok(store)
    }

    fn persist(&self) -> Result<(), StoreError> {
        let Some(path) = &self.snapshot else {
            return Ok(());
        };
        let err = |e: io::Error| StoreError::Snapshot {
            path: path.clone(),
            reason: e.to_string(),
        };
        let text = serde_json::to_string(&self.state).map_err(|e| err(e.into()))?;
        // write-then-rename so a crash never leaves a torn snapshot
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text).map_err(err)?;
        fs::rename(&tmp, path).map_err(err)
    }

    pub fn items(&self) -> &[QueueItem] {
        &self.state.items
    }

    pub fn tasks(&self) -> &[AnnotationTask] {
        &self.state.tasks
    }

    fn review_tasks(&self, review: usize) -> &[AnnotationTask] {
        let start = review * ANNOTATORS_PER_REVIEW;
        &self.state.tasks[start..start + ANNOTATORS_PER_REVIEW]
    }

    /// The annotator's oldest pending task; if none, claims the first
    /// unassigned task of the oldest review this annotator has no task for.
    pub fn assign_task(&mut self, annotator: &str) -> Result<Option<AnnotationTask>, StoreError> {
        if annotator.is_empty() {
            return Err(StoreError::Invalid("annotator id is empty".into()));
        }
        if let Some(t) = self.state.tasks.iter().find(|t| {
            t.status == TaskStatus::Pending && t.assigned_annotator.as_deref() == Some(annotator)
        }) {
            return Ok(Some(t.clone()));
        }
        let claim = (0..self.state.items.len()).find_map(|review| {
            let tasks = self.review_tasks(review);
            if tasks
                .iter()
                .any(|t| t.assigned_annotator.as_deref() == Some(annotator))
            {
                return None;
            }
            tasks
                .iter()
                .find(|t| t.assigned_annotator.is_none())
                .map(|t| t.task_id)
        });
        let Some(id) = claim else {
            return Ok(None);
        };
        let task = &mut self.state.tasks[id as usize];
        task.assigned_annotator = Some(annotator.to_string());
        let task = task.clone();
        self.persist()?;
        Ok(Some(task))
    }

    /// Records `annotator`'s label for a task they hold.
    pub fn submit_label(
        &mut self,
        task_id: u64,
        label: Label,
        annotator: &str,
    ) -> Result<ReviewState, StoreError> {
        let task = self
            .state
            .tasks
            .get(task_id as usize)
            .ok_or_else(|| StoreError::NotFound(format!("task {task_id}")))?;
        if task.assigned_annotator.as_deref() != Some(annotator) {
            return Err(StoreError::Forbidden(format!(
                "task {task_id} is not assigned to {annotator}"
            )));
        }
        if task.status == TaskStatus::Labeled {
            return Err(StoreError::Conflict(format!(
                "task {task_id} is already labeled"
            )));
        }
        let review = self.index[&task.review_id];
        let task = &mut self.state.tasks[task_id as usize];
        task.status = TaskStatus::Labeled;
        task.label = Some(label);

        let labels = self.labels_of(review);
        if labels.len() == ANNOTATORS_PER_REVIEW && labels[0].label != labels[1].label {
            let item = &self.state.items[review];
            self.state.adjudications.push(Adjudication {
                review_id: item.review_id.clone(),
                text: item.text.clone(),
                labels,
                final_label: None,
                resolver: None,
            });
        }
        self.persist()?;
        Ok(self.review_state(review))
    }

    fn labels_of(&self, review: usize) -> Vec<AnnotatorLabel> {
        self.review_tasks(review)
            .iter()
            .filter_map(|t| {
                Some(AnnotatorLabel {
                    annotator: t.assigned_annotator.clone()?,
                    label: t.label?,
                })
            })
            .collect()
    }

    fn adjudication(&self, review_id: &str) -> Option<&Adjudication> {
        self.state
            .adjudications
            .iter()
            .find(|a| a.review_id == review_id)
    }

    fn review_state(&self, review: usize) -> ReviewState {
        let review_id = self.state.items[review].review_id.clone();
        let labels = self.labels_of(review);
        let (status, consensus) = if labels.len() < ANNOTATORS_PER_REVIEW {
            (ReviewStatus::Awaiting, None)
        } else if labels[0].label == labels[1].label {
            (ReviewStatus::Consensus, Some(labels[0].label))
        } else {
            match self.adjudication(&review_id).and_then(|a| a.final_label) {
                Some(l) => (ReviewStatus::Resolved, Some(l)),
                None => (ReviewStatus::Conflict, None),
            }
        };
        ReviewState {
            review_id,
            labels,
            status,
            consensus,
        }
    }

    pub fn review(&self, review_id: &str) -> Option<ReviewState> {
        self.index.get(review_id).map(|&i| self.review_state(i))
    }

    pub fn adjudications(&self, include_closed: bool) -> Vec<Adjudication> {
        self.state
            .adjudications
            .iter()
            .filter(|a| include_closed || a.is_open())
            .cloned()
            .collect()
    }

    pub fn adjudicate(
        &mut self,
        review_id: &str,
        final_label: Label,
        resolver: &str,
    ) -> Result<Adjudication, StoreError> {
        if resolver.is_empty() {
            return Err(StoreError::Invalid("resolver is empty".into()));
        }
        let adj = self
            .state
            .adjudications
            .iter_mut()
            .find(|a| a.review_id == review_id)
            .ok_or_else(|| {
                StoreError::NotFound(format!("no adjudication for review {review_id}"))
            })?;
        if !adj.is_open() {
            return Err(StoreError::Conflict(format!(
                "review {review_id} is already resolved"
            )));
        }
        adj.final_label = Some(final_label);
        adj.resolver = Some(resolver.to_string());
        let adj = adj.clone();
        self.persist()?;
        Ok(adj)
    }

    /// Reviews with two agreeing labels or a closed adjudication, in queue
    /// order, as sentiment training records.
    pub fn export_consensus(&self) -> Vec<LabeledText> {
        (0..self.state.items.len())
            .filter_map(|i| {
                let label = self.review_state(i).consensus?;
                let item = &self.state.items[i];
                Some(LabeledText {
                    review_id: item.review_id.clone(),
                    text: item.text.clone(),
                    label,
                    provenance: Provenance::AnnotatorConsensus,
                })
            })
            .collect()
    }

    pub fn progress(&self) -> Progress {
        let tasks = &self.state.tasks;
        Progress {
            reviews: self.state.items.len(),
            tasks: tasks.len(),
            tasks_labeled: tasks
                .iter()
                .filter(|t| t.status == TaskStatus::Labeled)
                .count(),
            tasks_unassigned: tasks
                .iter()
                .filter(|t| t.assigned_annotator.is_none())
                .count(),
            consensus: self.export_consensus().len(),
            open_adjudications: self
                .state
                .adjudications
                .iter()
                .filter(|a| a.is_open())
                .count(),
        }
    }
}
