//! HTTP service over a pipeline run directory: the dual-annotator labelling
//! workflow plus read-only views of clusters and reports.

pub mod auth;
pub mod store;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use reckmine_core::artifacts::{self, ArtifactError, ClusterDigest, ClusterExport};
use reckmine_core::corpus::MarketId;
use reckmine_core::filter::RedPacketReview;
use reckmine_core::sentiment::Label;

pub use auth::{Principal, Role, TokenTable};
pub use store::{AnnotationStore, QueueItem, StoreError};

pub const DEFAULT_REVIEW_LIMIT: usize = 50;

/// JSON error body `{error, detail}` with a matching status code.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub error: &'static str,
    pub detail: String,
}

impl ApiError {
    fn new(status: StatusCode, error: &'static str, detail: impl Into<String>) -> Self {
        ApiError {
            status,
            error,
            detail: detail.into(),
        }
    }

    fn bad_request(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", detail)
    }

    fn not_found(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", detail)
    }

    fn forbidden(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::FORBIDDEN, "forbidden", detail)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(json!({"error": self.error, "detail": self.detail})),
        )
            .into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(d) => Self::not_found(d),
            StoreError::Conflict(d) => Self::new(StatusCode::CONFLICT, "conflict", d),
            StoreError::Forbidden(d) => Self::forbidden(d),
            StoreError::Invalid(d) => Self::bad_request(d),
            e @ StoreError::Snapshot { .. } => {
                log::error!("{e}");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
            }
        }
    }
}

impl From<ArtifactError> for ApiError {
    fn from(e: ArtifactError) -> Self {
        match e {
            ArtifactError::Missing(p) => Self::not_found(format!(
                "{} has not been produced yet",
                p.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default()
            )),
            e => {
                log::error!("{e}");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
            }
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

struct Inner {
    store: Mutex<AnnotationStore>,
    run_dir: PathBuf,
    tokens: TokenTable,
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    pub fn new(store: AnnotationStore, run_dir: impl Into<PathBuf>, tokens: TokenTable) -> Self {
        AppState {
            inner: Arc::new(Inner {
                store: Mutex::new(store),
                run_dir: run_dir.into(),
                tokens,
            }),
        }
    }

    fn store(&self) -> MutexGuard<'_, AnnotationStore> {
        // a panic while holding the lock cannot leave the store half-written,
        // since every mutation is a single check-and-set
        self.inner.store.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn artifact(&self, name: &str) -> PathBuf {
        self.inner.run_dir.join(name)
    }

    fn principal(&self, headers: &HeaderMap) -> ApiResult<&Principal> {
        let token = headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .map(str::trim)
            .ok_or_else(|| {
                ApiError::new(
                    StatusCode::UNAUTHORIZED,
                    "unauthorized",
                    "missing bearer token",
                )
            })?;
        self.inner
            .tokens
            .lookup(token)
            .ok_or_else(|| ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", "unknown token"))
    }

    fn require(&self, headers: &HeaderMap, role: Role) -> ApiResult<&Principal> {
        let p = self.principal(headers)?;
        if p.role != role {
            return Err(ApiError::forbidden(format!(
                "{} lacks the {role} role",
                p.user
            )));
        }
        Ok(p)
    }
}

/// Review texts to annotate: translated red-packet reviews when available,
/// otherwise the untranslated ones.
pub fn queue_from_run_dir(run_dir: &Path) -> Result<Vec<QueueItem>, ArtifactError> {
    let reviews = read_reviews(run_dir)?;
    Ok(reviews
        .into_iter()
        .map(|r| QueueItem {
            review_id: r.review_id,
            text: r.joined_text,
        })
        .collect())
}

fn read_reviews(run_dir: &Path) -> Result<Vec<RedPacketReview>, ArtifactError> {
    match artifacts::read_jsonl(&run_dir.join(artifacts::TRANSLATED_FILE)) {
        Err(ArtifactError::Missing(_)) => {
            artifacts::read_jsonl(&run_dir.join(artifacts::RED_PACKET_FILE))
        }
        other => other,
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(e.to_string()))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(|| async { Json(json!({"status": "ok"})) }))
        .route("/tasks/next", get(next_task))
        .route("/labels", post(submit_label))
        .route("/adjudications", get(list_adjudications))
        .route("/adjudications/{review_id}", post(adjudicate))
        .route("/consensus.export", get(export_consensus))
        .route("/progress", get(progress))
        .route("/clusters", get(list_clusters))
        .route("/clusters/{id}/reviews", get(cluster_reviews))
        .route("/reports/{kind}", get(report))
        .route("/hotwords", get(hot_words))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

async fn next_task(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<impl IntoResponse> {
    let p = state.require(&headers, Role::Annotator)?;
    let annotator = q
        .get("annotator")
        .ok_or_else(|| ApiError::bad_request("annotator query parameter is required"))?;
    if *annotator != p.user {
        return Err(ApiError::forbidden(format!(
            "token belongs to {}, not {annotator}",
            p.user
        )));
    }
    Ok(Json(state.store().assign_task(annotator)?))
}

#[derive(Deserialize)]
struct LabelBody {
    task_id: u64,
    label: Label,
}

async fn submit_label(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let p = state.require(&headers, Role::Annotator)?;
    let b: LabelBody = parse_body(&body)?;
    Ok(Json(
        state.store().submit_label(b.task_id, b.label, &p.user)?,
    ))
}

async fn list_adjudications(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<impl IntoResponse> {
    state.principal(&headers)?;
    let all = match q.get("status").map(String::as_str) {
        None | Some("open") => false,
        Some("all") => true,
        Some(other) => {
            return Err(ApiError::bad_request(format!(
                "status must be open or all, got {other}"
            )))
        }
    };
    Ok(Json(state.store().adjudications(all)))
}

#[derive(Deserialize)]
struct AdjudicateBody {
    final_label: Label,
    resolver: String,
}

async fn adjudicate(
    State(state): State<AppState>,
    headers: HeaderMap,
    UrlPath(review_id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let p = state.require(&headers, Role::Adjudicator)?;
    let b: AdjudicateBody = parse_body(&body)?;
    if b.resolver != p.user {
        return Err(ApiError::forbidden(format!(
            "token belongs to {}, not {}",
            p.user, b.resolver
        )));
    }
    Ok(Json(state.store().adjudicate(
        &review_id,
        b.final_label,
        &b.resolver,
    )?))
}

async fn export_consensus(
    State(state): State<AppState>,
    headers: HeaderMap,
) -> ApiResult<impl IntoResponse> {
    state.principal(&headers)?;
    Ok(Json(state.store().export_consensus()))
}

async fn progress(
    State(state): State<AppState>,
    headers: HeaderMap,
) -> ApiResult<impl IntoResponse> {
    state.principal(&headers)?;
    Ok(Json(state.store().progress()))
}

#[derive(Serialize)]
struct ClusterOverview {
    cluster_id: usize,
    size: u64,
    keywords: Vec<(String, f64)>,
    summary: Option<String>,
    method: Option<reckmine_core::summarize::SummaryMethod>,
}

async fn list_clusters(
    State(state): State<AppState>,
    headers: HeaderMap,
) -> ApiResult<impl IntoResponse> {
    state.principal(&headers)?;
    let overview: Vec<ClusterOverview> = match artifacts::read_json::<Vec<ClusterDigest>>(
        &state.artifact(artifacts::SUMMARIES_FILE),
    ) {
        Ok(digests) => digests
            .into_iter()
            .map(|d| ClusterOverview {
                cluster_id: d.cluster_id,
                size: d.size,
                keywords: d.keywords,
                summary: Some(d.summary.summary),
                method: Some(d.summary.method),
            })
            .collect(),
        Err(ArtifactError::Missing(_)) => {
            let clusters: ClusterExport =
                artifacts::read_json(&state.artifact(artifacts::CLUSTERS_FILE))?;
            clusters
                .sizes()
                .into_iter()
                .enumerate()
                .map(|(cluster_id, size)| ClusterOverview {
                    cluster_id,
                    size,
                    keywords: Vec::new(),
                    summary: None,
                    method: None,
                })
                .collect()
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Json(overview))
}

#[derive(Serialize)]
struct ClusterMember {
    review_id: String,
    market: MarketId,
    text: Option<String>,
    distance: f64,
}

async fn cluster_reviews(
    State(state): State<AppState>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<impl IntoResponse> {
    state.principal(&headers)?;
    let id: usize = id
        .parse()
        .map_err(|_| ApiError::bad_request(format!("cluster id {id:?} is not a number")))?;
    let limit = match q.get("limit") {
        None => DEFAULT_REVIEW_LIMIT,
        Some(l) => l
            .parse()
            .map_err(|_| ApiError::bad_request(format!("limit {l:?} is not a number")))?,
    };
    let clusters: ClusterExport = artifacts::read_json(&state.artifact(artifacts::CLUSTERS_FILE))?;
    if id >= clusters.k {
        return Err(ApiError::not_found(format!(
            "cluster {id} (k = {})",
            clusters.k
        )));
    }
    let texts: BTreeMap<(MarketId, String), String> = read_reviews(&state.inner.run_dir)
        .unwrap_or_default()
        .into_iter()
        .map(|r| ((r.market, r.review_id), r.joined_text))
        .collect();
    let members = clusters.members(id);
    let size = members.len();
    let reviews: Vec<ClusterMember> = members
        .into_iter()
        .take(limit)
        .map(|m| ClusterMember {
            review_id: m.review_id.clone(),
            market: m.market.clone(),
            text: texts.get(&(m.market.clone(), m.review_id.clone())).cloned(),
            distance: m.distance,
        })
        .collect();
    Ok(Json(
        json!({"cluster_id": id, "size": size, "reviews": reviews}),
    ))
}

async fn report(
    State(state): State<AppState>,
    headers: HeaderMap,
    UrlPath(kind): UrlPath<String>,
) -> ApiResult<impl IntoResponse> {
    state.principal(&headers)?;
    let file = match kind.as_str() {
        "market" => artifacts::MARKET_TABLE_JSON,
        "category" => artifacts::CATEGORY_TABLE_JSON,
        "fraud" => artifacts::FRAUD_TABLE_JSON,
        other => {
            return Err(ApiError::not_found(format!(
                "no report {other:?}; use market, category or fraud"
            )))
        }
    };
    Ok(Json(artifacts::read_json::<Value>(&state.artifact(file))?))
}

async fn hot_words(
    State(state): State<AppState>,
    headers: HeaderMap,
) -> ApiResult<impl IntoResponse> {
    state.principal(&headers)?;
    Ok(Json(artifacts::read_json::<Value>(
        &state.artifact(artifacts::HOT_WORDS_JSON),
    )?))
}
