//! HTTP API over the diagram store.
//!
//! | method | path                          | body                         |
//! |--------|-------------------------------|------------------------------|
//! | GET    | `/health`                     |                              |
//! | GET    | `/diagrams`                   |                              |
//! | GET    | `/diagrams/{id}`              |                              |
//! | PUT    | `/diagrams/{id}`              | IR document                  |
//! | POST   | `/diagrams/{id}/paths`        | walk config, `feature`       |
//! | POST   | `/diagrams/{id}/modes`        | walk config, `dialect`       |
//! | POST   | `/diagrams/{id}/clausespace`  | walk config, `max_len`, `cap`, `source` |
//!
//! POST parameters may also be given as query parameters, which override the
//! JSON body. A PUT is conditional when it carries `If-Match: <version>` or
//! `?base_version=<version>`; a stale version yields 409. Every diagram
//! response includes the diagram's `version`, also sent as the `ETag`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ermodes::clauses::DEFAULT_CAP;
use ermodes::er::{serialize_ir, FeatureRef, IrError};
use ermodes::modes::Dialect;
use ermodes::paths::{Strategy, WalkConfig};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::jobs::{self, JobError, ModeSource, CLAUSE_METRIC};
use crate::store::{Store, StoreError, Stored};

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/diagrams", get(list))
        .route("/diagrams/{id}", get(fetch).put(store_diagram))
        .route("/diagrams/{id}/paths", post(paths))
        .route("/diagrams/{id}/modes", post(modes))
        .route("/diagrams/{id}/clausespace", post(clausespace))
        .with_state(store)
}

/// Serves `store` on `addr` until the process is stopped.
pub async fn serve(addr: SocketAddr, store: Arc<Store>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!(
        "serving {} on http://{}",
        store.dir().display(),
        listener.local_addr()?
    );
    axum::serve(listener, router(store)).await
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl ToString) -> Self {
        Self {
            status,
            body: json!({ "error": message.to_string() }),
        }
    }

    fn bad_request(message: impl ToString) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::InvalidId(_) => Self::bad_request(e),
            StoreError::NotFound(_) => Self::new(StatusCode::NOT_FOUND, e),
            StoreError::Conflict { current, .. } => {
                let mut err = Self::new(StatusCode::CONFLICT, &e);
                err.body["version"] = json!(current);
                err
            }
            StoreError::Invalid(IrError::Invalid(ref violations)) => {
                let mut err = Self::bad_request(&e);
                err.body["violations"] = violations
                    .iter()
                    .map(|v| json!({ "invariant": v.invariant(), "message": v.to_string() }))
                    .collect();
                err
            }
            StoreError::Invalid(IrError::Syntax { line, column, .. }) => {
                let mut err = Self::bad_request(&e);
                err.body["line"] = json!(line);
                err.body["column"] = json!(column);
                err
            }
            StoreError::Corrupt { .. } | StoreError::Io(_) => {
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, e)
            }
        }
    }
}

impl From<JobError> for ApiError {
    fn from(e: JobError) -> Self {
        Self::bad_request(e)
    }
}

type ApiResult = Result<Response, ApiError>;

/// JSON response tagged with the diagram version.
fn versioned(id: &str, version: u64, mut body: Map<String, Value>) -> Response {
    body.insert("id".into(), json!(id));
    body.insert("version".into(), json!(version));
    let mut resp = Json(Value::Object(body)).into_response();
    resp.headers_mut().insert(
        header::ETAG,
        HeaderValue::from_str(&format!("\"{version}\"")).unwrap(),
    );
    resp
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

async fn list(State(store): State<Arc<Store>>) -> Json<Value> {
    let diagrams: Vec<Value> = store
        .list()
        .into_iter()
        .map(|(id, version)| json!({ "id": id, "version": version }))
        .collect();
    Json(json!({ "diagrams": diagrams }))
}

async fn fetch(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult {
    let Stored { diagram, version } = store.get(&id)?;
    let ir: Value = serde_json::from_str(&serialize_ir(&diagram)).expect("canonical IR is JSON");
    let mut body = Map::new();
    body.insert("diagram".into(), ir);
    Ok(versioned(&id, version, body))
}

fn base_version(headers: &HeaderMap, query: &HashMap<String, String>) -> Result<Option<u64>, ApiError> {
    let raw = match (headers.get(header::IF_MATCH), query.get("base_version")) {
        (Some(h), _) => h
            .to_str()
            .map_err(|_| ApiError::bad_request("If-Match is not text"))?
            .trim()
            .trim_start_matches("W/")
            .trim_matches('"')
            .to_string(),
        (None, Some(q)) => q.clone(),
        (None, None) => return Ok(None),
    };
    raw.parse()
        .map(Some)
        .map_err(|_| ApiError::bad_request(format!("base version {raw:?} is not a number")))
}

async fn store_diagram(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let base = base_version(&headers, &query)?;
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;
    let version = store.put(&id, text, base).await?;
    Ok(versioned(&id, version, Map::new()))
}

/// Parameters accepted by the POST endpoints.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobRequest {
    strategy: Option<Strategy>,
    max_depth: Option<usize>,
    seed: Option<u64>,
    num_walks: Option<usize>,
    dialect: Option<Dialect>,
    feature: Option<FeatureRef>,
    max_len: Option<usize>,
    cap: Option<u64>,
    source: Option<ModeSource>,
}

impl JobRequest {
    /// Body fields overlaid with query parameters. Numeric query values are
    /// read as numbers.
    fn parse(body: &Bytes, query: HashMap<String, String>) -> Result<Self, ApiError> {
        let mut fields = if body.iter().all(u8::is_ascii_whitespace) {
            Map::new()
        } else {
            match serde_json::from_slice(body) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(ApiError::bad_request("request body must be a JSON object")),
                Err(e) => return Err(ApiError::bad_request(format!("request body: {e}"))),
            }
        };
        for (k, v) in query {
            let value = v.parse::<u64>().map_or(Value::String(v), Value::from);
            fields.insert(k, value);
        }
        serde_json::from_value(Value::Object(fields))
            .map_err(|e| ApiError::bad_request(format!("request: {e}")))
    }

    fn config(&self) -> Result<WalkConfig, ApiError> {
        let d = WalkConfig::default();
        let cfg = WalkConfig {
            strategy: self.strategy.unwrap_or(d.strategy),
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            seed: self.seed.unwrap_or(d.seed),
            num_walks: self.num_walks.unwrap_or(d.num_walks),
        };
        cfg.check().map_err(ApiError::bad_request)?;
        Ok(cfg)
    }
}

async fn paths(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
    body: Bytes,
) -> ApiResult {
    let req = JobRequest::parse(&body, query)?;
    let cfg = req.config()?;
    let Stored { diagram, version } = store.get(&id)?;
    if let Some(f) = &req.feature {
        if diagram.resolve(f).is_none() {
            return Err(ApiError::bad_request(format!("unknown feature {f}")));
        }
    }
    let out = jobs::paths(&diagram, &cfg, req.feature.as_ref())?;
    let Value::Object(body) = serde_json::to_value(out).unwrap() else {
        unreachable!("paths output is an object")
    };
    Ok(versioned(&id, version, body))
}

async fn modes(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
    body: Bytes,
) -> ApiResult {
    let req = JobRequest::parse(&body, query)?;
    let cfg = req.config()?;
    let dialect = req.dialect.unwrap_or_default();
    let Stored { diagram, version } = store.get(&id)?;
    let out = jobs::modes(&diagram, &cfg, dialect)?;
    let mut body = Map::new();
    body.insert("dialect".into(), json!(dialect));
    body.insert("modes".into(), json!(out.text));
    body.insert("warnings".into(), json!(out.warnings));
    Ok(versioned(&id, version, body))
}

async fn clausespace(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
    body: Bytes,
) -> ApiResult {
    let req = JobRequest::parse(&body, query)?;
    let cfg = req.config()?;
    let max_len = req.max_len.unwrap_or(3);
    let source = req.source.unwrap_or_default();
    let Stored { diagram, version } = store.get(&id)?;
    let cap = req.cap.unwrap_or(DEFAULT_CAP);
    // enumeration can run for seconds; keep it off the async workers
    let report = tokio::task::spawn_blocking(move || {
        jobs::clause_space(&diagram, source, &cfg, max_len, cap)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))??;
    let mut body = Map::new();
    body.insert("metric".into(), json!(CLAUSE_METRIC));
    body.insert("source".into(), json!(source));
    body.insert("max_len".into(), json!(max_len));
    body.insert("report".into(), serde_json::to_value(&report).unwrap());
    Ok(versioned(&id, version, body))
}
