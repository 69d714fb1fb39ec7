//! In-process HTTP harness and the API conformance suite.

use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use ermodes::fixtures;
use ermodes_cli::service::router;
use ermodes_cli::store::Store;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub const UNIVERSITY_MODES: [&str; 3] = [
    "mode: tenure(+professor).",
    "mode: advises(+professor, -student).",
    "mode: takes(+student, -course, #grade).",
];

pub fn app(dir: &Path) -> Router {
    router(Arc::new(Store::open(dir).unwrap()))
}

pub struct Reply {
    pub status: StatusCode,
    pub etag: Option<String>,
    pub body: Value,
}

pub async fn call(app: &Router, method: Method, uri: &str, if_match: Option<&str>, body: &str) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(v) = if_match {
        req = req.header(header::IF_MATCH, v);
    }
    let resp = app
        .clone()
        .oneshot(req.body(Body::from(body.to_string())).unwrap())
        .await
        .unwrap();
    let status = resp.status();
    let etag = resp
        .headers()
        .get(header::ETAG)
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let body = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    Reply { status, etag, body }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Method::GET, uri, None, "").await
}

pub async fn put(app: &Router, uri: &str, if_match: Option<&str>, body: &str) -> Reply {
    call(app, Method::PUT, uri, if_match, body).await
}

pub async fn post(app: &Router, uri: &str, body: &str) -> Reply {
    call(app, Method::POST, uri, None, body).await
}

/// Exercises every endpoint and error path against a fresh store in `dir`,
/// then restarts the service on the same directory.
pub async fn conformance(dir: &Path) {
    let app = app(dir);
    let r = get(&app, "/health").await;
    assert_eq!((r.status, r.body["status"].as_str()), (StatusCode::OK, Some("ok")));

    // create, conditional update, stale write
    let r = put(&app, "/diagrams/university", Some("0"), fixtures::UNIVERSITY_IR).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert_eq!(r.body["version"], 1);
    assert_eq!(r.etag.as_deref(), Some("\"1\""));
    let r = put(&app, "/diagrams/university?base_version=1", None, fixtures::UNIVERSITY_IR).await;
    assert_eq!((r.status, r.body["version"].as_u64()), (StatusCode::OK, Some(2)));
    let r = put(&app, "/diagrams/university", Some("\"1\""), fixtures::UNIVERSITY_IR).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.body["version"], 2);
    let r = put(&app, "/diagrams/uwcse", None, fixtures::UWCSE_IR).await;
    assert_eq!(r.status, StatusCode::OK);

    let r = get(&app, "/diagrams").await;
    assert_eq!(
        r.body["diagrams"],
        serde_json::json!([{ "id": "university", "version": 2 }, { "id": "uwcse", "version": 1 }])
    );
    let r = get(&app, "/diagrams/university").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body["version"], 2);
    assert_eq!(
        ermodes::er::parse_ir(&r.body["diagram"].to_string()).unwrap(),
        fixtures::university()
    );

    // invalid input
    let r = put(&app, "/diagrams/bad", None, r#"{"entities": [{"name": "A"}, {"name": "a"}]}"#).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert!(r.body["violations"].as_array().is_some_and(|v| !v.is_empty()), "{}", r.body);
    let r = put(&app, "/diagrams/bad", None, "{").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert!(r.body["line"].is_number());
    let r = put(&app, "/diagrams/bad", Some("x"), fixtures::UNIVERSITY_IR).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(get(&app, "/diagrams/bad").await.status, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/diagrams/a.b").await.status, StatusCode::BAD_REQUEST);
    let r = post(&app, "/diagrams/university/modes?strategy=sideways", "").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = post(&app, "/diagrams/university/modes", r#"{"max_depth": 0}"#).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = post(&app, "/diagrams/university/modes", r#"{"colour": "red"}"#).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(post(&app, "/diagrams/nope/modes", "").await.status, StatusCode::NOT_FOUND);

    // jobs
    let r = post(&app, "/diagrams/university/modes?strategy=shortest", "").await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert_eq!(r.body["version"], 2);
    let text = r.body["modes"].as_str().unwrap();
    for line in UNIVERSITY_MODES {
        assert!(text.lines().any(|l| l == line), "{line} missing from {text}");
    }
    let r = post(&app, "/diagrams/university/modes", r#"{"dialect": "aleph"}"#).await;
    assert!(r.body["modes"].as_str().unwrap().contains(":- modeh(1, tenure(+professor))."));

    let r = post(&app, "/diagrams/university/paths", r#"{"strategy": "shortest_all"}"#).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    let paths = r.body["features"][0]["paths"].as_array().unwrap();
    assert_eq!(paths.len(), 2);
    let r = post(&app, "/diagrams/university/paths?strategy=random&num_walks=3&seed=5", "").await;
    assert_eq!(r.body["walks"].as_array().map(Vec::len), Some(3));
    let r = post(&app, "/diagrams/university/paths", r#"{"feature": {"entity": "Nope"}}"#).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);

    let r = post(&app, "/diagrams/university/clausespace", r#"{"max_len": 2}"#).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert_eq!(r.body["report"]["counts_by_length"], serde_json::json!({"0": 1, "1": 1, "2": 2}));
    assert_eq!(r.body["version"], 2);
    assert!(r.body["metric"].as_str().unwrap().contains("proxy"));
    let r = post(&app, "/diagrams/university/clausespace?source=exhaustive&max_len=1", "").await;
    assert!(r.body["report"]["total"].as_u64().unwrap() > 2);

    // restart on the same directory
    drop(app);
    let app = self::app(dir);
    let r = get(&app, "/diagrams/university").await;
    assert_eq!((r.status, r.body["version"].as_u64()), (StatusCode::OK, Some(2)));
    let r = get(&app, "/diagrams").await;
    assert_eq!(r.body["diagrams"].as_array().map(Vec::len), Some(2));
    let r = put(&app, "/diagrams/university", Some("2"), fixtures::UNIVERSITY_IR).await;
    assert_eq!(r.body["version"], 3);
}

/// Two writers race with the same base version.
pub async fn racing_puts(dir: &Path) -> (Vec<StatusCode>, u64) {
    let app = app(dir);
    put(&app, "/diagrams/race", None, fixtures::UNIVERSITY_IR).await;
    let a = {
        let app = app.clone();
        tokio::spawn(async move { put(&app, "/diagrams/race", Some("1"), fixtures::UNIVERSITY_IR).await })
    };
    let b = {
        let app = app.clone();
        tokio::spawn(async move { put(&app, "/diagrams/race", Some("1"), fixtures::IMDB_IR).await })
    };
    let mut statuses = vec![a.await.unwrap().status, b.await.unwrap().status];
    statuses.sort();
    let version = get(&app, "/diagrams/race").await.body["version"].as_u64().unwrap();
    (statuses, version)
}
