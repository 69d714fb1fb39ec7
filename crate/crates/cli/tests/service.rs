mod common;

use std::process::Command;

use axum::http::StatusCode;
use common::{app, post, put};
use ermodes::fixtures;

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn api_conformance() {
    let dir = tempfile::tempdir().unwrap();
    common::conformance(dir.path()).await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_writes_with_one_base() {
    for _ in 0..20 {
        let dir = tempfile::tempdir().unwrap();
        let (statuses, version) = common::racing_puts(dir.path()).await;
        assert_eq!(statuses, [StatusCode::OK, StatusCode::CONFLICT]);
        assert_eq!(version, 2);
    }
}

#[tokio::test]
async fn modes_match_cli_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    put(&app, "/diagrams/uwcse", None, fixtures::UWCSE_IR).await;
    let file = dir.path().join("uwcse.erd.json");
    for (strategy, dialect) in [("shortest", "generic"), ("all", "aleph"), ("shortest-all", "boostsrl")] {
        let http = post(
            &app,
            &format!("/diagrams/uwcse/modes?strategy={strategy}&dialect={dialect}"),
            "",
        )
        .await;
        assert_eq!(http.status, StatusCode::OK, "{}", http.body);
        let out = Command::new(env!("CARGO_BIN_EXE_ermodes"))
            .args(["gmc", "--diagram"])
            .arg(&file)
            .args(["--strategy", strategy, "--dialect", dialect])
            .output()
            .unwrap();
        assert!(out.status.success());
        assert_eq!(http.body["modes"].as_str().unwrap(), String::from_utf8(out.stdout).unwrap());
    }
}

#[tokio::test]
async fn real_listener() {
    let dir = tempfile::tempdir().unwrap();
    let store = std::sync::Arc::new(ermodes_cli::store::Store::open(dir.path()).unwrap());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, ermodes_cli::service::router(store)).await });

    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    let mut s = tokio::net::TcpStream::connect(addr).await.unwrap();
    s.write_all(b"GET /health HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n")
        .await
        .unwrap();
    let mut buf = String::new();
    s.read_to_string(&mut buf).await.unwrap();
    assert!(buf.starts_with("HTTP/1.1 200"), "{buf}");
    assert!(buf.contains("\"status\":\"ok\""));
}
