use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use jnd_tools::http::router;
use jnd_tools::partition::{partition_packages, synthetic_sets};
use jnd_tools::service::{ServiceConfig, SessionService};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app(sets: usize) -> Router {
    let packages = partition_packages(&synthetic_sets(sets), 1, 4).unwrap();
    router(Arc::new(
        SessionService::open(packages, ServiceConfig::default()).unwrap(),
    ))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req
            .header("content-type", "application/json")
            .body(Body::from(v.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn create(app: &Router, subject: u32) -> String {
    let (status, body) = call(
        app,
        Method::POST,
        "/sessions",
        Some(json!({"package_id": 1, "jnd_index": 1, "subject_id": subject})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["session_id"].as_str().unwrap().to_string()
}

/// Answers every pair as an observer with threshold `t` until the session
/// completes; returns the statuses seen after each finished set.
async fn run_to_end(app: &Router, id: &str, t: u64) -> Vec<String> {
    let mut statuses = Vec::new();
    loop {
        let (status, pair) = call(app, Method::GET, &format!("/sessions/{id}/next"), None).await;
        if status == StatusCode::GONE {
            return statuses;
        }
        assert_eq!(status, StatusCode::OK, "{pair}");
        let response = if pair["probe_qp"].as_u64().unwrap() >= t {
            "noticeable"
        } else {
            "unnoticeable"
        };
        let (status, progress) = call(
            app,
            Method::POST,
            &format!("/sessions/{id}/response"),
            Some(json!({"response": response, "pair": {"seq_index": pair["seq_index"], "step": pair["step"]}})),
        )
        .await;
        assert_eq!(status, StatusCode::OK, "{progress}");
        if !progress["finished"].is_null() {
            statuses.push(progress["status"].as_str().unwrap().to_string());
        }
    }
}

#[tokio::test]
async fn first_pair_is_0_against_25() {
    let app = app(3);
    let id = create(&app, 1).await;
    let (status, pair) = call(&app, Method::GET, &format!("/sessions/{id}/next"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(pair["anchor_clip_qp"], 0);
    assert_eq!(pair["probe_clip_qp"], 25);
    assert_eq!(pair["step"], 0);
    assert!(pair["probe_uri"].as_str().unwrap().contains("qp25"));
}

#[tokio::test]
async fn next_is_read_only_and_replay_repeats_the_pair() {
    let app = app(2);
    let id = create(&app, 1).await;
    let next = format!("/sessions/{id}/next");
    let (_, a) = call(&app, Method::GET, &next, None).await;
    let (_, b) = call(&app, Method::GET, &next, None).await;
    assert_eq!(a, b);
    let (status, c) = call(&app, Method::POST, &format!("/sessions/{id}/replay"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(a, c);
}

#[tokio::test]
async fn five_set_session_with_break() {
    let app = app(5);
    let id = create(&app, 9).await;
    let statuses = run_to_end(&app, &id, 31).await;
    assert_eq!(
        statuses,
        ["in_progress", "in_progress", "break", "in_progress", "complete"]
    );
    let (status, summary) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(summary["status"], "complete");
    let rows = summary["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows
        .iter()
        .all(|r| r["qp"] == 31 && r["censored"] == false && r["subject_id"] == 9));
}

#[tokio::test]
async fn fifteen_sets_give_fifteen_rows() {
    let app = app(15);
    let id = create(&app, 2).await;
    run_to_end(&app, &id, 60).await;
    let (_, summary) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    let rows = summary["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().all(|r| r["qp"] == 51 && r["censored"] == true));
}

#[tokio::test]
async fn duplicate_submission_echoes_current_pair() {
    let app = app(2);
    let id = create(&app, 1).await;
    let body = json!({"response": "noticeable", "pair": {"seq_index": 0, "step": 0}});
    let uri = format!("/sessions/{id}/response");
    let (status, _) = call(&app, Method::POST, &uri, Some(body.clone())).await;
    assert_eq!(status, StatusCode::OK);
    let (status, err) = call(&app, Method::POST, &uri, Some(body)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"]["kind"], "already_answered");
    assert_eq!(err["error"]["current"]["step"], 1);
    let (_, pair) = call(&app, Method::GET, &format!("/sessions/{id}/next"), None).await;
    assert_eq!(pair["step"], 1);
}

#[tokio::test]
async fn completed_session_refuses_responses() {
    let app = app(1);
    let id = create(&app, 1).await;
    run_to_end(&app, &id, 20).await;
    let (status, err) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/response"),
        Some(json!({"response": "noticeable"})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"]["kind"], "not_accepting");
    let (status, err) = call(&app, Method::GET, &format!("/sessions/{id}/next"), None).await;
    assert_eq!(status, StatusCode::GONE);
    assert_eq!(err["error"]["kind"], "no_more_pairs");
}

#[tokio::test]
async fn client_errors() {
    let app = app(2);
    let (status, err) = call(&app, Method::GET, "/sessions/nope/next", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["error"]["kind"], "unknown_session");

    let (status, err) = call(
        &app,
        Method::POST,
        "/sessions",
        Some(json!({"package_id": 9, "jnd_index": 1, "subject_id": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["error"]["kind"], "unknown_package");

    let (status, err) = call(
        &app,
        Method::POST,
        "/sessions",
        Some(json!({"package_id": 1, "jnd_index": 2, "subject_id": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["error"]["kind"], "validation");

    let (status, err) = call(&app, Method::POST, "/sessions", Some(json!({"package_id": "x"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["error"]["kind"], "validation");

    create(&app, 5).await;
    let (status, _) = call(
        &app,
        Method::POST,
        "/sessions",
        Some(json!({"package_id": 1, "jnd_index": 1, "subject_id": 5})),
    )
    .await;
    assert_eq!(
        status,
        StatusCode::UNPROCESSABLE_ENTITY,
        "one session per subject, package and level"
    );
}

#[tokio::test]
async fn second_level_uses_anchors() {
    let packages = partition_packages(&synthetic_sets(2), 1, 4).unwrap();
    let sets = packages[0].sets.clone();
    let app = router(Arc::new(
        SessionService::open(packages, ServiceConfig::default()).unwrap(),
    ));
    let anchors: Vec<Value> = sets
        .iter()
        .map(|s| json!({"content_id": s.content, "resolution": s.resolution, "qp": 27}))
        .collect();
    let (status, body) = call(
        &app,
        Method::POST,
        "/sessions",
        Some(json!({"package_id": 1, "jnd_index": 2, "subject_id": 1, "anchors": anchors})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    let id = body["session_id"].as_str().unwrap();
    let (_, pair) = call(&app, Method::GET, &format!("/sessions/{id}/next"), None).await;
    assert_eq!(pair["anchor_qp"], 27);
    assert_eq!(pair["probe_qp"], 39);
}
