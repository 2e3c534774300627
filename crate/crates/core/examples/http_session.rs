//! Exercise the HTTP session API in-process: create a session, walk the
//! avatar next to the osmosis activity, idle, and poll for prompts.
//!
//!     cargo run --example http_session
//!
//! `curious-companion serve --port 8080` exposes the same router over TCP.

use axum::body::Body;
use axum::http::{Method, Request};
use curious_companion::service::{router, AppState};
use curious_companion::Catalog;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: Method, uri: &str, body: Option<Value>) -> (u16, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status().as_u16();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::main]
async fn main() {
    let app = router(AppState::new(None).expect("service state"));
    let learner = Catalog::bundled().fcm("plant-learner").unwrap().to_document();

    let (status, created) = call(
        &app,
        Method::POST,
        "/sessions",
        Some(json!({ "world": "cos-plant", "learner_fcm": learner, "profile": [2, 3, 2], "seed": 7 })),
    )
    .await;
    println!("POST /sessions -> {status} {created}");
    let id = created["id"].as_str().unwrap();

    let batch = json!({ "items": [
        { "type": "move", "t": 500, "to": { "x": 50, "y": 50, "z": 0 } },
        { "type": "tick", "t": 20000 }
    ]});
    let (status, result) = call(&app, Method::POST, &format!("/sessions/{id}/events"), Some(batch)).await;
    println!(
        "POST events -> {status}, {} new prompt(s)",
        result["new_prompts"].as_array().unwrap().len()
    );

    let (_, prompts) = call(&app, Method::GET, &format!("/sessions/{id}/prompts?since=0"), None).await;
    println!("GET prompts -> {}", serde_json::to_string_pretty(&prompts).unwrap());

    let (_, state) = call(&app, Method::GET, &format!("/sessions/{id}/state"), None).await;
    println!("GET state -> avatar {} nearby {}", state["avatar"], state["nearby"]);

    let (status, err) = call(&app, Method::GET, "/worlds/atlantis", None).await;
    println!("GET /worlds/atlantis -> {status} {err}");
}
