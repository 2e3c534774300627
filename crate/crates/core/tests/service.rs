use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request};
use axum::Router;
use curious_companion::companion::StateSnapshot;
use curious_companion::service::{router, AppState};
use curious_companion::Catalog;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (u16, Value) {
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

fn learner() -> Value {
    serde_json::to_value(Catalog::bundled().fcm("plant-learner").unwrap().to_document()).unwrap()
}

fn app() -> Router {
    router(AppState::new(None).unwrap())
}

async fn create(app: &Router, seed: u64) -> String {
    let (status, body) = call(
        app,
        Method::POST,
        "/sessions",
        Some(json!({"world": "cos-plant", "learner_fcm": learner(), "profile": [4, 4], "seed": seed})),
    )
    .await;
    assert_eq!(status, 201, "{body}");
    body["id"].as_str().unwrap().to_owned()
}

async fn events(app: &Router, id: &str, items: Value) -> (u16, Value) {
    call(
        app,
        Method::POST,
        &format!("/sessions/{id}/events"),
        Some(json!({ "items": items })),
    )
    .await
}

async fn state(app: &Router, id: &str) -> StateSnapshot {
    let (status, body) = call(app, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(status, 200, "{body}");
    serde_json::from_value(body).unwrap()
}

fn idle_near_root() -> Value {
    json!([
        {"type": "move", "t": 500, "to": {"x": 50, "y": 50, "z": 0}},
        {"type": "tick", "t": 20000}
    ])
}

#[tokio::test]
async fn fresh_session_sits_at_spawn_with_no_wait() {
    let app = app();
    let id = create(&app, 1).await;
    let s = state(&app, &id).await;
    assert_eq!(s.avatar, Catalog::bundled().world("cos-plant").unwrap().spawn);
    assert!(s.wait.is_none());
    assert_eq!(s.prompts_issued, 0);
    assert_eq!(s.novelty.r_s.len(), 4);
}

#[tokio::test]
async fn unknown_world_is_not_found() {
    let (status, body) = call(
        &app(),
        Method::POST,
        "/sessions",
        Some(json!({"world": "atlantis", "learner_fcm": learner(), "profile": [3]})),
    )
    .await;
    assert_eq!(status, 404);
    assert_eq!(body["code"], "world_not_found");
}

#[tokio::test]
async fn invalid_learner_map_lists_the_entry() {
    let mut doc = learner();
    doc["edges"][0]["w"] = json!(1.7);
    let (status, body) = call(
        &app(),
        Method::POST,
        "/sessions",
        Some(json!({"world": "cos-plant", "learner_fcm": doc, "profile": [3]})),
    )
    .await;
    assert_eq!(status, 422);
    assert_eq!(body["code"], "invalid_fcm");
    assert!(body["message"].as_str().unwrap().contains("1.7"), "{body}");
}

#[tokio::test]
async fn bad_profile_is_rejected() {
    let (status, body) = call(
        &app(),
        Method::POST,
        "/sessions",
        Some(json!({"world": "cos-plant", "learner_fcm": learner(), "profile": [9]})),
    )
    .await;
    assert_eq!(status, 400, "{body}");
}

#[tokio::test]
async fn unknown_session_is_not_found() {
    let app = app();
    for (method, uri) in [
        (Method::GET, "/sessions/nope/state"),
        (Method::GET, "/sessions/nope/prompts"),
    ] {
        let (status, body) = call(&app, method, uri, None).await;
        assert_eq!(status, 404);
        assert_eq!(body["code"], "session_not_found");
    }
    let (status, _) = events(&app, "nope", json!([])).await;
    assert_eq!(status, 404);
}

#[tokio::test]
async fn idling_near_the_root_yields_the_osmosis_prompt() {
    let app = app();
    let id = create(&app, 7).await;
    let (status, body) = events(&app, &id, idle_near_root()).await;
    assert_eq!(status, 200);
    assert_eq!(body["accepted"], 2);
    let new = body["new_prompts"].as_array().unwrap();
    assert_eq!(new.len(), 1);
    assert_eq!(new[0]["prompt"]["template"], "surprising_concept");
    assert!(new[0]["prompt"]["text"].as_str().unwrap().contains("concept osmosis"));
}

#[tokio::test]
async fn engaging_within_the_wait_keeps_the_outbox_empty() {
    let app = app();
    let id = create(&app, 7).await;
    let (status, _) = events(
        &app,
        &id,
        json!([
            {"type": "move", "t": 500, "to": {"x": 54, "y": 50, "z": 0}},
            {"type": "engage", "t": 1500, "activity": "a2"},
            {"type": "tick", "t": 60000}
        ]),
    )
    .await;
    assert_eq!(status, 200);
    let s = state(&app, &id).await;
    assert_eq!(s.prompts_issued, 0);
    assert_eq!(s.engaged.as_deref(), Some("a2"));
}

#[tokio::test]
async fn out_of_order_batch_is_rejected_without_effect() {
    let app = app();
    let id = create(&app, 7).await;
    events(
        &app,
        &id,
        json!([{"type": "move", "t": 1000, "to": {"x": 30, "y": 30, "z": 0}}]),
    )
    .await;
    let before = state(&app, &id).await;
    let (status, body) = events(
        &app,
        &id,
        json!([
            {"type": "move", "t": 2000, "to": {"x": 50, "y": 50, "z": 0}},
            {"type": "input", "t": 1500, "kind": "key_press"}
        ]),
    )
    .await;
    assert_eq!(status, 409);
    assert_eq!(body["code"], "time_regression");
    assert_eq!(state(&app, &id).await, before);
}

#[tokio::test]
async fn prompt_listing_is_indexed_and_idempotent() {
    let app = app();
    let id = create(&app, 7).await;
    events(&app, &id, idle_near_root()).await;
    let uri = |k: usize| format!("/sessions/{id}/prompts?since={k}");
    let (_, all) = call(&app, Method::GET, &uri(0), None).await;
    assert_eq!(all["prompts"].as_array().unwrap().len(), 1);
    let (_, again) = call(&app, Method::GET, &uri(0), None).await;
    assert_eq!(all, again);
    let (_, past) = call(&app, Method::GET, &uri(5), None).await;
    assert!(past["prompts"].as_array().unwrap().is_empty());
    let (_, no_query) = call(&app, Method::GET, &format!("/sessions/{id}/prompts"), None).await;
    assert_eq!(no_query, all);
}

#[tokio::test]
async fn identical_sessions_have_identical_outboxes() {
    let app = app();
    let (a, b) = (create(&app, 3).await, create(&app, 3).await);
    assert_ne!(a, b);
    let script = json!([
        {"type": "input", "t": 100, "kind": "key_press"},
        {"type": "input", "t": 700, "kind": "mouse_left"},
        {"type": "move", "t": 1200, "to": {"x": 50, "y": 52, "z": 0}},
        {"type": "tick", "t": 15000},
        {"type": "move", "t": 16000, "to": {"x": 50, "y": 80, "z": 0}},
        {"type": "tick", "t": 60000}
    ]);
    // interleave the two sessions' traffic
    for chunk in script.as_array().unwrap().chunks(2) {
        events(&app, &a, json!(chunk)).await;
        events(&app, &b, json!(chunk)).await;
    }
    let (_, pa) = call(&app, Method::GET, &format!("/sessions/{a}/prompts"), None).await;
    let (_, pb) = call(&app, Method::GET, &format!("/sessions/{b}/prompts"), None).await;
    assert!(!pa["prompts"].as_array().unwrap().is_empty());
    assert_eq!(pa, pb);
}

#[tokio::test]
async fn replacing_the_map_updates_novelty() {
    let app = app();
    let id = create(&app, 7).await;
    let mut doc = learner();
    for e in doc["edges"].as_array_mut().unwrap() {
        if e["from"] == 4 && e["to"] == 7 {
            e["w"] = json!(-0.6);
        }
    }
    let (status, body) = call(&app, Method::PUT, &format!("/sessions/{id}/fcm"), Some(doc)).await;
    assert_eq!(status, 200, "{body}");
    let snap: StateSnapshot = serde_json::from_value(body).unwrap();
    let pairs: Vec<(u32, u32)> = snap.novelty.r_s.iter().map(|p| (p.i.0, p.j.0)).collect();
    assert_eq!(pairs, [(3, 4), (4, 6), (8, 6)]);
    assert!(!snap.novelty.is_novel("a2"));

    let (status, body) = call(
        &app,
        Method::PUT,
        &format!("/sessions/{id}/fcm"),
        Some(json!({"concepts": [{"id": 1, "name": "a"}], "edges": [{"from": 1, "to": 1, "w": 0.5}]})),
    )
    .await;
    assert_eq!(status, 422);
    assert_eq!(body["code"], "invalid_fcm");
}

#[tokio::test]
async fn world_documents_are_served() {
    let (status, body) = call(&app(), Method::GET, "/worlds/cos-plant", None).await;
    assert_eq!(status, 200);
    assert_eq!(body["activities"].as_array().unwrap().len(), 4);
    assert_eq!(body["activities"][1]["name"], "water molecule activity");
}

#[tokio::test]
async fn idle_timer_fires_without_traffic() {
    let app_state = AppState::new(None).unwrap();
    let app = router(Arc::clone(&app_state));
    let id = create(&app, 7).await;
    // one click so tau is 3 × the 2000 ms fallback; deadline at 6100
    events(
        &app,
        &id,
        json!([{"type": "move", "t": 100, "to": {"x": 50, "y": 50, "z": 0}}]),
    )
    .await;
    app_state.fire_idle_timers().await;
    assert_eq!(state(&app, &id).await.prompts_issued, 0, "fired before the deadline");

    tokio::time::sleep(std::time::Duration::from_millis(6300)).await;
    app_state.fire_idle_timers().await;
    let s = state(&app, &id).await;
    assert_eq!(s.prompts_issued, 1);
    assert_eq!(s.clock, 6100);
}

#[tokio::test]
async fn sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(Some(dir.path())).unwrap());
    let id = create(&app, 11).await;
    events(&app, &id, idle_near_root()).await;
    let before = state(&app, &id).await;
    assert!(dir.path().join(format!("sessions/{id}.json")).is_file());
    drop(app);

    let app = router(AppState::new(Some(dir.path())).unwrap());
    assert_eq!(state(&app, &id).await, before);
    // and the reloaded session keeps going
    let (status, _) = events(&app, &id, json!([{"type": "tick", "t": 90000}])).await;
    assert_eq!(status, 200);
}
