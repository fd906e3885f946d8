use std::time::Duration;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use tower::ServiceExt;

use uiwalk_core::explorer::{explore_with, EngineConfig, ExploreOptions, LiveView};
use uiwalk_core::model::{StateMeta, StateModel, UiEvent};
use uiwalk_core::sim::{corpus, SimApp};
use uiwalk_core::tree::ViewNode;
use uiwalk_server::{router, EnvRunner, ServerState};

fn profile_server() -> (Router, LiveView) {
    let spec = corpus::load("profile").unwrap();
    let live = LiveView::default();
    let options = ExploreOptions {
        live: Some(live.clone()),
        totals: None,
    };
    explore_with(&mut SimApp::new(spec.clone()), &EngineConfig::default(), &mut [], &options).unwrap();
    let runner = EnvRunner::new(SimApp::new(spec), EngineConfig::default(), 64);
    (router(ServerState::new(&live, runner), None), live)
}

fn three_state_server() -> Router {
    let mut m = StateModel::new();
    for tag in ["A", "B", "C"] {
        m.add_state(ViewNode::new(tag, vec![ViewNode::leaf("Button")]), StateMeta::default());
    }
    m.add_transition(m.states()[0].id, UiEvent::tap(vec![0]), m.states()[1].id).unwrap();
    m.add_transition(m.states()[1].id, UiEvent::tap(vec![0]), m.states()[2].id).unwrap();
    let live = LiveView::default();
    live.model.publish(m);
    let runner = EnvRunner::new(SimApp::new(corpus::load("cycles").unwrap()), EngineConfig::default(), 8);
    router(ServerState::new(&live, runner), None)
}

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, String, Option<String>) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let ctype = res
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string());
    let body = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(body.to_vec()).unwrap(), ctype)
}

fn get(uri: &str) -> Request<Body> {
    Request::get(uri).body(Body::empty()).unwrap()
}

fn post_json(uri: &str, body: &str) -> Request<Body> {
    Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap()
}

#[tokio::test]
async fn graph_of_three_states() {
    let app = three_state_server();
    let (status, body, ctype) = call(&app, get("/api/model/graph")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("application/json"));
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 3);
    assert_eq!(v["edges"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn snapshots_and_missing_states() {
    let app = three_state_server();
    let (status, body, _) = call(&app, get("/api/state/1/snapshot")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ViewNode::from_json(&body).unwrap().tag(), "B");
    let (status, body, _) = call(&app, get("/api/state/99/snapshot")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(body.contains("unknown state 99"));
    let (status, _, _) = call(&app, get("/api/state/x/snapshot")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_routes_are_404() {
    let app = three_state_server();
    assert_eq!(call(&app, get("/api/nope")).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, get("/")).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn coverage_endpoints() {
    let (app, live) = profile_server();
    let (status, body, ctype) = call(&app, get("/api/coverage")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("text/csv"));
    assert_eq!(body.lines().next(), Some("elapsed_ms,states,transitions,events"));
    assert_eq!(body.lines().count(), 1 + live.coverage.read().len());
    let (status, body, _) = call(&app, get("/api/coverage/summary")).await;
    assert_eq!(status, StatusCode::OK);
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    for key in ["state_coverage", "transition_coverage", "events_sent", "wall_ms"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[tokio::test]
async fn reproduce_job_runs_to_done() {
    let (app, _) = profile_server();
    let (status, body, _) = call(&app, post_json("/api/reproduce", r#"{"target": 6}"#)).await;
    assert_eq!(status, StatusCode::ACCEPTED);
    let job_id = serde_json::from_str::<serde_json::Value>(&body).unwrap()["job_id"]
        .as_str()
        .unwrap()
        .to_string();
    let mut seen = Vec::new();
    let job = loop {
        let (status, body, _) = call(&app, get(&format!("/api/reproduce/{job_id}"))).await;
        assert_eq!(status, StatusCode::OK);
        let job: serde_json::Value = serde_json::from_str(&body).unwrap();
        let s = job["status"].as_str().unwrap().to_string();
        if seen.last() != Some(&s) {
            seen.push(s.clone());
        }
        if s == "done" || s == "failed" {
            break job;
        }
        tokio::time::sleep(Duration::from_millis(5)).await;
    };
    let order = ["queued", "running", "done"];
    let ranks: Vec<usize> = seen.iter().map(|s| order.iter().position(|o| o == s).unwrap()).collect();
    assert!(ranks.windows(2).all(|w| w[0] < w[1]), "{seen:?}");
    assert_eq!(job["status"], "done");
    assert_eq!(job["result"]["outcome"], "reached_exact");
    assert_eq!(job["result"]["steps_executed"], 3);
}

#[tokio::test]
async fn reproduce_rejects_bad_requests() {
    let (app, _) = profile_server();
    let (status, body, _) = call(&app, post_json("/api/reproduce", r#"{"target": "six"}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body.contains("error"));
    let (status, _, _) = call(&app, post_json("/api/reproduce", "{not json")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _, _) = call(&app, post_json("/api/reproduce", r#"{"target": 1, "x": 2}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let no_type = Request::post("/api/reproduce").body(Body::from(r#"{"target": 1}"#)).unwrap();
    assert_eq!(call(&app, no_type).await.0, StatusCode::UNSUPPORTED_MEDIA_TYPE);
    let (status, body, _) = call(&app, post_json("/api/reproduce", r#"{"target": 99}"#)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(body.contains("unknown state 99"));
    assert_eq!(call(&app, get("/api/reproduce/job-999")).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn event_stream_replays_samples() {
    let (app, live) = profile_server();
    let res = app.clone().oneshot(get("/api/events")).await.unwrap();
    assert_eq!(res.status(), StatusCode::OK);
    assert_eq!(
        res.headers().get(header::CONTENT_TYPE).unwrap(),
        "text/event-stream"
    );
    let mut body = res.into_body();
    let mut text = String::new();
    let total = live.coverage.read().len();
    while text.matches("event: coverage").count() < total {
        let frame = tokio::time::timeout(Duration::from_secs(5), body.frame())
            .await
            .expect("stream stalled")
            .unwrap()
            .unwrap();
        if let Ok(data) = frame.into_data() {
            text.push_str(std::str::from_utf8(&data).unwrap());
        }
    }
    let first = text.lines().find(|l| l.starts_with("data:")).unwrap();
    let sample: serde_json::Value = serde_json::from_str(first.trim_start_matches("data:").trim()).unwrap();
    assert_eq!(sample["states"], 1);
}

#[tokio::test]
async fn cors_is_permissive() {
    let app = three_state_server();
    let req = Request::get("/api/model/graph")
        .header(header::ORIGIN, "http://localhost:3000")
        .body(Body::empty())
        .unwrap();
    let res = app.oneshot(req).await.unwrap();
    assert_eq!(res.headers().get(header::ACCESS_CONTROL_ALLOW_ORIGIN).unwrap(), "*");
}

#[tokio::test]
async fn serves_over_tcp() {
    let (app, _) = profile_server();
    let listener = uiwalk_server::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(uiwalk_server::serve(listener, app, async {
        let _ = stopped.await;
    }));
    let graph: serde_json::Value = reqwest::get(format!("http://{addr}/api/model/graph"))
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(graph["nodes"].as_array().unwrap().len(), 8);
    stop.send(()).unwrap();
    server.await.unwrap().unwrap();
}

#[tokio::test]
async fn bind_failure_is_reported() {
    let taken = uiwalk_server::bind("127.0.0.1:0").await.unwrap();
    let addr = taken.local_addr().unwrap().to_string();
    let err = uiwalk_server::bind(&addr).await.unwrap_err();
    assert!(err.to_string().contains(&addr));
}
