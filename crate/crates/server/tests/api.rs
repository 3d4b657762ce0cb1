use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use unfun_core::game::RewardConfig;
use unfun_core::records::Origin;
use unfun_server::{router, AppState, SESSION_HEADER};
use unfun_store::{corpus_headline_id, FieldMap, Store};

const SATIRICAL: &str = "God diagnosed with bipolar disorder";
const SERIOUS_EDIT: &str = "Bob Dylan diagnosed with bipolar disorder";
const TRUTH_SERIOUS: &str = "Senate passes annual budget";

struct Harness {
    store: Arc<Store>,
    app: Router,
}

struct Reply {
    status: StatusCode,
    token: Option<String>,
    body: Value,
    raw: Vec<u8>,
}

fn harness(with_corpora: bool, game: RewardConfig, seed: u64) -> Harness {
    let store = Arc::new(Store::open_in_memory().unwrap());
    if with_corpora {
        let map = FieldMap::default();
        store
            .import_corpus_reader(format!("{{\"text\": \"{SATIRICAL}\"}}\n").as_bytes(), Origin::Satirical, &map)
            .unwrap();
        store
            .import_corpus_reader(format!("{{\"text\": \"{TRUTH_SERIOUS}\"}}\n").as_bytes(), Origin::Serious, &map)
            .unwrap();
    }
    let state = Arc::new(AppState::new(store.clone(), game, seed, 10));
    Harness {
        app: router(state, None),
        store,
    }
}

impl Harness {
    async fn send(&self, method: Method, uri: &str, token: Option<&str>, body: Option<Value>) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(t) = token {
            req = req.header(SESSION_HEADER, t);
        }
        let req = match body {
            Some(b) => req
                .header("content-type", "application/json")
                .body(Body::from(b.to_string()))
                .unwrap(),
            None => req.body(Body::empty()).unwrap(),
        };
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let token = resp
            .headers()
            .get(SESSION_HEADER)
            .map(|v| v.to_str().unwrap().to_string());
        let raw = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        let body = serde_json::from_slice(&raw).unwrap_or(Value::Null);
        Reply {
            status,
            token,
            body,
            raw,
        }
    }

    async fn submit(&self, token: &str, headline_id: &str, text: &str) -> Reply {
        self.send(
            Method::POST,
            "/api/unfun",
            Some(token),
            Some(json!({"headline_id": headline_id, "modified_text": text})),
        )
        .await
    }

    /// Requests tasks until a rating task comes up.
    async fn rating_task(&self, token: &str) -> Vec<(String, String)> {
        for _ in 0..200 {
            let r = self.send(Method::GET, "/api/task", Some(token), None).await;
            assert_eq!(r.status, StatusCode::OK);
            if r.body["task"] == "rate" {
                return r.body["items"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|i| (i["id"].as_str().unwrap().to_string(), i["text"].as_str().unwrap().to_string()))
                    .collect();
            }
        }
        panic!("no rating task issued");
    }

    /// Answers a rating task: `modified_value` for the modified item,
    /// `truth_value` for the ground truth.
    async fn answer(&self, token: &str, items: &[(String, String)], modified_value: f64, truth_value: f64) -> Reply {
        let body: Vec<Value> = items
            .iter()
            .map(|(id, _)| {
                let origin = self.store.headline(id).unwrap().unwrap().origin;
                let value = if origin == Origin::Modified { modified_value } else { truth_value };
                json!({"id": id, "value": value})
            })
            .collect();
        self.send(Method::POST, "/api/ratings", Some(token), Some(json!({ "items": body })))
            .await
    }
}

fn mostly_rating() -> RewardConfig {
    RewardConfig {
        alpha: 0.05,
        ..RewardConfig::default()
    }
}

#[tokio::test]
async fn empty_corpora_give_503_and_a_session() {
    let h = harness(false, RewardConfig::default(), 1);
    let r = h.send(Method::GET, "/api/task", None, None).await;
    assert_eq!(r.status, StatusCode::SERVICE_UNAVAILABLE);
    assert!(r.token.is_some());
    assert!(r.body["error"].is_string());
}

#[tokio::test]
async fn fresh_server_issues_an_unfun_task() {
    let h = harness(true, RewardConfig::default(), 1);
    let r = h.send(Method::GET, "/api/task", None, None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body["task"], "unfun");
    assert_eq!(r.body["headline"], SATIRICAL);
    assert_eq!(r.body["headline_id"], corpus_headline_id(SATIRICAL));

    let token = r.token.unwrap();
    let again = h.send(Method::GET, "/api/task", Some(&token), None).await;
    assert_eq!(again.token, None, "known sessions keep their token");
}

#[tokio::test]
async fn unfun_submission_errors() {
    let h = harness(true, RewardConfig::default(), 1);
    let id = corpus_headline_id(SATIRICAL);
    let ok = h.submit("author", &id, SERIOUS_EDIT).await;
    assert_eq!(ok.status, StatusCode::OK);
    assert_eq!(ok.body["pending_reward"], true);
    assert!(ok.body["submission_id"].is_string());
    assert_eq!(h.submit("author", "0000000000000000", SERIOUS_EDIT).await.status, StatusCode::NOT_FOUND);
    assert_eq!(h.submit("author", &id, "  ").await.status, StatusCode::UNPROCESSABLE_ENTITY);
    let serious = corpus_headline_id(TRUTH_SERIOUS);
    assert_eq!(h.submit("author", &serious, "x").await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn rating_tasks_hide_the_ground_truth() {
    let h = harness(true, mostly_rating(), 3);
    h.submit("author", &corpus_headline_id(SATIRICAL), SERIOUS_EDIT).await;
    for _ in 0..20 {
        let r = h.send(Method::GET, "/api/task", Some("rater"), None).await;
        if r.body["task"] != "rate" {
            continue;
        }
        let obj = r.body.as_object().unwrap();
        assert_eq!(obj.keys().collect::<Vec<_>>(), ["items", "task"]);
        let items = r.body["items"].as_array().unwrap();
        assert_eq!(items.len(), 2);
        for item in items {
            let mut keys: Vec<_> = item.as_object().unwrap().keys().cloned().collect();
            keys.sort();
            assert_eq!(keys, ["id", "text"]);
        }
    }
}

#[tokio::test]
async fn rewards_leaderboard_and_duplicates() {
    let h = harness(true, mostly_rating(), 5);
    h.submit("author", &corpus_headline_id(SATIRICAL), SERIOUS_EDIT).await;

    let items = h.rating_task("rater1").await;
    let r = h.answer("rater1", &items, 0.8, 0.99).await;
    assert_eq!(r.status, StatusCode::OK);
    // The satirical original is never paired with its own modification,
    // so the serious headline is the ground truth.
    assert!(items.iter().any(|(_, t)| t == TRUTH_SERIOUS));
    assert!((r.body["reward"].as_f64().unwrap() - 200.0).abs() < 1e-9, "{}", r.body);

    assert_eq!(h.answer("rater1", &items, 0.8, 0.99).await.status, StatusCode::CONFLICT);

    let items2 = h.rating_task("rater2").await;
    assert_eq!(h.answer("rater2", &items2, 1.5, 0.5).await.status, StatusCode::UNPROCESSABLE_ENTITY);
    let r2 = h.answer("rater2", &items2, 0.7, 0.5).await;
    assert_eq!(r2.status, StatusCode::OK);
    let half = 200.0 * (0.5f64.ln() - 0.01f64.ln()) / (0.99f64.ln() - 0.01f64.ln());
    assert!((r2.body["reward"].as_f64().unwrap() - half).abs() < 1e-9);
    assert!((half - 170.3).abs() < 0.05);

    let me = h.send(Method::GET, "/api/me", Some("author"), None).await;
    let unfun = me.body["cumulative_unfun_reward"].as_f64().unwrap();
    assert!((unfun - 1000.0 * 0.5f64.sqrt()).abs() < 1e-6, "{unfun}");
    assert_eq!(me.body["unfun_count"], 1);

    let board = h.send(Method::GET, "/api/leaderboard", None, None).await;
    let totals: Vec<f64> = board.body.as_array().unwrap().iter().map(|e| e["total_reward"].as_f64().unwrap()).collect();
    assert_eq!(totals.len(), 3);
    for (got, want) in totals.iter().zip([1000.0 * 0.5f64.sqrt(), 200.0, half]) {
        assert!((got - want).abs() < 1e-6, "{totals:?}");
    }
    assert_eq!(board.body[0]["rank"], 1);
}

#[tokio::test]
async fn ratings_require_an_issued_task() {
    let h = harness(true, RewardConfig::default(), 1);
    let a = corpus_headline_id(SATIRICAL);
    let b = corpus_headline_id(TRUTH_SERIOUS);
    let r = h
        .send(
            Method::POST,
            "/api/ratings",
            Some("sneaky"),
            Some(json!({"items": [{"id": a, "value": 0.2}, {"id": b, "value": 0.9}]})),
        )
        .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn empty_leaderboard_and_export() {
    let h = harness(false, RewardConfig::default(), 1);
    let board = h.send(Method::GET, "/api/leaderboard", None, None).await;
    assert_eq!(board.body, json!([]));
    let export = h.send(Method::GET, "/api/export", None, None).await;
    assert_eq!(export.status, StatusCode::OK);
    assert!(export.raw.is_empty());
}

#[tokio::test]
async fn export_matches_the_store() {
    let h = harness(true, mostly_rating(), 9);
    h.submit("author", &corpus_headline_id(SATIRICAL), SERIOUS_EDIT).await;
    let items = h.rating_task("r").await;
    h.answer("r", &items, 0.9, 0.5).await;
    let export = h.send(Method::GET, "/api/export", None, None).await;
    let mut direct = Vec::new();
    assert_eq!(h.store.export_pairs(&mut direct).unwrap(), 1);
    assert_eq!(export.raw, direct);
}

#[tokio::test]
async fn seeded_task_mix() {
    let run = || async {
        let h = harness(true, RewardConfig::default(), 42);
        h.submit("author", &corpus_headline_id(SATIRICAL), SERIOUS_EDIT).await;
        let mut kinds = Vec::new();
        for _ in 0..600 {
            let r = h.send(Method::GET, "/api/task", Some("player"), None).await;
            kinds.push(r.body["task"].as_str().unwrap().to_string());
        }
        kinds
    };
    let first = run().await;
    assert_eq!(first, run().await, "same seed, same task sequence");
    let unfun = first.iter().filter(|k| *k == "unfun").count() as f64 / first.len() as f64;
    assert!((unfun - 1.0 / 3.0).abs() < 0.06, "{unfun}");
}

#[tokio::test]
async fn serves_static_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<h1>unfun</h1>").unwrap();
    let store = Arc::new(Store::open_in_memory().unwrap());
    let state = Arc::new(AppState::new(store, RewardConfig::default(), 0, 10));
    let app = router(state, Some(dir.path()));
    let resp = app
        .oneshot(Request::builder().uri("/").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let body = resp.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(&body[..], b"<h1>unfun</h1>");
}
