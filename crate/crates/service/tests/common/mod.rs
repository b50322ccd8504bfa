#![allow(dead_code)]

use std::path::Path;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;
use typespace::{router, AppState};
use typespace_core::demo::demo_space;
use typespace_core::store::SessionStore;

pub fn app(dir: &Path) -> Router {
    let store = SessionStore::open(dir).unwrap();
    router(AppState::new(demo_space(), store), None)
}

pub async fn raw(app: &Router, method: &str, uri: &str, body: Option<&Value>) -> (StatusCode, String, String) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(serde_json::to_vec(v).unwrap())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let ctype = resp
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, ctype, String::from_utf8(bytes.to_vec()).unwrap())
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<&Value>) -> (StatusCode, Value) {
    let (status, _, text) = raw(app, method, uri, body).await;
    (status, serde_json::from_str(&text).unwrap_or(Value::Null))
}
