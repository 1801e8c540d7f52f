mod common;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use lulc_workbench::{http, SessionStore};
use serde_json::{json, Value};
use tower::ServiceExt;

struct Api {
    _tmp: tempfile::TempDir,
    app: Router,
}

impl Api {
    fn new() -> Self {
        let tmp = tempfile::tempdir().unwrap();
        let store = Arc::new(SessionStore::open(tmp.path()).unwrap());
        Api { app: http::router(store, None), _tmp: tmp }
    }

    async fn send(&self, method: Method, uri: &str, body: Vec<u8>) -> (StatusCode, String, Vec<u8>) {
        let req = Request::builder().method(method).uri(uri).body(Body::from(body)).unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let ct = resp
            .headers()
            .get(header::CONTENT_TYPE)
            .map(|v| v.to_str().unwrap().to_string())
            .unwrap_or_default();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        (status, ct, bytes)
    }

    async fn json(&self, method: Method, uri: &str, body: Vec<u8>) -> (StatusCode, Value) {
        let (status, _, bytes) = self.send(method, uri, body).await;
        (status, serde_json::from_slice(&bytes).unwrap())
    }
}

fn one_pixel_png() -> Vec<u8> {
    let img = lulc_core::RgbImage::filled(1, 1, lulc_core::RgbColor::new(1.0, 0.0, 0.0)).unwrap();
    lulc_workbench::imageio::encode_rgb_png(&img).unwrap()
}

#[tokio::test]
async fn healthz() {
    let api = Api::new();
    let (status, body) = api.json(Method::GET, "/healthz", vec![]).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
}

#[tokio::test]
async fn session_lifecycle() {
    let api = Api::new();
    let (status, created) = api.json(Method::POST, "/sessions", one_pixel_png()).await;
    assert_eq!(status, StatusCode::CREATED);
    let id = created["id"].as_str().unwrap().to_string();

    let (status, got) = api.json(Method::GET, &format!("/sessions/{id}"), vec![]).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(got["source"]["width"], 1);
    assert_eq!(got["source"]["height"], 1);
    assert!(got["run"].is_null());

    let (status, _) = api.json(Method::POST, "/sessions", one_pixel_png()).await;
    assert_eq!(status, StatusCode::CREATED);
    let (status, body) = api.json(Method::POST, "/sessions", b"not an image".to_vec()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].is_string());

    let (status, _) = api.json(Method::GET, "/sessions/00000000-0000-0000-0000-000000000000", vec![]).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = api.json(Method::GET, "/sessions/nope", vec![]).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn pipeline_and_artifacts() {
    let api = Api::new();
    let (png, palette, _) = common::painted_png(48, 40, 11);
    let (_, created) = api.json(Method::POST, "/sessions", png).await;
    let id = created["id"].as_str().unwrap().to_string();
    let base = format!("/sessions/{id}");

    let (status, _) = api.json(Method::GET, &format!("{base}/artifacts/stats"), vec![]).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = api.json(Method::GET, &format!("{base}/artifacts/mask/1"), vec![]).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (status, _) = api.json(Method::POST, &format!("{base}/pipeline"), vec![]).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let req = json!({ "palette": palette, "options": { "rng_seed": 7, "bins_per_axis": 16 } });
    let (status, session) = api
        .json(Method::POST, &format!("{base}/pipeline"), serde_json::to_vec(&req).unwrap())
        .await;
    assert_eq!(status, StatusCode::OK, "{session}");
    assert_eq!(session["run"]["options"]["bins_per_axis"], 16);
    assert_eq!(session["run"]["samples"].as_array().unwrap().len(), 6);

    let (status, stats) = api.json(Method::GET, &format!("{base}/artifacts/stats"), vec![]).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(stats["image_area"], 48 * 40);
    assert_eq!(stats["clusters"].as_array().unwrap().len(), 7);

    let (status, bars) = api.json(Method::GET, &format!("{base}/artifacts/bars"), vec![]).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(bars[1]["percent"], stats["clusters"][1]["pct_of_foreground"]);

    let (status, ct, body) = api.send(Method::GET, &format!("{base}/artifacts/mask/3"), vec![]).await;
    assert_eq!((status, ct.as_str()), (StatusCode::OK, "image/png"));
    let mask = lulc_workbench::imageio::decode_mask_png(&body).unwrap();
    assert_eq!(mask.popcount() as u64, stats["clusters"][2]["count"].as_u64().unwrap());

    let (status, ct, body) = api.send(Method::GET, &format!("{base}/artifacts/report"), vec![]).await;
    assert_eq!(status, StatusCode::OK);
    assert!(ct.starts_with("text/plain"));
    assert!(String::from_utf8(body).unwrap().contains("Total image area= 1920 pixels"));

    let (status, mesh) = api.json(Method::GET, &format!("{base}/artifacts/mesh/2"), vec![]).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(mesh["cluster"], 2);
    assert!(!mesh["triangles"].as_array().unwrap().is_empty());

    let (status, ct, obj) = api.send(Method::GET, &format!("{base}/artifacts/mesh/2?format=obj"), vec![]).await;
    assert_eq!((status, ct.as_str()), (StatusCode::OK, "model/obj"));
    assert!(String::from_utf8(obj).unwrap().contains("\nf "));

    let (status, _) = api.json(Method::GET, &format!("{base}/artifacts/overlap/2?with=5"), vec![]).await;
    assert_eq!(status, StatusCode::OK);

    for (uri, expected) in [
        ("artifacts/mesh/1", StatusCode::UNPROCESSABLE_ENTITY),
        ("artifacts/mask/8", StatusCode::NOT_FOUND),
        ("artifacts/mask/x", StatusCode::NOT_FOUND),
        ("artifacts/colormap/99", StatusCode::NOT_FOUND),
        ("artifacts/whatever", StatusCode::NOT_FOUND),
        ("artifacts/mask", StatusCode::BAD_REQUEST),
        ("artifacts/mesh/2?format=stl", StatusCode::BAD_REQUEST),
        ("artifacts/overlap/2", StatusCode::BAD_REQUEST),
    ] {
        let (status, _) = api.json(Method::GET, &format!("{base}/{uri}"), vec![]).await;
        assert_eq!(status, expected, "{uri}");
    }

    let (status, _) = api
        .json(Method::POST, &format!("{base}/pipeline"), br#"{"options": {"iso_level_fraction": 2}}"#.to_vec())
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn seed_picking() {
    let api = Api::new();
    let (png, _, _) = common::painted_png(16, 16, 12);
    let (_, created) = api.json(Method::POST, "/sessions", png).await;
    let base = format!("/sessions/{}", created["id"].as_str().unwrap());
    let (status, s) = api
        .json(Method::POST, &format!("{base}/seeds"), br#"{"x": 3, "y": 5}"#.to_vec())
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["seeds"][0]["label"], "background");
    let (status, _) = api
        .json(Method::POST, &format!("{base}/seeds"), br#"{"x": 16, "y": 0}"#.to_vec())
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, s) = api.json(Method::DELETE, &format!("{base}/seeds"), vec![]).await;
    assert_eq!(status, StatusCode::OK);
    assert!(s["seeds"].as_array().unwrap().is_empty());
}
