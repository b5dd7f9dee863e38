use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use drconic_service::{router, ServiceConfig};

async fn get(app: &axum::Router, uri: &str) -> (StatusCode, String, Vec<u8>) {
    let res = app
        .clone()
        .oneshot(Request::builder().uri(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = res.status();
    let ct = res
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, ct, body)
}

fn json(body: &[u8]) -> Value {
    serde_json::from_slice(body).unwrap()
}

fn app() -> axum::Router {
    router(ServiceConfig { render_threads: 1, ..ServiceConfig::default() })
}

#[tokio::test]
async fn health() {
    let (s, _, b) = get(&app(), "/api/health").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(json(&b)["status"], "ok");
}

#[tokio::test]
async fn basins_e2_l2() {
    let app = app();
    let uri = "/api/basins?set=ellipse:b=2&line=slope=2&res=64x64&max_period=2";
    let (s, ct, b) = get(&app, uri).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(ct, "application/json");
    let v = json(&b);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["attractors"].as_array().unwrap().len(), 4);
    assert_eq!(v["legend"].as_array().unwrap().len(), 4);
    assert_eq!(v["labels"].as_array().unwrap().len(), 64 * 64);
    // Repeats are identical, whether served from the cache or not.
    let (_, _, again) = get(&app, uri).await;
    assert_eq!(again, b);
    let (_, _, fresh) = get(&self::app(), uri).await;
    assert_eq!(fresh, b);
}

#[tokio::test]
async fn basins_as_ppm() {
    let (s, ct, b) = get(&app(), "/api/basins?set=ellipse:b=2&line=slope=2&res=16x8&max_period=2&format=ppm").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(ct, "image/x-portable-pixmap");
    assert!(b.starts_with(b"P6\n16 8\n255\n"));
    assert_eq!(b.len(), 12 + 16 * 8 * 3);
}

#[tokio::test]
async fn validation_failures_are_400() {
    let app = app();
    for uri in [
        "/api/basins?set=ellipse:b=2&line=slope=2&region=1:1:0:1",
        "/api/basins?set=ellipse:b=2&line=slope=2&res=2048x2048",
        "/api/basins?set=ellipse:b=-2&line=slope=2",
        "/api/basins?line=slope=2",
        "/api/basins?set=circle&line=slope=2&format=png",
        "/api/orbit?set=circle&line=slope=2&start=0.5,0.5&iters=1000000",
        "/api/orbit?set=circle&line=slope=2",
    ] {
        let (s, _, b) = get(&app, uri).await;
        assert_eq!(s, StatusCode::BAD_REQUEST, "{uri}");
        let v = json(&b);
        assert_eq!(v["kind"], "validation");
        assert!(v["reason"].as_str().unwrap().len() > 3);
    }
}

#[tokio::test]
async fn infeasible_pair_is_422_with_gap() {
    let (s, _, b) = get(&app(), "/api/basins?set=circle&line=slope=0,intercept=3&region=-2:2:-2:2&res=8x8&max_period=2").await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let v = json(&b);
    assert_eq!(v["kind"], "domain");
    assert!((v["gap"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[tokio::test]
async fn attractor_table_only() {
    let (s, _, b) = get(&app(), "/api/attractors?set=ellipse:b=3&line=slope=2&max_period=3").await;
    assert_eq!(s, StatusCode::OK);
    let v = json(&b);
    let periods: Vec<u64> = v["attractors"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|e| e["period"].as_u64())
        .collect();
    assert!(periods.contains(&2) && periods.contains(&3));
}

#[tokio::test]
async fn orbits() {
    let app = app();
    let s = 0.5f64.sqrt();
    let (st, _, b) = get(&app, &format!("/api/orbit?set=ellipse:b=2&line=slope=2&start={s},{}", 2.0 * s)).await;
    assert_eq!(st, StatusCode::OK);
    let v = json(&b);
    assert_eq!(v["terminated"], "converged");
    assert!(v["points"].as_array().unwrap().len() <= 2);
    assert!((v["certificate"]["eigen_modulus_sq"].as_f64().unwrap() - 0.36).abs() < 1e-12);

    // Near the repelling period-2 pair the orbit leaves and settles on a feasible point.
    let (_, _, b) = get(&app, "/api/orbit?set=ellipse:b=2&line=slope=2&start=0.4234,-0.3244&iters=5000").await;
    let v = json(&b);
    assert_eq!(v["terminated"], "converged");

    let (_, _, b) = get(&app, "/api/orbit?set=circle&line=slope=0,intercept=2&start=0.5,0&iters=2000000").await;
    assert_eq!(json(&b)["kind"], "validation");
    let (_, _, b) = get(&app, "/api/orbit?set=circle&line=slope=0,intercept=50&start=0.5,0&iters=100000").await;
    let v = json(&b);
    assert_eq!(v["terminated"], "diverged");
    let f: Vec<f64> = v["functional"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(f.windows(2).all(|w| w[1] - w[0] >= 49.0 - 1e-9));
}

#[tokio::test]
async fn concurrent_requests_get_their_own_results() {
    let app = router(ServiceConfig { workers: 1, render_threads: 1, ..ServiceConfig::default() });
    let uris: Vec<String> = [2.0, 3.0, 4.0]
        .iter()
        .map(|b| format!("/api/basins?set=ellipse:b={b}&line=slope=2&res=16x16&max_period=2"))
        .collect();
    let handles: Vec<_> = uris
        .iter()
        .cloned()
        .map(|u| {
            let app = app.clone();
            tokio::spawn(async move { get(&app, &u).await })
        })
        .collect();
    for (h, u) in handles.into_iter().zip(&uris) {
        let (s, _, b) = h.await.unwrap();
        assert_eq!(s, StatusCode::OK);
        let (_, _, solo) = get(&self::app(), u).await;
        assert_eq!(b, solo);
        assert!(json(&b)["set"].as_str().unwrap().starts_with("ellipse:b="));
    }
}
