//! HTTP front end for basin renders, attractor tables and orbits.
//!
//! | route              | query                                                             |
//! |--------------------|-------------------------------------------------------------------|
//! | `/api/basins`      | `set line [region res iters match_tol max_period format=json\|ppm]` |
//! | `/api/attractors`  | `set line [region max_period]`                                    |
//! | `/api/orbit`       | `set line start [iters]`                                          |
//! | `/api/health`      |                                                                   |
//!
//! Bad parameters give 400 and pairs the mathematics rejects give 422, both
//! with a JSON body `{kind, reason[, gap]}`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use lru::LruCache;
use sha2::{Digest, Sha256};
use tokio::sync::Semaphore;

use drconic::params::{self, json, LineSpec, SetSpec};
use drconic::report::{self, BasinRequest, ErrorKind, Pair, ReportError};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub max_pixels: usize,
    pub cache_entries: usize,
    /// Renders allowed to run at once; further requests wait in order.
    pub workers: usize,
    /// Threads per render; `0` uses every core.
    pub render_threads: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            max_pixels: 1024 * 1024,
            cache_entries: 128,
            workers: 2,
            render_threads: 0,
        }
    }
}

#[derive(Clone)]
struct Cached {
    status: StatusCode,
    content_type: &'static str,
    body: Arc<Vec<u8>>,
}

struct AppState {
    config: ServiceConfig,
    cache: Mutex<LruCache<String, Cached>>,
    permits: Arc<Semaphore>,
}

pub fn router(config: ServiceConfig) -> Router {
    let cap = NonZeroUsize::new(config.cache_entries.max(1)).expect("nonzero");
    let state = Arc::new(AppState {
        permits: Arc::new(Semaphore::new(config.workers.max(1))),
        cache: Mutex::new(LruCache::new(cap)),
        config,
    });
    Router::new()
        .route("/api/health", get(health))
        .route("/api/basins", get(basins))
        .route("/api/attractors", get(attractors))
        .route("/api/orbit", get(orbit))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}

const JSON: &str = "application/json";
const PPM: &str = "image/x-portable-pixmap";

type Q = HashMap<String, String>;

fn required<'a>(q: &'a Q, key: &str) -> Result<&'a str, ReportError> {
    q.get(key)
        .map(String::as_str)
        .ok_or_else(|| ReportError::validation(format!("missing parameter {key}")))
}

fn parsed<T>(q: &Q, key: &str, default: &str, f: impl Fn(&str) -> Result<T, params::ParseError>) -> Result<T, ReportError> {
    let raw = q.get(key).map(String::as_str).unwrap_or(default);
    f(raw).map_err(|e| ReportError::validation(format!("{key}: {e}")))
}

fn number<T: std::str::FromStr>(q: &Q, key: &str, default: T) -> Result<T, ReportError> {
    match q.get(key) {
        None => Ok(default),
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| ReportError::validation(format!("{key}: cannot parse {v:?}"))),
    }
}

fn pair(q: &Q) -> Result<Pair, ReportError> {
    let set: SetSpec = required(q, "set")?
        .parse()
        .map_err(|e: params::ParseError| ReportError::validation(format!("set: {e}")))?;
    let line: LineSpec = required(q, "line")?
        .parse()
        .map_err(|e: params::ParseError| ReportError::validation(format!("line: {e}")))?;
    Pair::new(set, line)
}

fn error_response(e: &ReportError) -> Cached {
    let status = match e.kind {
        ErrorKind::Validation => StatusCode::BAD_REQUEST,
        ErrorKind::Domain => StatusCode::UNPROCESSABLE_ENTITY,
    };
    Cached {
        status,
        content_type: JSON,
        body: Arc::new(json::to_vec(e).expect("error serializes")),
    }
}

fn json_response<S: serde::Serialize>(v: &S) -> Cached {
    Cached {
        status: StatusCode::OK,
        content_type: JSON,
        body: Arc::new(json::to_vec(v).expect("document serializes")),
    }
}

fn respond(c: Cached, hash: Option<&str>) -> Response {
    let mut r = (c.status, [(header::CONTENT_TYPE, c.content_type)], c.body.as_ref().clone()).into_response();
    if let Some(h) = hash {
        if let Ok(v) = HeaderValue::from_str(&format!("\"{h}\"")) {
            r.headers_mut().insert(header::ETAG, v);
        }
    }
    r
}

fn request_hash(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// Looks `canonical` up in the cache, otherwise runs `work` on the blocking
/// pool once a worker permit is free and caches the result.
async fn cached<F>(state: Arc<AppState>, canonical: String, work: F) -> Response
where
    F: FnOnce() -> Cached + Send + 'static,
{
    let hash = request_hash(&canonical);
    if let Some(hit) = state.cache.lock().expect("cache lock").get(&hash).cloned() {
        return respond(hit, Some(&hash));
    }
    let permit = state.permits.clone().acquire_owned().await.expect("semaphore open");
    let out = tokio::task::spawn_blocking(move || {
        let _permit = permit;
        work()
    })
    .await;
    let out = match out {
        Ok(c) => c,
        Err(_) => {
            return (StatusCode::INTERNAL_SERVER_ERROR, "render failed").into_response();
        }
    };
    state.cache.lock().expect("cache lock").put(hash.clone(), out.clone());
    respond(out, Some(&hash))
}

async fn health() -> Response {
    respond(json_response(&serde_json::json!({"status": "ok", "schema": report::SCHEMA})), None)
}

async fn basins(State(state): State<Arc<AppState>>, Query(q): Query<Q>) -> Response {
    let setup = || -> Result<(Pair, BasinRequest, bool), ReportError> {
        let pair = pair(&q)?;
        let region = parsed(&q, "region", "-4:4:-4:4", params::parse_region)?;
        let (width, height) = parsed(&q, "res", "128x128", params::parse_resolution)?;
        let ppm = match q.get("format").map(String::as_str) {
            None | Some("json") => false,
            Some("ppm") => true,
            Some(other) => return Err(ReportError::validation(format!("format: unknown {other:?}"))),
        };
        let req = BasinRequest {
            region,
            width,
            height,
            iters: number(&q, "iters", 1000)?,
            match_tol: number(&q, "match_tol", 1e-3)?,
            max_period: number(&q, "max_period", 3)?,
            threads: state.config.render_threads,
        };
        req.validate(state.config.max_pixels)?;
        Ok((pair, req, ppm))
    };
    let (pair, req, ppm) = match setup() {
        Ok(v) => v,
        Err(e) => return respond(error_response(&e), None),
    };
    let canonical = format!(
        "basins|{}|{}|{}|{}x{}|{}|{:e}|{}|{}",
        pair.set_spec,
        pair.line_spec,
        params::format_region(&req.region),
        req.width,
        req.height,
        req.iters,
        req.match_tol,
        req.max_period,
        if ppm { "ppm" } else { "json" }
    );
    let max_pixels = state.config.max_pixels;
    cached(state, canonical, move || match report::basins(&pair, &req, max_pixels) {
        Ok(b) if ppm => Cached {
            status: StatusCode::OK,
            content_type: PPM,
            body: Arc::new(b.ppm()),
        },
        Ok(b) => json_response(&b.document(&pair, req.match_tol)),
        Err(e) => error_response(&e),
    })
    .await
}

async fn attractors(State(state): State<Arc<AppState>>, Query(q): Query<Q>) -> Response {
    let setup = || -> Result<_, ReportError> {
        let pair = pair(&q)?;
        let region = parsed(&q, "region", "-4:4:-4:4", params::parse_region)?;
        let max_period: usize = number(&q, "max_period", 3)?;
        if max_period == 0 || max_period > 16 {
            return Err(ReportError::validation("max_period must be in 1..=16"));
        }
        Ok((pair, region, max_period))
    };
    let (pair, region, max_period) = match setup() {
        Ok(v) => v,
        Err(e) => return respond(error_response(&e), None),
    };
    let canonical = format!(
        "attractors|{}|{}|{}|{}",
        pair.set_spec,
        pair.line_spec,
        params::format_region(&region),
        max_period
    );
    cached(state, canonical, move || {
        match report::attractor_document(&pair, &region, max_period) {
            Ok(d) => json_response(&d),
            Err(e) => error_response(&e),
        }
    })
    .await
}

async fn orbit(State(state): State<Arc<AppState>>, Query(q): Query<Q>) -> Response {
    let setup = || -> Result<_, ReportError> {
        let pair = pair(&q)?;
        let start = params::parse_point(required(&q, "start")?).map_err(|e| ReportError::validation(format!("start: {e}")))?;
        let iters: usize = number(&q, "iters", 1000)?;
        if iters == 0 || iters > report::MAX_ORBIT_ITERS {
            return Err(ReportError::validation(format!("iters must be in 1..={}", report::MAX_ORBIT_ITERS)));
        }
        Ok((pair, start, iters))
    };
    let (pair, start, iters) = match setup() {
        Ok(v) => v,
        Err(e) => return respond(error_response(&e), None),
    };
    let canonical = format!(
        "orbit|{}|{}|{:e},{:e}|{}",
        pair.set_spec, pair.line_spec, start.x, start.y, iters
    );
    cached(state, canonical, move || match report::orbit(&pair, start, iters) {
        Ok(o) => json_response(&o),
        Err(e) => error_response(&e),
    })
    .await
}
