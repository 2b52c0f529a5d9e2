use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use pvg_service::{router, AppState, PutReport, SessionCreated, CACHE_HEADER, CONTENT_HASH_HEADER, FACTORIZATIONS_HEADER};
use tower::ServiceExt;

struct Reply {
    status: StatusCode,
    headers: axum::http::HeaderMap,
    body: Vec<u8>,
}

impl Reply {
    fn header(&self, name: &str) -> &str {
        self.headers.get(name).map(|v| v.to_str().unwrap()).unwrap_or("")
    }

    fn json<T: serde::de::DeserializeOwned>(&self) -> T {
        serde_json::from_slice(&self.body).unwrap()
    }

    fn image(&self) -> image::RgbImage {
        image::load_from_memory(&self.body).unwrap().to_rgb8()
    }
}

async fn call(app: &Router, req: Request<Body>) -> Reply {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let headers = res.headers().clone();
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, headers, body }
}

async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn put(app: &Router, uri: &str, body: impl Into<Body>) -> Reply {
    call(app, Request::put(uri).body(body.into()).unwrap()).await
}

fn app() -> (tempfile::TempDir, Router) {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(dir.path()).unwrap());
    (dir, app)
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64, inside: [f64; 3], outside: [f64; 3]) -> serde_json::Value {
    let mut pts = Vec::new();
    for c in [[x0, y0], [x1, y0], [x1, y1], [x0, y1]] {
        pts.extend([c; 3]);
    }
    serde_json::json!({
        "spline": { "control_points": pts, "closed": true },
        "left_colors": [{ "t": 0, "color": outside }],
        "right_colors": [{ "t": 0, "color": inside }]
    })
}

/// A Poisson curve inside a closed curve inside another closed curve.
fn nested(f_plus: f64, size: u32) -> Vec<u8> {
    let s = size as f64 / 64.0;
    let doc = serde_json::json!({
        "version": 1,
        "canvas": { "width": size, "height": size, "background": [0.9, 0.9, 0.9] },
        "diffusion_curves": [
            rect(4.0 * s, 4.0 * s, 60.0 * s, 60.0 * s, [0.3, 0.5, 0.7], [0.9, 0.9, 0.9]),
            rect(16.0 * s, 16.0 * s, 48.0 * s, 48.0 * s, [0.6, 0.4, 0.2], [0.3, 0.5, 0.7])
        ],
        "poisson_curves": [{
            "spline": { "control_points": [[32.0 * s, 20.0 * s], [32.0 * s, 28.0 * s], [32.0 * s, 36.0 * s], [32.0 * s, 44.0 * s]], "closed": false },
            "laplacian_stops": [{ "t": 0, "f_plus": [f_plus, f_plus, f_plus] }]
        }]
    });
    serde_json::to_vec(&doc).unwrap()
}

const CROSSING: &str = r#"{
  "version": 1,
  "canvas": { "width": 32, "height": 32, "background": [1, 1, 1] },
  "diffusion_curves": [
    { "spline": { "control_points": [[2, 2], [10, 10], [20, 20], [30, 30]], "closed": false },
      "left_colors": [{ "t": 0, "color": [1, 0, 0] }], "right_colors": [{ "t": 0, "color": [0, 0, 1] }] },
    { "spline": { "control_points": [[2, 30], [10, 20], [20, 10], [30, 2]], "closed": false },
      "left_colors": [{ "t": 0, "color": [0, 1, 0] }], "right_colors": [{ "t": 0, "color": [0, 0, 0] }] }
  ]
}"#;

#[tokio::test]
async fn health() {
    let (_d, app) = app();
    let r = get(&app, "/api/health").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json::<serde_json::Value>()["status"], "ok");
}

#[tokio::test]
async fn fresh_session_holds_the_default_document() {
    let (_d, app) = app();
    let r = call(&app, Request::post("/api/session").body(Body::empty()).unwrap()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let id = r.json::<SessionCreated>().id;
    let r = get(&app, &format!("/api/doc/{id}")).await;
    assert_eq!(r.status, StatusCode::OK);
    let doc = pvg_core::document::parse_document(&r.body).unwrap();
    assert_eq!(doc, pvg_core::document::PvgDocument::default());
}

#[tokio::test]
async fn unknown_sessions_and_bad_ids() {
    let (_d, app) = app();
    assert_eq!(get(&app, "/api/doc/nope").await.status, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/api/render/nope?w=8&h=8").await.status, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/api/doc/a.b").await.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn put_echoes_and_reports() {
    let (_d, app) = app();
    let body = nested(0.1, 64);
    let r = put(&app, "/api/doc/s1", body.clone()).await;
    assert_eq!(r.status, StatusCode::OK);
    let report: PutReport = r.json();
    assert!(report.renderable && report.diagnostics.is_empty());
    let echoed = get(&app, "/api/doc/s1").await.body;
    let canonical = pvg_core::document::serialize_document(&pvg_core::document::parse_document(&body).unwrap());
    assert_eq!(echoed, canonical);
}

#[tokio::test]
async fn crossing_curves_are_stored_but_not_rendered() {
    let (_d, app) = app();
    let r = put(&app, "/api/doc/x", CROSSING).await;
    assert_eq!(r.status, StatusCode::OK);
    let report: PutReport = r.json();
    assert!(!report.renderable);
    assert_eq!(report.diagnostics.iter().filter(|d| d.is_error()).count(), 1);
    assert_eq!(get(&app, "/api/doc/x").await.status, StatusCode::OK);
    let r = get(&app, "/api/render/x").await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json::<serde_json::Value>()["reason"], "invalid-document");
}

#[tokio::test]
async fn malformed_and_oversized_bodies() {
    let (_d, app) = app();
    assert_eq!(put(&app, "/api/doc/g", "garbage").await.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(get(&app, "/api/doc/g").await.status, StatusCode::NOT_FOUND);
    let big = vec![b' '; pvg_service::MAX_BODY_BYTES + 1];
    assert_eq!(put(&app, "/api/doc/g", big).await.status, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn bad_render_parameters() {
    let (_d, app) = app();
    put(&app, "/api/doc/p", nested(0.1, 64)).await;
    for q in ["w=0", "w=abc", "h=-3", "w=100000", "viewport=1,2,3", "viewport=0,0,64,64&w=8&h=8", "viewport=50,50,30,30"] {
        let r = get(&app, &format!("/api/render/p?{q}")).await;
        assert_eq!(r.status, StatusCode::BAD_REQUEST, "{q}");
    }
}

#[tokio::test]
async fn second_render_comes_from_the_cache() {
    let (_d, app) = app();
    put(&app, "/api/doc/c", nested(0.1, 64)).await;
    let a = get(&app, "/api/render/c?w=64&h=64").await;
    assert_eq!(a.status, StatusCode::OK);
    assert_eq!(a.header("content-type"), "image/png");
    assert_eq!(a.header(CACHE_HEADER), "miss");
    let b = get(&app, "/api/render/c?w=64&h=64").await;
    assert_eq!(b.header(CACHE_HEADER), "hit");
    assert_eq!(a.body, b.body);
    assert_eq!(a.header(CONTENT_HASH_HEADER).len(), 64);
    assert_eq!(a.header("etag"), format!("\"{}\"", a.header(CONTENT_HASH_HEADER)));
    // conditional request
    let req = Request::get("/api/render/c?w=64&h=64").header(header::IF_NONE_MATCH, a.header("etag")).body(Body::empty()).unwrap();
    let r = call(&app, req).await;
    assert_eq!(r.status, StatusCode::NOT_MODIFIED);
    assert!(r.body.is_empty());
}

#[tokio::test]
async fn slider_edit_changes_only_the_enclosing_subdomain() {
    let (_d, app) = app();
    put(&app, "/api/doc/e", nested(0.1, 64)).await;
    let a = get(&app, "/api/render/e").await;
    put(&app, "/api/doc/e", nested(0.3, 64)).await;
    let b = get(&app, "/api/render/e").await;
    assert_eq!(b.header(CACHE_HEADER), "miss");
    assert_ne!(a.header(CONTENT_HASH_HEADER), b.header(CONTENT_HASH_HEADER));
    let (ia, ib) = (a.image(), b.image());
    let mut inside_changes = 0;
    for (x, y, p) in ia.enumerate_pixels() {
        let inner = (16..48).contains(&x) && (16..48).contains(&y);
        if inner {
            inside_changes += (p != ib.get_pixel(x, y)) as usize;
        } else {
            assert_eq!(p, ib.get_pixel(x, y), "({x},{y})");
        }
    }
    assert!(inside_changes > 0);
}

#[tokio::test]
async fn zoom_and_pan_reuse_the_factorization() {
    let (_d, app) = app();
    put(&app, "/api/doc/z", nested(0.1, 64)).await;
    let base = get(&app, "/api/render/z").await;
    let f0: u64 = base.header(FACTORIZATIONS_HEADER).parse().unwrap();
    assert!(f0 > 0);
    for vp in ["24,24,6.4,6.4", "26,24,6.4,6.4", "28,30,0.64,0.64"] {
        let r = get(&app, &format!("/api/render/z?w=64&h=64&viewport={vp}")).await;
        assert_eq!(r.status, StatusCode::OK, "{vp}");
        assert_eq!(r.header(FACTORIZATIONS_HEADER), f0.to_string());
        assert_eq!((r.image().width(), r.image().height()), (64, 64));
    }
    // a document edit invalidates the solution
    put(&app, "/api/doc/z", nested(0.2, 64)).await;
    let r = get(&app, "/api/render/z?w=64&h=64&viewport=24,24,6.4,6.4").await;
    assert_eq!(r.header(FACTORIZATIONS_HEADER), (2 * f0).to_string());
}

#[tokio::test]
async fn documents_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let body = nested(0.1, 64);
    {
        let app = router(AppState::new(dir.path()).unwrap());
        put(&app, "/api/doc/keep", body.clone()).await;
    }
    let app = router(AppState::new(dir.path()).unwrap());
    let r = get(&app, "/api/doc/keep").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(pvg_core::document::parse_document(&r.body).unwrap(), pvg_core::document::parse_document(&body).unwrap());
    assert_eq!(get(&app, "/api/render/keep").await.status, StatusCode::OK);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn queued_renders_are_superseded_by_newer_ones() {
    let (_d, app) = app();
    put(&app, "/api/doc/q", nested(0.1, 384)).await;
    let spawn = |uri: &'static str| {
        let app = app.clone();
        tokio::spawn(async move { get(&app, uri).await })
    };
    let slow = spawn("/api/render/q?w=384&h=384");
    tokio::time::sleep(std::time::Duration::from_millis(40)).await;
    let queued = spawn("/api/render/q?w=200&h=200");
    tokio::time::sleep(std::time::Duration::from_millis(20)).await;
    let latest = spawn("/api/render/q?w=128&h=128");
    let (slow, queued, latest) = (slow.await.unwrap(), queued.await.unwrap(), latest.await.unwrap());
    assert_eq!(slow.status, StatusCode::OK);
    assert_eq!(queued.status, StatusCode::CONFLICT);
    assert_eq!(queued.json::<serde_json::Value>()["reason"], "superseded");
    assert_eq!(latest.status, StatusCode::OK);
    assert_eq!(latest.image().width(), 128);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn sessions_render_independently() {
    let (_d, app) = app();
    put(&app, "/api/doc/one", nested(0.1, 64)).await;
    put(&app, "/api/doc/two", nested(-0.2, 64)).await;
    let solo_one = get(&app, "/api/render/one?w=48&h=48").await.body;
    let solo_two = get(&app, "/api/render/two?w=48&h=48").await.body;
    // fresh service, both at once
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(dir.path()).unwrap());
    put(&app, "/api/doc/one", nested(0.1, 64)).await;
    put(&app, "/api/doc/two", nested(-0.2, 64)).await;
    let (a, b) = tokio::join!(get(&app, "/api/render/one?w=48&h=48"), get(&app, "/api/render/two?w=48&h=48"));
    assert_eq!(a.body, solo_one);
    assert_eq!(b.body, solo_two);
}
