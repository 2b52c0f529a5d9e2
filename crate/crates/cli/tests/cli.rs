use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SCENE: &str = r#"{
  "version": 1,
  "canvas": { "width": 48, "height": 48, "background": [0.9, 0.9, 0.8] },
  "diffusion_curves": [
    {
      "spline": { "control_points": [[8, 8], [8, 8], [8, 8], [40, 8], [40, 8], [40, 8], [40, 40], [40, 40], [40, 40], [8, 40], [8, 40], [8, 40]], "closed": true },
      "left_colors": [{ "t": 0, "color": [0.9, 0.9, 0.8] }],
      "right_colors": [{ "t": 0, "color": [0.2, 0.4, 0.9] }, { "t": 0.5, "color": [0.9, 0.3, 0.1] }]
    }
  ],
  "poisson_curves": [
    {
      "spline": { "control_points": [[14, 20], [20, 16], [28, 22], [32, 30]], "closed": false },
      "laplacian_stops": [{ "t": 0, "f_plus": [0.15, 0.15, 0.15] }]
    }
  ],
  "poisson_regions": [
    {
      "boundary": { "control_points": [[22, 26], [28, 26], [28, 32], [22, 32]], "closed": true },
      "f_outer": [0.02, -0.01, 0.03]
    }
  ]
}"#;

const CROSSING: &str = r#"{
  "version": 1,
  "canvas": { "width": 32, "height": 32, "background": [1, 1, 1] },
  "diffusion_curves": [
    {
      "spline": { "control_points": [[2, 2], [10, 10], [20, 20], [30, 30]], "closed": false },
      "left_colors": [{ "t": 0, "color": [1, 0, 0] }],
      "right_colors": [{ "t": 0, "color": [0, 0, 1] }]
    },
    {
      "spline": { "control_points": [[2, 30], [10, 20], [20, 10], [30, 2]], "closed": false },
      "left_colors": [{ "t": 0, "color": [0, 1, 0] }],
      "right_colors": [{ "t": 0, "color": [0, 0, 0] }]
    }
  ]
}"#;

fn pvg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvg"))
        .args(args)
        .env_remove("PVG_THREADS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn render_writes_a_png_of_the_requested_size() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "scene.pvg.json", SCENE);
    let out = dir.path().join("out.png");
    let o = pvg(&["render", s(&doc), "-o", s(&out), "-w", "64", "-h", "40", "-v"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let img = image::open(&out).unwrap();
    assert_eq!((img.width(), img.height()), (64, 40));
    let err = String::from_utf8_lossy(&o.stderr);
    for col in ["T_d", "T_s", "T "] {
        assert!(err.contains(col), "{err}");
    }
}

#[test]
fn sixteen_bit_output() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "scene.pvg.json", SCENE);
    let out = dir.path().join("out.png");
    assert_eq!(code(&pvg(&["render", s(&doc), "-o", s(&out), "--16bit"])), 0);
    assert!(matches!(image::open(&out).unwrap(), image::DynamicImage::ImageRgb16(_)));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "scene.pvg.json", SCENE);
    let mut outputs = Vec::new();
    for n in ["1", "2", "8"] {
        let out = dir.path().join(format!("out{n}.png"));
        let o = Command::new(env!("CARGO_BIN_EXE_pvg"))
            .args(["render", s(&doc), "-o", s(&out), "--supersample", "2"])
            .env("PVG_THREADS", n)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn zoom_renders_a_window() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "scene.pvg.json", SCENE);
    let out = dir.path().join("zoom.png");
    let o = pvg(&["zoom", s(&doc), "-o", s(&out), "--viewport", "20,20,8,8", "-w", "80", "-h", "80"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(image::open(&out).unwrap().width(), 80);
    // zooming out is refused
    let o = pvg(&["zoom", s(&doc), "-o", s(&out), "--viewport", "0,0,48,48", "-w", "10", "-h", "10"]);
    assert_eq!(code(&o), 64);
    // zoom without a window is a usage error
    assert_eq!(code(&pvg(&["zoom", s(&doc), "-o", s(&out)])), 64);
}

#[test]
fn validate_reports_crossings() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.pvg.json", SCENE);
    let bad = write(dir.path(), "crossing_dcs.pvg.json", CROSSING);
    assert_eq!(code(&pvg(&["validate", s(&good)])), 0);
    let o = pvg(&["validate", s(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("dc-intersection"));
    // rendering it fails the same way
    let out = dir.path().join("x.png");
    assert_eq!(code(&pvg(&["render", s(&bad), "-o", s(&out)])), 1);
    assert!(!out.exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "scene.pvg.json", SCENE);
    let garbage = write(dir.path(), "garbage.pvg.json", "{ not json");
    assert_eq!(code(&pvg(&["validate", s(&garbage)])), 1);
    assert_eq!(code(&pvg(&["validate", s(&dir.path().join("missing.json"))])), 2);
    let unwritable = dir.path().join("no/such/dir/out.png");
    assert_eq!(code(&pvg(&["render", s(&doc), "-o", s(&unwritable)])), 2);
    assert_eq!(code(&pvg(&["render", s(&doc), "-o", "x.png", "--bogus"])), 64);
    assert_eq!(code(&pvg(&["render", s(&doc), "-o", "x.png", "-w", "0"])), 64);
    assert_eq!(code(&pvg(&["render", s(&doc), "-o", "x.png", "--threads", "0"])), 64);
    assert_eq!(code(&pvg(&["render", s(&doc), "-o", "x.png", "--viewport", "1,2,3"])), 64);
    assert_eq!(code(&pvg(&["frobnicate"])), 64);
    assert_eq!(code(&pvg(&["render", "--help"])), 0);
}

#[test]
fn compare_prints_a_small_error_table() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "scene.pvg.json", SCENE);
    let o = pvg(&["compare", s(&doc)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8_lossy(&o.stdout);
    let value = |row: &str| -> f64 {
        let line = out.lines().find(|l| l.starts_with(row)).unwrap();
        line.split_whitespace().last().unwrap().parse().unwrap()
    };
    for row in ["R", "G", "B", "max", "mean"] {
        assert!(value(row) < 0.5, "{out}");
    }
    assert!(value("max") >= value("mean"));
}

#[test]
fn errmap_matches_the_image_size() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "scene.pvg.json", SCENE);
    let out = dir.path().join("err.png");
    assert_eq!(code(&pvg(&["errmap", s(&doc), "-o", s(&out), "-w", "32", "-h", "32"])), 0);
    let img = image::open(&out).unwrap();
    assert_eq!((img.width(), img.height()), (32, 32));
}
