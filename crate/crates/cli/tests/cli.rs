use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbspline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

struct Work(TempDir);

impl Work {
    fn new() -> Self {
        Work(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn write_json(&self, name: &str, v: &Value) -> String {
        fs::write(self.path(name), serde_json::to_string_pretty(v).unwrap()).unwrap();
        self.arg(name)
    }

    fn read_json(&self, name: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.path(name)).unwrap()).unwrap()
    }
}

fn sphere_point(lat: f64, lon: f64) -> Vec<f64> {
    vec![lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
}

/// Samples along the great circle of latitude zero.
fn geodesic_data() -> Value {
    let samples: Vec<Value> = (0..11)
        .map(|i| {
            let t = i as f64 / 10.0;
            json!({ "t": t, "point": sphere_point(0.0, 1.4 * t) })
        })
        .collect();
    json!({ "manifold": { "type": "sphere", "n": 2 }, "samples": samples })
}

/// Eight samples of a periodic loop at parameters k/4.
fn periodic_data() -> Value {
    let samples: Vec<Value> = (0..8)
        .map(|k| {
            let t = k as f64 / 4.0;
            json!({ "t": t, "point": sphere_point(0.3 * (PI * t).sin(), 0.5 * (PI * t).cos()) })
        })
        .collect();
    json!({ "manifold": { "type": "sphere", "n": 2 }, "samples": samples })
}

fn points(v: &Value) -> Vec<Value> {
    v["samples"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["point"].clone())
        .collect()
}

fn floats(v: &Value) -> Vec<f64> {
    match v {
        Value::Number(n) => vec![n.as_f64().unwrap()],
        Value::Array(a) => a.iter().flat_map(floats).collect(),
        _ => panic!("not numeric: {v}"),
    }
}

fn sphere_dist(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let c: Vec<f64> = vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    c.iter().map(|x| x * x).sum::<f64>().sqrt().atan2(d)
}

#[test]
fn fit_geodesic_data() {
    let w = Work::new();
    let data = w.write_json("data.json", &geodesic_data());
    let out = run(&[
        "fit",
        "--data",
        &data,
        "--degrees",
        "1",
        "--out",
        &w.arg("fit.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let spline = w.read_json("fit.json");
    assert!(spline["stats"]["r_squared"].as_f64().unwrap() >= 1.0 - 1e-8);
    assert_eq!(spline["config"], json!({ "degrees": [1], "closed": false }));
}

#[test]
fn fit_closed_periodic_data() {
    let w = Work::new();
    let data = w.write_json("data.json", &periodic_data());
    let out = run(&[
        "fit",
        "--data",
        &data,
        "--degrees",
        "3,3",
        "--closed",
        "--max-iter",
        "2000",
        "--out",
        &w.arg("fit.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let spline = w.read_json("fit.json");
    assert_eq!(spline["config"]["closed"], json!(true));
    assert_eq!(spline["control_points"].as_array().unwrap().len(), 6);

    let out = run(&[
        "eval",
        "--spline",
        &w.arg("fit.json"),
        "--times",
        "0.3,2.3,-1.7",
        "--out",
        &w.arg("eval.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let p = points(&w.read_json("eval.json"));
    let (a, b, c) = (floats(&p[0]), floats(&p[1]), floats(&p[2]));
    assert!(sphere_dist(&a, &b) <= 1e-12 && sphere_dist(&a, &c) <= 1e-12);
}

#[test]
fn non_convergence_still_writes_output() {
    let w = Work::new();
    let data = w.write_json("data.json", &periodic_data());
    let out = run(&[
        "fit",
        "--data",
        &data,
        "--degrees",
        "3,3",
        "--closed",
        "--max-iter",
        "1",
        "--tol",
        "1e-14",
        "--out",
        &w.arg("fit.json"),
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(w.read_json("fit.json")["stats"]["converged"], json!(false));
}

#[test]
fn input_errors_exit_one() {
    let w = Work::new();
    let out = run(&[
        "fit",
        "--data",
        &w.arg("missing.json"),
        "--degrees",
        "1",
        "--out",
        &w.arg("fit.json"),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("missing.json"));
    assert!(!w.path("fit.json").exists());

    let mut bad = geodesic_data();
    bad["samples"][3]["point"] = json!([1.0, 1.0, 0.0]);
    let data = w.write_json("bad.json", &bad);
    let out = run(&[
        "fit",
        "--data",
        &data,
        "--degrees",
        "1",
        "--out",
        &w.arg("fit.json"),
    ]);
    assert_eq!(code(&out), 1);
    assert!(
        stderr(&out).contains("samples[3].point"),
        "{}",
        stderr(&out)
    );

    fs::write(w.path("broken.json"), "{ \"manifold\": ").unwrap();
    let out = run(&["stats", "--data", &w.arg("broken.json")]);
    assert_eq!(code(&out), 1);
}

#[test]
fn eval_examples() {
    let w = Work::new();
    let data = w.write_json("data.json", &geodesic_data());
    assert_eq!(
        code(&run(&[
            "fit",
            "--data",
            &data,
            "--degrees",
            "2,3",
            "--out",
            &w.arg("fit.json")
        ])),
        0
    );
    let spline = w.read_json("fit.json");

    let out = run(&[
        "eval",
        "--spline",
        &w.arg("fit.json"),
        "--times",
        "0",
        "--out",
        &w.arg("e0.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        points(&w.read_json("e0.json"))[0],
        spline["control_points"][0]
    );

    let out = run(&[
        "eval",
        "--spline",
        &w.arg("fit.json"),
        "--grid",
        "101",
        "--out",
        &w.arg("grid.json"),
    ]);
    assert_eq!(code(&out), 0);
    let grid = w.read_json("grid.json");
    let ts: Vec<f64> = grid["samples"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["t"].as_f64().unwrap())
        .collect();
    assert_eq!(ts.len(), 101);
    assert_eq!((ts[0], ts[100]), (0.0, 2.0));
    assert!(ts.windows(2).all(|p| (p[1] - p[0] - 0.02).abs() < 1e-12));

    let out = run(&[
        "eval",
        "--spline",
        &w.arg("fit.json"),
        "--times",
        "2.5",
        "--out",
        &w.arg("bad.json"),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn fit_then_eval_reproduces_the_objective() {
    let w = Work::new();
    let mut raw = geodesic_data();
    for (i, s) in raw["samples"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .enumerate()
    {
        let t = s["t"].as_f64().unwrap();
        s["point"] = json!(sphere_point(
            0.1 * ((i * 7 % 5) as f64 - 2.0) / 2.0,
            1.4 * t
        ));
    }
    let data = w.write_json("data.json", &raw);
    assert_eq!(
        code(&run(&[
            "fit",
            "--data",
            &data,
            "--degrees",
            "3",
            "--out",
            &w.arg("fit.json")
        ])),
        0
    );
    let times: Vec<String> = raw["samples"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["t"].to_string())
        .collect();
    let out = run(&[
        "eval",
        "--spline",
        &w.arg("fit.json"),
        "--times",
        &times.join(","),
        "--data-time",
        "--out",
        &w.arg("eval.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let fitted = points(&w.read_json("eval.json"));
    let e: f64 = fitted
        .iter()
        .zip(points(&raw))
        .map(|(b, q)| 0.5 * sphere_dist(&floats(b), &floats(&q)).powi(2))
        .sum();
    let stored = w.read_json("fit.json")["stats"]["objective"]
        .as_f64()
        .unwrap();
    assert!((e - stored).abs() <= 1e-10, "{e} vs {stored}");
}

#[test]
fn stats_examples() {
    let w = Work::new();
    let pair = json!({
        "manifold": { "type": "sphere", "n": 2 },
        "samples": [{ "t": 0, "point": [1, 0, 0] }, { "t": 1, "point": [0, 1, 0] }]
    });
    let out = run(&["stats", "--data", &w.write_json("pair.json", &pair)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["n"], json!(2));
    assert!((report["total_variance"].as_f64().unwrap() - (PI / 4.0).powi(2)).abs() < 1e-12);
    let mean = floats(&report["frechet_mean"]);
    assert!(sphere_dist(&mean, &[0.5f64.sqrt(), 0.5f64.sqrt(), 0.0]) < 1e-12);

    let grouped = json!({
        "manifold": { "type": "euclidean", "n": 1 },
        "samples": [
            { "t": 0, "point": [-1] }, { "t": 0, "point": [1] },
            { "t": 1, "point": [9] }, { "t": 1, "point": [11] }
        ]
    });
    let out = run(&[
        "stats",
        "--data",
        &w.write_json("grouped.json", &grouped),
        "--groups",
    ]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["r2_upper_bound"].as_f64().unwrap(), 1.0 - 1.0 / 26.0);

    let same = json!({
        "manifold": { "type": "euclidean", "n": 2 },
        "samples": [{ "t": 0, "point": [1, 2] }, { "t": 1, "point": [1, 2] }, { "t": 2, "point": [1, 2] }]
    });
    assert_eq!(
        code(&run(&[
            "stats",
            "--data",
            &w.write_json("same.json", &same)
        ])),
        3
    );
}

#[test]
fn synth_examples() {
    let w = Work::new();
    let data = w.write_json("data.json", &periodic_data());
    assert_eq!(
        code(&run(&[
            "fit",
            "--data",
            &data,
            "--degrees",
            "3,3",
            "--closed",
            "--max-iter",
            "2000",
            "--out",
            &w.arg("fit.json")
        ])),
        0
    );
    let spline = w.arg("fit.json");
    let times = "0,0.25,0.5,1,1.75";
    assert_eq!(
        code(&run(&[
            "eval",
            "--spline",
            &spline,
            "--times",
            times,
            "--out",
            &w.arg("eval.json")
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "synth",
            "--spline",
            &spline,
            "--times",
            times,
            "--sigma",
            "0",
            "--out",
            &w.arg("s0.json")
        ])),
        0
    );
    assert_eq!(
        fs::read(w.path("eval.json")).unwrap(),
        fs::read(w.path("s0.json")).unwrap()
    );

    for name in ["a.json", "b.json"] {
        assert_eq!(
            code(&run(&[
                "synth",
                "--spline",
                &spline,
                "--times",
                times,
                "--sigma",
                "0.1",
                "--seed",
                "9",
                "--out",
                &w.arg(name)
            ])),
            0
        );
    }
    assert_eq!(
        fs::read(w.path("a.json")).unwrap(),
        fs::read(w.path("b.json")).unwrap()
    );
    assert_ne!(
        fs::read(w.path("a.json")).unwrap(),
        fs::read(w.path("s0.json")).unwrap()
    );

    // Refitting noise-free draws recovers the generating spline.
    let dense: Vec<String> = (0..16).map(|k| (k as f64 / 8.0).to_string()).collect();
    assert_eq!(
        code(&run(&[
            "synth",
            "--spline",
            &spline,
            "--times",
            &dense.join(","),
            "--out",
            &w.arg("dense.json")
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "fit",
            "--data",
            &w.arg("dense.json"),
            "--degrees",
            "3,3",
            "--closed",
            "--tol",
            "1e-9",
            "--max-iter",
            "5000",
            "--out",
            &w.arg("refit.json")
        ])),
        0
    );
    assert!(
        w.read_json("refit.json")["stats"]["objective"]
            .as_f64()
            .unwrap()
            < 1e-12
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    let w = Work::new();
    let data = w.write_json("data.json", &periodic_data());
    for name in ["one.json", "two.json"] {
        assert_eq!(
            code(&run(&[
                "fit",
                "--data",
                &data,
                "--degrees",
                "3,3",
                "--closed",
                "--seed",
                "4",
                "--out",
                &w.arg(name)
            ])),
            0
        );
    }
    assert_eq!(
        fs::read(w.path("one.json")).unwrap(),
        fs::read(w.path("two.json")).unwrap()
    );
}

fn grid_obj(nx: usize, ny: usize, t: f64, swap: bool) -> String {
    let phase = PI * t;
    let mut s = String::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let (x, y) = (i as f64, j as f64);
            let z = 0.3 * (0.9 * x).sin() * (0.6 * y).cos();
            let (x, y, z) = (
                x * (1.0 + 0.25 * phase.sin()),
                y * (1.0 + 0.15 * phase.cos()) + 0.1 * x * phase.sin(),
                z * (1.0 + 0.3 * (phase + 0.5).sin()),
            );
            s.push_str(&format!("v {x} {y} {z}\n"));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i + 1;
    let mut faces = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    if swap {
        faces.swap(1, 2);
    }
    for f in faces {
        s.push_str(&format!("f {} {} {}\n", f[0], f[1], f[2]));
    }
    s
}

fn write_obj(w: &Work, name: &str, text: &str) -> String {
    fs::write(w.path(name), text).unwrap();
    w.arg(name)
}

#[test]
fn shape_encode_against_itself_is_identity() {
    let w = Work::new();
    let mesh = write_obj(&w, "ref.obj", &grid_obj(2, 2, 0.0, false));
    let out = run(&[
        "shape",
        "encode",
        "--ref",
        &mesh,
        "--times",
        "0,1",
        "--out",
        &w.arg("enc.json"),
        &mesh,
        &mesh,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let enc = w.read_json("enc.json");
    assert_eq!(enc["manifold"]["type"], json!("power"));
    assert_eq!(enc["manifold"]["count"], json!(8));
    let identity = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    for p in points(&enc) {
        let v = floats(&p);
        assert_eq!(v.len(), 8 * 18);
        for chunk in v.chunks(9) {
            for (a, b) in chunk.iter().zip(identity) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn shape_template_of_duplicates_is_the_input() {
    let w = Work::new();
    let mesh = write_obj(&w, "m.obj", &grid_obj(3, 2, 0.4, false));
    let out = run(&[
        "shape",
        "template",
        "--out",
        &w.arg("t.obj"),
        &mesh,
        &mesh,
        &mesh,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let parse = |p: &Path| -> Vec<f64> {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| l.starts_with("v "))
            .flat_map(|l| {
                l[2..]
                    .split_whitespace()
                    .map(|x| x.parse::<f64>().unwrap())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let (a, b) = (parse(&w.path("m.obj")), parse(&w.path("t.obj")));
    assert_eq!(a.len(), b.len());
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-5));
}

#[test]
fn shape_align_writes_one_mesh_per_input() {
    let w = Work::new();
    let a = write_obj(&w, "a.obj", &grid_obj(2, 2, 0.0, false));
    let b = write_obj(&w, "b.obj", &grid_obj(2, 2, 0.5, false));
    let out = run(&["shape", "align", "--out-dir", &w.arg("aligned"), &a, &b]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(w.path("aligned/a.obj").exists() && w.path("aligned/b.obj").exists());
}

#[test]
fn shape_correspondence_error_names_the_face() {
    let w = Work::new();
    let mesh = write_obj(&w, "ref.obj", &grid_obj(2, 2, 0.0, false));
    let other = write_obj(&w, "other.obj", &grid_obj(2, 2, 0.0, true));
    let out = run(&[
        "shape",
        "encode",
        "--ref",
        &mesh,
        "--times",
        "0",
        "--out",
        &w.arg("enc.json"),
        &other,
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("face 1"), "{}", stderr(&out));
    assert!(stderr(&out).contains("other.obj"));
}

#[test]
fn shape_periodic_fit_closes() {
    let w = Work::new();
    let reference = write_obj(&w, "ref.obj", &grid_obj(3, 2, 0.0, false));
    let mut meshes = Vec::new();
    let mut times = Vec::new();
    for k in 0..8 {
        let t = k as f64 / 4.0;
        meshes.push(write_obj(
            &w,
            &format!("m{k}.obj"),
            &grid_obj(3, 2, t, false),
        ));
        times.push(t.to_string());
    }
    let times = times.join(",");
    let mut args = vec![
        "shape",
        "fit",
        "--ref",
        &reference,
        "--times",
        &times,
        "--degrees",
        "3,3",
        "--closed",
        "--max-iter",
        "200",
        "--out",
    ];
    let out_path = w.arg("shape.json");
    args.push(&out_path);
    args.extend(meshes.iter().map(String::as_str));
    let out = run(&args);
    assert!(matches!(code(&out), 0 | 2), "{}", stderr(&out));

    let out = run(&[
        "shape",
        "reconstruct",
        "--spline",
        &out_path,
        "--ref",
        &reference,
        "--times",
        "0,2,0.5",
        "--out-dir",
        &w.arg("rec"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let first = fs::read(w.path("rec/shape_000.obj")).unwrap();
    assert_eq!(first, fs::read(w.path("rec/shape_001.obj")).unwrap());
    assert_ne!(first, fs::read(w.path("rec/shape_002.obj")).unwrap());
}
