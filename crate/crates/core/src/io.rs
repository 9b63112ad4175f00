//! JSON dataset and spline files, and atomic file output.
//!
//! Point payloads follow the descriptor: Euclidean and sphere points are flat
//! arrays, SO(3) and SPD(3) points are 3x3 row arrays, and product and power
//! points are arrays of their component payloads.

use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bezier::{ControlGrid, SplineConfig};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point};
use crate::manifolds::{make_manifold, ManifoldDescriptor};
use crate::regression::{DataSet, FitResult, TimeMap};

/// Largest joint residual accepted when loading a spline file.
pub const C1_FILE_TOL: f64 = 1e-8;

fn invalid(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidData(format!("{path}: {msg}"))
}

fn payload_len(desc: &ManifoldDescriptor) -> usize {
    match desc {
        ManifoldDescriptor::Euclidean { n } => *n,
        ManifoldDescriptor::Sphere { n } => n + 1,
        ManifoldDescriptor::So3 | ManifoldDescriptor::Spd3 => 9,
        ManifoldDescriptor::Product { factors } => factors.iter().map(payload_len).sum(),
        ManifoldDescriptor::Power { base, count } => payload_len(base) * count,
    }
}

fn flat_json(x: &[f64]) -> Value {
    Value::Array(x.iter().map(|&v| json!(v)).collect())
}

fn payload_json(desc: &ManifoldDescriptor, x: &[f64]) -> Value {
    match desc {
        ManifoldDescriptor::Euclidean { .. } | ManifoldDescriptor::Sphere { .. } => flat_json(x),
        ManifoldDescriptor::So3 | ManifoldDescriptor::Spd3 => {
            Value::Array(x.chunks(3).map(flat_json).collect())
        }
        ManifoldDescriptor::Product { factors } => {
            let mut offset = 0;
            let parts = factors
                .iter()
                .map(|f| {
                    let len = payload_len(f);
                    let v = payload_json(f, &x[offset..offset + len]);
                    offset += len;
                    v
                })
                .collect();
            Value::Array(parts)
        }
        ManifoldDescriptor::Power { base, .. } => {
            let len = payload_len(base);
            Value::Array(x.chunks(len).map(|c| payload_json(base, c)).collect())
        }
    }
}

/// JSON payload of a point.
pub fn point_to_json(desc: &ManifoldDescriptor, p: &Point) -> Value {
    payload_json(desc, p.as_slice())
}

fn array<'a>(v: &'a Value, len: usize, path: &str) -> Result<&'a Vec<Value>> {
    let a = v
        .as_array()
        .ok_or_else(|| invalid(path, "expected an array"))?;
    if a.len() != len {
        return Err(invalid(
            path,
            format!("expected {len} entries, got {}", a.len()),
        ));
    }
    Ok(a)
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| invalid(path, "expected a number"))
}

fn read_payload(
    desc: &ManifoldDescriptor,
    v: &Value,
    path: &str,
    out: &mut Vec<f64>,
) -> Result<()> {
    match desc {
        ManifoldDescriptor::Euclidean { .. } | ManifoldDescriptor::Sphere { .. } => {
            for (i, x) in array(v, payload_len(desc), path)?.iter().enumerate() {
                out.push(number(x, &format!("{path}[{i}]"))?);
            }
        }
        ManifoldDescriptor::So3 | ManifoldDescriptor::Spd3 => {
            for (i, row) in array(v, 3, path)?.iter().enumerate() {
                let rp = format!("{path}[{i}]");
                for (j, x) in array(row, 3, &rp)?.iter().enumerate() {
                    out.push(number(x, &format!("{rp}[{j}]"))?);
                }
            }
        }
        ManifoldDescriptor::Product { factors } => {
            for (i, (f, x)) in factors
                .iter()
                .zip(array(v, factors.len(), path)?)
                .enumerate()
            {
                read_payload(f, x, &format!("{path}[{i}]"), out)?;
            }
        }
        ManifoldDescriptor::Power { base, count } => {
            for (i, x) in array(v, *count, path)?.iter().enumerate() {
                read_payload(base, x, &format!("{path}[{i}]"), out)?;
            }
        }
    }
    Ok(())
}

/// Parses a payload and checks manifold membership.
pub fn point_from_json(m: &Manifold, v: &Value, path: &str) -> Result<Point> {
    let mut out = Vec::with_capacity(m.point_len());
    read_payload(m.descriptor(), v, path, &mut out)?;
    let p = Point::new(out);
    m.check_point(&p).map_err(|e| invalid(path, e))?;
    Ok(p)
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| invalid(path, format!("missing field \"{key}\"")))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn parse_manifold(root: &Value) -> Result<(ManifoldDescriptor, Manifold)> {
    let v = field(root, "manifold", "$")?;
    let desc: ManifoldDescriptor =
        serde_json::from_value(v.clone()).map_err(|e| invalid("manifold", e))?;
    let m = make_manifold(&desc).map_err(|e| invalid("manifold", e))?;
    Ok((desc, m))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| invalid("$", e))
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Manifold-valued samples together with their manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub manifold: ManifoldDescriptor,
    pub data: DataSet,
}

impl DatasetFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let root = parse_json(text)?;
        let (desc, m) = parse_manifold(&root)?;
        let samples = field(&root, "samples", "$")?
            .as_array()
            .ok_or_else(|| invalid("samples", "expected an array"))?;
        let mut out = Vec::with_capacity(samples.len());
        for (i, s) in samples.iter().enumerate() {
            let path = format!("samples[{i}]");
            let t = number(field(s, "t", &path)?, &join(&path, "t"))?;
            let p = point_from_json(&m, field(s, "point", &path)?, &join(&path, "point"))?;
            out.push((t, p));
        }
        let data = DataSet::new(out).map_err(|e| invalid("samples", e))?;
        Ok(DatasetFile {
            manifold: desc,
            data,
        })
    }

    pub fn to_json_string(&self) -> String {
        let samples: Vec<Value> = self
            .data
            .iter()
            .map(|(t, p)| json!({ "t": t, "point": point_to_json(&self.manifold, p) }))
            .collect();
        to_pretty(&json!({ "manifold": self.manifold, "samples": samples }))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json_str(&read_text(path)?).map_err(|e| prefix(path, e))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json_string().as_bytes())
    }
}

/// Fit summary stored next to the control points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineStats {
    pub r_squared: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    pub time_map: TimeMap,
}

impl From<&FitResult> for SplineStats {
    fn from(r: &FitResult) -> Self {
        SplineStats {
            r_squared: r.r_squared,
            objective: r.objective,
            iterations: r.iterations,
            converged: r.converged,
            gradient_norm: r.gradient_norm,
            time_map: r.time_map,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineFile {
    pub manifold: ManifoldDescriptor,
    pub grid: ControlGrid,
    pub stats: Option<SplineStats>,
}

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    degrees: Vec<usize>,
    closed: bool,
}

impl SplineFile {
    /// Time map of the fit, or the identity when no stats are stored.
    pub fn time_map(&self) -> TimeMap {
        self.stats
            .as_ref()
            .map_or(TimeMap::IDENTITY, |s| s.time_map)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let root = parse_json(text)?;
        let (desc, m) = parse_manifold(&root)?;
        let cfg: ConfigJson = serde_json::from_value(field(&root, "config", "$")?.clone())
            .map_err(|e| invalid("config", e))?;
        let config =
            SplineConfig::new(cfg.degrees, cfg.closed).map_err(|e| invalid("config", e))?;
        let points = field(&root, "control_points", "$")?
            .as_array()
            .ok_or_else(|| invalid("control_points", "expected an array"))?
            .iter()
            .enumerate()
            .map(|(i, v)| point_from_json(&m, v, &format!("control_points[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let grid = ControlGrid::new(config, points).map_err(|e| invalid("control_points", e))?;
        let residuals = grid
            .c1_residuals(&m)
            .map_err(|e| invalid("control_points", e))?;
        if let Some((j, r)) = residuals
            .iter()
            .enumerate()
            .find(|(_, r)| !(**r <= C1_FILE_TOL))
        {
            return Err(invalid(
                "control_points",
                format!("joint {j} violates the C1 condition (residual {r:.3e})"),
            ));
        }
        let stats = match root.get("stats") {
            None | Some(Value::Null) => None,
            Some(v) => Some(serde_json::from_value(v.clone()).map_err(|e| invalid("stats", e))?),
        };
        Ok(SplineFile {
            manifold: desc,
            grid,
            stats,
        })
    }

    pub fn to_json_string(&self) -> String {
        let config = self.grid.config();
        let mut root = json!({
            "manifold": self.manifold,
            "config": ConfigJson { degrees: config.degrees().to_vec(), closed: config.is_closed() },
            "control_points": self
                .grid
                .points()
                .iter()
                .map(|p| point_to_json(&self.manifold, p))
                .collect::<Vec<_>>(),
        });
        if let Some(stats) = &self.stats {
            root["stats"] = serde_json::to_value(stats).expect("stats serialize");
        }
        to_pretty(&root)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json_str(&read_text(path)?).map_err(|e| prefix(path, e))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json_string().as_bytes())
    }
}

fn prefix(path: &Path, e: Error) -> Error {
    match e {
        Error::InvalidData(msg) => Error::InvalidData(format!("{}: {msg}", path.display())),
        other => other,
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_data() -> &'static str {
        r#"{"manifold": {"type": "sphere", "n": 2},
            "samples": [{"t": 0, "point": [1, 0, 0]}, {"t": 1, "point": [0, 1, 0]}]}"#
    }

    #[test]
    fn dataset_round_trip() {
        let f = DatasetFile::from_json_str(sphere_data()).unwrap();
        assert_eq!(f.data.len(), 2);
        let again = DatasetFile::from_json_str(&f.to_json_string()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn diagnostics_name_the_path() {
        let bad = r#"{"manifold": {"type": "sphere", "n": 2},
            "samples": [{"t": 0, "point": [1, 0, 0]}, {"t": 1, "point": [0, 1]}]}"#;
        let msg = DatasetFile::from_json_str(bad).unwrap_err().to_string();
        assert!(msg.contains("samples[1].point"), "{msg}");
        let off = r#"{"manifold": {"type": "sphere", "n": 2},
            "samples": [{"t": 0, "point": [1, 1, 0]}]}"#;
        let msg = DatasetFile::from_json_str(off).unwrap_err().to_string();
        assert!(msg.contains("samples[0].point"), "{msg}");
        let nan = r#"{"manifold": {"type": "so3"}, "samples": [{"t": 0, "point": [[1,0,0],[0,1,0],[0,0,"x"]]}]}"#;
        let msg = DatasetFile::from_json_str(nan).unwrap_err().to_string();
        assert!(msg.contains("samples[0].point[2][2]"), "{msg}");
        let desc = r#"{"manifold": {"type": "torus"}, "samples": []}"#;
        assert!(DatasetFile::from_json_str(desc)
            .unwrap_err()
            .to_string()
            .starts_with("invalid data set: manifold"));
    }

    #[test]
    fn nested_payloads_round_trip() {
        let desc = ManifoldDescriptor::Power {
            base: Box::new(ManifoldDescriptor::Product {
                factors: vec![
                    ManifoldDescriptor::So3,
                    ManifoldDescriptor::Spd3,
                    ManifoldDescriptor::Euclidean { n: 2 },
                ],
            }),
            count: 3,
        };
        let m = make_manifold(&desc).unwrap();
        let p = m.random_point(4);
        let v = point_to_json(&desc, &p);
        assert_eq!(v.as_array().unwrap().len(), 3);
        assert_eq!(v[0][1].as_array().unwrap().len(), 3);
        assert_eq!(point_from_json(&m, &v, "p").unwrap(), p);
    }

    #[test]
    fn spline_round_trip_and_c1_check() {
        let desc = ManifoldDescriptor::Sphere { n: 2 };
        let m = make_manifold(&desc).unwrap();
        let config = SplineConfig::open(vec![2, 2]).unwrap();
        let free = crate::bezier::FreeParams {
            points: (0..config.free_count())
                .map(|i| m.random_point(i as u64))
                .collect(),
        };
        let grid = crate::bezier::expand(&m, &config, &free).unwrap();
        let stats = SplineStats {
            r_squared: 0.75,
            objective: 0.1,
            iterations: 3,
            converged: true,
            gradient_norm: 1e-7,
            time_map: TimeMap {
                offset: 0.5,
                scale: 2.0,
            },
        };
        let file = SplineFile {
            manifold: desc,
            grid,
            stats: Some(stats),
        };
        let text = file.to_json_string();
        assert_eq!(SplineFile::from_json_str(&text).unwrap(), file);

        let mut v: Value = serde_json::from_str(&text).unwrap();
        v["control_points"][3] = json!([0.0, 0.0, 1.0]);
        let err = SplineFile::from_json_str(&v.to_string())
            .unwrap_err()
            .to_string();
        assert!(err.contains("C1"), "{err}");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
