use std::path::{Path, PathBuf};

use rbspline::bezier::spline_eval;
use rbspline::io::{point_to_json, read_text, write_atomic, DatasetFile, SplineFile, SplineStats};
use rbspline::regression::{
    fit, frechet_mean, r2_upper_bound, sample_model, total_variance, VARIANCE_FLOOR,
};
use rbspline::shape::{build_template, encode, procrustes_align, reconstruct, DiffCoords, TriMesh};
use rbspline::{
    make_manifold, DataSet, Error, ManifoldDescriptor, Result, SolverOptions, SplineConfig,
};
use serde_json::json;

use crate::{Command, EvalArgs, FitArgs, ShapeCommand, SolverArgs, StatsArgs, SynthArgs};

pub enum Outcome {
    Done,
    NotConverged,
}

/// Data times that land this close outside an open domain are clamped.
const DOMAIN_SLACK: f64 = 1e-9;

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Fit(args) => cmd_fit(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Shape(cmd) => cmd_shape(cmd),
    }
}

fn solver_setup(args: &SolverArgs) -> Result<(SplineConfig, SolverOptions)> {
    let config = SplineConfig::new(args.degrees.clone(), args.closed)?;
    let options = SolverOptions {
        max_iterations: args.max_iter,
        gradient_tolerance: args.tol,
        ..SolverOptions::default()
    };
    options.validate()?;
    Ok((config, options))
}

fn fit_and_write(
    manifold: ManifoldDescriptor,
    data: &DataSet,
    args: &SolverArgs,
    out: &Path,
) -> Result<Outcome> {
    let (config, options) = solver_setup(args)?;
    let m = make_manifold(&manifold)?;
    let result = fit(&m, &config, data, &options)?;
    let file = SplineFile {
        manifold,
        grid: result.grid.clone(),
        stats: Some(SplineStats::from(&result)),
    };
    file.write(out)?;
    Ok(if result.converged {
        Outcome::Done
    } else {
        Outcome::NotConverged
    })
}

fn cmd_fit(args: FitArgs) -> Result<Outcome> {
    let file = DatasetFile::read(&args.data)?;
    fit_and_write(file.manifold, &file.data, &args.solver, &args.out)
}

/// Spline parameter for a requested time.
fn parameter(spline: &SplineFile, t: f64, data_time: bool) -> f64 {
    if !data_time {
        return t;
    }
    let config = spline.grid.config();
    let s = spline.time_map().apply(t);
    let len = config.domain_len();
    if !config.is_closed() && (s < 0.0 && s > -DOMAIN_SLACK || s > len && s < len + DOMAIN_SLACK) {
        s.clamp(0.0, len)
    } else {
        s
    }
}

fn grid_times(len: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| len * i as f64 / (n - 1) as f64).collect(),
    }
}

fn cmd_eval(args: EvalArgs) -> Result<Outcome> {
    let spline = SplineFile::read(&args.spline)?;
    let m = make_manifold(&spline.manifold)?;
    let (times, data_time) = match (args.times.times, args.times.grid) {
        (Some(t), _) => (t, args.data_time),
        (None, Some(n)) => (grid_times(spline.grid.config().domain_len(), n), false),
        (None, None) => unreachable!("clap enforces one of --times and --grid"),
    };
    let samples = times
        .iter()
        .map(|&t| {
            let s = parameter(&spline, t, data_time);
            Ok((t, spline_eval(&m, &spline.grid, s)?.point))
        })
        .collect::<Result<Vec<_>>>()?;
    let out = DatasetFile {
        manifold: spline.manifold,
        data: DataSet::new(samples)?,
    };
    out.write(&args.out)?;
    Ok(Outcome::Done)
}

fn cmd_stats(args: StatsArgs) -> Result<Outcome> {
    let file = DatasetFile::read(&args.data)?;
    let m = make_manifold(&file.manifold)?;
    let points = file.data.points();
    let mean = frechet_mean(&m, points, None)?;
    let variance = total_variance(&m, points)?;
    if variance <= VARIANCE_FLOOR {
        return Err(Error::ZeroVariance);
    }
    let mut report = json!({
        "n": file.data.len(),
        "total_variance": variance,
        "frechet_mean": point_to_json(&file.manifold, &mean.point),
        "frechet_mean_converged": mean.converged,
    });
    if args.groups {
        report["r2_upper_bound"] = json!(r2_upper_bound(&m, &file.data)?);
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(Outcome::Done)
}

fn cmd_synth(args: SynthArgs) -> Result<Outcome> {
    let spline = SplineFile::read(&args.spline)?;
    let m = make_manifold(&spline.manifold)?;
    let samples = args
        .times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let s = parameter(&spline, t, args.data_time);
            let seed = args.seed.wrapping_add(j as u64);
            Ok((t, sample_model(&m, &spline.grid, s, args.sigma, seed)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let out = DatasetFile {
        manifold: spline.manifold,
        data: DataSet::new(samples)?,
    };
    out.write(&args.out)?;
    Ok(Outcome::Done)
}

fn read_mesh(path: &Path) -> Result<TriMesh> {
    TriMesh::from_obj_str(&read_text(path)?)
        .map_err(|e| Error::InvalidData(format!("{}: {e}", path.display())))
}

/// Reads meshes and checks them against the first one (or `reference`).
fn read_meshes(paths: &[PathBuf], reference: Option<&TriMesh>) -> Result<Vec<TriMesh>> {
    let meshes = paths
        .iter()
        .map(|p| read_mesh(p))
        .collect::<Result<Vec<_>>>()?;
    let base = reference.or(meshes.first());
    if let Some(base) = base {
        for (mesh, path) in meshes.iter().zip(paths) {
            base.check_correspondence(mesh)
                .map_err(|e| Error::InvalidData(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(meshes)
}

fn write_mesh(path: &Path, mesh: &TriMesh) -> Result<()> {
    write_atomic(path, mesh.to_obj_string().as_bytes())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })
}

fn encode_all(reference: &TriMesh, meshes: &[TriMesh], times: &[f64]) -> Result<DatasetFile> {
    if times.len() != meshes.len() {
        return Err(Error::InvalidData(format!(
            "{} times given for {} meshes",
            times.len(),
            meshes.len()
        )));
    }
    let samples = meshes
        .iter()
        .zip(times)
        .map(|(mesh, &t)| Ok((t, encode(mesh, reference)?.to_point())))
        .collect::<Result<Vec<_>>>()?;
    Ok(DatasetFile {
        manifold: ManifoldDescriptor::shape_space(reference.face_count()),
        data: DataSet::new(samples)?,
    })
}

fn cmd_shape(cmd: ShapeCommand) -> Result<Outcome> {
    match cmd {
        ShapeCommand::Align { out_dir, meshes } => {
            let input = read_meshes(&meshes, None)?;
            let aligned = procrustes_align(&input)?;
            ensure_dir(&out_dir)?;
            for (mesh, path) in aligned.iter().zip(&meshes) {
                let name = path.file_name().ok_or_else(|| {
                    Error::InvalidData(format!("{}: not a file path", path.display()))
                })?;
                write_mesh(&out_dir.join(name), mesh)?;
            }
            Ok(Outcome::Done)
        }
        ShapeCommand::Encode {
            reference,
            times,
            out,
            meshes,
        } => {
            let reference = read_mesh(&reference)?;
            let meshes = read_meshes(&meshes, Some(&reference))?;
            encode_all(&reference, &meshes, &times)?.write(&out)?;
            Ok(Outcome::Done)
        }
        ShapeCommand::Template { out, meshes } => {
            let meshes = read_meshes(&meshes, None)?;
            let (template, _) = build_template(&meshes)?;
            write_mesh(&out, &template)?;
            Ok(Outcome::Done)
        }
        ShapeCommand::Fit {
            reference,
            times,
            solver,
            out,
            meshes,
        } => {
            let reference = read_mesh(&reference)?;
            let meshes = read_meshes(&meshes, Some(&reference))?;
            let file = encode_all(&reference, &meshes, &times)?;
            fit_and_write(file.manifold, &file.data, &solver, &out)
        }
        ShapeCommand::Reconstruct {
            spline,
            reference,
            times,
            anchor,
            data_time,
            out_dir,
        } => {
            let spline = SplineFile::read(&spline)?;
            let reference = read_mesh(&reference)?;
            let expected = ManifoldDescriptor::shape_space(reference.face_count());
            if spline.manifold != expected {
                return Err(Error::InvalidData(format!(
                    "spline manifold does not match the shape space of a {}-face reference",
                    reference.face_count()
                )));
            }
            let m = make_manifold(&spline.manifold)?;
            ensure_dir(&out_dir)?;
            for (i, &t) in times.iter().enumerate() {
                let s = parameter(&spline, t, data_time);
                let point = spline_eval(&m, &spline.grid, s)?.point;
                let mesh = reconstruct(&DiffCoords::from_point(&point)?, &reference, anchor)?;
                write_mesh(&out_dir.join(format!("shape_{i:03}.obj")), &mesh)?;
            }
            Ok(Outcome::Done)
        }
    }
}
