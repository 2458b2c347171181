use clap::Args;
use nalgebra::Vector3;
use rayon::prelude::*;
use serde_json::json;
use std::path::{Path, PathBuf};

use crate::config::Settings;
use crate::{CliError, Command, Outcome};
use survscan::change::{self, export_heatmap, legend_path, ramps, summarize, vertical_distance};
use survscan::cloud::{mean_nn_spacing, read_cloud, write_cloud, CloudFormat};
use survscan::preprocess::{
    self, classify_ground, crop, deduplicate, estimate_rigid, georeference, icp_refine, read_pairs,
    remove_outliers, IcpParams, Region,
};
use survscan::raster::{
    self, aggregators, fill_holes, rasterize_dsm, read_asc, volume_area, write_asc, BaseHeight,
    RasterGrid,
};
use survscan::targets::{
    self, accuracy_report_json, distance_stats, distance_stats_from_table, extract_target,
    read_distances, read_observations, TargetObservation, Verdict,
};
use survscan::tin::{delaunay, export_obj};
use survscan::cloud::apply_transform;
use survscan::{Classification, PointCloud};

pub fn dispatch(cmd: &Command, s: &Settings) -> Result<Outcome, CliError> {
    let mut out = match cmd {
        Command::Filter(a) => filter(a, s),
        Command::Classify(a) => classify(a, s),
        Command::Crop(a) => crop_cmd(a, s),
        Command::Register(a) => register(a, s),
        Command::Georef(a) => georef(a, s),
        Command::Dsm(a) => dsm(a, s),
        Command::Volume(a) => volume(a, s),
        Command::Diff(a) => diff(a, s),
        Command::Tin(a) => tin(a, s),
        Command::Accuracy(a) => accuracy(a, s),
        Command::Spacing(a) => spacing(a, s),
    }?;
    out.config = s.finish()?;
    Ok(out)
}

fn load(path: &Path) -> Result<PointCloud, CliError> {
    Ok(read_cloud(path, CloudFormat::from_path(path))?)
}

fn save(cloud: &PointCloud, path: &Path) -> Result<(), CliError> {
    Ok(write_cloud(cloud, path, CloudFormat::from_path(path))?)
}

fn write_json(value: &serde_json::Value, path: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json values always encode");
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn list_f64(raw: &str, what: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("{what}: '{t}' is not a finite number")))
        })
        .collect()
}

#[derive(Args, Debug)]
pub struct FilterArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Deduplication cell edge, metres.
    #[arg(long)]
    pub dedup_tolerance: Option<f64>,
    /// Neighbours per point for the outlier statistic.
    #[arg(long)]
    pub k: Option<usize>,
    /// Standard deviations above the mean counted as outlier.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Also write the removed outliers here.
    #[arg(long)]
    pub removed: Option<PathBuf>,
}

fn filter(a: &FilterArgs, s: &Settings) -> Result<Outcome, CliError> {
    let tol = s.get("dedup-tolerance", a.dedup_tolerance, preprocess::DEFAULT_DEDUP_TOLERANCE)?;
    let k = s.get("k", a.k, preprocess::DEFAULT_OUTLIER_K)?;
    let alpha = s.get("alpha", a.alpha, preprocess::DEFAULT_OUTLIER_ALPHA)?;
    let cloud = load(&a.input)?;
    let (unique, dups) = deduplicate(&cloud, tol)?;
    let split = remove_outliers(&unique, k, alpha)?;
    save(&split.kept, &a.output)?;
    let mut outputs = vec![a.output.clone()];
    if let Some(r) = &a.removed {
        save(&split.removed, r)?;
        outputs.push(r.clone());
    }
    println!(
        "input={} duplicates_removed={dups} outliers_removed={} kept={} threshold_m={:.6}",
        cloud.len(),
        split.removed.len(),
        split.kept.len(),
        split.threshold
    );
    Ok(Outcome {
        inputs: vec![a.input.clone()],
        outputs,
        ..Outcome::default()
    })
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Cell edge for the local minimum, metres.
    #[arg(long, allow_negative_numbers = true)]
    pub cell: Option<f64>,
    /// Height band above the cell minimum labelled ground, metres.
    #[arg(long)]
    pub height: Option<f64>,
}

fn classify(a: &ClassifyArgs, s: &Settings) -> Result<Outcome, CliError> {
    let cell = s.get("cell", a.cell, preprocess::DEFAULT_GROUND_CELL)?;
    let height = s.get("height", a.height, preprocess::DEFAULT_GROUND_HEIGHT)?;
    let out = classify_ground(&load(&a.input)?, cell, height)?;
    save(&out, &a.output)?;
    let ground = out.points.iter().filter(|p| p.class == Classification::Ground).count();
    println!("ground={ground} non_ground={}", out.len() - ground);
    Ok(Outcome {
        inputs: vec![a.input.clone()],
        outputs: vec![a.output.clone()],
        ..Outcome::default()
    })
}

#[derive(Args, Debug)]
pub struct CropArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// `minx,miny,maxx,maxy` or `minx,miny,minz,maxx,maxy,maxz`.
    #[arg(long = "box", conflicts_with = "polygon", allow_hyphen_values = true)]
    pub bbox: Option<String>,
    /// File of `x y` polygon vertices, one per line.
    #[arg(long)]
    pub polygon: Option<PathBuf>,
}

fn read_polygon(path: &Path) -> Result<Vec<[f64; 2]>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut v = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let xy: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Data(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if xy.len() != 2 {
            return Err(CliError::Data(format!(
                "{}:{}: expected 'x y', found {} values",
                path.display(),
                i + 1,
                xy.len()
            )));
        }
        v.push([xy[0], xy[1]]);
    }
    Ok(v)
}

fn crop_cmd(a: &CropArgs, s: &Settings) -> Result<Outcome, CliError> {
    let bbox = s.opt("box", a.bbox.clone())?;
    let mut inputs = vec![a.input.clone()];
    let region = match (&bbox, &a.polygon) {
        (Some(b), None) => {
            let v = list_f64(b, "--box")?;
            let (min, max) = match v.len() {
                4 => (
                    Vector3::new(v[0], v[1], f64::NEG_INFINITY),
                    Vector3::new(v[2], v[3], f64::INFINITY),
                ),
                6 => (Vector3::new(v[0], v[1], v[2]), Vector3::new(v[3], v[4], v[5])),
                n => return Err(CliError::Usage(format!("--box needs 4 or 6 values, got {n}"))),
            };
            Region::Box { min, max }
        }
        (None, Some(p)) => {
            inputs.push(p.clone());
            Region::Polygon(read_polygon(p)?)
        }
        _ => return Err(CliError::Usage("crop needs exactly one of --box or --polygon".into())),
    };
    let out = crop(&load(&a.input)?, &region)?;
    save(&out, &a.output)?;
    println!("kept={}", out.len());
    Ok(Outcome {
        inputs,
        outputs: vec![a.output.clone()],
        ..Outcome::default()
    })
}

#[derive(Args, Debug)]
pub struct RegisterArgs {
    /// Correspondences, lines `id sx sy sz dx dy dz`.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Cloud to move into the destination frame.
    #[arg(long)]
    pub source: Option<PathBuf>,
    /// Transformed source cloud.
    #[arg(short, long, requires = "source")]
    pub output: Option<PathBuf>,
    /// Registration report (transform and residuals) as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Refine with ICP against --target.
    #[arg(long, requires_all = ["source", "target"])]
    pub icp: bool,
    /// Destination cloud for ICP.
    #[arg(long)]
    pub target: Option<PathBuf>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// ICP stops when an iteration improves the RMS by less than this, metres.
    #[arg(long)]
    pub convergence: Option<f64>,
    /// Correspondence cut-off, metres (default: 5 × target spacing).
    #[arg(long)]
    pub max_distance: Option<f64>,
}

fn register(a: &RegisterArgs, s: &Settings) -> Result<Outcome, CliError> {
    let mut inputs = vec![a.pairs.clone()];
    let pairs = read_pairs(&a.pairs)?;
    let reg = estimate_rigid(&pairs)?;
    println!("pairs={} rms_residual_m={:.6}", pairs.len(), reg.rms_residual);
    let mut report = json!({
        "pairs": pairs.len(),
        "transform": reg.transform,
        "rms_residual_m": reg.rms_residual,
        "per_pair_residuals_m": reg.per_pair_residuals.iter().map(|r| json!({"id": r.id, "residual_m": r.residual})).collect::<Vec<_>>(),
    });
    let source = a.source.as_ref().map(|p| load(p)).transpose()?;
    if let Some(p) = &a.source {
        inputs.push(p.clone());
    }
    let mut transform = reg.transform.clone();
    let mut frame = None;
    let icp_defaults = IcpParams::default();
    let max_iterations = s.get("max-iterations", a.max_iterations, icp_defaults.max_iterations)?;
    let convergence = s.get("convergence", a.convergence, icp_defaults.convergence_tolerance)?;
    let max_distance = s.opt("max-distance", a.max_distance)?;
    if a.icp {
        let tpath = a.target.as_ref().expect("clap enforces --target with --icp");
        inputs.push(tpath.clone());
        let target = load(tpath)?;
        let mut params = match max_distance {
            Some(d) => IcpParams {
                max_correspondence_distance: Some(d),
                ..IcpParams::default()
            },
            None => IcpParams::for_destination(&target)?,
        };
        params.max_iterations = max_iterations;
        params.convergence_tolerance = convergence;
        let src = source.as_ref().expect("clap enforces --source with --icp");
        let refined = icp_refine(src, &target, &reg.transform, &params)?;
        println!(
            "icp_iterations={} icp_rms_m={:.6} converged={}",
            refined.iterations, refined.rms_residual, refined.converged
        );
        report["icp"] = json!({
            "transform": refined.transform,
            "rms_m": refined.rms_residual,
            "iterations": refined.iterations,
            "converged": refined.converged,
            "rms_history_m": refined.rms_history,
            "max_correspondence_distance_m": params.max_correspondence_distance,
        });
        transform = refined.transform;
        frame = Some(target.frame.clone());
    }
    let mut outputs = Vec::new();
    if let (Some(src), Some(o)) = (&source, &a.output) {
        save(&apply_transform(src, &transform, frame), o)?;
        outputs.push(o.clone());
    }
    if let Some(r) = &a.report {
        write_json(&report, r)?;
        outputs.push(r.clone());
    }
    Ok(Outcome {
        inputs,
        outputs,
        ..Outcome::default()
    })
}

#[derive(Args, Debug)]
pub struct GeorefArgs {
    pub input: PathBuf,
    /// Control points, lines `id sx sy sz dx dy dz`.
    #[arg(long)]
    pub control: PathBuf,
    /// Name of the destination reference system.
    #[arg(long)]
    pub crs: Option<String>,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn georef(a: &GeorefArgs, s: &Settings) -> Result<Outcome, CliError> {
    let crs = s
        .opt("crs", a.crs.clone())?
        .ok_or_else(|| CliError::Usage("georef needs --crs (or crs in the config)".into()))?;
    let control = read_pairs(&a.control)?;
    let (out, reg) = georeference(&load(&a.input)?, &control, &crs)?;
    save(&out, &a.output)?;
    println!("control_points={} rms_residual_m={:.6}", control.len(), reg.rms_residual);
    Ok(Outcome {
        inputs: vec![a.input.clone(), a.control.clone()],
        outputs: vec![a.output.clone()],
        ..Outcome::default()
    })
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Cell edge, metres.
    #[arg(long, allow_negative_numbers = true)]
    pub cell: Option<f64>,
    /// Cell reducer: mean, max or min.
    #[arg(long)]
    pub aggregator: Option<String>,
    /// Square rings searched when filling empty cells.
    #[arg(long)]
    pub max_ring: Option<usize>,
    /// Leave empty cells as nodata.
    #[arg(long)]
    pub no_fill: bool,
}

fn build_dsm(cloud: &PointCloud, g: &GridArgs, s: &Settings) -> Result<RasterGrid, CliError> {
    let cell = s.get("cell", g.cell, raster::DEFAULT_CELL)?;
    let agg_name = s.get("aggregator", g.aggregator.clone(), raster::DEFAULT_AGGREGATOR.to_string())?;
    let max_ring = s.get("max-ring", g.max_ring, raster::DEFAULT_MAX_RING)?;
    let no_fill = s.get("no-fill", g.no_fill.then_some(true), false)?;
    let registry = aggregators();
    let grid = rasterize_dsm(cloud, cell, registry.get(&agg_name)?)?;
    if no_fill {
        Ok(grid)
    } else {
        Ok(fill_holes(&grid, max_ring)?.0)
    }
}

#[derive(Args, Debug)]
pub struct DsmArgs {
    pub input: PathBuf,
    /// ESRI ASCII grid.
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

fn dsm(a: &DsmArgs, s: &Settings) -> Result<Outcome, CliError> {
    let grid = build_dsm(&load(&a.input)?, &a.grid, s)?;
    write_asc(&grid, &a.output)?;
    println!(
        "ncols={} nrows={} measured_cells={} interpolated_cells={} nodata_cells={}",
        grid.ncols(),
        grid.nrows(),
        grid.filled_count() - grid.interpolated_count(),
        grid.interpolated_count(),
        grid.nodata_count()
    );
    Ok(Outcome {
        inputs: vec![a.input.clone()],
        outputs: vec![a.output.clone()],
        ..Outcome::default()
    })
}

#[derive(Args, Debug)]
pub struct VolumeArgs {
    /// Point cloud, or an `.asc` DSM used as is.
    pub input: PathBuf,
    /// `lowest` or a base height in metres.
    #[arg(long, allow_negative_numbers = true)]
    pub base: Option<String>,
    /// Write the full result as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
}

fn volume(a: &VolumeArgs, s: &Settings) -> Result<Outcome, CliError> {
    let base_raw = s.get("base", a.base.clone(), "lowest".to_string())?;
    let base: BaseHeight = base_raw.parse().map_err(|e: survscan::Error| CliError::Usage(e.to_string()))?;
    let is_asc = a
        .input
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("asc"));
    let grid = if is_asc {
        read_asc(&a.input)?
    } else {
        build_dsm(&load(&a.input)?, &a.grid, s)?
    };
    let v = volume_area(&grid, base)?;
    println!("volume_m3={:.3} area_m2={:.3}", v.volume, v.area);
    let mut outputs = Vec::new();
    if let Some(r) = &a.report {
        write_json(
            &json!({
                "volume_m3": v.volume,
                "area_m2": v.area,
                "base_height_m": v.base_height,
                "cell_m": grid.cell(),
                "filled_cells": v.filled_cells,
                "interpolated_cells": v.interpolated_cells,
            }),
            r,
        )?;
        outputs.push(r.clone());
    }
    Ok(Outcome {
        inputs: vec![a.input.clone()],
        outputs,
        ..Outcome::default()
    })
}

#[derive(Args, Debug)]
pub struct DiffArgs {
    pub epoch_a: PathBuf,
    pub epoch_b: PathBuf,
    /// Cell edge, metres.
    #[arg(long, allow_negative_numbers = true)]
    pub cell: Option<f64>,
    /// |Δz| counted as unchanged, metres.
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    /// Comma-separated increasing band edges, metres.
    #[arg(long, allow_hyphen_values = true)]
    pub bands: Option<String>,
    /// Heatmap half-range, metres.
    #[arg(long, allow_negative_numbers = true)]
    pub range: Option<f64>,
    /// Colour ramp name.
    #[arg(long)]
    pub ramp: Option<String>,
    /// PPM heatmap (a `.legend.txt` sidecar is written beside it).
    #[arg(long)]
    pub heatmap: Option<PathBuf>,
    /// Summary JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Δz grid as ESRI ASCII.
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

pub const DEFAULT_CHANGE_TOLERANCE: f64 = 0.005;
pub const DEFAULT_BANDS: &str = "-0.02,-0.01,-0.005,0.005,0.01,0.02";

fn diff(a: &DiffArgs, s: &Settings) -> Result<Outcome, CliError> {
    let cell = s.get("cell", a.cell, change::DEFAULT_CELL)?;
    let tol = s.get("tolerance", a.tolerance, DEFAULT_CHANGE_TOLERANCE)?;
    let bands = list_f64(&s.get("bands", a.bands.clone(), DEFAULT_BANDS.to_string())?, "--bands")?;
    let range = s.get("range", a.range, change::DEFAULT_RANGE)?;
    let ramp_name = s.get("ramp", a.ramp.clone(), change::DEFAULT_RAMP.to_string())?;
    let registry = ramps();
    let ramp = registry.get(&ramp_name)?;
    let map = vertical_distance(&load(&a.epoch_a)?, &load(&a.epoch_b)?, cell)?;
    let summary = summarize(&map, tol, &bands)?;
    println!(
        "mean_m={:.6} rms_m={:.6} max_abs_m={:.6} fraction_within={:.6} valid_cells={}",
        summary.mean_m, summary.rms_m, summary.max_abs_m, summary.fraction_within, summary.valid_cells
    );
    let mut outputs = Vec::new();
    if let Some(p) = &a.heatmap {
        export_heatmap(&map, p, ramp, range)?;
        outputs.push(p.clone());
        outputs.push(legend_path(p));
    }
    if let Some(p) = &a.summary {
        write_json(&serde_json::to_value(&summary).expect("summary encodes"), p)?;
        outputs.push(p.clone());
    }
    if let Some(p) = &a.grid {
        write_asc(&map.grid, p)?;
        outputs.push(p.clone());
    }
    Ok(Outcome {
        inputs: vec![a.epoch_a.clone(), a.epoch_b.clone()],
        outputs,
        ..Outcome::default()
    })
}

#[derive(Args, Debug)]
pub struct TinArgs {
    pub input: PathBuf,
    /// Wavefront OBJ.
    #[arg(short, long)]
    pub output: PathBuf,
}

fn tin(a: &TinArgs, _s: &Settings) -> Result<Outcome, CliError> {
    let t = delaunay(&load(&a.input)?)?;
    export_obj(&t, &a.output)?;
    println!(
        "vertices={} triangles={} area_m2={:.3}",
        t.vertices().len(),
        t.triangles().len(),
        t.area()
    );
    Ok(Outcome {
        inputs: vec![a.input.clone()],
        outputs: vec![a.output.clone()],
        ..Outcome::default()
    })
}

#[derive(Args, Debug)]
pub struct AccuracyArgs {
    /// Target centres, lines `scan_id target_id x y z`.
    #[arg(long, conflicts_with_all = ["distances", "scans"])]
    pub observations: Option<PathBuf>,
    /// Per-scan distances, lines `scan_id target_a target_b distance_m`.
    #[arg(long, conflicts_with = "scans")]
    pub distances: Option<PathBuf>,
    /// Scan clouds to extract targets from; the file stem is the scan id.
    #[arg(long = "scan", requires = "approx")]
    pub scans: Vec<PathBuf>,
    /// Approximate centres, lines `scan_id target_id x y z`.
    #[arg(long)]
    pub approx: Option<PathBuf>,
    #[arg(long)]
    pub sphere_radius: Option<f64>,
    #[arg(long)]
    pub search_radius: Option<f64>,
    /// Verdict threshold on the largest standard deviation, millimetres.
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance_mm: Option<f64>,
    /// Report JSON.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write fitted centres in observation format.
    #[arg(long)]
    pub centers: Option<PathBuf>,
}

fn fitted_observations(a: &AccuracyArgs, s: &Settings) -> Result<Vec<TargetObservation>, CliError> {
    let sphere_r = s
        .opt("sphere-radius", a.sphere_radius)?
        .ok_or_else(|| CliError::Usage("--scan needs --sphere-radius".into()))?;
    let search_r = s.get("search-radius", a.search_radius, 2.0 * sphere_r)?;
    let approx = read_observations(a.approx.as_ref().expect("clap enforces --approx"))?;
    let jobs: Vec<(&PathBuf, &TargetObservation)> = a
        .scans
        .iter()
        .flat_map(|p| {
            let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            approx.iter().filter(move |o| o.scan_id == id).map(move |o| (p, o))
        })
        .collect();
    let clouds: Vec<PointCloud> = a
        .scans
        .par_iter()
        .map(|p| {
            let mut c = load(p)?;
            c.source = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(c)
        })
        .collect::<Result<_, CliError>>()?;
    jobs.par_iter()
        .map(|(p, o)| {
            let i = a.scans.iter().position(|q| q == *p).expect("job scan is listed");
            Ok(extract_target(&clouds[i], &o.target_id, o.center, search_r, sphere_r)?)
        })
        .collect()
}

fn accuracy(a: &AccuracyArgs, s: &Settings) -> Result<Outcome, CliError> {
    let tol = s.get("tolerance-mm", a.tolerance_mm, targets::DEFAULT_TOLERANCE_MM)?;
    let mut inputs = Vec::new();
    let mut outputs = vec![a.output.clone()];
    let report = if let Some(p) = &a.observations {
        inputs.push(p.clone());
        distance_stats(&read_observations(p)?, tol)?
    } else if let Some(p) = &a.distances {
        inputs.push(p.clone());
        distance_stats_from_table(&read_distances(p)?, tol)?
    } else if !a.scans.is_empty() {
        inputs.extend(a.scans.iter().cloned());
        inputs.push(a.approx.clone().expect("clap enforces --approx"));
        let obs = fitted_observations(a, s)?;
        if let Some(c) = &a.centers {
            let text: String = obs
                .iter()
                .map(|o| {
                    format!(
                        "{} {} {} {} {}\n",
                        o.scan_id, o.target_id, o.center.x, o.center.y, o.center.z
                    )
                })
                .collect();
            std::fs::write(c, text)
                .map_err(|e| CliError::Data(format!("cannot write {}: {e}", c.display())))?;
            outputs.push(c.clone());
        }
        distance_stats(&obs, tol)?
    } else {
        return Err(CliError::Usage(
            "accuracy needs --observations, --distances or --scan with --approx".into(),
        ));
    };
    accuracy_report_json(&report, &a.output)?;
    let verdict = match report.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
    };
    println!(
        "targets={} scans={} max_std_mm={:.1} tolerance_mm={} verdict={verdict}",
        report.target_ids.len(),
        report.scan_count(),
        report.max_std,
        report.tolerance
    );
    Ok(Outcome {
        inputs,
        outputs,
        exit: if report.verdict == Verdict::Fail { 3 } else { 0 },
        ..Outcome::default()
    })
}

#[derive(Args, Debug)]
pub struct SpacingArgs {
    pub input: PathBuf,
}

fn spacing(a: &SpacingArgs, _s: &Settings) -> Result<Outcome, CliError> {
    let d = mean_nn_spacing(&load(&a.input)?)?;
    println!("mean_spacing_m={d:.12}");
    Ok(Outcome {
        inputs: vec![a.input.clone()],
        ..Outcome::default()
    })
}
