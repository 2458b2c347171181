use super::TargetObservation;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One scan's measured distance between two targets.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDistance {
    pub scan_id: String,
    pub target_a: String,
    pub target_b: String,
    pub distance: f64,
}

/// Pairwise distance statistics over repeated scans.
///
/// Matrices are `n × n` with entries only for `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub target_ids: Vec<String>,
    pub scan_ids: Vec<String>,
    /// Metres.
    pub mean_distance: Vec<Vec<Option<f64>>>,
    /// Millimetres, sample (n − 1) estimator.
    pub std_distance: Vec<Vec<Option<f64>>>,
    pub max_std: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl AccuracyReport {
    pub fn scan_count(&self) -> usize {
        self.scan_ids.len()
    }

    fn index(&self, id: &str) -> Option<usize> {
        self.target_ids.iter().position(|t| t == id)
    }

    fn entry(&self, m: &[Vec<Option<f64>>], a: &str, b: &str) -> Option<f64> {
        let (i, j) = (self.index(a)?, self.index(b)?);
        m[i.min(j)][i.max(j)]
    }

    /// Mean distance in metres between two targets, in either order.
    pub fn mean(&self, a: &str, b: &str) -> Option<f64> {
        self.entry(&self.mean_distance, a, b)
    }

    /// Standard deviation in millimetres between two targets.
    pub fn std_mm(&self, a: &str, b: &str) -> Option<f64> {
        self.entry(&self.std_distance, a, b)
    }
}

fn natural_sorted(ids: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut v: Vec<String> = ids.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    v.sort_by(|a, b| natord::compare(a, b).then_with(|| a.cmp(b)));
    v
}

/// Statistics from per-scan target centres (3D Euclidean distances).
pub fn distance_stats(observations: &[TargetObservation], tolerance_mm: f64) -> Result<AccuracyReport> {
    let mut by_scan: BTreeMap<&str, BTreeMap<&str, Vector3<f64>>> = BTreeMap::new();
    for o in observations {
        if !o.center.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scan {} target {} has a non-finite centre",
                o.scan_id, o.target_id
            )));
        }
        if by_scan
            .entry(&o.scan_id)
            .or_default()
            .insert(&o.target_id, o.center)
            .is_some()
        {
            return Err(Error::InvalidArgument(format!(
                "scan {} observes target {} more than once",
                o.scan_id, o.target_id
            )));
        }
    }
    let targets = natural_sorted(observations.iter().map(|o| o.target_id.clone()));
    let mut table = Vec::new();
    for (scan, obs) in &by_scan {
        for t in &targets {
            if !obs.contains_key(t.as_str()) {
                return Err(Error::MissingObservation {
                    scan: scan.to_string(),
                    target: t.clone(),
                });
            }
        }
        for (i, a) in targets.iter().enumerate() {
            for b in &targets[i + 1..] {
                table.push(PairDistance {
                    scan_id: scan.to_string(),
                    target_a: a.clone(),
                    target_b: b.clone(),
                    distance: (obs[a.as_str()] - obs[b.as_str()]).norm(),
                });
            }
        }
    }
    distance_stats_from_table(&table, tolerance_mm)
}

/// Statistics from distances already measured in each scan.
///
/// Every scan must give every pair of the targets mentioned exactly once.
pub fn distance_stats_from_table(table: &[PairDistance], tolerance_mm: f64) -> Result<AccuracyReport> {
    if !(tolerance_mm >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be ≥ 0 mm, got {tolerance_mm}"
        )));
    }
    let mut cells: BTreeMap<(String, String), BTreeMap<String, f64>> = BTreeMap::new();
    for d in table {
        if d.target_a == d.target_b {
            return Err(Error::InvalidArgument(format!(
                "scan {} gives a distance from target {} to itself",
                d.scan_id, d.target_a
            )));
        }
        if !(d.distance.is_finite() && d.distance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "scan {} distance {}–{} must be finite and ≥ 0",
                d.scan_id, d.target_a, d.target_b
            )));
        }
        let key = if d.target_a < d.target_b {
            (d.target_a.clone(), d.target_b.clone())
        } else {
            (d.target_b.clone(), d.target_a.clone())
        };
        if cells
            .entry(key)
            .or_default()
            .insert(d.scan_id.clone(), d.distance)
            .is_some()
        {
            return Err(Error::InvalidArgument(format!(
                "scan {} gives distance {}–{} more than once",
                d.scan_id, d.target_a, d.target_b
            )));
        }
    }
    let targets = natural_sorted(table.iter().flat_map(|d| [d.target_a.clone(), d.target_b.clone()]));
    let scans = natural_sorted(table.iter().map(|d| d.scan_id.clone()));
    if targets.len() < 2 {
        return Err(Error::InsufficientPoints(format!(
            "accuracy protocol needs ≥ 2 targets, got {}",
            targets.len()
        )));
    }
    if scans.len() < 2 {
        return Err(Error::InsufficientPoints(format!(
            "accuracy protocol needs ≥ 2 scans, got {}",
            scans.len()
        )));
    }
    let n = targets.len();
    let mut mean = vec![vec![None; n]; n];
    let mut std = vec![vec![None; n]; n];
    let mut max_std = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&targets[i], &targets[j]);
            let key = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            let per_scan = cells.get(&key);
            let mut values = Vec::with_capacity(scans.len());
            for s in &scans {
                match per_scan.and_then(|m| m.get(s)) {
                    Some(&d) => values.push(d),
                    None => {
                        return Err(Error::MissingObservation {
                            scan: s.clone(),
                            target: format!("{a}–{b} distance"),
                        })
                    }
                }
            }
            let k = values.len() as f64;
            let m = values.iter().copied().collect::<CompensatedSum>().value() / k;
            let ss = values.iter().map(|v| (v - m) * (v - m)).collect::<CompensatedSum>().value();
            let s_mm = (ss / (k - 1.0)).sqrt() * 1000.0;
            mean[i][j] = Some(m);
            std[i][j] = Some(s_mm);
            max_std = max_std.max(s_mm);
        }
    }
    Ok(AccuracyReport {
        target_ids: targets,
        scan_ids: scans,
        mean_distance: mean,
        std_distance: std,
        max_std,
        tolerance: tolerance_mm,
        verdict: if max_std <= tolerance_mm { Verdict::Pass } else { Verdict::Fail },
    })
}

fn round_to(v: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (v * f).round() / f
}

fn matrix_json(m: &[Vec<Option<f64>>], decimals: Option<i32>) -> Value {
    Value::Array(
        m.iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|v| match (v, decimals) {
                            (None, _) => Value::Null,
                            (Some(x), Some(d)) => json!(round_to(*x, d)),
                            (Some(x), None) => json!(x),
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// JSON form. Table values are rounded as published (means 1 mm, stds
/// 0.1 mm); unrounded values are kept under `full_precision`.
pub fn report_to_json(report: &AccuracyReport) -> Value {
    json!({
        "targets": report.target_ids,
        "scans": report.scan_ids,
        "scan_count": report.scan_count(),
        "mean_m": matrix_json(&report.mean_distance, Some(3)),
        "std_mm": matrix_json(&report.std_distance, Some(1)),
        "max_std_mm": round_to(report.max_std, 1),
        "tolerance_mm": report.tolerance,
        "verdict": report.verdict,
        "std_estimator": "sample (n-1)",
        "distance": "3d euclidean",
        "full_precision": {
            "mean_m": matrix_json(&report.mean_distance, None),
            "std_mm": matrix_json(&report.std_distance, None),
            "max_std_mm": report.max_std,
        },
    })
}

pub fn accuracy_report_json(report: &AccuracyReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&report_to_json(report))
        .map_err(|e| Error::Json { path: path.to_path_buf(), source: e })?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
struct FullPrecision {
    mean_m: Vec<Vec<Option<f64>>>,
    std_mm: Vec<Vec<Option<f64>>>,
    max_std_mm: f64,
}

#[derive(Deserialize)]
struct ReportFile {
    targets: Vec<String>,
    scans: Vec<String>,
    tolerance_mm: f64,
    verdict: Verdict,
    full_precision: FullPrecision,
}

/// Reads a report written by [`accuracy_report_json`].
pub fn read_accuracy_report(path: impl AsRef<Path>) -> Result<AccuracyReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let f: ReportFile = serde_json::from_str(&text)
        .map_err(|e| Error::Json { path: path.to_path_buf(), source: e })?;
    Ok(AccuracyReport {
        target_ids: f.targets,
        scan_ids: f.scans,
        mean_distance: f.full_precision.mean_m,
        std_distance: f.full_precision.std_mm,
        max_std: f.full_precision.max_std_mm,
        tolerance: f.tolerance_mm,
        verdict: f.verdict,
    })
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn parse_f64(path: &Path, line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(path, "line", line, format!("'{tok}' is not a finite number")))
}

/// Lines `scan_id target_id x y z`.
pub fn read_observations(path: impl AsRef<Path>) -> Result<Vec<TargetObservation>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    data_lines(&text)
        .map(|(ln, t)| {
            if t.len() != 5 {
                return Err(Error::parse(path, "line", ln, format!("expected 5 fields, found {}", t.len())));
            }
            let c = Vector3::new(parse_f64(path, ln, t[2])?, parse_f64(path, ln, t[3])?, parse_f64(path, ln, t[4])?);
            Ok(TargetObservation::new(t[0], t[1], c))
        })
        .collect()
}

/// Lines `scan_id target_a target_b distance_m`.
pub fn read_distances(path: impl AsRef<Path>) -> Result<Vec<PairDistance>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    data_lines(&text)
        .map(|(ln, t)| {
            if t.len() != 4 {
                return Err(Error::parse(path, "line", ln, format!("expected 4 fields, found {}", t.len())));
            }
            Ok(PairDistance {
                scan_id: t[0].to_string(),
                target_a: t[1].to_string(),
                target_b: t[2].to_string(),
                distance: parse_f64(path, ln, t[3])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(s: &str, a: &str, b: &str, d: f64) -> PairDistance {
        PairDistance {
            scan_id: s.into(),
            target_a: a.into(),
            target_b: b.into(),
            distance: d,
        }
    }

    #[test]
    fn two_scans() {
        let r = distance_stats_from_table(&[pd("s1", "A", "B", 10.0), pd("s2", "B", "A", 10.002)], 3.0)
            .unwrap();
        assert!((r.mean("A", "B").unwrap() - 10.001).abs() < 1e-12);
        let expect = 0.002 / 2f64.sqrt() * 1000.0;
        assert!((r.std_mm("B", "A").unwrap() - expect).abs() < 1e-9);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn identical_scans_have_zero_std() {
        let mut obs = Vec::new();
        for s in ["s1", "s2", "s3", "s4"] {
            obs.push(TargetObservation::new(s, "1", Vector3::new(0.0, 0.0, 0.0)));
            obs.push(TargetObservation::new(s, "2", Vector3::new(3.0, 4.0, 0.0)));
            obs.push(TargetObservation::new(s, "10", Vector3::new(0.0, 0.0, 12.0)));
        }
        let r = distance_stats(&obs, 0.1).unwrap();
        assert_eq!(r.target_ids, vec!["1", "2", "10"]);
        assert_eq!(r.std_mm("1", "2"), Some(0.0));
        assert_eq!(r.mean("1", "2"), Some(5.0));
        assert_eq!(r.mean("1", "10"), Some(12.0));
        assert_eq!(r.max_std, 0.0);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.mean_distance[1][0], None);
    }

    #[test]
    fn missing_observation_names_scan_and_target() {
        let obs = vec![
            TargetObservation::new("s1", "A", Vector3::zeros()),
            TargetObservation::new("s1", "B", Vector3::x()),
            TargetObservation::new("s2", "A", Vector3::zeros()),
        ];
        let err = distance_stats(&obs, 1.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("s2") && msg.contains("B"), "{msg}");
    }

    #[test]
    fn one_scan_is_insufficient() {
        let obs = vec![
            TargetObservation::new("s1", "A", Vector3::zeros()),
            TargetObservation::new("s1", "B", Vector3::x()),
        ];
        assert!(distance_stats(&obs, 1.0).is_err());
    }

    #[test]
    fn json_keys_and_round_trip() {
        let r = distance_stats_from_table(&[pd("s1", "A", "B", 10.0), pd("s2", "A", "B", 10.0021)], 1.0)
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        accuracy_report_json(&r, &p).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
        for k in ["targets", "mean_m", "std_mm", "max_std_mm", "tolerance_mm", "verdict"] {
            assert!(v.get(k).is_some(), "missing {k}");
        }
        assert_eq!(v["verdict"], "fail");
        assert_eq!(v["mean_m"][0][1], json!(10.001));
        assert_eq!(v["std_mm"][0][1], json!(1.5));
        assert_eq!(read_accuracy_report(&p).unwrap(), r);
    }
}
