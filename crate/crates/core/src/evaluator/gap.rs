use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::recall::{recall_at_k_with, Direction};
use super::score::{GroundTruth, ScoreMatrix};
use super::EvalError;
use crate::exec::Exec;

/// `(p - p_control) / p`.
pub fn relative_gap(p: f64, p_control: f64) -> Result<f64, EvalError> {
    if !(p.is_finite() && p_control.is_finite()) || p < 0.0 || p_control < 0.0 {
        return Err(EvalError::InvalidRecall(if p.is_finite() && p >= 0.0 { p_control } else { p }));
    }
    if p == 0.0 {
        return Err(EvalError::ZeroBaseline);
    }
    Ok((p - p_control) / p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub category: String,
    pub direction: Direction,
    pub k: usize,
    pub p: f64,
    pub p_control: f64,
    /// `None` when `p` is zero and the gap is undefined.
    pub delta_p: Option<f64>,
}

impl GapReport {
    pub fn new(category: impl Into<String>, direction: Direction, k: usize, p: f64, p_control: f64) -> Result<Self, EvalError> {
        let delta_p = match relative_gap(p, p_control) {
            Ok(v) => Some(v),
            Err(EvalError::ZeroBaseline) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            category: category.into(),
            direction,
            k,
            p,
            p_control,
            delta_p,
        })
    }
}

/// Recall on both pools and the gap, for both directions and every `k`.
pub fn gap_reports(
    category: &str,
    positive: &ScoreMatrix,
    control: &ScoreMatrix,
    gt: &GroundTruth,
    ks: &[usize],
    exec: Exec,
) -> Result<Vec<GapReport>, EvalError> {
    let mut out = Vec::new();
    for direction in Direction::BOTH {
        for &k in ks {
            let p = recall_at_k_with(positive, gt, k, direction, exec)?;
            let pc = recall_at_k_with(control, gt, k, direction, exec)?;
            out.push(GapReport::new(category, direction, k, p, pc)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryFiles {
    pub report: PathBuf,
    pub scatter: PathBuf,
}

pub const REPORT_HEADER: [&str; 6] = ["category", "direction", "k", "p", "p_control", "delta_p"];

fn csv_err(e: csv::Error) -> EvalError {
    EvalError::Csv(e.to_string())
}

/// Writes the gap report CSV at `out_path` (rows sorted by category, direction, k) and a
/// `category,model,direction,k,delta_p` scatter file beside it, omitting undefined gaps.
pub fn summarize(gaps: &[GapReport], out_path: &Path, model_label: &str) -> Result<SummaryFiles, EvalError> {
    let mut rows: Vec<&GapReport> = gaps.iter().collect();
    rows.sort_by(|a, b| (&a.category, a.direction, a.k).cmp(&(&b.category, b.direction, b.k)));
    if let Some(dir) = out_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| EvalError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let delta = |g: &GapReport| g.delta_p.map_or_else(|| "undefined".to_string(), |d| d.to_string());

    let mut w = csv::Writer::from_path(out_path).map_err(csv_err)?;
    w.write_record(REPORT_HEADER).map_err(csv_err)?;
    for g in &rows {
        w.write_record([
            g.category.clone(),
            g.direction.to_string(),
            g.k.to_string(),
            g.p.to_string(),
            g.p_control.to_string(),
            delta(g),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| EvalError::Io {
        path: out_path.to_path_buf(),
        source,
    })?;

    let scatter = out_path.with_extension("scatter.csv");
    let mut w = csv::Writer::from_path(&scatter).map_err(csv_err)?;
    w.write_record(["category", "model", "direction", "k", "delta_p"]).map_err(csv_err)?;
    for g in rows.iter().filter(|g| g.delta_p.is_some()) {
        w.write_record([
            g.category.clone(),
            model_label.to_string(),
            g.direction.to_string(),
            g.k.to_string(),
            delta(g),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| EvalError::Io {
        path: scatter.clone(),
        source,
    })?;
    Ok(SummaryFiles {
        report: out_path.to_path_buf(),
        scatter,
    })
}
