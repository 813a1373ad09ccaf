//! Result files: per-run loss curves, a summary table, run metadata, and
//! optional plots. All writers are deterministic — identical inputs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::run::MeanCurve;
use super::svg::render_line_plot;
use crate::error::{Error, Result};

/// Run-level metadata recorded next to the curves.
#[derive(Clone, Debug, Serialize)]
pub struct RunInfo {
    pub replications: u64,
    pub base_seed: u64,
    pub tuned: bool,
    /// Largest input norm seen across all replicas; the analysis of the
    /// drift-aware learners assumes inputs of norm at most one, so whether
    /// the data satisfied that is recorded here.
    pub max_input_norm: f64,
    pub input_norm_bounded_by_one: bool,
}

#[derive(Serialize)]
struct CurveMeta<'a> {
    label: &'a str,
    seeds: &'a [u64],
    final_mean_cum_loss: f64,
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'a str,
    config: &'a serde_json::Value,
    info: &'a RunInfo,
    curves: Vec<CurveMeta<'a>>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Writes one CSV per curve (`t,loss,cumloss`), `summary.csv`, `meta.json`,
/// and optionally `cumloss.svg`. Returns the created paths.
pub fn emit_results(
    curves: &[MeanCurve],
    config: &serde_json::Value,
    info: &RunInfo,
    out_dir: &Path,
    plot: bool,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let mut files = Vec::new();

    for (i, curve) in curves.iter().enumerate() {
        let path = out_dir.join(format!("run_{i:02}_{}.csv", curve.spec.algo_tag()));
        let mut body = String::from("t,loss,cumloss\n");
        for (t, (loss, cum)) in curve.mean_loss.iter().zip(&curve.mean_cum_loss).enumerate() {
            let _ = writeln!(body, "{},{loss},{cum}", t + 1);
        }
        write_file(&path, &body)?;
        files.push(path);
    }

    let summary_path = out_dir.join("summary.csv");
    let mut summary = String::from("label,final_cumloss\n");
    for curve in curves {
        let _ = writeln!(summary, "{},{}", curve.label, curve.final_mean_loss());
    }
    write_file(&summary_path, &summary)?;
    files.push(summary_path);

    let meta = Meta {
        version: env!("CARGO_PKG_VERSION"),
        config,
        info,
        curves: curves
            .iter()
            .map(|c| CurveMeta {
                label: &c.label,
                seeds: &c.seeds,
                final_mean_cum_loss: c.final_mean_loss(),
            })
            .collect(),
    };
    let meta_path = out_dir.join("meta.json");
    let body = serde_json::to_string_pretty(&meta)
        .map_err(|e| Error::Config(format!("metadata serialization failed: {e}")))?;
    write_file(&meta_path, &body)?;
    files.push(meta_path);

    if plot {
        let series: Vec<(String, Vec<f64>)> = curves
            .iter()
            .map(|c| (c.label.clone(), c.mean_cum_loss.clone()))
            .collect();
        let svg_path = out_dir.join("cumloss.svg");
        write_file(
            &svg_path,
            &render_line_plot("mean cumulative squared loss", &series, false),
        )?;
        files.push(svg_path);
    }

    Ok(files)
}

/// Reads a `t,loss,cumloss` curve back; used by round-trip tests.
pub fn read_curve_csv(path: &Path) -> Result<Vec<(u64, f64, f64)>> {
    let body =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut lines = body.lines();
    match lines.next() {
        Some("t,loss,cumloss") => {}
        other => {
            return Err(Error::Data(format!(
                "{}: unexpected header {other:?}",
                path.display()
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut fields = line.split(',');
        let parse_err = || Error::Data(format!("{}: line {}: bad row", path.display(), i + 2));
        let t = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(parse_err)?;
        let loss = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(parse_err)?;
        let cum = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(parse_err)?;
        rows.push((t, loss, cum));
    }
    Ok(rows)
}
