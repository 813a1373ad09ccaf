//! Experiment harness: runs any learner over any stream under the strict
//! online protocol, replicates with derived seeds, tunes on grids, computes
//! regret, and writes CSV/JSON/SVG artifacts.

mod compare;
mod output;
mod run;
mod svg;
mod tune;

pub use compare::{run_compare, CompareReport};
pub use output::{emit_results, read_curve_csv, RunInfo};
pub use run::{
    compute_regret, fixed_comparator_regret, replicate_mean, run_experiment, run_stream,
    single_run_curve, MeanCurve, StepRecord, Trajectory,
};
pub use svg::render_line_plot;
pub use tune::{default_grid, expand_grid, grid_tune, ParamGrid, TuneOutcome};

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::datagen::{
    child_seed, fir_echo_dataset, flange_echo_dataset, load_csv_stream, rotating_drift_stream,
    ComparatorSeq, FirEchoParams, FlangeEchoParams, RotatingParams, Stream,
};
use crate::error::{Error, Result};
use crate::learners::LearnerSpec;

/// Replica index reserved for the dedicated tuning sequence of generated
/// datasets, far outside the replica range.
pub const TUNING_SEQUENCE_INDEX: u64 = u64::MAX;

/// Dataset choice: one of the seeded generators, or a CSV file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DatasetSpec {
    Rotating(RotatingParams),
    FirEcho(FirEchoParams),
    FlangeEcho(FlangeEchoParams),
    Csv { path: String },
}

impl DatasetSpec {
    /// Generates (or loads) the stream. The comparator sequence is known
    /// only for the synthetic drift generator.
    pub fn generate(&self, seed: u64) -> Result<(Stream, Option<ComparatorSeq>)> {
        match self {
            DatasetSpec::Rotating(p) => {
                let (s, u) = rotating_drift_stream(p, seed)?;
                Ok((s, Some(u)))
            }
            DatasetSpec::FirEcho(p) => Ok((fir_echo_dataset(p, seed)?, None)),
            DatasetSpec::FlangeEcho(p) => Ok((flange_echo_dataset(p, seed)?, None)),
            DatasetSpec::Csv { path } => Ok((load_csv_stream(std::path::Path::new(path))?, None)),
        }
    }

    /// True for seeded generators, false for fixed CSV data. Decides the
    /// tuning mode: dedicated tuning sequence vs prefix split.
    pub fn is_generated(&self) -> bool {
        !matches!(self, DatasetSpec::Csv { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DatasetSpec::Rotating(_) => "rotating",
            DatasetSpec::FirEcho(_) => "fir-echo",
            DatasetSpec::FlangeEcho(_) => "flange-echo",
            DatasetSpec::Csv { .. } => "csv",
        }
    }

    /// Builds a spec from a CLI kind plus `key=value` parameters, going
    /// through the JSON representation so unknown keys are rejected
    /// uniformly.
    pub fn from_cli(kind: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        let mut map = serde_json::Map::new();
        map.insert("kind".into(), serde_json::Value::String(kind.into()));
        for (k, v) in params {
            let value = if let Ok(i) = v.parse::<i64>() {
                serde_json::Value::from(i)
            } else if let Ok(f) = v.parse::<f64>() {
                serde_json::Value::from(f)
            } else {
                serde_json::Value::String(v.clone())
            };
            map.insert(k.clone(), value);
        }
        serde_json::from_value(serde_json::Value::Object(map))
            .map_err(|e| Error::Config(format!("bad generator spec `{kind}`: {e}")))
    }
}

/// Grid-tuning portion of an experiment config: per-algorithm parameter
/// grids, and the prefix fraction used when the dataset is a fixed signal.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningSpec {
    /// Algorithm tag -> (parameter name -> candidate values).
    pub grids: BTreeMap<String, ParamGrid>,
    #[serde(default = "default_fraction")]
    pub fraction: f64,
}

fn default_fraction() -> f64 {
    0.1
}

fn default_reps() -> u64 {
    1
}

/// Full experiment description; the JSON form of this struct is the
/// `compare` config file. Unknown keys are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub learners: Vec<LearnerSpec>,
    #[serde(default = "default_reps")]
    pub replications: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub tuning: Option<TuningSpec>,
    /// Default output directory; a `--out` flag on the CLI overrides it.
    #[serde(default)]
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learners.is_empty() {
            return Err(Error::Config("config lists no learners".into()));
        }
        if self.replications < 1 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if let Some(t) = &self.tuning {
            if !(t.fraction > 0.0 && t.fraction < 1.0) {
                return Err(Error::Config(format!(
                    "tuning fraction must lie in (0, 1), got {}",
                    t.fraction
                )));
            }
            for algo in t.grids.keys() {
                if !crate::learners::ALGO_TAGS.contains(&algo.as_str()) {
                    return Err(Error::Config(format!(
                        "tuning grid for unknown algorithm `{algo}`"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Tuning prefix and evaluation remainder of a fixed stream.
pub fn split_prefix(stream: &Stream, fraction: f64) -> Result<(Stream, Stream)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!(
            "fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let cut = ((stream.len() as f64 * fraction).floor() as usize).max(1);
    if cut >= stream.len() {
        return Err(Error::Data(format!(
            "stream of length {} too short to split at fraction {fraction}",
            stream.len()
        )));
    }
    let head = Stream::new(stream.samples[..cut].to_vec(), stream.meta.clone())?;
    let tail = Stream::new(stream.samples[cut..].to_vec(), stream.meta.clone())?;
    Ok((head, tail))
}

/// Runs `f(0..n)` on a scoped worker pool and returns results in index
/// order; the merge order is fixed, so outputs do not depend on the worker
/// count.
pub(crate) fn parallel_indexed<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let workers = std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1)
        .min(n);
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<T>>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = f(i);
                *slots[i].lock().expect("result slot poisoned") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .expect("result slot poisoned")
                .expect("worker visited every index")
        })
        .collect()
}

/// Seed for the dedicated tuning sequence of a generated dataset.
pub fn tuning_seed(base_seed: u64) -> u64 {
    child_seed(base_seed, TUNING_SEQUENCE_INDEX)
}
