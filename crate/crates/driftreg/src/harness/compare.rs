//! The `compare` workflow: optional tuning, replicated evaluation, result
//! files.

use std::path::{Path, PathBuf};

use super::output::{emit_results, RunInfo};
use super::run::{replicate_mean, single_run_curve, MeanCurve};
use super::tune::grid_tune;
use super::{split_prefix, tuning_seed, DatasetSpec, ExperimentConfig};
use crate::datagen::Stream;
use crate::error::{Error, Result};
use crate::learners::LearnerSpec;

#[derive(Debug)]
pub struct CompareReport {
    /// Final specs actually evaluated (post-tuning when grids were given).
    pub specs: Vec<LearnerSpec>,
    pub curves: Vec<MeanCurve>,
    pub files: Vec<PathBuf>,
}

enum EvalTarget {
    /// Generated dataset: evaluate over replicas with derived seeds.
    Generated(DatasetSpec),
    /// Fixed stream (CSV data, possibly the holdout remainder after
    /// prefix tuning): evaluate with a single deterministic run.
    Fixed(Box<Stream>),
}

/// Runs a full comparison as described by the config and writes results to
/// `out_dir`. Tuning uses a dedicated seeded sequence for generated
/// datasets and a prefix split (with holdout evaluation) for fixed data.
pub fn run_compare(config: &ExperimentConfig, out_dir: &Path, plot: bool) -> Result<CompareReport> {
    config.validate()?;

    let mut specs = config.learners.clone();
    let eval = if config.dataset.is_generated() {
        if let Some(tuning) = &config.tuning {
            let (tuning_stream, _) = config.dataset.generate(tuning_seed(config.base_seed))?;
            tune_specs(&mut specs, tuning, &tuning_stream)?;
        }
        EvalTarget::Generated(config.dataset.clone())
    } else {
        let (full, _) = config.dataset.generate(config.base_seed)?;
        match &config.tuning {
            Some(tuning) => {
                let (head, tail) = split_prefix(&full, tuning.fraction)?;
                tune_specs(&mut specs, tuning, &head)?;
                EvalTarget::Fixed(Box::new(tail))
            }
            None => EvalTarget::Fixed(Box::new(full)),
        }
    };

    let curves: Vec<MeanCurve> = match &eval {
        EvalTarget::Generated(dataset) => specs
            .iter()
            .map(|s| replicate_mean(s, dataset, config.replications, config.base_seed))
            .collect::<Result<_>>()?,
        EvalTarget::Fixed(stream) => specs
            .iter()
            .map(|s| single_run_curve(s, stream))
            .collect::<Result<_>>()?,
    };

    let max_input_norm = curves.iter().map(|c| c.max_input_norm).fold(0.0, f64::max);
    let info = RunInfo {
        replications: match eval {
            EvalTarget::Generated(_) => config.replications,
            EvalTarget::Fixed(_) => 1,
        },
        base_seed: config.base_seed,
        tuned: config.tuning.is_some(),
        max_input_norm,
        input_norm_bounded_by_one: max_input_norm <= 1.0,
    };
    let config_value = serde_json::to_value(config)
        .map_err(|e| Error::Config(format!("config serialization failed: {e}")))?;
    let files = emit_results(&curves, &config_value, &info, out_dir, plot)?;

    Ok(CompareReport {
        specs,
        curves,
        files,
    })
}

fn tune_specs(
    specs: &mut [LearnerSpec],
    tuning: &super::TuningSpec,
    tuning_stream: &Stream,
) -> Result<()> {
    for spec in specs.iter_mut() {
        if let Some(grid) = tuning.grids.get(spec.algo_tag()) {
            *spec = grid_tune(spec, grid, tuning_stream)?.best;
        }
    }
    Ok(())
}
