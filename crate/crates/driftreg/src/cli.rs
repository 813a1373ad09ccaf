//! Command-line interface: `gen`, `run`, `tune`, `compare`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crate::datagen::{write_csv_stream, ComparatorSeq};
use crate::error::Error;
use crate::harness::{
    default_grid, emit_results, grid_tune, run_compare, split_prefix, tuning_seed, DatasetSpec,
    ExperimentConfig, ParamGrid, RunInfo, TuneOutcome,
};
use crate::learners::{LearnerSpec, ALGO_TAGS};

const USAGE: &str = "usage: driftreg <command> [options]

commands:
  gen      --kind {rotating|fir-echo|flange-echo} --out FILE
           [--seed N] [--gparam k=v,...] [--u-out FILE]
  run      --algo ALGO (--data FILE | --gen SPEC) --out DIR
           [--params k=v,...] [--seed N] [--reps R] [--plot]
  tune     --algo ALGO (--data FILE | --gen SPEC) --out DIR
           [--grid FILE] [--tune-frac F] [--seed N]
  compare  --config FILE.json [--out DIR] [--plot]

ALGO is one of nlms, rls, crrls, arowr, aar, arcor, laser.
SPEC is kind[:k=v,...], e.g. rotating:t=2000,d=20,drift_per_step=0.01.
Infinite sentinels are written `inf` (e.g. --params c=inf).";

enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Entry point used by the binary; returns the process exit code.
pub fn run_cli(args: &[String]) -> i32 {
    match dispatch(args) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{USAGE}");
            1
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(args: &[String]) -> CliResult<()> {
    let Some(command) = args.first() else {
        return usage_err("no command given");
    };
    let parsed = Args::parse(&args[1..])?;
    match command.as_str() {
        "gen" => cmd_gen(parsed),
        "run" => cmd_run(parsed),
        "tune" => cmd_tune(parsed),
        "compare" => cmd_compare(parsed),
        other => usage_err(format!("unknown command `{other}`")),
    }
}

/// Minimal `--key value` / `--flag` argument map.
struct Args {
    values: BTreeMap<String, String>,
    flags: BTreeSet<String>,
}

const FLAG_KEYS: [&str; 1] = ["plot"];

impl Args {
    fn parse(raw: &[String]) -> CliResult<Args> {
        let mut values = BTreeMap::new();
        let mut flags = BTreeSet::new();
        let mut it = raw.iter();
        while let Some(token) = it.next() {
            let Some(key) = token.strip_prefix("--") else {
                return usage_err(format!("unexpected argument `{token}`"));
            };
            if FLAG_KEYS.contains(&key) {
                flags.insert(key.to_string());
                continue;
            }
            let Some(value) = it.next() else {
                return usage_err(format!("missing value for `--{key}`"));
            };
            if values.insert(key.to_string(), value.clone()).is_some() {
                return usage_err(format!("duplicate option `--{key}`"));
            }
        }
        Ok(Args { values, flags })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    fn require(&mut self, key: &str) -> CliResult<String> {
        self.take(key).map_or_else(
            || usage_err(format!("missing required option `--{key}`")),
            Ok,
        )
    }

    fn flag(&mut self, key: &str) -> bool {
        self.flags.remove(key)
    }

    fn u64_or(&mut self, key: &str, default: u64) -> CliResult<u64> {
        match self.take(key) {
            None => Ok(default),
            Some(s) => s.parse().map_or_else(
                |_| usage_err(format!("`--{key}` expects an integer, got `{s}`")),
                Ok,
            ),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> CliResult<f64> {
        match self.take(key) {
            None => Ok(default),
            Some(s) => s.parse().map_or_else(
                |_| usage_err(format!("`--{key}` expects a number, got `{s}`")),
                Ok,
            ),
        }
    }

    fn finish(self) -> CliResult<()> {
        if let Some(key) = self.values.keys().next() {
            return usage_err(format!("unknown option `--{key}`"));
        }
        if let Some(key) = self.flags.iter().next() {
            return usage_err(format!("unexpected flag `--{key}`"));
        }
        Ok(())
    }
}

fn parse_kv_list(s: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    if s.is_empty() {
        return Ok(map);
    }
    for part in s.split(',') {
        let Some((k, v)) = part.split_once('=') else {
            return usage_err(format!("expected key=value, got `{part}`"));
        };
        if k.is_empty() || v.is_empty() {
            return usage_err(format!("expected key=value, got `{part}`"));
        }
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// `kind[:k=v,...]` compact generator spec.
fn parse_gen_spec(s: &str) -> CliResult<DatasetSpec> {
    let (kind, rest) = match s.split_once(':') {
        Some((k, r)) => (k, r),
        None => (s, ""),
    };
    let params = parse_kv_list(rest)?;
    Ok(DatasetSpec::from_cli(kind, &params)?)
}

fn parse_algo(s: &str) -> CliResult<&str> {
    if ALGO_TAGS.contains(&s) {
        Ok(s)
    } else {
        usage_err(format!(
            "unknown algorithm `{s}` (expected one of {})",
            ALGO_TAGS.join(", ")
        ))
    }
}

fn dataset_from_args(args: &mut Args) -> CliResult<DatasetSpec> {
    match (args.take("data"), args.take("gen")) {
        (Some(path), None) => Ok(DatasetSpec::Csv { path }),
        (None, Some(spec)) => parse_gen_spec(&spec),
        (Some(_), Some(_)) => usage_err("`--data` and `--gen` are mutually exclusive"),
        (None, None) => usage_err("one of `--data FILE` or `--gen SPEC` is required"),
    }
}

fn cmd_gen(mut args: Args) -> CliResult<()> {
    let kind = args.require("kind")?;
    let out = PathBuf::from(args.require("out")?);
    let seed = args.u64_or("seed", 0)?;
    let gparams = parse_kv_list(&args.take("gparam").unwrap_or_default())?;
    let u_out = args.take("u-out").map(PathBuf::from);
    args.finish()?;

    if kind == "csv" {
        return usage_err("`gen` needs a generator kind, not csv");
    }
    let dataset = DatasetSpec::from_cli(&kind, &gparams)?;
    let (stream, comparator) = dataset.generate(seed)?;
    write_csv_stream(&stream, &out)?;
    println!(
        "wrote {} samples (d={}) to {}",
        stream.len(),
        stream.dim(),
        out.display()
    );

    if let Some(path) = u_out {
        let Some(comparator) = comparator else {
            return usage_err(format!("generator `{kind}` has no comparator sequence"));
        };
        write_comparator_csv(&comparator, &path)?;
        println!("wrote comparator sequence to {}", path.display());
    }
    Ok(())
}

fn write_comparator_csv(comparator: &ComparatorSeq, path: &Path) -> Result<(), Error> {
    use std::fmt::Write as _;
    let d = comparator.u.first().map(|u| u.len()).unwrap_or(0);
    let mut body = String::from("t");
    for j in 1..=d {
        let _ = write!(body, ",u_{j}");
    }
    body.push('\n');
    for (i, u) in comparator.u.iter().enumerate() {
        let _ = write!(body, "{}", i + 1);
        for v in u {
            let _ = write!(body, ",{v}");
        }
        body.push('\n');
    }
    std::fs::write(path, body).map_err(|e| Error::io(path.display().to_string(), e))
}

fn cmd_run(mut args: Args) -> CliResult<()> {
    let algo = args.require("algo")?;
    let params = parse_kv_list(&args.take("params").unwrap_or_default())?;
    let dataset = dataset_from_args(&mut args)?;
    let out = PathBuf::from(args.require("out")?);
    let seed = args.u64_or("seed", 0)?;
    let reps = args.u64_or("reps", 1)?;
    let plot = args.flag("plot");
    args.finish()?;

    let spec = LearnerSpec::from_params(parse_algo(&algo)?, &params)?;
    let config = ExperimentConfig {
        dataset,
        learners: vec![spec],
        replications: reps,
        base_seed: seed,
        tuning: None,
        output: None,
    };
    let report = run_compare(&config, &out, plot)?;
    for curve in &report.curves {
        println!(
            "{}: final cumulative loss {}",
            curve.label,
            curve.final_mean_loss()
        );
    }
    println!("results in {}", out.display());
    Ok(())
}

fn load_grid(path: &str) -> CliResult<ParamGrid> {
    let body = std::fs::read_to_string(path).map_err(|e| Error::io(path.to_string(), e))?;
    let grid: ParamGrid = serde_json::from_str(&body)
        .map_err(|e| Error::Config(format!("{path}: bad grid file: {e}")))?;
    Ok(grid)
}

fn cmd_tune(mut args: Args) -> CliResult<()> {
    let algo = args.require("algo")?;
    let dataset = dataset_from_args(&mut args)?;
    let out = PathBuf::from(args.require("out")?);
    let grid = match args.take("grid") {
        Some(path) => load_grid(&path)?,
        None => default_grid(parse_algo(&algo)?),
    };
    let frac = args.f64_or("tune-frac", 0.1)?;
    let seed = args.u64_or("seed", 0)?;
    args.finish()?;

    let base = LearnerSpec::from_params(parse_algo(&algo)?, &BTreeMap::new())?;

    // generated data tunes on a dedicated sequence and evaluates on a fresh
    // replica; fixed data tunes on the prefix and evaluates on the rest
    let (outcome, eval_curve) = if dataset.is_generated() {
        let (tuning_stream, _) = dataset.generate(tuning_seed(seed))?;
        let outcome = grid_tune(&base, &grid, &tuning_stream)?;
        let curve = crate::harness::replicate_mean(&outcome.best, &dataset, 1, seed)
            .map_err(CliError::Lib)?;
        (outcome, curve)
    } else {
        let (full, _) = dataset.generate(seed)?;
        let (head, tail) = split_prefix(&full, frac)?;
        let outcome = grid_tune(&base, &grid, &head)?;
        let curve = crate::harness::single_run_curve(&outcome.best, &tail)?;
        (outcome, curve)
    };

    write_tune_outputs(&outcome, &eval_curve, &out, seed)?;
    println!(
        "best: {} (tuning loss {}, holdout loss {})",
        outcome.best.label(),
        outcome.best_loss,
        eval_curve.final_mean_loss()
    );
    println!("results in {}", out.display());
    Ok(())
}

fn write_tune_outputs(
    outcome: &TuneOutcome,
    eval_curve: &crate::harness::MeanCurve,
    out: &Path,
    seed: u64,
) -> CliResult<()> {
    use std::fmt::Write as _;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out.display().to_string(), e))?;

    let mut grid_csv = String::from("label,tuning_loss\n");
    for (spec, loss) in &outcome.evaluated {
        let _ = writeln!(grid_csv, "{},{loss}", spec.label());
    }
    std::fs::write(out.join("grid.csv"), grid_csv)
        .map_err(|e| Error::io(out.join("grid.csv").display().to_string(), e))?;

    let tuned = serde_json::json!({
        "best": outcome.best,
        "tuning_loss": outcome.best_loss,
        "holdout_loss": eval_curve.final_mean_loss(),
    });
    std::fs::write(
        out.join("tuned.json"),
        serde_json::to_string_pretty(&tuned).expect("valid json"),
    )
    .map_err(|e| Error::io(out.join("tuned.json").display().to_string(), e))?;

    let info = RunInfo {
        replications: 1,
        base_seed: seed,
        tuned: true,
        max_input_norm: eval_curve.max_input_norm,
        input_norm_bounded_by_one: eval_curve.max_input_norm <= 1.0,
    };
    emit_results(
        std::slice::from_ref(eval_curve),
        &serde_json::json!({"tuned": outcome.best}),
        &info,
        out,
        false,
    )?;
    Ok(())
}

fn cmd_compare(mut args: Args) -> CliResult<()> {
    let config_path = args.require("config")?;
    let out_flag = args.take("out");
    let plot = args.flag("plot");
    args.finish()?;

    let body =
        std::fs::read_to_string(&config_path).map_err(|e| Error::io(config_path.clone(), e))?;
    let config: ExperimentConfig =
        serde_json::from_str(&body).map_err(|e| Error::Config(format!("{config_path}: {e}")))?;
    let out = match out_flag.or_else(|| config.output.clone()) {
        Some(dir) => PathBuf::from(dir),
        None => return usage_err("`--out DIR` is required when the config has no `output` field"),
    };
    let report = run_compare(&config, &out, plot)?;
    for curve in &report.curves {
        println!(
            "{}: final cumulative loss {}",
            curve.label,
            curve.final_mean_loss()
        );
    }
    println!("results in {}", out.display());
    Ok(())
}
