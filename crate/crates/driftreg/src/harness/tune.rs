//! Grid search over learner parameters.

use std::collections::BTreeMap;

use super::parallel_indexed;
use crate::datagen::Stream;
use crate::error::{Error, Result};
use crate::learners::LearnerSpec;

/// Parameter name -> candidate values. Expansion is the cartesian product,
/// parameters in alphabetical order, values in listed order.
pub type ParamGrid = BTreeMap<String, Vec<f64>>;

/// All candidate specs generated by a grid over a base spec.
pub fn expand_grid(base: &LearnerSpec, grid: &ParamGrid) -> Result<Vec<LearnerSpec>> {
    if grid.is_empty() {
        return Err(Error::Config("empty tuning grid".into()));
    }
    let mut specs = vec![base.clone()];
    for (name, values) in grid {
        if values.is_empty() {
            return Err(Error::Config(format!("no candidate values for `{name}`")));
        }
        let mut next = Vec::with_capacity(specs.len() * values.len());
        for spec in &specs {
            for &v in values {
                let mut candidate = spec.clone();
                candidate.set_param(name, v)?;
                next.push(candidate);
            }
        }
        specs = next;
    }
    Ok(specs)
}

#[derive(Clone, Debug)]
pub struct TuneOutcome {
    pub best: LearnerSpec,
    pub best_loss: f64,
    /// Every candidate with its tuning loss, in expansion order.
    pub evaluated: Vec<(LearnerSpec, f64)>,
}

/// Evaluates every grid point on the tuning stream and returns the
/// candidate with minimal final cumulative loss. Ties keep the first
/// candidate in expansion order. Cartesian expansion can produce
/// parameter combinations that fail validation (for instance `b >= c`);
/// those score infinity and are never selected.
pub fn grid_tune(base: &LearnerSpec, grid: &ParamGrid, tuning: &Stream) -> Result<TuneOutcome> {
    let candidates = expand_grid(base, grid)?;
    let losses = parallel_indexed(candidates.len(), |i| {
        if let Err(Error::InvalidParameter { .. }) = candidates[i].build(tuning.dim()) {
            return Ok(f64::INFINITY);
        }
        Ok(super::run::run_experiment(&candidates[i], tuning)?.final_cum_loss())
    })?;
    let mut best = 0;
    for (i, loss) in losses.iter().enumerate() {
        if *loss < losses[best] {
            best = i;
        }
    }
    if losses[best].is_infinite() {
        return Err(Error::Config("no feasible candidate in tuning grid".into()));
    }
    Ok(TuneOutcome {
        best: candidates[best].clone(),
        best_loss: losses[best],
        evaluated: candidates.into_iter().zip(losses).collect(),
    })
}

/// Documented default grids, log-spaced over plausible ranges. These make
/// no claim of optimality; they are the starting point the CLI uses when no
/// grid file is given.
pub fn default_grid(algo: &str) -> ParamGrid {
    let mut g = ParamGrid::new();
    match algo {
        "nlms" => {
            g.insert("mu".into(), vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0]);
        }
        "rls" => {
            g.insert("r".into(), vec![0.9, 0.95, 0.99, 0.999, 1.0]);
        }
        "crrls" => {
            g.insert("r".into(), vec![0.99, 1.0]);
            g.insert("t0".into(), vec![50.0, 100.0, 200.0, 400.0, 800.0]);
        }
        "arowr" => {
            g.insert("r".into(), vec![0.25, 0.5, 1.0, 2.0]);
        }
        "aar" => {
            g.insert("b".into(), vec![0.1, 0.5, 1.0, 2.0]);
        }
        "arcor" => {
            g.insert("r".into(), vec![0.5, 1.0]);
            g.insert("rb".into(), vec![1.0, 2.0, 4.0]);
            g.insert("q".into(), vec![4.0 / 3.0, 2.0]);
        }
        "laser" => {
            g.insert("b".into(), vec![0.1, 1.0, 10.0, 100.0]);
            g.insert("c".into(), vec![1e2, 1e3, 1e4, 1e5, 1e6, 1e7]);
        }
        _ => {}
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{rotating_drift_stream, RotatingParams};

    #[test]
    fn expansion_order_is_alphabetical_then_listed() {
        let base = LearnerSpec::Crrls { r: 1.0, t0: None };
        let mut grid = ParamGrid::new();
        grid.insert("t0".into(), vec![10.0, 20.0]);
        grid.insert("r".into(), vec![0.9, 1.0]);
        let specs = expand_grid(&base, &grid).unwrap();
        // "r" sorts before "t0"
        assert_eq!(
            specs,
            vec![
                LearnerSpec::Crrls {
                    r: 0.9,
                    t0: Some(10)
                },
                LearnerSpec::Crrls {
                    r: 0.9,
                    t0: Some(20)
                },
                LearnerSpec::Crrls {
                    r: 1.0,
                    t0: Some(10)
                },
                LearnerSpec::Crrls {
                    r: 1.0,
                    t0: Some(20)
                },
            ]
        );
    }

    #[test]
    fn singleton_grid_returns_that_point() {
        let params = RotatingParams {
            t: 30,
            d: 4,
            pairs: 2,
            ..Default::default()
        };
        let (stream, _) = rotating_drift_stream(&params, 4).unwrap();
        let mut grid = ParamGrid::new();
        grid.insert("r".into(), vec![0.5]);
        let out = grid_tune(&LearnerSpec::Arowr { r: 1.0 }, &grid, &stream).unwrap();
        assert_eq!(out.best, LearnerSpec::Arowr { r: 0.5 });
        assert_eq!(out.evaluated.len(), 1);
    }

    #[test]
    fn duplicate_entries_tie_break_to_first() {
        let params = RotatingParams {
            t: 30,
            d: 4,
            pairs: 2,
            ..Default::default()
        };
        let (stream, _) = rotating_drift_stream(&params, 4).unwrap();
        let mut grid = ParamGrid::new();
        grid.insert("b".into(), vec![1.0, 1.0, 0.5]);
        let out = grid_tune(&LearnerSpec::Aar { b: 2.0 }, &grid, &stream).unwrap();
        // the two b=1.0 entries tie; the winner must be index 0 unless
        // b=0.5 strictly improves
        if (out.evaluated[0].1 - out.best_loss).abs() < 1e-15 {
            assert_eq!(out.best, out.evaluated[0].0);
        }
        assert!(grid_tune(&LearnerSpec::Aar { b: 2.0 }, &ParamGrid::new(), &stream).is_err());
    }

    #[test]
    fn known_optimum_dominates_on_stationary_noiseless_data() {
        // On noiseless stationary data a mild prior must beat a prior 1000x
        // stronger, which slows learning for no benefit.
        let params = RotatingParams {
            t: 400,
            d: 6,
            pairs: 3,
            drift_per_step: 0.0,
            noise_std: 0.0,
            sigma_major: 1.0,
            sigma_minor: 0.5,
            sigma_rest: 1.0,
        };
        let (stream, _) = rotating_drift_stream(&params, 11).unwrap();
        let mut grid = ParamGrid::new();
        grid.insert("b".into(), vec![500.0, 0.5]);
        let out = grid_tune(&LearnerSpec::Aar { b: 1.0 }, &grid, &stream).unwrap();
        assert_eq!(out.best, LearnerSpec::Aar { b: 0.5 });
    }
}
