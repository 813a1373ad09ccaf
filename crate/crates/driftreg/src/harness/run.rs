//! Experiment execution: the online protocol, replication, and regret.

use super::{parallel_indexed, DatasetSpec};
use crate::consts::RIDGE_UNREG_EPS;
use crate::datagen::{child_seed, ComparatorSeq, Stream};
use crate::error::{Error, Result};
use crate::learners::{LearnerSpec, OnlineLearner};
use crate::linalg::dot;
use crate::oracles::batch_ridge;

/// One step of a run: prediction made before the label was revealed, the
/// label, and the squared loss.
#[derive(Clone, Copy, Debug)]
pub struct StepRecord {
    pub t: u64,
    pub yhat: f64,
    pub y: f64,
    pub loss: f64,
    pub cum_loss: f64,
}

/// Per-step record of one learner over one stream.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub label: String,
    pub steps: Vec<StepRecord>,
    pub resets: Vec<u64>,
    pub max_input_norm: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_cum_loss(&self) -> f64 {
        self.steps.last().map(|s| s.cum_loss).unwrap_or(0.0)
    }

    /// Cumulative loss after the first `t` steps (1-based).
    pub fn cum_loss_at(&self, t: usize) -> f64 {
        assert!(t >= 1 && t <= self.steps.len());
        self.steps[t - 1].cum_loss
    }

    pub fn predictions(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.yhat).collect()
    }
}

/// Drives a learner over a stream under the strict online protocol: the
/// prediction for `x_t` is recorded before the learner sees `y_t`.
/// Non-finite predictions abort with the offending step index.
pub fn run_stream(learner: &mut dyn OnlineLearner, stream: &Stream) -> Result<Trajectory> {
    if learner.dim() != stream.dim() {
        return Err(Error::DimensionMismatch {
            expected: learner.dim(),
            got: stream.dim(),
        });
    }
    let mut steps = Vec::with_capacity(stream.len());
    let mut cum = 0.0;
    for (i, sample) in stream.samples.iter().enumerate() {
        let t = i as u64 + 1;
        let step_err = |e: Error| match e {
            Error::NonFinite { .. } => Error::NonFinite { step: Some(t) },
            other => other,
        };
        let yhat = learner.predict(&sample.x).map_err(step_err)?;
        if !yhat.is_finite() {
            return Err(Error::NonFinite { step: Some(t) });
        }
        learner.update(sample).map_err(step_err)?;
        let loss = (yhat - sample.y) * (yhat - sample.y);
        cum += loss;
        steps.push(StepRecord {
            t,
            yhat,
            y: sample.y,
            loss,
            cum_loss: cum,
        });
    }
    Ok(Trajectory {
        label: String::new(),
        steps,
        resets: learner.resets().to_vec(),
        max_input_norm: stream.max_input_norm(),
    })
}

/// Builds the learner described by `spec` and runs it over the stream.
pub fn run_experiment(spec: &LearnerSpec, stream: &Stream) -> Result<Trajectory> {
    let mut learner = spec.build(stream.dim())?;
    let mut traj = run_stream(learner.as_mut(), stream)?;
    traj.label = spec.label();
    Ok(traj)
}

/// Pointwise mean over replicated runs.
#[derive(Clone, Debug)]
pub struct MeanCurve {
    pub label: String,
    pub spec: LearnerSpec,
    pub seeds: Vec<u64>,
    /// Mean instantaneous loss at each step, averaged in fixed replica
    /// order so the result is independent of scheduling.
    pub mean_loss: Vec<f64>,
    pub mean_cum_loss: Vec<f64>,
    pub per_replica_final: Vec<f64>,
    pub max_input_norm: f64,
}

impl MeanCurve {
    pub fn final_mean_loss(&self) -> f64 {
        self.mean_cum_loss.last().copied().unwrap_or(0.0)
    }

    pub fn from_single(traj: &Trajectory, spec: &LearnerSpec, seed: Option<u64>) -> MeanCurve {
        MeanCurve {
            label: traj.label.clone(),
            spec: spec.clone(),
            seeds: seed.into_iter().collect(),
            mean_loss: traj.steps.iter().map(|s| s.loss).collect(),
            mean_cum_loss: traj.steps.iter().map(|s| s.cum_loss).collect(),
            per_replica_final: vec![traj.final_cum_loss()],
            max_input_norm: traj.max_input_norm,
        }
    }
}

/// Runs `reps` replicas of the dataset with derived seeds and returns the
/// pointwise mean loss curve. Replicas execute in parallel; aggregation
/// always sums in replica order.
pub fn replicate_mean(
    spec: &LearnerSpec,
    dataset: &DatasetSpec,
    reps: u64,
    base_seed: u64,
) -> Result<MeanCurve> {
    if reps < 1 {
        return Err(Error::Config("need at least one replica".into()));
    }
    let seeds: Vec<u64> = (0..reps).map(|i| child_seed(base_seed, i)).collect();
    let runs = parallel_indexed(reps as usize, |i| {
        let (stream, _) = dataset.generate(seeds[i])?;
        run_experiment(spec, &stream)
    })?;

    let len = runs[0].len();
    for r in &runs {
        if r.len() != len {
            return Err(Error::Data("replicas produced different lengths".into()));
        }
    }
    let mut mean_loss = vec![0.0; len];
    for r in &runs {
        for (acc, s) in mean_loss.iter_mut().zip(&r.steps) {
            *acc += s.loss;
        }
    }
    for v in &mut mean_loss {
        *v /= reps as f64;
    }
    let mut mean_cum_loss = Vec::with_capacity(len);
    let mut cum = 0.0;
    for v in &mean_loss {
        cum += v;
        mean_cum_loss.push(cum);
    }
    Ok(MeanCurve {
        label: spec.label(),
        spec: spec.clone(),
        seeds,
        mean_loss,
        mean_cum_loss,
        per_replica_final: runs.iter().map(|r| r.final_cum_loss()).collect(),
        max_input_norm: runs.iter().map(|r| r.max_input_norm).fold(0.0, f64::max),
    })
}

/// Convenience wrapper for fixed streams: a single run packaged as a curve.
pub fn single_run_curve(spec: &LearnerSpec, stream: &Stream) -> Result<MeanCurve> {
    let traj = run_experiment(spec, stream)?;
    Ok(MeanCurve::from_single(&traj, spec, stream.meta.seed))
}

/// `L_T(alg) - sum_t (u_t . x_t - y_t)^2` against an arbitrary comparator
/// sequence.
pub fn compute_regret(
    traj: &Trajectory,
    comparator: &ComparatorSeq,
    stream: &Stream,
) -> Result<f64> {
    if traj.len() != stream.len() || comparator.len() != stream.len() {
        return Err(Error::DimensionMismatch {
            expected: stream.len(),
            got: traj.len().min(comparator.len()),
        });
    }
    let mut comp_loss = 0.0;
    for (u, s) in comparator.u.iter().zip(&stream.samples) {
        if u.len() != s.x.len() {
            return Err(Error::DimensionMismatch {
                expected: s.x.len(),
                got: u.len(),
            });
        }
        let e = dot(u, &s.x) - s.y;
        comp_loss += e * e;
    }
    Ok(traj.final_cum_loss() - comp_loss)
}

/// Regret against the best fixed weight vector, with the unregularized
/// infimum approximated by ridge at a vanishing regularizer.
pub fn fixed_comparator_regret(traj: &Trajectory, stream: &Stream) -> Result<f64> {
    let best = batch_ridge(&stream.samples, 1.0, RIDGE_UNREG_EPS)?;
    let comparator = ComparatorSeq::constant(best, stream.len());
    compute_regret(traj, &comparator, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{rotating_drift_stream, RotatingParams, StreamMeta};
    use crate::learners::Sample;
    use crate::linalg::SymMat;
    use std::sync::Mutex;

    fn tiny_stream(samples: Vec<Sample>) -> Stream {
        Stream::new(
            samples,
            StreamMeta {
                generator: "test".into(),
                seed: None,
                x_bound: None,
                y_bound: None,
            },
        )
        .unwrap()
    }

    /// Records the interleaving of predict and update calls.
    struct SpyLearner {
        d: usize,
        log: Mutex<Vec<&'static str>>,
    }

    impl OnlineLearner for SpyLearner {
        fn dim(&self) -> usize {
            self.d
        }
        fn predict(&self, _x: &[f64]) -> Result<f64> {
            self.log.lock().unwrap().push("predict");
            Ok(0.0)
        }
        fn update(&mut self, _sample: &Sample) -> Result<()> {
            self.log.lock().unwrap().push("update");
            Ok(())
        }
        fn weights(&self) -> Vec<f64> {
            vec![0.0; self.d]
        }
        fn sigma(&self) -> Option<SymMat> {
            None
        }
        fn steps(&self) -> u64 {
            0
        }
    }

    #[test]
    fn runner_never_updates_before_predicting() {
        let stream = tiny_stream(vec![
            Sample::new(vec![1.0], 1.0).unwrap(),
            Sample::new(vec![2.0], 0.5).unwrap(),
            Sample::new(vec![-1.0], 0.0).unwrap(),
        ]);
        let mut spy = SpyLearner {
            d: 1,
            log: Mutex::new(Vec::new()),
        };
        run_stream(&mut spy, &stream).unwrap();
        assert_eq!(
            *spy.log.lock().unwrap(),
            vec!["predict", "update", "predict", "update", "predict", "update"]
        );
    }

    #[test]
    fn first_loss_is_label_squared() {
        let stream = tiny_stream(vec![Sample::new(vec![1.0, 0.0], 3.0).unwrap()]);
        for algo in ["nlms", "rls", "crrls", "arowr", "aar", "arcor", "laser"] {
            let spec = LearnerSpec::from_params(algo, &Default::default()).unwrap();
            let traj = run_experiment(&spec, &stream).unwrap();
            assert_eq!(traj.final_cum_loss(), 9.0, "{algo}");
        }
    }

    #[test]
    fn zero_label_stream_keeps_zero_loss() {
        let stream = tiny_stream(
            (0..10)
                .map(|i| Sample::new(vec![(i as f64).sin(), 1.0], 0.0).unwrap())
                .collect(),
        );
        let traj = run_experiment(&LearnerSpec::Rls { r: 1.0 }, &stream).unwrap();
        assert_eq!(traj.final_cum_loss(), 0.0);
    }

    #[test]
    fn cumulative_loss_is_exact_prefix_sum() {
        let params = RotatingParams {
            t: 64,
            d: 6,
            pairs: 3,
            ..Default::default()
        };
        let (stream, _) = rotating_drift_stream(&params, 12).unwrap();
        let traj = run_experiment(&LearnerSpec::Aar { b: 1.0 }, &stream).unwrap();
        let mut cum = 0.0;
        for s in &traj.steps {
            cum += s.loss;
            assert_eq!(s.cum_loss, cum);
        }
    }

    #[test]
    fn replicate_mean_single_replica_matches_run() {
        let dataset = DatasetSpec::Rotating(RotatingParams {
            t: 32,
            d: 4,
            pairs: 2,
            ..Default::default()
        });
        let spec = LearnerSpec::Arowr { r: 1.0 };
        let curve = replicate_mean(&spec, &dataset, 1, 99).unwrap();
        let (stream, _) = dataset.generate(child_seed(99, 0)).unwrap();
        let traj = run_experiment(&spec, &stream).unwrap();
        assert_eq!(curve.final_mean_loss(), traj.final_cum_loss());
        assert_eq!(curve.per_replica_final, vec![traj.final_cum_loss()]);
    }

    #[test]
    fn mean_is_symmetric_over_the_replica_multiset() {
        // Assigning the same seeds to replicas in a different order sums
        // the same multiset of curves; fixed-order aggregation then agrees
        // up to floating-point association.
        let dataset = DatasetSpec::Rotating(RotatingParams {
            t: 30,
            d: 4,
            pairs: 2,
            ..Default::default()
        });
        let spec = LearnerSpec::Aar { b: 1.0 };
        let seeds: Vec<u64> = (0..5).map(|i| child_seed(3, i)).collect();
        let finals: Vec<f64> = seeds
            .iter()
            .map(|s| {
                let (stream, _) = dataset.generate(*s).unwrap();
                run_experiment(&spec, &stream).unwrap().final_cum_loss()
            })
            .collect();
        let forward: f64 = finals.iter().sum::<f64>() / finals.len() as f64;
        let reversed: f64 = finals.iter().rev().sum::<f64>() / finals.len() as f64;
        assert!((forward - reversed).abs() <= 1e-12 * forward.abs().max(1.0));
    }

    #[test]
    fn replicate_mean_is_deterministic() {
        let dataset = DatasetSpec::Rotating(RotatingParams {
            t: 40,
            d: 4,
            pairs: 2,
            ..Default::default()
        });
        let spec = LearnerSpec::Laser {
            b: 0.5,
            c: Some(50.0),
            y_bound: None,
        };
        let a = replicate_mean(&spec, &dataset, 6, 5).unwrap();
        let b = replicate_mean(&spec, &dataset, 6, 5).unwrap();
        assert_eq!(a.mean_cum_loss, b.mean_cum_loss);
        assert_eq!(a.seeds, b.seeds);
    }

    #[test]
    fn regret_identities() {
        let params = RotatingParams {
            t: 50,
            d: 4,
            pairs: 2,
            noise_std: 0.0,
            ..Default::default()
        };
        let (stream, comp) = rotating_drift_stream(&params, 8).unwrap();
        let traj = run_experiment(&LearnerSpec::Rls { r: 1.0 }, &stream).unwrap();
        // noiseless labels generated by the comparator: its loss is zero
        let regret = compute_regret(&traj, &comp, &stream).unwrap();
        assert!((regret - traj.final_cum_loss()).abs() <= 1e-9);

        // a trajectory equal to the comparator's predictions has zero regret
        let mut perfect = traj.clone();
        let mut cum = 0.0;
        for (s, sample) in perfect.steps.iter_mut().zip(&stream.samples) {
            s.yhat = sample.y;
            s.loss = 0.0;
            cum += s.loss;
            s.cum_loss = cum;
        }
        let zero = compute_regret(&perfect, &comp, &stream).unwrap();
        assert!(zero.abs() <= 1e-12);

        // double-loop reference on a random case
        let manual: f64 = comp
            .u
            .iter()
            .zip(&stream.samples)
            .map(|(u, s)| {
                let e = dot(u, &s.x) - s.y;
                e * e
            })
            .sum();
        assert!(
            (compute_regret(&traj, &comp, &stream).unwrap() - (traj.final_cum_loss() - manual))
                .abs()
                <= 1e-12
        );
    }
}
