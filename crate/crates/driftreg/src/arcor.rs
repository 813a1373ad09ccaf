//! Adaptive regularization with covariance reset.
//!
//! Extends the AROWR recursion with two corrections for drifting targets: a
//! data-dependent covariance reset against a decaying eigenvalue floor, and
//! a Mahalanobis projection of the weights onto a ball of radius `R_B`.

use serde::{Deserialize, Serialize};

use crate::consts::{BALL_CONSTRAINT_SLACK, PROJECTION_MAX_ITERS, PROJECTION_REL_TOL};
use crate::error::{Error, Result};
use crate::learners::{check_input, check_sample, OnlineLearner, Sample};
use crate::linalg::{add_scaled, dot, norm, SymMat};

/// Eigenvalue floor sequence `Lambda_1 >= Lambda_2 >= ...` with every value
/// in `(0, 1)`; the reset in segment `i` fires when the candidate
/// covariance drops below `Lambda_i I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LambdaSchedule {
    /// `Lambda_i = 1 / (i^{q-1} + 1)`. Requires `q >= 1` so the sequence is
    /// nonincreasing; `q = 1` is the constant floor 1/2.
    Polynomial { q: f64 },
    /// Explicit nonincreasing floor values.
    Explicit { values: Vec<f64> },
    /// Floor disabled: no reset ever fires (with an infinite radius this
    /// makes the learner coincide with AROWR).
    Zero,
}

impl Default for LambdaSchedule {
    fn default() -> Self {
        LambdaSchedule::Polynomial { q: 2.0 }
    }
}

impl LambdaSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            LambdaSchedule::Polynomial { q } => {
                if !(q.is_finite() && *q >= 1.0) {
                    return Err(Error::bad_param(
                        "q",
                        format!("polynomial floor needs finite q >= 1, got {q}"),
                    ));
                }
            }
            LambdaSchedule::Explicit { values } => {
                if values.is_empty() {
                    return Err(Error::bad_param("values", "explicit floor list is empty"));
                }
                for pair in values.windows(2) {
                    if pair[1] > pair[0] {
                        return Err(Error::bad_param("values", "floors must be nonincreasing"));
                    }
                }
                if values.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
                    return Err(Error::bad_param("values", "floors must lie in (0, 1)"));
                }
            }
            LambdaSchedule::Zero => {}
        }
        Ok(())
    }

    /// `Lambda_i` for segment `i >= 1`.
    pub fn value(&self, i: u64) -> Result<f64> {
        assert!(i >= 1, "segments are 1-based");
        match self {
            LambdaSchedule::Polynomial { q } => Ok(1.0 / ((i as f64).powf(q - 1.0) + 1.0)),
            LambdaSchedule::Explicit { values } => {
                values.get((i - 1) as usize).copied().ok_or_else(|| {
                    Error::bad_param(
                        "values",
                        format!(
                            "segment {i} exceeds explicit floor list of length {}",
                            values.len()
                        ),
                    )
                })
            }
            LambdaSchedule::Zero => Ok(0.0),
        }
    }

    pub fn label(&self) -> String {
        match self {
            LambdaSchedule::Polynomial { q } => format!("q={q}"),
            LambdaSchedule::Explicit { values } => format!("lambda=explicit[{}]", values.len()),
            LambdaSchedule::Zero => "lambda=zero".to_string(),
        }
    }
}

/// Drift-dependent exponent for the polynomial floor:
/// `q = 2 log T / (log T + log V1)` where `V1` is (an estimate of) the total
/// first-order drift.
///
/// Rejected inputs: `V1 <= 0` (no meaning), `V1 = 1` (the underlying
/// exponent `p = log T / log V1` is undefined; pass an explicit `q`
/// instead), and `T * V1 <= 1` (the formula's denominator is not positive).
pub fn choose_q(t: u64, v1: f64) -> Result<f64> {
    if t < 2 {
        return Err(Error::bad_param("t", "horizon must be at least 2"));
    }
    if !(v1 > 0.0) {
        return Err(Error::bad_param(
            "v1",
            format!("drift must be positive, got {v1}"),
        ));
    }
    if v1 == 1.0 {
        return Err(Error::bad_param(
            "v1",
            "drift of exactly 1 leaves q undefined; pass q explicitly",
        ));
    }
    let log_t = (t as f64).ln();
    let denom = log_t + v1.ln();
    if !(denom > 0.0) {
        return Err(Error::bad_param(
            "v1",
            format!("need T * V1 > 1 for a positive denominator, got T={t}, V1={v1}"),
        ));
    }
    Ok(2.0 * log_t / denom)
}

/// Candidate covariance `(Sigma_prev^{-1} + x x^T / r)^{-1}`, computed as a
/// rank-one downdate of `Sigma_prev`.
pub fn candidate_sigma(sigma_prev: &SymMat, x: &[f64], r: f64) -> Result<SymMat> {
    if !(r > 0.0) {
        return Err(Error::bad_param("r", format!("need r > 0, got {r}")));
    }
    if !sigma_prev.is_spd() {
        return Err(Error::NotPositiveDefinite { col: 0, pivot: 0.0 });
    }
    if x.len() != sigma_prev.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma_prev.dim(),
            got: x.len(),
        });
    }
    let k = sigma_prev.mul_vec(x);
    let chi = dot(x, &k);
    sigma_prev.rank_one_update(-1.0 / (r + chi), &k)
}

/// Applies the eigenvalue-floor test: keeps `sigma_tilde` when its smallest
/// eigenvalue clears `Lambda_i`, otherwise resets to the identity and
/// advances the segment.
pub fn reset_check(
    sigma_tilde: SymMat,
    schedule: &LambdaSchedule,
    segment: u64,
) -> Result<(SymMat, u64, bool)> {
    if matches!(schedule, LambdaSchedule::Zero) {
        return Ok((sigma_tilde, segment, false));
    }
    let floor = schedule.value(segment)?;
    if sigma_tilde.min_eigenvalue()? >= floor {
        Ok((sigma_tilde, segment, false))
    } else {
        let d = sigma_tilde.dim();
        Ok((SymMat::identity(d), segment + 1, true))
    }
}

/// Nearest point of the ball `||w|| <= radius` to `w_tilde` in the
/// Mahalanobis distance induced by `sigma^{-1}`.
///
/// Interior points come back unchanged with multiplier zero. Otherwise the
/// solution is `(I + alpha sigma)^{-1} w_tilde` for the unique positive
/// `alpha` that lands on the sphere, found by bisection in the eigenbasis
/// of `sigma` over the bracket `[0, (||w_tilde|| / radius - 1) / lambda_min]`,
/// which provably contains the root.
pub fn project_to_ball(w_tilde: &[f64], sigma: &SymMat, radius: f64) -> Result<(Vec<f64>, f64)> {
    if !(radius > 0.0) {
        return Err(Error::bad_param("radius", "must be positive"));
    }
    if w_tilde.len() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            got: w_tilde.len(),
        });
    }
    let w_norm = norm(w_tilde);
    if w_norm <= radius || radius.is_infinite() {
        return Ok((w_tilde.to_vec(), 0.0));
    }
    if !sigma.is_spd() {
        return Err(Error::NotPositiveDefinite { col: 0, pivot: 0.0 });
    }

    let eig = sigma.eig_sym()?;
    let u = eig.to_eigenbasis(w_tilde);
    let norm_at = |alpha: f64| -> f64 {
        u.iter()
            .zip(&eig.values)
            .map(|(ui, li)| {
                let s = ui / (1.0 + alpha * li);
                s * s
            })
            .sum::<f64>()
            .sqrt()
    };

    // norm_at decreases in alpha; keep `hi` on the feasible side so the
    // returned point never leaves the ball, and bisect until the feasible
    // norm is within tolerance of the sphere.
    let mut lo = 0.0;
    let mut hi = (w_norm / radius - 1.0) / eig.values[0];
    for _ in 0..PROJECTION_MAX_ITERS {
        if radius - norm_at(hi) <= PROJECTION_REL_TOL * radius {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if norm_at(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = hi;

    let shrunk: Vec<f64> = u
        .iter()
        .zip(&eig.values)
        .map(|(ui, li)| ui / (1.0 + alpha * li))
        .collect();
    Ok((eig.from_eigenbasis(&shrunk), alpha))
}

/// The ARCOR learner.
///
/// Step order: predict with `w_{t-1}`; form the candidate covariance; apply
/// the reset test to obtain `Sigma_t`; update the weights with the
/// *pre-reset* `Sigma_{t-1}`; project onto the radius-`R_B` ball under
/// `Sigma_t`. A `radius` of `None` disables the projection.
#[derive(Clone, Debug)]
pub struct Arcor {
    r: f64,
    radius: Option<f64>,
    schedule: LambdaSchedule,
    w: Vec<f64>,
    sigma: SymMat,
    segment: u64,
    t: u64,
    resets: Vec<u64>,
}

impl Arcor {
    pub fn new(d: usize, r: f64, radius: Option<f64>, schedule: LambdaSchedule) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::bad_param("r", format!("need r > 0, got {r}")));
        }
        if let Some(rb) = radius {
            if !(rb > 0.0) {
                return Err(Error::bad_param("rb", format!("need R_B > 0, got {rb}")));
            }
        }
        schedule.validate()?;
        Ok(Arcor {
            r,
            radius,
            schedule,
            w: vec![0.0; d],
            sigma: SymMat::identity(d),
            segment: 1,
            t: 0,
            resets: Vec::new(),
        })
    }

    /// Current segment index `i` (1-based, nondecreasing).
    pub fn segment_index(&self) -> u64 {
        self.segment
    }

    /// Eigenvalue floor in force for the current segment.
    pub fn current_floor(&self) -> Result<f64> {
        self.schedule.value(self.segment)
    }

    /// Lengths `T_i` of the completed segments plus the open one; these sum
    /// to the number of observed steps.
    pub fn segment_lengths(&self) -> Vec<u64> {
        let mut lengths = Vec::with_capacity(self.resets.len() + 1);
        let mut prev = 0;
        for &r in &self.resets {
            lengths.push(r - prev);
            prev = r;
        }
        if self.t > prev || lengths.is_empty() {
            lengths.push(self.t - prev);
        }
        lengths
    }
}

impl OnlineLearner for Arcor {
    fn dim(&self) -> usize {
        self.w.len()
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        check_input(self.dim(), x)?;
        Ok(dot(&self.w, x))
    }

    fn update(&mut self, sample: &Sample) -> Result<()> {
        check_sample(self.dim(), sample)?;
        let k = self.sigma.mul_vec(&sample.x);
        let chi = dot(&sample.x, &k);
        let denom = self.r + chi;

        let sigma_tilde = self.sigma.rank_one_update(-1.0 / denom, &k)?;
        let (sigma_next, segment, did_reset) =
            reset_check(sigma_tilde, &self.schedule, self.segment)?;

        let err = sample.y - dot(&self.w, &sample.x);
        let w_tilde = add_scaled(&self.w, err / denom, &k);

        self.w = match self.radius {
            Some(rb) => project_to_ball(&w_tilde, &sigma_next, rb)?.0,
            None => w_tilde,
        };
        self.sigma = sigma_next;
        self.segment = segment;
        self.t += 1;
        if did_reset {
            self.resets.push(self.t);
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.w.clone()
    }

    fn sigma(&self) -> Option<SymMat> {
        Some(self.sigma.clone())
    }

    fn steps(&self) -> u64 {
        self.t
    }

    fn resets(&self) -> &[u64] {
        &self.resets
    }
}

/// Invariant check used by tests and the experiment harness in debug runs:
/// the post-step state satisfies both the ball constraint and the
/// eigenvalue floor (up to the shared slack).
pub fn check_invariants(a: &Arcor) -> Result<()> {
    if let Some(rb) = a.radius {
        let n = norm(&a.w);
        if n > rb + BALL_CONSTRAINT_SLACK {
            return Err(Error::bad_param("rb", format!("||w|| = {n} exceeds {rb}")));
        }
    }
    if !matches!(a.schedule, LambdaSchedule::Zero) {
        let floor = a.current_floor()?;
        let min = a.sigma.min_eigenvalue()?;
        if min < floor - crate::consts::EIGENFLOOR_SLACK {
            return Err(Error::bad_param(
                "lambda",
                format!("lambda_min = {min} fell below floor {floor}"),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::Rng;
    use crate::learners::Arowr;

    fn sample(x: Vec<f64>, y: f64) -> Sample {
        Sample::new(x, y).unwrap()
    }

    #[test]
    fn lambda_schedule_values() {
        let poly = LambdaSchedule::Polynomial { q: 2.0 };
        assert_eq!(poly.value(1).unwrap(), 0.5);
        assert_eq!(poly.value(3).unwrap(), 0.25);
        let flat = LambdaSchedule::Polynomial { q: 1.0 };
        for i in [1, 5, 100] {
            assert_eq!(flat.value(i).unwrap(), 0.5);
        }
        let explicit = LambdaSchedule::Explicit {
            values: vec![0.5, 0.25],
        };
        assert_eq!(explicit.value(2).unwrap(), 0.25);
        assert!(explicit.value(3).is_err());
    }

    #[test]
    fn lambda_schedule_validation() {
        assert!(LambdaSchedule::Polynomial { q: 0.5 }.validate().is_err());
        assert!(LambdaSchedule::Explicit { values: vec![] }
            .validate()
            .is_err());
        assert!(LambdaSchedule::Explicit {
            values: vec![0.2, 0.3]
        }
        .validate()
        .is_err());
        assert!(LambdaSchedule::Explicit {
            values: vec![1.0, 0.5]
        }
        .validate()
        .is_err());
        assert!(LambdaSchedule::Explicit {
            values: vec![0.9, 0.5, 0.5]
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn choose_q_cases() {
        // log T = 4 log 10, log V1 = 2 log 10
        assert!((choose_q(10_000, 100.0).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        // V1 = T gives q = 1
        assert!((choose_q(500, 500.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(choose_q(100, 1.0).is_err());
        assert!(choose_q(100, 0.0).is_err());
        assert!(choose_q(100, -2.0).is_err());
        // T * V1 < 1 makes the denominator negative
        assert!(choose_q(100, 0.005).is_err());
        assert!(choose_q(100, 0.001).is_err());
    }

    #[test]
    fn candidate_sigma_hand_cases() {
        let s1 = SymMat::identity(1);
        assert!((candidate_sigma(&s1, &[1.0], 1.0).unwrap().get(0, 0) - 0.5).abs() < 1e-15);
        assert!((candidate_sigma(&s1, &[1.0], 0.5).unwrap().get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(candidate_sigma(&s1, &[0.0], 1.0).unwrap(), s1);
        assert!(candidate_sigma(&SymMat::from_diag(&[-1.0]), &[1.0], 1.0).is_err());
    }

    #[test]
    fn reset_check_hand_cases() {
        let sched = LambdaSchedule::Explicit {
            values: vec![0.6, 0.4],
        };
        let (s, i, reset) = reset_check(SymMat::from_diag(&[0.5]), &sched, 1).unwrap();
        assert!(reset);
        assert_eq!(i, 2);
        assert_eq!(s, SymMat::identity(1));

        let (s, i, reset) = reset_check(SymMat::from_diag(&[0.5]), &sched, 2).unwrap();
        assert!(!reset);
        assert_eq!(i, 2);
        assert_eq!(s, SymMat::from_diag(&[0.5]));

        // identity dominates any floor below one
        let (_, _, reset) = reset_check(SymMat::identity(3), &sched, 1).unwrap();
        assert!(!reset);
    }

    #[test]
    fn projection_isotropic_interior_and_frozen_case() {
        let i2 = SymMat::identity(2);
        let (w, alpha) = project_to_ball(&[2.0, 0.0], &i2, 1.0).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-9 && w[1].abs() < 1e-12);
        assert!(alpha > 0.0);

        let (w, alpha) = project_to_ball(&[0.3, 0.1], &i2, 1.0).unwrap();
        assert_eq!(w, vec![0.3, 0.1]);
        assert_eq!(alpha, 0.0);

        // frozen value cross-checked against the polar-grid oracle
        let sigma = SymMat::from_diag(&[4.0, 1.0]);
        let (w, alpha) = project_to_ball(&[2.0, 2.0], &sigma, 1.0).unwrap();
        assert!((w[0] - 0.359).abs() < 1e-3, "w0 = {}", w[0]);
        assert!((w[1] - 0.933).abs() < 1e-3, "w1 = {}", w[1]);
        assert!((alpha - 1.142).abs() < 2e-3, "alpha = {alpha}");
        assert!((norm(&w) - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn step_composition_hand_case() {
        // candidate kept, weights projected onto the 0.4 ball
        let mut a = Arcor::new(
            1,
            1.0,
            Some(0.4),
            LambdaSchedule::Explicit { values: vec![0.1] },
        )
        .unwrap();
        let yhat = a.step(&sample(vec![1.0], 1.0)).unwrap();
        assert_eq!(yhat, 0.0);
        assert!((a.sigma().unwrap().get(0, 0) - 0.5).abs() < 1e-12);
        assert!((a.weights()[0] - 0.4).abs() < 1e-9);
        assert!(a.resets().is_empty());
    }

    #[test]
    fn reduces_to_arowr_with_floor_and_radius_disabled() {
        let mut rng = Rng::seed_from(70);
        let d = 4;
        let mut arcor = Arcor::new(d, 0.8, None, LambdaSchedule::Zero).unwrap();
        let mut arowr = Arowr::new(d, 0.8).unwrap();
        for _ in 0..80 {
            let x: Vec<f64> = (0..d).map(|_| rng.next_gaussian()).collect();
            let s = sample(x, rng.next_gaussian());
            let ya = arcor.step(&s).unwrap();
            let yb = arowr.step(&s).unwrap();
            assert!((ya - yb).abs() <= 1e-12);
        }
        let dw: f64 = arcor
            .weights()
            .iter()
            .zip(arowr.weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(dw <= 1e-12);
    }

    #[test]
    fn invariants_hold_on_random_runs() {
        let mut rng = Rng::seed_from(71);
        let d = 3;
        let mut a = Arcor::new(d, 0.05, Some(1.5), LambdaSchedule::Polynomial { q: 2.0 }).unwrap();
        let mut prev_segment = 1;
        for _ in 0..300 {
            let x: Vec<f64> = (0..d).map(|_| rng.next_gaussian() * 0.5).collect();
            let y = 2.0 * x[0] - x[1] + 0.1 * rng.next_gaussian();
            a.step(&sample(x, y)).unwrap();
            check_invariants(&a).unwrap();
            assert!(a.segment_index() >= prev_segment);
            prev_segment = a.segment_index();
        }
        assert!(
            !a.resets().is_empty(),
            "small r on a long run should trigger at least one reset"
        );
        let total: u64 = a.segment_lengths().iter().sum();
        assert_eq!(total, a.steps());
        // the open segment is only counted once it contains a step
        let n_segments = a.segment_lengths().len() as u64;
        assert!(n_segments == a.segment_index() || n_segments + 1 == a.segment_index());
    }
}
