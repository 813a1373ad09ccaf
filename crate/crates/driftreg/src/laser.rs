//! Last-step adaptive regressor.
//!
//! On every round the predictor is min-max optimal for the drift-penalized
//! regret, assuming the current round is the last. The state is the
//! evidence pair `(D_t, e_t)` of the quadratic value function
//!
//! ```text
//! P_t(u) = u^T D_t u - 2 u^T e_t + f_t
//! D_t = (D_{t-1}^{-1} + I/c)^{-1} + x_t x_t^T        D_0 = bc/(c-b) I
//! e_t = (I + D_{t-1}/c)^{-1} e_{t-1} + y_t x_t       e_0 = 0
//! f_t = f_{t-1} - e_{t-1}^T (cI + D_{t-1})^{-1} e_{t-1} + y_t^2
//! ```
//!
//! and the prediction for `x_t` is `x_t^T D_t^{-1} (I + D_{t-1}/c)^{-1}
//! e_{t-1}`, optionally clipped to a configured label bound. `c = inf` is an
//! exact mode: the interpolation terms vanish and the learner coincides with
//! AAR step for step.

use crate::error::{Error, Result};
use crate::learners::{check_input, check_sample, OnlineLearner, Sample};
use crate::linalg::{add_scaled, clip, dot, SymMat};

#[derive(Clone, Debug)]
pub struct Laser {
    b: f64,
    c: f64, // may be +inf
    y_bound: Option<f64>,
    d_mat: SymMat,
    e: Vec<f64>,
    f: Option<f64>,
    t: u64,
}

impl Laser {
    pub fn new(dim: usize, b: f64, c: Option<f64>, y_bound: Option<f64>) -> Result<Self> {
        let c = c.unwrap_or(f64::INFINITY);
        if !(b > 0.0) {
            return Err(Error::bad_param("b", format!("need b > 0, got {b}")));
        }
        if !(c > b) {
            return Err(Error::bad_param(
                "c",
                format!("need c > b, got c={c}, b={b}"),
            ));
        }
        if let Some(y) = y_bound {
            if !(y > 0.0) {
                return Err(Error::bad_param("y", format!("need Y > 0, got {y}")));
            }
        }
        let d0 = if c.is_finite() {
            // Sigma_0 = (c - b)/(bc) I, and D is its inverse
            SymMat::scaled_identity(dim, b * c / (c - b))
        } else {
            SymMat::scaled_identity(dim, b)
        };
        Ok(Laser {
            b,
            c,
            y_bound,
            d_mat: d0,
            e: vec![0.0; dim],
            f: None,
            t: 0,
        })
    }

    /// Turns on tracking of the value-function offset `f_t`. Only needed to
    /// audit the recursion against the brute-force minimum; predictions
    /// never use it. Must be enabled before the first update.
    pub fn track_offset(mut self) -> Self {
        assert_eq!(self.t, 0, "offset tracking must start from a fresh state");
        self.f = Some(0.0);
        self
    }

    /// `(I + D_{t-1}/c)^{-1}`, the smoothing operator applied to the
    /// evidence each round; the identity when `c = inf`.
    fn d_prime(&self) -> Result<Option<SymMat>> {
        if self.c.is_infinite() {
            return Ok(None);
        }
        let m = self.d_mat.scale(1.0 / self.c).add_scaled_identity(1.0);
        Ok(Some(m.spd_inverse()?))
    }

    /// `(D_{t-1}^{-1} + I/c)^{-1} = D' D_{t-1}`, the interpolated evidence
    /// matrix before the new outer product is added.
    fn interpolated(&self, d_prime: Option<&SymMat>) -> Result<SymMat> {
        match d_prime {
            None => Ok(self.d_mat.clone()),
            Some(dp) => dp.mul_sym(&self.d_mat),
        }
    }

    /// Evidence matrix `D_t`.
    pub fn d_matrix(&self) -> &SymMat {
        &self.d_mat
    }

    /// Evidence vector `e_t`.
    pub fn evidence(&self) -> &[f64] {
        &self.e
    }

    /// Drift-coupling constant `c` (`+inf` in the exact AAR mode).
    pub fn coupling(&self) -> f64 {
        self.c
    }

    /// Initial regularizer `b`.
    pub fn regularizer(&self) -> f64 {
        self.b
    }

    /// Value-function offset `f_t`, when tracking is enabled.
    pub fn offset(&self) -> Option<f64> {
        self.f
    }

    /// Minimum of the drift-penalized quadratic through the current state:
    /// `-e_t^T D_t^{-1} e_t + f_t`. Requires offset tracking.
    pub fn value_minimum(&self) -> Result<f64> {
        let f = self
            .f
            .ok_or_else(|| Error::bad_param("f", "offset tracking is not enabled"))?;
        let solved = self.d_mat.spd_solve(&self.e)?;
        Ok(f - dot(&self.e, &solved))
    }

    fn raw_predict(&self, x: &[f64]) -> Result<f64> {
        let dp = self.d_prime()?;
        let interp = self.interpolated(dp.as_ref())?;
        let d_next = interp.rank_one_update(1.0, x)?;
        let smoothed_e = match &dp {
            None => self.e.clone(),
            Some(dp) => dp.mul_vec(&self.e),
        };
        let m = d_next.spd_solve(&smoothed_e)?;
        Ok(dot(x, &m))
    }
}

impl OnlineLearner for Laser {
    fn dim(&self) -> usize {
        self.e.len()
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        check_input(self.dim(), x)?;
        let yhat = self.raw_predict(x)?;
        Ok(match self.y_bound {
            Some(y) => clip(yhat, y),
            None => yhat,
        })
    }

    fn update(&mut self, sample: &Sample) -> Result<()> {
        check_sample(self.dim(), sample)?;
        let dp = self.d_prime()?;
        let interp = self.interpolated(dp.as_ref())?;
        let d_next = interp.rank_one_update(1.0, &sample.x)?;
        let smoothed_e = match &dp {
            None => self.e.clone(),
            Some(dp) => dp.mul_vec(&self.e),
        };
        if let Some(f) = self.f.as_mut() {
            // (cI + D)^{-1} = D'/c
            let shrink = match &dp {
                None => 0.0,
                Some(_) => dot(&self.e, &smoothed_e) / self.c,
            };
            *f += sample.y * sample.y - shrink;
        }
        self.e = add_scaled(&smoothed_e, sample.y, &sample.x);
        self.d_mat = d_next;
        self.t += 1;
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.d_mat
            .spd_solve(&self.e)
            .expect("evidence matrix is SPD")
    }

    fn sigma(&self) -> Option<SymMat> {
        Some(self.d_mat.spd_inverse().expect("evidence matrix is SPD"))
    }

    fn steps(&self) -> u64 {
        self.t
    }
}

/// Result of the drift-aware tuning rules for `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TunedC {
    pub c: f64,
    /// Whether the drift level satisfies the premise of the rule used.
    pub applicable: bool,
}

fn check_positive(vals: &[(&'static str, f64)]) -> Result<()> {
    for (name, v) in vals {
        if !(*v > 0.0) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must be positive, got {v}"),
            });
        }
    }
    Ok(())
}

/// Low-drift setting of `c`: `(sqrt(2) T Y^2 d X / V2)^{2/3}`.
///
/// Applicability requires `V2 <= T sqrt(2) Y^2 d X / mu^{3/2}` with
/// `mu = max{(9/8) X^2, (b + X^2)^2 / (8 X^2)}`.
pub fn tune_c_low_drift(t: u64, y: f64, d: usize, x: f64, b: f64, v2: f64) -> Result<TunedC> {
    check_positive(&[
        ("t", t as f64),
        ("y", y),
        ("d", d as f64),
        ("x", x),
        ("b", b),
        ("v2", v2),
    ])?;
    let base = std::f64::consts::SQRT_2 * t as f64 * y * y * d as f64 * x;
    let c = (base / v2).powf(2.0 / 3.0);
    let mu = (9.0 / 8.0 * x * x).max((b + x * x).powi(2) / (8.0 * x * x));
    Ok(TunedC {
        c,
        applicable: v2 <= base / mu.powf(1.5),
    })
}

/// High-drift setting of `c`: `sqrt(Y^2 d M T / V2)` with
/// `M = max{3 X^2, b + X^2}`. The corresponding guarantee is linear in `T`;
/// this rule is the fallback when the low-drift premise fails.
pub fn tune_c_high_drift(t: u64, y: f64, d: usize, x: f64, b: f64, v2: f64) -> Result<f64> {
    check_positive(&[
        ("t", t as f64),
        ("y", y),
        ("d", d as f64),
        ("x", x),
        ("b", b),
        ("v2", v2),
    ])?;
    let m = (3.0 * x * x).max(b + x * x);
    Ok((y * y * d as f64 * m * t as f64 / v2).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::Rng;
    use crate::learners::Aar;

    fn sample(x: Vec<f64>, y: f64) -> Sample {
        Sample::new(x, y).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Laser::new(2, 0.0, Some(1.0), None).is_err());
        assert!(Laser::new(2, 1.0, Some(0.5), None).is_err());
        assert!(Laser::new(2, 1.0, Some(1.0), None).is_err());
        assert!(Laser::new(2, 1.0, None, Some(0.0)).is_err());
        assert!(Laser::new(2, 1.0, None, None).is_ok());
    }

    #[test]
    fn first_prediction_is_zero() {
        let l = Laser::new(3, 0.5, Some(2.0), None).unwrap();
        assert_eq!(l.predict(&[1.0, -2.0, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn scalar_hand_recursion_finite_c() {
        // b = 0.5, c = 1: D_0 = 1; after (1,1): D_1 = 1.5, e_1 = 1
        let mut l = Laser::new(1, 0.5, Some(1.0), None).unwrap().track_offset();
        let y1 = l.step(&sample(vec![1.0], 1.0)).unwrap();
        assert_eq!(y1, 0.0);
        assert!((l.d_matrix().get(0, 0) - 1.5).abs() < 1e-12);
        assert!((l.evidence()[0] - 1.0).abs() < 1e-12);

        // prediction uses D_2 = 1.6 and D'_1 = 0.4
        let yhat = l.predict(&[1.0]).unwrap();
        assert!((yhat - 0.25).abs() < 1e-12, "yhat = {yhat}");

        let y2 = l.step(&sample(vec![1.0], 1.0)).unwrap();
        assert!((y2 - 0.25).abs() < 1e-12);
        assert!((l.d_matrix().get(0, 0) - 1.6).abs() < 1e-12);
        assert!((l.evidence()[0] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn scalar_hand_recursion_infinite_c() {
        let mut l = Laser::new(1, 1.0, None, None).unwrap().track_offset();
        l.update(&sample(vec![1.0], 1.0)).unwrap();
        assert!((l.d_matrix().get(0, 0) - 2.0).abs() < 1e-15);
        assert!((l.evidence()[0] - 1.0).abs() < 1e-15);
        assert!((l.offset().unwrap() - 1.0).abs() < 1e-15);
        // equals the AAR prediction 1/3
        assert!((l.predict(&[1.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);

        // zero sample at c = inf changes nothing
        l.update(&sample(vec![0.0], 0.0)).unwrap();
        assert!((l.d_matrix().get(0, 0) - 2.0).abs() < 1e-15);
        assert!((l.evidence()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn infinite_c_matches_aar_per_step() {
        let mut rng = Rng::seed_from(80);
        let d = 4;
        let b = 0.7;
        let mut laser = Laser::new(d, b, None, None).unwrap();
        let mut aar = Aar::new(d, b).unwrap();
        for _ in 0..60 {
            let x: Vec<f64> = (0..d).map(|_| rng.next_gaussian()).collect();
            let s = sample(x, rng.next_gaussian());
            let yl = laser.step(&s).unwrap();
            let ya = aar.step(&s).unwrap();
            assert!((yl - ya).abs() <= 1e-12, "diff {}", (yl - ya).abs());
        }
    }

    #[test]
    fn prediction_forms_are_woodbury_equivalent() {
        // evidence form vs the shrinkage form through the (w, Sigma) view:
        // yhat = x^T w / (1 + x^T (Sigma + I/c) x)
        let mut rng = Rng::seed_from(81);
        let d = 3;
        let c = 5.0;
        let mut l = Laser::new(d, 0.5, Some(c), None).unwrap();
        for _ in 0..40 {
            let x: Vec<f64> = (0..d).map(|_| rng.next_gaussian()).collect();
            let s = sample(x.clone(), rng.next_gaussian());
            let w = l.weights();
            let sigma = l.sigma().unwrap();
            let denom = 1.0 + sigma.add_scaled_identity(1.0 / c).quad_form(&x).unwrap();
            let shrunk = dot(&w, &x) / denom;
            let direct = l.predict(&x).unwrap();
            assert!(
                (direct - shrunk).abs() <= 1e-9,
                "diff {}",
                (direct - shrunk).abs()
            );
            l.update(&s).unwrap();
        }
    }

    #[test]
    fn clipping_applies_when_bound_configured() {
        let mut free = Laser::new(1, 0.5, Some(1.0), None).unwrap();
        let mut clipped = Laser::new(1, 0.5, Some(1.0), Some(0.1)).unwrap();
        for _ in 0..5 {
            free.update(&sample(vec![1.0], 3.0)).unwrap();
            clipped.update(&sample(vec![1.0], 3.0)).unwrap();
        }
        let raw = free.predict(&[1.0]).unwrap();
        assert!(raw > 0.1);
        assert_eq!(clipped.predict(&[1.0]).unwrap(), 0.1);
    }

    #[test]
    fn eigenvalue_cap_holds_along_runs() {
        let mut rng = Rng::seed_from(82);
        let d = 3;
        let (b, c) = (0.5, 4.0);
        let mut l = Laser::new(d, b, Some(c), None).unwrap();
        let mut x_max: f64 = 0.0;
        for _ in 0..120 {
            let x: Vec<f64> = (0..d).map(|_| rng.next_gaussian()).collect();
            x_max = x_max.max(crate::linalg::norm(&x));
            l.step(&sample(x, rng.next_gaussian())).unwrap();
            let x2 = x_max * x_max;
            let cap = ((3.0 * x2 + (x2 * x2 + 4.0 * x2 * c).sqrt()) / 2.0).max(b + x2);
            let top = l.d_matrix().max_eigenvalue().unwrap();
            assert!(top <= cap + 1e-9, "eigenvalue {top} over cap {cap}");
        }
    }

    #[test]
    fn tune_c_low_drift_cases() {
        let t = tune_c_low_drift(1000, 1.0, 2, 1.0, 0.5, 8.0).unwrap();
        assert!((t.c - 50.0).abs() < 1e-9, "c = {}", t.c);

        // fixed point: V2 equal to the numerator gives c = 1
        let base = std::f64::consts::SQRT_2 * 1000.0 * 2.0;
        let t = tune_c_low_drift(1000, 1.0, 2, 1.0, 0.5, base).unwrap();
        assert!((t.c - 1.0).abs() < 1e-12);

        // doubling V2 divides c by 2^{2/3}
        let a = tune_c_low_drift(1000, 1.0, 2, 1.0, 0.5, 4.0).unwrap().c;
        let b = tune_c_low_drift(1000, 1.0, 2, 1.0, 0.5, 8.0).unwrap().c;
        assert!((a / b - 2f64.powf(2.0 / 3.0)).abs() < 1e-12);

        assert!(tune_c_low_drift(1000, 0.0, 2, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn tune_c_high_drift_cases() {
        // M = max{3, 1.5} = 3
        let c = tune_c_high_drift(300, 1.0, 1, 1.0, 0.5, 4.0).unwrap();
        assert!((c - 15.0).abs() < 1e-12);

        let m = 3.0;
        let c = tune_c_high_drift(300, 1.0, 1, 1.0, 0.5, m * 300.0).unwrap();
        assert!((c - 1.0).abs() < 1e-12);

        // quadrupling T doubles c
        let a = tune_c_high_drift(1200, 1.0, 1, 1.0, 0.5, 4.0).unwrap();
        assert!((a - 30.0).abs() < 1e-12);

        assert!(tune_c_high_drift(300, 1.0, 1, -1.0, 0.5, 4.0).is_err());
    }
}
