//! Recursive least squares with forgetting, and its covariance-reset
//! variant.

use super::{check_input, check_sample, OnlineLearner, Sample};
use crate::error::{Error, Result};
use crate::linalg::{dot, SymMat};

/// Recursive least squares: `w_0 = 0`, `Sigma_0 = I`,
///
/// ```text
/// yhat_t        = x^T w_{t-1}
/// w_t           = w_{t-1} + (y_t - yhat_t) Sigma_{t-1} x / (r + chi)
/// Sigma_t^{-1}  = r Sigma_{t-1}^{-1} + x x^T
/// ```
///
/// with `chi = x^T Sigma_{t-1} x`. The covariance is maintained directly
/// through the rank-one form `Sigma_t = (Sigma_{t-1} - k k^T / (r + chi)) / r`
/// where `k = Sigma_{t-1} x`; the inverse-form recursion is the test oracle.
#[derive(Clone, Debug)]
pub struct Rls {
    r: f64,
    w: Vec<f64>,
    sigma: SymMat,
    t: u64,
}

impl Rls {
    pub fn new(d: usize, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::bad_param("r", format!("need 0 < r <= 1, got {r}")));
        }
        Ok(Rls {
            r,
            w: vec![0.0; d],
            sigma: SymMat::identity(d),
            t: 0,
        })
    }
}

impl OnlineLearner for Rls {
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
        let err = sample.y - dot(&self.w, &sample.x);
        for (wi, ki) in self.w.iter_mut().zip(&k) {
            *wi += err * ki / denom;
        }
        self.sigma = self
            .sigma
            .rank_one_update(-1.0 / denom, &k)?
            .scale(1.0 / self.r);
        self.t += 1;
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
}

/// RLS with covariance reset every `t0` examples (`None` never resets and is
/// bit-identical to [`Rls`]).
///
/// The weight update always uses the pre-reset `Sigma_{t-1}`; only the
/// stored covariance is replaced by the identity when `t mod t0 == 0`.
#[derive(Clone, Debug)]
pub struct CrRls {
    inner: Rls,
    t0: Option<u64>,
    resets: Vec<u64>,
}

impl CrRls {
    pub fn new(d: usize, r: f64, t0: Option<u64>) -> Result<Self> {
        if t0 == Some(0) {
            return Err(Error::bad_param("t0", "reset period must be at least 1"));
        }
        Ok(CrRls {
            inner: Rls::new(d, r)?,
            t0,
            resets: Vec::new(),
        })
    }
}

impl OnlineLearner for CrRls {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        self.inner.predict(x)
    }

    fn update(&mut self, sample: &Sample) -> Result<()> {
        self.inner.update(sample)?;
        if let Some(t0) = self.t0 {
            if self.inner.t.is_multiple_of(t0) {
                self.inner.sigma = SymMat::identity(self.dim());
                self.resets.push(self.inner.t);
            }
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.inner.weights()
    }

    fn sigma(&self) -> Option<SymMat> {
        self.inner.sigma()
    }

    fn steps(&self) -> u64 {
        self.inner.t
    }

    fn resets(&self) -> &[u64] {
        &self.resets
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_stream;
    use super::*;
    use crate::datagen::Rng;

    #[test]
    fn scalar_hand_recursion_r1() {
        let mut rls = Rls::new(1, 1.0).unwrap();
        let yhat = rls.step(&Sample::new(vec![1.0], 1.0).unwrap()).unwrap();
        assert_eq!(yhat, 0.0);
        assert!((rls.weights()[0] - 0.5).abs() < 1e-15);
        assert!((rls.sigma().unwrap().get(0, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scalar_hand_recursion_r_half() {
        let mut rls = Rls::new(1, 0.5).unwrap();
        rls.update(&Sample::new(vec![1.0], 1.0).unwrap()).unwrap();
        assert!((rls.weights()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((rls.sigma().unwrap().get(0, 0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_input_with_r1_keeps_state() {
        let mut rls = Rls::new(2, 1.0).unwrap();
        rls.update(&Sample::new(vec![1.0, 0.5], 2.0).unwrap())
            .unwrap();
        let w = rls.weights();
        let s = rls.sigma().unwrap();
        let yhat = rls
            .step(&Sample::new(vec![0.0, 0.0], 3.0).unwrap())
            .unwrap();
        assert_eq!(yhat, 0.0 * 3.0);
        assert_eq!(rls.weights(), w);
        // with r = 1 a zero input leaves the covariance untouched
        assert_eq!(rls.sigma().unwrap(), s);
    }

    #[test]
    fn covariance_matches_inverse_form_oracle() {
        let mut rng = Rng::seed_from(40);
        for &r in &[1.0, 0.7] {
            let d = 3;
            let mut rls = Rls::new(d, r).unwrap();
            let mut sigma_inv = SymMat::identity(d);
            for s in random_stream(&mut rng, 30, d) {
                rls.update(&s).unwrap();
                sigma_inv = sigma_inv.scale(r).rank_one_update(1.0, &s.x).unwrap();
                let direct = rls.sigma().unwrap();
                let via_inverse = sigma_inv.spd_inverse().unwrap();
                assert!(direct.sub(&via_inverse).unwrap().max_abs_entry() < 1e-9);
                assert!(direct.is_spd());
            }
        }
    }

    #[test]
    fn crrls_infinite_period_is_bit_identical_to_rls() {
        let mut rng = Rng::seed_from(41);
        let d = 4;
        let mut rls = Rls::new(d, 0.9).unwrap();
        let mut crrls = CrRls::new(d, 0.9, None).unwrap();
        for s in random_stream(&mut rng, 50, d) {
            rls.update(&s).unwrap();
            crrls.update(&s).unwrap();
        }
        assert_eq!(rls.weights(), crrls.weights());
        assert_eq!(rls.sigma().unwrap(), crrls.sigma().unwrap());
        assert!(crrls.resets().is_empty());
    }

    #[test]
    fn crrls_reset_schedule() {
        let mut rng = Rng::seed_from(42);
        let d = 2;
        // t0 = 1 resets after every step
        let mut every = CrRls::new(d, 1.0, Some(1)).unwrap();
        for s in random_stream(&mut rng, 5, d) {
            every.update(&s).unwrap();
            assert_eq!(every.sigma().unwrap(), SymMat::identity(d));
        }
        assert_eq!(every.resets(), &[1, 2, 3, 4, 5]);

        let mut periodic = CrRls::new(d, 1.0, Some(2)).unwrap();
        for s in random_stream(&mut rng, 4, d) {
            periodic.update(&s).unwrap();
        }
        assert_eq!(periodic.resets(), &[2, 4]);
    }

    #[test]
    fn rejects_bad_forgetting_factor() {
        assert!(Rls::new(2, 0.0).is_err());
        assert!(Rls::new(2, 1.5).is_err());
        assert!(CrRls::new(2, 1.0, Some(0)).is_err());
    }
}
