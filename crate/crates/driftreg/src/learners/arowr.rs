//! Adaptive regularization of weights for regression.

use super::{check_input, check_sample, OnlineLearner, Sample};
use crate::error::{Error, Result};
use crate::linalg::{dot, SymMat};

/// Second-order learner with purely additive inverse-covariance growth:
/// `w_0 = 0`, `Sigma_0 = I`,
///
/// ```text
/// yhat_t        = x^T w_{t-1}
/// w_t           = w_{t-1} + (y_t - yhat_t) Sigma_{t-1} x / (r + chi)
/// Sigma_t^{-1}  = Sigma_{t-1}^{-1} + x x^T / r
/// ```
///
/// Coincides with RLS exactly when `r = 1`; for `r != 1` the matrix
/// recursions differ (RLS also rescales).
#[derive(Clone, Debug)]
pub struct Arowr {
    r: f64,
    w: Vec<f64>,
    sigma: SymMat,
    t: u64,
}

impl Arowr {
    pub fn new(d: usize, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::bad_param("r", format!("need r > 0, got {r}")));
        }
        Ok(Arowr {
            r,
            w: vec![0.0; d],
            sigma: SymMat::identity(d),
            t: 0,
        })
    }
}

impl OnlineLearner for Arowr {
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
        self.sigma = self.sigma.rank_one_update(-1.0 / denom, &k)?;
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
