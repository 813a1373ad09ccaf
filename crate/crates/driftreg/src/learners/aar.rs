//! Aggregating algorithm for regression.

use super::{check_input, check_sample, OnlineLearner, Sample};
use crate::error::{Error, Result};
use crate::linalg::{dot, SymMat};

/// Last-step min-max optimal regressor for the stationary setting. Identical
/// state recursion to RLS at unit forgetting up to scale, but it shrinks its
/// predictions on unfamiliar inputs:
///
/// ```text
/// yhat_t        = x^T w_{t-1} / (1 + chi)
/// w_t           = w_{t-1} + (y_t - x^T w_{t-1}) Sigma_{t-1} x / (1 + chi)
/// Sigma_t^{-1}  = Sigma_{t-1}^{-1} + x x^T
/// ```
///
/// with `w_0 = 0`, `Sigma_0 = I / b` and `chi = x^T Sigma_{t-1} x`. Note
/// the weight update uses the unshrunk residual.
#[derive(Clone, Debug)]
pub struct Aar {
    w: Vec<f64>,
    sigma: SymMat,
    t: u64,
}

impl Aar {
    pub fn new(d: usize, b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::bad_param("b", format!("need b > 0, got {b}")));
        }
        Ok(Aar {
            w: vec![0.0; d],
            sigma: SymMat::scaled_identity(d, 1.0 / b),
            t: 0,
        })
    }
}

impl OnlineLearner for Aar {
    fn dim(&self) -> usize {
        self.w.len()
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        check_input(self.dim(), x)?;
        let chi = self.sigma.quad_form(x)?;
        Ok(dot(&self.w, x) / (1.0 + chi))
    }

    fn update(&mut self, sample: &Sample) -> Result<()> {
        check_sample(self.dim(), sample)?;
        let k = self.sigma.mul_vec(&sample.x);
        let chi = dot(&sample.x, &k);
        let denom = 1.0 + chi;
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
