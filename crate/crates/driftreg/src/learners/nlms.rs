//! Normalized least mean squares.

use super::{check_input, check_sample, OnlineLearner, Sample};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq, SymMat};

/// First-order baseline: `w += mu * (y - yhat) * x / (eps + ||x||^2)`.
///
/// The divisor regularizer `eps` keeps the step defined for vanishing
/// inputs; with `eps = 0` a zero input leaves the weights unchanged.
#[derive(Clone, Debug)]
pub struct Nlms {
    mu: f64,
    eps: f64,
    w: Vec<f64>,
    t: u64,
}

impl Nlms {
    pub fn new(d: usize, mu: f64, eps: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= 2.0) {
            return Err(Error::bad_param(
                "mu",
                format!("need 0 < mu <= 2, got {mu}"),
            ));
        }
        if !(eps >= 0.0) {
            return Err(Error::bad_param("eps", format!("need eps >= 0, got {eps}")));
        }
        Ok(Nlms {
            mu,
            eps,
            w: vec![0.0; d],
            t: 0,
        })
    }
}

impl OnlineLearner for Nlms {
    fn dim(&self) -> usize {
        self.w.len()
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        check_input(self.dim(), x)?;
        Ok(dot(&self.w, x))
    }

    fn update(&mut self, sample: &Sample) -> Result<()> {
        check_sample(self.dim(), sample)?;
        let denom = self.eps + norm_sq(&sample.x);
        if denom > 0.0 {
            let err = sample.y - dot(&self.w, &sample.x);
            let scale = self.mu * err / denom;
            for (wi, xi) in self.w.iter_mut().zip(&sample.x) {
                *wi += scale * xi;
            }
        }
        self.t += 1;
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.w.clone()
    }

    fn sigma(&self) -> Option<SymMat> {
        None
    }

    fn steps(&self) -> u64 {
        self.t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_step_exact_fit() {
        let mut f = Nlms::new(2, 1.0, 0.0).unwrap();
        f.update(&Sample::new(vec![1.0, 0.0], 1.0).unwrap())
            .unwrap();
        assert_eq!(f.weights(), vec![1.0, 0.0]);
        // immediate re-prediction of the same sample has zero loss
        assert_eq!(f.predict(&[1.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn half_step() {
        let mut f = Nlms::new(2, 0.5, 0.0).unwrap();
        f.update(&Sample::new(vec![1.0, 0.0], 1.0).unwrap())
            .unwrap();
        assert_eq!(f.weights(), vec![0.5, 0.0]);
    }

    #[test]
    fn normalization_by_input_energy() {
        let mut f = Nlms::new(2, 1.0, 0.0).unwrap();
        f.update(&Sample::new(vec![2.0, 0.0], 2.0).unwrap())
            .unwrap();
        assert_eq!(f.weights(), vec![1.0, 0.0]);
    }

    #[test]
    fn zero_input_without_regularizer_is_noop() {
        let mut f = Nlms::new(2, 1.0, 0.0).unwrap();
        f.update(&Sample::new(vec![0.0, 0.0], 5.0).unwrap())
            .unwrap();
        assert_eq!(f.weights(), vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Nlms::new(2, 0.0, 0.0).is_err());
        assert!(Nlms::new(2, 2.5, 0.0).is_err());
        assert!(Nlms::new(2, 1.0, -1.0).is_err());
    }
}
