//! Independent brute-force reference computations used by the test suites:
//! batch ridge solves, exhaustive minimization of the drift-penalized
//! quadratic, grid min-max prediction, and grid projection.
//!
//! None of these share a code path with the learner recursions they check;
//! they exist to catch bugs in those recursions, desk-scale only.

use crate::error::{Error, Result};
use crate::learners::Sample;
use crate::linalg::{dot, norm, norm_sq, SymMat};

/// Size cap for the stacked quadratic solved by [`min_q_bruteforce`].
pub const STACKED_DIM_CAP: usize = 32;

/// `argmin_w reg * r^t ||w||^2 + sum_i r^{t-i} (y_i - w . x_i)^2` by a
/// direct solve of the normal equations.
pub fn batch_ridge(samples: &[Sample], r: f64, reg: f64) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Data("batch ridge needs at least one sample".into()));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::bad_param("r", format!("need 0 < r <= 1, got {r}")));
    }
    if !(reg > 0.0) {
        return Err(Error::bad_param("reg", format!("need reg > 0, got {reg}")));
    }
    let d = samples[0].x.len();
    let t = samples.len();
    let mut gram = SymMat::scaled_identity(d, reg * r.powi(t as i32));
    let mut rhs = vec![0.0; d];
    for (i, s) in samples.iter().enumerate() {
        if s.x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.x.len(),
            });
        }
        let weight = r.powi((t - 1 - i) as i32);
        gram = gram.rank_one_update(weight, &s.x)?;
        for (ri, xi) in rhs.iter_mut().zip(&s.x) {
            *ri += weight * s.y * xi;
        }
    }
    gram.spd_solve(&rhs)
}

/// Exhaustive minimum of the drift-penalized quadratic over all length-`t`
/// comparator sequences:
///
/// ```text
/// Q(u_1..u_t) = b ||u_1||^2 + c sum ||u_{s+1} - u_s||^2
///             + sum (y_s - u_s . x_s)^2
/// ```
///
/// Solved by assembling the full block-tridiagonal stationarity system. At
/// `c = inf` the chain collapses to a single ridge-regularized vector.
/// Returns the minimum value and the minimizing sequence.
pub fn min_q_bruteforce(samples: &[Sample], b: f64, c: f64) -> Result<(f64, Vec<Vec<f64>>)> {
    if samples.is_empty() {
        return Err(Error::Data("need at least one sample".into()));
    }
    if !(b > 0.0) || !(c > 0.0) {
        return Err(Error::bad_param("b", "penalties b, c must be positive"));
    }
    let t = samples.len();
    let d = samples[0].x.len();
    if t * d > STACKED_DIM_CAP {
        return Err(Error::bad_param(
            "t",
            format!(
                "stacked dimension {} exceeds the desk-scale cap {STACKED_DIM_CAP}",
                t * d
            ),
        ));
    }

    let y_sq: f64 = samples.iter().map(|s| s.y * s.y).sum();

    if c.is_infinite() {
        // all u_s forced equal: ridge with regularizer b
        let w = batch_ridge(samples, 1.0, b)?;
        let mut value = b * norm_sq(&w);
        for s in samples {
            let e = s.y - dot(&w, &s.x);
            value += e * e;
        }
        return Ok((value, vec![w; t]));
    }

    // stacked quadratic Q(U) = U^T H U - 2 g^T U + sum y^2
    let n = t * d;
    let mut h = SymMat::zeros(n);
    let mut g = vec![0.0; n];
    for (s, sample) in samples.iter().enumerate() {
        let base = s * d;
        let mut diag = 0.0;
        if s == 0 {
            diag += b;
        }
        if s > 0 {
            diag += c;
        }
        if s + 1 < t {
            diag += c;
        }
        for i in 0..d {
            h.set(base + i, base + i, h.get(base + i, base + i) + diag);
        }
        // set() writes both triangles, so visit each unordered pair once
        for i in 0..d {
            for j in i..d {
                h.set(
                    base + i,
                    base + j,
                    h.get(base + i, base + j) + sample.x[i] * sample.x[j],
                );
            }
            g[base + i] = sample.y * sample.x[i];
        }
        if s + 1 < t {
            for i in 0..d {
                h.set(base + i, base + d + i, -c);
            }
        }
    }

    let stacked = h.spd_solve(&g)?;
    let value = y_sq - dot(&g, &stacked);
    let argmin = stacked.chunks(d).map(|chunk| chunk.to_vec()).collect();
    Ok((value, argmin))
}

/// Grid evaluation of the last-step min-max objective: over candidate
/// predictions `yhat` on a grid of `[-bound, bound]`, the adversary's label
/// is the worse of `{-bound, +bound}` (the inner objective is convex in the
/// label, so its maximum over the interval sits at an endpoint). Returns the
/// minimizing `yhat`.
///
/// Takes the raw evidence state `(d_prev, e_prev, c)` and builds the
/// post-instance matrix itself, sharing nothing with the learner's
/// prediction path.
pub fn minmax_predict_grid(
    d_prev: &SymMat,
    e_prev: &[f64],
    c: f64,
    x: &[f64],
    bound: f64,
    resolution: f64,
) -> Result<f64> {
    if !(bound > 0.0) || !(resolution > 0.0) {
        return Err(Error::bad_param(
            "bound",
            "bound and resolution must be positive",
        ));
    }
    let dim = d_prev.dim();
    // D_t and D'_{t-1} assembled from scratch
    let d_prime = if c.is_infinite() {
        SymMat::identity(dim)
    } else {
        d_prev
            .scale(1.0 / c)
            .add_scaled_identity(1.0)
            .spd_inverse()?
    };
    let interp = if c.is_infinite() {
        d_prev.clone()
    } else {
        d_prime.mul_sym(d_prev)?
    };
    let d_t = interp.rank_one_update(1.0, x)?;
    let d_t_inv = d_t.spd_inverse()?;

    let a = d_t_inv.quad_form(x)?; // x^T D_t^{-1} x
    let m = dot(&d_t_inv.mul_vec(&d_prime.mul_vec(e_prev)), x); // x^T D_t^{-1} D' e

    let objective = |yhat: f64| -> f64 {
        let at = |y: f64| a * y * y + 2.0 * y * (m - yhat) + yhat * yhat;
        at(bound).max(at(-bound))
    };

    let steps = (2.0 * bound / resolution).ceil() as usize;
    let mut best = (-bound, objective(-bound));
    for k in 1..=steps {
        let yhat = (-bound + k as f64 * resolution).min(bound);
        let v = objective(yhat);
        if v < best.1 {
            best = (yhat, v);
        }
    }
    Ok(best.0)
}

/// Polar-grid minimizer of the Mahalanobis objective
/// `(w - w_tilde)^T sigma^{-1} (w - w_tilde)` over the disk `||w|| <=
/// radius`, for `d = 2` only. The grid covers the boundary circle and
/// interior rings at the given angular/radial resolution.
pub fn projection_oracle(
    w_tilde: &[f64],
    sigma: &SymMat,
    radius: f64,
    resolution: f64,
) -> Result<Vec<f64>> {
    if w_tilde.len() != 2 || sigma.dim() != 2 {
        return Err(Error::bad_param(
            "d",
            "projection oracle is implemented for d = 2",
        ));
    }
    if !(radius > 0.0) || !(resolution > 0.0) {
        return Err(Error::bad_param(
            "radius",
            "radius and resolution must be positive",
        ));
    }
    if norm(w_tilde) <= radius {
        return Ok(w_tilde.to_vec());
    }

    // closed-form 2x2 inverse, independent of the Cholesky path
    let (s11, s12, s22) = (sigma.get(0, 0), sigma.get(0, 1), sigma.get(1, 1));
    let det = s11 * s22 - s12 * s12;
    if !(det > 0.0) || !(s11 > 0.0) {
        return Err(Error::NotPositiveDefinite { col: 0, pivot: det });
    }
    let (p11, p12, p22) = (s22 / det, -s12 / det, s11 / det);
    let objective = |w0: f64, w1: f64| -> f64 {
        let d0 = w0 - w_tilde[0];
        let d1 = w1 - w_tilde[1];
        p11 * d0 * d0 + 2.0 * p12 * d0 * d1 + p22 * d1 * d1
    };

    let angle_steps = (std::f64::consts::TAU / resolution).ceil() as usize;
    let radial_steps = (1.0 / resolution).ceil() as usize;
    let mut best = (0.0, 0.0, objective(0.0, 0.0));
    for ri in 1..=radial_steps {
        let r = radius * ri as f64 / radial_steps as f64;
        for ai in 0..angle_steps {
            let theta = std::f64::consts::TAU * ai as f64 / angle_steps as f64;
            let (w0, w1) = (r * theta.cos(), r * theta.sin());
            let v = objective(w0, w1);
            if v < best.2 {
                best = (w0, w1, v);
            }
        }
    }
    Ok(vec![best.0, best.1])
}
