//! Minimal dense symmetric linear algebra for the online learners.
//!
//! Everything here is sized for small `d` (a few hundred at most): full
//! storage, cyclic Jacobi for eigenvalues, Cholesky for SPD solves. No
//! attempt is made at BLAS-level performance.

use crate::consts::{CHOLESKY_MIN_PIVOT, JACOBI_OFFDIAG_TOL, JACOBI_SWEEP_FACTOR};
use crate::error::{Error, Result};

/// `sign(x) * min(|x|, y)` for `y > 0`.
///
/// Panics if `y <= 0`; callers validate clip bounds at configuration time.
pub fn clip(x: f64, y: f64) -> f64 {
    assert!(y > 0.0, "clip bound must be positive, got {y}");
    x.signum() * x.abs().min(y)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `a + s * b`, element-wise.
pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Dense symmetric matrix with full row-major storage.
///
/// Symmetry is maintained by construction: every mutating operation writes
/// both triangles, so `m.get(i, j) == m.get(j, i)` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMat {
    d: usize,
    a: Vec<f64>,
}

impl SymMat {
    pub fn zeros(d: usize) -> Self {
        SymMat {
            d,
            a: vec![0.0; d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::scaled_identity(d, 1.0)
    }

    pub fn scaled_identity(d: usize, s: f64) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.a[i * d + i] = s;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, v) in diag.iter().enumerate() {
            m.a[i * m.d + i] = *v;
        }
        m
    }

    /// Builds from row-major entries, symmetrizing as `(A + A^T) / 2`.
    pub fn from_rows(d: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), d * d);
        let mut m = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.a[i * d + j] = 0.5 * (rows[i * d + j] + rows[j * d + i]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.d + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.d + j] = v;
        self.a[j * self.d + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: f64) -> SymMat {
        SymMat {
            d: self.d,
            a: self.a.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &SymMat) -> Result<SymMat> {
        self.check_dim(other.d)?;
        Ok(SymMat {
            d: self.d,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn sub(&self, other: &SymMat) -> Result<SymMat> {
        self.check_dim(other.d)?;
        Ok(SymMat {
            d: self.d,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect(),
        })
    }

    pub fn add_scaled_identity(&self, s: f64) -> SymMat {
        let mut m = self.clone();
        for i in 0..m.d {
            m.a[i * m.d + i] += s;
        }
        m
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.a)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got,
            });
        }
        Ok(())
    }

    /// `A x`. Callers have already validated dimensions.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.d);
        self.a.chunks_exact(self.d).map(|row| dot(row, x)).collect()
    }

    /// `x^T A x`.
    pub fn quad_form(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(dot(x, &self.mul_vec(x)))
    }

    /// `A + beta * x x^T`.
    pub fn rank_one_update(&self, beta: f64, x: &[f64]) -> Result<SymMat> {
        self.check_dim(x.len())?;
        let mut m = self.clone();
        for i in 0..self.d {
            for j in 0..self.d {
                m.a[i * self.d + j] += beta * x[i] * x[j];
            }
        }
        Ok(m)
    }

    /// `A B` symmetrized as `(AB + (AB)^T) / 2`. Only meaningful when the
    /// true product is symmetric (commuting factors, e.g. rational
    /// functions of the same matrix); the symmetrization just removes
    /// rounding skew.
    pub fn mul_sym(&self, other: &SymMat) -> Result<SymMat> {
        self.check_dim(other.d)?;
        let d = self.d;
        let mut raw = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.a[i * d + k] * other.a[k * d + j];
                }
                raw[i * d + j] = s;
            }
        }
        Ok(SymMat::from_rows(d, &raw))
    }

    /// Congruence sandwich `B M B` for symmetric `B = self` and symmetric
    /// `M`; exact symmetric result for any (non-commuting) pair.
    pub fn sandwich(&self, m: &SymMat) -> Result<SymMat> {
        self.check_dim(m.d)?;
        let d = self.d;
        // mb = M B
        let mut mb = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += m.a[i * d + k] * self.a[k * d + j];
                }
                mb[i * d + j] = s;
            }
        }
        let mut raw = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.a[i * d + k] * mb[k * d + j];
                }
                raw[i * d + j] = s;
            }
        }
        Ok(SymMat::from_rows(d, &raw))
    }

    /// `x x^T` as a matrix.
    pub fn outer(x: &[f64]) -> SymMat {
        let d = x.len();
        let mut m = SymMat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.a[i * d + j] = x[i] * x[j];
            }
        }
        m
    }

    /// Lower-triangular Cholesky factor; the non-positive-pivot failure is
    /// the positive-definiteness test used across the crate.
    fn cholesky(&self) -> Result<Vec<f64>> {
        let d = self.d;
        let mut l = vec![0.0; d * d];
        for j in 0..d {
            let mut diag = self.a[j * d + j];
            for k in 0..j {
                diag -= l[j * d + k] * l[j * d + k];
            }
            if !(diag > CHOLESKY_MIN_PIVOT) {
                return Err(Error::NotPositiveDefinite {
                    col: j,
                    pivot: diag,
                });
            }
            let ljj = diag.sqrt();
            l[j * d + j] = ljj;
            for i in (j + 1)..d {
                let mut s = self.a[i * d + j];
                for k in 0..j {
                    s -= l[i * d + k] * l[j * d + k];
                }
                l[i * d + j] = s / ljj;
            }
        }
        Ok(l)
    }

    /// True iff the Cholesky factorization succeeds.
    pub fn is_spd(&self) -> bool {
        self.cholesky().is_ok()
    }

    /// Solves `A z = b` for SPD `A` via Cholesky.
    pub fn spd_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(b.len())?;
        let l = self.cholesky()?;
        Ok(self.chol_solve(&l, b))
    }

    fn chol_solve(&self, l: &[f64], b: &[f64]) -> Vec<f64> {
        let d = self.d;
        // forward: L y = b
        let mut y = vec![0.0; d];
        for i in 0..d {
            let mut s = b[i];
            for k in 0..i {
                s -= l[i * d + k] * y[k];
            }
            y[i] = s / l[i * d + i];
        }
        // backward: L^T z = y
        let mut z = vec![0.0; d];
        for i in (0..d).rev() {
            let mut s = y[i];
            for k in (i + 1)..d {
                s -= l[k * d + i] * z[k];
            }
            z[i] = s / l[i * d + i];
        }
        z
    }

    /// Inverse of an SPD matrix, column by column through one factorization.
    pub fn spd_inverse(&self) -> Result<SymMat> {
        let d = self.d;
        let l = self.cholesky()?;
        let mut raw = vec![0.0; d * d];
        let mut e = vec![0.0; d];
        for j in 0..d {
            e[j] = 1.0;
            let col = self.chol_solve(&l, &e);
            e[j] = 0.0;
            for i in 0..d {
                raw[i * d + j] = col[i];
            }
        }
        Ok(SymMat::from_rows(d, &raw))
    }

    /// Full symmetric eigendecomposition by cyclic Jacobi rotations.
    /// Eigenvalues come back ascending with matching orthonormal vectors.
    pub fn eig_sym(&self) -> Result<EigSym> {
        if !self.is_finite() {
            return Err(Error::NonFinite { step: None });
        }
        let d = self.d;
        let mut a = self.a.clone();
        // v is row-major; column j is eigenvector j.
        let mut v = vec![0.0; d * d];
        for i in 0..d {
            v[i * d + i] = 1.0;
        }

        let fro: f64 = self.a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let tol = JACOBI_OFFDIAG_TOL * fro.max(1.0);
        let max_sweeps = JACOBI_SWEEP_FACTOR * d * d;

        for _sweep in 0..max_sweeps.max(1) {
            let mut off = 0.0;
            for i in 0..d {
                for j in (i + 1)..d {
                    off += 2.0 * a[i * d + j] * a[i * d + j];
                }
            }
            if off.sqrt() <= tol {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let apq = a[p * d + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * d + p];
                    let aqq = a[q * d + q];
                    let theta = (aqq - app) / (2.0 * apq);
                    // Smaller-magnitude root keeps the rotation stable.
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;

                    a[p * d + p] = app - t * apq;
                    a[q * d + q] = aqq + t * apq;
                    a[p * d + q] = 0.0;
                    a[q * d + p] = 0.0;
                    for k in 0..d {
                        if k == p || k == q {
                            continue;
                        }
                        let akp = a[k * d + p];
                        let akq = a[k * d + q];
                        a[k * d + p] = c * akp - s * akq;
                        a[p * d + k] = a[k * d + p];
                        a[k * d + q] = s * akp + c * akq;
                        a[q * d + k] = a[k * d + q];
                    }
                    for k in 0..d {
                        let vkp = v[k * d + p];
                        let vkq = v[k * d + q];
                        v[k * d + p] = c * vkp - s * vkq;
                        v[k * d + q] = s * vkp + c * vkq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| a[i * d + i].partial_cmp(&a[j * d + j]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| a[i * d + i]).collect();
        // column-major so each eigenvector is contiguous
        let mut vecs = vec![0.0; d * d];
        for (jj, &src) in order.iter().enumerate() {
            for i in 0..d {
                vecs[jj * d + i] = v[i * d + src];
            }
        }
        Ok(EigSym { d, values, vecs })
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig_sym()?.values[0])
    }

    /// Largest eigenvalue.
    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eig_sym()?.values.last().expect("d >= 1"))
    }
}

/// Result of [`SymMat::eig_sym`]: ascending eigenvalues and orthonormal
/// eigenvectors stored column-contiguous.
#[derive(Clone, Debug)]
pub struct EigSym {
    d: usize,
    pub values: Vec<f64>,
    vecs: Vec<f64>,
}

impl EigSym {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Eigenvector for `values[j]`.
    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vecs[j * self.d..(j + 1) * self.d]
    }

    /// `V^T w` — coordinates of `w` in the eigenbasis.
    pub fn to_eigenbasis(&self, w: &[f64]) -> Vec<f64> {
        (0..self.d).map(|j| dot(self.vector(j), w)).collect()
    }

    /// `V u` — back from eigenbasis coordinates.
    pub fn from_eigenbasis(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        for (j, uj) in u.iter().enumerate() {
            for (o, vij) in out.iter_mut().zip(self.vector(j)) {
                *o += vij * uj;
            }
        }
        out
    }

    /// `V diag(values) V^T`.
    pub fn reconstruct(&self) -> SymMat {
        let d = self.d;
        let mut raw = vec![0.0; d * d];
        for j in 0..d {
            let vj = self.vector(j);
            for r in 0..d {
                for c in 0..d {
                    raw[r * d + c] += self.values[j] * vj[r] * vj[c];
                }
            }
        }
        SymMat::from_rows(d, &raw)
    }
}
