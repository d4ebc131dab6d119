use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{ReachError, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Metric tensor `H_x` at one point together with its inverse and spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    h: DMatrix<f64>,
    h_inv: DMatrix<f64>,
    lambda_min: f64,
    lambda_max: f64,
}

/// Norm-equivalence factors between Riemannian and Euclidean norms.
///
/// `vec_lo·‖v‖ ≤ |v|_h ≤ vec_hi·‖v‖` and `mat_lo·‖A‖ ≤ |A|_h ≤ mat_hi·‖A‖`,
/// where every plain norm is the Euclidean one (spectral for matrices).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormFactors {
    pub vec_lo: f64,
    pub vec_hi: f64,
    pub mat_lo: f64,
    pub mat_hi: f64,
}

impl Metric {
    /// Validates `h` as symmetric positive definite and inverts it.
    pub fn new(h: DMatrix<f64>) -> Result<Self> {
        if !h.is_square() {
            return Err(ReachError::Shape(format!(
                "metric must be square, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(ReachError::InvalidMetric("non-finite entry".into()));
        }
        let scale = h.amax().max(1.0);
        for i in 0..h.nrows() {
            for j in 0..i {
                if (h[(i, j)] - h[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(ReachError::InvalidMetric(format!(
                        "not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let eig = SymmetricEigen::new(h.clone());
        let lambda_min = eig.eigenvalues.min();
        let lambda_max = eig.eigenvalues.max();
        if lambda_min <= 0.0 {
            return Err(ReachError::InvalidMetric(format!(
                "not positive definite (smallest eigenvalue {lambda_min:e})"
            )));
        }
        let h_inv = h
            .clone()
            .cholesky()
            .ok_or_else(|| ReachError::InvalidMetric("Cholesky factorisation failed".into()))?
            .inverse();
        Ok(Self {
            h,
            h_inv,
            lambda_min,
            lambda_max,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            h: DMatrix::identity(n, n),
            h_inv: DMatrix::identity(n, n),
            lambda_min: 1.0,
            lambda_max: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.h_inv
    }

    /// `‖H‖`, the largest eigenvalue.
    pub fn norm(&self) -> f64 {
        self.lambda_max
    }

    /// `‖H⁻¹‖ = 1/λ_min(H)`.
    pub fn inverse_norm(&self) -> f64 {
        1.0 / self.lambda_min
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.h * b))
    }

    /// `|v|_h = sqrt(vᵀ H v)`.
    pub fn vec_norm(&self, v: &DVector<f64>) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// Riemannian operator norm of a square matrix of tangent columns,
    /// computed as the spectral norm of `H^{1/2} A H^{-1/2}`.
    pub fn mat_norm(&self, a: &DMatrix<f64>) -> Result<f64> {
        let n = self.dim();
        if a.nrows() != n || a.ncols() != n {
            return Err(ReachError::Shape(format!(
                "Riemannian matrix norm needs a {n}x{n} matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let eig = SymmetricEigen::new(self.h.clone());
        let sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let inv_sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
        let q = &eig.eigenvectors;
        let h_half = q * sqrt_d * q.transpose();
        let h_neg_half = q * inv_sqrt_d * q.transpose();
        Ok(spectral_norm(&(h_half * a * h_neg_half)))
    }

    pub fn norm_factors(&self) -> NormFactors {
        let h = self.norm();
        let hinv_inv = self.lambda_min; // ‖H⁻¹‖⁻¹
        NormFactors {
            vec_lo: hinv_inv.sqrt(),
            vec_hi: h.sqrt(),
            mat_lo: (hinv_inv / h).sqrt(),
            mat_hi: (h / hinv_inv).sqrt(),
        }
    }
}

/// Largest singular value; zero for empty matrices.
pub(crate) fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// `sqrt(vᵀ H v)` for a raw matrix; rejects a negative quadratic form.
pub fn riemannian_vec_norm(v: &DVector<f64>, h: &DMatrix<f64>) -> Result<f64> {
    if h.nrows() != v.len() || h.ncols() != v.len() {
        return Err(ReachError::Shape(format!(
            "metric is {}x{} but vector has {} components",
            h.nrows(),
            h.ncols(),
            v.len()
        )));
    }
    let q = v.dot(&(h * v));
    if q < 0.0 {
        return Err(ReachError::InvalidMetric(format!(
            "negative quadratic form vᵀHv = {q:e}"
        )));
    }
    Ok(q.sqrt())
}

pub fn riemannian_mat_norm(a: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<f64> {
    Metric::new(h.clone())?.mat_norm(a)
}

pub fn norm_equivalence_factors(h: &DMatrix<f64>) -> Result<NormFactors> {
    Ok(Metric::new(h.clone())?.norm_factors())
}
