use nalgebra::{DMatrix, DVector};

use crate::error::{ReachError, Result};
use crate::geometry::ChartPoint;
use crate::manifolds::Manifold;

/// Default central-difference step in chart units.
pub const FD_STEP: f64 = 1e-5;

/// Connection coefficients `Γᵏᵢⱼ`, stored as `data[(k*n + i)*n + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChristoffelMode {
    /// Use the manifold's own evaluator (closed form where it has one).
    Analytic,
    /// Central differences of the metric with the given step.
    FiniteDifference { step: f64 },
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let n = self.n;
        self.data[(k * n + i) * n + j] = v;
    }

    /// Sets `Γᵏᵢⱼ` and `Γᵏⱼᵢ` together.
    pub fn set_sym(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.set(k, i, j, v);
        self.set(k, j, i, v);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `Σᵢⱼ aⁱ Γᵏᵢⱼ bʲ` for each k.
    pub fn contract(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |k, _| {
            let mut s = 0.0;
            for i in 0..n {
                if a[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    s += a[i] * self.get(k, i, j) * b[j];
                }
            }
            s
        })
    }

    /// Applies [`contract`](Self::contract) to every column of `b`.
    pub fn contract_columns(&self, a: &DVector<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, b.ncols());
        for (l, col) in b.column_iter().enumerate() {
            out.set_column(l, &self.contract(a, &col.into_owned()));
        }
        out
    }
}

/// Levi-Civita coefficients from central differences of the metric:
/// `Γᵏᵢⱼ = ½ Σ_l Hᵏˡ (∂ⱼH_li + ∂ᵢH_lj − ∂ₗH_ij)`.
pub fn christoffel_fd<M: Manifold + ?Sized>(
    manifold: &M,
    x: &ChartPoint,
    step: f64,
) -> Result<Christoffel> {
    if !(step > 0.0) {
        return Err(ReachError::InvalidArgument(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let n = manifold.dim();
    let domain = manifold.domain();
    let h_inv = manifold.metric_at(x)?.inverse().clone();

    // dh[l] = ∂H/∂x^l
    let mut dh = Vec::with_capacity(n);
    for l in 0..n {
        let mut plus = x.coords().clone();
        let mut minus = x.coords().clone();
        plus[l] += step;
        minus[l] -= step;
        if !domain.contains(plus.as_slice()) || !domain.contains(minus.as_slice()) {
            return Err(ReachError::boundary(
                x.as_slice(),
                "within one finite-difference step of the chart boundary",
            ));
        }
        let hp = manifold.metric_at(&ChartPoint::unchecked(plus))?;
        let hm = manifold.metric_at(&ChartPoint::unchecked(minus))?;
        dh.push((hp.matrix() - hm.matrix()) / (2.0 * step));
    }

    let mut gamma = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for l in 0..n {
                    let lower = dh[j][(l, i)] + dh[i][(l, j)] - dh[l][(i, j)];
                    s += h_inv[(k, l)] * lower;
                }
                gamma.set_sym(k, i, j, 0.5 * s);
            }
        }
    }
    Ok(gamma)
}

pub fn christoffel<M: Manifold + ?Sized>(
    manifold: &M,
    x: &ChartPoint,
    mode: ChristoffelMode,
) -> Result<Christoffel> {
    match mode {
        ChristoffelMode::Analytic => manifold.christoffel_at(x),
        ChristoffelMode::FiniteDifference { step } => christoffel_fd(manifold, x, step),
    }
}
