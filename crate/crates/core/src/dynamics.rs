//! Control-affine dynamics `ẋ = f(x) + G(x)u` in chart coordinates, used as
//! the truth system in validation runs.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{ReachError, Result};
use crate::expr::Expression;
use crate::geometry::ChartPoint;

pub trait ControlAffine: Send + Sync + fmt::Debug {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn drift(&self, x: &ChartPoint) -> Result<DVector<f64>>;
    fn input_matrix(&self, x: &ChartPoint) -> Result<DMatrix<f64>>;

    fn velocity(&self, x: &ChartPoint, u: &DVector<f64>) -> Result<DVector<f64>> {
        if u.len() != self.input_dim() {
            return Err(ReachError::Shape(format!(
                "control has {} entries, system has {} inputs",
                u.len(),
                self.input_dim()
            )));
        }
        Ok(self.drift(x)? + self.input_matrix(x)? * u)
    }
}

type DriftFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
type InputFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Dynamics given by Rust closures.
#[derive(Clone)]
pub struct FnDynamics {
    name: String,
    n: usize,
    m: usize,
    f: DriftFn,
    g: InputFn,
}

impl fmt::Debug for FnDynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnDynamics")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m)
            .finish()
    }
}

impl FnDynamics {
    pub fn new<F, G>(name: &str, n: usize, m: usize, f: F, g: G) -> Self
    where
        F: Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
        G: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            name: name.to_string(),
            n,
            m,
            f: Arc::new(f),
            g: Arc::new(g),
        }
    }

    /// `ẋ = 0`.
    pub fn zero(n: usize, m: usize) -> Self {
        Self::new(
            "zero",
            n,
            m,
            move |_| DVector::zeros(n),
            move |_| DMatrix::zeros(n, m),
        )
    }
}

impl ControlAffine for FnDynamics {
    fn state_dim(&self) -> usize {
        self.n
    }

    fn input_dim(&self) -> usize {
        self.m
    }

    fn drift(&self, x: &ChartPoint) -> Result<DVector<f64>> {
        Ok((self.f)(x.as_slice()))
    }

    fn input_matrix(&self, x: &ChartPoint) -> Result<DMatrix<f64>> {
        Ok((self.g)(x.as_slice()))
    }
}

/// Dynamics given by expression strings over the coordinate names.
#[derive(Debug, Clone)]
pub struct ExprDynamics {
    f: Vec<Expression>,
    /// Row-major `n × m`.
    g: Vec<Expression>,
    n: usize,
    m: usize,
}

impl ExprDynamics {
    pub fn parse(f: &[String], g: &[Vec<String>], coords: &[String]) -> Result<Self> {
        let n = coords.len();
        if f.len() != n {
            return Err(ReachError::Shape(format!(
                "f has {} entries, state dimension is {n}",
                f.len()
            )));
        }
        if g.len() != n {
            return Err(ReachError::Shape(format!(
                "G has {} rows, state dimension is {n}",
                g.len()
            )));
        }
        let m = g.first().map_or(0, Vec::len);
        if m == 0 || g.iter().any(|r| r.len() != m) {
            return Err(ReachError::Shape("G rows must have equal, nonzero length".into()));
        }
        let f = f
            .iter()
            .map(|s| Expression::parse(s, coords))
            .collect::<Result<_>>()?;
        let g = g
            .iter()
            .flatten()
            .map(|s| Expression::parse(s, coords))
            .collect::<Result<_>>()?;
        Ok(Self { f, g, n, m })
    }
}

impl ControlAffine for ExprDynamics {
    fn state_dim(&self) -> usize {
        self.n
    }

    fn input_dim(&self) -> usize {
        self.m
    }

    fn drift(&self, x: &ChartPoint) -> Result<DVector<f64>> {
        let vals = self
            .f
            .iter()
            .map(|e| e.eval(x.as_slice()))
            .collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(vals))
    }

    fn input_matrix(&self, x: &ChartPoint) -> Result<DMatrix<f64>> {
        let vals = self
            .g
            .iter()
            .map(|e| e.eval(x.as_slice()))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_row_slice(self.n, self.m, &vals))
    }
}

/// Least-squares control `u = G†(v − f)` reproducing a velocity, with the
/// residual `‖G u − (v − f)‖`.
pub fn least_squares_control(
    g: &DMatrix<f64>,
    f: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<(DVector<f64>, f64)> {
    let r = v - f;
    let svd = g.clone().svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    let u = svd
        .solve(&r, eps)
        .map_err(|e| ReachError::InvalidArgument(e.to_string()))?;
    let residual = (g * &u - r).norm();
    Ok((u, residual))
}

/// The heavily damped pendulum `θ̇ = −½ sin θ + u`.
pub fn damped_pendulum() -> FnDynamics {
    FnDynamics::new(
        "damped-pendulum",
        1,
        1,
        |x| DVector::from_element(1, -0.5 * x[0].sin()),
        |_| DMatrix::from_element(1, 1, 1.0),
    )
}

/// The Euler-angle rotation system with `f = 0` and
/// `G(x) = [[0, 0, 1 + x₃/2], [0, 1, 0]]ᵀ`.
pub fn so3_truth() -> FnDynamics {
    FnDynamics::new(
        "so3-euler",
        3,
        2,
        |_| DVector::zeros(3),
        |x| DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 0.0, 1.0, 1.0 + 0.5 * x[2], 0.0]),
    )
}
