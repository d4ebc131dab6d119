//! SO(3) in the z-x-z Euler-angle chart `(ψ, θ, φ)`.
//!
//! A chart point maps to `X = Rz(ψ)·Rx(θ)·Rz(φ)`, with `Rz(a) = exp(a·K_z)` and
//! `Rx(a) = exp(a·K_x)`. This order sends `(0, π/2, 0)` to the quarter turn
//! `[[1,0,0],[0,0,−1],[0,1,0]]`. In these coordinates the bi-invariant metric
//! whose geodesic distance is the misorientation angle reads
//!
//! ```text
//! H = [[1, 0, cos θ], [0, 1, 0], [cos θ, 0, 1]]
//! ```
//!
//! The chart covers ψ, φ ∈ (−π, π) and θ ∈ (0, π); `sin θ = 0` is excluded
//! because `H` is singular there.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{ReachError, Result};
use crate::geometry::{ChartDomain, ChartPoint, Christoffel, CoordRange, Metric, TangentVector};
use crate::manifolds::Manifold;

pub const K_X: [[f64; 3]; 3] = [[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]];
pub const K_Y: [[f64; 3]; 3] = [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]];
pub const K_Z: [[f64; 3]; 3] = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]];

const ROTATION_TOL: f64 = 1e-9;

fn mat(rows: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| rows[i][j])
}

fn hat(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

fn vee_antisym(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Rodrigues' formula for `exp(ŵ)`.
fn rodrigues(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta = w.norm();
    let k = hat(w);
    let (a, b) = if theta < 1e-6 {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    Matrix3::identity() + k * a + k * k * b
}

/// Rotation vector `w` with `exp(ŵ) = r`, angle in [0, π].
fn rotation_log(r: &Matrix3<f64>) -> Vector3<f64> {
    let s = vee_antisym(r); // sin(angle)·axis
    let c = 0.5 * (r.trace() - 1.0);
    let angle = s.norm().atan2(c);
    if angle < 1e-6 {
        return s * (1.0 + angle * angle / 6.0);
    }
    if PI - angle > 1e-6 {
        return s * (angle / angle.sin());
    }
    // Near a half turn the antisymmetric part vanishes; read the axis from
    // the symmetric part (R + I)/2 = a·aᵀ.
    let b = (r + Matrix3::identity()) * 0.5;
    let i = (0..3)
        .max_by(|&p, &q| b[(p, p)].total_cmp(&b[(q, q)]))
        .unwrap_or(0);
    let mut axis: Vector3<f64> = b.column(i) / b[(i, i)].max(0.0).sqrt().max(f64::MIN_POSITIVE);
    axis.normalize_mut();
    if axis.dot(&s) < 0.0 {
        axis = -axis;
    }
    axis * angle
}

/// A validated 3×3 rotation (`XᵀX = I`, `det X = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let ortho = (m.transpose() * m - Matrix3::identity()).amax();
        if !(ortho <= ROTATION_TOL) {
            return Err(ReachError::InvalidRotation(format!(
                "XᵀX deviates from I by {ortho:e}"
            )));
        }
        let det = m.determinant();
        if !((det - 1.0).abs() <= ROTATION_TOL) {
            return Err(ReachError::InvalidRotation(format!("det X = {det}")));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(mat(&rows))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// `exp(ŵ)` for a rotation vector `w`.
    pub fn from_rotation_vector(w: Vector3<f64>) -> Self {
        Self(rodrigues(&w))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn compose(&self, other: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * other.0)
    }

    pub fn transpose(&self) -> RotationMatrix {
        RotationMatrix(self.0.transpose())
    }

    pub fn rotation_vector(&self) -> Vector3<f64> {
        rotation_log(&self.0)
    }
}

/// Misorientation angle `arccos(½Tr(X₀Xᵀ) − ½)` in [0, π].
///
/// Evaluated as `atan2(|vee(R − Rᵀ)|/2, (Tr R − 1)/2)` with `R = X₀Xᵀ`, which
/// is the same angle without the loss of precision of `arccos` near zero.
pub fn so3_misorientation(x0: &RotationMatrix, x: &RotationMatrix) -> f64 {
    let r = x0.0 * x.0.transpose();
    let c = (0.5 * (r.trace() - 1.0)).clamp(-1.0, 1.0);
    vee_antisym(&r).norm().atan2(c)
}

/// `Rz(ψ)·Rx(θ)·Rz(φ)`. Accepts any finite angles, including chart boundary
/// values, since the result is only a rotation.
pub fn euler_to_rotation(x: &ChartPoint) -> RotationMatrix {
    let c = x.coords();
    let kz = mat(&K_Z);
    let kx = mat(&K_X);
    let rz1 = rodrigues(&vee_antisym(&(kz * c[0])));
    let rx = rodrigues(&vee_antisym(&(kx * c[1])));
    let rz2 = rodrigues(&vee_antisym(&(kz * c[2])));
    RotationMatrix(rz1 * rx * rz2)
}

/// Chart angles `(ψ, θ, φ)` of a rotation; fails on the gimbal set `sin θ = 0`.
pub fn rotation_to_euler(r: &RotationMatrix) -> Result<[f64; 3]> {
    let m = &r.0;
    let sin_theta = (m[(2, 0)].powi(2) + m[(2, 1)].powi(2)).sqrt();
    if sin_theta < 1e-12 {
        return Err(ReachError::boundary(
            &[f64::NAN, 0.0, f64::NAN],
            "rotation lies on the Euler-angle gimbal set",
        ));
    }
    let theta = sin_theta.atan2(m[(2, 2)]);
    let psi = m[(0, 2)].atan2(-m[(1, 2)]);
    let phi = m[(2, 0)].atan2(m[(2, 1)]);
    Ok([psi, theta, phi])
}

/// `Ẋ = ẋ₁K_xX + ẋ₂K_yX + ẋ₃K_zX`.
pub fn so3_lift_velocity(x: &ChartPoint, xdot: &TangentVector) -> Matrix3<f64> {
    let r = euler_to_rotation(x).0;
    let v = xdot.components();
    (mat(&K_X) * v[0] + mat(&K_Y) * v[1] + mat(&K_Z) * v[2]) * r
}

pub fn so3_metric(theta: f64) -> DMatrix<f64> {
    let c = theta.cos();
    DMatrix::from_row_slice(3, 3, &[1.0, 0.0, c, 0.0, 1.0, 0.0, c, 0.0, 1.0])
}

pub fn so3_metric_inverse(theta: f64) -> DMatrix<f64> {
    let c = theta.cos();
    let s2 = theta.sin().powi(2);
    DMatrix::from_row_slice(
        3,
        3,
        &[1.0 / s2, 0.0, -c / s2, 0.0, 1.0, 0.0, -c / s2, 0.0, 1.0 / s2],
    )
}

/// Spatial angular velocity per unit chart velocity: `ω = J(x)·ẋ`.
/// Columns are `ẑ`, `Rz(ψ)x̂` and `Rz(ψ)Rx(θ)ẑ`; `H = JᵀJ`.
fn angular_jacobian(x: &DVector<f64>) -> Matrix3<f64> {
    let (sp, cp) = x[0].sin_cos();
    let (st, ct) = x[1].sin_cos();
    Matrix3::new(0.0, cp, sp * st, 0.0, sp, -cp * st, 1.0, 0.0, ct)
}

#[derive(Debug, Clone)]
pub struct So3Euler {
    domain: ChartDomain,
}

impl So3Euler {
    pub fn new() -> Self {
        Self {
            domain: ChartDomain::new(vec![
                CoordRange::open(-PI, PI),
                CoordRange::open(0.0, PI),
                CoordRange::open(-PI, PI),
            ]),
        }
    }
}

impl Default for So3Euler {
    fn default() -> Self {
        Self::new()
    }
}

impl Manifold for So3Euler {
    fn name(&self) -> &str {
        "so3-euler"
    }

    fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    fn coord_names(&self) -> Vec<String> {
        vec!["psi".into(), "theta".into(), "phi".into()]
    }

    fn metric_at(&self, x: &ChartPoint) -> Result<Metric> {
        self.check_point(x)?;
        Metric::new(so3_metric(x.coords()[1]))
    }

    fn christoffel_at(&self, x: &ChartPoint) -> Result<Christoffel> {
        self.check_point(x)?;
        let (s, c) = x.coords()[1].sin_cos();
        let mut g = Christoffel::zeros(3);
        g.set_sym(0, 0, 1, c / (2.0 * s));
        g.set_sym(0, 1, 2, -1.0 / (2.0 * s));
        g.set_sym(1, 0, 2, s / 2.0);
        g.set_sym(2, 0, 1, -1.0 / (2.0 * s));
        g.set_sym(2, 1, 2, c / (2.0 * s));
        Ok(g)
    }

    fn distance(&self, x: &ChartPoint, y: &ChartPoint) -> Result<f64> {
        Ok(so3_misorientation(
            &euler_to_rotation(x),
            &euler_to_rotation(y),
        ))
    }

    fn exp(&self, v: &TangentVector) -> Result<ChartPoint> {
        let x = v.base();
        self.check_point(x)?;
        let j = angular_jacobian(x.coords());
        let w = j * Vector3::from_column_slice(v.components().as_slice());
        let moved = RotationMatrix::from_rotation_vector(w).compose(&euler_to_rotation(x));
        let angles = rotation_to_euler(&moved)
            .map_err(|_| ReachError::GeodesicExit { parameter: 1.0 })?;
        self.point(&angles)
            .map_err(|_| ReachError::GeodesicExit { parameter: 1.0 })
    }

    fn log(&self, x: &ChartPoint, y: &ChartPoint) -> Result<TangentVector> {
        self.check_point(x)?;
        self.check_point(y)?;
        let rx = euler_to_rotation(x);
        let w = euler_to_rotation(y).compose(&rx.transpose()).rotation_vector();
        let j = angular_jacobian(x.coords());
        let v = j
            .lu()
            .solve(&w)
            .ok_or_else(|| ReachError::boundary(x.as_slice(), "singular Euler-angle Jacobian"))?;
        TangentVector::new(x.clone(), DVector::from_column_slice(v.as_slice()))
    }

    fn embed(&self, x: &ChartPoint) -> DVector<f64> {
        let r = euler_to_rotation(x).0;
        DVector::from_iterator(9, (0..3).flat_map(|i| (0..3).map(move |j| r[(i, j)])))
    }

    fn embed_names(&self) -> Vec<String> {
        (1..=3)
            .flat_map(|i| (1..=3).map(move |j| format!("r{i}{j}")))
            .collect()
    }
}
