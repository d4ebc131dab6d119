//! The guaranteed velocity set underapproximation: a Euclidean ball around
//! the flat-transported drift, intersected with the flat-transported image of
//! `G(x₀)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bounds::{evaluate, EnvelopePolicy, LocalData, PointBounds};
use crate::dynamics::{least_squares_control, ControlAffine};
use crate::error::{ReachError, Result};
use crate::geometry::{ChartPoint, TangentVector};
use crate::manifolds::Manifold;

/// `B(center; radius) ∩ span(image_basis)` in `T_xM`. A negative radius is
/// the empty set.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityBall {
    pub base: ChartPoint,
    pub center: TangentVector,
    pub radius: f64,
    pub image_basis: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    UniformBall,
    Boundary,
}

impl VelocityBall {
    /// Flat transport carries components unchanged, so the center and basis
    /// at `x` are those at `x₀`.
    pub fn from_local(local: &LocalData, x: &ChartPoint, radius: f64) -> Result<Self> {
        Ok(Self {
            base: x.clone(),
            center: TangentVector::new(x.clone(), local.f0().clone())?,
            radius,
            image_basis: local.image_basis().clone(),
        })
    }

    pub fn is_empty(&self) -> bool {
        !(self.radius >= 0.0)
    }

    pub fn rank(&self) -> usize {
        self.image_basis.ncols()
    }

    /// `center + radius · B u` for `u` in image coordinates.
    pub fn velocity(&self, u: &DVector<f64>) -> Result<TangentVector> {
        if self.is_empty() {
            return Err(ReachError::EmptyVelocitySet { alpha: self.radius });
        }
        if u.len() != self.rank() {
            return Err(ReachError::Shape(format!(
                "control has {} entries, image has dimension {}",
                u.len(),
                self.rank()
            )));
        }
        let c = self.center.components() + &self.image_basis * u * self.radius;
        TangentVector::new(self.base.clone(), c)
    }

    pub fn contains(&self, v: &TangentVector, tol: f64) -> Result<bool> {
        contains_velocity(self, v, tol)
    }
}

/// The ball at `x`, together with the bounds that produced it.
pub fn gvs_with_bounds<M: Manifold + ?Sized>(
    manifold: &M,
    local: &LocalData,
    policy: &EnvelopePolicy,
    x: &ChartPoint,
) -> Result<(VelocityBall, PointBounds)> {
    let b = evaluate(manifold, local, policy, x)?;
    Ok((VelocityBall::from_local(local, x, b.alpha)?, b))
}

/// The guaranteed velocity ball at `x`; empty when `d(x₀, x)` exceeds the
/// admissible radius.
pub fn gvs_at<M: Manifold + ?Sized>(
    manifold: &M,
    local: &LocalData,
    policy: &EnvelopePolicy,
    x: &ChartPoint,
) -> Result<VelocityBall> {
    gvs_with_bounds(manifold, local, policy, x).map(|(ball, _)| ball)
}

pub fn contains_velocity(ball: &VelocityBall, v: &TangentVector, tol: f64) -> Result<bool> {
    if v.base() != &ball.base {
        return Err(ReachError::BaseMismatch);
    }
    if ball.is_empty() {
        return Ok(false);
    }
    let comps = v.components();
    let b = &ball.image_basis;
    let off_span = (comps - b * (b.transpose() * comps)).norm();
    let from_center = (comps - ball.center.components()).norm();
    Ok(from_center <= ball.radius + tol && off_span <= tol)
}

/// A point drawn uniformly from the closed unit ball of `ℝᵈ`, or from its
/// boundary sphere.
pub fn sample_unit_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, mode: SampleMode) -> DVector<f64> {
    if dim == 0 {
        return DVector::zeros(0);
    }
    let mut dir = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let norm = dir.norm();
    if norm == 0.0 {
        dir = DVector::zeros(dim);
        dir[0] = 1.0;
    } else {
        dir /= norm;
    }
    match mode {
        SampleMode::Boundary => dir,
        SampleMode::UniformBall => {
            let r: f64 = rng.random::<f64>().powf(1.0 / dim as f64);
            dir * r
        }
    }
}

pub fn sample_velocities(
    ball: &VelocityBall,
    k: usize,
    seed: u64,
    mode: SampleMode,
) -> Result<Vec<TangentVector>> {
    if ball.is_empty() {
        return Err(ReachError::EmptyVelocitySet { alpha: ball.radius });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| {
            let mut u = sample_unit_ball(&mut rng, ball.rank(), mode);
            // Keep ‖B u‖ ≤ 1 exactly after rounding.
            let n = u.norm();
            if n > 1.0 {
                u /= n;
            }
            ball.velocity(&u)
        })
        .collect()
}

/// Membership in the true available velocity set `f(x) + G(x)·B(0; 1)`.
#[derive(Debug, Clone)]
pub struct AvailableVelocityOracle {
    pub dynamics: Arc<dyn ControlAffine>,
}

/// Outcome of one oracle query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleVerdict {
    pub control_norm: f64,
    pub residual: f64,
}

impl OracleVerdict {
    pub fn admits(&self, control_tol: f64, residual_tol: f64) -> bool {
        self.control_norm <= 1.0 + control_tol && self.residual <= residual_tol
    }
}

impl AvailableVelocityOracle {
    pub fn new(dynamics: Arc<dyn ControlAffine>) -> Self {
        Self { dynamics }
    }

    /// Least-squares control for `v` at its base point.
    pub fn query(&self, v: &TangentVector) -> Result<OracleVerdict> {
        let x = v.base();
        let (u, residual) = least_squares_control(
            &self.dynamics.input_matrix(x)?,
            &self.dynamics.drift(x)?,
            v.components(),
        )?;
        Ok(OracleVerdict {
            control_norm: u.norm(),
            residual,
        })
    }
}
