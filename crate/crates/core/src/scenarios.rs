//! The two worked examples: the heavily damped pendulum on S¹ and the
//! Euler-angle rotation system on SO(3).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::bounds::{BoundEnvelope, LocalData};
use crate::dynamics::{damped_pendulum, so3_truth, ControlAffine};
use crate::error::Result;
use crate::manifolds::{Circle, Manifold, So3Euler};
use crate::reach::SurrogateSystem;

/// A surrogate system together with the truth dynamics it stands in for.
#[derive(Debug, Clone)]
pub struct Example {
    pub system: SurrogateSystem,
    pub truth: Arc<dyn ControlAffine>,
}

/// `θ̇ = −½ sin θ + u` from `θ₀ = π/4` with `L_f = 1.5`, `L_g = 0`.
pub fn pendulum() -> Result<Example> {
    let local = LocalData::new(
        Circle.point(&[FRAC_PI_4])?,
        DVector::from_element(1, -(FRAC_PI_4.sin()) / 2.0),
        DMatrix::from_element(1, 1, 1.0),
        1.5,
        vec![0.0],
    )?;
    Ok(Example {
        system: SurrogateSystem::new(Arc::new(Circle), local, None)?,
        truth: Arc::new(damped_pendulum()),
    })
}

/// The rotation system from `x₀ = (0, π/2, 0)` with `L_g = (0.65, 0)`,
/// `L_f = 0`, `‖H‖ < 1.2` and `‖H⁻¹‖⁻¹ > 0.8`.
pub fn so3() -> Result<Example> {
    let m = So3Euler::new();
    let x0 = m.point(&[0.0, FRAC_PI_2, 0.0])?;
    let truth = so3_truth();
    let g0 = truth.input_matrix(&x0)?;
    let local = LocalData::new(x0, DVector::zeros(3), g0, 0.0, vec![0.65, 0.0])?;
    let env = BoundEnvelope::from_eigen_bounds(1.2, 0.8)?;
    Ok(Example {
        system: SurrogateSystem::new(Arc::new(m), local, Some(env))?,
        truth: Arc::new(truth),
    })
}
