//! Built-in manifolds and the expression-defined [`ManifoldSpec`].

mod circle;
mod custom;
mod euclidean;
mod so3;

pub use circle::{circle_embed, Circle};
pub use custom::{GeodesicRoute, ManifoldDefinition, ManifoldSpec, ScalarSpec};
pub use euclidean::Euclidean;
pub use so3::{
    euler_to_rotation, rotation_to_euler, so3_lift_velocity, so3_misorientation, so3_metric,
    so3_metric_inverse, RotationMatrix, So3Euler, K_X, K_Y, K_Z,
};

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{ReachError, Result};
use crate::geometry::{
    christoffel_fd, integrate_geodesic, shoot_log, ChartDomain, ChartPoint, Christoffel,
    GeodesicOptions, Metric, TangentVector, FD_STEP,
};

/// A Riemannian manifold described in one open chart.
///
/// Only [`metric_at`](Manifold::metric_at), [`domain`](Manifold::domain) and
/// [`name`](Manifold::name) are required. The remaining methods fall back to
/// numerical routes: finite-difference Christoffel symbols, RK4 integration of
/// the geodesic equation for `exp`, and Newton shooting for `log`/`distance`.
pub trait Manifold: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn domain(&self) -> &ChartDomain;

    fn dim(&self) -> usize {
        self.domain().dim()
    }

    fn coord_names(&self) -> Vec<String> {
        (1..=self.dim()).map(|i| format!("x{i}")).collect()
    }

    fn metric_at(&self, x: &ChartPoint) -> Result<Metric>;

    fn christoffel_at(&self, x: &ChartPoint) -> Result<Christoffel> {
        christoffel_fd(self, x, FD_STEP)
    }

    /// True when the metric is the identity everywhere in the chart.
    fn is_flat(&self) -> bool {
        false
    }

    fn distance(&self, x: &ChartPoint, y: &ChartPoint) -> Result<f64> {
        let v = self.log(x, y)?;
        Ok(self.metric_at(x)?.vec_norm(v.components()))
    }

    /// Time-one point of the geodesic with initial velocity `v`.
    fn exp(&self, v: &TangentVector) -> Result<ChartPoint> {
        integrate_geodesic(self, v, GeodesicOptions::default().steps)
    }

    /// Initial velocity at `x` of the geodesic reaching `y` at time one.
    fn log(&self, x: &ChartPoint, y: &ChartPoint) -> Result<TangentVector> {
        shoot_log(self, x, y, &GeodesicOptions::default())
    }

    /// Ambient representation used for output.
    fn embed(&self, x: &ChartPoint) -> DVector<f64> {
        x.coords().clone()
    }

    fn embed_names(&self) -> Vec<String> {
        (1..=self.embed(&ChartPoint::unchecked(DVector::zeros(self.dim()))).len())
            .map(|i| format!("e{i}"))
            .collect()
    }

    fn point(&self, coords: &[f64]) -> Result<ChartPoint> {
        self.domain().point(coords)
    }

    fn tangent(&self, x: &ChartPoint, components: &[f64]) -> Result<TangentVector> {
        TangentVector::new(x.clone(), DVector::from_column_slice(components))
    }

    fn check_point(&self, x: &ChartPoint) -> Result<()> {
        if self.domain().contains(x.as_slice()) {
            Ok(())
        } else {
            Err(ReachError::boundary(
                x.as_slice(),
                format!("point outside the {} chart", self.name()),
            ))
        }
    }
}

/// Looks up a built-in manifold by name: `circle`, `so3-euler`, or
/// `euclidean<n>` / `r<n>` for flat space of dimension n.
pub fn builtin(name: &str) -> Result<Arc<dyn Manifold>> {
    let lower = name.trim().to_ascii_lowercase();
    match lower.as_str() {
        "circle" | "s1" => return Ok(Arc::new(Circle)),
        "so3" | "so3-euler" => return Ok(Arc::new(So3Euler::new())),
        _ => {}
    }
    let digits = lower
        .strip_prefix("euclidean")
        .or_else(|| lower.strip_prefix('r'));
    if let Some(d) = digits {
        if let Ok(n) = d.parse::<usize>() {
            if n > 0 {
                return Ok(Arc::new(Euclidean::new(n)));
            }
        }
    }
    Err(ReachError::InvalidArgument(format!(
        "unknown built-in manifold `{name}` (expected circle, so3-euler, or euclidean<n>)"
    )))
}
