use std::f64::consts::{PI, TAU};

use nalgebra::DVector;

use crate::error::Result;
use crate::geometry::{ChartDomain, ChartPoint, Christoffel, CoordRange, Metric, TangentVector};
use crate::manifolds::Manifold;

/// The unit circle in the angle chart θ ∈ (−π, π].
///
/// Distances wrap around; the exponential map does not, so a step that
/// crosses ±π leaves the chart.
#[derive(Debug, Clone, Copy, Default)]
pub struct Circle;

fn chart() -> &'static ChartDomain {
    static DOMAIN: std::sync::OnceLock<ChartDomain> = std::sync::OnceLock::new();
    DOMAIN.get_or_init(|| ChartDomain::new(vec![CoordRange::half_open(-PI, PI)]))
}

/// Signed angle `b − a` wrapped into (−π, π].
fn wrapped_difference(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// `(cos θ, sin θ)`.
pub fn circle_embed(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

impl Manifold for Circle {
    fn name(&self) -> &str {
        "circle"
    }

    fn domain(&self) -> &ChartDomain {
        chart()
    }

    fn coord_names(&self) -> Vec<String> {
        vec!["theta".into()]
    }

    fn metric_at(&self, x: &ChartPoint) -> Result<Metric> {
        self.check_point(x)?;
        Ok(Metric::identity(1))
    }

    fn christoffel_at(&self, x: &ChartPoint) -> Result<Christoffel> {
        self.check_point(x)?;
        Ok(Christoffel::zeros(1))
    }

    fn is_flat(&self) -> bool {
        true
    }

    fn distance(&self, x: &ChartPoint, y: &ChartPoint) -> Result<f64> {
        Ok(wrapped_difference(x.coords()[0], y.coords()[0]).abs())
    }

    fn exp(&self, v: &TangentVector) -> Result<ChartPoint> {
        self.point(&[v.base().coords()[0] + v.components()[0]])
    }

    fn log(&self, x: &ChartPoint, y: &ChartPoint) -> Result<TangentVector> {
        let d = wrapped_difference(x.coords()[0], y.coords()[0]);
        TangentVector::new(x.clone(), DVector::from_element(1, d))
    }

    fn embed(&self, x: &ChartPoint) -> DVector<f64> {
        DVector::from_column_slice(&circle_embed(x.coords()[0]))
    }

    fn embed_names(&self) -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }
}
