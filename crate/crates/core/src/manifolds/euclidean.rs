use nalgebra::DVector;

use crate::error::Result;
use crate::geometry::{ChartDomain, ChartPoint, Christoffel, Metric, TangentVector};
use crate::manifolds::Manifold;

/// Flat ℝⁿ in Cartesian coordinates.
#[derive(Debug, Clone)]
pub struct Euclidean {
    name: String,
    domain: ChartDomain,
}

impl Euclidean {
    pub fn new(n: usize) -> Self {
        Self {
            name: format!("euclidean{n}"),
            domain: ChartDomain::unbounded(n),
        }
    }
}

impl Manifold for Euclidean {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    fn metric_at(&self, x: &ChartPoint) -> Result<Metric> {
        self.check_point(x)?;
        Ok(Metric::identity(self.dim()))
    }

    fn christoffel_at(&self, x: &ChartPoint) -> Result<Christoffel> {
        self.check_point(x)?;
        Ok(Christoffel::zeros(self.dim()))
    }

    fn is_flat(&self) -> bool {
        true
    }

    fn distance(&self, x: &ChartPoint, y: &ChartPoint) -> Result<f64> {
        Ok((x.coords() - y.coords()).norm())
    }

    fn exp(&self, v: &TangentVector) -> Result<ChartPoint> {
        self.point((v.base().coords() + v.components()).as_slice())
    }

    fn log(&self, x: &ChartPoint, y: &ChartPoint) -> Result<TangentVector> {
        TangentVector::new(x.clone(), y.coords() - x.coords())
    }

    fn embed(&self, x: &ChartPoint) -> DVector<f64> {
        x.coords().clone()
    }

    fn embed_names(&self) -> Vec<String> {
        (1..=self.dim()).map(|i| format!("e{i}")).collect()
    }
}
