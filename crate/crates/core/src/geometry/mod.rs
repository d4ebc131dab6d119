//! Chart-based Riemannian geometry kernel.
//!
//! Points and tangent vectors are stored as coordinate arrays of a single open
//! chart. Tangent components are taken with respect to the coordinate basis
//! `∂/∂xⁱ` at the base point. Nothing here knows about a particular manifold;
//! the [`Manifold`](crate::manifolds::Manifold) trait supplies the metric and,
//! where available, closed-form geodesics.

mod christoffel;
mod curve;
mod geodesic;
mod metric;
mod transport;

pub use christoffel::{christoffel, christoffel_fd, Christoffel, ChristoffelMode, FD_STEP};
pub use curve::{curve_length, Curve};
pub use geodesic::{
    distance, exp_map, integrate_geodesic, shoot_log, GeodesicOptions, GEODESIC_MAX_ITERATIONS,
    GEODESIC_TOLERANCE,
};
pub use metric::{
    norm_equivalence_factors, riemannian_mat_norm, riemannian_vec_norm, Metric, NormFactors,
};
pub(crate) use metric::spectral_norm;
pub use transport::{covariant_derivative, parallel_transport, TRANSPORT_STEP};

use nalgebra::DVector;

use crate::error::{ReachError, Result};

/// Affine connection used for covariant derivatives and transport.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connection {
    /// Levi-Civita connection of the manifold metric.
    LeviCivita,
    /// All connection coefficients identically zero.
    Flat,
}

/// One coordinate range of a chart domain. The lower end is always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordRange {
    pub lo: f64,
    pub hi: f64,
    pub hi_inclusive: bool,
}

impl CoordRange {
    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            hi_inclusive: false,
        }
    }

    pub fn half_open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            hi_inclusive: true,
        }
    }

    pub fn unbounded() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, v: f64) -> bool {
        v > self.lo && (v < self.hi || (self.hi_inclusive && v == self.hi))
    }
}

/// Product of coordinate ranges describing a single chart patch.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartDomain {
    ranges: Vec<CoordRange>,
}

impl ChartDomain {
    pub fn new(ranges: Vec<CoordRange>) -> Self {
        Self { ranges }
    }

    pub fn unbounded(dim: usize) -> Self {
        Self::new(vec![CoordRange::unbounded(); dim])
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[CoordRange] {
        &self.ranges
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == self.ranges.len()
            && coords
                .iter()
                .zip(&self.ranges)
                .all(|(&c, r)| c.is_finite() && r.contains(c))
    }

    /// Validates `coords` and wraps them as a [`ChartPoint`].
    pub fn point(&self, coords: &[f64]) -> Result<ChartPoint> {
        if coords.len() != self.dim() {
            return Err(ReachError::Shape(format!(
                "chart point has {} coordinates, chart dimension is {}",
                coords.len(),
                self.dim()
            )));
        }
        if !self.contains(coords) {
            return Err(ReachError::boundary(coords, "point outside chart domain"));
        }
        Ok(ChartPoint {
            coords: DVector::from_column_slice(coords),
        })
    }
}

/// A state in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    coords: DVector<f64>,
}

impl ChartPoint {
    /// Wraps coordinates without a domain check. Used for display-only points
    /// (e.g. chart boundary values) and internally after a check has been made.
    pub fn unchecked(coords: DVector<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A velocity at a base point, in coordinate-basis components.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: ChartPoint,
    components: DVector<f64>,
}

impl TangentVector {
    pub fn new(base: ChartPoint, components: DVector<f64>) -> Result<Self> {
        if components.len() != base.dim() {
            return Err(ReachError::Shape(format!(
                "tangent vector has {} components at a {}-dimensional point",
                components.len(),
                base.dim()
            )));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(ReachError::InvalidArgument(
                "tangent vector components must be finite".into(),
            ));
        }
        Ok(Self { base, components })
    }

    pub fn zero(base: ChartPoint) -> Self {
        let n = base.dim();
        Self {
            base,
            components: DVector::zeros(n),
        }
    }

    pub fn base(&self) -> &ChartPoint {
        &self.base
    }

    pub fn components(&self) -> &DVector<f64> {
        &self.components
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            base: self.base.clone(),
            components: &self.components * s,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0.0)
    }
}
