use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{ReachError, Result};
use crate::geometry::{ChartPoint, TangentVector};
use crate::manifolds::Manifold;

type PathFn = Arc<dyn Fn(f64) -> Result<DVector<f64>> + Send + Sync>;

/// Step for differentiating curves that only expose positions.
const CURVE_FD_STEP: f64 = 1e-6;

/// A curve `[0, 1] → M` in chart coordinates together with its velocity.
#[derive(Clone)]
pub struct Curve {
    position: PathFn,
    velocity: PathFn,
    is_geodesic: bool,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve")
            .field("is_geodesic", &self.is_geodesic)
            .finish_non_exhaustive()
    }
}

impl Curve {
    pub fn new<P, V>(position: P, velocity: V) -> Self
    where
        P: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
        V: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    {
        Self {
            position: Arc::new(move |t| Ok(position(t))),
            velocity: Arc::new(move |t| Ok(velocity(t))),
            is_geodesic: false,
        }
    }

    /// Straight line in chart coordinates.
    pub fn segment(a: &ChartPoint, b: &ChartPoint) -> Self {
        let a = a.coords().clone();
        let d = b.coords() - &a;
        let d2 = d.clone();
        Self::new(move |t| &a + &d * t, move |_| d2.clone())
    }

    /// `t ↦ exp_x(t·v)`; the velocity is a central difference of positions.
    pub fn geodesic(manifold: Arc<dyn Manifold>, v: TangentVector) -> Self {
        let pos: PathFn = Arc::new(move |t: f64| {
            manifold.exp(&v.scaled(t)).map(|p| p.coords().clone())
        });
        let pos_for_vel = pos.clone();
        let vel: PathFn = Arc::new(move |t: f64| {
            let h = CURVE_FD_STEP;
            Ok((pos_for_vel(t + h)? - pos_for_vel(t - h)?) / (2.0 * h))
        });
        Self {
            position: pos,
            velocity: vel,
            is_geodesic: true,
        }
    }

    /// Composes with a monotone reparameterisation `s = phi(t)` of `[0, 1]`.
    pub fn reparameterized<P, D>(&self, phi: P, dphi: D) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + Clone + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let pos = self.position.clone();
        let vel = self.velocity.clone();
        let phi2 = phi.clone();
        Self {
            position: Arc::new(move |t| pos(phi(t))),
            velocity: Arc::new(move |t| Ok(vel(phi2(t))? * dphi(t))),
            is_geodesic: self.is_geodesic,
        }
    }

    pub fn is_geodesic(&self) -> bool {
        self.is_geodesic
    }

    pub fn position(&self, t: f64) -> Result<DVector<f64>> {
        (self.position)(t)
    }

    pub fn velocity(&self, t: f64) -> Result<DVector<f64>> {
        (self.velocity)(t)
    }

    /// Point and velocity at `t`, checked against the manifold's chart.
    pub fn tangent<M: Manifold + ?Sized>(&self, manifold: &M, t: f64) -> Result<TangentVector> {
        let p = self.position(t)?;
        let base = manifold.point(p.as_slice())?;
        TangentVector::new(base, self.velocity(t)?)
    }
}

/// `∫₀¹ |γ̇(t)|_{h_γ(t)} dt` by composite Simpson's rule.
pub fn curve_length<M: Manifold + ?Sized>(
    curve: &Curve,
    manifold: &M,
    quadrature_points: usize,
) -> Result<f64> {
    if quadrature_points == 0 {
        return Err(ReachError::InvalidArgument(
            "quadrature needs at least one interval".into(),
        ));
    }
    let n = quadrature_points + quadrature_points % 2;
    let h = 1.0 / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let t = i as f64 * h;
        let tv = curve.tangent(manifold, t)?;
        let speed = manifold.metric_at(tv.base())?.vec_norm(tv.components());
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * speed;
    }
    Ok(sum * h / 3.0)
}
