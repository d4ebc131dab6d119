//! Numerical geodesics: RK4 integration of the geodesic equation and
//! Newton shooting for the two-point problem.

use nalgebra::{DMatrix, DVector};

use crate::error::{ReachError, Result};
use crate::geometry::{ChartPoint, TangentVector};
use crate::manifolds::Manifold;

/// Endpoint tolerance for shooting, in chart coordinates.
pub const GEODESIC_TOLERANCE: f64 = 1e-8;
pub const GEODESIC_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicOptions {
    /// RK4 steps over the unit parameter interval.
    pub steps: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Forward-difference step for the shooting Jacobian.
    pub jacobian_step: f64,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            steps: 200,
            tolerance: GEODESIC_TOLERANCE,
            max_iterations: GEODESIC_MAX_ITERATIONS,
            jacobian_step: 1e-7,
        }
    }
}

fn geodesic_rhs<M: Manifold + ?Sized>(
    manifold: &M,
    x: &DVector<f64>,
    v: &DVector<f64>,
    t: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    if !manifold.domain().contains(x.as_slice()) {
        return Err(ReachError::GeodesicExit { parameter: t });
    }
    let gamma = manifold.christoffel_at(&ChartPoint::unchecked(x.clone()))?;
    Ok((v.clone(), -gamma.contract(v, v)))
}

/// Integrates `ẍᵏ = −Γᵏᵢⱼ ẋⁱ ẋʲ` over `t ∈ [0, 1]` with classical RK4.
pub fn integrate_geodesic<M: Manifold + ?Sized>(
    manifold: &M,
    v: &TangentVector,
    steps: usize,
) -> Result<ChartPoint> {
    manifold.check_point(v.base())?;
    if v.is_zero() {
        return Ok(v.base().clone());
    }
    let steps = steps.max(1);
    let h = 1.0 / steps as f64;
    let mut x = v.base().coords().clone();
    let mut xd = v.components().clone();
    for s in 0..steps {
        let t = s as f64 * h;
        let (k1x, k1v) = geodesic_rhs(manifold, &x, &xd, t)?;
        let (k2x, k2v) =
            geodesic_rhs(manifold, &(&x + &k1x * (h / 2.0)), &(&xd + &k1v * (h / 2.0)), t + h / 2.0)?;
        let (k3x, k3v) =
            geodesic_rhs(manifold, &(&x + &k2x * (h / 2.0)), &(&xd + &k2v * (h / 2.0)), t + h / 2.0)?;
        let (k4x, k4v) = geodesic_rhs(manifold, &(&x + &k3x * h), &(&xd + &k3v * h), t + h)?;
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        xd += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
    }
    if !manifold.domain().contains(x.as_slice()) {
        return Err(ReachError::GeodesicExit { parameter: 1.0 });
    }
    Ok(ChartPoint::unchecked(x))
}

/// Solves `exp_x(v) = y` for `v` by damped Newton iteration on the
/// manifold's own exponential map, starting from the chart difference.
pub fn shoot_log<M: Manifold + ?Sized>(
    manifold: &M,
    x: &ChartPoint,
    y: &ChartPoint,
    opts: &GeodesicOptions,
) -> Result<TangentVector> {
    manifold.check_point(x)?;
    manifold.check_point(y)?;
    let n = manifold.dim();
    let target = y.coords();
    let residual_of = |v: &DVector<f64>| -> Result<DVector<f64>> {
        let tv = TangentVector::new(x.clone(), v.clone())?;
        Ok(manifold.exp(&tv)?.coords() - target)
    };

    let mut v = target - x.coords();
    let mut r = residual_of(&v)?;
    let mut iterations = 0;
    while r.amax() > opts.tolerance {
        if iterations >= opts.max_iterations {
            return Err(ReachError::NoGeodesic {
                iterations,
                residual: r.amax(),
            });
        }
        iterations += 1;

        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut vp = v.clone();
            let step = opts.jacobian_step * v[j].abs().max(1.0);
            vp[j] += step;
            let rp = residual_of(&vp)?;
            jac.set_column(j, &((rp - &r) / step));
        }
        let delta = jac.lu().solve(&(-&r)).ok_or(ReachError::NoGeodesic {
            iterations,
            residual: r.amax(),
        })?;

        // Backtrack until the residual decreases.
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let cand = &v + &delta * scale;
            if let Ok(rc) = residual_of(&cand) {
                if rc.norm() < r.norm() {
                    accepted = Some((cand, rc));
                    break;
                }
            }
            scale *= 0.5;
        }
        match accepted {
            Some((vn, rn)) => {
                v = vn;
                r = rn;
            }
            None => {
                return Err(ReachError::NoGeodesic {
                    iterations,
                    residual: r.amax(),
                })
            }
        }
    }
    TangentVector::new(x.clone(), v)
}

/// Riemannian distance, delegating to the manifold's own route.
pub fn distance<M: Manifold + ?Sized>(manifold: &M, x: &ChartPoint, y: &ChartPoint) -> Result<f64> {
    manifold.check_point(x)?;
    manifold.check_point(y)?;
    if x == y {
        return Ok(0.0);
    }
    manifold.distance(x, y)
}

/// Exponential map; the zero vector maps to its base point bit for bit.
pub fn exp_map<M: Manifold + ?Sized>(manifold: &M, v: &TangentVector) -> Result<ChartPoint> {
    manifold.check_point(v.base())?;
    if v.is_zero() {
        return Ok(v.base().clone());
    }
    manifold.exp(v)
}
