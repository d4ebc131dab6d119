use nalgebra::{DMatrix, DVector};

use crate::error::{ReachError, Result};
use crate::geometry::{ChartPoint, Christoffel, Connection, Curve, TangentVector, FD_STEP};
use crate::manifolds::Manifold;

/// Default transport step in curve-parameter units.
pub const TRANSPORT_STEP: f64 = 1e-3;

fn coefficients<M: Manifold + ?Sized>(
    manifold: &M,
    x: &ChartPoint,
    connection: Connection,
) -> Result<Christoffel> {
    match connection {
        Connection::Flat => Ok(Christoffel::zeros(manifold.dim())),
        Connection::LeviCivita => manifold.christoffel_at(x),
    }
}

/// `∇_γ̇ f = Σ γ̇ⁱ (∂fᵏ/∂xⁱ + fʲ Γᵏᵢⱼ) e_k` with a central-difference Jacobian.
pub fn covariant_derivative<M, F>(
    field: F,
    gamma_dot: &TangentVector,
    manifold: &M,
    connection: Connection,
) -> Result<TangentVector>
where
    M: Manifold + ?Sized,
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let x = gamma_dot.base();
    manifold.check_point(x)?;
    let n = manifold.dim();
    let fx = field(x.coords());
    if fx.len() != n {
        return Err(ReachError::Shape(format!(
            "vector field returned {} components on a {n}-dimensional chart",
            fx.len()
        )));
    }
    let v = gamma_dot.components();
    let mut out = DVector::zeros(n);
    for i in 0..n {
        if v[i] == 0.0 {
            continue;
        }
        let mut plus = x.coords().clone();
        let mut minus = x.coords().clone();
        plus[i] += FD_STEP;
        minus[i] -= FD_STEP;
        if !manifold.domain().contains(plus.as_slice())
            || !manifold.domain().contains(minus.as_slice())
        {
            return Err(ReachError::boundary(
                x.as_slice(),
                "Jacobian stencil leaves the chart",
            ));
        }
        let df = (field(&plus) - field(&minus)) / (2.0 * FD_STEP);
        out += df * v[i];
    }
    out += coefficients(manifold, x, connection)?.contract(v, &fx);
    TangentVector::new(x.clone(), out)
}

fn transport_rhs<M: Manifold + ?Sized>(
    manifold: &M,
    curve: &Curve,
    t: f64,
    vectors: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let tv = curve.tangent(manifold, t)?;
    let gamma = manifold.christoffel_at(tv.base())?;
    Ok(-gamma.contract_columns(tv.components(), vectors))
}

/// Transports each column of `vectors` from `curve(0)` to `curve(1)` by
/// integrating `∇_γ̇ V = 0` with fixed-step RK4.
pub fn parallel_transport<M: Manifold + ?Sized>(
    vectors: &DMatrix<f64>,
    curve: &Curve,
    manifold: &M,
    connection: Connection,
    step: f64,
) -> Result<DMatrix<f64>> {
    if !(step > 0.0) {
        return Err(ReachError::InvalidArgument(format!(
            "transport step must be positive, got {step}"
        )));
    }
    if vectors.nrows() != manifold.dim() {
        return Err(ReachError::Shape(format!(
            "transported vectors have {} rows on a {}-dimensional chart",
            vectors.nrows(),
            manifold.dim()
        )));
    }
    // Endpoints must be valid for either connection.
    curve.tangent(manifold, 0.0)?;
    curve.tangent(manifold, 1.0)?;
    if connection == Connection::Flat {
        return Ok(vectors.clone());
    }

    let steps = (1.0 / step).ceil() as usize;
    let h = 1.0 / steps as f64;
    let mut v = vectors.clone();
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = transport_rhs(manifold, curve, t, &v)?;
        let k2 = transport_rhs(manifold, curve, t + h / 2.0, &(&v + &k1 * (h / 2.0)))?;
        let k3 = transport_rhs(manifold, curve, t + h / 2.0, &(&v + &k2 * (h / 2.0)))?;
        let k4 = transport_rhs(manifold, curve, t + h, &(&v + &k3 * h))?;
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(v)
}
