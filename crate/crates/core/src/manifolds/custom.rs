//! Manifolds defined by a structured-text document.
//!
//! ```toml
//! name = "sphere"
//! dim = 2
//! coords = ["theta", "phi"]
//! domain = [[0, "pi"], ["-pi", "pi"]]
//! metric = [["1", "0"], ["0", "sin(theta)^2"]]
//! distance = "numeric"          # or "flat"
//! exp = "numeric"               # or "flat"
//! embed = ["sin(theta)*cos(phi)", "sin(theta)*sin(phi)", "cos(theta)"]
//! ```
//!
//! Domain bounds are open intervals; either end may be a number, an
//! expression string, or `"inf"`/`"-inf"`. Metric entries are expressions in
//! the coordinate names (see [`crate::expr`]). `coords` defaults to
//! `x1 … xn`, `embed` to the chart coordinates themselves. The `flat` route
//! uses `x + v` for exp and the Euclidean chart distance; `numeric` integrates
//! the geodesic equation and shoots for the two-point problem.

use serde::{Deserialize, Serialize};

use nalgebra::{DMatrix, DVector};

use crate::error::{ReachError, Result};
use crate::expr::Expression;
use crate::geometry::{ChartDomain, ChartPoint, CoordRange, Metric, TangentVector};
use crate::manifolds::Manifold;

/// A number or an expression string such as `"pi/4"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarSpec {
    Number(f64),
    Expr(String),
}

impl ScalarSpec {
    pub fn value(&self) -> Result<f64> {
        match self {
            ScalarSpec::Number(v) => Ok(*v),
            ScalarSpec::Expr(s) => match s.trim() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                t => Expression::constant(t),
            },
        }
    }
}

impl From<f64> for ScalarSpec {
    fn from(v: f64) -> Self {
        ScalarSpec::Number(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeodesicRoute {
    #[default]
    Numeric,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldDefinition {
    pub name: String,
    pub dim: usize,
    #[serde(default)]
    pub coords: Option<Vec<String>>,
    pub domain: Vec<[ScalarSpec; 2]>,
    pub metric: Vec<Vec<String>>,
    #[serde(default)]
    pub distance: GeodesicRoute,
    #[serde(default)]
    pub exp: GeodesicRoute,
    #[serde(default)]
    pub embed: Option<Vec<String>>,
}

impl ManifoldDefinition {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ReachError::InvalidArgument(e.to_string()))
    }
}

/// A manifold built from a [`ManifoldDefinition`].
#[derive(Debug, Clone)]
pub struct ManifoldSpec {
    name: String,
    coords: Vec<String>,
    domain: ChartDomain,
    metric: Vec<Expression>,
    distance: GeodesicRoute,
    exp: GeodesicRoute,
    embed: Option<Vec<Expression>>,
}

impl ManifoldSpec {
    pub fn from_definition(def: &ManifoldDefinition) -> Result<Self> {
        let n = def.dim;
        if n == 0 {
            return Err(ReachError::InvalidArgument("dim must be positive".into()));
        }
        let coords = def
            .coords
            .clone()
            .unwrap_or_else(|| (1..=n).map(|i| format!("x{i}")).collect());
        if coords.len() != n {
            return Err(ReachError::Shape(format!(
                "coords has {} names for dim = {n}",
                coords.len()
            )));
        }
        if def.domain.len() != n {
            return Err(ReachError::Shape(format!(
                "domain has {} intervals for dim = {n}",
                def.domain.len()
            )));
        }
        let ranges = def
            .domain
            .iter()
            .map(|[lo, hi]| {
                let (lo, hi) = (lo.value()?, hi.value()?);
                if lo < hi {
                    Ok(CoordRange::open(lo, hi))
                } else {
                    Err(ReachError::InvalidArgument(format!(
                        "empty domain interval ({lo}, {hi})"
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if def.metric.len() != n || def.metric.iter().any(|r| r.len() != n) {
            return Err(ReachError::Shape(format!("metric must be {n}×{n}")));
        }
        let metric = def
            .metric
            .iter()
            .flatten()
            .map(|s| Expression::parse(s, &coords))
            .collect::<Result<Vec<_>>>()?;
        let embed = def
            .embed
            .as_ref()
            .map(|e| e.iter().map(|s| Expression::parse(s, &coords)).collect())
            .transpose()?;
        Ok(Self {
            name: def.name.clone(),
            coords,
            domain: ChartDomain::new(ranges),
            metric,
            distance: def.distance,
            exp: def.exp,
            embed,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_definition(&ManifoldDefinition::from_toml(text)?)
    }

    fn metric_matrix(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.coords.len();
        let vals = self
            .metric
            .iter()
            .map(|e| e.eval(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_row_slice(n, n, &vals))
    }
}

impl Manifold for ManifoldSpec {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    fn coord_names(&self) -> Vec<String> {
        self.coords.clone()
    }

    fn metric_at(&self, x: &ChartPoint) -> Result<Metric> {
        Metric::new(self.metric_matrix(x.as_slice())?)
    }

    fn is_flat(&self) -> bool {
        self.distance == GeodesicRoute::Flat && self.exp == GeodesicRoute::Flat
    }

    fn distance(&self, x: &ChartPoint, y: &ChartPoint) -> Result<f64> {
        match self.distance {
            GeodesicRoute::Flat => Ok((y.coords() - x.coords()).norm()),
            GeodesicRoute::Numeric => {
                let v = self.log(x, y)?;
                Ok(self.metric_at(x)?.vec_norm(v.components()))
            }
        }
    }

    fn exp(&self, v: &TangentVector) -> Result<ChartPoint> {
        match self.exp {
            GeodesicRoute::Flat => {
                let y = v.base().coords() + v.components();
                if self.domain.contains(y.as_slice()) {
                    Ok(ChartPoint::unchecked(y))
                } else {
                    Err(ReachError::GeodesicExit { parameter: 1.0 })
                }
            }
            GeodesicRoute::Numeric => crate::geometry::integrate_geodesic(
                self,
                v,
                crate::geometry::GeodesicOptions::default().steps,
            ),
        }
    }

    fn log(&self, x: &ChartPoint, y: &ChartPoint) -> Result<TangentVector> {
        match self.exp {
            GeodesicRoute::Flat => TangentVector::new(x.clone(), y.coords() - x.coords()),
            GeodesicRoute::Numeric => crate::geometry::shoot_log(
                self,
                x,
                y,
                &crate::geometry::GeodesicOptions::default(),
            ),
        }
    }

    fn embed(&self, x: &ChartPoint) -> DVector<f64> {
        match &self.embed {
            None => x.coords().clone(),
            Some(exprs) => DVector::from_iterator(
                exprs.len(),
                exprs
                    .iter()
                    .map(|e| e.eval(x.as_slice()).unwrap_or(f64::NAN)),
            ),
        }
    }

    fn embed_names(&self) -> Vec<String> {
        match &self.embed {
            None => self.coords.clone(),
            Some(e) => (1..=e.len()).map(|i| format!("e{i}")).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{christoffel_fd, FD_STEP};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    const SPHERE: &str = r#"
        name = "sphere"
        dim = 2
        coords = ["theta", "phi"]
        domain = [[0, "pi"], ["-pi", "pi"]]
        metric = [["1", "0"], ["0", "sin(theta)^2"]]
        embed = ["sin(theta)*cos(phi)", "sin(theta)*sin(phi)", "cos(theta)"]
    "#;

    fn sphere() -> ManifoldSpec {
        ManifoldSpec::from_toml(SPHERE).unwrap()
    }

    fn unit(v: [f64; 3]) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::from(v)
    }

    #[test]
    fn parses_sphere_definition() {
        let m = sphere();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.coord_names(), vec!["theta", "phi"]);
        let x = m.point(&[PI / 2.0, 0.3]).unwrap();
        assert_eq!(m.metric_at(&x).unwrap().matrix()[(1, 1)], 1.0);
        assert!(m.point(&[0.0, 0.0]).is_err());
        let e = m.embed(&x);
        assert_abs_diff_eq!(e.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn sphere_christoffel_matches_closed_form() {
        let m = sphere();
        let x = m.point(&[0.8, 0.1]).unwrap();
        let g = christoffel_fd(&m, &x, FD_STEP).unwrap();
        let (s, c) = 0.8f64.sin_cos();
        assert_abs_diff_eq!(g.get(0, 1, 1), -s * c, epsilon = 1e-8);
        assert_abs_diff_eq!(g.get(1, 0, 1), c / s, epsilon = 1e-8);
        assert_abs_diff_eq!(g.get(1, 1, 0), c / s, epsilon = 1e-8);
        assert_abs_diff_eq!(g.get(0, 0, 0), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn numeric_distance_matches_great_circle() {
        let m = sphere();
        for &(a, b) in &[
            ([1.0, -0.5], [1.4, 0.3]),
            ([0.6, 0.0], [2.0, 1.0]),
            ([1.5, 2.5], [1.2, 2.9]),
        ] {
            let x = m.point(&a).unwrap();
            let y = m.point(&b).unwrap();
            let d = m.distance(&x, &y).unwrap();
            let angle = unit(m.embed(&x).as_slice().try_into().unwrap())
                .angle(&unit(m.embed(&y).as_slice().try_into().unwrap()));
            assert_abs_diff_eq!(d, angle, epsilon = 1e-6);
            let back = m.exp(&m.log(&x, &y).unwrap()).unwrap();
            assert!((back.coords() - y.coords()).amax() < 1e-8);
        }
    }

    #[test]
    fn flat_route() {
        let m = ManifoldSpec::from_toml(
            r#"
            name = "plane"
            dim = 2
            domain = [["-inf", "inf"], ["-inf", "inf"]]
            metric = [["1", "0"], ["0", "1"]]
            distance = "flat"
            exp = "flat"
            "#,
        )
        .unwrap();
        assert!(m.is_flat());
        let x = m.point(&[0.0, 0.0]).unwrap();
        let y = m.point(&[3.0, 4.0]).unwrap();
        assert_eq!(m.distance(&x, &y).unwrap(), 5.0);
        assert_eq!(m.embed_names(), vec!["x1", "x2"]);
    }

    #[test]
    fn rejects_bad_definitions() {
        let bad_var = SPHERE.replace("sin(theta)^2", "sin(psi)^2");
        assert!(matches!(
            ManifoldSpec::from_toml(&bad_var),
            Err(ReachError::Expression { .. })
        ));
        let bad_shape = SPHERE.replace(r#"["0", "sin(theta)^2"]"#, r#"["0"]"#);
        assert!(matches!(
            ManifoldSpec::from_toml(&bad_shape),
            Err(ReachError::Shape(_))
        ));
        assert!(ManifoldSpec::from_toml("name = 1").is_err());
    }

    #[test]
    fn scalar_spec_values() {
        assert_eq!(ScalarSpec::Number(2.0).value().unwrap(), 2.0);
        assert_eq!(ScalarSpec::Expr("pi/2".into()).value().unwrap(), PI / 2.0);
        assert_eq!(
            ScalarSpec::Expr("-inf".into()).value().unwrap(),
            f64::NEG_INFINITY
        );
    }
}
