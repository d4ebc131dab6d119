//! Scenario files.
//!
//! ```toml
//! schema_version = 1
//! name = "pendulum"                 # optional
//! manifold = "circle"               # built-in name, { file = "…" }, or an inline table
//!
//! [local]
//! x0 = ["pi/4"]                     # numbers or constant expressions
//! f0 = ["-sqrt(2)/4"]
//! G0 = [[1.0]]                      # row-major n × m
//! L_f = 1.5
//! L_g = [0.0]                       # one entry per column of G0
//!
//! [envelope]                        # optional; pointwise metric norms otherwise
//! h_norm_hi = 1.2                   # bound on ‖H‖
//! h_inv_norm_lo = 0.8               # bound ‖H⁻¹‖⁻¹ >, or h_inv_norm_hi for ‖H⁻¹‖ <
//!
//! [run]
//! horizon = 1.0
//! dt = 0.001
//! trajectories = 500
//! seed = 1
//! policy = "random"                 # or "bang"
//! workers = 0                       # 0 = all cores
//!
//! [truth]                           # required by `validate`
//! f = ["-0.5*sin(theta)"]           # expressions in the coordinate names
//! G = [["1"]]
//!
//! [gvs]
//! samples = 200                     # points drawn uniformly in x0 ± spread
//! spread = 1.0
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use riemreach::bounds::{BoundEnvelope, LocalData};
use riemreach::dynamics::{ControlAffine, ExprDynamics};
use riemreach::manifolds::{builtin, Manifold, ManifoldDefinition, ManifoldSpec, ScalarSpec};
use riemreach::reach::{ControlPolicy, ReachOptions, SurrogateSystem};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, message: String },
    Parse { path: PathBuf, message: String },
    Invalid { field: String, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            ConfigError::Parse { path, message } => {
                write!(f, "{}: parse error: {message}", path.display())
            }
            ConfigError::Invalid { field, message } => write!(f, "invalid `{field}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(field: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalConfig {
    pub x0: Vec<ScalarSpec>,
    pub f0: Vec<ScalarSpec>,
    #[serde(rename = "G0")]
    pub g0: Vec<Vec<ScalarSpec>>,
    #[serde(rename = "L_f")]
    pub l_f: f64,
    #[serde(rename = "L_g")]
    pub l_g: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeConfig {
    pub h_norm_hi: f64,
    #[serde(default)]
    pub h_inv_norm_hi: Option<f64>,
    #[serde(default)]
    pub h_inv_norm_lo: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyConfig {
    Random,
    Bang,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_policy")]
    pub policy: PolicyConfig,
    #[serde(default)]
    pub workers: usize,
}

fn default_horizon() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    1e-3
}
fn default_trajectories() -> usize {
    100
}
fn default_policy() -> PolicyConfig {
    PolicyConfig::Random
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            horizon: default_horizon(),
            dt: default_dt(),
            trajectories: default_trajectories(),
            seed: 0,
            policy: default_policy(),
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthConfig {
    pub f: Vec<ScalarSpec>,
    #[serde(rename = "G")]
    pub g: Vec<Vec<ScalarSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GvsConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_spread")]
    pub spread: f64,
}

fn default_samples() -> usize {
    100
}
fn default_spread() -> f64 {
    0.5
}

impl Default for GvsConfig {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            spread: default_spread(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub manifold: toml::Value,
    pub local: LocalConfig,
    #[serde(default)]
    pub envelope: Option<EnvelopeConfig>,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub truth: Option<TruthConfig>,
    #[serde(default)]
    pub gvs: GvsConfig,
}

/// Command-line values that replace `[run]` fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub trajectories: Option<usize>,
    pub workers: Option<usize>,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub manifold: Arc<dyn Manifold>,
    pub local: LocalData,
    pub envelope: Option<BoundEnvelope>,
    pub run: RunConfig,
    pub truth: Option<Arc<dyn ControlAffine>>,
    pub gvs: GvsConfig,
    pub file: ScenarioFile,
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn scalars(field: &str, v: &[ScalarSpec]) -> Result<Vec<f64>, ConfigError> {
    v.iter()
        .enumerate()
        .map(|(i, s)| s.value().map_err(|e| invalid(&format!("{field}[{i}]"), e)))
        .collect()
}

fn expr_text(s: &ScalarSpec) -> String {
    match s {
        ScalarSpec::Number(v) => format!("{v}"),
        ScalarSpec::Expr(e) => e.clone(),
    }
}

fn resolve_manifold(value: &toml::Value, base: &Path) -> Result<Arc<dyn Manifold>, ConfigError> {
    match value {
        toml::Value::String(name) => builtin(name).map_err(|e| invalid("manifold", e)),
        toml::Value::Table(t) if t.contains_key("file") => {
            let file = t
                .get("file")
                .and_then(|f| f.as_str())
                .ok_or_else(|| invalid("manifold.file", "expected a path string"))?;
            let path = base.join(file);
            let text = read(&path)?;
            let def = ManifoldDefinition::from_toml(&text).map_err(|e| ConfigError::Parse {
                path: path.clone(),
                message: e.to_string(),
            })?;
            let spec = ManifoldSpec::from_definition(&def).map_err(|e| invalid("manifold.file", e))?;
            Ok(Arc::new(spec))
        }
        toml::Value::Table(_) => {
            let def: ManifoldDefinition = value
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| invalid("manifold", e.message()))?;
            let spec = ManifoldSpec::from_definition(&def).map_err(|e| invalid("manifold", e))?;
            Ok(Arc::new(spec))
        }
        _ => Err(invalid(
            "manifold",
            "expected a built-in name, { file = \"…\" }, or a manifold table",
        )),
    }
}

impl Scenario {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, ConfigError> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, overrides).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    /// Parses scenario text; relative manifold files resolve against `base`.
    pub fn parse(text: &str, base: &Path, overrides: &Overrides) -> Result<Self, ConfigError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<scenario>"),
            message: e.to_string(),
        })?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", file.schema_version),
            ));
        }
        let manifold = resolve_manifold(&file.manifold, base)?;
        let n = manifold.dim();

        let l = &file.local;
        let x0 = scalars("local.x0", &l.x0)?;
        if x0.len() != n {
            return Err(invalid("local.x0", format!("has {} entries, manifold dimension is {n}", x0.len())));
        }
        let x0 = manifold.point(&x0).map_err(|e| invalid("local.x0", e))?;
        let f0 = scalars("local.f0", &l.f0)?;
        if f0.len() != n {
            return Err(invalid("local.f0", format!("has {} entries, manifold dimension is {n}", f0.len())));
        }
        if l.g0.len() != n {
            return Err(invalid("local.G0", format!("has {} rows, manifold dimension is {n}", l.g0.len())));
        }
        let m = l.g0.first().map_or(0, Vec::len);
        if m == 0 || l.g0.iter().any(|r| r.len() != m) {
            return Err(invalid("local.G0", "rows must have equal, nonzero length"));
        }
        let mut g0 = Vec::with_capacity(n * m);
        for (i, row) in l.g0.iter().enumerate() {
            g0.extend(scalars(&format!("local.G0[{i}]"), row)?);
        }
        if l.l_g.len() != m {
            return Err(invalid(
                "local.L_g",
                format!("has {} entries, G0 has {m} columns", l.l_g.len()),
            ));
        }
        if !(l.l_f >= 0.0) {
            return Err(invalid("local.L_f", "must be nonnegative"));
        }
        if let Some(i) = l.l_g.iter().position(|&v| !(v >= 0.0)) {
            return Err(invalid(&format!("local.L_g[{i}]"), "must be nonnegative"));
        }
        let local = LocalData::new(
            x0,
            DVector::from_vec(f0),
            DMatrix::from_row_slice(n, m, &g0),
            l.l_f,
            l.l_g.clone(),
        )
        .map_err(|e| invalid("local", e))?;

        let envelope = file
            .envelope
            .as_ref()
            .map(|e| {
                let inv_hi = match (e.h_inv_norm_hi, e.h_inv_norm_lo) {
                    (Some(hi), None) => hi,
                    (None, Some(lo)) => 1.0 / lo,
                    _ => {
                        return Err(invalid(
                            "envelope",
                            "give exactly one of h_inv_norm_hi and h_inv_norm_lo",
                        ))
                    }
                };
                BoundEnvelope::user_supplied(e.h_norm_hi, inv_hi).map_err(|err| invalid("envelope", err))
            })
            .transpose()?;

        let mut run = file.run.clone();
        if let Some(v) = overrides.seed {
            run.seed = v;
        }
        if let Some(v) = overrides.dt {
            run.dt = v;
        }
        if let Some(v) = overrides.horizon {
            run.horizon = v;
        }
        if let Some(v) = overrides.trajectories {
            run.trajectories = v;
        }
        if let Some(v) = overrides.workers {
            run.workers = v;
        }
        if !(run.horizon >= 0.0 && run.horizon.is_finite()) {
            return Err(invalid("run.horizon", "must be finite and nonnegative"));
        }
        if !(run.dt > 0.0 && run.dt.is_finite()) {
            return Err(invalid("run.dt", "must be positive"));
        }
        if run.trajectories == 0 {
            return Err(invalid("run.trajectories", "must be at least 1"));
        }
        if !(file.gvs.spread >= 0.0) {
            return Err(invalid("gvs.spread", "must be nonnegative"));
        }

        let truth = file
            .truth
            .as_ref()
            .map(|t| {
                let f: Vec<String> = t.f.iter().map(expr_text).collect();
                let g: Vec<Vec<String>> = t.g.iter().map(|r| r.iter().map(expr_text).collect()).collect();
                if f.len() != n {
                    return Err(invalid("truth.f", format!("has {} entries, manifold dimension is {n}", f.len())));
                }
                if g.len() != n {
                    return Err(invalid("truth.G", format!("has {} rows, manifold dimension is {n}", g.len())));
                }
                ExprDynamics::parse(&f, &g, &manifold.coord_names())
                    .map(|d| Arc::new(d) as Arc<dyn ControlAffine>)
                    .map_err(|e| invalid("truth", e))
            })
            .transpose()?;

        Ok(Self {
            name: file.name.clone().unwrap_or_else(|| manifold.name().to_string()),
            manifold,
            local,
            envelope,
            run,
            truth,
            gvs: file.gvs.clone(),
            file,
        })
    }

    pub fn surrogate(&self) -> Result<SurrogateSystem, ConfigError> {
        SurrogateSystem::new(self.manifold.clone(), self.local.clone(), self.envelope)
            .map_err(|e| invalid("local", e))
    }

    pub fn reach_options(&self) -> ReachOptions {
        ReachOptions {
            horizon: self.run.horizon,
            dt: self.run.dt,
            n_trajectories: self.run.trajectories,
            seed: self.run.seed,
            policy: match self.run.policy {
                PolicyConfig::Random => ControlPolicy::PiecewiseConstantRandom,
                PolicyConfig::Bang => ControlPolicy::BoundaryBang,
            },
            workers: self.run.workers,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PENDULUM: &str = include_str!("../scenarios/pendulum.toml");
    const SO3: &str = include_str!("../scenarios/so3.toml");

    fn parse(text: &str) -> Result<Scenario, ConfigError> {
        Scenario::parse(text, Path::new("."), &Overrides::default())
    }

    fn field_of(e: ConfigError) -> String {
        match e {
            ConfigError::Invalid { field, .. } => field,
            other => panic!("expected a field error, got {other}"),
        }
    }

    #[test]
    fn bundled_scenarios_parse() {
        let p = parse(PENDULUM).unwrap();
        assert_eq!(p.local.x0().as_slice(), &[std::f64::consts::FRAC_PI_4]);
        assert_eq!(p.local.l_f(), 1.5);
        assert!(p.envelope.is_none());
        assert!(p.truth.is_some());
        let s = parse(SO3).unwrap();
        let env = s.envelope.unwrap();
        assert_eq!(env.h_norm_hi, 1.2);
        assert_eq!(env.h_inv_norm_hi, 1.25);
        assert_eq!(s.local.l_g(), &[0.65, 0.0]);
        assert_eq!(s.manifold.coord_names(), vec!["psi", "theta", "phi"]);
    }

    #[test]
    fn overrides_replace_run_fields() {
        let o = Overrides {
            seed: Some(9),
            dt: Some(0.01),
            horizon: Some(0.5),
            trajectories: Some(3),
            workers: Some(2),
        };
        let s = Scenario::parse(PENDULUM, Path::new("."), &o).unwrap();
        assert_eq!(s.run.seed, 9);
        assert_eq!(s.run.dt, 0.01);
        assert_eq!(s.run.horizon, 0.5);
        assert_eq!(s.run.trajectories, 3);
        assert_eq!(s.run.workers, 2);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = PENDULUM.replace("L_g = [0.0]", "L_g = [0.0, 1.0]");
        assert_eq!(field_of(parse(&bad).unwrap_err()), "local.L_g");
        let bad = PENDULUM.replace("f0 = [\"-sqrt(2)/4\"]", "f0 = [0.1, 0.2]");
        assert_eq!(field_of(parse(&bad).unwrap_err()), "local.f0");
        let bad = PENDULUM.replace("schema_version = 1", "schema_version = 7");
        assert_eq!(field_of(parse(&bad).unwrap_err()), "schema_version");
        let bad = PENDULUM.replace("dt = 0.001", "dt = 0.0");
        assert_eq!(field_of(parse(&bad).unwrap_err()), "run.dt");
        let bad = SO3.replace("[\"1 + 0.5*phi\", \"0\"]", "[\"1 + 0.5*chi\", \"0\"]");
        assert_eq!(field_of(parse(&bad).unwrap_err()), "truth");
        let bad = PENDULUM.replace("manifold = \"circle\"", "manifold = \"torus\"");
        assert_eq!(field_of(parse(&bad).unwrap_err()), "manifold");
        let bad = PENDULUM.replace("x0 = [\"pi/4\"]", "x0 = [\"4\"]");
        assert_eq!(field_of(parse(&bad).unwrap_err()), "local.x0");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = PENDULUM.replace("L_f = 1.5", "L_f = 1.5\nLf = 2");
        assert!(matches!(parse(&bad), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn inline_manifold_definition() {
        let text = r#"
            schema_version = 1
            [manifold]
            name = "plane"
            dim = 2
            domain = [["-inf", "inf"], ["-inf", "inf"]]
            metric = [["1", "0"], ["0", "1"]]
            distance = "flat"
            exp = "flat"
            [local]
            x0 = [0, 0]
            f0 = [0, 0]
            G0 = [[1, 0], [0, 1]]
            L_f = 1
            L_g = [0, 0]
        "#;
        let s = parse(text).unwrap();
        assert_eq!(s.manifold.name(), "plane");
        assert_eq!(s.name, "plane");
    }
}
