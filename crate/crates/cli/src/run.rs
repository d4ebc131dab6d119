//! Subcommand drivers. Each writes its artifacts into an output directory and
//! returns a [`RunSummary`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use riemreach::bounds::PointBounds;
use riemreach::reach::{
    containment_check, format_sig12, reach_cloud, true_reach_cloud, write_cloud_csv, ContainmentReport,
    ReachCloud,
};
use riemreach::ReachError;

use crate::config::{ConfigError, PolicyConfig, Scenario};

/// Tolerance on `‖u‖ − 1` and on the least-squares residual.
pub const CONTAINMENT_TOL: f64 = 1e-6;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Runtime(ReachError),
    Io { path: PathBuf, source: std::io::Error },
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Runtime(e) => write!(f, "runtime error: {e}"),
            RunError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<ReachError> for RunError {
    fn from(e: ReachError) -> Self {
        RunError::Runtime(e)
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Runtime(_) | RunError::Io { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParameters {
    pub horizon: f64,
    pub dt: f64,
    pub trajectories: usize,
    pub seed: u64,
    pub policy: PolicyConfig,
    pub workers: usize,
    pub gvs_samples: usize,
    pub gvs_spread: f64,
}

/// Finite values as JSON numbers, infinities as `"inf"` / `"-inf"`.
mod extended {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusStats {
    #[serde(with = "extended")]
    pub min: f64,
    #[serde(with = "extended")]
    pub max: f64,
    #[serde(with = "extended")]
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentSummary {
    pub tolerance: f64,
    pub checked: usize,
    pub violations: usize,
    pub worst_excess_control_norm: f64,
    pub worst_velocity_residual: f64,
}

impl ContainmentSummary {
    fn new(r: &ContainmentReport) -> Self {
        Self {
            tolerance: CONTAINMENT_TOL,
            checked: r.n_checked,
            violations: r.n_violations,
            worst_excess_control_norm: r.worst_excess_control_norm,
            worst_velocity_residual: r.worst_velocity_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub command: String,
    pub scenario: String,
    pub manifold: String,
    pub parameters: EffectiveParameters,
    pub x0: Vec<f64>,
    #[serde(with = "extended")]
    pub alpha_at_x0: f64,
    pub sigma_min: f64,
    #[serde(rename = "L_G")]
    pub l_g_aggregate: f64,
    #[serde(with = "extended")]
    pub theorem1_radius_at_x0: f64,
    #[serde(with = "extended")]
    pub lemma4_radius_at_x0: f64,
    /// Over the evaluated gvs sample points (gvs only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theorem1_radius: Option<RadiusStats>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gvs_nonempty: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_truth_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub halted: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub containment: Option<ContainmentSummary>,
    pub wall_time_s: f64,
}

impl RunSummary {
    pub fn violations(&self) -> usize {
        self.containment.as_ref().map_or(0, |c| c.violations)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path).map(BufWriter::new).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_cloud(cloud: &ReachCloud, path: &Path) -> Result<(), RunError> {
    let mut w = create(path)?;
    write_cloud_csv(cloud, &mut w).map_err(io_at(path))?;
    w.flush().map_err(io_at(path))
}

fn write_summary(summary: &RunSummary, out: &Path) -> Result<(), RunError> {
    let path = out.join("summary.json");
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, summary)
        .map_err(|e| RunError::Io {
            path: path.clone(),
            source: e.into(),
        })?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_at(&path))
}

fn base_summary(command: &str, sc: &Scenario, at_x0: &PointBounds) -> RunSummary {
    RunSummary {
        command: command.into(),
        scenario: sc.name.clone(),
        manifold: sc.manifold.name().to_string(),
        parameters: EffectiveParameters {
            horizon: sc.run.horizon,
            dt: sc.run.dt,
            trajectories: sc.run.trajectories,
            seed: sc.run.seed,
            policy: sc.run.policy,
            workers: sc.run.workers,
            gvs_samples: sc.gvs.samples,
            gvs_spread: sc.gvs.spread,
        },
        x0: sc.local.x0().as_slice().to_vec(),
        alpha_at_x0: at_x0.alpha,
        sigma_min: at_x0.coefficients.sigma,
        l_g_aggregate: at_x0.coefficients.l_g_aggregate,
        theorem1_radius_at_x0: at_x0.radius.theorem1_radius,
        lemma4_radius_at_x0: at_x0.radius.lemma4_radius,
        theorem1_radius: None,
        gvs_nonempty: None,
        n_points: None,
        n_truth_points: None,
        halted: None,
        containment: None,
        wall_time_s: 0.0,
    }
}

fn ensure_dir(out: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(out).map_err(io_at(out))
}

/// Evaluates the guaranteed velocity ball at points drawn uniformly from the
/// box `x₀ ± spread` and writes `gvs_samples.csv`.
pub fn run_gvs(sc: &Scenario, out: &Path) -> Result<RunSummary, RunError> {
    let start = Instant::now();
    ensure_dir(out)?;
    let sys = sc.surrogate()?;
    let mut summary = base_summary("gvs", sc, &sys.bounds_at(sc.local.x0())?);

    let path = out.join("gvs_samples.csv");
    let mut w = create(&path)?;
    let mut header = vec!["sample_id".to_string()];
    header.extend(sc.manifold.coord_names());
    header.extend(
        [
            "distance",
            "alpha",
            "theorem1_radius",
            "lemma4_radius",
            "within_theorem1",
            "within_lemma4",
            "status",
        ]
        .map(String::from),
    );
    writeln!(w, "{}", header.join(",")).map_err(io_at(&path))?;

    let mut rng = ChaCha8Rng::seed_from_u64(sc.run.seed);
    let x0 = sc.local.x0().as_slice().to_vec();
    let spread = sc.gvs.spread;
    let mut radii = Vec::new();
    let mut nonempty = 0;
    for id in 0..sc.gvs.samples {
        let coords: Vec<f64> = if id == 0 {
            x0.clone()
        } else {
            x0.iter()
                .map(|&c| c + spread * (2.0 * rng.random::<f64>() - 1.0))
                .collect()
        };
        let mut row = vec![id.to_string()];
        row.extend(coords.iter().map(|&c| format_sig12(c)));
        let evaluated = sc.manifold.point(&coords).and_then(|x| sys.bounds_at(&x));
        match evaluated {
            Ok(b) => {
                radii.push(b.radius.theorem1_radius);
                if b.alpha >= 0.0 {
                    nonempty += 1;
                }
                row.extend([
                    format_sig12(b.distance),
                    format_sig12(b.alpha),
                    format_sig12(b.radius.theorem1_radius),
                    format_sig12(b.radius.lemma4_radius),
                    (b.distance <= b.radius.theorem1_radius).to_string(),
                    (b.distance <= b.radius.lemma4_radius).to_string(),
                    if b.alpha >= 0.0 { "ok" } else { "empty" }.to_string(),
                ]);
            }
            Err(e) if e.is_termination() || matches!(e, ReachError::NoGeodesic { .. }) => {
                row.extend(["", "", "", "", "", ""].map(String::from));
                row.push(status_of(&e).into());
            }
            Err(e) => return Err(e.into()),
        }
        writeln!(w, "{}", row.join(",")).map_err(io_at(&path))?;
    }
    w.flush().map_err(io_at(&path))?;

    if !radii.is_empty() {
        summary.theorem1_radius = Some(RadiusStats {
            min: radii.iter().copied().fold(f64::INFINITY, f64::min),
            max: radii.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: radii.iter().sum::<f64>() / radii.len() as f64,
        });
    }
    summary.gvs_nonempty = Some(nonempty);
    summary.wall_time_s = start.elapsed().as_secs_f64();
    write_summary(&summary, out)?;
    Ok(summary)
}

fn status_of(e: &ReachError) -> &'static str {
    match e {
        ReachError::ChartBoundary { .. } => "outside_chart",
        ReachError::GeodesicExit { .. } => "geodesic_exit",
        ReachError::NoGeodesic { .. } => "no_geodesic",
        ReachError::EnvelopeNotCovering { .. } => "envelope_not_covering",
        ReachError::EmptyVelocitySet { .. } => "empty",
        _ => "error",
    }
}

/// Samples the surrogate reachable set and writes `cloud.csv`.
pub fn run_reach(sc: &Scenario, out: &Path) -> Result<RunSummary, RunError> {
    let start = Instant::now();
    ensure_dir(out)?;
    let sys = sc.surrogate()?;
    let mut summary = base_summary("reach", sc, &sys.bounds_at(sc.local.x0())?);
    let cloud = reach_cloud(&sys, &sc.reach_options())?;
    write_cloud(&cloud, &out.join("cloud.csv"))?;
    summary.n_points = Some(cloud.points.len());
    summary.halted = Some(cloud.halted());
    summary.wall_time_s = start.elapsed().as_secs_f64();
    write_summary(&summary, out)?;
    Ok(summary)
}

/// Runs the surrogate and the truth system, then checks every surrogate
/// velocity against the true available velocity set.
pub fn run_validate(sc: &Scenario, out: &Path) -> Result<RunSummary, RunError> {
    let start = Instant::now();
    let truth = sc.truth.clone().ok_or_else(|| {
        RunError::Config(ConfigError::Invalid {
            field: "truth".into(),
            message: "`validate` needs a [truth] section".into(),
        })
    })?;
    ensure_dir(out)?;
    let sys = sc.surrogate()?;
    let mut summary = base_summary("validate", sc, &sys.bounds_at(sc.local.x0())?);
    let opts = sc.reach_options();
    let cloud = reach_cloud(&sys, &opts)?;
    let truth_cloud = true_reach_cloud(truth.as_ref(), sc.manifold.as_ref(), sc.local.x0(), &opts)?;
    let report = containment_check(truth.as_ref(), &cloud, CONTAINMENT_TOL)?;
    write_cloud(&cloud, &out.join("cloud.csv"))?;
    write_cloud(&truth_cloud, &out.join("truth_cloud.csv"))?;
    summary.n_points = Some(cloud.points.len());
    summary.n_truth_points = Some(truth_cloud.points.len());
    summary.halted = Some(cloud.halted());
    summary.containment = Some(ContainmentSummary::new(&report));
    summary.wall_time_s = start.elapsed().as_secs_f64();
    write_summary(&summary, out)?;
    Ok(summary)
}

