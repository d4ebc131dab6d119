//! Monte-Carlo propagation of the surrogate control system
//! `ẋ = f(x₀) + α(x₀, x)·B u`, `‖u‖ ≤ 1`, whose reachable set underapproximates
//! the guaranteed reachable set, plus the truth-system counterpart and the
//! containment check.
//!
//! Each step is explicit Euler in the tangent space followed by the
//! exponential map: `x ← exp_x(v·dt)`. Trajectory `i` draws its controls from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so clouds do not depend on
//! the number of worker threads.

use std::io::{self, Write};
use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{BoundEnvelope, EnvelopePolicy, LocalData, PointBounds};
use crate::dynamics::{least_squares_control, ControlAffine};
use crate::error::{ReachError, Result};
use crate::geometry::{exp_map, ChartPoint, TangentVector};
use crate::gvs::{gvs_with_bounds, sample_unit_ball, SampleMode, VelocityBall};
use crate::manifolds::Manifold;

/// Surrogate system built from local data at `x₀`.
#[derive(Debug, Clone)]
pub struct SurrogateSystem {
    manifold: Arc<dyn Manifold>,
    local: LocalData,
    policy: EnvelopePolicy,
    alpha_scale: f64,
}

impl SurrogateSystem {
    pub fn new(
        manifold: Arc<dyn Manifold>,
        local: LocalData,
        envelope: Option<BoundEnvelope>,
    ) -> Result<Self> {
        if local.dim() != manifold.dim() {
            return Err(ReachError::Shape(format!(
                "local data has dimension {}, manifold {} has dimension {}",
                local.dim(),
                manifold.name(),
                manifold.dim()
            )));
        }
        let sys = Self {
            manifold,
            local,
            policy: EnvelopePolicy::from_optional(envelope),
            alpha_scale: 1.0,
        };
        let at_x0 = sys.bounds_at(sys.local.x0())?;
        if !(at_x0.alpha > 0.0) {
            return Err(ReachError::EmptyVelocitySet {
                alpha: at_x0.alpha,
            });
        }
        Ok(sys)
    }

    /// Multiplies every radius by `scale`. Values above one void the
    /// guarantee; used to construct counterexamples.
    pub fn with_alpha_scale(mut self, scale: f64) -> Self {
        self.alpha_scale = scale;
        self
    }

    pub fn manifold(&self) -> &Arc<dyn Manifold> {
        &self.manifold
    }

    pub fn local(&self) -> &LocalData {
        &self.local
    }

    pub fn policy(&self) -> &EnvelopePolicy {
        &self.policy
    }

    pub fn bounds_at(&self, x: &ChartPoint) -> Result<PointBounds> {
        crate::bounds::evaluate(self.manifold.as_ref(), &self.local, &self.policy, x)
    }

    pub fn ball_at(&self, x: &ChartPoint) -> Result<VelocityBall> {
        let (mut ball, _) = gvs_with_bounds(self.manifold.as_ref(), &self.local, &self.policy, x)?;
        if ball.radius >= 0.0 {
            ball.radius *= self.alpha_scale;
        }
        Ok(ball)
    }
}

/// `f(x₀) + α(x₀, x)·B u` for `u` in image coordinates with `‖u‖ ≤ 1`.
pub fn surrogate_velocity(
    sys: &SurrogateSystem,
    x: &ChartPoint,
    u: &DVector<f64>,
) -> Result<TangentVector> {
    if u.norm() > 1.0 + 1e-12 {
        return Err(ReachError::InvalidArgument(format!(
            "control norm {} exceeds one",
            u.norm()
        )));
    }
    sys.ball_at(x)?.velocity(u)
}

/// One Euler step retracted through the exponential map: `exp_x(v·dt)`.
pub fn integrate_step<M: Manifold + ?Sized>(
    manifold: &M,
    v: &TangentVector,
    dt: f64,
) -> Result<ChartPoint> {
    if !(dt > 0.0) {
        return Err(ReachError::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    exp_map(manifold, &v.scaled(dt))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlPolicy {
    /// Piecewise constant, redrawn uniformly from the unit ball every step.
    PiecewiseConstantRandom,
    /// Piecewise constant, redrawn uniformly from the unit sphere every step.
    BoundaryBang,
}

impl ControlPolicy {
    fn mode(self) -> SampleMode {
        match self {
            ControlPolicy::PiecewiseConstantRandom => SampleMode::UniformBall,
            ControlPolicy::BoundaryBang => SampleMode::Boundary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachOptions {
    pub horizon: f64,
    pub dt: f64,
    pub n_trajectories: usize,
    pub seed: u64,
    pub policy: ControlPolicy,
    /// Worker threads; zero uses rayon's default.
    pub workers: usize,
}

impl Default for ReachOptions {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            dt: 1e-3,
            n_trajectories: 100,
            seed: 0,
            policy: ControlPolicy::PiecewiseConstantRandom,
            workers: 0,
        }
    }
}

impl ReachOptions {
    fn validate(&self) -> Result<()> {
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(ReachError::InvalidArgument(format!(
                "horizon must be finite and nonnegative, got {}",
                self.horizon
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ReachError::InvalidArgument(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.n_trajectories == 0 {
            return Err(ReachError::InvalidArgument(
                "at least one trajectory is required".into(),
            ));
        }
        Ok(())
    }

    /// Step count `⌈T/dt⌉`, ignoring rounding noise in the ratio.
    pub fn steps(&self) -> usize {
        let r = self.horizon / self.dt;
        let n = r.round();
        if (r - n).abs() <= 1e-9 * n.max(1.0) {
            n as usize
        } else {
            r.ceil() as usize
        }
    }

    /// Time of step `k`, clamped to the horizon.
    pub fn time(&self, k: usize) -> f64 {
        if k >= self.steps() {
            self.horizon
        } else {
            k as f64 * self.dt
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudPoint {
    pub traj_id: usize,
    pub step: usize,
    pub t: f64,
    pub state: ChartPoint,
    pub embedded: DVector<f64>,
    /// Velocity applied from this state, absent at the last recorded state.
    pub velocity: Option<TangentVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnd {
    pub traj_id: usize,
    pub steps: usize,
    /// Why the trajectory stopped before the horizon.
    pub halt: Option<ReachError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudMeta {
    pub horizon: f64,
    pub dt: f64,
    pub n_trajectories: usize,
    pub seed: u64,
    pub coord_names: Vec<String>,
    pub embed_names: Vec<String>,
}

/// Time-stamped states of all trajectories, sorted by trajectory then time.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachCloud {
    pub points: Vec<CloudPoint>,
    pub trajectories: Vec<TrajectoryEnd>,
    pub meta: CloudMeta,
}

impl ReachCloud {
    pub fn halted(&self) -> usize {
        self.trajectories.iter().filter(|t| t.halt.is_some()).count()
    }

    /// States recorded at the last step of each trajectory.
    pub fn endpoints(&self) -> Vec<&CloudPoint> {
        let mut out: Vec<&CloudPoint> = Vec::new();
        for p in &self.points {
            match out.last_mut() {
                Some(last) if last.traj_id == p.traj_id => *last = p,
                _ => out.push(p),
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        write_cloud_csv(self, w)
    }
}

fn trajectory_rng(seed: u64, traj_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(traj_id as u64);
    rng
}

/// Runs one trajectory. `velocity(rng, x)` supplies the velocity applied
/// from `x`; termination errors end the trajectory, other errors abort.
fn run_trajectory<M, F>(
    manifold: &M,
    x0: &ChartPoint,
    opts: &ReachOptions,
    traj_id: usize,
    mut velocity: F,
) -> Result<(Vec<CloudPoint>, TrajectoryEnd)>
where
    M: Manifold + ?Sized,
    F: FnMut(&mut ChaCha8Rng, &ChartPoint) -> Result<TangentVector>,
{
    let steps = opts.steps();
    let mut rng = trajectory_rng(opts.seed, traj_id);
    let mut points = Vec::with_capacity(steps + 1);
    let mut x = x0.clone();
    let mut halt = None;
    let mut k = 0;
    loop {
        let mut point = CloudPoint {
            traj_id,
            step: k,
            t: opts.time(k),
            embedded: manifold.embed(&x),
            state: x.clone(),
            velocity: None,
        };
        if k == steps {
            points.push(point);
            break;
        }
        let next = velocity(&mut rng, &x).and_then(|v| {
            let dt = opts.time(k + 1) - opts.time(k);
            let y = integrate_step(manifold, &v, dt)?;
            Ok((v, y))
        });
        match next {
            Ok((v, y)) => {
                point.velocity = Some(v);
                points.push(point);
                x = y;
                k += 1;
            }
            Err(e) if e.is_termination() => {
                points.push(point);
                halt = Some(e);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok((
        points,
        TrajectoryEnd {
            traj_id,
            steps: k,
            halt,
        },
    ))
}

fn run_parallel<F>(
    manifold: &dyn Manifold,
    opts: &ReachOptions,
    run: F,
) -> Result<ReachCloud>
where
    F: Fn(usize) -> Result<(Vec<CloudPoint>, TrajectoryEnd)> + Sync + Send,
{
    opts.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| ReachError::InvalidArgument(e.to_string()))?;
    let results: Vec<_> = pool.install(|| {
        (0..opts.n_trajectories)
            .into_par_iter()
            .map(&run)
            .collect::<Vec<_>>()
    });
    let mut points = Vec::new();
    let mut trajectories = Vec::with_capacity(results.len());
    for r in results {
        let (p, end) = r?;
        points.extend(p);
        trajectories.push(end);
    }
    Ok(ReachCloud {
        points,
        trajectories,
        meta: CloudMeta {
            horizon: opts.horizon,
            dt: opts.dt,
            n_trajectories: opts.n_trajectories,
            seed: opts.seed,
            coord_names: manifold.coord_names(),
            embed_names: manifold.embed_names(),
        },
    })
}

/// Samples the surrogate reachable set up to `opts.horizon`.
pub fn reach_cloud(sys: &SurrogateSystem, opts: &ReachOptions) -> Result<ReachCloud> {
    let manifold = sys.manifold.as_ref();
    let rank = sys.local.rank();
    let mode = opts.policy.mode();
    run_parallel(manifold, opts, |id| {
        run_trajectory(manifold, sys.local.x0(), opts, id, |rng, x| {
            let mut u = sample_unit_ball(rng, rank, mode);
            let n = u.norm();
            if n > 1.0 {
                u /= n;
            }
            surrogate_velocity(sys, x, &u)
        })
    })
}

/// Samples the reachable set of `ẋ = f(x) + G(x)u` with the same stepper.
pub fn true_reach_cloud(
    dynamics: &dyn ControlAffine,
    manifold: &dyn Manifold,
    x0: &ChartPoint,
    opts: &ReachOptions,
) -> Result<ReachCloud> {
    if dynamics.state_dim() != manifold.dim() {
        return Err(ReachError::Shape(format!(
            "dynamics have state dimension {}, manifold has {}",
            dynamics.state_dim(),
            manifold.dim()
        )));
    }
    manifold.check_point(x0)?;
    let m = dynamics.input_dim();
    let mode = opts.policy.mode();
    run_parallel(manifold, opts, |id| {
        run_trajectory(manifold, x0, opts, id, |rng, x| {
            let u = sample_unit_ball(rng, m, mode);
            TangentVector::new(x.clone(), dynamics.velocity(x, &u)?)
        })
    })
}

/// Integrates the truth system under a fixed control sequence `u(k)`.
pub fn true_trajectory<U>(
    dynamics: &dyn ControlAffine,
    manifold: &dyn Manifold,
    x0: &ChartPoint,
    opts: &ReachOptions,
    control: U,
) -> Result<(Vec<CloudPoint>, TrajectoryEnd)>
where
    U: Fn(usize) -> DVector<f64>,
{
    opts.validate()?;
    let mut k = 0;
    run_trajectory(manifold, x0, opts, 0, |_, x| {
        let v = dynamics.velocity(x, &control(k))?;
        k += 1;
        TangentVector::new(x.clone(), v)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContainmentReport {
    pub n_checked: usize,
    pub n_violations: usize,
    /// Largest `‖u‖ − 1` over all checked velocities.
    pub worst_excess_control_norm: f64,
    pub worst_velocity_residual: f64,
}

/// Checks each recorded surrogate velocity against the true available
/// velocity set through `u = G(x)†(v − f(x))`.
pub fn containment_check(
    dynamics: &dyn ControlAffine,
    cloud: &ReachCloud,
    tol: f64,
) -> Result<ContainmentReport> {
    let mut report = ContainmentReport {
        worst_excess_control_norm: f64::NEG_INFINITY,
        ..Default::default()
    };
    for p in &cloud.points {
        let Some(v) = &p.velocity else { continue };
        let (u, residual) = least_squares_control(
            &dynamics.input_matrix(&p.state)?,
            &dynamics.drift(&p.state)?,
            v.components(),
        )?;
        let excess = u.norm() - 1.0;
        report.n_checked += 1;
        if excess > tol || residual > tol {
            report.n_violations += 1;
        }
        report.worst_excess_control_norm = report.worst_excess_control_norm.max(excess);
        report.worst_velocity_residual = report.worst_velocity_residual.max(residual);
    }
    if report.n_checked == 0 {
        report.worst_excess_control_norm = 0.0;
    }
    Ok(report)
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

/// Header `traj_id,t,<coords>,<embedded>`, one row per state.
pub fn write_cloud_csv<W: Write>(cloud: &ReachCloud, mut w: W) -> io::Result<()> {
    let mut header = vec!["traj_id".to_string(), "t".to_string()];
    header.extend(cloud.meta.coord_names.iter().cloned());
    header.extend(cloud.meta.embed_names.iter().cloned());
    writeln!(w, "{}", header.join(","))?;
    for p in &cloud.points {
        let mut row = vec![p.traj_id.to_string(), format_sig12(p.t)];
        row.extend(p.state.as_slice().iter().map(|&c| format_sig12(c)));
        row.extend(p.embedded.iter().map(|&c| format_sig12(c)));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{damped_pendulum, so3_truth, FnDynamics};
    use crate::gvs::contains_velocity;
    use crate::manifolds::{Circle, Euclidean, So3Euler};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn pendulum_sys() -> SurrogateSystem {
        let local = LocalData::new(
            Circle.point(&[FRAC_PI_4]).unwrap(),
            DVector::from_element(1, -SQRT_2 / 4.0),
            DMatrix::from_element(1, 1, 1.0),
            1.5,
            vec![0.0],
        )
        .unwrap();
        SurrogateSystem::new(Arc::new(Circle), local, None).unwrap()
    }

    fn so3_sys() -> SurrogateSystem {
        let m = So3Euler::new();
        let x0 = m.point(&[0.0, FRAC_PI_2, 0.0]).unwrap();
        let g0 = so3_truth().input_matrix(&x0).unwrap();
        let local = LocalData::new(x0, DVector::zeros(3), g0, 0.0, vec![0.65, 0.0]).unwrap();
        let env = BoundEnvelope::from_eigen_bounds(1.2, 0.8).unwrap();
        SurrogateSystem::new(Arc::new(m), local, Some(env)).unwrap()
    }

    fn opts(horizon: f64, n: usize, workers: usize) -> ReachOptions {
        ReachOptions {
            horizon,
            dt: 1e-3,
            n_trajectories: n,
            seed: 42,
            policy: ControlPolicy::PiecewiseConstantRandom,
            workers,
        }
    }

    #[test]
    fn surrogate_velocity_examples() {
        let sys = pendulum_sys();
        let x0 = sys.local().x0().clone();
        let v0 = surrogate_velocity(&sys, &x0, &DVector::zeros(1)).unwrap();
        assert_eq!(v0.components()[0], -SQRT_2 / 4.0);
        let x = Circle.point(&[0.3]).unwrap();
        assert_eq!(
            surrogate_velocity(&sys, &x, &DVector::zeros(1)).unwrap().components()[0],
            -SQRT_2 / 4.0
        );
        let v1 = surrogate_velocity(&sys, &x0, &DVector::from_element(1, 1.0)).unwrap();
        assert_abs_diff_eq!(v1.components()[0], (4.0 - SQRT_2) / 4.0, epsilon = 1e-15);
        let far = Circle.point(&[FRAC_PI_4 - 0.8]).unwrap();
        assert!(matches!(
            surrogate_velocity(&sys, &far, &DVector::zeros(1)),
            Err(ReachError::EmptyVelocitySet { .. })
        ));

        let s = so3_sys();
        let v = surrogate_velocity(&s, s.local().x0(), &DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!(v.components().as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn integrate_step_examples() {
        let e = Euclidean::new(2);
        let x = e.point(&[1.0, 2.0]).unwrap();
        let v = e.tangent(&x, &[0.5, -1.0]).unwrap();
        assert_eq!(integrate_step(&e, &v, 0.1).unwrap().as_slice(), &[1.05, 1.9]);
        assert_eq!(integrate_step(&e, &TangentVector::zero(x.clone()), 0.1).unwrap(), x);
        assert!(integrate_step(&e, &v, 0.0).is_err());
        let th = Circle.point(&[0.3]).unwrap();
        let w = Circle.tangent(&th, &[2.0]).unwrap();
        assert_eq!(integrate_step(&Circle, &w, 1e-3).unwrap().as_slice(), &[0.3 + 2.0 * 1e-3]);
    }

    #[test]
    fn zero_horizon_is_the_start() {
        let sys = pendulum_sys();
        let c = reach_cloud(&sys, &opts(0.0, 3, 1)).unwrap();
        assert_eq!(c.points.len(), 3);
        assert!(c.points.iter().all(|p| p.t == 0.0 && p.state == *sys.local().x0()));
    }

    #[test]
    fn determinism_across_workers() {
        let sys = so3_sys();
        let a = reach_cloud(&sys, &opts(0.05, 16, 1)).unwrap();
        let b = reach_cloud(&sys, &opts(0.05, 16, 8)).unwrap();
        assert_eq!(a, b);
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        a.write_csv(&mut ca).unwrap();
        b.write_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
    }

    #[test]
    fn horizon_growth_is_a_prefix() {
        let sys = pendulum_sys();
        let short = reach_cloud(&sys, &opts(0.1, 5, 2)).unwrap();
        let long = reach_cloud(&sys, &opts(0.2, 5, 2)).unwrap();
        for p in &short.points {
            let q = long
                .points
                .iter()
                .find(|q| q.traj_id == p.traj_id && q.step == p.step)
                .unwrap();
            assert_eq!(p.state, q.state);
            assert_eq!(p.t, q.t);
        }
    }

    #[test]
    fn recorded_velocities_lie_in_the_ball() {
        let sys = so3_sys();
        let c = reach_cloud(&sys, &opts(0.1, 4, 0)).unwrap();
        for p in &c.points {
            if let Some(v) = &p.velocity {
                let ball = sys.ball_at(&p.state).unwrap();
                assert!(contains_velocity(&ball, v, 1e-12).unwrap());
            }
        }
    }

    #[test]
    fn pendulum_truth_without_control_decreases() {
        let d = damped_pendulum();
        let x0 = Circle.point(&[FRAC_PI_4]).unwrap();
        let (pts, end) =
            true_trajectory(&d, &Circle, &x0, &opts(1.0, 1, 1), |_| DVector::zeros(1)).unwrap();
        assert!(end.halt.is_none());
        assert_eq!(pts.len(), 1001);
        for w in pts.windows(2) {
            assert!(w[1].state.as_slice()[0] < w[0].state.as_slice()[0]);
        }
        assert!(pts.last().unwrap().state.as_slice()[0] > 0.0);
    }

    #[test]
    fn pendulum_truth_between_extremes() {
        let d = damped_pendulum();
        let x0 = Circle.point(&[FRAC_PI_4]).unwrap();
        let o = opts(1.0, 100, 0);
        let lo = true_trajectory(&d, &Circle, &x0, &o, |_| DVector::from_element(1, -1.0)).unwrap().0;
        let hi = true_trajectory(&d, &Circle, &x0, &o, |_| DVector::from_element(1, 1.0)).unwrap().0;
        let cloud = true_reach_cloud(&d, &Circle, &x0, &o).unwrap();
        for p in cloud.endpoints() {
            let th = p.state.as_slice()[0];
            assert!(th >= lo.last().unwrap().state.as_slice()[0]);
            assert!(th <= hi.last().unwrap().state.as_slice()[0]);
        }
    }

    #[test]
    fn static_truth_stays_put() {
        let e = Euclidean::new(2);
        let x0 = e.point(&[0.5, -0.5]).unwrap();
        let c = true_reach_cloud(&FnDynamics::zero(2, 1), &e, &x0, &opts(0.01, 3, 1)).unwrap();
        assert!(c.points.iter().all(|p| p.state == x0));
    }

    #[test]
    fn sound_surrogate_has_no_violations() {
        let sys = pendulum_sys();
        let c = reach_cloud(&sys, &opts(1.0, 50, 0)).unwrap();
        let r = containment_check(&damped_pendulum(), &c, 1e-6).unwrap();
        assert_eq!(r.n_violations, 0);
        assert_eq!(r.n_checked, 50 * 1000);
    }

    #[test]
    fn inflated_radius_is_caught() {
        let sys = pendulum_sys().with_alpha_scale(2.0);
        let mut o = opts(1.0, 50, 0);
        o.policy = ControlPolicy::BoundaryBang;
        let c = reach_cloud(&sys, &o).unwrap();
        let r = containment_check(&damped_pendulum(), &c, 1e-6).unwrap();
        assert!(r.n_violations > 0);
        assert!(r.worst_excess_control_norm > 0.0);
    }

    /// Truth equal to the surrogate at `x₀` with a constant ball.
    #[test]
    fn surrogate_equal_to_truth() {
        let e = Euclidean::new(2);
        let x0 = e.point(&[0.0, 0.0]).unwrap();
        let local = LocalData::new(
            x0.clone(),
            DVector::from_vec(vec![0.2, 0.0]),
            DMatrix::identity(2, 2),
            0.0,
            vec![0.0, 0.0],
        )
        .unwrap();
        let sys = SurrogateSystem::new(Arc::new(e), local, None).unwrap();
        let truth = FnDynamics::new(
            "const",
            2,
            2,
            |_| DVector::from_vec(vec![0.2, 0.0]),
            |_| DMatrix::identity(2, 2),
        );
        let c = reach_cloud(&sys, &opts(0.5, 10, 0)).unwrap();
        let r = containment_check(&truth, &c, 1e-9).unwrap();
        assert_eq!(r.n_violations, 0);
    }

    #[test]
    fn halted_trajectories_keep_their_states() {
        let local = LocalData::new(
            Circle.point(&[3.0]).unwrap(),
            DVector::from_element(1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            0.0,
            vec![0.0],
        )
        .unwrap();
        let sys = SurrogateSystem::new(Arc::new(Circle), local, None).unwrap();
        let mut o = opts(1.0, 2, 1);
        o.dt = 0.01;
        let c = reach_cloud(&sys, &o).unwrap();
        assert_eq!(c.halted(), 2);
        assert!(c.points.len() > 2 && c.points.len() < 2 * 101);
        assert!(c.points.iter().all(|p| p.t <= 1.0));
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(1.0), "1");
        assert_eq!(format_sig12(-0.5), "-0.5");
        assert_eq!(format_sig12(FRAC_PI_4), "0.785398163397");
        assert_eq!(format_sig12(1234.5), "1234.5");
        assert_eq!(format_sig12(1e-7), "1e-07");
        assert_eq!(format_sig12(6.02214076e23), "6.02214076e+23");
        assert_eq!(format_sig12(0.001), "0.001");
    }

    #[test]
    fn csv_layout() {
        let sys = pendulum_sys();
        let c = reach_cloud(&sys, &opts(0.002, 2, 1)).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "traj_id,t,theta,x1,x2");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("0,0,0.785398163397,"));
    }
}
