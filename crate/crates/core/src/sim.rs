//! Scenario files, closed-loop rollouts and their logs.
//!
//! A scenario fixes the landmarks, the home position (used to derive the
//! desired bearings and, omnisciently, to score convergence), the field of
//! view, the robot model and a list of initial states. Each initial state
//! yields one rollout; rollouts are independent and deterministic.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    di_step_with, ControlGains, DoubleIntegratorState, UnicycleController, UnicycleState,
    unicycle_step,
};
use crate::fields::{BumpParams, FieldSample, HomeSpec, NavigationField};
use crate::geometry::LandmarkSet;
use crate::{HomingError, Point, Result, Vector};

/// Position error (m) below which the robot counts as home.
pub const POSITION_TOL: f64 = 1e-3;
/// Linear speed (m/s) below which a unicycle counts as stopped.
pub const SPEED_TOL: f64 = 1e-3;
/// Time (s) the tolerances must hold before convergence is declared.
pub const CONVERGENCE_WINDOW: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobotKind {
    DoubleIntegrator,
    Unicycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsFile {
    #[serde(default = "default_lambda0")]
    pub lambda0: f64,
    #[serde(default = "default_k_v")]
    pub k_v: f64,
    #[serde(default = "default_k_omega")]
    pub k_omega: f64,
}

fn default_lambda0() -> f64 {
    ControlGains::default().lambda0
}
fn default_k_v() -> f64 {
    ControlGains::default().k_v
}
fn default_k_omega() -> f64 {
    ControlGains::default().k_omega
}

impl Default for GainsFile {
    fn default() -> Self {
        let g = ControlGains::default();
        Self {
            lambda0: g.lambda0,
            k_v: g.k_v,
            k_omega: g.k_omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateFile {
    pub position: Vec<f64>,
    /// Double integrator only; defaults to rest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<Vec<f64>>,
    /// Unicycle only, radians in (−π, π].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

/// On-disk scenario, as written in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub dimension: usize,
    pub landmarks: Vec<Vec<f64>>,
    pub home_position: Vec<f64>,
    pub fov_angle_rad: f64,
    pub robot: RobotKind,
    #[serde(default)]
    pub gains: GainsFile,
    pub initial_states: Vec<InitialStateFile>,
    pub dt: f64,
    pub t_max: f64,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| HomingError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| HomingError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Checks every field and derives the home specification and field.
    pub fn validate(&self) -> Result<Scenario> {
        let invalid = |msg: String| HomingError::InvalidScenario(msg);
        let d = self.dimension;
        if d != 2 && d != 3 {
            return Err(invalid(format!("dimension must be 2 or 3, got {d}")));
        }
        if let Some(row) = self.landmarks.iter().find(|r| r.len() != d) {
            return Err(invalid(format!(
                "landmark {row:?} does not have {d} coordinates"
            )));
        }
        let landmarks = LandmarkSet::from_rows(&self.landmarks)?;
        if self.home_position.len() != d {
            return Err(invalid(format!("home_position must have {d} coordinates")));
        }
        if self.home_position.iter().any(|c| !c.is_finite()) {
            return Err(invalid("home_position has a non-finite coordinate".into()));
        }
        let home_position = Vector::from_column_slice(&self.home_position);
        let home = HomeSpec::from_home_position(&landmarks, &home_position, self.fov_angle_rad)?;
        if self.robot == RobotKind::Unicycle && d != 2 {
            return Err(invalid("the unicycle model requires dimension 2".into()));
        }
        let gains = ControlGains::new(self.gains.lambda0, self.gains.k_v, self.gains.k_omega)?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(invalid(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.t_max < self.dt {
            return Err(invalid(format!(
                "t_max ({}) is shorter than one step ({})",
                self.t_max, self.dt
            )));
        }
        let bump = match self.epsilon {
            Some(eps) => BumpParams::new(eps)?,
            None => BumpParams::new(home.default_epsilon())?,
        };
        let field = NavigationField::new(landmarks.clone(), home, bump)?;

        if self.initial_states.is_empty() {
            return Err(invalid("at least one initial state is required".into()));
        }
        let initial_states = self
            .initial_states
            .iter()
            .enumerate()
            .map(|(i, s)| self.initial_state(s).map_err(|e| invalid(format!("initial state {i}: {e}"))))
            .collect::<Result<Vec<_>>>()?;

        Ok(Scenario {
            name: self.name.clone(),
            dimension: d,
            landmarks,
            home_position,
            fov_angle: self.fov_angle_rad,
            robot_kind: self.robot,
            gains,
            initial_states,
            dt: self.dt,
            t_max: self.t_max,
            epsilon_override: self.epsilon,
            field,
        })
    }

    fn initial_state(&self, s: &InitialStateFile) -> Result<InitialState> {
        let d = self.dimension;
        if s.position.len() != d || s.position.iter().any(|c| !c.is_finite()) {
            return Err(HomingError::InvalidParameter(format!(
                "position must have {d} finite coordinates"
            )));
        }
        let x = Vector::from_column_slice(&s.position);
        match self.robot {
            RobotKind::DoubleIntegrator => {
                if s.theta.is_some() {
                    return Err(HomingError::InvalidParameter(
                        "theta is only meaningful for the unicycle".into(),
                    ));
                }
                let xdot = match &s.velocity {
                    Some(v) if v.len() == d && v.iter().all(|c| c.is_finite()) => Vector::from_column_slice(v),
                    Some(_) => {
                        return Err(HomingError::InvalidParameter(format!(
                            "velocity must have {d} finite coordinates"
                        )))
                    }
                    None => Vector::zeros(d),
                };
                Ok(InitialState::DoubleIntegrator(DoubleIntegratorState { x, xdot }))
            }
            RobotKind::Unicycle => {
                if s.velocity.is_some() {
                    return Err(HomingError::InvalidParameter(
                        "velocity is only meaningful for the double integrator".into(),
                    ));
                }
                let theta = s.theta.ok_or_else(|| {
                    HomingError::InvalidParameter("unicycle initial states need theta".into())
                })?;
                Ok(InitialState::Unicycle(UnicycleState::new(x, theta)?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    DoubleIntegrator(DoubleIntegratorState),
    Unicycle(UnicycleState),
}

impl InitialState {
    pub fn position(&self) -> &Point {
        match self {
            InitialState::DoubleIntegrator(s) => &s.x,
            InitialState::Unicycle(s) => &s.x,
        }
    }
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub dimension: usize,
    pub landmarks: LandmarkSet,
    pub home_position: Point,
    pub fov_angle: f64,
    pub robot_kind: RobotKind,
    pub gains: ControlGains,
    pub initial_states: Vec<InitialState>,
    pub dt: f64,
    pub t_max: f64,
    pub epsilon_override: Option<f64>,
    field: NavigationField,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        ScenarioFile::load(path)?.validate()
    }

    pub fn field(&self) -> &NavigationField {
        &self.field
    }

    /// Index of the last step: `⌊t_max / dt⌋`.
    pub fn max_steps(&self) -> usize {
        (self.t_max / self.dt + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub x: Point,
    /// Unicycle heading.
    pub theta: Option<f64>,
    /// Acceleration for the double integrator, `[υ, ω]` for the unicycle.
    pub control: Vector,
    pub delta: Option<f64>,
    pub pair: Option<(usize, usize)>,
    pub fov_margin: Option<f64>,
    /// `½‖v − v*‖²`
    pub v_bearing: Option<f64>,
    pub pos_err: f64,
}

impl TrajectoryRecord {
    pub fn in_violation(&self) -> bool {
        !matches!(self.fov_margin, Some(m) if m >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub kind: RobotKind,
    pub dim: usize,
    pub records: Vec<TrajectoryRecord>,
}

/// Formats a float with 17 significant digits (round-trip precision).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    fmt_f64(x.unwrap_or(f64::NAN))
}

impl TrajectoryLog {
    pub fn header(&self) -> String {
        let mut cols = vec!["t".to_string()];
        cols.extend((0..self.dim).map(|i| format!("x{i}")));
        if self.kind == RobotKind::Unicycle {
            cols.push("theta".into());
        }
        let n_controls = match self.kind {
            RobotKind::DoubleIntegrator => self.dim,
            RobotKind::Unicycle => 2,
        };
        cols.extend((0..n_controls).map(|i| format!("u{i}")));
        cols.extend(
            ["delta", "pair_i", "pair_j", "fov_margin", "V_bearing", "pos_err"]
                .iter()
                .map(|s| s.to_string()),
        );
        cols.join(",")
    }

    /// CSV with one row per record. Undefined values are `NaN`, an
    /// undefined pair is `-1,-1`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.header())?;
        for r in &self.records {
            let mut row: Vec<String> = vec![fmt_f64(r.t)];
            row.extend(r.x.iter().map(|&c| fmt_f64(c)));
            if self.kind == RobotKind::Unicycle {
                row.push(fmt_opt(r.theta));
            }
            row.extend(r.control.iter().map(|&c| fmt_f64(c)));
            row.push(fmt_opt(r.delta));
            let (i, j) = r.pair.map_or((-1i64, -1i64), |(i, j)| (i as i64, j as i64));
            row.push(i.to_string());
            row.push(j.to_string());
            row.push(fmt_opt(r.fov_margin));
            row.push(fmt_opt(r.v_bearing));
            row.push(fmt_f64(r.pos_err));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutSummary {
    pub converged: bool,
    /// Start of the sustained in-tolerance window.
    pub t_converge: Option<f64>,
    pub min_fov_margin: f64,
    pub violation_intervals: Vec<(f64, f64)>,
    pub final_position_error: f64,
}

/// Maximal runs of consecutive records in violation, as `(t_first, t_last)`.
pub fn violation_intervals(records: &[TrajectoryRecord]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut last = 0.0;
    for r in records {
        if r.in_violation() {
            start.get_or_insert(r.t);
            last = r.t;
        } else if let Some(s) = start.take() {
            out.push((s, last));
        }
    }
    if let Some(s) = start {
        out.push((s, last));
    }
    out
}

/// Whether a record meets the home tolerances.
pub fn within_tolerance(kind: RobotKind, r: &TrajectoryRecord) -> bool {
    r.pos_err < POSITION_TOL && (kind == RobotKind::DoubleIntegrator || r.control[0] < SPEED_TOL)
}

fn window_steps(dt: f64) -> usize {
    (CONVERGENCE_WINDOW / dt).round().max(1.0) as usize
}

fn sample_record(
    t: f64,
    x: &Point,
    theta: Option<f64>,
    control: Vector,
    sample: &FieldSample,
    field: &NavigationField,
    home: &Point,
) -> TrajectoryRecord {
    let v_bearing = sample
        .v
        .as_ref()
        .map(|v| 0.5 * (v.as_vector() - field.home().v_star().as_vector()).norm_squared());
    TrajectoryRecord {
        t,
        x: x.clone(),
        theta,
        control,
        delta: sample.pair.map(|p| p.delta),
        pair: sample.pair.map(|p| (p.i, p.j)),
        fov_margin: sample.fov_margin,
        v_bearing,
        pos_err: (x - home).norm(),
    }
}

enum RobotState {
    DoubleIntegrator(DoubleIntegratorState),
    Unicycle(UnicycleState, UnicycleController),
}

/// Runs one closed-loop rollout until `t_max` or sustained convergence.
pub fn run_rollout(scn: &Scenario, initial: &InitialState) -> Result<(TrajectoryLog, RolloutSummary)> {
    let field = scn.field();
    let mut state = match (scn.robot_kind, initial) {
        (RobotKind::DoubleIntegrator, InitialState::DoubleIntegrator(s)) if s.x.len() == scn.dimension => {
            RobotState::DoubleIntegrator(s.clone())
        }
        (RobotKind::Unicycle, InitialState::Unicycle(s)) => {
            RobotState::Unicycle(s.clone(), UnicycleController::new(scn.gains, scn.dt))
        }
        _ => {
            return Err(HomingError::InvalidScenario(
                "initial state does not match the robot model".into(),
            ))
        }
    };

    let n_max = scn.max_steps();
    let window = window_steps(scn.dt);
    let mut records = Vec::new();
    let mut run = 0usize;
    let mut t_converge = None;

    for n in 0..=n_max {
        let t = n as f64 * scn.dt;
        let record = match &mut state {
            RobotState::DoubleIntegrator(s) => {
                let sample = field.sample(&s.x);
                let record = sample_record(t, &s.x, None, sample.f.clone(), &sample, field, &scn.home_position);
                if n < n_max {
                    let mut first = Some(sample.f);
                    *s = di_step_with(s, scn.gains.lambda0, scn.dt, |x| {
                        first.take().unwrap_or_else(|| field.sample(x).f)
                    });
                }
                record
            }
            RobotState::Unicycle(s, controller) => {
                let sample = field.sample(&s.x);
                let cmd = controller.command_from_sample(s, &sample, field);
                let control = Vector::from_column_slice(&[cmd.v, cmd.omega]);
                let record = sample_record(t, &s.x, Some(s.theta), control, &sample, field, &scn.home_position);
                if n < n_max {
                    *s = unicycle_step(s, &cmd, scn.dt);
                }
                record
            }
        };

        if within_tolerance(scn.robot_kind, &record) {
            run += 1;
        } else {
            run = 0;
        }
        records.push(record);
        if run > window {
            t_converge = Some(records[records.len() - run].t);
            break;
        }
    }

    let final_position_error = records.last().map_or(f64::NAN, |r| r.pos_err);
    let min_fov_margin = records
        .iter()
        .filter_map(|r| r.fov_margin)
        .fold(f64::INFINITY, f64::min);
    let summary = RolloutSummary {
        converged: t_converge.is_some(),
        t_converge,
        min_fov_margin,
        violation_intervals: violation_intervals(&records),
        final_position_error,
    };
    let log = TrajectoryLog {
        kind: scn.robot_kind,
        dim: scn.dimension,
        records,
    };
    Ok((log, summary))
}

/// Recomputes the convergence time from a finished log: the start of the
/// first run of in-tolerance records spanning the convergence window.
pub fn convergence_time(log: &TrajectoryLog, dt: f64) -> Option<f64> {
    let window = window_steps(dt);
    let mut run = 0usize;
    for (idx, r) in log.records.iter().enumerate() {
        if within_tolerance(log.kind, r) {
            run += 1;
            if run > window {
                return Some(log.records[idx + 1 - run].t);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// One rollout per initial state, run in parallel, returned in input order.
pub fn run_batch_with_logs(scn: &Scenario) -> Result<Vec<(TrajectoryLog, RolloutSummary)>> {
    scn.initial_states
        .par_iter()
        .enumerate()
        .map(|(index, s)| {
            run_rollout(scn, s).map_err(|e| HomingError::Rollout {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn run_batch(scn: &Scenario) -> Result<Vec<RolloutSummary>> {
    Ok(run_batch_with_logs(scn)?.into_iter().map(|(_, s)| s).collect())
}

/// Axis-aligned sampling window `[x0min, x0max] × [x1min, x1max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBounds {
    pub x0: (f64, f64),
    pub x1: (f64, f64),
}

impl GridBounds {
    pub fn new(x0min: f64, x0max: f64, x1min: f64, x1max: f64) -> Result<Self> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && lo < hi;
        if !ok(x0min, x0max) || !ok(x1min, x1max) {
            return Err(HomingError::InvalidParameter(format!(
                "degenerate grid bounds [{x0min}, {x0max}] x [{x1min}, {x1max}]"
            )));
        }
        Ok(Self {
            x0: (x0min, x0max),
            x1: (x1min, x1max),
        })
    }

    /// Box around the landmarks, home and initial positions, padded by 20%.
    pub fn around(scn: &Scenario) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let points = scn
            .landmarks
            .foci()
            .iter()
            .chain(std::iter::once(&scn.home_position))
            .chain(scn.initial_states.iter().map(InitialState::position));
        for p in points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let pad = |a: usize| (0.2 * (hi[a] - lo[a])).max(1.0);
        Self {
            x0: (lo[0] - pad(0), hi[0] + pad(0)),
            x1: (lo[1] - pad(1), hi[1] + pad(1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub x0: f64,
    pub x1: f64,
    pub sample: FieldSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub resolution: usize,
    pub cells: Vec<GridCell>,
}

impl FieldGrid {
    pub const HEADER: &'static str = "x0,x1,f0,f1,g_t,g_n,delta,defined,fov_margin";

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::HEADER)?;
        for c in &self.cells {
            let s = &c.sample;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                fmt_f64(c.x0),
                fmt_f64(c.x1),
                fmt_f64(s.f[0]),
                fmt_f64(s.f[1]),
                fmt_f64(s.g_t),
                fmt_f64(s.g_n),
                fmt_opt(s.pair.map(|p| p.delta)),
                u8::from(s.is_defined()),
                fmt_opt(s.fov_margin),
            )?;
        }
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

/// Samples the combined field on a `resolution × resolution` grid (rows of
/// constant `x1`). 3-D scenarios are sampled on the plane `x2 = home x2`,
/// reporting the in-plane field components.
pub fn sample_field_grid(scn: &Scenario, bounds: GridBounds, resolution: usize) -> Result<FieldGrid> {
    if resolution < 2 {
        return Err(HomingError::InvalidParameter(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let plane = (scn.dimension == 3).then(|| scn.home_position[2]);
    let field = scn.field();
    let cells = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let (j, i) = (idx / resolution, idx % resolution);
            let x0 = linspace(bounds.x0.0, bounds.x0.1, resolution, i);
            let x1 = linspace(bounds.x1.0, bounds.x1.1, resolution, j);
            let x = match plane {
                Some(z) => Vector::from_column_slice(&[x0, x1, z]),
                None => Vector::from_column_slice(&[x0, x1]),
            };
            GridCell {
                x0,
                x1,
                sample: field.sample(&x),
            }
        })
        .collect();
    Ok(FieldGrid { resolution, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn base_file(robot: RobotKind) -> ScenarioFile {
        ScenarioFile {
            name: Some("test".into()),
            description: None,
            dimension: 2,
            landmarks: vec![vec![0.0, 4.0], vec![2.0, 5.0], vec![4.0, 4.0]],
            home_position: vec![2.0, 1.0],
            fov_angle_rad: PI / 2.0,
            robot,
            gains: GainsFile::default(),
            initial_states: vec![InitialStateFile {
                position: vec![2.0, 1.0],
                velocity: None,
                theta: (robot == RobotKind::Unicycle).then_some(0.0),
            }],
            dt: 1e-2,
            t_max: 5.0,
            epsilon: None,
        }
    }

    #[test]
    fn start_at_home_converges_immediately() {
        for kind in [RobotKind::DoubleIntegrator, RobotKind::Unicycle] {
            let scn = base_file(kind).validate().unwrap();
            let (log, summary) = run_rollout(&scn, &scn.initial_states[0]).unwrap();
            assert!(summary.converged);
            assert_eq!(summary.t_converge, Some(0.0));
            assert!(summary.violation_intervals.is_empty());
            assert!(log.records.iter().all(|r| r.pos_err < POSITION_TOL));
            assert_eq!(log.records.len(), window_steps(scn.dt) + 1);
            assert_eq!(convergence_time(&log, scn.dt), summary.t_converge);
        }
    }

    #[test]
    fn start_inside_obstacle_flags_violation_at_zero() {
        let mut file = base_file(RobotKind::DoubleIntegrator);
        // Between landmarks 0 and 2 the view angle is close to π.
        file.initial_states[0].position = vec![2.0, 4.1];
        file.t_max = 0.5;
        let scn = file.validate().unwrap();
        let (log, summary) = run_rollout(&scn, &scn.initial_states[0]).unwrap();
        assert!(log.records[0].fov_margin.unwrap() < 0.0);
        assert_eq!(summary.violation_intervals[0].0, 0.0);
        assert!(summary.min_fov_margin < 0.0);
    }

    #[test]
    fn record_count_bounded_by_horizon() {
        let mut file = base_file(RobotKind::DoubleIntegrator);
        file.initial_states[0].position = vec![-6.0, -4.0];
        file.t_max = 0.3;
        file.dt = 0.1;
        let scn = file.validate().unwrap();
        let (log, summary) = run_rollout(&scn, &scn.initial_states[0]).unwrap();
        assert_eq!(log.records.len(), 4);
        assert!(!summary.converged);
        assert!(log.records.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn validation_failures() {
        let mut f = base_file(RobotKind::DoubleIntegrator);
        f.t_max = 0.0;
        assert!(matches!(f.validate(), Err(HomingError::InvalidScenario(_))));

        let mut f = base_file(RobotKind::DoubleIntegrator);
        f.fov_angle_rad = 0.5;
        assert!(matches!(f.validate(), Err(HomingError::InfeasibleHome(_))));

        let mut f = base_file(RobotKind::Unicycle);
        f.initial_states[0].theta = Some(4.0);
        assert!(f.validate().is_err());

        let mut f = base_file(RobotKind::Unicycle);
        f.initial_states[0].theta = None;
        assert!(f.validate().is_err());

        let mut f = base_file(RobotKind::DoubleIntegrator);
        f.home_position = vec![0.0, 4.0];
        assert!(f.validate().is_err());

        let mut f = base_file(RobotKind::DoubleIntegrator);
        f.epsilon = Some(0.9);
        assert!(f.validate().is_err());

        let mut f = base_file(RobotKind::Unicycle);
        f.dimension = 3;
        f.landmarks = vec![vec![0.0, 4.0, 0.0], vec![2.0, 5.0, 1.0], vec![4.0, 4.0, 0.0]];
        f.home_position = vec![2.0, 1.0, 0.0];
        f.initial_states[0].position = vec![2.0, 1.0, 0.0];
        assert!(f.validate().is_err());

        let mut f = base_file(RobotKind::DoubleIntegrator);
        f.initial_states.clear();
        assert!(f.validate().is_err());
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let f = base_file(RobotKind::Unicycle);
        let text = serde_json::to_string(&f).unwrap();
        let back: ScenarioFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let bad = text.replacen("\"dt\"", "\"dtt\"", 1);
        assert!(serde_json::from_str::<ScenarioFile>(&bad).is_err());
    }

    #[test]
    fn interval_scan() {
        let rec = |t: f64, m: Option<f64>| TrajectoryRecord {
            t,
            x: Vector::zeros(2),
            theta: None,
            control: Vector::zeros(2),
            delta: None,
            pair: None,
            fov_margin: m,
            v_bearing: None,
            pos_err: 1.0,
        };
        let records: Vec<_> = [Some(0.1), Some(-0.1), Some(-0.2), Some(0.3), None, Some(-1.0)]
            .into_iter()
            .enumerate()
            .map(|(i, m)| rec(i as f64, m))
            .collect();
        assert_eq!(violation_intervals(&records), vec![(1.0, 2.0), (4.0, 5.0)]);
        assert!(violation_intervals(&records[..1]).is_empty());
    }

    #[test]
    fn grid_marks_home_and_landmarks() {
        let scn = base_file(RobotKind::DoubleIntegrator).validate().unwrap();
        // Integer nodes hit the home and every landmark.
        let bounds = GridBounds::new(0.0, 4.0, 1.0, 5.0).unwrap();
        assert!(GridBounds::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(sample_field_grid(&scn, bounds, 1).is_err());
        let grid = sample_field_grid(&scn, bounds, 5).unwrap();
        let at = |x0: f64, x1: f64| {
            grid.cells
                .iter()
                .find(|c| (c.x0 - x0).abs() < 1e-12 && (c.x1 - x1).abs() < 1e-12)
                .expect("node on grid")
        };
        let home = at(2.0, 1.0);
        assert!(home.sample.is_defined());
        assert!(home.sample.f.norm() < 1e-12);
        for (x0, x1) in [(0.0, 4.0), (2.0, 5.0), (4.0, 4.0)] {
            assert!(!at(x0, x1).sample.is_defined());
        }

        let mut a = Vec::new();
        let mut b = Vec::new();
        grid.write_csv(&mut a).unwrap();
        sample_field_grid(&scn, bounds, 5).unwrap().write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("x0,x1,f0,f1,g_t,g_n,delta,defined"));
        assert_eq!(text.lines().count(), 26);
    }

    #[test]
    fn csv_headers() {
        let log = TrajectoryLog {
            kind: RobotKind::Unicycle,
            dim: 2,
            records: vec![],
        };
        assert_eq!(log.header(), "t,x0,x1,theta,u0,u1,delta,pair_i,pair_j,fov_margin,V_bearing,pos_err");
        let log = TrajectoryLog {
            kind: RobotKind::DoubleIntegrator,
            dim: 3,
            records: vec![],
        };
        assert_eq!(log.header(), "t,x0,x1,x2,u0,u1,u2,delta,pair_i,pair_j,fov_margin,V_bearing,pos_err");
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
