//! Closed-loop robot models driven by the navigation field.
//!
//! * Damped double integrator `ẍ = −λ₀ẋ + μ` with `μ = f(x)`, in 2-D or 3-D.
//! * Planar unicycle `q̇ = [cos θ, sin θ, 0]ᵀυ + [0, 0, 1]ᵀω` following the
//!   heading `ψ` of the normalized field.
//!
//! Both are advanced with classic fixed-step RK4.

use std::f64::consts::PI;

use crate::fields::{FieldSample, NavigationField};
use crate::{HomingError, Point, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlGains {
    /// Damping coefficient, 1/s.
    pub lambda0: f64,
    /// Linear speed gain of the unicycle.
    pub k_v: f64,
    /// Heading gain of the unicycle, 1/s.
    pub k_omega: f64,
}

impl ControlGains {
    pub fn new(lambda0: f64, k_v: f64, k_omega: f64) -> Result<Self> {
        for (name, value) in [("lambda0", lambda0), ("k_v", k_v), ("k_omega", k_omega)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(HomingError::InvalidParameter(format!(
                    "gain {name} must be positive, got {value}"
                )));
            }
        }
        Ok(Self { lambda0, k_v, k_omega })
    }
}

impl Default for ControlGains {
    fn default() -> Self {
        Self {
            lambda0: 1.0,
            k_v: 1.0,
            k_omega: 2.0,
        }
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleIntegratorState {
    pub x: Point,
    pub xdot: Vector,
}

impl DoubleIntegratorState {
    pub fn at_rest(x: Point) -> Self {
        let d = x.len();
        Self { x, xdot: Vector::zeros(d) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnicycleState {
    pub x: Point,
    /// Heading in `(−π, π]`.
    pub theta: f64,
}

impl UnicycleState {
    pub fn new(x: Point, theta: f64) -> Result<Self> {
        if x.len() != 2 {
            return Err(HomingError::DimensionMismatch { expected: 2, got: x.len() });
        }
        if !(theta > -PI && theta <= PI) {
            return Err(HomingError::InvalidParameter(format!(
                "heading {theta} is not wrapped to (-pi, pi]"
            )));
        }
        Ok(Self { x, theta })
    }
}

/// Acceleration command `μ = f(x)`.
pub fn di_control(x: &Point, field: &NavigationField) -> Vector {
    field.sample(x).f
}

/// One RK4 step of `ẋ = xdot, ẍ = −λ₀·xdot + accel(x)`.
pub fn di_step_with<F>(s: &DoubleIntegratorState, lambda0: f64, dt: f64, mut accel: F) -> DoubleIntegratorState
where
    F: FnMut(&Point) -> Vector,
{
    let mut deriv = |x: &Point, v: &Vector| (v.clone(), accel(x) - v * lambda0);
    let (k1x, k1v) = deriv(&s.x, &s.xdot);
    let (k2x, k2v) = deriv(&(&s.x + &k1x * (dt / 2.0)), &(&s.xdot + &k1v * (dt / 2.0)));
    let (k3x, k3v) = deriv(&(&s.x + &k2x * (dt / 2.0)), &(&s.xdot + &k2v * (dt / 2.0)));
    let (k4x, k4v) = deriv(&(&s.x + &k3x * dt), &(&s.xdot + &k3v * dt));
    DoubleIntegratorState {
        x: &s.x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0),
        xdot: &s.xdot + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0),
    }
}

/// Closed-loop double integrator step; the field is evaluated at every
/// RK4 stage.
pub fn di_step(
    s: &DoubleIntegratorState,
    field: &NavigationField,
    gains: &ControlGains,
    dt: f64,
) -> DoubleIntegratorState {
    di_step_with(s, gains.lambda0, dt, |x| field.sample(x).f)
}

/// Linear and angular velocity command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnicycleCommand {
    pub v: f64,
    pub omega: f64,
    /// Heading of `f°`; `None` when `f° = 0`.
    pub psi: Option<f64>,
}

impl UnicycleCommand {
    pub const STOP: Self = Self {
        v: 0.0,
        omega: 0.0,
        psi: None,
    };
}

/// `υ = k_υ(√(1 − vᵀv*) + |δ|)`, `ω = −k_ω(θ − ψ) + ψ̇` with `ψ` the heading
/// of `f°`. Stops where `f° = 0`.
pub fn unicycle_control(
    s: &UnicycleState,
    sample: &FieldSample,
    v_star: &Vector,
    gains: &ControlGains,
    psi_dot: f64,
) -> UnicycleCommand {
    let (Some(v), Some(pair)) = (&sample.v, sample.pair) else {
        return UnicycleCommand::STOP;
    };
    if sample.f_unit.norm() == 0.0 {
        return UnicycleCommand::STOP;
    }
    let psi = sample.f_unit[1].atan2(sample.f_unit[0]);
    let speed = gains.k_v * ((1.0 - v.dot(v_star)).max(0.0).sqrt() + pair.delta.abs());
    let omega = -gains.k_omega * wrap_angle(s.theta - psi) + psi_dot;
    UnicycleCommand {
        v: speed,
        omega,
        psi: Some(psi),
    }
}

/// Stateful unicycle controller: estimates `ψ̇` by differencing `ψ` over
/// one control period (zero on the first step and after a stop).
#[derive(Debug, Clone)]
pub struct UnicycleController {
    gains: ControlGains,
    dt: f64,
    prev_psi: Option<f64>,
}

impl UnicycleController {
    pub fn new(gains: ControlGains, dt: f64) -> Self {
        Self {
            gains,
            dt,
            prev_psi: None,
        }
    }

    pub fn command(&mut self, s: &UnicycleState, field: &NavigationField) -> (UnicycleCommand, FieldSample) {
        let sample = field.sample(&s.x);
        let cmd = self.command_from_sample(s, &sample, field);
        (cmd, sample)
    }

    pub fn command_from_sample(
        &mut self,
        s: &UnicycleState,
        sample: &FieldSample,
        field: &NavigationField,
    ) -> UnicycleCommand {
        let psi_now = (sample.f_unit.norm() > 0.0).then(|| sample.f_unit[1].atan2(sample.f_unit[0]));
        let psi_dot = match (self.prev_psi, psi_now) {
            (Some(prev), Some(now)) => wrap_angle(now - prev) / self.dt,
            _ => 0.0,
        };
        let cmd = unicycle_control(s, sample, field.home().v_star(), &self.gains, psi_dot);
        self.prev_psi = cmd.psi;
        cmd
    }
}

/// RK4 step of the unicycle kinematics with the command held over the step.
pub fn unicycle_step(s: &UnicycleState, cmd: &UnicycleCommand, dt: f64) -> UnicycleState {
    let f = |theta: f64| [cmd.v * theta.cos(), cmd.v * theta.sin(), cmd.omega];
    let k1 = f(s.theta);
    let k2 = f(s.theta + k1[2] * dt / 2.0);
    let k3 = f(s.theta + k2[2] * dt / 2.0);
    let k4 = f(s.theta + k3[2] * dt);
    let inc = |i: usize| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * dt / 6.0;
    let mut x = s.x.clone();
    x[0] += inc(0);
    x[1] += inc(1);
    UnicycleState {
        x,
        theta: wrap_angle(s.theta + inc(2)),
    }
}
