//! Fixed-timestep kinematic simulation of a two-vehicle braking event.
//!
//! This is the independent check on the closed forms in [`crate::scenarios`].
//! It integrates the full three-stage follower profile (hold, linear
//! deceleration ramp, constant deceleration) without dropping the ramp term,
//! and never calls into the closed-form modules to move the vehicles.
//!
//! Each stage is advanced with its exact closed-form position/speed, so `dt`
//! only controls sampling granularity. The leader AEB stop is instantaneous
//! once its reaction time has elapsed.
//!
//! Follower response onset:
//! - `ConstantSpeed`, `SuddenBrakeEqual`: at t = 0 (follower reacts to the
//!   leader's state change directly).
//! - `SuddenBrakeFaster`, `SuddenBrakeSlower`: at t = tr_A (after the leader
//!   has come to rest).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::VehicleParams;
use crate::scenarios::{safe_distance, Scenario, ScenarioKind};

pub const DEFAULT_DT: f64 = 1e-3;
pub const MAX_DT: f64 = 0.01;

/// Fixed allowance above the ramp surplus when checking a closed form.
pub const SLACK_ALLOWANCE: f64 = 0.1;

const RESPONSE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub t: f64,
    pub x_leader: f64,
    pub x_follower: f64,
    pub v_follower: f64,
    /// Bumper-to-bumper spacing.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrakeTrace {
    samples: Vec<TraceSample>,
    min_gap: f64,
    collided: bool,
    settle_time: f64,
    brake_onset: f64,
}

impl BrakeTrace {
    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn collided(&self) -> bool {
        self.collided
    }

    /// First time at which both vehicles hold their final speeds.
    pub fn settle_time(&self) -> f64 {
        self.settle_time
    }

    /// Time the follower's deceleration ramp starts.
    pub fn brake_onset(&self) -> f64 {
        self.brake_onset
    }

    pub fn final_sample(&self) -> &TraceSample {
        self.samples
            .last()
            .expect("trace always has at least one sample")
    }
}

/// Piecewise follower motion: hold `v0`, ramp deceleration over at most
/// `ramp_time`, then constant deceleration down to `v_end`.
#[derive(Debug, Clone, Copy)]
struct FollowerMotion {
    v0: f64,
    v_end: f64,
    decel: f64,
    ramp_time: f64,
    brake_onset: f64,
    ramp_len: f64,
    v_ramp_end: f64,
    decel_len: f64,
}

impl FollowerMotion {
    fn new(v0: f64, v_end: f64, decel: f64, ramp_time: f64, brake_onset: f64) -> Self {
        let drop = (v0 - v_end).max(0.0);
        let (ramp_len, v_ramp_end) = if ramp_time == 0.0 || drop == 0.0 {
            (0.0, v0)
        } else if drop >= decel * ramp_time / 2.0 {
            (ramp_time, v0 - decel * ramp_time / 2.0)
        } else {
            // target speed reached before the ramp completes
            ((2.0 * ramp_time * drop / decel).sqrt(), v_end)
        };
        let decel_len = ((v_ramp_end - v_end) / decel).max(0.0);
        Self {
            v0,
            v_end,
            decel,
            ramp_time,
            brake_onset,
            ramp_len,
            v_ramp_end,
            decel_len,
        }
    }

    fn needs_braking(&self) -> bool {
        self.v0 > self.v_end
    }

    fn settle_time(&self) -> f64 {
        if self.needs_braking() {
            self.brake_onset + self.ramp_len + self.decel_len
        } else {
            0.0
        }
    }

    /// Position and speed at time `t`.
    fn state(&self, t: f64) -> (f64, f64) {
        if !self.needs_braking() || t <= self.brake_onset {
            return (self.v0 * t, self.v0);
        }
        let x_onset = self.v0 * self.brake_onset;
        let tau = t - self.brake_onset;
        if tau <= self.ramp_len {
            let k = self.decel / self.ramp_time;
            let v = self.v0 - k * tau * tau / 2.0;
            let x = x_onset + self.v0 * tau - k * tau * tau * tau / 6.0;
            return (x, v);
        }
        let x_ramp_end = if self.ramp_len > 0.0 {
            let k = self.decel / self.ramp_time;
            x_onset + self.v0 * self.ramp_len - k * self.ramp_len.powi(3) / 6.0
        } else {
            x_onset
        };
        let sigma = tau - self.ramp_len;
        if sigma <= self.decel_len {
            let v = self.v_ramp_end - self.decel * sigma;
            let x = x_ramp_end + self.v_ramp_end * sigma - self.decel * sigma * sigma / 2.0;
            return (x, v);
        }
        let d = self.decel_len;
        let x_stop = x_ramp_end + self.v_ramp_end * d - self.decel * d * d / 2.0;
        (x_stop + self.v_end * (sigma - d), self.v_end)
    }
}

fn check_dt(dt: f64, p: &VehicleParams) -> Result<()> {
    let max = if p.ramp_time > 0.0 {
        MAX_DT.min(p.ramp_time)
    } else {
        MAX_DT
    };
    if dt.is_finite() && dt > 0.0 && dt <= max {
        Ok(())
    } else {
        Err(Error::InvalidTimestep { dt, max })
    }
}

pub fn simulate_brake_event(
    s: &Scenario,
    initial_gap: f64,
    response: f64,
    p: &VehicleParams,
    dt: f64,
) -> Result<BrakeTrace> {
    p.validate()?;
    check_dt(dt, p)?;
    if !(initial_gap.is_finite() && initial_gap >= 0.0) {
        return Err(Error::NegativeGap(initial_gap));
    }
    let (t_lo, t_hi) = (p.follower_response_min, p.follower_response_max);
    if !(response >= t_lo - RESPONSE_TOLERANCE && response <= t_hi + RESPONSE_TOLERANCE) {
        return Err(Error::ResponseOutOfRange {
            response,
            min: t_lo,
            max: t_hi,
        });
    }
    // re-check ordering in case the caller built the scenario by hand
    let s = Scenario::new(s.kind(), s.follower(), s.leader())?;

    let v_h = s.follower().get();
    let v_a = s.leader().get();
    let (leader_stop, follower_target, onset) = match s.kind() {
        ScenarioKind::ConstantSpeed => (f64::INFINITY, v_a, 0.0),
        ScenarioKind::SuddenBrakeEqual => (p.leader_reaction, 0.0, 0.0),
        ScenarioKind::SuddenBrakeFaster | ScenarioKind::SuddenBrakeSlower => {
            (p.leader_reaction, 0.0, p.leader_reaction)
        }
    };
    let brake_onset = onset + (response - p.ramp_time);
    let follower = FollowerMotion::new(v_h, follower_target, p.max_decel, p.ramp_time, brake_onset);

    let leader_settle = if leader_stop.is_finite() && v_a > 0.0 {
        leader_stop
    } else {
        0.0
    };
    let settle_time = follower.settle_time().max(leader_settle);

    let sample = |t: f64| {
        let x_leader = v_a * t.min(leader_stop);
        let (x_follower, v_follower) = follower.state(t);
        TraceSample {
            t,
            x_leader,
            x_follower,
            v_follower,
            gap: initial_gap + x_leader - x_follower,
        }
    };

    let mut samples = Vec::with_capacity((settle_time / dt) as usize + 2);
    let mut k: u64 = 0;
    loop {
        let t = k as f64 * dt;
        if t >= settle_time {
            break;
        }
        samples.push(sample(t));
        k += 1;
    }
    samples.push(sample(settle_time));

    let min_gap = samples.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min);

    Ok(BrakeTrace {
        samples,
        min_gap,
        collided: min_gap < 0.0,
        settle_time,
        brake_onset,
    })
}

/// Result of simulating one response-time boundary at its closed-form gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCheck {
    pub response: f64,
    pub closed_form_gap: f64,
    pub initial_gap: f64,
    pub min_gap: f64,
    /// `min_gap - critical_distance`
    pub slack: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub scenario: Scenario,
    pub dt: f64,
    pub gap_scale: f64,
    pub checks: Vec<BoundaryCheck>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Speed that governs the gap dynamics: relative speed for constant-speed
/// following, follower speed once the leader has stopped.
pub fn effective_speed(s: &Scenario) -> f64 {
    match s.kind() {
        ScenarioKind::ConstantSpeed => s.relative_speed(),
        _ => s.follower().get(),
    }
}

pub fn verify_closed_form(s: &Scenario, p: &VehicleParams, dt: f64) -> Result<Verification> {
    verify_closed_form_scaled(s, p, dt, 1.0)
}

/// Like [`verify_closed_form`], but starts each simulation at
/// `gap_scale * d(T)` instead of the closed-form gap itself.
pub fn verify_closed_form_scaled(
    s: &Scenario,
    p: &VehicleParams,
    dt: f64,
    gap_scale: f64,
) -> Result<Verification> {
    let range = safe_distance(s, p)?;
    let v_eff = effective_speed(s);
    let lower_bound = p.critical_distance - v_eff * dt;
    let upper_bound = p.critical_distance + 0.5 * v_eff * p.ramp_time + SLACK_ALLOWANCE;

    let checks = [
        (p.follower_response_min, range.d_min()),
        (p.follower_response_max, range.d_max()),
    ]
    .into_iter()
    .map(|(response, d)| {
        let initial_gap = d * gap_scale;
        let trace = simulate_brake_event(s, initial_gap, response, p, dt)?;
        let min_gap = trace.min_gap();
        Ok(BoundaryCheck {
            response,
            closed_form_gap: d,
            initial_gap,
            min_gap,
            slack: min_gap - p.critical_distance,
            lower_bound,
            upper_bound,
            passed: lower_bound <= min_gap && min_gap <= upper_bound,
        })
    })
    .collect::<Result<Vec<_>>>()?;

    Ok(Verification {
        scenario: *s,
        dt,
        gap_scale,
        checks,
    })
}
