//! Unit handling and per-vehicle braking distance primitives.
//!
//! All speeds are carried in m/s internally; km/h only crosses the CLI and
//! report boundary. Distances are in meters, times in seconds, decelerations
//! in m/s² (given as positive magnitudes).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const KMH_PER_MS: f64 = 3.6;

fn check_nonneg(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::NegativeOrNonFinite { name, value })
    }
}

fn is_positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Speed in meters per second. Always finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
pub struct SpeedMs(f64);

impl SpeedMs {
    pub const ZERO: SpeedMs = SpeedMs(0.0);

    pub fn new(ms: f64) -> Result<Self> {
        check_nonneg("speed", ms).map(SpeedMs)
    }

    pub fn from_kmh(kmh: f64) -> Result<Self> {
        kmh_to_ms(kmh)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn to_kmh(self) -> f64 {
        self.0 * KMH_PER_MS
    }
}

pub fn kmh_to_ms(kmh: f64) -> Result<SpeedMs> {
    check_nonneg("speed (km/h)", kmh).map(|v| SpeedMs(v / KMH_PER_MS))
}

/// Braking and response parameters of the follower/leader pair.
///
/// `follower_response_min`/`follower_response_max` are the combined
/// response interval (driver reaction plus brake ramp). `ramp_time` is kept
/// separately because the trajectory oracle needs the ramp shape.
/// `vehicle_length` is carried for completeness; no distance formula uses it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    pub follower_response_min: f64,
    pub follower_response_max: f64,
    pub ramp_time: f64,
    pub max_decel: f64,
    pub leader_reaction: f64,
    pub critical_distance: f64,
    pub vehicle_length: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            follower_response_min: 0.9,
            follower_response_max: 1.5,
            ramp_time: 0.1,
            max_decel: 7.0,
            leader_reaction: 0.02,
            critical_distance: 2.0,
            vehicle_length: 3.5,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.follower_response_min,
            self.follower_response_max,
            self.ramp_time,
            self.max_decel,
            self.leader_reaction,
            self.critical_distance,
            self.vehicle_length,
        ];
        let fail = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if all.iter().any(|x| !x.is_finite()) {
            return fail("all parameters must be finite");
        }
        if !is_positive(self.follower_response_min) {
            return fail("follower_response_min must be > 0");
        }
        if self.follower_response_min > self.follower_response_max {
            return fail("follower_response_min must be <= follower_response_max");
        }
        if !(self.ramp_time >= 0.0 && self.ramp_time < self.follower_response_min) {
            return fail("ramp_time must satisfy 0 <= ramp_time < follower_response_min");
        }
        if !is_positive(self.max_decel) {
            return fail("max_decel must be > 0");
        }
        if self.leader_reaction < 0.0 {
            return fail("leader_reaction must be >= 0");
        }
        if self.critical_distance < 0.0 {
            return fail("critical_distance must be >= 0");
        }
        if !is_positive(self.vehicle_length) {
            return fail("vehicle_length must be > 0");
        }
        Ok(())
    }

    /// Width of the response-time interval, `T_max - T_min`.
    pub fn response_spread(&self) -> f64 {
        self.follower_response_max - self.follower_response_min
    }
}

/// Safe-distance interval induced by the follower response-time interval.
///
/// Bounds may be negative: the slower-follower formula dips below the
/// critical distance (and eventually below zero) for a near-stationary
/// follower, and that value is returned unmodified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceRange {
    d_min: f64,
    d_max: f64,
}

impl DistanceRange {
    pub fn new(d_min: f64, d_max: f64) -> Result<Self> {
        if d_min.is_finite() && d_max.is_finite() && d_min <= d_max {
            Ok(Self { d_min, d_max })
        } else {
            Err(Error::InvalidRange { d_min, d_max })
        }
    }

    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    pub fn width(&self) -> f64 {
        self.d_max - self.d_min
    }

    pub fn contains(&self, d: f64) -> bool {
        self.d_min <= d && d <= self.d_max
    }
}

/// Distance covered at constant speed during a reaction interval.
pub fn reaction_distance(v: SpeedMs, t: f64) -> Result<f64> {
    let t = check_nonneg("reaction time", t)?;
    Ok(v.get() * t)
}

/// Distance covered while deceleration grows linearly from 0 to `a` over `t_l`.
pub fn ramp_phase_distance(v: SpeedMs, t_l: f64, a: f64) -> Result<f64> {
    let t_l = check_nonneg("ramp time", t_l)?;
    if !is_positive(a) {
        return Err(Error::NonPositiveDecel(a));
    }
    let required = a * t_l / 2.0;
    if v.get() < required {
        return Err(Error::SpeedTooLowForRamp {
            speed: v.get(),
            required,
        });
    }
    Ok(v.get() * t_l - a * t_l * t_l / 6.0)
}

/// Stopping distance at constant deceleration `a`.
pub fn constant_decel_distance(v: SpeedMs, a: f64) -> Result<f64> {
    if !is_positive(a) {
        return Err(Error::NonPositiveDecel(a));
    }
    Ok(v.get() * v.get() / (2.0 * a))
}

/// Total follower stopping distance over the response interval.
///
/// The ramp term `-a*t_l²/6` is dropped, so each bound is `v*T + v²/(2a)`.
pub fn follower_stop_distance_range(v: SpeedMs, p: &VehicleParams) -> Result<DistanceRange> {
    p.validate()?;
    let braking = constant_decel_distance(v, p.max_decel)?;
    DistanceRange::new(
        v.get() * p.follower_response_min + braking,
        v.get() * p.follower_response_max + braking,
    )
}

/// Leader travel before AEB brings it to rest: only its reaction distance.
pub fn leader_stop_distance(v_leader: SpeedMs, leader_reaction: f64) -> Result<f64> {
    reaction_distance(v_leader, leader_reaction)
}

/// Follower travel while responding and then slowing from `v_h` to `v_a`.
pub fn follower_adaptation_distance(v_h: SpeedMs, v_a: SpeedMs, t: f64, a: f64) -> Result<f64> {
    if v_h < v_a {
        return Err(Error::SpeedOrdering {
            scenario: "follower adaptation",
            inequality: "follower speed >= leader speed",
            follower: v_h.get(),
            leader: v_a.get(),
        });
    }
    let t = check_nonneg("response time", t)?;
    if !is_positive(a) {
        return Err(Error::NonPositiveDecel(a));
    }
    let (vh, va) = (v_h.get(), v_a.get());
    Ok(vh * t + (vh * vh - va * va) / (2.0 * a))
}

/// Leader travel at constant speed while the follower adapts.
pub fn leader_travel_during_adaptation(
    v_a: SpeedMs,
    v_rel: SpeedMs,
    t: f64,
    a: f64,
) -> Result<f64> {
    let t = check_nonneg("response time", t)?;
    if !is_positive(a) {
        return Err(Error::NonPositiveDecel(a));
    }
    Ok(v_a.get() * (t + v_rel.get() / a))
}
