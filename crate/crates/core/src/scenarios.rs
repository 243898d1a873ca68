//! Closed-form safe-distance models for the four follower/leader cases.
//!
//! Each formula is evaluated at both ends of the follower response interval
//! `[T_min, T_max]` and returned as a [`DistanceRange`]. `T` is the combined
//! response time (reaction plus brake ramp) in every case.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{DistanceRange, SpeedMs, VehicleParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Both vehicles cruise; the faster follower must slow to the leader's speed.
    ConstantSpeed,
    /// Leader AEB stop while the follower is faster.
    SuddenBrakeFaster,
    /// Leader AEB stop at equal speeds.
    SuddenBrakeEqual,
    /// Leader AEB stop while the follower is slower.
    SuddenBrakeSlower,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::ConstantSpeed,
        ScenarioKind::SuddenBrakeFaster,
        ScenarioKind::SuddenBrakeEqual,
        ScenarioKind::SuddenBrakeSlower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ConstantSpeed => "constant",
            ScenarioKind::SuddenBrakeFaster => "sudden-faster",
            ScenarioKind::SuddenBrakeEqual => "sudden-equal",
            ScenarioKind::SuddenBrakeSlower => "sudden-slower",
        }
    }

    pub fn is_sudden_brake(self) -> bool {
        self != ScenarioKind::ConstantSpeed
    }

    fn inequality(self) -> &'static str {
        match self {
            ScenarioKind::ConstantSpeed | ScenarioKind::SuddenBrakeFaster => "follower > leader",
            ScenarioKind::SuddenBrakeEqual => "follower == leader",
            ScenarioKind::SuddenBrakeSlower => "follower < leader",
        }
    }

    fn admits(self, follower: f64, leader: f64) -> bool {
        match self {
            ScenarioKind::ConstantSpeed | ScenarioKind::SuddenBrakeFaster => follower > leader,
            ScenarioKind::SuddenBrakeEqual => follower == leader,
            ScenarioKind::SuddenBrakeSlower => follower < leader,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

/// A scenario variant together with its speeds. Construction enforces the
/// variant's speed ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    kind: ScenarioKind,
    follower: SpeedMs,
    leader: SpeedMs,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, follower: SpeedMs, leader: SpeedMs) -> Result<Self> {
        check_order(kind, follower, leader)?;
        Ok(Self {
            kind,
            follower,
            leader,
        })
    }

    pub fn equal(speed: SpeedMs) -> Self {
        Self {
            kind: ScenarioKind::SuddenBrakeEqual,
            follower: speed,
            leader: speed,
        }
    }

    pub fn from_kmh(kind: ScenarioKind, follower_kmh: f64, leader_kmh: f64) -> Result<Self> {
        Self::new(
            kind,
            SpeedMs::from_kmh(follower_kmh)?,
            SpeedMs::from_kmh(leader_kmh)?,
        )
    }

    pub fn kind(&self) -> ScenarioKind {
        self.kind
    }

    pub fn follower(&self) -> SpeedMs {
        self.follower
    }

    pub fn leader(&self) -> SpeedMs {
        self.leader
    }

    /// Positive speed difference, oriented per variant. Zero for equal speeds.
    pub fn relative_speed(&self) -> f64 {
        (self.follower.get() - self.leader.get()).abs()
    }
}

fn check_order(kind: ScenarioKind, follower: SpeedMs, leader: SpeedMs) -> Result<()> {
    if kind.admits(follower.get(), leader.get()) {
        Ok(())
    } else {
        Err(Error::SpeedOrdering {
            scenario: kind.name(),
            inequality: kind.inequality(),
            follower: follower.get(),
            leader: leader.get(),
        })
    }
}

/// Evaluates `offset + coeff * T` at both response bounds.
fn over_response(p: &VehicleParams, coeff: f64, offset: f64) -> Result<DistanceRange> {
    DistanceRange::new(
        coeff * p.follower_response_min + offset,
        coeff * p.follower_response_max + offset,
    )
}

pub fn safe_distance_constant_speed(
    v_h: SpeedMs,
    v_a: SpeedMs,
    p: &VehicleParams,
) -> Result<DistanceRange> {
    check_order(ScenarioKind::ConstantSpeed, v_h, v_a)?;
    p.validate()?;
    let v_rel = v_h.get() - v_a.get();
    over_response(
        p,
        v_rel,
        v_rel * v_rel / (2.0 * p.max_decel) + p.critical_distance,
    )
}

pub fn safe_distance_sudden_faster(
    v_h: SpeedMs,
    v_a: SpeedMs,
    p: &VehicleParams,
) -> Result<DistanceRange> {
    check_order(ScenarioKind::SuddenBrakeFaster, v_h, v_a)?;
    p.validate()?;
    let vh = v_h.get();
    let v_rel = vh - v_a.get();
    over_response(
        p,
        vh,
        v_rel * p.leader_reaction + vh * vh / (2.0 * p.max_decel) + p.critical_distance,
    )
}

pub fn safe_distance_sudden_equal(v: SpeedMs, p: &VehicleParams) -> Result<DistanceRange> {
    p.validate()?;
    let v = v.get();
    over_response(
        p,
        v,
        -v * p.leader_reaction + v * v / (2.0 * p.max_decel) + p.critical_distance,
    )
}

/// Can fall below the critical distance for a very slow follower; the value
/// is returned as computed.
pub fn safe_distance_sudden_slower(
    v_h: SpeedMs,
    v_a: SpeedMs,
    p: &VehicleParams,
) -> Result<DistanceRange> {
    check_order(ScenarioKind::SuddenBrakeSlower, v_h, v_a)?;
    p.validate()?;
    let vh = v_h.get();
    let v_rel = v_a.get() - vh;
    over_response(
        p,
        vh,
        -v_rel * p.leader_reaction + vh * vh / (2.0 * p.max_decel) + p.critical_distance,
    )
}

pub fn safe_distance(s: &Scenario, p: &VehicleParams) -> Result<DistanceRange> {
    match s.kind {
        ScenarioKind::ConstantSpeed => safe_distance_constant_speed(s.follower, s.leader, p),
        ScenarioKind::SuddenBrakeFaster => safe_distance_sudden_faster(s.follower, s.leader, p),
        ScenarioKind::SuddenBrakeEqual => safe_distance_sudden_equal(s.follower, p),
        ScenarioKind::SuddenBrakeSlower => safe_distance_sudden_slower(s.follower, s.leader, p),
    }
}
