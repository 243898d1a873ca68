//! Seconds-rule headways and their classification against a model range.

use std::fmt;

use serde::Serialize;

use crate::kinematics::{DistanceRange, SpeedMs};

/// Outcome of comparing a headway rule with a safe-distance interval.
///
/// Ordered `Unsafe < DriverDependent < Safe`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SafetyClass {
    /// Rule distance is shorter than the most alert driver needs.
    Unsafe,
    /// Rule distance lies inside the interval: depends on the driver's response.
    DriverDependent,
    /// Rule distance covers even the slowest response.
    Safe,
}

impl SafetyClass {
    pub fn name(self) -> &'static str {
        match self {
            SafetyClass::Unsafe => "unsafe",
            SafetyClass::DriverDependent => "driver-dependent",
            SafetyClass::Safe => "safe",
        }
    }
}

impl fmt::Display for SafetyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SafetyClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            SafetyClass::Unsafe,
            SafetyClass::DriverDependent,
            SafetyClass::Safe,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| format!("unknown safety class '{s}'"))
    }
}

/// Distance covered in `seconds` at the follower's own speed.
pub fn seconds_rule_distance(v: SpeedMs, seconds: f64) -> f64 {
    v.get() * seconds
}

pub fn classify(rule_distance: f64, model: &DistanceRange) -> SafetyClass {
    if rule_distance >= model.d_max() {
        SafetyClass::Safe
    } else if rule_distance < model.d_min() {
        SafetyClass::Unsafe
    } else {
        SafetyClass::DriverDependent
    }
}
