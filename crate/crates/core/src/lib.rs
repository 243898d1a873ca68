//! Safe following distance between a human-driven follower and a fully
//! autonomous, AEB-equipped leader.
//!
//! - [`kinematics`]: units and per-vehicle braking distances
//! - [`scenarios`]: closed-form safe-distance intervals for the four cases
//! - [`rules`]: seconds-rule headways and their classification
//! - [`oracle`]: timestep simulation used to check the closed forms
//! - [`sweep`]: grid evaluation behind the reference tables
//! - [`report`] and [`cli`]: rendering and the command-line front end

pub mod cli;
pub mod error;
pub mod kinematics;
pub mod oracle;
pub mod report;
pub mod rules;
pub mod scenarios;
pub mod sweep;

pub use error::{Error, Result};
pub use kinematics::{kmh_to_ms, DistanceRange, SpeedMs, VehicleParams};
pub use oracle::{simulate_brake_event, verify_closed_form, BrakeTrace, Verification};
pub use rules::{classify, seconds_rule_distance, SafetyClass};
pub use scenarios::{safe_distance, Scenario, ScenarioKind};
pub use sweep::{max_non_unsafe_speed, run_sweep, SweepRow, SweepSpec};
