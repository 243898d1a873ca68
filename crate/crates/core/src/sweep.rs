//! Grid evaluation of a scenario against seconds rules.
//!
//! The grid axis depends on the scenario: relative speed for
//! `ConstantSpeed` (follower = leader + grid value), follower speed for the
//! other three. All grid speeds are km/h.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{SpeedMs, VehicleParams};
use crate::rules::{classify, seconds_rule_distance, SafetyClass};
use crate::scenarios::{safe_distance, Scenario, ScenarioKind};

pub const DEFAULT_RULES: [f64; 2] = [2.0, 3.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: ScenarioKind,
    /// Leader speed in km/h. Ignored for `SuddenBrakeEqual`.
    pub fixed_speed: f64,
    pub grid: Vec<f64>,
    pub rules: Vec<f64>,
    pub params: VehicleParams,
}

impl SweepSpec {
    pub fn new(kind: ScenarioKind, fixed_speed: f64, grid: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        Ok(Self {
            kind,
            fixed_speed,
            grid,
            rules: DEFAULT_RULES.to_vec(),
            params: VehicleParams::default(),
        })
    }

    pub fn with_rules(mut self, rules: Vec<f64>) -> Self {
        self.rules = rules;
        self
    }

    pub fn with_params(mut self, params: VehicleParams) -> Self {
        self.params = params;
        self
    }

    /// Setup behind the reference tables 2 to 5: leader 20 km/h for the
    /// constant-speed and faster-follower cases, 60 km/h for the slower one.
    pub fn reference_table(id: u8) -> Option<Self> {
        let (kind, fixed, start) = match id {
            2 => (ScenarioKind::ConstantSpeed, 20.0, 5.0),
            3 => (ScenarioKind::SuddenBrakeFaster, 20.0, 25.0),
            4 => (ScenarioKind::SuddenBrakeEqual, 0.0, 20.0),
            5 => (ScenarioKind::SuddenBrakeSlower, 60.0, 15.0),
            _ => return None,
        };
        let grid = (0..9).map(|i| start + 5.0 * i as f64).collect();
        SweepSpec::new(kind, fixed, grid).ok()
    }

    pub fn scenario_at(&self, grid_speed: f64) -> Result<Scenario> {
        scenario_at(self.kind, self.fixed_speed, grid_speed)
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (index, &value) in grid.iter().enumerate() {
        if !value.is_finite() || (index > 0 && value <= grid[index - 1]) {
            return Err(Error::GridNotIncreasing { index, value });
        }
    }
    Ok(())
}

fn scenario_at(kind: ScenarioKind, fixed_speed: f64, grid_speed: f64) -> Result<Scenario> {
    match kind {
        ScenarioKind::ConstantSpeed => {
            Scenario::from_kmh(kind, fixed_speed + grid_speed, fixed_speed)
        }
        ScenarioKind::SuddenBrakeEqual => Ok(Scenario::equal(SpeedMs::from_kmh(grid_speed)?)),
        ScenarioKind::SuddenBrakeFaster | ScenarioKind::SuddenBrakeSlower => {
            Scenario::from_kmh(kind, grid_speed, fixed_speed)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuleCheck {
    pub seconds: f64,
    pub distance: f64,
    pub class: SafetyClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// Grid value (relative speed for constant-speed sweeps).
    pub speed: f64,
    pub follower_speed: f64,
    pub leader_speed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_speed: Option<f64>,
    pub d_min: f64,
    pub d_max: f64,
    pub rules: Vec<RuleCheck>,
    /// Set when the rule comparison rests on an interpretation (rule distance
    /// at follower speed against a table indexed by relative speed).
    pub rule_interpretation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Grid points whose speeds violate the scenario ordering.
    pub rejected: Vec<Error>,
}

impl SweepOutcome {
    pub fn is_complete(&self) -> bool {
        self.rejected.is_empty()
    }
}

fn evaluate_point(spec: &SweepSpec, grid_speed: f64) -> Result<SweepRow> {
    let scenario = spec.scenario_at(grid_speed)?;
    let range = safe_distance(&scenario, &spec.params)?;
    let rules = spec
        .rules
        .iter()
        .map(|&seconds| {
            let distance = seconds_rule_distance(scenario.follower(), seconds);
            RuleCheck {
                seconds,
                distance,
                class: classify(distance, &range),
            }
        })
        .collect();
    let constant = spec.kind == ScenarioKind::ConstantSpeed;
    Ok(SweepRow {
        speed: grid_speed,
        follower_speed: scenario.follower().to_kmh(),
        leader_speed: scenario.leader().to_kmh(),
        relative_speed: constant.then_some(grid_speed),
        d_min: range.d_min(),
        d_max: range.d_max(),
        rules,
        rule_interpretation: constant,
    })
}

pub fn run_sweep(spec: &SweepSpec) -> SweepOutcome {
    let mut rows = Vec::with_capacity(spec.grid.len());
    let mut rejected = Vec::new();
    for (index, &speed) in spec.grid.iter().enumerate() {
        match evaluate_point(spec, speed) {
            Ok(row) => rows.push(row),
            Err(e) => rejected.push(Error::GridPoint {
                index,
                speed,
                source: Box::new(e),
            }),
        }
    }
    SweepOutcome { rows, rejected }
}

/// Largest grid speed whose classification under the `rule_seconds` rule is
/// not [`SafetyClass::Unsafe`]. `None` if every point is unsafe.
pub fn max_non_unsafe_speed(
    rule_seconds: f64,
    kind: ScenarioKind,
    fixed_speed: f64,
    grid: &[f64],
    params: &VehicleParams,
) -> Result<Option<f64>> {
    let spec = SweepSpec::new(kind, fixed_speed, grid.to_vec())?
        .with_rules(vec![rule_seconds])
        .with_params(*params);
    let outcome = run_sweep(&spec);
    if let Some(e) = outcome.rejected.into_iter().next() {
        return Err(e);
    }
    Ok(outcome
        .rows
        .iter()
        .rev()
        .find(|r| r.rules[0].class != SafetyClass::Unsafe)
        .map(|r| r.speed))
}
