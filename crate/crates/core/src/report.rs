//! Configuration loading and rendering of tables, CSV, JSON and plot series.
//!
//! CSV output is comma-separated with a header row, `.` decimal point and LF
//! line endings. Numbers are printed with a fixed number of decimals.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::kinematics::{DistanceRange, SpeedMs, VehicleParams};
use crate::oracle::{BrakeTrace, Verification, DEFAULT_DT, MAX_DT};
use crate::rules::seconds_rule_distance;
use crate::scenarios::ScenarioKind;
use crate::sweep::{run_sweep, SweepOutcome, SweepRow, SweepSpec};

pub const DEFAULT_PRECISION: usize = 2;
pub const MAX_PRECISION: usize = 6;

/// Speeds tabulated for the seconds-rule table.
pub const RULE_TABLE_SPEEDS: [f64; 9] = [20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0];

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

/// Parameter values read from a config file or flags. Unset fields keep the
/// lower-priority value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub follower_response_min: Option<f64>,
    pub follower_response_max: Option<f64>,
    pub ramp_time: Option<f64>,
    pub max_decel: Option<f64>,
    pub leader_reaction: Option<f64>,
    pub critical_distance: Option<f64>,
    pub vehicle_length: Option<f64>,
    pub dt: Option<f64>,
}

impl Overrides {
    /// Values in `other` win.
    pub fn merge(self, other: Overrides) -> Overrides {
        Overrides {
            follower_response_min: other.follower_response_min.or(self.follower_response_min),
            follower_response_max: other.follower_response_max.or(self.follower_response_max),
            ramp_time: other.ramp_time.or(self.ramp_time),
            max_decel: other.max_decel.or(self.max_decel),
            leader_reaction: other.leader_reaction.or(self.leader_reaction),
            critical_distance: other.critical_distance.or(self.critical_distance),
            vehicle_length: other.vehicle_length.or(self.vehicle_length),
            dt: other.dt.or(self.dt),
        }
    }

    pub fn apply(&self, base: VehicleParams) -> VehicleParams {
        VehicleParams {
            follower_response_min: self
                .follower_response_min
                .unwrap_or(base.follower_response_min),
            follower_response_max: self
                .follower_response_max
                .unwrap_or(base.follower_response_max),
            ramp_time: self.ramp_time.unwrap_or(base.ramp_time),
            max_decel: self.max_decel.unwrap_or(base.max_decel),
            leader_reaction: self.leader_reaction.unwrap_or(base.leader_reaction),
            critical_distance: self.critical_distance.unwrap_or(base.critical_distance),
            vehicle_length: self.vehicle_length.unwrap_or(base.vehicle_length),
        }
    }
}

/// Parses a flat `key = value` config file. Lines starting with `#` are
/// comments. Only the parameter keys and `dt` are accepted.
pub fn parse_config(text: &str, path: &Path) -> Result<Overrides, ReportError> {
    toml::from_str(text).map_err(|e| ReportError::Config {
        path: path.to_path_buf(),
        message: e.message().to_string(),
    })
}

pub fn load_config(path: &Path) -> Result<Overrides, ReportError> {
    let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: VehicleParams,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub precision: usize,
    pub dt: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: VehicleParams::default(),
            format: OutputFormat::Table,
            out: None,
            precision: DEFAULT_PRECISION,
            dt: DEFAULT_DT,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ReportError> {
        self.params.validate()?;
        if self.precision > MAX_PRECISION {
            return Err(ReportError::Invalid(format!(
                "precision must be in [0, {MAX_PRECISION}], got {}",
                self.precision
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(ReportError::Invalid(format!(
                "dt must be in (0, {MAX_DT}], got {}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// Writes `contents` to `path` via a sibling temp file and rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), ReportError> {
    let io_err = |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file_name = path
        .file_name()
        .ok_or_else(|| ReportError::Invalid(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let mut f = fs::File::create(&tmp).map_err(io_err)?;
    f.write_all(contents.as_bytes()).map_err(io_err)?;
    f.sync_all().map_err(io_err)?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}

fn num(x: f64, precision: usize) -> String {
    let s = format!("{x:.precision$}");
    // avoid "-0.00"
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Compact label for a speed or seconds value: `25`, `2.5`.
fn label(x: f64) -> String {
    format!("{x}")
}

fn rule_key(seconds: f64) -> String {
    format!("rule_{}s", label(seconds))
}

fn round_to(x: f64, precision: usize) -> f64 {
    num(x, precision).parse().unwrap_or(x)
}

struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TextTable {
    fn render(&self) -> String {
        let cols = self.header.len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].len())
                    .chain(std::iter::once(self.header[c].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(self.rows.iter()) {
            let cells: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    if c == 0 {
                        format!("{cell:<w$}", w = widths[c])
                    } else {
                        format!("{cell:>w$}", w = widths[c])
                    }
                })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

fn csv_lines(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn json_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values always serialize");
    s.push('\n');
    s
}

pub fn render_distance(range: &DistanceRange, format: OutputFormat, precision: usize) -> String {
    let (lo, hi) = (num(range.d_min(), precision), num(range.d_max(), precision));
    match format {
        OutputFormat::Table => format!("{lo} {hi}\n"),
        OutputFormat::Csv => format!("d_min,d_max\n{lo},{hi}\n"),
        OutputFormat::Json => json_string(&json!({
            "d_min": round_to(range.d_min(), precision),
            "d_max": round_to(range.d_max(), precision),
        })),
    }
}

/// One column of a reference table: index speed and its series values.
#[derive(Debug, Clone, PartialEq)]
pub struct TableColumn {
    pub speed: f64,
    pub values: Vec<f64>,
}

/// A reference table laid out as series rows over a speed axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    pub id: u8,
    pub title: &'static str,
    pub axis: &'static str,
    pub axis_key: &'static str,
    pub series: Vec<(&'static str, &'static str)>,
    pub columns: Vec<TableColumn>,
}

pub fn seconds_rule_table() -> ReferenceTable {
    let columns = RULE_TABLE_SPEEDS
        .iter()
        .map(|&kmh| {
            let v = SpeedMs::from_kmh(kmh).expect("table speeds are valid");
            TableColumn {
                speed: kmh,
                values: vec![seconds_rule_distance(v, 2.0), seconds_rule_distance(v, 3.0)],
            }
        })
        .collect();
    ReferenceTable {
        id: 1,
        title: "Following distance under N-second rules",
        axis: "Follower car speed (km/h)",
        axis_key: "follower_kmh",
        series: vec![
            ("Two-seconds", "two_seconds"),
            ("Three-seconds", "three_seconds"),
        ],
        columns,
    }
}

pub fn reference_table(id: u8, params: &VehicleParams) -> Result<ReferenceTable, ReportError> {
    if id == 1 {
        return Ok(seconds_rule_table());
    }
    let spec = SweepSpec::reference_table(id)
        .ok_or_else(|| ReportError::Invalid(format!("unknown table {id}; expected 1-5")))?
        .with_params(*params);
    let outcome = run_sweep(&spec);
    if let Some(e) = outcome.rejected.into_iter().next() {
        return Err(e.into());
    }
    let (title, axis, axis_key) = match spec.kind {
        ScenarioKind::ConstantSpeed => (
            "Safe distance at uniform speed (leader 20 km/h)",
            "Relative speed (km/h)",
            "relative_kmh",
        ),
        ScenarioKind::SuddenBrakeFaster => (
            "Safe distance, follower faster than leader (20 km/h), sudden leader stop",
            "Following car speed (km/h)",
            "follower_kmh",
        ),
        ScenarioKind::SuddenBrakeEqual => (
            "Safe distance, equal speeds, sudden leader stop",
            "Following car speed (km/h)",
            "follower_kmh",
        ),
        ScenarioKind::SuddenBrakeSlower => (
            "Safe distance, follower slower than leader (60 km/h), sudden leader stop",
            "Following car speed (km/h)",
            "follower_kmh",
        ),
    };
    Ok(ReferenceTable {
        id,
        title,
        axis,
        axis_key,
        series: vec![("d_f_min", "d_f_min"), ("d_f_max", "d_f_max")],
        columns: outcome
            .rows
            .iter()
            .map(|r| TableColumn {
                speed: r.speed,
                values: vec![r.d_min, r.d_max],
            })
            .collect(),
    })
}

/// Text output keeps the reference orientation (series as rows, speeds as
/// columns); CSV and JSON emit one record per speed.
pub fn render_reference_table(table: &ReferenceTable, format: OutputFormat, precision: usize) -> String {
    match format {
        OutputFormat::Table => {
            let mut header = vec![format!("Safe distance (m) / {}", table.axis)];
            header.extend(table.columns.iter().map(|c| label(c.speed)));
            let rows = table
                .series
                .iter()
                .enumerate()
                .map(|(i, (name, _))| {
                    let mut row = vec![name.to_string()];
                    row.extend(table.columns.iter().map(|c| num(c.values[i], precision)));
                    row
                })
                .collect();
            let mut out = format!("Table {}: {}\n", table.id, table.title);
            out.push_str(&TextTable { header, rows }.render());
            out
        }
        OutputFormat::Csv => {
            let mut header = vec![table.axis_key.to_string()];
            header.extend(table.series.iter().map(|(_, key)| key.to_string()));
            let rows: Vec<Vec<String>> = table
                .columns
                .iter()
                .map(|c| {
                    let mut row = vec![label(c.speed)];
                    row.extend(c.values.iter().map(|&v| num(v, precision)));
                    row
                })
                .collect();
            csv_lines(&header, &rows)
        }
        OutputFormat::Json => {
            let records: Vec<Value> = table
                .columns
                .iter()
                .map(|c| {
                    let mut obj = serde_json::Map::new();
                    obj.insert(table.axis_key.into(), json!(c.speed));
                    for ((_, key), &v) in table.series.iter().zip(&c.values) {
                        obj.insert((*key).into(), json!(round_to(v, precision)));
                    }
                    Value::Object(obj)
                })
                .collect();
            json_string(&json!({ "table": table.id, "title": table.title, "rows": records }))
        }
    }
}

pub fn sweep_header(spec: &SweepSpec) -> Vec<String> {
    let axis = if spec.kind == ScenarioKind::ConstantSpeed {
        "relative_kmh"
    } else {
        "follower_kmh"
    };
    let mut header: Vec<String> = [
        axis,
        "follower_speed_kmh",
        "leader_speed_kmh",
        "d_min",
        "d_max",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for &s in &spec.rules {
        header.push(rule_key(s));
        header.push(format!("class_{}s", label(s)));
    }
    header
}

pub fn sweep_record(row: &SweepRow, precision: usize) -> Vec<String> {
    let mut rec = vec![
        label(row.speed),
        num(row.follower_speed, precision),
        num(row.leader_speed, precision),
        num(row.d_min, precision),
        num(row.d_max, precision),
    ];
    for r in &row.rules {
        rec.push(num(r.distance, precision));
        rec.push(r.class.to_string());
    }
    rec
}

/// `summary` lines are appended to text output only.
pub fn render_sweep(
    spec: &SweepSpec,
    outcome: &SweepOutcome,
    summary: &[String],
    format: OutputFormat,
    precision: usize,
) -> String {
    let header = sweep_header(spec);
    let records: Vec<Vec<String>> = outcome
        .rows
        .iter()
        .map(|r| sweep_record(r, precision))
        .collect();
    match format {
        OutputFormat::Csv => csv_lines(&header, &records),
        OutputFormat::Table => {
            let mut out = format!("Sweep: {}\n", spec.kind);
            out.push_str(
                &TextTable {
                    header,
                    rows: records,
                }
                .render(),
            );
            if spec.kind == ScenarioKind::ConstantSpeed {
                out.push_str(
                    "note: rule distances use follower speed (leader + relative); \
                     comparison is an interpretation\n",
                );
            }
            for e in &outcome.rejected {
                let _ = writeln!(out, "rejected: {e}");
            }
            for line in summary {
                out.push_str(line);
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = outcome
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "speed": r.speed,
                        "follower_speed": round_to(r.follower_speed, precision),
                        "leader_speed": round_to(r.leader_speed, precision),
                        "relative_speed": r.relative_speed,
                        "d_min": round_to(r.d_min, precision),
                        "d_max": round_to(r.d_max, precision),
                        "rules": r.rules.iter().map(|c| json!({
                            "seconds": c.seconds,
                            "distance": round_to(c.distance, precision),
                            "class": c.class,
                        })).collect::<Vec<_>>(),
                        "rule_interpretation": r.rule_interpretation,
                    })
                })
                .collect();
            let rejected: Vec<String> = outcome.rejected.iter().map(|e| e.to_string()).collect();
            json_string(&json!({
                "scenario": spec.kind,
                "fixed_speed": spec.fixed_speed,
                "rows": rows,
                "rejected": rejected,
                "summary": summary,
            }))
        }
    }
}

pub fn render_verification(
    runs: &[Verification],
    format: OutputFormat,
    precision: usize,
) -> String {
    let header: Vec<String> = [
        "scenario",
        "follower_kmh",
        "leader_kmh",
        "response_s",
        "initial_gap",
        "min_gap",
        "slack",
        "lower",
        "upper",
        "result",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let p = precision.max(3);
    let rows: Vec<Vec<String>> = runs
        .iter()
        .flat_map(|v| {
            v.checks.iter().map(move |c| {
                vec![
                    v.scenario.kind().to_string(),
                    num(v.scenario.follower().to_kmh(), 2),
                    num(v.scenario.leader().to_kmh(), 2),
                    num(c.response, 2),
                    num(c.initial_gap, p),
                    num(c.min_gap, p),
                    num(c.slack, p),
                    num(c.lower_bound, p),
                    num(c.upper_bound, p),
                    if c.passed { "pass" } else { "FAIL" }.to_string(),
                ]
            })
        })
        .collect();
    match format {
        OutputFormat::Table => {
            let mut out = TextTable { header, rows }.render();
            let total: usize = runs.iter().map(|v| v.checks.len()).sum();
            let failed: usize = runs
                .iter()
                .flat_map(|v| &v.checks)
                .filter(|c| !c.passed)
                .count();
            let _ = writeln!(out, "{} of {total} boundary checks passed", total - failed);
            out
        }
        OutputFormat::Csv => csv_lines(&header, &rows),
        OutputFormat::Json => json_string(&serde_json::to_value(runs).expect("serializable")),
    }
}

pub fn trace_csv(trace: &BrakeTrace, precision: usize) -> String {
    let mut out = String::from("t,x_leader,x_follower,v_follower,gap\n");
    for s in trace.samples() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(s.t, precision),
            num(s.x_leader, precision),
            num(s.x_follower, precision),
            num(s.v_follower, precision),
            num(s.gap, precision),
        );
    }
    out
}

/// A single plottable curve: `(x, y)` pairs with axis names.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub x_name: &'static str,
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn file_name(&self, table_id: u8) -> String {
        format!("figure{table_id}_{}.csv", self.name)
    }

    pub fn to_csv(&self, precision: usize) -> String {
        let header = vec![self.x_name.to_string(), self.name.clone()];
        let rows: Vec<Vec<String>> = self
            .points
            .iter()
            .map(|&(x, y)| vec![label(x), num(y, precision)])
            .collect();
        csv_lines(&header, &rows)
    }
}

/// Curves behind the figure for tables 2 to 5: d_min, d_max and one line per
/// seconds rule (at follower speed).
pub fn plot_series(
    id: u8,
    params: &VehicleParams,
    rules: &[f64],
) -> Result<Vec<PlotSeries>, ReportError> {
    let spec = SweepSpec::reference_table(id)
        .ok_or_else(|| ReportError::Invalid(format!("unknown figure {id}; expected 2-5")))?
        .with_params(*params)
        .with_rules(rules.to_vec());
    let x_name = if spec.kind == ScenarioKind::ConstantSpeed {
        "relative_kmh"
    } else {
        "follower_kmh"
    };
    let outcome = run_sweep(&spec);
    if let Some(e) = outcome.rejected.into_iter().next() {
        return Err(e.into());
    }
    let rows = &outcome.rows;
    let mut series = vec![
        PlotSeries {
            name: "d_min".into(),
            x_name,
            points: rows.iter().map(|r| (r.speed, r.d_min)).collect(),
        },
        PlotSeries {
            name: "d_max".into(),
            x_name,
            points: rows.iter().map(|r| (r.speed, r.d_max)).collect(),
        },
    ];
    for (i, &s) in rules.iter().enumerate() {
        series.push(PlotSeries {
            name: rule_key(s),
            x_name,
            points: rows
                .iter()
                .map(|r| (r.speed, r.rules[i].distance))
                .collect(),
        });
    }
    Ok(series)
}
