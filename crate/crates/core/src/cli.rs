//! Command-line front end.
//!
//! Exit status: 0 on success, 1 for usage or validation errors, 2 when an
//! oracle verification fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::kinematics::{SpeedMs, VehicleParams};
use crate::oracle::{simulate_brake_event, verify_closed_form_scaled, Verification};
use crate::report::{
    load_config, reference_table, plot_series, render_distance, render_reference_table, render_sweep,
    render_verification, trace_csv, write_atomic, OutputFormat, Overrides, ReportError, RunConfig,
};
use crate::scenarios::{safe_distance, Scenario, ScenarioKind};
use crate::sweep::{max_non_unsafe_speed, run_sweep, SweepSpec, DEFAULT_RULES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

const TRACE_PRECISION: usize = 6;

#[derive(Debug, Parser)]
#[command(
    name = "safegap",
    version,
    about = "Safe following distance behind an AEB-equipped autonomous leader"
)]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Flat `key = value` parameter file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,

    /// Output file (output directory for `plot`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Oracle timestep in seconds
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Decimal places in emitted numbers (0-6)
    #[arg(long, global = true)]
    precision: Option<usize>,

    #[arg(long, global = true)]
    follower_response_min: Option<f64>,
    #[arg(long, global = true)]
    follower_response_max: Option<f64>,
    #[arg(long, global = true)]
    ramp_time: Option<f64>,
    #[arg(long, global = true)]
    max_decel: Option<f64>,
    #[arg(long, global = true)]
    leader_reaction: Option<f64>,
    #[arg(long, global = true)]
    critical_distance: Option<f64>,
    #[arg(long, global = true)]
    vehicle_length: Option<f64>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            follower_response_min: self.follower_response_min,
            follower_response_max: self.follower_response_max,
            ramp_time: self.ramp_time,
            max_decel: self.max_decel,
            leader_reaction: self.leader_reaction,
            critical_distance: self.critical_distance,
            vehicle_length: self.vehicle_length,
            dt: self.dt,
        }
    }

    fn run_config(&self) -> Result<RunConfig, ReportError> {
        let file = match &self.config {
            Some(path) => load_config(path)?,
            None => Overrides::default(),
        };
        let merged = file.merge(self.overrides());
        let defaults = RunConfig::default();
        let config = RunConfig {
            params: merged.apply(VehicleParams::default()),
            format: self.format,
            out: self.out.clone(),
            precision: self.precision.unwrap_or(defaults.precision),
            dt: merged.dt.unwrap_or(defaults.dt),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long)]
    scenario: Option<ScenarioKind>,

    /// Follower speed, km/h
    #[arg(long)]
    follower: Option<f64>,

    /// Leader speed, km/h
    #[arg(long)]
    leader: Option<f64>,

    /// Shared speed for the equal-speed scenario, km/h
    #[arg(long)]
    speed: Option<f64>,
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario, ReportError> {
        let kind = self
            .scenario
            .ok_or_else(|| ReportError::Invalid("--scenario is required".into()))?;
        let missing = |flag: &str| ReportError::Invalid(format!("{flag} is required for {kind}"));
        match kind {
            ScenarioKind::SuddenBrakeEqual => {
                let v = match (self.speed, self.follower, self.leader) {
                    (Some(v), _, _) => v,
                    (None, Some(f), Some(l)) => {
                        return Ok(Scenario::from_kmh(kind, f, l)?);
                    }
                    (None, Some(f), None) | (None, None, Some(f)) => f,
                    (None, None, None) => return Err(missing("--speed")),
                };
                Ok(Scenario::equal(SpeedMs::from_kmh(v)?))
            }
            _ => {
                let f = self.follower.ok_or_else(|| missing("--follower"))?;
                let l = self.leader.ok_or_else(|| missing("--leader"))?;
                Ok(Scenario::from_kmh(kind, f, l)?)
            }
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Safe-distance interval for one scenario
    Distance(ScenarioArgs),

    /// Reproduce a reference table (1-5)
    Table { id: u8 },

    /// Evaluate a scenario over a speed grid against seconds rules
    Sweep {
        #[command(flatten)]
        scenario: SweepArgs,
    },

    /// Check closed forms against the trajectory simulation
    Verify {
        #[command(flatten)]
        scenario: ScenarioArgs,

        /// Start each run at this multiple of the closed-form gap
        #[arg(long, default_value_t = 1.0)]
        gap_scale: f64,
    },

    /// Write plot series files for a figure (2-5)
    Plot {
        id: u8,

        /// Seconds rule to include as a series (repeatable)
        #[arg(long = "rule")]
        rules: Vec<f64>,
    },

    /// Export a simulated braking trace as CSV
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,

        /// Initial bumper-to-bumper gap in meters (default: closed-form gap)
        #[arg(long)]
        gap: Option<f64>,

        /// Follower response time in seconds (default: the minimum)
        #[arg(long)]
        response: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    scenario: ScenarioKind,

    /// Leader speed, km/h (default: the reference setup for the scenario)
    #[arg(long)]
    leader: Option<f64>,

    /// Comma-separated grid in km/h (relative speed for `constant`)
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,

    /// Seconds rule to compare against (repeatable, default 2 and 3)
    #[arg(long = "rule")]
    rules: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("verification failed")]
    VerifyFailed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Report(e.into())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(output) => emit(&cli, &output, stdout, stderr),
        Err(CliError::VerifyFailed(output)) => {
            let code = emit(&cli, &output, stdout, stderr);
            let _ = writeln!(stderr, "error: verification failed");
            if code == EXIT_OK {
                EXIT_VERIFY_FAILED
            } else {
                code
            }
        }
        Err(CliError::Report(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit(cli: &Cli, output: &str, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match (&cli.command, &cli.global.out) {
        (Command::Plot { .. }, _) | (_, None) => {
            let _ = stdout.write_all(output.as_bytes());
            EXIT_OK
        }
        (_, Some(path)) => match write_atomic(path, output) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_USAGE
            }
        },
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let cfg = cli.global.run_config()?;
    let p = &cfg.params;
    match &cli.command {
        Command::Distance(args) => {
            let range = safe_distance(&args.scenario()?, p)?;
            Ok(render_distance(&range, cfg.format, cfg.precision))
        }
        Command::Table { id } => {
            let table = reference_table(*id, p)?;
            Ok(render_reference_table(&table, cfg.format, cfg.precision))
        }
        Command::Sweep { scenario } => sweep(scenario, &cfg),
        Command::Verify {
            scenario,
            gap_scale,
        } => verify(scenario, *gap_scale, &cfg),
        Command::Plot { id, rules } => plot(*id, rules, &cfg),
        Command::Simulate {
            scenario,
            gap,
            response,
        } => {
            let s = scenario.scenario()?;
            let response = response.unwrap_or(p.follower_response_min);
            let gap = match gap {
                Some(g) => *g,
                None => {
                    let at_response = VehicleParams {
                        follower_response_min: response,
                        follower_response_max: response,
                        ..*p
                    };
                    safe_distance(&s, &at_response)?.d_min()
                }
            };
            let trace = simulate_brake_event(&s, gap, response, p, cfg.dt)?;
            let precision = cli.global.precision.unwrap_or(TRACE_PRECISION);
            Ok(trace_csv(&trace, precision))
        }
    }
}

fn default_sweep(kind: ScenarioKind) -> SweepSpec {
    let id = match kind {
        ScenarioKind::ConstantSpeed => 2,
        ScenarioKind::SuddenBrakeFaster => 3,
        ScenarioKind::SuddenBrakeEqual => 4,
        ScenarioKind::SuddenBrakeSlower => 5,
    };
    SweepSpec::reference_table(id).expect("ids 2-5 are defined")
}

fn sweep(args: &SweepArgs, cfg: &RunConfig) -> Result<String, CliError> {
    let base = default_sweep(args.scenario);
    let fixed = args.leader.unwrap_or(base.fixed_speed);
    let grid = args.grid.clone().unwrap_or(base.grid);
    let rules = if args.rules.is_empty() {
        DEFAULT_RULES.to_vec()
    } else {
        args.rules.clone()
    };
    let spec = SweepSpec::new(args.scenario, fixed, grid)?
        .with_rules(rules)
        .with_params(cfg.params);
    let outcome = run_sweep(&spec);
    let summary = if outcome.is_complete() {
        spec.rules
            .iter()
            .map(|&n| {
                let max =
                    max_non_unsafe_speed(n, spec.kind, spec.fixed_speed, &spec.grid, &spec.params)?;
                Ok(match max {
                    Some(v) => format!("{n} s rule: not unsafe up to {v} km/h"),
                    None => format!("{n} s rule: unsafe at every grid speed"),
                })
            })
            .collect::<Result<Vec<_>, Error>>()?
    } else {
        Vec::new()
    };
    Ok(render_sweep(
        &spec,
        &outcome,
        &summary,
        cfg.format,
        cfg.precision,
    ))
}

/// Every grid point behind tables 2 to 5.
pub fn default_verification_grid() -> Vec<Scenario> {
    (2..=5)
        .flat_map(|id| {
            let spec = SweepSpec::reference_table(id).expect("ids 2-5 are defined");
            spec.grid
                .iter()
                .map(|&v| spec.scenario_at(v).expect("reference grids are valid"))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn verify(args: &ScenarioArgs, gap_scale: f64, cfg: &RunConfig) -> Result<String, CliError> {
    if !(gap_scale.is_finite() && gap_scale >= 0.0) {
        return Err(
            ReportError::Invalid(format!("--gap-scale must be >= 0, got {gap_scale}")).into(),
        );
    }
    let scenarios = if args.scenario.is_some() {
        vec![args.scenario()?]
    } else {
        default_verification_grid()
    };
    let runs = scenarios
        .iter()
        .map(|s| verify_closed_form_scaled(s, &cfg.params, cfg.dt, gap_scale))
        .collect::<Result<Vec<Verification>, Error>>()?;
    let output = render_verification(&runs, cfg.format, cfg.precision);
    if runs.iter().all(Verification::passed) {
        Ok(output)
    } else {
        Err(CliError::VerifyFailed(output))
    }
}

fn plot(id: u8, rules: &[f64], cfg: &RunConfig) -> Result<String, CliError> {
    let rules = if rules.is_empty() {
        DEFAULT_RULES.to_vec()
    } else {
        rules.to_vec()
    };
    let series = plot_series(id, &cfg.params, &rules)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    if !dir.is_dir() {
        return Err(ReportError::Invalid(format!(
            "output directory {} does not exist",
            dir.display()
        ))
        .into());
    }
    let mut written = String::new();
    for s in &series {
        let path = dir.join(s.file_name(id));
        write_atomic(&path, &s.to_csv(cfg.precision))?;
        written.push_str(&path.display().to_string());
        written.push('\n');
    }
    Ok(written)
}
