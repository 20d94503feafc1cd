//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 when the input is rejected (missing file,
//! bad schema, infeasible home, out-of-range override), 3 when a numerical
//! routine fails at run time.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::geometry::{
    default_r_start, geometric_median, min_theta, trace_isonormal, LandmarkSet, MedianResult, UnitVector,
};
use crate::sim::{fmt_f64, run_batch_with_logs, sample_field_grid, GridBounds, RolloutSummary, ScenarioFile};
use crate::{HomingError, Result, Vector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "homing", version, about = "Bearing-only visual homing: fields, rollouts and geometry tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every initial state of a scenario; writes trajectory_NNN.csv and summary.json.
    Simulate(SimulateArgs),
    /// Sample the navigation field on a grid; writes field_grid.csv.
    Field(FieldArgs),
    /// Trace the isonormal curve of a direction; writes isonormal.csv.
    Trace(TraceArgs),
    /// Print the geometric median of the scenario landmarks as JSON.
    Median(ScenarioArgs),
    /// Check a scenario and print a feasibility report as JSON.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(value_name = "SCENARIO", required_unless_present = "scenario")]
    pub path: Option<PathBuf>,
    #[arg(short = 's', long = "scenario", value_name = "PATH", conflicts_with = "path")]
    pub scenario: Option<PathBuf>,
}

impl ScenarioArgs {
    fn path(&self) -> &Path {
        self.scenario
            .as_deref()
            .or(self.path.as_deref())
            .expect("clap enforces a scenario path")
    }
}

#[derive(Debug, Clone, Args)]
pub struct Overrides {
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl Overrides {
    fn apply(&self, file: &mut ScenarioFile) {
        if let Some(dt) = self.dt {
            file.dt = dt;
        }
        if let Some(t) = self.t_max {
            file.t_max = t;
        }
        if let Some(eps) = self.epsilon {
            file.epsilon = Some(eps);
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(short = 'o', long = "out", default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(short = 'o', long = "out", default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// x0min,x0max,x1min,x1max (defaults to a padded box around the scenario).
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub bounds: Option<FloatList>,
    #[arg(long, default_value_t = 41)]
    pub resolution: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(short = 'o', long = "out", default_value = ".")]
    pub out: PathBuf,
    /// Unit direction a,b[,c]; not normalized for you.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub v0: FloatList,
    /// Defaults to just above the minimum of ϑ.
    #[arg(long = "r-start")]
    pub r_start: Option<f64>,
    /// Defaults to 20 times the minimum of ϑ.
    #[arg(long = "r-end")]
    pub r_end: Option<f64>,
    /// Defaults to 1/200 of the range.
    #[arg(long = "r-step")]
    pub r_step: Option<f64>,
}

/// Comma-separated floats, e.g. `-3,5,-4,4`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

fn parse_list(s: &str) -> std::result::Result<FloatList, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(FloatList)
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Runs a parsed command, printing diagnostics to stderr; returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Field(a) => cmd_field(&a),
        Command::Trace(a) => cmd_trace(&a),
        Command::Median(a) => cmd_median(&a),
        Command::Validate(a) => cmd_validate(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &HomingError) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_RUNTIME
    }
}

fn load(args: &ScenarioArgs, overrides: Option<&Overrides>) -> Result<ScenarioFile> {
    let mut file = ScenarioFile::load(args.path())?;
    if let Some(o) = overrides {
        o.apply(&mut file);
    }
    Ok(file)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HomingError + '_ {
    move |source| HomingError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(io_err(&path))?;
    Ok((path, BufWriter::new(f)))
}

#[derive(Serialize)]
struct SimulationReport<'a> {
    scenario: Option<&'a str>,
    rollouts: Vec<RolloutEntry<'a>>,
}

#[derive(Serialize)]
struct RolloutEntry<'a> {
    index: usize,
    trajectory: String,
    #[serde(flatten)]
    summary: &'a RolloutSummary,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let scn = load(&args.scenario, Some(&args.overrides))?.validate()?;
    let results = run_batch_with_logs(&scn)?;
    let mut entries = Vec::with_capacity(results.len());
    for (index, (log, summary)) in results.iter().enumerate() {
        let name = format!("trajectory_{index:03}.csv");
        let (path, mut w) = create(&args.out, &name)?;
        log.write_csv(&mut w).and_then(|_| w.flush()).map_err(io_err(&path))?;
        entries.push(RolloutEntry {
            index,
            trajectory: name,
            summary,
        });
    }
    let report = SimulationReport {
        scenario: scn.name.as_deref(),
        rollouts: entries,
    };
    write_json(&args.out, "summary.json", &report)?;
    let converged = results.iter().filter(|(_, s)| s.converged).count();
    eprintln!(
        "{} rollouts, {converged} converged; outputs in {}",
        results.len(),
        args.out.display()
    );
    Ok(())
}

// A closed pipe (e.g. `| head`) is not worth a panic.
fn print_stdout(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let (path, mut w) = create(dir, name)?;
    let text = serde_json::to_string_pretty(value).map_err(|source| HomingError::Json {
        path: path.clone(),
        source,
    })?;
    writeln!(w, "{text}").and_then(|_| w.flush()).map_err(io_err(&path))
}

pub fn cmd_field(args: &FieldArgs) -> Result<()> {
    let mut file = load(&args.scenario, None)?;
    if let Some(eps) = args.epsilon {
        file.epsilon = Some(eps);
    }
    let scn = file.validate()?;
    let bounds = match &args.bounds {
        Some(FloatList(b)) if b.len() == 4 => GridBounds::new(b[0], b[1], b[2], b[3])?,
        Some(FloatList(b)) => {
            return Err(HomingError::InvalidParameter(format!(
                "--bounds needs x0min,x0max,x1min,x1max, got {} values",
                b.len()
            )))
        }
        None => GridBounds::around(&scn),
    };
    let grid = sample_field_grid(&scn, bounds, args.resolution)?;
    let (path, mut w) = create(&args.out, "field_grid.csv")?;
    grid.write_csv(&mut w).and_then(|_| w.flush()).map_err(io_err(&path))
}

fn landmarks_of(file: &ScenarioFile) -> Result<LandmarkSet> {
    if let Some(row) = file.landmarks.iter().find(|r| r.len() != file.dimension) {
        return Err(HomingError::InvalidScenario(format!(
            "landmark {row:?} does not have {} coordinates",
            file.dimension
        )));
    }
    LandmarkSet::from_rows(&file.landmarks)
}

pub fn cmd_trace(args: &TraceArgs) -> Result<()> {
    let file = load(&args.scenario, None)?;
    let landmarks = landmarks_of(&file)?;
    if args.v0.0.len() != landmarks.dim() {
        return Err(HomingError::DimensionMismatch {
            expected: landmarks.dim(),
            got: args.v0.0.len(),
        });
    }
    let v0 = UnitVector::new(Vector::from_column_slice(&args.v0.0))?;
    let r_min = min_theta(&landmarks);
    let r_start = args.r_start.unwrap_or_else(|| default_r_start(&landmarks));
    let r_end = args.r_end.unwrap_or(20.0 * r_min);
    let r_step = args.r_step.unwrap_or((r_end - r_start).abs() / 200.0);
    let curve = trace_isonormal(&landmarks, &v0, r_start, r_end, r_step)?;

    let (path, mut w) = create(&args.out, "isonormal.csv")?;
    let d = landmarks.dim();
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        let mut header = vec!["r".to_string()];
        header.extend((0..d).map(|i| format!("x{i}")));
        header.push("residual_theta".into());
        header.push("residual_direction".into());
        writeln!(w, "{}", header.join(","))?;
        for s in &curve.samples {
            let mut row = vec![fmt_f64(s.r)];
            row.extend(s.point.iter().map(|&c| fmt_f64(c)));
            row.push(fmt_f64(s.residual.theta));
            row.push(fmt_f64(s.residual.direction));
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()
    };
    write(&mut w).map_err(io_err(&path))
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MedianJson {
    UniquePoint { point: Vec<f64>, theta: f64 },
    Segment { endpoints: [Vec<f64>; 2], theta: f64 },
}

pub fn cmd_median(args: &ScenarioArgs) -> Result<()> {
    let file = load(args, None)?;
    let landmarks = landmarks_of(&file)?;
    let theta = min_theta(&landmarks);
    let json = match geometric_median(&landmarks) {
        MedianResult::UniquePoint(p) => MedianJson::UniquePoint {
            point: p.iter().copied().collect(),
            theta,
        },
        MedianResult::Segment(a, b) => MedianJson::Segment {
            endpoints: [a.iter().copied().collect(), b.iter().copied().collect()],
            theta,
        },
    };
    print_stdout(&serde_json::to_string_pretty(&json).expect("median serializes"));
    Ok(())
}

#[derive(Serialize)]
struct ValidationReport {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    details: Option<ValidDetails>,
}

#[derive(Serialize)]
struct ValidDetails {
    dimension: usize,
    landmarks: usize,
    robot: crate::sim::RobotKind,
    initial_states: usize,
    steps_per_rollout: usize,
    fov_angle_rad: f64,
    max_desired_angle_rad: f64,
    epsilon: f64,
    epsilon_bound: f64,
    eligible_pairs: Vec<(usize, usize)>,
    /// FOV margin at each initial position; negative means the start is
    /// already inside an obstacle set.
    initial_fov_margins: Vec<Option<f64>>,
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<()> {
    let outcome = load(&args.scenario, Some(&args.overrides)).and_then(|f| f.validate());
    let report = match &outcome {
        Ok(scn) => {
            let field = scn.field();
            ValidationReport {
                valid: true,
                error: None,
                details: Some(ValidDetails {
                    dimension: scn.dimension,
                    landmarks: scn.landmarks.len(),
                    robot: scn.robot_kind,
                    initial_states: scn.initial_states.len(),
                    steps_per_rollout: scn.max_steps(),
                    fov_angle_rad: scn.fov_angle,
                    max_desired_angle_rad: field.home().max_desired_angle(),
                    epsilon: field.bump().epsilon(),
                    epsilon_bound: field.home().epsilon_bound(),
                    eligible_pairs: field.home().eligible_pairs().to_vec(),
                    initial_fov_margins: scn
                        .initial_states
                        .iter()
                        .map(|s| field.sample(s.position()).fov_margin)
                        .collect(),
                }),
            }
        }
        Err(e) => ValidationReport {
            valid: false,
            error: Some(e.to_string()),
            details: None,
        },
    };
    print_stdout(&serde_json::to_string_pretty(&report).expect("report serializes"));
    outcome.map(|_| ())
}
