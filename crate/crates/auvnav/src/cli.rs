//! Scenario runner.
//!
//! `run` loads or builds a scene, plans with restarts, executes the plan in
//! the simulator and writes all artifacts to an output directory. `suite`
//! runs a list of builtin scenarios concurrently and prints a metrics
//! table. Exit codes: 0 success, 2 unreadable input, 3 planning failure,
//! 4 execution failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::correction::{plan_with_restarts, PlanProblem, PlanReport, RestartConfig};
use crate::geometry::{Pose, RobotBody, Vec3};
use crate::optimizer::{log_to_jsonl, CostConfig};
use crate::scene::{
    builtin_scenario, decompose_cloud, PointCloud, Scenario, Scene, BUILTIN_SCENES,
};
use crate::simulator::{run_episode, Outcome, SimTrace, VehicleModel};
use crate::tracker::TrackerConfig;

const EXIT_INPUT: u8 = 2;
const EXIT_PLANNING: u8 = 3;
const EXIT_EXECUTION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "auvnav",
    about = "Trajectory-optimization navigation for an underwater vehicle"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Plan and execute one scenario, writing artifacts.
    Run(RunArgs),
    /// Run several builtin scenarios and print a metrics table.
    Suite(SuiteArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Scene source: `builtin:<name>` or a scene file path.
    #[arg(long)]
    scene: Option<String>,
    /// Point-cloud scene source (xyz text), decomposed into obstacles.
    #[arg(long)]
    cloud: Option<PathBuf>,
    /// Clustering radius for point-cloud decomposition, m.
    #[arg(long, default_value_t = 0.5)]
    cell: f64,
    /// Minimum cluster size retained by the decomposition.
    #[arg(long = "min-pts", default_value_t = 30)]
    min_pts: usize,
    /// Start pose as `x,y,z` (builtin scenes provide a default).
    #[arg(long)]
    start: Option<String>,
    /// Goal pose as `x,y,z` (builtin scenes provide a default).
    #[arg(long)]
    goal: Option<String>,
    /// Nominal forward speed, m/s [default: 0.4].
    #[arg(long)]
    v: Option<f64>,
    /// Planning clearance margin D_min, m [default: 0.4].
    #[arg(long)]
    dmin: Option<f64>,
    /// Obstacle cost weight [default: 200].
    #[arg(long)]
    obstacle_coeff: Option<f64>,
    /// Path length cost weight [default: 100].
    #[arg(long)]
    length_coeff: Option<f64>,
    /// Waypoint count including endpoints [default: 20].
    #[arg(long)]
    waypoints: Option<usize>,
    /// Restart-sampling seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Freeze roll at zero during planning.
    #[arg(long)]
    roll_locked: bool,
    /// Lateral drift per unit yaw rate, m/rad [default: calibrated 0.1].
    #[arg(long)]
    drift_gain: Option<f64>,
    /// Episode wall-clock budget in simulated seconds [default: 600].
    #[arg(long)]
    timeout: Option<f64>,
    /// Output directory [default: $AUVNAV_OUT or ./out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional config file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Builtin scenario names; empty prints an empty table.
    names: Vec<String>,
    /// Run every builtin scenario.
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concurrent scenario workers.
    #[arg(long, default_value_t = 4)]
    workers: usize,
    /// Output root; per-scenario artifacts land in subdirectories.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// File mirror of the run flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scene: Option<String>,
    cloud: Option<PathBuf>,
    cell: Option<f64>,
    min_pts: Option<usize>,
    start: Option<String>,
    goal: Option<String>,
    v: Option<f64>,
    dmin: Option<f64>,
    obstacle_coeff: Option<f64>,
    length_coeff: Option<f64>,
    waypoints: Option<usize>,
    seed: Option<u64>,
    roll_locked: Option<bool>,
    drift_gain: Option<f64>,
    timeout: Option<f64>,
    out: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Cmd::Run(args) => match run_command(&args) {
            Ok(summary) => summary.exit,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT
            }
        },
        Cmd::Suite(args) => suite_command(&args),
    };
    ExitCode::from(code)
}

/// One scenario's resolved inputs.
struct ResolvedRun {
    scenario: Scenario,
    cost: CostConfig,
    restart: RestartConfig,
    tracker: TrackerConfig,
    model: VehicleModel,
    timeout: f64,
    out_dir: PathBuf,
    /// Obstacle count line for cloud-sourced scenes.
    decomposition_note: Option<String>,
}

/// Metrics block written to the summary and the suite table.
pub struct RunSummary {
    pub name: String,
    pub outcome: Outcome,
    pub planned_length: f64,
    pub executed_length: f64,
    pub min_planned_clearance: f64,
    pub min_executed_clearance: f64,
    pub restarts: usize,
    pub exit: u8,
}

fn parse_pose(text: &str) -> Result<Pose, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("pose must be x,y,z, got `{text}`"));
    }
    let mut c = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        c[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad pose coordinate `{p}`: {e}"))?;
    }
    Ok(Pose::from_position(Vec3::new(c[0], c[1], c[2])))
}

fn resolve(args: &RunArgs) -> Result<ResolvedRun, String> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("bad config: {e}"))?
        }
        None => FileConfig::default(),
    };

    let scene_arg = args.scene.clone().or(file.scene);
    let cloud_arg = args.cloud.clone().or(file.cloud);
    let start_arg = args.start.clone().or(file.start);
    let goal_arg = args.goal.clone().or(file.goal);

    let mut decomposition_note = None;
    let scenario = match (&scene_arg, &cloud_arg) {
        (Some(_), Some(_)) => return Err("give either --scene or --cloud, not both".into()),
        (None, None) => return Err("a scene source is required (--scene or --cloud)".into()),
        (Some(spec), None) => {
            if let Some(name) = spec.strip_prefix("builtin:") {
                let mut scenario = builtin_scenario(name).map_err(|e| e.to_string())?;
                if let Some(s) = &start_arg {
                    scenario.start = parse_pose(s)?;
                }
                if let Some(g) = &goal_arg {
                    scenario.goal = parse_pose(g)?;
                }
                scenario
            } else {
                let text = std::fs::read_to_string(spec)
                    .map_err(|e| format!("cannot read scene {spec}: {e}"))?;
                let scene = Scene::load(&text).map_err(|e| e.to_string())?;
                let start = parse_pose(
                    start_arg
                        .as_deref()
                        .ok_or("--start is required for file scenes")?,
                )?;
                let goal = parse_pose(
                    goal_arg
                        .as_deref()
                        .ok_or("--goal is required for file scenes")?,
                )?;
                Scenario {
                    scene,
                    start,
                    goal,
                    roll_locked: false,
                }
            }
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read cloud {}: {e}", path.display()))?;
            let cloud = PointCloud::from_xyz_text(&text).map_err(|e| e.to_string())?;
            let cell = args.cell.max(file.cell.unwrap_or(0.0));
            let min_pts = file.min_pts.unwrap_or(args.min_pts);
            let decomposition =
                decompose_cloud(&cloud, cell, min_pts).map_err(|e| e.to_string())?;
            decomposition_note = Some(format!(
                "decomposed_obstacles={} dropped_clusters={}",
                decomposition.obstacles.len(),
                decomposition.dropped_clusters.len()
            ));
            let scene = scene_around_cloud(&cloud, decomposition.obstacles)?;
            let start = parse_pose(
                start_arg
                    .as_deref()
                    .ok_or("--start is required for cloud scenes")?,
            )?;
            let goal = parse_pose(
                goal_arg
                    .as_deref()
                    .ok_or("--goal is required for cloud scenes")?,
            )?;
            Scenario {
                scene,
                start,
                goal,
                roll_locked: false,
            }
        }
    };

    for (label, pose) in [("start", &scenario.start), ("goal", &scenario.goal)] {
        if !scenario.scene.bounds.contains(&pose.position) {
            return Err(format!("{label} pose is outside the scene bounds"));
        }
    }

    let cost = CostConfig {
        d_min: args.dmin.or(file.dmin).unwrap_or(0.4),
        obstacle_coeff: args.obstacle_coeff.or(file.obstacle_coeff).unwrap_or(200.0),
        length_coeff: args.length_coeff.or(file.length_coeff).unwrap_or(100.0),
        n_waypoints: args.waypoints.or(file.waypoints).unwrap_or(20),
        ..CostConfig::default()
    };
    let restart = RestartConfig {
        rng_seed: args.seed.or(file.seed).unwrap_or(0),
        ..RestartConfig::default()
    };
    let tracker = TrackerConfig {
        v_nominal: args.v.or(file.v).unwrap_or(0.4),
        ..TrackerConfig::default()
    };
    let model = VehicleModel {
        drift_gain: args
            .drift_gain
            .or(file.drift_gain)
            .unwrap_or(VehicleModel::default().drift_gain),
        ..VehicleModel::default()
    };
    let out_dir = args
        .out
        .clone()
        .or(file.out)
        .or_else(|| std::env::var_os("AUVNAV_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    Ok(ResolvedRun {
        scenario: roll_locked_override(
            scenario,
            args.roll_locked || file.roll_locked.unwrap_or(false),
        ),
        cost,
        restart,
        tracker,
        model,
        timeout: args.timeout.or(file.timeout).unwrap_or(600.0),
        out_dir,
        decomposition_note,
    })
}

fn roll_locked_override(mut scenario: Scenario, force: bool) -> Scenario {
    if force {
        scenario.roll_locked = true;
    }
    scenario
}

fn scene_around_cloud(
    cloud: &PointCloud,
    obstacles: Vec<crate::scene::Obstacle>,
) -> Result<Scene, String> {
    let mut min = Vec3::repeat(f64::INFINITY);
    let mut max = Vec3::repeat(f64::NEG_INFINITY);
    for p in &cloud.points {
        min = min.inf(p);
        max = max.sup(p);
    }
    if cloud.points.is_empty() {
        min = Vec3::zeros();
        max = Vec3::zeros();
    }
    let pad = Vec3::repeat(2.0);
    Scene::new(
        "cloud",
        crate::scene::Bounds::new(min - pad, (max + pad).inf(&Vec3::new(f64::INFINITY, f64::INFINITY, 0.0))),
        0.0,
        obstacles,
    )
    .map_err(|e| e.to_string())
}

fn run_command(args: &RunArgs) -> Result<RunSummary, String> {
    let resolved = resolve(args)?;
    execute(&resolved, "run")
}

/// Plans, simulates and writes artifacts; never fails past input parsing.
fn execute(run: &ResolvedRun, name: &str) -> Result<RunSummary, String> {
    std::fs::create_dir_all(&run.out_dir)
        .map_err(|e| format!("cannot create {}: {e}", run.out_dir.display()))?;
    let scenario = &run.scenario;
    let body = RobotBody::default();

    write(&run.out_dir, "scene.toml", &scenario.scene.save())?;

    let problem = PlanProblem {
        start: scenario.start,
        goal: scenario.goal,
        scene: &scenario.scene,
        body: &body,
        roll_locked: scenario.roll_locked,
    };
    let report = match plan_with_restarts(&problem, &run.restart, &run.cost) {
        Ok(report) => report,
        Err(e) => {
            write(&run.out_dir, "plan_report.json", &format!("{{\"error\":\"{e}\"}}\n"))?;
            return Ok(RunSummary {
                name: name.to_string(),
                outcome: Outcome::TerminalFailure,
                planned_length: 0.0,
                executed_length: 0.0,
                min_planned_clearance: f64::NAN,
                min_executed_clearance: f64::NAN,
                restarts: 0,
                exit: EXIT_PLANNING,
            });
        }
    };

    write(&run.out_dir, "plan_report.json", &report.to_json())?;
    write(
        &run.out_dir,
        "trajectory.json",
        &serde_json::to_string_pretty(&report.trajectory).expect("trajectory serialization"),
    )?;
    write(&run.out_dir, "iterations.jsonl", &log_to_jsonl(&report.final_log))?;

    if !report.success {
        let summary = RunSummary {
            name: name.to_string(),
            outcome: Outcome::TerminalFailure,
            planned_length: report.trajectory.path_length(),
            executed_length: 0.0,
            min_planned_clearance: report.validation.min_clearance,
            min_executed_clearance: f64::NAN,
            restarts: report.restarts_used,
            exit: EXIT_PLANNING,
        };
        write_summary(run, &summary, &report, None)?;
        return Ok(summary);
    }

    let replan = |d_min: f64| -> Option<crate::optimizer::Trajectory> {
        let cost = CostConfig {
            d_min,
            ..run.cost.clone()
        };
        plan_with_restarts(&problem, &run.restart, &cost)
            .ok()
            .filter(|r| r.success)
            .map(|r| r.trajectory)
    };
    let trace = run_episode(
        &scenario.scene,
        &body,
        &report.trajectory,
        &run.tracker,
        &run.model,
        run.timeout,
        run.cost.d_min,
        Some(&replan),
    );
    write(&run.out_dir, "trace.jsonl", &trace.to_text())?;

    let summary = RunSummary {
        name: name.to_string(),
        outcome: trace.outcome,
        planned_length: report.trajectory.path_length(),
        executed_length: trace.metrics.executed_length,
        min_planned_clearance: report.validation.min_clearance,
        min_executed_clearance: trace.metrics.min_clearance,
        restarts: report.restarts_used,
        exit: if trace.outcome == Outcome::Success {
            0
        } else {
            EXIT_EXECUTION
        },
    };
    write_summary(run, &summary, &report, Some(&trace))?;
    Ok(summary)
}

fn write(dir: &Path, file: &str, text: &str) -> Result<(), String> {
    std::fs::write(dir.join(file), text)
        .map_err(|e| format!("cannot write {}: {e}", dir.join(file).display()))
}

fn write_summary(
    run: &ResolvedRun,
    summary: &RunSummary,
    report: &PlanReport,
    trace: Option<&SimTrace>,
) -> Result<(), String> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut text = format!("# generated_unix={stamp}\n");
    text.push_str(&format!("scene={}\n", run.scenario.scene.name));
    text.push_str(&format!("outcome={}\n", outcome_label(summary.outcome)));
    text.push_str(&format!("planned_length={:.6}\n", summary.planned_length));
    text.push_str(&format!("executed_length={:.6}\n", summary.executed_length));
    text.push_str(&format!(
        "min_planned_clearance={:.6}\n",
        summary.min_planned_clearance
    ));
    text.push_str(&format!(
        "min_executed_clearance={:.6}\n",
        summary.min_executed_clearance
    ));
    text.push_str(&format!("restarts={}\n", summary.restarts));
    text.push_str(&format!("plan_attempts={}\n", report.attempts.len()));
    if let Some(trace) = trace {
        text.push_str(&format!("sim_retries={}\n", trace.retries_used));
        text.push_str(&format!(
            "completion_time={:.3}\n",
            trace.metrics.completion_time
        ));
    }
    if let Some(note) = &run.decomposition_note {
        text.push_str(note);
        text.push('\n');
    }
    write(&run.out_dir, "summary.txt", &text)
}

fn outcome_label(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::Success => "success",
        Outcome::Collision => "collision",
        Outcome::Timeout => "timeout",
        Outcome::TerminalFailure => "terminal_failure",
    }
}

fn suite_command(args: &SuiteArgs) -> u8 {
    let names: Vec<String> = if args.all {
        BUILTIN_SCENES.iter().map(|s| s.to_string()).collect()
    } else {
        args.names.clone()
    };
    for name in &names {
        if !BUILTIN_SCENES.contains(&name.as_str()) {
            eprintln!("error: unknown scenario `{name}`");
            return EXIT_INPUT;
        }
    }
    let out_root = args
        .out
        .clone()
        .or_else(|| std::env::var_os("AUVNAV_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    match suite(&names, args.seed, args.workers, &out_root) {
        Ok(table) => {
            print!("{}", format_table(&table));
            if table.iter().all(|s| s.exit == 0) {
                0
            } else {
                table.iter().map(|s| s.exit).max().unwrap_or(0)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

/// Runs named builtin scenarios concurrently; results come back in name
/// order regardless of completion order.
pub fn suite(
    names: &[String],
    seed: u64,
    workers: usize,
    out_root: &Path,
) -> Result<Vec<RunSummary>, String> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| e.to_string())?;

    let runs: Vec<ResolvedRun> = names
        .iter()
        .map(|name| -> Result<ResolvedRun, String> {
            let scenario = builtin_scenario(name).map_err(|e| e.to_string())?;
            Ok(ResolvedRun {
                scenario,
                cost: CostConfig::default(),
                restart: RestartConfig {
                    rng_seed: seed,
                    ..RestartConfig::default()
                },
                tracker: TrackerConfig::default(),
                model: VehicleModel::default(),
                timeout: 600.0,
                out_dir: out_root.join(name),
                decomposition_note: None,
            })
        })
        .collect::<Result<_, _>>()?;

    pool.install(|| {
        runs.par_iter()
            .zip(names.par_iter())
            .map(|(run, name)| execute(run, name))
            .collect::<Result<Vec<_>, _>>()
    })
}

pub fn format_table(rows: &[RunSummary]) -> String {
    let mut out = String::from(
        "scenario        outcome           planned_m  executed_m  plan_clear  exec_clear  restarts\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{:<15} {:<17} {:>9.3} {:>11.3} {:>11.3} {:>11.3} {:>9}\n",
            r.name,
            outcome_label(r.outcome),
            r.planned_length,
            r.executed_length,
            r.min_planned_clearance,
            r.min_executed_clearance,
            r.restarts,
        ));
    }
    out
}
