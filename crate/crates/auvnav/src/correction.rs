//! Sampling-based restarts for optimizer local minima.
//!
//! When a run converges into a colliding path, the worst-collision waypoint
//! is located, a collision-free waypoint is sampled on the plane through it
//! perpendicular to the start-goal line, and the optimizer is reseeded with
//! the two-leg interpolation through that waypoint. Plane sampling falls
//! back to uniform sampling over the scene bounds when its budget runs out.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Pose, RobotBody, Vec3};
use crate::optimizer::{
    self, interpolate_initial, interpolate_pose, CostConfig, IterationRecord, OptimizerError,
    Trajectory, Validation,
};
use crate::scene::Scene;

#[derive(Debug, Error, PartialEq)]
pub enum CorrectionError {
    #[error("trajectory has no segment violating the clearance margin")]
    NoCollision,
    #[error("start and goal coincide; the sampling plane is undefined")]
    DegenerateDirection,
    #[error("{0} pose violates the clearance margin before planning")]
    InfeasibleEndpoint(&'static str),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestartConfig {
    /// Half extent of the square sampling plane (5 m gives a 10 m x 10 m
    /// window).
    pub plane_half_extent: f64,
    /// Total plane-sample budget across all reseeds.
    pub max_plane_samples: usize,
    pub max_random_restarts: usize,
    pub rng_seed: u64,
}

impl Default for RestartConfig {
    fn default() -> Self {
        Self {
            plane_half_extent: 5.0,
            max_plane_samples: 50,
            max_random_restarts: 20,
            rng_seed: 0,
        }
    }
}

/// One optimizer run within a restart sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttemptRecord {
    /// Sampled reseed waypoint position; none for the straight-line attempt.
    pub seed_waypoint: Option<[f64; 3]>,
    pub converged: bool,
    pub min_clearance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanReport {
    pub success: bool,
    pub trajectory: Trajectory,
    pub attempts: Vec<AttemptRecord>,
    /// Reseeded attempts beyond the first straight-line run.
    pub restarts_used: usize,
    pub validation: Validation,
    #[serde(skip)]
    pub final_log: Vec<IterationRecord>,
}

impl PlanReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PlanProblem<'a> {
    pub start: Pose,
    pub goal: Pose,
    pub scene: &'a Scene,
    pub body: &'a RobotBody,
    pub roll_locked: bool,
}

/// Waypoint whose adjacent segments carry the largest obstacle cost, with
/// its index. Ties pick the lowest index.
pub fn find_worst_collision(
    traj: &Trajectory,
    scene: &Scene,
    body: &RobotBody,
    cfg: &CostConfig,
) -> Result<(Pose, usize), CorrectionError> {
    let (_, clearances) = optimizer::obstacle_cost(traj, scene, body, cfg);
    if clearances.iter().all(|&c| c >= cfg.d_min) {
        return Err(CorrectionError::NoCollision);
    }
    let hinge = |c: f64| (cfg.d_min - c).max(0.0);
    let mut best = 0;
    let mut best_cost = f64::NEG_INFINITY;
    for i in 0..traj.waypoints.len() {
        let mut cost = 0.0;
        if i > 0 {
            cost += hinge(clearances[i - 1]);
        }
        if i < clearances.len() {
            cost += hinge(clearances[i]);
        }
        if cost > best_cost + 1e-12 {
            best = i;
            best_cost = cost;
        }
    }
    Ok((traj.waypoints[best], best))
}

/// Uniform samples on the plane through `s_col` perpendicular to the
/// start-goal line, within the configured extent and the scene bounds;
/// returns the first sample where the robot body is clear by `d_min`.
pub fn sample_perpendicular_waypoint(
    s_init: &Pose,
    s_goal: &Pose,
    s_col: &Pose,
    cfg: &RestartConfig,
    scene: &Scene,
    body: &RobotBody,
    cost_cfg: &CostConfig,
    rng: &mut impl Rng,
) -> Result<Option<Pose>, CorrectionError> {
    sample_on_plane(
        s_init,
        s_goal,
        s_col,
        cfg.plane_half_extent,
        cfg.max_plane_samples,
        scene,
        body,
        cost_cfg,
        rng,
    )
}

#[allow(clippy::too_many_arguments)]
fn sample_on_plane(
    s_init: &Pose,
    s_goal: &Pose,
    s_col: &Pose,
    half_extent: f64,
    budget: usize,
    scene: &Scene,
    body: &RobotBody,
    cost_cfg: &CostConfig,
    rng: &mut impl Rng,
) -> Result<Option<Pose>, CorrectionError> {
    let span = s_goal.position - s_init.position;
    let len = span.norm();
    if len <= 1e-12 {
        return Err(CorrectionError::DegenerateDirection);
    }
    let axis = span / len;
    let u = {
        let cand = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        (cand - axis * cand.dot(&axis)).normalize()
    };
    let v = axis.cross(&u);

    for _ in 0..budget {
        let a = rng.random_range(-half_extent..half_extent);
        let b = rng.random_range(-half_extent..half_extent);
        let pos = s_col.position + u * a + v * b;
        if !scene.bounds.contains(&pos) {
            continue;
        }
        let pose = waypoint_pose(s_init, s_goal, pos);
        if scene.min_clearance(&body.at(&pose)) >= cost_cfg.d_min {
            return Ok(Some(pose));
        }
    }
    Ok(None)
}

/// Orientation for a sampled waypoint: endpoint slerp at the waypoint's
/// relative position along the start-goal axis.
fn waypoint_pose(s_init: &Pose, s_goal: &Pose, position: Vec3) -> Pose {
    let span = s_goal.position - s_init.position;
    let t = if span.norm_squared() > 0.0 {
        ((position - s_init.position).dot(&span) / span.norm_squared()).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let oriented = interpolate_pose(s_init, s_goal, t);
    Pose::new(position, oriented.orientation)
}

/// Two interpolated legs joined at `w`, waypoint counts proportional to leg
/// lengths with at least one segment each.
pub fn reseed_path(
    s_init: &Pose,
    s_goal: &Pose,
    w: &Pose,
    n: usize,
) -> Result<Trajectory, OptimizerError> {
    if n < 3 {
        return Err(OptimizerError::TooFewWaypoints(3));
    }
    let l1 = (w.position - s_init.position).norm();
    let l2 = (s_goal.position - w.position).norm();
    let segments = n - 1;
    let frac = if l1 + l2 > 0.0 { l1 / (l1 + l2) } else { 0.5 };
    let seg1 = ((segments as f64 * frac).round() as usize).clamp(1, segments - 1);
    let seg2 = segments - seg1;

    let mut waypoints = Vec::with_capacity(n);
    for i in 0..=seg1 {
        waypoints.push(interpolate_pose(s_init, w, i as f64 / seg1 as f64));
    }
    for i in 1..=seg2 {
        waypoints.push(interpolate_pose(w, s_goal, i as f64 / seg2 as f64));
    }
    waypoints[0] = *s_init;
    *waypoints.last_mut().unwrap() = *s_goal;
    Trajectory::new(waypoints)
}

/// Full planning pipeline: straight-line attempt, perpendicular-plane
/// reseeds, then randomized fallback. Deterministic for a fixed seed.
pub fn plan_with_restarts(
    problem: &PlanProblem,
    cfg: &RestartConfig,
    cost_cfg: &CostConfig,
) -> Result<PlanReport, CorrectionError> {
    let scene = problem.scene;
    let body = problem.body;
    for (label, pose) in [("start", &problem.start), ("goal", &problem.goal)] {
        if scene.min_clearance(&body.at(pose)) < cost_cfg.d_min {
            return Err(CorrectionError::InfeasibleEndpoint(label));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let d_req = cost_cfg.d_min - cfg_slack(cost_cfg);
    let mut attempts = Vec::new();
    let mut best: Option<(f64, optimizer::OptimizeResult)> = None;

    let run_attempt = |seed: &Trajectory,
                           seed_waypoint: Option<[f64; 3]>,
                           attempts: &mut Vec<AttemptRecord>,
                           best: &mut Option<(f64, optimizer::OptimizeResult)>|
     -> Option<optimizer::OptimizeResult> {
        let result = optimizer::optimize(seed, scene, body, cost_cfg, problem.roll_locked);
        let validation = optimizer::validate(&result.trajectory, scene, body, d_req);
        attempts.push(AttemptRecord {
            seed_waypoint,
            converged: result.converged,
            min_clearance: validation.min_clearance,
        });
        let success = result.converged && validation.ok;
        if best
            .as_ref()
            .is_none_or(|(c, _)| validation.min_clearance > *c)
        {
            *best = Some((validation.min_clearance, result.clone()));
        }
        if success {
            Some(result)
        } else {
            None
        }
    };

    let straight = interpolate_initial(&problem.start, &problem.goal, cost_cfg.n_waypoints)?;
    if let Some(result) = run_attempt(&straight, None, &mut attempts, &mut best) {
        return Ok(finish(result, attempts, scene, body, d_req, true));
    }

    // Perpendicular-plane reseeds share one global sample budget.
    let mut plane_budget = cfg.max_plane_samples;
    while plane_budget > 0 {
        let last = &best.as_ref().expect("attempted").1.trajectory;
        let Ok((s_col, _)) = find_worst_collision(last, scene, body, cost_cfg) else {
            break;
        };
        let before = plane_budget;
        let sampled = sample_on_plane(
            &problem.start,
            &problem.goal,
            &s_col,
            cfg.plane_half_extent,
            plane_budget,
            scene,
            body,
            cost_cfg,
            &mut rng,
        )?;
        let Some(w) = sampled else {
            break;
        };
        // Budget spent: unknown exactly (sampler consumed up to budget), so
        // charge one per reseed; failed full sweeps end the phase above.
        plane_budget = before - 1;
        let seed = reseed_path(&problem.start, &problem.goal, &w, cost_cfg.n_waypoints)?;
        let wp = [w.position.x, w.position.y, w.position.z];
        if let Some(result) = run_attempt(&seed, Some(wp), &mut attempts, &mut best) {
            return Ok(finish(result, attempts, scene, body, d_req, true));
        }
    }

    for _ in 0..cfg.max_random_restarts {
        let w = sample_in_bounds(problem, cost_cfg, &mut rng);
        let Some(w) = w else {
            attempts.push(AttemptRecord {
                seed_waypoint: None,
                converged: false,
                min_clearance: f64::NEG_INFINITY,
            });
            continue;
        };
        let seed = reseed_path(&problem.start, &problem.goal, &w, cost_cfg.n_waypoints)?;
        let wp = [w.position.x, w.position.y, w.position.z];
        if let Some(result) = run_attempt(&seed, Some(wp), &mut attempts, &mut best) {
            return Ok(finish(result, attempts, scene, body, d_req, true));
        }
    }

    let (_, result) = best.expect("at least the straight attempt ran");
    Ok(finish(result, attempts, scene, body, d_req, false))
}

fn cfg_slack(cfg: &CostConfig) -> f64 {
    cfg.clearance_slack
}

fn sample_in_bounds(
    problem: &PlanProblem,
    cost_cfg: &CostConfig,
    rng: &mut impl Rng,
) -> Option<Pose> {
    let bounds = &problem.scene.bounds;
    for _ in 0..50 {
        let pos = Vec3::new(
            rng.random_range(bounds.min.x..bounds.max.x),
            rng.random_range(bounds.min.y..bounds.max.y),
            rng.random_range(bounds.min.z..bounds.max.z),
        );
        let pose = waypoint_pose(&problem.start, &problem.goal, pos);
        if problem.scene.min_clearance(&problem.body.at(&pose)) >= cost_cfg.d_min {
            return Some(pose);
        }
    }
    None
}

fn finish(
    result: optimizer::OptimizeResult,
    attempts: Vec<AttemptRecord>,
    scene: &Scene,
    body: &RobotBody,
    d_req: f64,
    success: bool,
) -> PlanReport {
    let validation = optimizer::validate(&result.trajectory, scene, body, d_req);
    PlanReport {
        success,
        restarts_used: attempts.len().saturating_sub(1),
        trajectory: result.trajectory,
        attempts,
        validation,
        final_log: result.log,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{builtin_scenario, Bounds, Obstacle, ObstacleShape, Scene};

    fn wall_scene() -> Scene {
        Scene::new(
            "wall",
            Bounds::new(Vec3::new(-2.0, -10.0, -10.0), Vec3::new(12.0, 10.0, 0.0)),
            0.0,
            vec![Obstacle::new(
                "wall",
                "",
                ObstacleShape::Box {
                    center: [5.0, 0.0, -5.0],
                    half_extents: [0.2, 10.0, 5.0],
                    yaw_deg: 0.0,
                },
            )
            .unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn worst_collision_is_the_wall_waypoint() {
        let scene = wall_scene();
        let traj = interpolate_initial(
            &Pose::from_position(Vec3::new(0.0, 0.0, -5.0)),
            &Pose::from_position(Vec3::new(10.0, 0.0, -5.0)),
            11,
        )
        .unwrap();
        let (pose, idx) =
            find_worst_collision(&traj, &scene, &RobotBody::default(), &CostConfig::default())
                .unwrap();
        assert_eq!(idx, 5);
        assert!((pose.position.x - 5.0).abs() < 1e-9);
    }

    #[test]
    fn collision_free_path_is_a_precondition_error() {
        let scene = wall_scene();
        let traj = interpolate_initial(
            &Pose::from_position(Vec3::new(0.0, 8.0, -5.0)),
            &Pose::from_position(Vec3::new(0.5, 8.0, -5.0)),
            3,
        )
        .unwrap();
        assert_eq!(
            find_worst_collision(&traj, &scene, &RobotBody::default(), &CostConfig::default())
                .unwrap_err(),
            CorrectionError::NoCollision
        );
    }

    #[test]
    fn tie_breaks_to_first_waypoint() {
        // Two identical walls hit symmetrically: waypoints 3 and 7 carry the
        // same adjacent-segment cost, so the lower index wins.
        let wall = |id: &str, x: f64| {
            Obstacle::new(
                id,
                "",
                ObstacleShape::Box {
                    center: [x, 0.0, -5.0],
                    half_extents: [0.2, 10.0, 5.0],
                    yaw_deg: 0.0,
                },
            )
            .unwrap()
        };
        let scene = Scene::new(
            "two_walls",
            Bounds::new(Vec3::new(-2.0, -10.0, -10.0), Vec3::new(12.0, 10.0, 0.0)),
            0.0,
            vec![wall("wall_a", 3.0), wall("wall_b", 7.0)],
        )
        .unwrap();
        let traj = interpolate_initial(
            &Pose::from_position(Vec3::new(0.0, 0.0, -5.0)),
            &Pose::from_position(Vec3::new(10.0, 0.0, -5.0)),
            11,
        )
        .unwrap();
        let (_, idx) =
            find_worst_collision(&traj, &scene, &RobotBody::default(), &CostConfig::default())
                .unwrap();
        assert_eq!(idx, 3);
    }

    #[test]
    fn sampled_waypoint_lies_on_the_plane() {
        let scene = Scene::new(
            "empty",
            Bounds::new(Vec3::new(-20.0, -20.0, -20.0), Vec3::new(20.0, 20.0, 0.0)),
            0.0,
            Vec::new(),
        )
        .unwrap();
        let s_init = Pose::from_position(Vec3::new(0.0, 0.0, -2.0));
        let s_goal = Pose::from_position(Vec3::new(10.0, 3.0, -4.0));
        let s_col = Pose::from_position(Vec3::new(5.0, 1.5, -3.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = sample_perpendicular_waypoint(
            &s_init,
            &s_goal,
            &s_col,
            &RestartConfig::default(),
            &scene,
            &RobotBody::default(),
            &CostConfig::default(),
            &mut rng,
        )
        .unwrap()
        .expect("empty scene: first sample is clear");
        let axis = (s_goal.position - s_init.position).normalize();
        let off = (w.position - s_col.position).dot(&axis);
        assert!(off.abs() <= 1e-9, "off-plane by {off}");
        assert!(scene.bounds.contains(&w.position));
    }

    #[test]
    fn fully_blocking_plane_returns_none() {
        // Wall big enough to cover the whole 10 m x 10 m sampling window.
        let scene = Scene::new(
            "block",
            Bounds::new(Vec3::new(-2.0, -30.0, -60.0), Vec3::new(12.0, 30.0, 0.0)),
            0.0,
            vec![Obstacle::new(
                "wall",
                "",
                ObstacleShape::Box {
                    center: [5.0, 0.0, -30.0],
                    half_extents: [0.5, 30.0, 30.0],
                    yaw_deg: 0.0,
                },
            )
            .unwrap()],
        )
        .unwrap();
        let s_init = Pose::from_position(Vec3::new(0.0, 0.0, -30.0));
        let s_goal = Pose::from_position(Vec3::new(10.0, 0.0, -30.0));
        let s_col = Pose::from_position(Vec3::new(5.0, 0.0, -30.0));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = sample_perpendicular_waypoint(
            &s_init,
            &s_goal,
            &s_col,
            &RestartConfig::default(),
            &scene,
            &RobotBody::default(),
            &CostConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn degenerate_direction_is_an_error() {
        let scene = wall_scene();
        let p = Pose::from_position(Vec3::new(0.0, 0.0, -5.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = sample_perpendicular_waypoint(
            &p,
            &p,
            &p,
            &RestartConfig::default(),
            &scene,
            &RobotBody::default(),
            &CostConfig::default(),
            &mut rng,
        )
        .unwrap_err();
        assert_eq!(err, CorrectionError::DegenerateDirection);
    }

    #[test]
    fn reseed_minimal_case() {
        let s_init = Pose::from_position(Vec3::new(0.0, 0.0, -2.0));
        let s_goal = Pose::from_position(Vec3::new(10.0, 0.0, -2.0));
        let w = Pose::from_position(Vec3::new(5.0, 3.0, -2.0));
        let t = reseed_path(&s_init, &s_goal, &w, 3).unwrap();
        assert_eq!(t.waypoints.len(), 3);
        assert_eq!(t.waypoints[0], s_init);
        assert_eq!(t.waypoints[1].position, w.position);
        assert_eq!(t.waypoints[2], s_goal);
    }

    #[test]
    fn reseed_collinear_midpoint_matches_straight_interpolation() {
        let s_init = Pose::from_position(Vec3::new(0.0, 0.0, -2.0));
        let s_goal = Pose::from_position(Vec3::new(10.0, 0.0, -2.0));
        let w = Pose::from_position(Vec3::new(5.0, 0.0, -2.0));
        let reseeded = reseed_path(&s_init, &s_goal, &w, 9).unwrap();
        let straight = interpolate_initial(&s_init, &s_goal, 9).unwrap();
        for (a, b) in reseeded.waypoints.iter().zip(&straight.waypoints) {
            assert!((a.position - b.position).norm() <= 1e-9);
        }
    }

    #[test]
    fn empty_scene_plans_in_one_attempt() {
        let scene = Scene::new(
            "empty",
            Bounds::new(Vec3::new(-20.0, -20.0, -20.0), Vec3::new(20.0, 20.0, 0.0)),
            0.0,
            Vec::new(),
        )
        .unwrap();
        let body = RobotBody::default();
        let problem = PlanProblem {
            start: Pose::from_position(Vec3::new(0.0, 0.0, -2.0)),
            goal: Pose::from_position(Vec3::new(10.0, 0.0, -2.0)),
            scene: &scene,
            body: &body,
            roll_locked: false,
        };
        let report =
            plan_with_restarts(&problem, &RestartConfig::default(), &CostConfig::default())
                .unwrap();
        assert!(report.success);
        assert_eq!(report.attempts.len(), 1);
        assert_eq!(report.restarts_used, 0);
    }

    #[test]
    fn window_needs_a_restart_and_then_succeeds() {
        let scenario = builtin_scenario("window").unwrap();
        let body = RobotBody::default();
        let problem = PlanProblem {
            start: scenario.start,
            goal: scenario.goal,
            scene: &scenario.scene,
            body: &body,
            roll_locked: scenario.roll_locked,
        };
        let cfg = RestartConfig {
            rng_seed: 7,
            ..RestartConfig::default()
        };
        let report = plan_with_restarts(&problem, &cfg, &CostConfig::default()).unwrap();
        assert!(report.success, "attempts: {:?}", report.attempts);
        assert!(report.attempts.len() >= 2, "straight seed should fail");
        assert!(!report.attempts[0].converged || report.attempts[0].min_clearance < 0.4 - 1e-3);
        assert!(report.validation.min_clearance >= 0.4 - 1e-3);
    }

    #[test]
    fn infeasible_start_is_a_precondition_error() {
        let scene = wall_scene();
        let body = RobotBody::default();
        let problem = PlanProblem {
            start: Pose::from_position(Vec3::new(5.0, 0.0, -5.0)), // inside wall
            goal: Pose::from_position(Vec3::new(10.0, 0.0, -5.0)),
            scene: &scene,
            body: &body,
            roll_locked: false,
        };
        let err = plan_with_restarts(&problem, &RestartConfig::default(), &CostConfig::default())
            .unwrap_err();
        assert_eq!(err, CorrectionError::InfeasibleEndpoint("start"));
    }

    #[test]
    fn sealed_goal_fails_with_best_attempt() {
        // Shell of slabs around the goal region, interior roomy enough for
        // the endpoint clearance precondition.
        let mut obstacles = Vec::new();
        let shell = [
            ("x_lo", [6.0, 0.0, -5.0], [0.2, 4.0, 4.0]),
            ("x_hi", [14.0, 0.0, -5.0], [0.2, 4.0, 4.0]),
            ("y_lo", [10.0, -4.0, -5.0], [4.2, 0.2, 4.0]),
            ("y_hi", [10.0, 4.0, -5.0], [4.2, 0.2, 4.0]),
            ("z_lo", [10.0, 0.0, -9.0], [4.2, 4.2, 0.2]),
            ("z_hi", [10.0, 0.0, -1.0], [4.2, 4.2, 0.2]),
        ];
        for (id, c, h) in shell {
            obstacles.push(
                Obstacle::new(
                    id,
                    "shell",
                    ObstacleShape::Box {
                        center: c,
                        half_extents: h,
                        yaw_deg: 0.0,
                    },
                )
                .unwrap(),
            );
        }
        let scene = Scene::new(
            "sealed",
            Bounds::new(Vec3::new(-2.0, -8.0, -10.0), Vec3::new(18.0, 8.0, 0.0)),
            0.0,
            obstacles,
        )
        .unwrap();
        let body = RobotBody::default();
        let problem = PlanProblem {
            start: Pose::from_position(Vec3::new(0.0, 0.0, -5.0)),
            goal: Pose::from_position(Vec3::new(10.0, 0.0, -5.0)),
            scene: &scene,
            body: &body,
            roll_locked: false,
        };
        let restart_cfg = RestartConfig {
            max_plane_samples: 6,
            max_random_restarts: 2,
            rng_seed: 3,
            ..RestartConfig::default()
        };
        let cost_cfg = CostConfig {
            max_inner_iters: 10,
            max_outer_iters: 2,
            ..CostConfig::default()
        };
        let report = plan_with_restarts(&problem, &restart_cfg, &cost_cfg).unwrap();
        assert!(!report.success);
        assert!(report.validation.min_clearance < 0.0);
        assert!(report.attempts.len() <= 1 + 6 + 2);
    }

    #[test]
    fn planning_is_deterministic_for_a_seed() {
        let scenario = builtin_scenario("window").unwrap();
        let body = RobotBody::default();
        let problem = PlanProblem {
            start: scenario.start,
            goal: scenario.goal,
            scene: &scenario.scene,
            body: &body,
            roll_locked: false,
        };
        let cfg = RestartConfig {
            rng_seed: 11,
            ..RestartConfig::default()
        };
        let r1 = plan_with_restarts(&problem, &cfg, &CostConfig::default()).unwrap();
        let r2 = plan_with_restarts(&problem, &cfg, &CostConfig::default()).unwrap();
        assert_eq!(r1.to_json(), r2.to_json());
    }
}
