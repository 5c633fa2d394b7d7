//! Sequential convexified trajectory optimizer.
//!
//! The path is an ordered list of waypoint poses. Each inner iteration takes
//! a trust-region step along the negative finite-difference gradient of the
//! penalized cost (weighted path length, hinge clearance over swept volumes,
//! surface cost) and keeps it only if the true cost decreases. The outer
//! loop escalates the penalty weights until every segment clears `d_min` or
//! the iteration budget runs out.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{swept_hull, Pose, RobotBody, Vec3};
use crate::scene::Scene;

#[derive(Debug, Error, PartialEq)]
pub enum OptimizerError {
    #[error("trajectory needs at least {0} waypoints")]
    TooFewWaypoints(usize),
}

/// Ordered waypoint list from start to goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Pose>,
    /// Endpoints are held fixed by the optimizer when flagged.
    pub fixed_start: bool,
    pub fixed_end: bool,
}

impl Trajectory {
    pub fn new(waypoints: Vec<Pose>) -> Result<Self, OptimizerError> {
        if waypoints.len() < 2 {
            return Err(OptimizerError::TooFewWaypoints(2));
        }
        Ok(Self {
            waypoints,
            fixed_start: true,
            fixed_end: true,
        })
    }

    pub fn path_length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| (w[1].position - w[0].position).norm())
            .sum()
    }

    pub fn segment_count(&self) -> usize {
        self.waypoints.len() - 1
    }
}

/// Cost weights and iteration budgets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostConfig {
    pub obstacle_coeff: f64,
    pub length_coeff: f64,
    pub d_min: f64,
    pub surface_coeff: f64,
    pub epsilon: f64,
    pub n_waypoints: usize,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
    pub trust_region_init: f64,
    pub trust_region_shrink: f64,
    pub trust_region_expand: f64,
    /// Penalty weight multiplier applied per outer iteration.
    pub penalty_growth: f64,
    /// Relative cost-change threshold declaring the inner loop converged.
    pub converge_rel_tol: f64,
    /// Allowed slack below `d_min` when judging per-segment clearance.
    pub clearance_slack: f64,
    /// Finite-difference steps (meters / radians).
    pub fd_step: f64,
    /// Use the sign-definite hinge `max(0, z + d_min)` for the surface cost
    /// instead of the literal piecewise form.
    pub surface_hinge: bool,
}

impl Default for CostConfig {
    fn default() -> Self {
        Self {
            obstacle_coeff: 200.0,
            length_coeff: 100.0,
            d_min: 0.4,
            surface_coeff: 200.0,
            epsilon: 0.01,
            n_waypoints: 20,
            max_outer_iters: 5,
            max_inner_iters: 60,
            trust_region_init: 0.5,
            trust_region_shrink: 0.5,
            trust_region_expand: 1.5,
            penalty_growth: 10.0,
            converge_rel_tol: 1e-4,
            clearance_slack: 1e-3,
            fd_step: 1e-4,
            surface_hinge: false,
        }
    }
}

/// Objective value split by term, at the configured base coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub length_cost: f64,
    pub obstacle_cost: f64,
    pub surface_cost: f64,
    pub total: f64,
    pub segment_clearances: Vec<f64>,
}

/// One inner-iteration record of the optimization log. Component costs use
/// the penalty weights active in that outer phase, so `total` is their sum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub outer: usize,
    pub total: f64,
    pub length_cost: f64,
    pub obstacle_cost: f64,
    pub surface_cost: f64,
    pub trust_radius: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub trajectory: Trajectory,
    pub breakdown: CostBreakdown,
    pub converged: bool,
    pub log: Vec<IterationRecord>,
}

/// Straight-line seed: positions linearly spaced, orientations spherically
/// interpolated, endpoints exact.
pub fn interpolate_initial(
    s_init: &Pose,
    s_goal: &Pose,
    n: usize,
) -> Result<Trajectory, OptimizerError> {
    if n < 2 {
        return Err(OptimizerError::TooFewWaypoints(2));
    }
    let mut waypoints = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        waypoints.push(interpolate_pose(s_init, s_goal, t));
    }
    waypoints[0] = *s_init;
    waypoints[n - 1] = *s_goal;
    Trajectory::new(waypoints)
}

pub(crate) fn interpolate_pose(a: &Pose, b: &Pose, t: f64) -> Pose {
    let position = a.position.lerp(&b.position, t);
    let orientation = a
        .orientation
        .try_slerp(&b.orientation, t, 1e-9)
        .unwrap_or(a.orientation);
    Pose::new(position, orientation)
}

/// Keep-out cost on the vertical coordinate: `z + epsilon` for every state
/// above `-d_min`, zero below. The literal form goes negative just above
/// `-d_min`; its gradient still pushes the state deeper, which is what
/// matters. `surface_hinge` switches to the sign-definite `max(0, z + d_min)`.
pub fn surface_cost(z: f64, cfg: &CostConfig) -> f64 {
    if cfg.surface_hinge {
        (z + cfg.d_min).max(0.0)
    } else if z > -cfg.d_min {
        z + cfg.epsilon
    } else {
        0.0
    }
}

/// Weighted Euclidean path length over waypoint positions.
pub fn path_length_cost(traj: &Trajectory, cfg: &CostConfig) -> f64 {
    cfg.length_coeff * traj.path_length()
}

/// Hinge clearance cost over the swept volume of each segment, plus the raw
/// per-segment clearances.
pub fn obstacle_cost(
    traj: &Trajectory,
    scene: &Scene,
    body: &RobotBody,
    cfg: &CostConfig,
) -> (f64, Vec<f64>) {
    let clearances: Vec<f64> = traj
        .waypoints
        .windows(2)
        .map(|w| scene.min_clearance(&swept_hull(body, &w[0], &w[1])))
        .collect();
    let cost = cfg.obstacle_coeff
        * clearances
            .iter()
            .map(|c| (cfg.d_min - c).max(0.0))
            .sum::<f64>();
    (cost, clearances)
}

/// Full objective at the given penalty weights.
fn penalized_cost(
    traj: &Trajectory,
    scene: &Scene,
    body: &RobotBody,
    cfg: &CostConfig,
    w_obs: f64,
    w_surf: f64,
) -> (f64, f64, f64, f64) {
    let length = path_length_cost(traj, cfg);
    let (obs_base, clearances) = obstacle_cost(traj, scene, body, cfg);
    let obs = obs_base / cfg.obstacle_coeff * w_obs;
    let surf = w_surf
        * traj
            .waypoints
            .iter()
            .map(|p| surface_cost(p.position.z, cfg))
            .sum::<f64>();
    drop(clearances);
    (length + obs + surf, length, obs, surf)
}

pub fn breakdown(
    traj: &Trajectory,
    scene: &Scene,
    body: &RobotBody,
    cfg: &CostConfig,
) -> CostBreakdown {
    let length_cost = path_length_cost(traj, cfg);
    let (obstacle, segment_clearances) = obstacle_cost(traj, scene, body, cfg);
    let surface = cfg.surface_coeff
        * traj
            .waypoints
            .iter()
            .map(|p| surface_cost(p.position.z, cfg))
            .sum::<f64>();
    CostBreakdown {
        length_cost,
        obstacle_cost: obstacle,
        surface_cost: surface,
        total: length_cost + obstacle + surface,
        segment_clearances,
    }
}

/// Validation verdict for a candidate path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub ok: bool,
    pub min_clearance: f64,
    pub worst_segment: usize,
}

/// Checks every swept segment against every obstacle. `ok` requires the
/// minimum clearance to reach `d_req` (strict threshold).
pub fn validate(traj: &Trajectory, scene: &Scene, body: &RobotBody, d_req: f64) -> Validation {
    let mut min_clearance = f64::INFINITY;
    let mut worst_segment = 0;
    for (i, w) in traj.waypoints.windows(2).enumerate() {
        let c = scene.min_clearance(&swept_hull(body, &w[0], &w[1]));
        if c < min_clearance {
            min_clearance = c;
            worst_segment = i;
        }
    }
    Validation {
        ok: min_clearance >= d_req,
        min_clearance,
        worst_segment,
    }
}

/// Per-waypoint optimization variables: position plus intrinsic euler
/// angles, recomposed into a quaternion each evaluation.
#[derive(Clone)]
struct Variables {
    /// [x, y, z, yaw, pitch, roll] per waypoint (endpoints included but
    /// frozen when flagged fixed).
    data: Vec<[f64; 6]>,
}

impl Variables {
    fn from_trajectory(traj: &Trajectory) -> Self {
        let data = traj
            .waypoints
            .iter()
            .map(|p| {
                let (roll, pitch, yaw) = p.euler_angles();
                [p.position.x, p.position.y, p.position.z, yaw, pitch, roll]
            })
            .collect();
        Self { data }
    }

    fn pose(&self, i: usize) -> Pose {
        let v = self.data[i];
        Pose::from_euler(Vec3::new(v[0], v[1], v[2]), v[3], v[4], v[5])
    }

    fn to_trajectory(&self, template: &Trajectory) -> Trajectory {
        let mut waypoints: Vec<Pose> = (0..self.data.len()).map(|i| self.pose(i)).collect();
        if template.fixed_start {
            waypoints[0] = template.waypoints[0];
        }
        if template.fixed_end {
            *waypoints.last_mut().unwrap() = *template.waypoints.last().unwrap();
        }
        Trajectory {
            waypoints,
            fixed_start: template.fixed_start,
            fixed_end: template.fixed_end,
        }
    }
}

struct Workspace<'a> {
    scene: &'a Scene,
    body: &'a RobotBody,
    cfg: &'a CostConfig,
    template: Trajectory,
    roll_locked: bool,
}

impl Workspace<'_> {
    /// Cost terms that depend on waypoint `i`: its adjacent segment lengths,
    /// adjacent swept-volume clearances, and its own surface term. Enough
    /// for finite differences; full costs are only needed per step.
    fn local_cost(&self, vars: &Variables, i: usize, w_obs: f64, w_surf: f64) -> f64 {
        let n = vars.data.len();
        let pose_i = vars.pose(i);
        let mut cost = w_surf * surface_cost(pose_i.position.z, self.cfg);
        if i > 0 {
            let prev = vars.pose(i - 1);
            cost += self.cfg.length_coeff * (pose_i.position - prev.position).norm();
            let c = self
                .scene
                .min_clearance(&swept_hull(self.body, &prev, &pose_i));
            cost += w_obs * (self.cfg.d_min - c).max(0.0);
        }
        if i + 1 < n {
            let next = vars.pose(i + 1);
            cost += self.cfg.length_coeff * (next.position - pose_i.position).norm();
            let c = self
                .scene
                .min_clearance(&swept_hull(self.body, &pose_i, &next));
            cost += w_obs * (self.cfg.d_min - c).max(0.0);
        }
        cost
    }

    fn free_range(&self, n: usize) -> std::ops::Range<usize> {
        let lo = if self.template.fixed_start { 1 } else { 0 };
        let hi = if self.template.fixed_end { n - 1 } else { n };
        lo..hi
    }

    fn gradient(&self, vars: &Variables, w_obs: f64, w_surf: f64) -> Vec<[f64; 6]> {
        let n = vars.data.len();
        let mut grad = vec![[0.0; 6]; n];
        let h = self.cfg.fd_step;
        let mut probe = vars.clone();
        for i in self.free_range(n) {
            for k in 0..6 {
                if k == 5 && self.roll_locked {
                    continue;
                }
                let orig = probe.data[i][k];
                probe.data[i][k] = orig + h;
                let up = self.local_cost(&probe, i, w_obs, w_surf);
                probe.data[i][k] = orig - h;
                let down = self.local_cost(&probe, i, w_obs, w_surf);
                probe.data[i][k] = orig;
                grad[i][k] = (up - down) / (2.0 * h);
            }
        }
        grad
    }
}

/// Optimizes the seed trajectory in place. Endpoints stay fixed; with
/// `roll_locked` every roll variable keeps its seed value.
pub fn optimize(
    seed: &Trajectory,
    scene: &Scene,
    body: &RobotBody,
    cfg: &CostConfig,
    roll_locked: bool,
) -> OptimizeResult {
    let ws = Workspace {
        scene,
        body,
        cfg,
        template: seed.clone(),
        roll_locked,
    };
    let mut vars = Variables::from_trajectory(seed);

    // A seed that cuts straight through an obstacle can sit on a symmetry
    // saddle where every central difference of the penetration depth is
    // zero. A small deterministic lateral nudge on the free waypoints breaks
    // the tie; collision-free seeds are left untouched so the empty-scene
    // identity holds exactly.
    let (_, seed_clearances) = obstacle_cost(seed, scene, body, cfg);
    if seed_clearances.iter().any(|&c| c < cfg.d_min) {
        let lo = if seed.fixed_start { 1 } else { 0 };
        let hi = if seed.fixed_end {
            vars.data.len() - 1
        } else {
            vars.data.len()
        };
        for (i, slot) in vars.data[lo..hi].iter_mut().enumerate() {
            let phase = i as f64;
            slot[1] += 1e-3 * (2.7 * phase + 0.5).sin();
            slot[2] += 1e-3 * (1.9 * phase + 1.3).cos();
        }
    }

    let mut log = Vec::new();
    let mut iter = 0;
    let mut converged = false;

    let mut w_obs = cfg.obstacle_coeff;
    let mut w_surf = cfg.surface_coeff;

    for outer in 0..cfg.max_outer_iters {
        let mut trust = cfg.trust_region_init;
        let traj = vars.to_trajectory(&ws.template);
        let (mut cost, _, _, _) = penalized_cost(&traj, scene, body, cfg, w_obs, w_surf);
        let mut last_rel_change = f64::INFINITY;

        for _ in 0..cfg.max_inner_iters {
            let grad = ws.gradient(&vars, w_obs, w_surf);
            let gnorm = grad
                .iter()
                .flat_map(|g| g.iter())
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            if gnorm <= 1e-12 {
                last_rel_change = 0.0;
                break;
            }

            let mut candidate = vars.clone();
            for (i, g) in grad.iter().enumerate() {
                for k in 0..6 {
                    candidate.data[i][k] -= g[k] / gnorm * trust;
                }
            }
            let cand_traj = candidate.to_trajectory(&ws.template);
            let (cand_cost, lc, oc, sc) =
                penalized_cost(&cand_traj, scene, body, cfg, w_obs, w_surf);

            let accepted = cand_cost < cost;
            iter += 1;
            log.push(IterationRecord {
                iter,
                outer,
                total: if accepted { cand_cost } else { cost },
                length_cost: lc,
                obstacle_cost: oc,
                surface_cost: sc,
                trust_radius: trust,
                accepted,
            });

            if accepted {
                last_rel_change = (cost - cand_cost) / cost.abs().max(1e-12);
                vars = candidate;
                cost = cand_cost;
                trust = (trust * cfg.trust_region_expand).min(cfg.trust_region_init * 4.0);
                if last_rel_change < cfg.converge_rel_tol {
                    break;
                }
            } else {
                trust *= cfg.trust_region_shrink;
                if trust < 1e-7 {
                    // No descent direction at any usable step length: the
                    // cost is stationary here.
                    last_rel_change = 0.0;
                    break;
                }
            }
        }

        let traj = vars.to_trajectory(&ws.template);
        let (_, clearances) = obstacle_cost(&traj, scene, body, cfg);
        let clear_ok = clearances
            .iter()
            .all(|&c| c >= cfg.d_min - cfg.clearance_slack);
        if clear_ok && last_rel_change < cfg.converge_rel_tol {
            converged = true;
            break;
        }
        w_obs *= cfg.penalty_growth;
        w_surf *= cfg.penalty_growth;
    }

    let trajectory = vars.to_trajectory(&ws.template);
    let breakdown = breakdown(&trajectory, scene, body, cfg);
    OptimizeResult {
        trajectory,
        breakdown,
        converged,
        log,
    }
}

/// Serializes the iteration log as line-delimited records.
pub fn log_to_jsonl(log: &[IterationRecord]) -> String {
    let mut out = String::new();
    for rec in log {
        out.push_str(&serde_json::to_string(rec).expect("record serialization"));
        out.push('\n');
    }
    out
}
