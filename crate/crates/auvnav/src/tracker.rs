//! Closed-loop waypoint tracker.
//!
//! Turns the current vehicle pose and the active goal waypoint into a
//! (v, h, d, o) command tuple: constant forward speed, zero heave, a depth
//! command that moves linearly with the measured depth, and a yaw command
//! that faces the goal. Goals are declared reached on a small error plus a
//! detected local minimum of the goal distance.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::geometry::{Pose, Vec3};
use crate::optimizer::Trajectory;

/// Command tuple sent to the plant each tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Command {
    /// Forward linear velocity, m/s.
    pub v: f64,
    /// Heave linear velocity, m/s. Always zero: purely forward motion.
    pub h: f64,
    /// Desired depth (z-coordinate, negative underwater), m.
    pub d: f64,
    /// Desired yaw, rad.
    pub yaw: f64,
    /// Desired pitch, rad. Left at zero; the plant derives pitch from the
    /// depth command.
    pub pitch: f64,
    /// Desired roll, rad. Always zero.
    pub roll: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub v_nominal: f64,
    /// Goal-reached distance threshold, m.
    pub d_reached: f64,
    /// Consecutive non-improving steps that declare a local minimum.
    pub slide_window: usize,
    /// Velocity and clearance-margin scale applied per retry.
    pub retry_v_scale: f64,
    pub max_retries: usize,
    /// Keep the published yaw law's x = 0 value of 0 instead of the
    /// facing-the-goal value of sign(y) * pi/2.
    pub literal_yaw_branch: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            v_nominal: 0.4,
            d_reached: 0.4,
            slide_window: 5,
            retry_v_scale: 0.5,
            max_retries: 2,
            literal_yaw_branch: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrackerEvent {
    None,
    GoalReached,
    PathComplete,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrackerState {
    /// Index of the active goal waypoint. Non-decreasing: missed goals are
    /// never revisited.
    pub goal_index: usize,
    /// Depth of the previously achieved goal, the anchor of the depth law.
    pub z_prev: f64,
    /// Recent goal distances, newest last.
    history: VecDeque<f64>,
    /// Closest approach to the active goal so far.
    min_dist: f64,
    last_yaw: f64,
    done: bool,
}

impl TrackerState {
    /// Tracker at the start of a path: the first goal is waypoint 1, the
    /// previous achieved goal is the start itself.
    pub fn new(path: &Trajectory, start: &Pose) -> Self {
        let (_, _, yaw) = start.euler_angles();
        Self {
            goal_index: 1.min(path.waypoints.len() - 1),
            z_prev: start.position.z,
            history: VecDeque::new(),
            min_dist: f64::INFINITY,
            last_yaw: yaw,
            done: false,
        }
    }

    pub fn is_done(&self) -> bool {
        self.done
    }
}

/// Depth command: z_prev plus the fraction of remaining measured depth
/// change applied to the goal offset. Singular at z_prev = 0, where it
/// falls back to the goal depth directly.
pub fn desired_depth(z_prev: f64, z_goal: f64, z_current: f64) -> f64 {
    if z_prev.abs() < 1e-6 {
        return z_goal;
    }
    z_prev + (1.0 - z_current / z_prev) * (z_goal - z_prev)
}

/// Yaw command from the horizontal translation error, normalized to
/// (-pi, pi]. The x = 0 column keeps facing the goal unless the literal
/// branch is requested; a zero error vector holds the previous yaw.
pub fn desired_yaw(e_t: &Vec3, prev_yaw: f64, literal_branch: bool) -> f64 {
    let (x, y) = (e_t.x, e_t.y);
    if x == 0.0 {
        if y == 0.0 {
            return prev_yaw;
        }
        return if literal_branch {
            0.0
        } else {
            y.signum() * std::f64::consts::FRAC_PI_2
        };
    }
    let raw = if x > 0.0 {
        (y / x).atan()
    } else {
        std::f64::consts::PI + (y / x).atan()
    };
    wrap_angle(raw)
}

/// Wraps to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = (a + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if w == -std::f64::consts::PI {
        w = std::f64::consts::PI;
    }
    w
}

/// One control step: emits the command for the active goal and advances the
/// goal index when the goal is declared reached.
pub fn step(
    state: &Pose,
    path: &Trajectory,
    mut ts: TrackerState,
    cfg: &TrackerConfig,
) -> (Command, TrackerState, TrackerEvent) {
    let goal = &path.waypoints[ts.goal_index];
    let e_t = goal.position - state.position;
    let dist = e_t.norm();

    if ts.history.len() == cfg.slide_window {
        ts.history.pop_front();
    }
    ts.history.push_back(dist);
    ts.min_dist = ts.min_dist.min(dist);

    let full = ts.history.len() == cfg.slide_window;
    let stalled = full
        && ts
            .history
            .iter()
            .zip(ts.history.iter().skip(1))
            .all(|(a, b)| b >= a);
    // Missed fly-by: progress toward a goal the vehicle already came close
    // to has stopped outside the reached sphere. Spending more effort on it
    // would only loop.
    let missed = stalled && ts.min_dist < 2.0 * cfg.d_reached && dist >= cfg.d_reached;

    let mut event = TrackerEvent::None;
    let reached = dist < cfg.d_reached && stalled;
    let last = ts.goal_index + 1 >= path.waypoints.len();
    if !ts.done && (reached || (missed && !last)) {
        ts.z_prev = goal.position.z;
        ts.history.clear();
        ts.min_dist = f64::INFINITY;
        if !last {
            ts.goal_index += 1;
            if reached {
                event = TrackerEvent::GoalReached;
            }
        } else {
            ts.done = true;
            event = TrackerEvent::PathComplete;
        }
    }

    let active = &path.waypoints[ts.goal_index];
    let e_active = active.position - state.position;
    let yaw = desired_yaw(&e_active, ts.last_yaw, cfg.literal_yaw_branch);
    ts.last_yaw = yaw;
    let cmd = Command {
        v: cfg.v_nominal,
        h: 0.0,
        d: desired_depth(ts.z_prev, active.position.z, state.position.z),
        yaw,
        pitch: 0.0,
        roll: 0.0,
    };
    (cmd, ts, event)
}

/// Report handed to the retry policy after a failed execution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FailureReport {
    pub retries_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RetryDecision {
    /// Slow down and request a replan with the scaled clearance margin.
    Retry {
        cfg: TrackerConfig,
        replan_d_min: f64,
    },
    Terminal,
}

/// Slow-retry fallback: scale velocity and the planner's clearance margin
/// down, up to the retry cap.
pub fn retry_policy(failure: &FailureReport, cfg: &TrackerConfig, d_min: f64) -> RetryDecision {
    if failure.retries_used >= cfg.max_retries {
        return RetryDecision::Terminal;
    }
    let mut next = cfg.clone();
    next.v_nominal *= cfg.retry_v_scale;
    RetryDecision::Retry {
        replan_d_min: d_min * cfg.retry_v_scale,
        cfg: next,
    }
}
