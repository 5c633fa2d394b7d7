//! Trajectory-optimization navigation stack for a free-floating underwater
//! vehicle in a known convex-obstacle map.
//!
//! The pipeline plans minimum-length, clearance-guaranteed waypoint paths by
//! sequential convexified optimization with sampling-based restarts, then
//! tracks them with depth/yaw command laws inside a drift-aware kinematic
//! simulator.

pub mod cli;
pub mod correction;
pub mod geometry;
pub mod optimizer;
pub mod scene;
pub mod simulator;
pub mod tracker;
