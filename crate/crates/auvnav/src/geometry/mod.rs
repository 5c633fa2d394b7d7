//! Convex-geometry kernel: poses, polytopes, support functions, distance
//! queries and swept hulls.
//!
//! All values are immutable after construction and all operations are pure,
//! so they can be shared freely between concurrent planner workers.

mod distance;
mod hull;

pub use distance::separation_distance;
pub use hull::convex_hull;

use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// World-frame position in meters. `z` is negative below the water surface,
/// zero at the surface.
pub type Vec3 = Vector3<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("support direction must be nonzero")]
    ZeroDirection,
    #[error("convex hull requires at least one point")]
    EmptyPointSet,
    #[error("point coordinates must be finite")]
    NonFinitePoint,
}

/// Numeric tolerances used by the geometry kernel.
#[derive(Debug, Clone, Copy)]
pub struct GeomConfig {
    /// Vertices closer than this are merged when building hulls.
    pub hull_tol: f64,
    /// Separations with absolute value below this are reported as touching.
    pub touch_tol: f64,
    /// Target accuracy of the penetration-depth expansion.
    pub penetration_tol: f64,
}

impl Default for GeomConfig {
    fn default() -> Self {
        Self {
            hull_tol: 1e-9,
            touch_tol: 1e-6,
            penetration_tol: 1e-4,
        }
    }
}

/// Unit quaternion canonicalized so that `qw >= 0` (the double cover maps
/// both representations to the same rotation).
pub fn canonicalize(q: UnitQuaternion<f64>) -> UnitQuaternion<f64> {
    if q.w < 0.0 {
        UnitQuaternion::new_unchecked(-q.into_inner())
    } else {
        q
    }
}

/// Robot state: position plus orientation (the planner's per-waypoint pose).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: UnitQuaternion<f64>,
}

impl Pose {
    pub fn new(position: Vec3, orientation: UnitQuaternion<f64>) -> Self {
        Self {
            position,
            orientation: canonicalize(orientation),
        }
    }

    pub fn from_position(position: Vec3) -> Self {
        Self::new(position, UnitQuaternion::identity())
    }

    pub fn identity() -> Self {
        Self::from_position(Vec3::zeros())
    }

    /// Pose from position and intrinsic yaw/pitch/roll angles (radians).
    pub fn from_euler(position: Vec3, yaw: f64, pitch: f64, roll: f64) -> Self {
        Self::new(position, UnitQuaternion::from_euler_angles(roll, pitch, yaw))
    }

    /// Intrinsic (roll, pitch, yaw) angles of the orientation.
    pub fn euler_angles(&self) -> (f64, f64, f64) {
        self.orientation.euler_angles()
    }
}

/// Convex polytope given by its vertex set. Degenerate (coplanar, collinear
/// or single-point) vertex sets are valid bodies; distance queries handle
/// them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexBody {
    vertices: Vec<Vec3>,
}

impl ConvexBody {
    /// Wraps a vertex set assumed to already be in convex position.
    pub fn new(vertices: Vec<Vec3>) -> Result<Self, GeometryError> {
        if vertices.is_empty() {
            return Err(GeometryError::EmptyPointSet);
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(GeometryError::NonFinitePoint);
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned box from center and half extents.
    pub fn aabb(center: Vec3, half_extents: Vec3) -> Self {
        let h = half_extents;
        let mut vertices = Vec::with_capacity(8);
        for &sx in &[-1.0, 1.0] {
            for &sy in &[-1.0, 1.0] {
                for &sz in &[-1.0, 1.0] {
                    vertices.push(center + Vec3::new(sx * h.x, sy * h.y, sz * h.z));
                }
            }
        }
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn centroid(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    /// Vertex maximizing the dot product with `direction`. Ties are broken by
    /// the lowest vertex index so optimization runs are reproducible.
    pub fn support(&self, direction: &Vec3) -> Result<Vec3, GeometryError> {
        if direction.norm_squared() == 0.0 {
            return Err(GeometryError::ZeroDirection);
        }
        let mut best = 0;
        let mut best_dot = self.vertices[0].dot(direction);
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let d = v.dot(direction);
            if d > best_dot {
                best = i;
                best_dot = d;
            }
        }
        Ok(self.vertices[best])
    }

    /// Support without the zero-direction check, for inner distance loops
    /// that guarantee a nonzero direction.
    pub(crate) fn support_raw(&self, direction: &Vec3) -> Vec3 {
        let mut best = 0;
        let mut best_dot = self.vertices[0].dot(direction);
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let d = v.dot(direction);
            if d > best_dot {
                best = i;
                best_dot = d;
            }
        }
        self.vertices[best]
    }

    /// Body with every vertex rotated by `pose.orientation` and translated by
    /// `pose.position`.
    pub fn transformed(&self, pose: &Pose) -> ConvexBody {
        ConvexBody {
            vertices: self
                .vertices
                .iter()
                .map(|v| pose.orientation * v + pose.position)
                .collect(),
        }
    }
}

/// Box collision model of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotBody {
    pub half_extents: Vec3,
}

impl Default for RobotBody {
    /// The vehicle measures roughly 0.65 m x 0.45 m x 0.13 m.
    fn default() -> Self {
        Self {
            half_extents: Vec3::new(0.325, 0.225, 0.065),
        }
    }
}

impl RobotBody {
    /// Body-frame box vertices.
    pub fn local_body(&self) -> ConvexBody {
        ConvexBody::aabb(Vec3::zeros(), self.half_extents)
    }

    /// Box placed at a world pose.
    pub fn at(&self, pose: &Pose) -> ConvexBody {
        self.local_body().transformed(pose)
    }

    pub fn diagonal(&self) -> f64 {
        2.0 * self.half_extents.norm()
    }
}

/// Convex hull of the robot body placed at two consecutive waypoints.
///
/// This is the conservative convex approximation of the volume swept during
/// a straight-line transition between the poses.
pub fn swept_hull(body: &RobotBody, p0: &Pose, p1: &Pose) -> ConvexBody {
    let mut points = body.at(p0).vertices().to_vec();
    points.extend_from_slice(body.at(p1).vertices());
    convex_hull(&points).expect("box corners are nonempty")
}
