//! Obstacle maps: typed convex obstacles, a declarative scene document
//! format, builtin generators for the benchmark environments, and
//! point-cloud ingestion with a simplified convex decomposition.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{convex_hull, separation_distance, ConvexBody, Pose, Vec3};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("scene document parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("duplicate obstacle id `{0}`")]
    DuplicateId(String),
    #[error("unknown builtin scene `{0}`")]
    UnknownBuiltin(String),
    #[error("obstacle `{id}`: {reason}")]
    BadObstacle { id: String, reason: String },
    #[error("point cloud line {line}: {reason}")]
    BadCloudLine { line: usize, reason: String },
    #[error("invalid argument: {0}")]
    BadArgument(String),
}

/// Axis-aligned world limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Vec3,
    pub max: Vec3,
}

impl Bounds {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn clamp(&self, p: &Vec3) -> Vec3 {
        Vec3::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
            p.z.clamp(self.min.z, self.max.z),
        )
    }
}

/// Declarative obstacle shape, preserved for round-trip serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ObstacleShape {
    Box {
        center: [f64; 3],
        half_extents: [f64; 3],
        #[serde(default)]
        yaw_deg: f64,
    },
    Hull {
        vertices: Vec<[f64; 3]>,
    },
}

impl ObstacleShape {
    fn to_body(&self, id: &str) -> Result<ConvexBody, SceneError> {
        match self {
            ObstacleShape::Box {
                center,
                half_extents,
                yaw_deg,
            } => {
                if half_extents.iter().any(|&h| h <= 0.0) {
                    return Err(SceneError::BadObstacle {
                        id: id.to_string(),
                        reason: format!("half_extents must be positive, got {half_extents:?}"),
                    });
                }
                let center = Vec3::from(*center);
                let local = ConvexBody::aabb(Vec3::zeros(), Vec3::from(*half_extents));
                let pose = Pose::from_euler(center, yaw_deg.to_radians(), 0.0, 0.0);
                Ok(local.transformed(&pose))
            }
            ObstacleShape::Hull { vertices } => {
                if vertices.is_empty() {
                    return Err(SceneError::BadObstacle {
                        id: id.to_string(),
                        reason: "hull needs at least one vertex".to_string(),
                    });
                }
                let verts = vertices.iter().map(|v| Vec3::from(*v)).collect();
                ConvexBody::new(verts).map_err(|e| SceneError::BadObstacle {
                    id: id.to_string(),
                    reason: e.to_string(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    pub id: String,
    pub tag: String,
    pub shape: ObstacleShape,
    body: ConvexBody,
}

impl Obstacle {
    pub fn new(id: impl Into<String>, tag: impl Into<String>, shape: ObstacleShape) -> Result<Self, SceneError> {
        let id = id.into();
        let body = shape.to_body(&id)?;
        Ok(Self {
            id,
            tag: tag.into(),
            shape,
            body,
        })
    }

    pub fn from_hull(id: impl Into<String>, tag: impl Into<String>, body: ConvexBody) -> Self {
        let shape = ObstacleShape::Hull {
            vertices: body.vertices().iter().map(|v| [v.x, v.y, v.z]).collect(),
        };
        Self {
            id: id.into(),
            tag: tag.into(),
            shape,
            body,
        }
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }
}

/// Immutable obstacle map. Queries are pure; scenes can be shared between
/// concurrent planner workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub name: String,
    pub bounds: Bounds,
    pub surface_z: f64,
    obstacles: Vec<Obstacle>,
}

impl Scene {
    pub fn new(
        name: impl Into<String>,
        bounds: Bounds,
        surface_z: f64,
        obstacles: Vec<Obstacle>,
    ) -> Result<Self, SceneError> {
        let mut seen = HashSet::new();
        for o in &obstacles {
            if !seen.insert(o.id.clone()) {
                return Err(SceneError::DuplicateId(o.id.clone()));
            }
        }
        Ok(Self {
            name: name.into(),
            bounds,
            surface_z,
            obstacles,
        })
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    /// Minimum separation over all obstacles; +infinity for an empty scene.
    pub fn min_clearance(&self, body: &ConvexBody) -> f64 {
        self.obstacles
            .iter()
            .map(|o| separation_distance(body, &o.body))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn load(text: &str) -> Result<Self, SceneError> {
        let doc: SceneDoc = toml::from_str(text)?;
        let obstacles = doc
            .obstacles
            .into_iter()
            .map(|o| Obstacle::new(o.id, o.tag, o.shape))
            .collect::<Result<Vec<_>, _>>()?;
        Scene::new(
            doc.name,
            Bounds::new(Vec3::from(doc.bounds.min), Vec3::from(doc.bounds.max)),
            doc.surface_z,
            obstacles,
        )
    }

    pub fn save(&self) -> String {
        let doc = SceneDoc {
            name: self.name.clone(),
            surface_z: self.surface_z,
            bounds: BoundsDoc {
                min: [self.bounds.min.x, self.bounds.min.y, self.bounds.min.z],
                max: [self.bounds.max.x, self.bounds.max.y, self.bounds.max.z],
            },
            obstacles: self
                .obstacles
                .iter()
                .map(|o| ObstacleDoc {
                    id: o.id.clone(),
                    tag: o.tag.clone(),
                    shape: o.shape.clone(),
                })
                .collect(),
        };
        toml::to_string_pretty(&doc).expect("scene serialization")
    }
}

#[derive(Serialize, Deserialize)]
struct SceneDoc {
    name: String,
    #[serde(default)]
    surface_z: f64,
    bounds: BoundsDoc,
    #[serde(default)]
    obstacles: Vec<ObstacleDoc>,
}

#[derive(Serialize, Deserialize)]
struct BoundsDoc {
    min: [f64; 3],
    max: [f64; 3],
}

#[derive(Serialize, Deserialize)]
struct ObstacleDoc {
    id: String,
    #[serde(default)]
    tag: String,
    #[serde(flatten)]
    shape: ObstacleShape,
}

/// Raw 3D point set, one obstacle map's worth of sensor returns.
#[derive(Debug, Clone)]
pub struct PointCloud {
    pub points: Vec<Vec3>,
    pub organized: bool,
}

impl PointCloud {
    /// Parses whitespace-separated `x y z` lines; `#` starts a comment.
    pub fn from_xyz_text(text: &str) -> Result<Self, SceneError> {
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(SceneError::BadCloudLine {
                    line: lineno + 1,
                    reason: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            let mut coords = [0.0; 3];
            for (i, f) in fields.iter().enumerate() {
                coords[i] = f.parse::<f64>().map_err(|e| SceneError::BadCloudLine {
                    line: lineno + 1,
                    reason: e.to_string(),
                })?;
                if !coords[i].is_finite() {
                    return Err(SceneError::BadCloudLine {
                        line: lineno + 1,
                        reason: "coordinates must be finite".to_string(),
                    });
                }
            }
            points.push(Vec3::from(coords));
        }
        Ok(Self {
            points,
            organized: false,
        })
    }
}

/// Outcome of the cluster-then-hull decomposition.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub obstacles: Vec<Obstacle>,
    /// Clusters below the `min_pts` threshold, with their point counts.
    pub dropped_clusters: Vec<usize>,
}

/// Euclidean clustering at radius `cell` (single linkage over a uniform
/// spatial grid), one convex hull per retained cluster. Clusters smaller
/// than `min_pts` are dropped and reported.
pub fn decompose_cloud(
    cloud: &PointCloud,
    cell: f64,
    min_pts: usize,
) -> Result<Decomposition, SceneError> {
    if cell <= 0.0 {
        return Err(SceneError::BadArgument(format!(
            "cell must be positive, got {cell}"
        )));
    }
    if min_pts == 0 {
        return Err(SceneError::BadArgument(
            "min_pts must be at least 1".to_string(),
        ));
    }
    let pts = &cloud.points;
    if pts.is_empty() {
        return Ok(Decomposition {
            obstacles: Vec::new(),
            dropped_clusters: Vec::new(),
        });
    }

    let key = |p: &Vec3| {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }

    let mut uf = UnionFind::new(pts.len());
    let cell2 = cell * cell;
    for (i, p) in pts.iter().enumerate() {
        let (kx, ky, kz) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(bucket) = grid.get(&(kx + dx, ky + dy, kz + dz)) else {
                        continue;
                    };
                    for &j in bucket {
                        if j > i && (pts[j] - p).norm_squared() <= cell2 {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
    }

    // Deterministic cluster order: by lowest member index.
    let mut clusters: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..pts.len() {
        clusters.entry(uf.find(i)).or_default().push(i);
    }
    let mut clusters: Vec<Vec<usize>> = clusters.into_values().collect();
    clusters.sort_by_key(|c| c[0]);

    let mut obstacles = Vec::new();
    let mut dropped = Vec::new();
    for members in clusters {
        if members.len() < min_pts {
            dropped.push(members.len());
            continue;
        }
        let cluster_pts: Vec<Vec3> = members.iter().map(|&i| pts[i]).collect();
        let hull = convex_hull(&cluster_pts).expect("cluster nonempty");
        obstacles.push(Obstacle::from_hull(
            format!("cluster_{:04}", obstacles.len()),
            "cloud",
            hull,
        ));
    }
    Ok(Decomposition {
        obstacles,
        dropped_clusters: dropped,
    })
}

/// A builtin scene plus the start/goal poses its benchmarks use.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub scene: Scene,
    pub start: Pose,
    pub goal: Pose,
    pub roll_locked: bool,
}

pub const BUILTIN_SCENES: [&str; 4] = ["window", "pipes", "cluttered", "pool"];

/// Deterministic benchmark scene by name.
pub fn builtin_scene(name: &str) -> Result<Scene, SceneError> {
    Ok(builtin_scenario(name)?.scene)
}

/// Benchmark scene with its canonical start and goal.
pub fn builtin_scenario(name: &str) -> Result<Scenario, SceneError> {
    match name {
        "window" => window_scenario(),
        "pipes" => pipes_scenario(),
        "cluttered" => cluttered_scenario(),
        "pool" => pool_scenario(),
        other => Err(SceneError::UnknownBuiltin(other.to_string())),
    }
}

fn boxed(id: &str, tag: &str, center: [f64; 3], half: [f64; 3]) -> Obstacle {
    Obstacle::new(
        id,
        tag,
        ObstacleShape::Box {
            center,
            half_extents: half,
            yaw_deg: 0.0,
        },
    )
    .expect("valid box")
}

/// Cylinder approximated by a 12-sided prism, keeping the map polytope-only.
fn prism(id: &str, tag: &str, center: Vec3, axis: Vec3, radius: f64, half_len: f64) -> Obstacle {
    let a = axis.normalize();
    let u = {
        let cand = if a.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        (cand - a * cand.dot(&a)).normalize()
    };
    let v = a.cross(&u);
    let mut verts = Vec::with_capacity(24);
    for i in 0..12 {
        let th = std::f64::consts::TAU * i as f64 / 12.0;
        let ring = u * (radius * th.cos()) + v * (radius * th.sin());
        verts.push(center + a * half_len + ring);
        verts.push(center - a * half_len + ring);
    }
    Obstacle::from_hull(id, tag, ConvexBody::new(verts).expect("prism vertices"))
}

/// Enclosed corridor with a single lateral opening in the far wall.
///
/// The wall's near face sits 8.6 m ahead of the start pose; the opening is
/// offset 2.5 m to the left so the straight seed path runs into the wall.
fn window_scenario() -> Result<Scenario, SceneError> {
    let scene = Scene::new(
        "window",
        Bounds::new(Vec3::new(-2.0, -6.0, -4.0), Vec3::new(14.0, 6.0, 0.0)),
        0.0,
        vec![
            boxed("wall_left", "wall", [8.75, -2.2, -2.0], [0.15, 3.8, 1.7]),
            boxed("wall_right", "wall", [8.75, 4.7, -2.0], [0.15, 1.3, 1.7]),
            boxed("floor", "floor", [6.0, 0.0, -3.85], [8.0, 6.0, 0.15]),
            boxed("ceiling", "ceiling", [6.0, 0.0, -0.15], [8.0, 6.0, 0.15]),
        ],
    )?;
    Ok(Scenario {
        scene,
        start: Pose::from_position(Vec3::new(0.0, 0.0, -2.0)),
        goal: Pose::from_position(Vec3::new(12.0, 0.0, -2.0)),
        roll_locked: false,
    })
}

/// Three pipe runs at mixed orientations forcing genuine 3D motion.
fn pipes_scenario() -> Result<Scenario, SceneError> {
    let scene = Scene::new(
        "pipes",
        Bounds::new(Vec3::new(-2.0, -6.0, -5.0), Vec3::new(14.0, 6.0, 0.0)),
        0.0,
        vec![
            prism(
                "pipe_vertical",
                "pipe",
                Vec3::new(3.5, 0.3, -2.5),
                Vec3::z(),
                0.5,
                2.5,
            ),
            prism(
                "pipe_across",
                "pipe",
                Vec3::new(6.5, 0.0, -3.3),
                Vec3::y(),
                0.45,
                6.0,
            ),
            prism(
                "pipe_diagonal",
                "pipe",
                Vec3::new(9.5, 0.0, -2.5),
                Vec3::new(0.0, 1.0, 1.0),
                0.5,
                4.0,
            ),
        ],
    )?;
    Ok(Scenario {
        scene,
        start: Pose::from_position(Vec3::new(0.0, 0.0, -2.5)),
        goal: Pose::from_position(Vec3::new(12.0, 0.0, -2.5)),
        roll_locked: false,
    })
}

/// Pairs of vertical pillars; the corridor between each pair is the intended
/// passage.
fn cluttered_scenario() -> Result<Scenario, SceneError> {
    let mut obstacles = Vec::new();
    for (i, x) in [3.0, 6.0, 9.0].iter().enumerate() {
        for (side, y) in [("l", 1.4), ("r", -1.4)] {
            obstacles.push(boxed(
                &format!("pillar_{i}{side}"),
                "pillar",
                [*x, y, -2.0],
                [0.2, 0.2, 2.0],
            ));
        }
    }
    let scene = Scene::new(
        "cluttered",
        Bounds::new(Vec3::new(-2.0, -4.0, -4.0), Vec3::new(14.0, 4.0, 0.0)),
        0.0,
        obstacles,
    )?;
    Ok(Scenario {
        scene,
        start: Pose::from_position(Vec3::new(0.0, 0.0, -2.0)),
        goal: Pose::from_position(Vec3::new(12.0, 0.0, -2.0)),
        roll_locked: false,
    })
}

/// 25 m x 15 m x 4 m pool with a slalom of poles over a 15 m traverse.
/// Roll stays locked so downward-facing cameras keep sight of the floor.
fn pool_scenario() -> Result<Scenario, SceneError> {
    let poles = [
        ("pole_1", 8.0, 7.0),
        ("pole_2", 11.0, 8.0),
        ("pole_3", 14.0, 7.0),
        // Last pole sits further out to absorb the larger drift near the end
        // of the run.
        ("pole_4", 17.5, 8.2),
    ];
    let obstacles = poles
        .iter()
        .map(|&(id, x, y)| prism(id, "pole", Vec3::new(x, y, -2.0), Vec3::z(), 0.2, 2.0))
        .collect();
    let scene = Scene::new(
        "pool",
        Bounds::new(Vec3::new(0.0, 0.0, -4.0), Vec3::new(25.0, 15.0, 0.0)),
        0.0,
        obstacles,
    )?;
    Ok(Scenario {
        scene,
        start: Pose::from_position(Vec3::new(5.0, 7.5, -2.0)),
        goal: Pose::from_position(Vec3::new(20.0, 7.5, -2.0)),
        roll_locked: true,
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Lower root wins so cluster labels follow input order.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_single_box() {
        let doc = r#"
            name = "one-box"
            [bounds]
            min = [-1.0, -5.0, -4.0]
            max = [10.0, 5.0, 0.0]
            [[obstacles]]
            id = "b"
            kind = "box"
            center = [5.0, 0.0, -2.0]
            half_extents = [0.5, 0.5, 0.5]
        "#;
        let scene = Scene::load(doc).unwrap();
        assert_eq!(scene.obstacles().len(), 1);
        assert_eq!(scene.obstacles()[0].body().vertices().len(), 8);
    }

    #[test]
    fn empty_obstacle_list_is_valid() {
        let doc = r#"
            name = "empty"
            [bounds]
            min = [0.0, 0.0, -1.0]
            max = [1.0, 1.0, 0.0]
        "#;
        let scene = Scene::load(doc).unwrap();
        assert!(scene.obstacles().is_empty());
        let probe = ConvexBody::aabb(Vec3::new(0.5, 0.5, -0.5), Vec3::new(0.1, 0.1, 0.1));
        assert_eq!(scene.min_clearance(&probe), f64::INFINITY);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let doc = r#"
            name = "dup"
            [bounds]
            min = [0.0, 0.0, -1.0]
            max = [1.0, 1.0, 0.0]
            [[obstacles]]
            id = "a"
            kind = "box"
            center = [0.0, 0.0, 0.0]
            half_extents = [0.1, 0.1, 0.1]
            [[obstacles]]
            id = "a"
            kind = "box"
            center = [1.0, 0.0, 0.0]
            half_extents = [0.1, 0.1, 0.1]
        "#;
        assert!(matches!(Scene::load(doc), Err(SceneError::DuplicateId(_))));
    }

    #[test]
    fn schema_violation_names_field() {
        let doc = r#"
            name = "bad"
            [bounds]
            min = [0.0, 0.0, -1.0]
            max = [1.0, 1.0, 0.0]
            [[obstacles]]
            id = "a"
            kind = "box"
            center = [0.0, 0.0, 0.0]
        "#;
        let err = Scene::load(doc).unwrap_err();
        assert!(err.to_string().contains("half_extents"), "got: {err}");
    }

    #[test]
    fn round_trip_preserves_obstacles() {
        let scene = crate::scene::builtin_scene("window").unwrap();
        let reloaded = Scene::load(&scene.save()).unwrap();
        assert_eq!(scene, reloaded);
    }

    #[test]
    fn min_clearance_single_cube() {
        let scene = Scene::new(
            "s",
            Bounds::new(Vec3::new(-10.0, -10.0, -10.0), Vec3::new(10.0, 10.0, 10.0)),
            0.0,
            vec![Obstacle::new(
                "c",
                "",
                ObstacleShape::Box {
                    center: [3.0, 0.0, 0.0],
                    half_extents: [0.5, 0.5, 0.5],
                    yaw_deg: 0.0,
                },
            )
            .unwrap()],
        )
        .unwrap();
        let probe = ConvexBody::aabb(Vec3::zeros(), Vec3::new(0.5, 0.5, 0.5));
        assert!((scene.min_clearance(&probe) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn cloud_parser_handles_comments_and_blanks() {
        let text = "# header\n1 2 3\n\n4 5 6 # trailing\n";
        let cloud = PointCloud::from_xyz_text(text).unwrap();
        assert_eq!(cloud.points.len(), 2);
        assert_eq!(cloud.points[1], Vec3::new(4.0, 5.0, 6.0));
    }

    #[test]
    fn cloud_parser_rejects_bad_line() {
        let err = PointCloud::from_xyz_text("1 2\n").unwrap_err();
        assert!(matches!(err, SceneError::BadCloudLine { line: 1, .. }));
    }

    #[test]
    fn two_far_clusters_decompose_to_two_obstacles() {
        let mut points = Vec::new();
        for i in 0..20 {
            let t = i as f64 * 0.05;
            points.push(Vec3::new(t, t * 0.5, -1.0));
            points.push(Vec3::new(5.0 + t, t * 0.5, -1.0));
        }
        let cloud = PointCloud {
            points,
            organized: false,
        };
        let d = decompose_cloud(&cloud, 0.5, 1).unwrap();
        assert_eq!(d.obstacles.len(), 2);
        assert!(d.dropped_clusters.is_empty());
    }

    #[test]
    fn small_clusters_dropped_and_reported() {
        let points = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(0.1, 0.0, 0.0),
            Vec3::new(0.2, 0.0, 0.0),
            Vec3::new(9.0, 0.0, 0.0),
        ];
        let cloud = PointCloud {
            points,
            organized: false,
        };
        let d = decompose_cloud(&cloud, 0.5, 2).unwrap();
        assert_eq!(d.obstacles.len(), 1);
        assert_eq!(d.dropped_clusters, vec![1]);
    }

    #[test]
    fn empty_cloud_is_empty_decomposition() {
        let cloud = PointCloud {
            points: Vec::new(),
            organized: false,
        };
        let d = decompose_cloud(&cloud, 0.5, 1).unwrap();
        assert!(d.obstacles.is_empty());
    }
}
