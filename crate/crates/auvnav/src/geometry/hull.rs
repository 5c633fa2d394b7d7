//! Convex hulls of 3D point sets.
//!
//! Degenerate inputs are kept as lower-dimensional vertex sets: collinear
//! points reduce to their two extremes and coplanar points to a planar
//! polygon. Point-cloud clusters are often flat, so the distance queries
//! accept these bodies as-is.

use super::{ConvexBody, GeometryError, Vec3};

/// Minimal vertex set whose hull contains all input points (within 1e-9,
/// relative to the point-set scale).
pub fn convex_hull(points: &[Vec3]) -> Result<ConvexBody, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyPointSet);
    }
    if points.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
        return Err(GeometryError::NonFinitePoint);
    }

    let points = dedup_exact(points);
    let scale = points
        .iter()
        .map(|p| p.amax())
        .fold(1.0_f64, f64::max);
    let eps = 1e-9 * scale;

    // p0, p1: a farthest pair seed along the first extent.
    let p0 = 0;
    let p1 = farthest_from(&points, |p| (p - points[p0]).norm());
    if (points[p1] - points[p0]).norm() <= eps {
        return ConvexBody::new(vec![points[p0]]);
    }

    let axis = (points[p1] - points[p0]).normalize();
    let line_dist = |p: &Vec3| {
        let d = p - points[p0];
        (d - axis * d.dot(&axis)).norm()
    };
    let p2 = farthest_from(&points, line_dist);
    if line_dist(&points[p2]) <= eps {
        return Ok(collinear_hull(&points, &axis));
    }

    let normal = (points[p1] - points[p0])
        .cross(&(points[p2] - points[p0]))
        .normalize();
    let plane_dist = |p: &Vec3| (p - points[p0]).dot(&normal).abs();
    let p3 = farthest_from(&points, plane_dist);
    if plane_dist(&points[p3]) <= eps {
        return Ok(planar_hull(&points, &normal, eps));
    }

    Ok(quickhull(&points, [p0, p1, p2, p3], eps))
}

fn dedup_exact(points: &[Vec3]) -> Vec<Vec3> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let key = (p.x.to_bits(), p.y.to_bits(), p.z.to_bits());
        if seen.insert(key) {
            out.push(*p);
        }
    }
    out
}

fn farthest_from<F: Fn(&Vec3) -> f64>(points: &[Vec3], metric: F) -> usize {
    let mut best = 0;
    let mut best_d = metric(&points[0]);
    for (i, p) in points.iter().enumerate().skip(1) {
        let d = metric(p);
        if d > best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

fn collinear_hull(points: &[Vec3], axis: &Vec3) -> ConvexBody {
    let lo = points
        .iter()
        .min_by(|a, b| a.dot(axis).total_cmp(&b.dot(axis)))
        .unwrap();
    let hi = points
        .iter()
        .max_by(|a, b| a.dot(axis).total_cmp(&b.dot(axis)))
        .unwrap();
    ConvexBody::new(vec![*lo, *hi]).expect("two finite points")
}

/// Andrew monotone chain on points projected into the plane.
fn planar_hull(points: &[Vec3], normal: &Vec3, eps: f64) -> ConvexBody {
    let u = pick_orthonormal(normal);
    let v = normal.cross(&u);
    let origin = points[0];
    let mut proj: Vec<(f64, f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let d = p - origin;
            (d.dot(&u), d.dot(&v), i)
        })
        .collect();
    proj.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    proj.dedup_by(|a, b| (a.0 - b.0).abs() <= eps && (a.1 - b.1).abs() <= eps);

    if proj.len() <= 2 {
        let verts = proj.iter().map(|&(_, _, i)| points[i]).collect();
        return ConvexBody::new(verts).expect("nonempty");
    }

    let cross = |o: &(f64, f64, usize), a: &(f64, f64, usize), b: &(f64, f64, usize)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64, usize)> = Vec::new();
    for p in proj.iter().chain(proj.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= eps {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop(); // closing point repeats the first
    ConvexBody::new(hull.iter().map(|&(_, _, i)| points[i]).collect()).expect("nonempty")
}

pub(crate) fn pick_orthonormal(n: &Vec3) -> Vec3 {
    let cand = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    (cand - n * cand.dot(n)).normalize()
}

struct Face {
    verts: [usize; 3],
    normal: Vec3,
    offset: f64,
    outside: Vec<usize>,
}

impl Face {
    fn new(points: &[Vec3], verts: [usize; 3], interior: &Vec3) -> Self {
        let [a, b, c] = verts;
        let mut normal = (points[b] - points[a]).cross(&(points[c] - points[a]));
        let norm = normal.norm();
        if norm > 0.0 {
            normal /= norm;
        }
        let mut verts = verts;
        if normal.dot(&(interior - points[a])) > 0.0 {
            normal = -normal;
            verts.swap(1, 2);
        }
        let offset = normal.dot(&points[a]);
        Self {
            verts,
            normal,
            offset,
            outside: Vec::new(),
        }
    }

    fn dist(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

fn quickhull(points: &[Vec3], seed: [usize; 4], eps: f64) -> ConvexBody {
    let interior =
        (points[seed[0]] + points[seed[1]] + points[seed[2]] + points[seed[3]]) / 4.0;
    let mut faces: Vec<Option<Face>> = vec![
        Some(Face::new(points, [seed[0], seed[1], seed[2]], &interior)),
        Some(Face::new(points, [seed[0], seed[1], seed[3]], &interior)),
        Some(Face::new(points, [seed[0], seed[2], seed[3]], &interior)),
        Some(Face::new(points, [seed[1], seed[2], seed[3]], &interior)),
    ];

    let mut unassigned: Vec<usize> = (0..points.len()).filter(|i| !seed.contains(i)).collect();
    assign_outside(points, &mut faces, &mut unassigned, eps);

    loop {
        let Some(face_idx) = faces
            .iter()
            .position(|f| f.as_ref().is_some_and(|f| !f.outside.is_empty()))
        else {
            break;
        };
        let apex = {
            let f = faces[face_idx].as_ref().unwrap();
            f.outside[farthest_from(
                &f.outside.iter().map(|&i| points[i]).collect::<Vec<_>>(),
                |p| f.normal.dot(p),
            )]
        };

        // Visible faces and their orphaned outside sets.
        let mut orphans = Vec::new();
        let mut visible_edges: Vec<(usize, usize)> = Vec::new();
        for slot in faces.iter_mut() {
            if let Some(f) = slot {
                if f.dist(&points[apex]) > eps {
                    let f = slot.take().unwrap();
                    orphans.extend(f.outside);
                    let [a, b, c] = f.verts;
                    visible_edges.push((a, b));
                    visible_edges.push((b, c));
                    visible_edges.push((c, a));
                }
            }
        }

        // Horizon: directed edges whose reverse is not among the visible set.
        for &(a, b) in &visible_edges {
            if !visible_edges.contains(&(b, a)) {
                let mut face = Face::new(points, [a, b, apex], &interior);
                face.outside = Vec::new();
                faces.push(Some(face));
            }
        }

        orphans.retain(|&i| i != apex);
        assign_outside(points, &mut faces, &mut orphans, eps);
    }

    let mut idx: Vec<usize> = faces
        .iter()
        .flatten()
        .flat_map(|f| f.verts)
        .collect();
    idx.sort_unstable();
    idx.dedup();
    ConvexBody::new(idx.into_iter().map(|i| points[i]).collect()).expect("nonempty")
}

fn assign_outside(
    points: &[Vec3],
    faces: &mut [Option<Face>],
    candidates: &mut Vec<usize>,
    eps: f64,
) {
    'point: for &i in candidates.iter() {
        for f in faces.iter_mut().flatten() {
            if f.dist(&points[i]) > eps {
                f.outside.push(i);
                continue 'point;
            }
        }
    }
    candidates.clear();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::separation_distance;

    #[test]
    fn interior_point_dropped() {
        let mut pts = ConvexBody::aabb(Vec3::zeros(), Vec3::new(0.5, 0.5, 0.5))
            .vertices()
            .to_vec();
        pts.push(Vec3::zeros());
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices().len(), 8);
        assert!(!hull.vertices().contains(&Vec3::zeros()));
    }

    #[test]
    fn collinear_points_reduce_to_extremes() {
        let pts: Vec<Vec3> = (0..7).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        let hull = convex_hull(&pts).unwrap();
        let mut vs = hull.vertices().to_vec();
        vs.sort_by(|a, b| a.x.total_cmp(&b.x));
        assert_eq!(vs.len(), 2);
        assert_eq!(vs[0], Vec3::zeros());
        assert_eq!(vs[1], Vec3::new(6.0, 0.0, 0.0));
    }

    #[test]
    fn single_point_hull() {
        let hull = convex_hull(&[Vec3::new(1.0, 2.0, 3.0); 5]).unwrap();
        assert_eq!(hull.vertices(), &[Vec3::new(1.0, 2.0, 3.0)]);
    }

    #[test]
    fn coplanar_square_keeps_corners() {
        let pts = vec![
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
            Vec3::new(0.5, 0.5, 1.0),
            Vec3::new(0.5, 0.0, 1.0), // on an edge
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices().len(), 4);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(convex_hull(&[]), Err(GeometryError::EmptyPointSet));
    }

    #[test]
    fn ball_samples_contained_in_hull() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut pts = Vec::new();
        while pts.len() < 1000 {
            let p = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if p.norm() <= 1.0 {
                pts.push(p);
            }
        }
        let hull = convex_hull(&pts).unwrap();
        for v in hull.vertices() {
            assert!(v.norm() <= 1.0 + 1e-12);
        }
        for p in &pts {
            let point = ConvexBody::new(vec![*p]).unwrap();
            assert!(separation_distance(&point, &hull) <= 1e-6);
        }
    }

    #[test]
    fn hull_is_idempotent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec3> = (0..200)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                )
            })
            .collect();
        let h1 = convex_hull(&pts).unwrap();
        let h2 = convex_hull(h1.vertices()).unwrap();
        let mut a = h1.vertices().to_vec();
        let mut b = h2.vertices().to_vec();
        let key = |v: &Vec3| (v.x.to_bits(), v.y.to_bits(), v.z.to_bits());
        a.sort_by_key(key);
        b.sort_by_key(key);
        assert_eq!(a, b);
    }
}
