//! Signed separation distance between convex bodies.
//!
//! Disjoint bodies report the minimum gap, overlapping bodies the (negated)
//! penetration depth along the minimal translation direction. Distance uses
//! iterative support-function separation; penetration uses a polytope
//! expansion seeded from the terminal simplex.

use super::{ConvexBody, Vec3};

const MAX_GJK_ITERS: usize = 128;
const MAX_EPA_ITERS: usize = 256;

/// Signed distance: positive gap for disjoint bodies, negative penetration
/// depth for overlapping ones, ~0 when touching.
pub fn separation_distance(a: &ConvexBody, b: &ConvexBody) -> f64 {
    let scale = body_scale(a).max(body_scale(b)).max(1.0);
    match gjk(a, b, scale) {
        GjkOutcome::Separated(d) => d,
        GjkOutcome::Intersecting(simplex) => -penetration_depth(a, b, simplex, scale),
    }
}

fn body_scale(body: &ConvexBody) -> f64 {
    body.vertices().iter().map(|v| v.amax()).fold(0.0, f64::max)
}

fn minkowski_support(a: &ConvexBody, b: &ConvexBody, dir: &Vec3) -> Vec3 {
    a.support_raw(dir) - b.support_raw(&-dir)
}

enum GjkOutcome {
    Separated(f64),
    Intersecting(Vec<Vec3>),
}

fn gjk(a: &ConvexBody, b: &ConvexBody, scale: f64) -> GjkOutcome {
    let zero_tol = 1e-12 * scale;
    let progress_tol = 1e-10 * scale;

    let mut dir = a.centroid() - b.centroid();
    if dir.norm_squared() < 1e-24 {
        dir = Vec3::x();
    }
    let mut simplex = vec![minkowski_support(a, b, &dir)];

    for _ in 0..MAX_GJK_ITERS {
        let (closest, subset) = closest_to_origin(&simplex);
        if closest.norm() <= zero_tol {
            return GjkOutcome::Intersecting(simplex);
        }
        simplex = subset;

        let w = minkowski_support(a, b, &-closest);
        let d = closest.norm();
        // Gap between the upper bound |v| and the support-plane lower bound
        // v.w/|v|; no gap means convergence.
        let gap = d - closest.dot(&w) / d;
        if gap <= progress_tol || contains_point(&simplex, &w) {
            return GjkOutcome::Separated(d);
        }
        simplex.push(w);
    }
    let (closest, _) = closest_to_origin(&simplex);
    GjkOutcome::Separated(closest.norm())
}

fn contains_point(set: &[Vec3], p: &Vec3) -> bool {
    set.iter().any(|v| (v - p).norm_squared() == 0.0)
}

/// Closest point to the origin on the convex hull of up to 4 points, plus the
/// minimal supporting subset. Subset enumeration with barycentric checks is
/// branch-free of the usual Johnson case analysis and handles degenerate
/// simplices by skipping rank-deficient subsets.
fn closest_to_origin(simplex: &[Vec3]) -> (Vec3, Vec<Vec3>) {
    let n = simplex.len();
    let mut best: Option<(f64, Vec3, Vec<Vec3>)> = None;
    let mut consider = |closest: Vec3, subset: Vec<Vec3>| {
        let d = closest.norm_squared();
        if best.as_ref().is_none_or(|(bd, _, _)| d < *bd) {
            best = Some((d, closest, subset));
        }
    };

    for i in 0..n {
        consider(simplex[i], vec![simplex[i]]);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(c) = closest_on_segment(&simplex[i], &simplex[j]) {
                consider(c, vec![simplex[i], simplex[j]]);
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if let Some(c) = closest_on_triangle(&simplex[i], &simplex[j], &simplex[k]) {
                    consider(c, vec![simplex[i], simplex[j], simplex[k]]);
                }
            }
        }
    }
    if n == 4 && origin_in_tetrahedron(simplex) {
        consider(Vec3::zeros(), simplex.to_vec());
    }

    let (_, closest, subset) = best.expect("nonempty simplex");
    (closest, subset)
}

/// Closest point to the origin strictly interior to segment ab, if any.
fn closest_on_segment(a: &Vec3, b: &Vec3) -> Option<Vec3> {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return None;
    }
    let t = -a.dot(&ab) / len2;
    if (0.0..=1.0).contains(&t) {
        Some(a + ab * t)
    } else {
        None
    }
}

/// Closest point to the origin on the plane of triangle abc, if its
/// barycentric coordinates are all nonnegative.
fn closest_on_triangle(a: &Vec3, b: &Vec3, c: &Vec3) -> Option<Vec3> {
    let ab = b - a;
    let ac = c - a;
    let d00 = ab.dot(&ab);
    let d01 = ab.dot(&ac);
    let d11 = ac.dot(&ac);
    let denom = d00 * d11 - d01 * d01;
    if denom.abs() < 1e-30 {
        return None;
    }
    let ap = -a;
    let d20 = ap.dot(&ab);
    let d21 = ap.dot(&ac);
    let v = (d11 * d20 - d01 * d21) / denom;
    let w = (d00 * d21 - d01 * d20) / denom;
    if v >= -1e-12 && w >= -1e-12 && v + w <= 1.0 + 1e-12 {
        Some(a + ab * v + ac * w)
    } else {
        None
    }
}

fn origin_in_tetrahedron(p: &[Vec3]) -> bool {
    let same_side = |a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3| {
        let n = (b - a).cross(&(c - a));
        let dd = n.dot(&(d - a));
        let do_ = n.dot(&-a);
        dd * do_ >= 0.0
    };
    same_side(&p[0], &p[1], &p[2], &p[3])
        && same_side(&p[1], &p[2], &p[3], &p[0])
        && same_side(&p[2], &p[3], &p[0], &p[1])
        && same_side(&p[3], &p[0], &p[1], &p[2])
}

struct EpaFace {
    verts: [usize; 3],
    normal: Vec3,
    offset: f64,
}

fn make_face(points: &[Vec3], verts: [usize; 3], interior: &Vec3) -> Option<EpaFace> {
    let [a, b, c] = verts;
    let mut normal = (points[b] - points[a]).cross(&(points[c] - points[a]));
    let norm = normal.norm();
    if norm < 1e-18 {
        return None;
    }
    normal /= norm;
    let mut verts = verts;
    if normal.dot(&(interior - points[a])) > 0.0 {
        normal = -normal;
        verts.swap(1, 2);
    }
    let offset = normal.dot(&points[a]);
    Some(EpaFace {
        verts,
        normal,
        offset,
    })
}

/// Penetration depth of overlapping bodies: distance from the origin to the
/// boundary of the Minkowski difference, expanded face by face. A difference
/// polytope that cannot span 3D (flat bodies touching in-plane) has zero
/// depth.
fn penetration_depth(a: &ConvexBody, b: &ConvexBody, simplex: Vec<Vec3>, scale: f64) -> f64 {
    let flat_tol = 1e-9 * scale;
    let Some(mut points) = tetrahedron_seed(a, b, simplex, flat_tol) else {
        return 0.0;
    };
    let interior = (points[0] + points[1] + points[2] + points[3]) / 4.0;

    let mut faces: Vec<EpaFace> = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
        .iter()
        .filter_map(|&v| make_face(&points, v, &interior))
        .collect();
    if faces.len() < 4 {
        return 0.0;
    }

    for _ in 0..MAX_EPA_ITERS {
        let (fi, depth) = faces
            .iter()
            .enumerate()
            .map(|(i, f)| (i, f.offset.max(0.0)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("faces nonempty");
        let normal = faces[fi].normal;
        let w = minkowski_support(a, b, &normal);
        if normal.dot(&w) - depth <= 1e-9 * scale || contains_point(&points, &w) {
            return depth;
        }
        points.push(w);
        let wi = points.len() - 1;

        let mut edges: Vec<(usize, usize)> = Vec::new();
        faces.retain(|f| {
            if f.normal.dot(&w) > f.offset + 1e-12 * scale {
                let [x, y, z] = f.verts;
                edges.push((x, y));
                edges.push((y, z));
                edges.push((z, x));
                false
            } else {
                true
            }
        });
        for &(x, y) in &edges {
            if !edges.contains(&(y, x)) {
                if let Some(face) = make_face(&points, [x, y, wi], &interior) {
                    faces.push(face);
                }
            }
        }
        if faces.is_empty() {
            return 0.0;
        }
    }
    faces
        .iter()
        .map(|f| f.offset.max(0.0))
        .fold(f64::INFINITY, f64::min)
}

/// Grows the terminal simplex into a non-degenerate tetrahedron of
/// Minkowski-difference support points, or reports the difference flat.
fn tetrahedron_seed(
    a: &ConvexBody,
    b: &ConvexBody,
    mut simplex: Vec<Vec3>,
    flat_tol: f64,
) -> Option<Vec<Vec3>> {
    dedup_close(&mut simplex, flat_tol);

    if simplex.len() == 1 {
        for dir in [Vec3::x(), Vec3::y(), Vec3::z(), -Vec3::x(), -Vec3::y(), -Vec3::z()] {
            let w = minkowski_support(a, b, &dir);
            if (w - simplex[0]).norm() > flat_tol {
                simplex.push(w);
                break;
            }
        }
        if simplex.len() == 1 {
            return None;
        }
    }

    if simplex.len() == 2 {
        let axis = (simplex[1] - simplex[0]).normalize();
        let perp = super::hull::pick_orthonormal(&axis);
        let perps = [perp, -perp, axis.cross(&perp), -(axis.cross(&perp))];
        for dir in perps {
            let w = minkowski_support(a, b, &dir);
            let d = w - simplex[0];
            if (d - axis * d.dot(&axis)).norm() > flat_tol {
                simplex.push(w);
                break;
            }
        }
        if simplex.len() == 2 {
            return None;
        }
    }

    if simplex.len() == 3 {
        let n = (simplex[1] - simplex[0])
            .cross(&(simplex[2] - simplex[0]))
            .normalize();
        for dir in [n, -n] {
            let w = minkowski_support(a, b, &dir);
            if (w - simplex[0]).dot(&n).abs() > flat_tol {
                simplex.push(w);
                break;
            }
        }
        if simplex.len() == 3 {
            return None;
        }
    }

    simplex.truncate(4);
    Some(simplex)
}

fn dedup_close(points: &mut Vec<Vec3>, tol: f64) {
    let mut out: Vec<Vec3> = Vec::with_capacity(points.len());
    for p in points.iter() {
        if !out.iter().any(|q| (q - p).norm() <= tol) {
            out.push(*p);
        }
    }
    *points = out;
}
