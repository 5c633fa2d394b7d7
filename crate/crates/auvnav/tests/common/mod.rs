//! Test-only oracles, independent of the library's distance implementation.
//!
//! Distances are computed by exhaustive feature enumeration: every vertex
//! triple of one body against every vertex triple of the other. Slow, but
//! covers all face/edge/vertex feature pairs of the hulls.

use auvnav::geometry::{ConvexBody, Vec3};

pub fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

pub fn segment_segment_distance(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= 1e-30 && e <= 1e-30 {
        return (p1 - p2).norm();
    }
    if a <= 1e-30 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= 1e-30 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut sv = if denom.abs() > 1e-30 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut tv = (b * sv + f) / e;
            if tv < 0.0 {
                tv = 0.0;
                sv = (-c / a).clamp(0.0, 1.0);
            } else if tv > 1.0 {
                tv = 1.0;
                sv = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = sv;
            t = tv;
        }
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

pub fn point_triangle_distance(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let n = (b - a).cross(&(c - a));
    if n.norm_squared() <= 1e-24 {
        return point_segment_distance(p, a, b)
            .min(point_segment_distance(p, b, c))
            .min(point_segment_distance(p, a, c));
    }
    // Project onto the plane; if the projection is inside, that is closest.
    let nn = n.normalize();
    let dist_plane = (p - a).dot(&nn);
    let proj = p - nn * dist_plane;
    let inside = {
        let area = |x: &Vec3, y: &Vec3, z: &Vec3| (y - x).cross(&(z - x)).dot(&nn);
        let w0 = area(&proj, b, c);
        let w1 = area(a, &proj, c);
        let w2 = area(a, b, &proj);
        let total = area(a, b, c);
        let sgn = total.signum();
        w0 * sgn >= -1e-12 && w1 * sgn >= -1e-12 && w2 * sgn >= -1e-12
    };
    if inside {
        dist_plane.abs()
    } else {
        point_segment_distance(p, a, b)
            .min(point_segment_distance(p, b, c))
            .min(point_segment_distance(p, a, c))
    }
}

pub fn triangle_triangle_distance(t1: &[Vec3; 3], t2: &[Vec3; 3]) -> f64 {
    let mut best = f64::INFINITY;
    let edges1 = [(0, 1), (1, 2), (2, 0)];
    for &(i, j) in &edges1 {
        for &(k, l) in &edges1 {
            best = best.min(segment_segment_distance(&t1[i], &t1[j], &t2[k], &t2[l]));
        }
    }
    for p in t1 {
        best = best.min(point_triangle_distance(p, &t2[0], &t2[1], &t2[2]));
    }
    for p in t2 {
        best = best.min(point_triangle_distance(p, &t1[0], &t1[1], &t1[2]));
    }
    best
}

/// All vertex triples, padding bodies with fewer than three vertices by
/// repetition (the distance primitives accept degenerate triangles).
fn triples(body: &ConvexBody) -> Vec<[Vec3; 3]> {
    let v = body.vertices();
    let n = v.len();
    match n {
        1 => vec![[v[0], v[0], v[0]]],
        2 => vec![[v[0], v[1], v[1]]],
        _ => {
            let mut out = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        out.push([v[i], v[j], v[k]]);
                    }
                }
            }
            out
        }
    }
}

/// Brute-force distance between disjoint convex bodies.
pub fn brute_force_distance(a: &ConvexBody, b: &ConvexBody) -> f64 {
    let ta = triples(a);
    let tb = triples(b);
    let mut best = f64::INFINITY;
    for x in &ta {
        for y in &tb {
            best = best.min(triangle_triangle_distance(x, y));
        }
    }
    best
}

/// Upper bound on the penetration depth of overlapping bodies via a dense
/// sweep of unit directions: min over u of h_A(u) + h_B(-u).
pub fn penetration_sweep(a: &ConvexBody, b: &ConvexBody, n_dirs: usize) -> f64 {
    let mut best = f64::INFINITY;
    let mut eval = |u: Vec3| {
        // h_C(u) = max_{a in A} u.a - min_{b in B} u.b
        let ha = a.support(&u).unwrap().dot(&u);
        let hb = b.support(&-u).unwrap().dot(&u);
        best = best.min(ha - hb);
    };
    // Fibonacci sphere plus the coordinate axes.
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    for i in 0..n_dirs {
        let y = 1.0 - 2.0 * (i as f64 + 0.5) / n_dirs as f64;
        let r = (1.0 - y * y).sqrt();
        let th = golden * i as f64;
        eval(Vec3::new(r * th.cos(), y, r * th.sin()));
    }
    for u in [Vec3::x(), Vec3::y(), Vec3::z(), -Vec3::x(), -Vec3::y(), -Vec3::z()] {
        eval(u);
    }
    best
}

/// Deterministic random convex polytope with at most `max_pts` generating
/// points inside a box of the given half extent, centered at `center`.
pub fn random_polytope(rng: &mut impl rand::Rng, center: Vec3, half: f64, max_pts: usize) -> ConvexBody {
    let n = rng.random_range(1..=max_pts);
    let pts: Vec<Vec3> = (0..n)
        .map(|_| {
            center
                + Vec3::new(
                    rng.random_range(-half..half),
                    rng.random_range(-half..half),
                    rng.random_range(-half..half),
                )
        })
        .collect();
    auvnav::geometry::convex_hull(&pts).unwrap()
}
