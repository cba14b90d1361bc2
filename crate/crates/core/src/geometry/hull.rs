use super::Point;

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull by the monotone chain, counterclockwise, without collinear
/// points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Minimal diameter: the smallest distance between two parallel lines that
/// enclose the cloud. A strip contains a set iff it contains its convex
/// hull, and the optimal strip is flush with a hull edge, so rotating
/// calipers over the hull edges give it exactly. Fewer than three
/// non-collinear points give 0.
pub fn minimal_diameter(cloud: &[Point]) -> f64 {
    let hull = convex_hull(cloud);
    let n = hull.len();
    if n < 3 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut j = 1;
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        // advance the antipodal pointer while the area keeps growing
        while cross(a, b, hull[(j + 1) % n]) > cross(a, b, hull[j]) {
            j = (j + 1) % n;
        }
        best = best.min(cross(a, b, hull[j]) / len);
    }
    best
}

/// Largest pairwise distance of the cloud (over its hull vertices).
pub fn diameter(points: &[Point]) -> f64 {
    let h = convex_hull(points);
    let mut best: f64 = 0.0;
    for (k, a) in h.iter().enumerate() {
        for b in &h[k + 1..] {
            best = best.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    best
}
