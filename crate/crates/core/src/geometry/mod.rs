//! Planar domains: inside tests, boundary quadrature, area, distance to the
//! boundary, and the minimal-diameter / thickness machinery.

mod hull;
mod thickness;

pub use hull::{convex_hull, minimal_diameter};
pub use thickness::{thickness, ThicknessEstimate, MIN_THICKNESS_SAMPLES};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type Point = [f64; 2];

/// Polyline resolution used for smooth parametrized boundaries.
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 2048;

/// Description of a bounded planar domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainKind {
    Disk {
        center: Point,
        radius: f64,
    },
    Ellipse {
        center: Point,
        a: f64,
        b: f64,
    },
    /// Image of the unit disk under `f(w) = w + a w²`, shifted by `center`.
    ConformalImage {
        a: f64,
        #[serde(default)]
        center: Point,
        samples: usize,
    },
    /// Counterclockwise vertex list.
    Polygon {
        vertices: Vec<Point>,
    },
    /// `{x₂ < |x₁|^{1/γ}} ∩ B(0, window)`: an inward cusp at the origin.
    CuspModel {
        gamma: f64,
        window: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of(points: &[Point]) -> BBox {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        BBox { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point {
        [
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
        ]
    }
}

/// A validated domain with its cached boundary polyline.
#[derive(Debug, Clone)]
pub struct Domain {
    kind: DomainKind,
    boundary: Vec<Point>,
    bbox: BBox,
    diameter: f64,
}

/// One boundary quadrature node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub point: Point,
    /// Outward unit normal.
    pub normal: Point,
    pub weight: f64,
    /// Polygon corner; its normal is the average of the adjacent edges.
    pub corner: bool,
}

#[derive(Debug, Clone)]
pub struct BoundaryNodes {
    pub nodes: Vec<BoundaryNode>,
}

impl BoundaryNodes {
    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BoundaryNode> {
        self.nodes.iter()
    }
}

impl Domain {
    pub fn new(kind: DomainKind) -> Result<Domain> {
        let kind = match kind {
            DomainKind::Disk { radius, .. } if !(radius > 0.0) => {
                return invalid(format!("disk radius must be positive, got {radius}"))
            }
            DomainKind::Ellipse { a, b, .. } if !(a > 0.0 && b > 0.0) => {
                return invalid(format!("ellipse semi-axes must be positive, got {a}, {b}"))
            }
            DomainKind::ConformalImage { a, samples, .. } => {
                if !(a.abs() <= 0.5) {
                    return invalid(format!("w + a w^2 is univalent on the disk only for |a| <= 1/2, got {a}"));
                }
                if samples < 16 {
                    return invalid("conformal image needs at least 16 boundary samples");
                }
                kind
            }
            DomainKind::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return invalid("polygon needs at least 3 vertices");
                }
                let mut vertices = vertices;
                if signed_area(&vertices) < 0.0 {
                    vertices.reverse();
                }
                if signed_area(&vertices) == 0.0 {
                    return invalid("degenerate polygon");
                }
                DomainKind::Polygon { vertices }
            }
            DomainKind::CuspModel { gamma, window } => {
                if !(gamma > 1.0) || !(window > 0.0) {
                    return invalid(format!("cusp model needs gamma > 1 and window > 0, got {gamma}, {window}"));
                }
                kind
            }
            other => other,
        };
        let boundary = sample_boundary(&kind);
        let bbox = BBox::of(&boundary);
        let diameter = hull::diameter(&boundary);
        Ok(Domain {
            kind,
            boundary,
            bbox,
            diameter,
        })
    }

    pub fn disk(center: Point, radius: f64) -> Result<Domain> {
        Domain::new(DomainKind::Disk { center, radius })
    }

    pub fn ellipse(center: Point, a: f64, b: f64) -> Result<Domain> {
        Domain::new(DomainKind::Ellipse { center, a, b })
    }

    /// The cardioid-type image of the unit disk under `w + a w²`.
    pub fn conformal(a: f64) -> Result<Domain> {
        Domain::new(DomainKind::ConformalImage {
            a,
            center: [0.0, 0.0],
            samples: DEFAULT_BOUNDARY_SAMPLES,
        })
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Domain> {
        Domain::new(DomainKind::Polygon { vertices })
    }

    pub fn square(center: Point, side: f64) -> Result<Domain> {
        let h = 0.5 * side;
        Domain::polygon(vec![
            [center[0] - h, center[1] - h],
            [center[0] + h, center[1] - h],
            [center[0] + h, center[1] + h],
            [center[0] - h, center[1] + h],
        ])
    }

    pub fn cusp_model(gamma: f64, window: f64) -> Result<Domain> {
        Domain::new(DomainKind::CuspModel { gamma, window })
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn boundary_polyline(&self) -> &[Point] {
        &self.boundary
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    /// Largest distance between two boundary samples.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// The same domain moved by `shift`.
    pub fn translated(&self, shift: Point) -> Result<Domain> {
        let mv = |p: Point| [p[0] + shift[0], p[1] + shift[1]];
        let kind = match &self.kind {
            DomainKind::Disk { center, radius } => DomainKind::Disk {
                center: mv(*center),
                radius: *radius,
            },
            DomainKind::Ellipse { center, a, b } => DomainKind::Ellipse {
                center: mv(*center),
                a: *a,
                b: *b,
            },
            DomainKind::ConformalImage { a, center, samples } => DomainKind::ConformalImage {
                a: *a,
                center: mv(*center),
                samples: *samples,
            },
            DomainKind::Polygon { vertices } => DomainKind::Polygon {
                vertices: vertices.iter().map(|&v| mv(v)).collect(),
            },
            DomainKind::CuspModel { .. } => {
                return invalid("the cusp model is anchored at the origin")
            }
        };
        Domain::new(kind)
    }

    /// Membership in the open set. Points within ~1e-12 of the boundary may
    /// go either way.
    pub fn inside(&self, p: Point) -> bool {
        match &self.kind {
            DomainKind::Disk { center, radius } => {
                (p[0] - center[0]).hypot(p[1] - center[1]) < *radius
            }
            DomainKind::Ellipse { center, a, b } => {
                let x = (p[0] - center[0]) / a;
                let y = (p[1] - center[1]) / b;
                x * x + y * y < 1.0
            }
            DomainKind::ConformalImage { .. } | DomainKind::Polygon { .. } => {
                if !in_bbox(&self.bbox, p) {
                    return false;
                }
                winding_number(&self.boundary, p) != 0
            }
            DomainKind::CuspModel { gamma, window } => {
                p[0].hypot(p[1]) < *window && p[1] < p[0].abs().powf(1.0 / gamma)
            }
        }
    }

    /// Boundary point and derivatives at parameter `t ∈ [0, 2π)` for the
    /// smooth parametrized kinds: `(γ, γ', γ'')`.
    fn curve(&self, t: f64) -> Option<(Point, Point, Point)> {
        let (s, c) = t.sin_cos();
        match &self.kind {
            DomainKind::Disk { center, radius: r } => Some((
                [center[0] + r * c, center[1] + r * s],
                [-r * s, r * c],
                [-r * c, -r * s],
            )),
            DomainKind::Ellipse { center, a, b } => Some((
                [center[0] + a * c, center[1] + b * s],
                [-a * s, b * c],
                [-a * c, -b * s],
            )),
            DomainKind::ConformalImage { a, center, .. } => {
                let w = Complex64::from_polar(1.0, t);
                let iw = Complex64::i() * w;
                let z = w + a * w * w;
                let fp = 1.0 + 2.0 * a * w;
                let d1 = iw * fp;
                // d/dt (i w f'(w)) = -w f'(w) + i w f''(w) i w
                let d2 = -w * fp - 2.0 * a * w * w;
                Some((
                    [center[0] + z.re, center[1] + z.im],
                    [d1.re, d1.im],
                    [d2.re, d2.im],
                ))
            }
            _ => None,
        }
    }

    /// Quadrature nodes on the boundary, equispaced in the natural
    /// parameter (arclength for polygons and the cusp model).
    pub fn boundary_nodes(&self, m: usize) -> Result<BoundaryNodes> {
        if m < 16 {
            return invalid(format!("need at least 16 boundary nodes, got {m}"));
        }
        let nodes = match &self.kind {
            DomainKind::Polygon { vertices } => polygon_nodes(vertices, m),
            DomainKind::CuspModel { .. } => polyline_nodes(&self.boundary, m),
            kind => {
                // Half-step offset keeps nodes off the cusp of the a = 1/2
                // cardioid, where f' vanishes.
                let offset = if matches!(kind, DomainKind::ConformalImage { .. }) {
                    0.5
                } else {
                    0.0
                };
                let dt = 2.0 * PI / m as f64;
                (0..m)
                    .map(|k| {
                        let t = (k as f64 + offset) * dt;
                        let (p, d, _) = self.curve(t).expect("smooth kind");
                        let speed = d[0].hypot(d[1]);
                        BoundaryNode {
                            point: p,
                            normal: [d[1] / speed, -d[0] / speed],
                            weight: speed * dt,
                            corner: false,
                        }
                    })
                    .collect()
            }
        };
        Ok(BoundaryNodes { nodes })
    }

    /// Area. Smooth parametrized boundaries use the periodic trapezoidal
    /// rule for `½∮(x dy - y dx)`; polygonal boundaries the shoelace formula.
    pub fn area(&self) -> f64 {
        match &self.kind {
            DomainKind::Polygon { vertices } => signed_area(vertices),
            DomainKind::CuspModel { .. } => signed_area(&self.boundary),
            _ => {
                let m = 4096;
                let dt = 2.0 * PI / m as f64;
                (0..m)
                    .map(|k| {
                        let (p, d, _) = self.curve(k as f64 * dt).expect("smooth kind");
                        0.5 * (p[0] * d[1] - p[1] * d[0]) * dt
                    })
                    .sum()
            }
        }
    }

    /// Unsigned distance from `p` to the boundary. Smooth boundaries are
    /// projected with Newton's method on the parameter, so the result is
    /// smooth away from the medial axis.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match &self.kind {
            DomainKind::Disk { center, radius } => {
                ((p[0] - center[0]).hypot(p[1] - center[1]) - radius).abs()
            }
            DomainKind::Ellipse { .. } | DomainKind::ConformalImage { .. } => {
                let n = self.boundary.len();
                let (k, _) = nearest_vertex(&self.boundary, p);
                let mut t = 2.0 * PI * k as f64 / n as f64;
                let mut best = f64::INFINITY;
                for _ in 0..30 {
                    let (g, d1, d2) = self.curve(t).expect("smooth kind");
                    let e = [g[0] - p[0], g[1] - p[1]];
                    best = best.min(e[0].hypot(e[1]));
                    let f1 = e[0] * d1[0] + e[1] * d1[1];
                    let f2 = d1[0] * d1[0] + d1[1] * d1[1] + e[0] * d2[0] + e[1] * d2[1];
                    if f2 <= 0.0 {
                        break;
                    }
                    let step = f1 / f2;
                    t -= step.clamp(-0.1, 0.1);
                    if step.abs() < 1e-14 {
                        let (g, _, _) = self.curve(t).expect("smooth kind");
                        best = best.min((g[0] - p[0]).hypot(g[1] - p[1]));
                        break;
                    }
                }
                // Newton can stall near the cardioid cusp; fall back to the
                // polyline when it is clearly off.
                let poly = polyline_distance(&self.boundary, p);
                if best > poly + 1e-6 {
                    poly
                } else {
                    best
                }
            }
            _ => polyline_distance(&self.boundary, p),
        }
    }

    /// Distance to the boundary, positive inside and negative outside.
    pub fn signed_depth(&self, p: Point) -> f64 {
        let d = self.boundary_distance(p);
        if self.inside(p) {
            d
        } else {
            -d
        }
    }
}

fn in_bbox(b: &BBox, p: Point) -> bool {
    p[0] >= b.min[0] && p[0] <= b.max[0] && p[1] >= b.min[1] && p[1] <= b.max[1]
}

/// Shoelace area, positive for counterclockwise polylines.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

/// Winding number of the closed polyline around `p`.
pub fn winding_number(poly: &[Point], p: Point) -> i32 {
    let n = poly.len();
    let mut wn = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                wn += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn nearest_vertex(poly: &[Point], p: Point) -> (usize, f64) {
    poly.iter()
        .enumerate()
        .map(|(k, q)| (k, (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
}

pub fn segment_distance(a: Point, b: Point, p: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (ap[0] - t * ab[0]).hypot(ap[1] - t * ab[1])
}

pub fn polyline_distance(poly: &[Point], p: Point) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| segment_distance(poly[i], poly[(i + 1) % n], p))
        .fold(f64::INFINITY, f64::min)
}

fn sample_boundary(kind: &DomainKind) -> Vec<Point> {
    let smooth = |n: usize, f: &dyn Fn(f64) -> Point| -> Vec<Point> {
        (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect()
    };
    match kind {
        DomainKind::Disk { center, radius } => smooth(DEFAULT_BOUNDARY_SAMPLES, &|t| {
            [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
        }),
        DomainKind::Ellipse { center, a, b } => smooth(DEFAULT_BOUNDARY_SAMPLES, &|t| {
            [center[0] + a * t.cos(), center[1] + b * t.sin()]
        }),
        DomainKind::ConformalImage { a, center, samples } => smooth(*samples, &|t| {
            let w = Complex64::from_polar(1.0, t);
            let z = w + a * w * w;
            [center[0] + z.re, center[1] + z.im]
        }),
        DomainKind::Polygon { vertices } => vertices.clone(),
        DomainKind::CuspModel { gamma, window } => cusp_boundary(*gamma, *window, 1024),
    }
}

/// Counterclockwise boundary of `{x₂ < |x₁|^{1/γ}} ∩ B(0, R)`: the lower
/// arc from the left crossing to the right crossing, then the cusp curve
/// back through the origin.
fn cusp_boundary(gamma: f64, window: f64, n: usize) -> Vec<Point> {
    // crossing: x^2 + x^{2/γ} = R^2 for x > 0
    let g = |x: f64| x * x + x.powf(2.0 / gamma) - window * window;
    let mut lo = 0.0;
    let mut hi = window;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let xc = 0.5 * (lo + hi);
    let yc = xc.powf(1.0 / gamma);
    let theta_right = yc.atan2(xc);
    let theta_left = PI - theta_right;
    let mut pts = Vec::with_capacity(3 * n);
    // arc from theta_left going clockwise... counterclockwise orientation
    // traverses the lower arc from angle theta_left to theta_right + 2π.
    let span = theta_right + 2.0 * PI - theta_left;
    for k in 0..n {
        let t = theta_left + span * k as f64 / n as f64;
        pts.push([window * t.cos(), window * t.sin()]);
    }
    // right branch from (xc, yc) down to the origin, clustered at the tip
    for k in 0..n {
        let s = 1.0 - k as f64 / n as f64;
        let x = xc * s * s;
        pts.push([x, x.powf(1.0 / gamma)]);
    }
    for k in 0..n {
        let s = k as f64 / n as f64;
        let x = -xc * s * s;
        pts.push([x, x.abs().powf(1.0 / gamma)]);
    }
    pts
}

fn polygon_nodes(vertices: &[Point], m: usize) -> Vec<BoundaryNode> {
    let nv = vertices.len();
    let edges: Vec<(Point, Point, f64)> = (0..nv)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % nv];
            (a, b, (b[0] - a[0]).hypot(b[1] - a[1]))
        })
        .collect();
    let perimeter: f64 = edges.iter().map(|e| e.2).sum();
    let counts: Vec<usize> = edges
        .iter()
        .map(|e| ((e.2 / perimeter * m as f64).round() as usize).max(1))
        .collect();
    let normal = |a: Point, b: Point| {
        let l = (b[0] - a[0]).hypot(b[1] - a[1]);
        [(b[1] - a[1]) / l, -(b[0] - a[0]) / l]
    };
    let mut nodes = Vec::new();
    for i in 0..nv {
        let (a, b, len) = edges[i];
        let n_e = counts[i];
        let h = len / n_e as f64;
        let prev = (i + nv - 1) % nv;
        let h_prev = edges[prev].2 / counts[prev] as f64;
        let n_here = normal(a, b);
        let n_prev = normal(edges[prev].0, edges[prev].1);
        let avg = [n_here[0] + n_prev[0], n_here[1] + n_prev[1]];
        let l = avg[0].hypot(avg[1]);
        nodes.push(BoundaryNode {
            point: a,
            normal: [avg[0] / l, avg[1] / l],
            weight: 0.5 * (h + h_prev),
            corner: true,
        });
        for j in 1..n_e {
            let t = j as f64 / n_e as f64;
            nodes.push(BoundaryNode {
                point: [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
                normal: n_here,
                weight: h,
                corner: false,
            });
        }
    }
    nodes
}

/// Arclength-equispaced nodes on a closed counterclockwise polyline.
fn polyline_nodes(poly: &[Point], m: usize) -> Vec<BoundaryNode> {
    let n = poly.len();
    let seg: Vec<f64> = (0..n)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let total: f64 = seg.iter().sum();
    let h = total / m as f64;
    let mut nodes = Vec::with_capacity(m);
    let mut i = 0;
    let mut acc = 0.0;
    for k in 0..m {
        let target = (k as f64 + 0.5) * h;
        while acc + seg[i] < target && i + 1 < n {
            acc += seg[i];
            i += 1;
        }
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let t = ((target - acc) / seg[i]).clamp(0.0, 1.0);
        nodes.push(BoundaryNode {
            point: [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
            normal: [(b[1] - a[1]) / seg[i], -(b[0] - a[0]) / seg[i]],
            weight: h,
            corner: false,
        });
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_membership() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        assert!(d.inside([0.0, 0.0]));
        assert!(!d.inside([2.0, 0.0]));
    }

    #[test]
    fn cardioid_point_just_inside() {
        let d = Domain::conformal(0.5).unwrap();
        let w = Complex64::new(0.5, 0.0);
        let z = w + 0.5 * w * w;
        let fine = Domain::new(DomainKind::ConformalImage {
            a: 0.5,
            center: [0.0, 0.0],
            samples: 10 * DEFAULT_BOUNDARY_SAMPLES,
        })
        .unwrap();
        let p = [z.re, z.im];
        assert!(d.inside(p));
        assert_eq!(winding_number(fine.boundary_polyline(), p), 1);
        // a boundary point perturbed inward along the inward normal
        let nodes = d.boundary_nodes(64).unwrap();
        for n in nodes.iter() {
            let q = [n.point[0] - 1e-3 * n.normal[0], n.point[1] - 1e-3 * n.normal[1]];
            assert_eq!(d.inside(q), winding_number(fine.boundary_polyline(), q) != 0);
        }
    }

    #[test]
    fn boundary_weights() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        let nodes = d.boundary_nodes(100).unwrap();
        assert!((nodes.total_weight() - 2.0 * PI).abs() < 1e-12);
        for n in nodes.iter() {
            assert!((n.normal[0].hypot(n.normal[1]) - 1.0).abs() < 1e-12);
            assert!((n.weight - 2.0 * PI / 100.0).abs() < 1e-15);
        }
        let sq = Domain::square([0.5, 0.5], 1.0).unwrap();
        let nodes = sq.boundary_nodes(64).unwrap();
        assert_eq!(nodes.total_weight(), 4.0);
        assert_eq!(nodes.iter().filter(|n| n.corner).count(), 4);
        assert!(d.boundary_nodes(8).is_err());
    }

    #[test]
    fn ellipse_perimeter_self_convergence() {
        let e = Domain::ellipse([0.0, 0.0], 2.0, 1.0).unwrap();
        let reference = e.boundary_nodes(2048).unwrap().total_weight();
        let mut prev = f64::INFINITY;
        for m in [16, 32, 64] {
            let err = (e.boundary_nodes(m).unwrap().total_weight() - reference).abs();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-10);
        // Ramanujan's second approximation is accurate to ~1e-10 here.
        let (a, b): (f64, f64) = (2.0, 1.0);
        let h = ((a - b) / (a + b)).powi(2);
        let ram = PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()));
        assert!((reference - ram).abs() < 1e-6);
    }

    #[test]
    fn areas() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        assert!((d.area() - PI).abs() < 1e-6);
        let c = Domain::conformal(0.5).unwrap();
        assert!((c.area() - 1.5 * PI).abs() < 1e-5);
        // inscribed polygon: O(M^-2) deficit
        assert!((signed_area(c.boundary_polyline()) - 1.5 * PI).abs() < 1e-4);
        let sq = Domain::square([0.5, 0.5], 1.0).unwrap();
        assert_eq!(sq.area(), 1.0);
    }

    #[test]
    fn rejects_invalid_domains() {
        assert!(Domain::disk([0.0, 0.0], 0.0).is_err());
        assert!(Domain::conformal(0.6).is_err());
        assert!(Domain::cusp_model(1.0, 1.0).is_err());
        assert!(Domain::polygon(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn clockwise_polygon_is_reoriented() {
        let d = Domain::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(signed_area(d.boundary_polyline()) > 0.0);
        assert!(d.inside([0.5, 0.5]));
    }

    #[test]
    fn cusp_model_membership() {
        let d = Domain::cusp_model(2.0, 1.0).unwrap();
        assert!(d.inside([0.0, -0.5]));
        assert!(!d.inside([0.0, 0.1]));
        assert!(d.inside([0.25, 0.4]));
        assert!(!d.inside([0.25, 0.6]));
        // polyline is counterclockwise and agrees with the analytic test
        assert!(signed_area(d.boundary_polyline()) > 0.0);
        for &p in &[[0.1, -0.3], [0.5, 0.5], [-0.3, 0.2], [0.0, 0.9]] {
            assert_eq!(d.inside(p), winding_number(d.boundary_polyline(), p) != 0);
        }
    }

    #[test]
    fn distance_and_depth() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        assert!((d.signed_depth([0.5, 0.0]) - 0.5).abs() < 1e-15);
        assert!((d.signed_depth([1.5, 0.0]) + 0.5).abs() < 1e-15);
        let e = Domain::ellipse([0.0, 0.0], 2.0, 1.0).unwrap();
        assert!((e.boundary_distance([0.0, 0.5]) - 0.5).abs() < 1e-12);
        assert!((e.boundary_distance([0.0, 3.0]) - 2.0).abs() < 1e-12);
        assert!((e.boundary_distance([2.5, 0.0]) - 0.5).abs() < 1e-12);
        let c = Domain::conformal(0.5).unwrap();
        // the rightmost boundary point is f(1) = 1.5
        assert!((c.boundary_distance([1.2, 0.0]) - 0.3).abs() < 1e-9);
    }
}
