//! Free-boundary diagnostics: support of `u_q − u₀`, thin/regular
//! dichotomy through the thickness `δ_r` of the complement, and the
//! `z² + i z^μ` cusp example.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{thickness, Domain, Point};
use crate::grid::{Grid2, RealField};
use crate::incident::IncidentWave;

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(xy: &[(f64, f64)]) -> f64 {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff_distance(a: &[Point], b: &[Point]) -> f64 {
    let one_sided = |x: &[Point], y: &[Point]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p[0] - q[0]).hypot(p[1] - q[1])).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    one_sided(a, b).max(one_sided(b, a))
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TauPolicy {
    /// `τ = factor ×` the exterior noise floor.
    NoiseMultiple(f64),
    Fixed(f64),
}

impl Default for TauPolicy {
    fn default() -> Self {
        TauPolicy::NoiseMultiple(10.0)
    }
}

/// Grid nodes where `|u_q − u₀| > τ`.
#[derive(Debug, Clone)]
pub struct SupportIndicator {
    pub grid: Grid2,
    pub cells: Vec<bool>,
    /// Indicator nodes with a four-neighbour outside the indicator.
    pub boundary_cells: Vec<usize>,
    pub tau: f64,
    pub noise_floor: f64,
}

impl SupportIndicator {
    fn from_cells(grid: Grid2, cells: Vec<bool>, tau: f64, noise_floor: f64) -> Self {
        let mut boundary_cells = Vec::new();
        for k in 0..grid.len() {
            if !cells[k] {
                continue;
            }
            let (i, j) = grid.ij(k);
            let edge = grid.on_frame(i, j)
                || [grid.idx(i - 1, j), grid.idx(i + 1, j), grid.idx(i, j - 1), grid.idx(i, j + 1)]
                    .iter()
                    .any(|&l| !cells[l]);
            if edge {
                boundary_cells.push(k);
            }
        }
        SupportIndicator {
            grid,
            cells,
            boundary_cells,
            tau,
            noise_floor,
        }
    }

    /// Indicator of a known domain sampled at the nodes.
    pub fn from_domain(domain: &Domain, grid: &Grid2) -> Self {
        let cells = (0..grid.len()).map(|k| domain.inside(grid.point(k))).collect();
        SupportIndicator::from_cells(*grid, cells, 0.0, 0.0)
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Membership of the nearest node.
    pub fn contains(&self, p: Point) -> bool {
        let g = &self.grid;
        let s = g.spacing();
        let i = ((p[0] - g.origin[0]) / s).round();
        let j = ((p[1] - g.origin[1]) / s).round();
        if i < 0.0 || j < 0.0 || i >= g.n as f64 || j >= g.n as f64 {
            return false;
        }
        self.cells[g.idx(i as usize, j as usize)]
    }

    pub fn boundary_points(&self) -> Vec<Point> {
        self.boundary_cells.iter().map(|&k| self.grid.point(k)).collect()
    }

    pub fn boundary_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in self.boundary_points() {
            let _ = writeln!(out, "{},{}", p[0], p[1]);
        }
        out
    }
}

/// Threshold `|u_q − u₀|`. The noise floor is the median of `|u_q − u₀|`
/// over nodes farther than three cells from `D̄` when `domain` is given,
/// otherwise over the outer frame.
pub fn support_extract(
    uq: &RealField,
    u0: &RealField,
    domain: Option<&Domain>,
    policy: TauPolicy,
) -> Result<SupportIndicator> {
    let g = uq.grid;
    if u0.grid != g {
        return invalid("u_q and u0 live on different grids");
    }
    let diff: Vec<f64> = uq.values.iter().zip(&u0.values).map(|(a, b)| (a - b).abs()).collect();
    let s = g.spacing();
    let exterior: Vec<f64> = (0..g.len())
        .filter(|&k| match domain {
            Some(d) => d.signed_depth(g.point(k)) < -3.0 * s,
            None => {
                let (i, j) = g.ij(k);
                g.on_frame(i, j)
            }
        })
        .map(|k| diff[k])
        .collect();
    let noise = median(exterior);
    let tau = match policy {
        TauPolicy::NoiseMultiple(f) => f * noise,
        TauPolicy::Fixed(t) => t,
    };
    let raw: Vec<bool> = diff.iter().map(|&d| d > tau).collect();
    if !raw.iter().any(|&c| c) {
        return Err(Error::EmptySupport);
    }
    Ok(SupportIndicator::from_cells(g, fill_holes(&g, &raw), tau, noise))
}

/// Add every node not connected to the frame through non-indicator nodes.
/// Nodal lines of `u_q − u₀` inside the support open into bands of width
/// `~τ/|∇u|` under thresholding; the support itself is closed.
pub fn fill_holes(g: &Grid2, cells: &[bool]) -> Vec<bool> {
    let mut outside = vec![false; g.len()];
    let mut stack: Vec<usize> = (0..g.len())
        .filter(|&k| {
            let (i, j) = g.ij(k);
            g.on_frame(i, j) && !cells[k]
        })
        .collect();
    for &k in &stack {
        outside[k] = true;
    }
    while let Some(k) = stack.pop() {
        let (i, j) = g.ij(k);
        let mut nb = Vec::with_capacity(4);
        if i > 0 {
            nb.push(g.idx(i - 1, j));
        }
        if i + 1 < g.n {
            nb.push(g.idx(i + 1, j));
        }
        if j > 0 {
            nb.push(g.idx(i, j - 1));
        }
        if j + 1 < g.n {
            nb.push(g.idx(i, j + 1));
        }
        for l in nb {
            if !cells[l] && !outside[l] {
                outside[l] = true;
                stack.push(l);
            }
        }
    }
    outside.iter().map(|&o| !o).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    RegularLike,
    Thin,
    Inconclusive,
}

/// Calibration constants of the verdict rule (chosen on the disk and
/// `γ = 2` fixtures).
pub const REGULAR_MIN_DELTA: f64 = 0.2;
pub const THIN_MIN_SLOPE: f64 = 0.5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub point: Point,
    /// Resolvable radii, largest first.
    pub radii: Vec<f64>,
    pub deltas: Vec<f64>,
    pub error_bounds: Vec<f64>,
    pub verdict: Verdict,
    /// Log-log slope of `δ_r` against `r`.
    pub exponent: Option<f64>,
    pub regular_min_delta: f64,
    pub thin_min_slope: f64,
    pub note: String,
}

/// Thickness of the complement of `{member}` around `x0` over `radii`.
/// Radii below `4·resolution` are not resolvable.
pub fn dichotomy_diagnose(
    member: &(dyn Fn(Point) -> bool + Sync),
    x0: Point,
    radii: &[f64],
    resolution: f64,
    samples: usize,
) -> Result<DichotomyReport> {
    let mut rs: Vec<f64> = radii.iter().copied().filter(|&r| r >= 4.0 * resolution).collect();
    rs.sort_by(|a, b| b.total_cmp(a));
    let mut deltas = Vec::with_capacity(rs.len());
    let mut bounds = Vec::with_capacity(rs.len());
    for &r in &rs {
        let t = thickness(|p| !member(p), x0, r, samples)?;
        deltas.push(t.delta);
        bounds.push(t.error_bound);
    }
    let mut report = DichotomyReport {
        point: x0,
        radii: rs.clone(),
        deltas: deltas.clone(),
        error_bounds: bounds,
        verdict: Verdict::Inconclusive,
        exponent: None,
        regular_min_delta: REGULAR_MIN_DELTA,
        thin_min_slope: THIN_MIN_SLOPE,
        note: String::new(),
    };
    if rs.len() < 3 {
        report.note = format!("only {} resolvable radii", rs.len());
        return Ok(report);
    }
    let positive = deltas.iter().all(|&d| d > 0.0);
    let slope = if positive {
        let pts: Vec<(f64, f64)> = rs.iter().zip(&deltas).map(|(r, d)| (r.ln(), d.ln())).collect();
        Some(fit_slope(&pts))
    } else {
        None
    };
    report.exponent = slope;
    let decreasing = deltas.windows(2).all(|w| w[1] < w[0]);
    let smallest_three = deltas[deltas.len() - 3..].iter().cloned().fold(f64::INFINITY, f64::min);
    if decreasing && slope.is_some_and(|s| s >= THIN_MIN_SLOPE) {
        report.verdict = Verdict::Thin;
        report.note = "delta_r decreases monotonically with a power-law fit".into();
    } else if smallest_three >= REGULAR_MIN_DELTA {
        report.verdict = Verdict::RegularLike;
        report.note = format!("min delta_r over the three smallest radii = {smallest_three:.3}");
    } else {
        report.note = format!(
            "neither rule applies (monotone: {decreasing}, min of three smallest {smallest_three:.3})"
        );
    }
    Ok(report)
}

/// `f(z) = z² + i z^μ`.
pub fn kn_map(mu: u32, z: (f64, f64)) -> Point {
    let (x, y) = z;
    let mut pr = 1.0;
    let mut pi = 0.0;
    for _ in 0..mu {
        let t = pr * x - pi * y;
        pi = pr * y + pi * x;
        pr = t;
    }
    [x * x - y * y - pi, 2.0 * x * y + pr]
}

/// Leading terms `x₂² − (2/(1+μ/2)) ρ^{1+μ/2} sin((1+μ/2)θ)`.
pub fn kn_field(mu: u32, p: Point) -> f64 {
    let a = 1.0 + 0.5 * mu as f64;
    let rho = p[0].hypot(p[1]);
    let th = p[1].atan2(p[0]);
    p[1] * p[1] - 2.0 / a * rho.powf(a) * (a * th).sin()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnCusp {
    pub mu: u32,
    /// Image of the boundary of the upper half unit disk (segment, then arc).
    pub boundary: Vec<Point>,
    pub upper_curve: Vec<Point>,
    pub lower_curve: Vec<Point>,
    /// Log-log exponents of `|x₂|` against `x₁` on the two branches near 0.
    pub upper_exponent: f64,
    pub lower_exponent: f64,
    /// `max |x₂ ∓ x₁^{μ/2}| / x₁^{μ/2}` over the sampled boundary near 0.
    pub max_relative_deviation: f64,
    /// Parameter bound defining "near 0".
    pub near: f64,
}

pub const KN_NEAR: f64 = 0.05;

/// Sample the example for `μ ∈ {3, 5, 7}`.
pub fn kn_cusp_example(mu: u32, samples: usize) -> Result<KnCusp> {
    if mu % 2 == 0 {
        return invalid(format!("mu must be odd, got {mu}"));
    }
    if !(3..=7).contains(&mu) {
        return invalid(format!("mu must be 3, 5 or 7, got {mu}"));
    }
    if samples < 16 {
        return invalid("need at least 16 samples");
    }
    let mut boundary = Vec::with_capacity(2 * samples);
    // segment t ∈ [−1, 1], denser near 0
    for k in 0..=samples {
        let u = 2.0 * k as f64 / samples as f64 - 1.0;
        let t = u.signum() * u.abs().powi(3);
        boundary.push(kn_map(mu, (t, 0.0)));
    }
    for k in 1..samples {
        let th = std::f64::consts::PI * k as f64 / samples as f64;
        boundary.push(kn_map(mu, (th.cos(), th.sin())));
    }
    let e = 0.5 * mu as f64;
    let curve = |sign: f64| -> Vec<Point> {
        (0..=samples)
            .map(|k| {
                let x1 = k as f64 / samples as f64;
                [x1, sign * x1.powf(e)]
            })
            .collect()
    };
    let seg = &boundary[..=samples];
    let near: Vec<(Point, f64)> = seg
        .iter()
        .filter(|p| p[0] > 0.0 && p[0] <= KN_NEAR * KN_NEAR)
        .map(|&p| (p, p[1].signum()))
        .collect();
    let mut dev: f64 = 0.0;
    let (mut up, mut lo) = (Vec::new(), Vec::new());
    for (p, sgn) in &near {
        let c = p[0].powf(e);
        dev = dev.max((p[1] - sgn * c).abs() / c);
        let pt = (p[0].ln(), p[1].abs().ln());
        if *sgn > 0.0 {
            up.push(pt);
        } else {
            lo.push(pt);
        }
    }
    if up.len() < 2 || lo.len() < 2 {
        return invalid("too few samples near the cusp");
    }
    Ok(KnCusp {
        mu,
        boundary,
        upper_curve: curve(1.0),
        lower_curve: curve(-1.0),
        upper_exponent: fit_slope(&up),
        lower_exponent: fit_slope(&lo),
        max_relative_deviation: dev,
        near: KN_NEAR,
    })
}

impl KnCusp {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("set,x1,x2\n");
        for (name, pts) in [
            ("boundary", &self.boundary),
            ("upper", &self.upper_curve),
            ("lower", &self.lower_curve),
        ] {
            for p in pts {
                let _ = writeln!(out, "{name},{},{}", p[0], p[1]);
            }
        }
        out
    }

    pub fn to_svg(&self) -> String {
        curves_svg(&[
            (&self.boundary, "#1f4e9c"),
            (&self.upper_curve, "#c0392b"),
            (&self.lower_curve, "#c0392b"),
        ])
    }
}

/// Overlay of point sets as polylines, fitted to a 400×400 viewport.
pub fn curves_svg(sets: &[(&[Point], &str)]) -> String {
    let all = sets.iter().flat_map(|s| s.0.iter());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
    let sc = 380.0 / span;
    let mut body = String::new();
    for (pts, color) in sets {
        let mut d = String::new();
        for p in pts.iter() {
            let _ = write!(d, "{:.3},{:.3} ", 10.0 + sc * (p[0] - lo[0]), 390.0 - sc * (p[1] - lo[1]));
        }
        let _ = writeln!(
            body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1\"/>",
            d.trim_end()
        );
    }
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"400\" height=\"400\">\n{body}</svg>\n"
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradientCondition {
    pub min_abs_u: f64,
    pub min_abs_u_at: Point,
    pub min_abs_grad: f64,
    pub min_abs_grad_at: Point,
    pub lambda: f64,
}

/// Boundary minima of `|u₀|` and `|∇u₀|` over 1024 nodes.
pub fn gradient_condition_check(u0: &dyn IncidentWave, domain: &Domain) -> Result<GradientCondition> {
    let nodes = domain.boundary_nodes(1024)?;
    let mut out = GradientCondition {
        min_abs_u: f64::INFINITY,
        min_abs_u_at: [0.0, 0.0],
        min_abs_grad: f64::INFINITY,
        min_abs_grad_at: [0.0, 0.0],
        lambda: u0.wavenumber(),
    };
    let mut any = false;
    for nd in nodes.iter() {
        let p = nd.point;
        let v = u0.value(p).abs();
        let g = u0.gradient(p);
        let gn = g[0].hypot(g[1]);
        any |= v != 0.0 || gn != 0.0;
        if v < out.min_abs_u {
            out.min_abs_u = v;
            out.min_abs_u_at = p;
        }
        if gn < out.min_abs_grad {
            out.min_abs_grad = gn;
            out.min_abs_grad_at = p;
        }
    }
    if !any {
        return invalid("u0 vanishes identically on the boundary");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incident::{AffineWave, RealHelmholtzExpansion};
    use crate::specialfun::{bessel_j, first_bessel_zero, BesselOrder};

    #[test]
    fn identical_fields_have_empty_support() {
        let g = Grid2::centered([0.0, 0.0], 1.0, 32).unwrap();
        let u = RealField::from_fn(g, |p| p[0] + 2.0);
        assert!(matches!(support_extract(&u, &u, None, TauPolicy::default()), Err(Error::EmptySupport)));
    }

    #[test]
    fn support_is_monotone_in_tau() {
        let g = Grid2::centered([0.0, 0.0], 1.0, 48).unwrap();
        let u0 = RealField::filled(g, 0.0);
        let u = RealField::from_fn(g, |p| (1.0 - p[0].hypot(p[1])).max(0.0).powi(2));
        let a = support_extract(&u, &u0, None, TauPolicy::Fixed(1e-3)).unwrap();
        let b = support_extract(&u, &u0, None, TauPolicy::Fixed(1e-2)).unwrap();
        assert!(b.count() < a.count());
        assert!((0..g.len()).all(|k| !b.cells[k] || a.cells[k]));
    }

    #[test]
    fn holes_are_filled_but_outside_stays_out() {
        let g = Grid2::centered([0.0, 0.0], 1.0, 41).unwrap();
        // annulus 0.3 < r < 0.7
        let cells: Vec<bool> = (0..g.len())
            .map(|k| {
                let p = g.point(k);
                let r = p[0].hypot(p[1]);
                r > 0.3 && r < 0.7
            })
            .collect();
        let f = fill_holes(&g, &cells);
        assert!(f[g.idx(20, 20)]);
        assert!(!f[g.idx(1, 1)]);
        assert!((0..g.len()).all(|k| !cells[k] || f[k]));
    }

    #[test]
    fn disk_point_is_regular() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        let radii = [0.2, 0.1, 0.05, 0.025];
        let r = dichotomy_diagnose(&|p| d.inside(p), [1.0, 0.0], &radii, 0.0, 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::RegularLike);
        assert!(r.deltas.last().unwrap() > &0.9);
    }

    #[test]
    fn cusp_tip_is_thin() {
        let d = Domain::cusp_model(2.0, 1.0).unwrap();
        let radii = [0.1, 0.05, 0.025, 0.0125];
        let r = dichotomy_diagnose(&|p| d.inside(p), [0.0, 0.0], &radii, 0.0, 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::Thin);
        assert!((r.exponent.unwrap() - 1.0).abs() <= 0.1);
    }

    #[test]
    fn square_corner_is_regular() {
        let sq = Domain::square([0.0, 0.0], 1.0).unwrap();
        let radii = [0.2, 0.1, 0.05, 0.025];
        let r = dichotomy_diagnose(&|p| sq.inside(p), [0.5, 0.5], &radii, 0.0, 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::RegularLike);
        assert!(r.deltas.iter().all(|&d| d >= 0.29), "{:?}", r.deltas);
    }

    #[test]
    fn too_few_radii_is_inconclusive() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        let r = dichotomy_diagnose(&|p| d.inside(p), [1.0, 0.0], &[0.2, 0.1, 0.05], 0.02, 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn verdict_survives_refinement() {
        for (d, x0, expect) in [
            (Domain::disk([0.0, 0.0], 1.0).unwrap(), [1.0, 0.0], Verdict::RegularLike),
            (Domain::cusp_model(2.0, 1.0).unwrap(), [0.0, 0.0], Verdict::Thin),
        ] {
            for n in [401, 801] {
                let g = Grid2::centered(x0, 0.25, n).unwrap();
                let ind = SupportIndicator::from_domain(&d, &g);
                let r = dichotomy_diagnose(&|p| ind.contains(p), x0, &[0.2, 0.1, 0.05, 0.025], g.spacing(), 10_000)
                    .unwrap();
                assert_eq!(r.verdict, expect, "n={n} {:?}", r.deltas);
            }
        }
    }

    #[test]
    fn kn_map_values() {
        assert_eq!(kn_map(3, (0.0, 0.0)), [0.0, 0.0]);
        let p = kn_map(3, (0.1, 0.0));
        assert!((p[0] - 0.01).abs() < 1e-15 && (p[1] - 0.001).abs() < 1e-15);
        // z = i: −1 + i·i³ = −1 + 1
        let q = kn_map(3, (0.0, 1.0));
        assert!((q[0] - 0.0).abs() < 1e-15 && q[1].abs() < 1e-15);
    }

    #[test]
    fn kn_cusp_geometry() {
        assert!(kn_cusp_example(4, 100).is_err());
        assert!(kn_cusp_example(9, 100).is_err());
        for mu in [3, 5, 7] {
            let ex = kn_cusp_example(mu, 400).unwrap();
            let e = 0.5 * mu as f64;
            assert!((ex.upper_exponent - e).abs() <= 0.1 * e);
            assert!((ex.lower_exponent - e).abs() <= 0.1 * e);
            assert!(ex.max_relative_deviation < 1e-12);
        }
        // the leading field vanishes to second order on the positive axis
        assert!(kn_field(3, [0.0, 0.0]).abs() < 1e-15);
    }

    #[test]
    fn gradient_condition_at_first_zero() {
        let c2 = first_bessel_zero(BesselOrder::Int(0)).unwrap();
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        let u0 = RealHelmholtzExpansion::radial(c2).unwrap();
        let gc = gradient_condition_check(&u0, &d).unwrap();
        assert!(gc.min_abs_u < 1e-12);
        let j1 = bessel_j(BesselOrder::Int(1), c2).unwrap().abs();
        assert!((gc.min_abs_grad - c2 * j1).abs() < 1e-9);
        assert!(gc.min_abs_grad > 0.5 * c2 * 0.519);
        let pos = AffineWave { constant: 2.0, slope: [1.0, 0.0] };
        assert!(gradient_condition_check(&pos, &d).unwrap().min_abs_u > 0.0);
        assert!(gradient_condition_check(&AffineWave::constant(0.0), &d).is_err());
    }
}
