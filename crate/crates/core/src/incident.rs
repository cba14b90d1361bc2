//! Entire Helmholtz solutions: Herglotz synthesis, real Fourier–Bessel
//! expansions, the interior solution `v = 1 + w`, least-squares Runge
//! fitting, zero-ball scans and the first-eigenfunction orthogonality check.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{BBox, Domain, Point};
use crate::grid::{Grid2, RealField};
use crate::linalg::BandMatrix;
use crate::specialfun::{bessel_j_seq, first_bessel_zero, j_derivative_from_seq, BesselOrder, MAX_ORDER};

/// A real incident field with known wavenumber, value and gradient.
pub trait IncidentWave: Sync {
    /// `λ` in `(Δ + λ²)u = 0`.
    fn wavenumber(&self) -> f64;
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
}

/// `c + g·x`: harmonic, so an incident wave at `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineWave {
    pub constant: f64,
    pub slope: [f64; 2],
}

impl AffineWave {
    pub fn constant(c: f64) -> Self {
        AffineWave {
            constant: c,
            slope: [0.0, 0.0],
        }
    }
}

impl IncidentWave for AffineWave {
    fn wavenumber(&self) -> f64 {
        0.0
    }
    fn value(&self, p: Point) -> f64 {
        self.constant + self.slope[0] * p[0] + self.slope[1] * p[1]
    }
    fn gradient(&self, _: Point) -> [f64; 2] {
        self.slope
    }
}

/// Density `f(φ) = Σ_{|m|≤M} f_m e^{imφ}` of a Herglotz wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HerglotzCoefficients {
    pub lambda: f64,
    /// `f_{-M}, ..., f_M`.
    pub coeffs: Vec<Complex64>,
    pub real: bool,
}

impl HerglotzCoefficients {
    pub fn new(lambda: f64, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if !(lambda > 0.0) {
            return invalid(format!("Herglotz wave needs lambda > 0, got {lambda}"));
        }
        if coeffs.len() % 2 == 0 {
            return invalid("coefficient list must have odd length 2M+1");
        }
        let c = HerglotzCoefficients { lambda, coeffs, real };
        if c.max_mode() > MAX_ORDER as usize {
            return invalid(format!("mode cutoff above {MAX_ORDER}"));
        }
        if real {
            let mm = c.max_mode() as i64;
            for m in -mm..=mm {
                let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                if (c.get(m) - sign * c.get(-m).conj()).norm() > 1e-12 * (1.0 + c.get(m).norm()) {
                    return invalid(format!("realness relation f_m = (-1)^m conj(f_-m) fails at m = {m}"));
                }
            }
        }
        Ok(c)
    }

    pub fn max_mode(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn get(&self, m: i64) -> Complex64 {
        self.coeffs[(m + self.max_mode() as i64) as usize]
    }
}

/// `Σ_m f_m 2π i^m J_m(λr) e^{imθ}` (Jacobi–Anger).
pub fn herglotz_eval(c: &HerglotzCoefficients, p: Point) -> Complex64 {
    let mm = c.max_mode();
    let r = p[0].hypot(p[1]);
    let th = p[1].atan2(p[0]);
    let j = bessel_j_seq(mm, c.lambda * r);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in -(mm as i64)..=(mm as i64) {
        let jm = if m < 0 && m % 2 != 0 {
            -j[m.unsigned_abs() as usize]
        } else {
            j[m.unsigned_abs() as usize]
        };
        acc += c.get(m) * Complex64::i().powi(m as i32) * jm * Complex64::from_polar(1.0, m as f64 * th);
    }
    2.0 * PI * acc
}

/// `u(r,θ) = Σ_{m≤M} (a_m cos mθ + b_m sin mθ) J_m(λr)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealHelmholtzExpansion {
    pub lambda: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl RealHelmholtzExpansion {
    pub fn new(lambda: f64, a: Vec<f64>, mut b: Vec<f64>) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return invalid(format!("expansion needs lambda > 0, got {lambda}"));
        }
        if a.is_empty() || a.len() != b.len() {
            return invalid("a and b must have equal, nonzero length");
        }
        if a.len() > MAX_ORDER as usize + 1 {
            return invalid(format!("mode cutoff above {MAX_ORDER}"));
        }
        b[0] = 0.0;
        Ok(RealHelmholtzExpansion { lambda, a, b })
    }

    /// `J_0(λr)`.
    pub fn radial(lambda: f64) -> Result<Self> {
        RealHelmholtzExpansion::new(lambda, vec![1.0], vec![0.0])
    }

    pub fn max_mode(&self) -> usize {
        self.a.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(&self.b).all(|&v| v == 0.0)
    }

    pub fn eval(&self, p: Point) -> f64 {
        let r = p[0].hypot(p[1]);
        let th = p[1].atan2(p[0]);
        let j = bessel_j_seq(self.max_mode(), self.lambda * r);
        (0..=self.max_mode())
            .map(|m| {
                let (s, c) = (m as f64 * th).sin_cos();
                (self.a[m] * c + self.b[m] * s) * j[m]
            })
            .sum()
    }

    pub fn gradient(&self, p: Point) -> [f64; 2] {
        let lam = self.lambda;
        let r = p[0].hypot(p[1]);
        let th = p[1].atan2(p[0]);
        let mm = self.max_mode();
        let j = bessel_j_seq(mm + 1, lam * r);
        let (mut ur, mut ut) = (0.0, 0.0);
        for m in 0..=mm {
            let (s, c) = (m as f64 * th).sin_cos();
            ur += lam * j_derivative_from_seq(&j, m) * (self.a[m] * c + self.b[m] * s);
            if m > 0 {
                // m J_m(λr)/r = λ (J_{m-1} + J_{m+1}) / 2
                ut += 0.5 * lam * (j[m - 1] + j[m + 1]) * (self.b[m] * c - self.a[m] * s);
            }
        }
        let (s, c) = th.sin_cos();
        [c * ur - s * ut, s * ur + c * ut]
    }

    /// Herglotz density reproducing the expansion:
    /// `f_{±m} = (a_m ∓ i b_m) (±1)^m / (4π i^{±m})`, `f_0 = a_0 / 2π`.
    pub fn to_herglotz(&self) -> Result<HerglotzCoefficients> {
        let mm = self.max_mode();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * mm + 1];
        coeffs[mm] = Complex64::new(self.a[0] / (2.0 * PI), 0.0);
        for m in 1..=mm {
            let im = Complex64::i().powi(m as i32);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[mm + m] = Complex64::new(self.a[m], -self.b[m]) / (4.0 * PI * im);
            coeffs[mm - m] = Complex64::new(self.a[m], self.b[m]) * sign * im / (4.0 * PI);
        }
        HerglotzCoefficients::new(self.lambda, coeffs, true)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let e: RealHelmholtzExpansion =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        RealHelmholtzExpansion::new(e.lambda, e.a, e.b)
    }
}

impl IncidentWave for RealHelmholtzExpansion {
    fn wavenumber(&self) -> f64 {
        self.lambda
    }
    fn value(&self, p: Point) -> f64 {
        self.eval(p)
    }
    fn gradient(&self, p: Point) -> [f64; 2] {
        RealHelmholtzExpansion::gradient(self, p)
    }
}

/// Output of [`interior_solution`].
#[derive(Debug, Clone)]
pub struct InteriorSolution {
    /// `v = 1 + w` inside `D`, `1` elsewhere.
    pub field: RealField,
    pub unknowns: usize,
    /// `‖A w − b‖_∞ / ‖b‖_∞` of the linear solve.
    pub residual: f64,
    /// Inverse-iteration estimate of the smallest `|eigenvalue|` of the
    /// discrete operator `Δ_h + λ²`.
    pub smallest_eigenvalue: f64,
}

/// Relative band around a discrete Dirichlet eigenvalue inside which
/// [`interior_solution`] refuses to solve: `|σ_min(Δ_h + λ²)| < band · λ²`.
pub const EIGEN_BAND: f64 = 1e-2;

/// Solve `(Δ + λ²)w = −λ²` in `D`, `w = 0` on `∂D`, with the five-point
/// stencil and Shortley–Weller boundary cuts, and return `v = 1 + w`.
pub fn interior_solution(domain: &Domain, lambda: f64, grid: &Grid2) -> Result<InteriorSolution> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return invalid(format!("lambda must be >= 0, got {lambda}"));
    }
    let n = grid.n;
    let s = grid.spacing();
    let mut index = vec![usize::MAX; grid.len()];
    let mut nodes = Vec::new();
    for k in 0..grid.len() {
        let (i, j) = grid.ij(k);
        if domain.inside(grid.point(k)) {
            if grid.on_frame(i, j) {
                return invalid("the domain must lie strictly inside the grid");
            }
            index[k] = nodes.len();
            nodes.push(k);
        }
    }
    let nu = nodes.len();
    if nu == 0 {
        return invalid("no grid nodes inside the domain");
    }
    // bandwidth from the vertical neighbours
    let mut bw = 1;
    for (row, &k) in nodes.iter().enumerate() {
        for nb in [k - n, k + n] {
            if index[nb] != usize::MAX {
                bw = bw.max(index[nb].abs_diff(row));
            }
        }
    }
    let lam2 = lambda * lambda;
    let mut a = BandMatrix::new(nu, bw, bw);
    let rhs = vec![-lam2; nu];
    let crossing = |p: Point, q: Point| -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if domain.inside([p[0] + mid * (q[0] - p[0]), p[1] + mid * (q[1] - p[1])]) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).max(1e-6)
    };
    for (row, &k) in nodes.iter().enumerate() {
        let p = grid.point(k);
        let mut diag = lam2;
        for (minus, plus) in [(k - 1, k + 1), (k - n, k + n)] {
            let arm = |nb: usize| -> (f64, Option<usize>) {
                if index[nb] != usize::MAX {
                    (s, Some(index[nb]))
                } else {
                    (crossing(p, grid.point(nb)) * s, None)
                }
            };
            let (hm, im) = arm(minus);
            let (hp, ip) = arm(plus);
            let c = 2.0 / (hm + hp);
            diag -= c * (1.0 / hm + 1.0 / hp);
            if let Some(col) = im {
                a.add(row, col, c / hm);
            }
            if let Some(col) = ip {
                a.add(row, col, c / hp);
            }
        }
        a.add(row, row, diag);
    }
    let a0 = a.clone();
    a.factor()?;
    let w = a.solve(&rhs);
    let aw = a0.matvec(&w);
    let bnorm = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = if bnorm == 0.0 {
        aw.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        aw.iter()
            .zip(&rhs)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            / bnorm
    };
    // inverse iteration for the eigenvalue nearest the shift
    let mut x: Vec<f64> = (0..nu).map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64).collect();
    let mut sigma = f64::INFINITY;
    for _ in 0..30 {
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nx);
        let y = a.solve(&x);
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        sigma = 1.0 / ny;
        x = y;
    }
    if lambda > 0.0 && sigma < EIGEN_BAND * lam2 {
        return Err(Error::EigenvalueProximity(format!(
            "lambda = {lambda} is within the detection band of a Dirichlet eigenvalue \
             (smallest |eigenvalue| of the shifted operator {sigma:.3e})"
        )));
    }
    let mut values = vec![1.0; grid.len()];
    for (row, &k) in nodes.iter().enumerate() {
        values[k] = 1.0 + w[row];
    }
    Ok(InteriorSolution {
        field: RealField {
            grid: *grid,
            values,
        },
        unknowns: nu,
        residual,
        smallest_eigenvalue: sigma,
    })
}

/// Collocation data for [`runge_fit`].
#[derive(Debug, Clone)]
pub struct FitTarget {
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    /// Which points are boundary nodes (for the positivity report).
    pub on_boundary: Vec<bool>,
}

/// Weight of boundary collocation points relative to interior grid points.
pub const BOUNDARY_WEIGHT: f64 = 10.0;

impl FitTarget {
    /// Interior grid nodes of `field` inside `domain` (weight 1) and
    /// `boundary_nodes` boundary nodes (weight [`BOUNDARY_WEIGHT`]) with
    /// bilinearly interpolated values.
    pub fn from_field(domain: &Domain, field: &RealField, boundary_nodes: usize) -> Result<Self> {
        let mut t = FitTarget {
            points: vec![],
            values: vec![],
            weights: vec![],
            on_boundary: vec![],
        };
        for k in 0..field.grid.len() {
            let p = field.grid.point(k);
            if domain.inside(p) {
                t.points.push(p);
                t.values.push(field.values[k]);
                t.weights.push(1.0);
                t.on_boundary.push(false);
            }
        }
        for nd in domain.boundary_nodes(boundary_nodes)?.iter() {
            let v = field
                .interpolate(nd.point)
                .ok_or_else(|| Error::InvalidArgument("boundary outside the field grid".into()))?;
            t.points.push(nd.point);
            t.values.push(v);
            t.weights.push(BOUNDARY_WEIGHT);
            t.on_boundary.push(true);
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub modes_requested: usize,
    pub modes_used: usize,
    pub notices: Vec<String>,
    /// `sqrt(Σ w |u − t|² / Σ w |t|²)`.
    pub residual: f64,
    pub boundary_min: f64,
    pub boundary_min_at: Point,
    pub positive_on_boundary: bool,
}

/// Columns below this fraction of the `J_0` column are dropped.
const TRIM_RATIO: f64 = 1e-15;

/// Weighted, optionally ridge-regularised least-squares fit of a real
/// Fourier–Bessel expansion with modes `0..=m_max` to the target.
pub fn runge_fit(
    target: &FitTarget,
    lambda: f64,
    m_max: usize,
    ridge: f64,
) -> Result<(RealHelmholtzExpansion, FitReport)> {
    if !(lambda > 0.0) {
        return invalid(format!("fit needs lambda > 0, got {lambda}"));
    }
    if !(ridge >= 0.0) {
        return invalid(format!("ridge must be >= 0, got {ridge}"));
    }
    if target.points.is_empty() {
        return invalid("empty fit target");
    }
    let m_req = m_max.min(MAX_ORDER as usize);
    let mut notices = Vec::new();
    if m_max > m_req {
        notices.push(format!("mode cutoff clipped to {m_req}"));
    }
    let rmax = target
        .points
        .iter()
        .map(|p| p[0].hypot(p[1]))
        .fold(0.0, f64::max);
    let jr = bessel_j_seq(m_req, lambda * rmax);
    let scale0 = bessel_j_seq(0, 0.0)[0];
    let mut m_used = m_req;
    while m_used > 0 && jr[m_used].abs() < TRIM_RATIO * scale0 {
        m_used -= 1;
    }
    if m_used < m_req {
        notices.push(format!(
            "modes above {m_used} trimmed: J_m(lambda r) below {TRIM_RATIO:e} of J_0 on the target"
        ));
    }
    // column layout: a_0, (a_m, b_m) for m = 1..=m_used
    let ncol = 2 * m_used + 1;
    let rows: Vec<Vec<f64>> = target
        .points
        .par_iter()
        .map(|p| {
            let r = p[0].hypot(p[1]);
            let th = p[1].atan2(p[0]);
            let j = bessel_j_seq(m_used, lambda * r);
            let mut row = vec![j[0]];
            for m in 1..=m_used {
                let (s, c) = (m as f64 * th).sin_cos();
                row.push(c * j[m]);
                row.push(s * j[m]);
            }
            row
        })
        .collect();
    let np = rows.len();
    let nr = if ridge > 0.0 { np + ncol } else { np };
    let mut a = DMatrix::zeros(nr, ncol);
    let mut b = DVector::zeros(nr);
    for (i, row) in rows.iter().enumerate() {
        let w = target.weights[i].sqrt();
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = w * v;
        }
        b[i] = w * target.values[i];
    }
    if ridge > 0.0 {
        for j in 0..ncol {
            a[(np + j, j)] = ridge.sqrt();
        }
    }
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-14 * svd.singular_values.max())
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut ca = vec![0.0; m_used + 1];
    let mut cb = vec![0.0; m_used + 1];
    ca[0] = x[0];
    for m in 1..=m_used {
        ca[m] = x[2 * m - 1];
        cb[m] = x[2 * m];
    }
    let e = RealHelmholtzExpansion::new(lambda, ca, cb)?;
    let (mut num, mut den) = (0.0, 0.0);
    let mut bmin = (f64::INFINITY, [0.0, 0.0]);
    for (i, row) in rows.iter().enumerate() {
        let u: f64 = row.iter().zip(x.iter()).map(|(r, c)| r * c).sum();
        let w = target.weights[i];
        num += w * (u - target.values[i]).powi(2);
        den += w * target.values[i].powi(2);
        if target.on_boundary[i] && u < bmin.0 {
            bmin = (u, target.points[i]);
        }
    }
    let residual = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    let report = FitReport {
        modes_requested: m_max,
        modes_used: m_used,
        notices,
        residual,
        boundary_min: bmin.0,
        boundary_min_at: bmin.1,
        positive_on_boundary: bmin.0 > 0.0,
    };
    Ok((e, report))
}

/// Does `u` take both signs on the closed ball `B(c, r)`? Sampled on
/// `rings` concentric circles with `8k` points on ring `k`, plus the centre.
pub fn ball_has_sign_change(u: &(impl Fn(Point) -> f64 + ?Sized), c: Point, r: f64, rings: usize) -> bool {
    let mut seen = [false, false];
    let mut see = |v: f64| {
        if v > 0.0 {
            seen[0] = true;
        } else if v < 0.0 {
            seen[1] = true;
        }
        seen[0] && seen[1]
    };
    if see(u(c)) {
        return true;
    }
    for k in 1..=rings {
        let rho = r * k as f64 / rings as f64;
        let m = 8 * k;
        for t in 0..m {
            let th = 2.0 * PI * t as f64 / m as f64;
            if see(u([c[0] + rho * th.cos(), c[1] + rho * th.sin()])) {
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiusVerdict {
    pub radius: f64,
    /// `radius · λ / c₂`.
    pub relative_radius: f64,
    pub balls: usize,
    pub sign_free_centers: Vec<Point>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroBallReport {
    pub lambda: f64,
    pub per_radius: Vec<RadiusVerdict>,
    /// Largest tested radius for which some ball has no sign change.
    pub largest_sign_free: Option<f64>,
}

/// Sample ball centres on a `centers × centers` lattice over `window` and
/// look for a sign change of `u` in every ball of each tested radius.
pub fn zero_ball_scan(
    u: impl Fn(Point) -> f64 + Sync,
    window: &BBox,
    centers: usize,
    lambda: f64,
    radii: &[f64],
    rings: usize,
) -> Result<ZeroBallReport> {
    if !(lambda > 0.0) || radii.iter().any(|&r| !(r > 0.0)) {
        return invalid("zero-ball scan needs lambda > 0 and positive radii");
    }
    if centers == 0 || rings == 0 {
        return invalid("need at least one centre and one ring");
    }
    let c2 = first_bessel_zero(BesselOrder::Int(0))?;
    let lattice: Vec<Point> = (0..centers * centers)
        .map(|k| {
            let (i, j) = (k % centers, k / centers);
            let t = |i: usize, lo: f64, hi: f64| {
                if centers == 1 {
                    0.5 * (lo + hi)
                } else {
                    lo + (hi - lo) * i as f64 / (centers - 1) as f64
                }
            };
            [t(i, window.min[0], window.max[0]), t(j, window.min[1], window.max[1])]
        })
        .collect();
    let per_radius: Vec<RadiusVerdict> = radii
        .iter()
        .map(|&r| {
            let flags: Vec<bool> = lattice
                .par_iter()
                .map(|&c| ball_has_sign_change(&u, c, r, rings))
                .collect();
            RadiusVerdict {
                radius: r,
                relative_radius: r * lambda / c2,
                balls: lattice.len(),
                sign_free_centers: lattice
                    .iter()
                    .zip(&flags)
                    .filter(|(_, &f)| !f)
                    .map(|(c, _)| *c)
                    .collect(),
            }
        })
        .collect();
    let largest_sign_free = per_radius
        .iter()
        .filter(|v| !v.sign_free_centers.is_empty())
        .map(|v| v.radius)
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    Ok(ZeroBallReport {
        lambda,
        per_radius,
        largest_sign_free,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    /// `∮ u₀ ∂_ν v dS` with `v = J_0(λ|x|)`.
    pub integral: f64,
    pub sign_changes: usize,
    pub boundary_min: f64,
    pub boundary_max: f64,
}

/// Boundary integral of `u₀ ∂_ν v` on the disk `B(0, R)` at its first
/// Dirichlet eigenvalue `λ = c₂/R`, and the sign-change count of `u₀`.
pub fn eigen_orthogonality_check(
    radius: f64,
    u0: &dyn IncidentWave,
    nodes: usize,
) -> Result<OrthogonalityReport> {
    if !(radius > 0.0) {
        return invalid(format!("radius must be positive, got {radius}"));
    }
    let lambda = first_bessel_zero(BesselOrder::Int(0))? / radius;
    if (u0.wavenumber() - lambda).abs() > 1e-12 * lambda {
        return invalid(format!(
            "incident wave has wavenumber {} but the first eigenvalue of the disk is {lambda}",
            u0.wavenumber()
        ));
    }
    let disk = Domain::disk([0.0, 0.0], radius)?;
    let bn = disk.boundary_nodes(nodes)?;
    let dv = -lambda * bessel_j_seq(1, lambda * radius)[1];
    let vals: Vec<f64> = bn.iter().map(|n| u0.value(n.point)).collect();
    let integral = vals
        .iter()
        .zip(bn.iter())
        .map(|(u, n)| u * dv * n.weight)
        .sum();
    let mut sign_changes = 0;
    for k in 0..vals.len() {
        let (a, b) = (vals[k], vals[(k + 1) % vals.len()]);
        if (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0) {
            sign_changes += 1;
        }
    }
    Ok(OrthogonalityReport {
        integral,
        sign_changes,
        boundary_min: vals.iter().cloned().fold(f64::INFINITY, f64::min),
        boundary_max: vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfun::bessel_j;

    fn quadrature(c: &HerglotzCoefficients, p: Point, nodes: usize) -> Complex64 {
        let mm = c.max_mode() as i64;
        let dphi = 2.0 * PI / nodes as f64;
        (0..nodes)
            .map(|k| {
                let phi = k as f64 * dphi;
                let f: Complex64 = (-mm..=mm)
                    .map(|m| c.get(m) * Complex64::from_polar(1.0, m as f64 * phi))
                    .sum();
                let phase = c.lambda * (p[0] * phi.cos() + p[1] * phi.sin());
                Complex64::from_polar(1.0, phase) * f * dphi
            })
            .sum()
    }

    #[test]
    fn expansion_to_herglotz_round_trip() {
        let u = RealHelmholtzExpansion::new(1.3, vec![0.5, -0.2, 0.7, 0.1], vec![0.0, 0.4, -0.3, 0.2]).unwrap();
        let h = u.to_herglotz().unwrap();
        for p in [[0.3, -0.2], [1.1, 0.9], [-2.0, 0.5]] {
            let v = herglotz_eval(&h, p);
            assert!((v.re - u.eval(p)).abs() < 1e-12 && v.im.abs() < 1e-12);
            assert!((v - quadrature(&h, p, 512)).norm() < 1e-10);
        }
    }

    #[test]
    fn herglotz_matches_circle_quadrature() {
        let c = HerglotzCoefficients::new(
            1.3,
            vec![
                Complex64::new(0.1, -0.2),
                Complex64::new(0.0, 0.5),
                Complex64::new(1.0, 0.0),
                Complex64::new(-0.3, 0.2),
                Complex64::new(0.05, 0.0),
            ],
            false,
        )
        .unwrap();
        for p in [[0.3, -1.2], [2.0, 0.5], [0.0, 0.0]] {
            assert!((herglotz_eval(&c, p) - quadrature(&c, p, 4096)).norm() < 1e-8);
        }
        let f0 = HerglotzCoefficients::new(2.0, vec![Complex64::new(1.0, 0.0)], true).unwrap();
        let p = [0.6, 0.8];
        let j0 = bessel_j(BesselOrder::Int(0), 2.0).unwrap();
        assert!((herglotz_eval(&f0, p) - 2.0 * PI * j0).norm() < 1e-12);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let f1 = HerglotzCoefficients::new(1.0, vec![zero, zero, one], false).unwrap();
        let j1 = bessel_j(BesselOrder::Int(1), 0.7).unwrap();
        assert!((herglotz_eval(&f1, [0.7, 0.0]) - Complex64::new(0.0, 2.0 * PI * j1)).norm() < 1e-12);
    }

    #[test]
    fn realness_relation() {
        let f = vec![
            Complex64::new(0.2, 0.1),
            Complex64::new(-0.4, 0.3),
            Complex64::new(0.7, 0.0),
            Complex64::new(0.4, 0.3),
            Complex64::new(0.2, -0.1),
        ];
        let c = HerglotzCoefficients::new(1.0, f.clone(), true).unwrap();
        for k in 0..50 {
            let p = [(k as f64 * 0.37).sin() * 3.0, (k as f64 * 0.71).cos() * 3.0];
            assert!(herglotz_eval(&c, p).im.abs() <= 1e-12);
        }
        let mut bad = f;
        bad[0] = Complex64::new(0.3, 0.1);
        assert!(HerglotzCoefficients::new(1.0, bad, true).is_err());
    }

    #[test]
    fn expansion_gradient_and_helmholtz_residual() {
        let e = RealHelmholtzExpansion::new(1.7, vec![0.5, -1.0, 0.3, 0.2], vec![0.0, 0.4, -0.6, 0.1]).unwrap();
        let h = 1e-5;
        for p in [[0.3, 0.4], [-1.1, 0.2], [0.0, 0.0], [2.0, -1.5]] {
            let g = e.gradient(p);
            let fx = (e.eval([p[0] + h, p[1]]) - e.eval([p[0] - h, p[1]])) / (2.0 * h);
            let fy = (e.eval([p[0], p[1] + h]) - e.eval([p[0], p[1] - h])) / (2.0 * h);
            assert!((g[0] - fx).abs() < 1e-6 && (g[1] - fy).abs() < 1e-6, "{p:?}");
        }
        let a1 = RealHelmholtzExpansion::new(2.0, vec![0.0, 3.0], vec![0.0, 0.0]).unwrap();
        let g = a1.gradient([0.0, 0.0]);
        assert!((g[0] - 3.0).abs() < 1e-14 && g[1].abs() < 1e-14);
        let mut res = vec![];
        for hh in [0.02, 0.01] {
            let p = [0.4, -0.3];
            let lap = (e.eval([p[0] + hh, p[1]]) + e.eval([p[0] - hh, p[1]]) + e.eval([p[0], p[1] + hh])
                + e.eval([p[0], p[1] - hh])
                - 4.0 * e.eval(p))
                / (hh * hh);
            res.push((lap + 1.7 * 1.7 * e.eval(p)).abs());
        }
        assert!(res[0] / res[1] > 3.5, "{res:?}");
        let back = RealHelmholtzExpansion::from_json(&e.to_json()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn interior_solution_on_the_unit_disk() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        let g = Grid2::centered([0.0, 0.0], 1.1, 128).unwrap();
        let v0 = interior_solution(&d, 0.0, &g).unwrap();
        assert!(v0.field.values.iter().all(|&v| v == 1.0));
        let v = interior_solution(&d, 1.0, &g).unwrap();
        let exact = 1.0 / bessel_j(BesselOrder::Int(0), 1.0).unwrap();
        let center = v.field.interpolate([0.0, 0.0]).unwrap();
        assert!((center - exact).abs() < 5e-3, "{center} {exact}");
        assert!(v.residual < 1e-10);
        let c2 = first_bessel_zero(BesselOrder::Int(0)).unwrap();
        assert!(matches!(interior_solution(&d, c2, &g), Err(Error::EigenvalueProximity(_))));
    }

    #[test]
    fn radial_target_is_recovered() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        let g = Grid2::centered([0.0, 0.0], 1.1, 48).unwrap();
        let field = RealField::from_fn(g, |p| bessel_j(BesselOrder::Int(0), 1.5 * p[0].hypot(p[1])).unwrap());
        let t = FitTarget::from_field(&d, &field, 64).unwrap();
        // exact target values at the boundary nodes
        let mut t = t;
        for (i, p) in t.points.iter().enumerate() {
            t.values[i] = bessel_j(BesselOrder::Int(0), 1.5 * p[0].hypot(p[1])).unwrap();
        }
        let (e, rep) = runge_fit(&t, 1.5, 6, 0.0).unwrap();
        assert!(rep.residual < 1e-10, "{rep:?}");
        assert!((e.a[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn modes_are_trimmed_when_columns_underflow() {
        let t = FitTarget {
            points: vec![[0.01, 0.0], [0.0, 0.01], [-0.01, 0.0]],
            values: vec![1.0, 1.0, 1.0],
            weights: vec![1.0; 3],
            on_boundary: vec![true; 3],
        };
        let (e, rep) = runge_fit(&t, 1.0, 40, 0.0).unwrap();
        assert!(rep.modes_used < 40 && !rep.notices.is_empty());
        assert_eq!(e.max_mode(), rep.modes_used);
    }

    #[test]
    fn zero_balls_for_the_radial_wave() {
        let c2 = first_bessel_zero(BesselOrder::Int(0)).unwrap();
        let lam = 2.0;
        let u = |p: Point| bessel_j(BesselOrder::Int(0), lam * p[0].hypot(p[1])).unwrap();
        let origin = BBox { min: [0.0, 0.0], max: [0.0, 0.0] };
        let rep = zero_ball_scan(u, &origin, 1, lam, &[0.9 * c2 / lam, 1.05 * c2 / lam], 24).unwrap();
        assert_eq!(rep.largest_sign_free, Some(0.9 * c2 / lam));
        // scale covariance: (λ, r) -> (λ/2, 2r)
        let u2 = |p: Point| bessel_j(BesselOrder::Int(0), 0.5 * lam * p[0].hypot(p[1])).unwrap();
        let rep2 = zero_ball_scan(u2, &origin, 1, lam / 2.0, &[1.8 * c2 / lam, 2.1 * c2 / lam], 24).unwrap();
        assert_eq!(rep2.largest_sign_free, Some(1.8 * c2 / lam));
    }

    #[test]
    fn orthogonality_on_the_first_eigenfunction() {
        let c2 = first_bessel_zero(BesselOrder::Int(0)).unwrap();
        // cos(λ x₁) = J_0 − 2J_2 cos 2θ + 2J_4 cos 4θ − ...
        let mut a = vec![0.0; 21];
        for k in 0..=10 {
            let m = 2 * k;
            a[m] = if k == 0 { 1.0 } else if k % 2 == 1 { -2.0 } else { 2.0 };
        }
        let e = RealHelmholtzExpansion::new(c2, a, vec![0.0; 21]).unwrap();
        assert!((e.eval([0.3, 0.2]) - (c2 * 0.3).cos()).abs() < 1e-12);
        let rep = eigen_orthogonality_check(1.0, &e, 720).unwrap();
        assert!(rep.integral.abs() < 1e-8, "{rep:?}");
        assert!(rep.sign_changes >= 2);
        assert!(eigen_orthogonality_check(1.0, &AffineWave::constant(1.0), 720).is_err());
    }
}
