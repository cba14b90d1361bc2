//! Non-scattering contrasts by gluing: `v = ψ v₀ + (1 − ψ)` in `D`,
//! `h = −(Δ + λ²)v / v`. Three sources for the collar solution `v₀`:
//! per-mode radial integration on a disk, the modified potential of a
//! quadrature domain (`λ = 0`), and the incident wave itself (`h₀ = 0`).

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Domain, Point};
use crate::grid::{cell_fraction, Grid2, RealField};
use crate::incident::{IncidentWave, RealHelmholtzExpansion};
use crate::qdomain::{modified_potential, QuadratureMeasure};
use crate::specialfun::{bessel_j_seq, j_derivative_from_seq};

/// Smallest admissible value of `v` on `D̄`.
pub const MIN_V: f64 = 1e-8;

/// Quintic smoothstep in the collar coordinate `t = collar − depth`:
/// `ψ = 0` for `t ≤ t₀` (deep interior), `ψ = 1` for `t ≥ t₁` (near and
/// outside `∂D`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub collar: f64,
    pub t0: f64,
    pub t1: f64,
}

fn smooth(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        (
            t * t * t * (10.0 - 15.0 * t + 6.0 * t * t),
            30.0 * t * t * (1.0 - t) * (1.0 - t),
            60.0 * t * (1.0 - t) * (1.0 - 2.0 * t),
        )
    }
}

impl CutoffProfile {
    /// Defaults `t₀ = 0.5·collar`, `t₁ = 0.8·collar`.
    pub fn new(collar: f64) -> Result<Self> {
        CutoffProfile::with_params(collar, 0.5 * collar, 0.8 * collar)
    }

    pub fn with_params(collar: f64, t0: f64, t1: f64) -> Result<Self> {
        if !(collar > 0.0) || !(0.0 <= t0 && t0 < t1 && t1 < collar) {
            return invalid(format!(
                "cutoff needs 0 <= t0 < t1 < collar, got collar {collar}, t0 {t0}, t1 {t1}"
            ));
        }
        Ok(CutoffProfile { collar, t0, t1 })
    }

    /// `ψ` and its first two derivatives with respect to depth.
    pub fn eval(&self, depth: f64) -> (f64, f64, f64) {
        let w = self.t1 - self.t0;
        let (s, s1, s2) = smooth((self.collar - depth - self.t0) / w);
        (s, -s1 / w, s2 / (w * w))
    }

    /// Depth below which `ψ ≡ 1`.
    pub fn plateau_depth(&self) -> f64 {
        self.collar - self.t1
    }

    /// Depth beyond which `ψ ≡ 0`.
    pub fn core_depth(&self) -> f64 {
        self.collar - self.t0
    }
}

/// `ψ` sampled on a grid with its gradient and Laplacian.
#[derive(Debug, Clone)]
pub struct CutoffField {
    pub profile: CutoffProfile,
    pub depth: RealField,
    pub psi: RealField,
    pub grad: (RealField, RealField),
    pub lap: RealField,
}

impl CutoffField {
    /// Exact derivatives for the disk, where `depth = R − |x − c|`.
    pub fn disk(profile: CutoffProfile, center: Point, radius: f64, grid: &Grid2) -> Self {
        let parts: Vec<[f64; 5]> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let p = grid.point(k);
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                let r = dx.hypot(dy).max(1e-300);
                let depth = radius - r;
                let (psi, d1, d2) = profile.eval(depth);
                // ∇depth = −x̂, Δdepth = −1/r
                [depth, psi, -d1 * dx / r, -d1 * dy / r, d2 - d1 / r]
            })
            .collect();
        let f = |i: usize| RealField {
            grid: *grid,
            values: parts.iter().map(|v| v[i]).collect(),
        };
        CutoffField {
            profile,
            depth: f(0),
            psi: f(1),
            grad: (f(2), f(3)),
            lap: f(4),
        }
    }

    /// Any domain: `ψ` from the signed boundary distance at the nodes,
    /// derivatives by central differences and the five-point Laplacian.
    pub fn sampled(profile: CutoffProfile, domain: &Domain, grid: &Grid2) -> Self {
        let depth = RealField::from_fn(*grid, |p| domain.signed_depth(p));
        let psi = depth.map(|d| profile.eval(d).0);
        let grad = psi.gradient();
        let lap = psi.laplacian();
        CutoffField {
            profile,
            depth,
            psi,
            grad,
            lap,
        }
    }
}

/// Collar solution data at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollarSample {
    pub v0: f64,
    pub grad: [f64; 2],
    /// `(Δ + λ²) v₀`.
    pub helmholtz: f64,
    pub h0: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    /// Whether `|h| ≥ c > 0` is claimed near `∂D`.
    pub is_contrast: bool,
    /// Grid infimum of `|h|` over the `ψ ≡ 1` collar in `D̄`.
    pub inf_abs_h: f64,
    /// Lower bound the infimum is checked against, when one applies.
    pub bound: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone)]
pub struct ContrastField {
    pub lambda: f64,
    /// `h` in `D̄`, `ψ h₀` on the outer collar, `0` beyond it.
    pub h: RealField,
    /// Potential `q = h · (cell fraction of D)` used by the solvers.
    pub q: RealField,
    /// Nodes with depth in `[−collar, match_depth]` have a stencil inside
    /// the `ψ ≡ 1` plateau, where `h = h₀`.
    pub match_depth: f64,
    pub h0_match_error: f64,
    pub certificate: Certificate,
    /// `sup |(Δ_h + λ² + h) v|` over `D` minus a three-cell band at `∂D`.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContrastMetadata {
    pub lambda: f64,
    pub collar: f64,
    pub match_depth: f64,
    pub h0_match_error: f64,
    pub residual: f64,
    pub certificate: Certificate,
}

impl ContrastField {
    pub fn to_csv(&self) -> String {
        let g = self.h.grid;
        let mut out = String::from("x,y,h\n");
        for k in 0..g.len() {
            let p = g.point(k);
            let _ = writeln!(out, "{},{},{}", p[0], p[1], self.h.values[k]);
        }
        out
    }

    pub fn metadata(&self, collar: f64) -> ContrastMetadata {
        ContrastMetadata {
            lambda: self.lambda,
            collar,
            match_depth: self.match_depth,
            h0_match_error: self.h0_match_error,
            residual: self.residual,
            certificate: self.certificate.clone(),
        }
    }
}

/// Result of a glue construction.
#[derive(Debug, Clone)]
pub struct Construction {
    pub contrast: ContrastField,
    /// `v` in `D̄` (`u₀` outside).
    pub v: RealField,
    /// Cell fractions of `D`.
    pub fraction: RealField,
}

/// Glue `v = ψ v₀ + (1 − ψ)` and read off `h = −(Δ + λ²)v / v` from
/// `(Δ+λ²)v = ψ(Δ+λ²)v₀ + 2∇ψ·∇v₀ + (v₀ − 1)Δψ + λ²(1 − ψ)`.
/// `collar(k, p)` is only queried where `ψ` or its derivatives are nonzero,
/// and at nodes outside `D` within the collar width.
pub fn glue_construction(
    domain: &Domain,
    lambda: f64,
    u0: &dyn IncidentWave,
    collar: &(dyn Fn(usize, Point) -> CollarSample + Sync),
    cutoff: &CutoffField,
    claim_contrast: bool,
) -> Result<Construction> {
    let grid = cutoff.psi.grid;
    let lam2 = lambda * lambda;
    let prof = cutoff.profile;
    let s = grid.spacing();
    let rows: Vec<(f64, f64, Option<f64>)> = (0..grid.len())
        .into_par_iter()
        .map(|k| -> Result<(f64, f64, Option<f64>)> {
            let p = grid.point(k);
            let depth = cutoff.depth.values[k];
            let psi = cutoff.psi.values[k];
            let (gx, gy) = (cutoff.grad.0.values[k], cutoff.grad.1.values[k]);
            let lp = cutoff.lap.values[k];
            if !domain.inside(p) {
                let h = if -depth <= prof.collar {
                    psi * collar(k, p).h0
                } else {
                    0.0
                };
                return Ok((h, u0.value(p), None));
            }
            let active = psi > 0.0 || gx != 0.0 || gy != 0.0 || lp != 0.0;
            let (v, lv, h0) = if active {
                let c = collar(k, p);
                let v = psi * c.v0 + (1.0 - psi);
                let lv = psi * c.helmholtz
                    + 2.0 * (gx * c.grad[0] + gy * c.grad[1])
                    + (c.v0 - 1.0) * lp
                    + lam2 * (1.0 - psi);
                (v, lv, Some(c.h0))
            } else {
                (1.0, lam2, None)
            };
            if !(v >= MIN_V) {
                return Err(Error::PositivityViolated(format!(
                    "v = {v:.3e} at ({:.4}, {:.4}); the collar solution must stay positive where ψ > 0",
                    p[0], p[1]
                )));
            }
            let in_plateau = depth <= prof.plateau_depth() - s;
            Ok((-lv / v, v, if in_plateau { h0 } else { None }))
        })
        .collect::<Result<_>>()?;
    let h = RealField {
        grid,
        values: rows.iter().map(|r| r.0).collect(),
    };
    let v = RealField {
        grid,
        values: rows.iter().map(|r| r.1).collect(),
    };
    let mut match_err: f64 = 0.0;
    let mut inf_h = f64::INFINITY;
    for r in rows.iter() {
        if let Some(h0) = r.2 {
            match_err = match_err.max((r.0 - h0).abs());
            inf_h = inf_h.min(r.0.abs());
        }
    }
    let fraction = cell_fraction(domain, &grid, 8);
    let q = h.zip_with(&fraction, |a, b| a * b);
    // discrete residual of (Δ + λ² + h) v away from ∂D
    let lapv = v.laplacian();
    let residual = (0..grid.len())
        .into_par_iter()
        .filter(|&k| {
            let (i, j) = grid.ij(k);
            !grid.on_frame(i, j) && cutoff.depth.values[k] > 3.0 * s
        })
        .map(|k| (lapv.values[k] + (lam2 + h.values[k]) * v.values[k]).abs())
        .reduce(|| 0.0, f64::max);
    let certificate = Certificate {
        is_contrast: claim_contrast && inf_h > 0.0 && inf_h.is_finite(),
        inf_abs_h: inf_h,
        bound: None,
        note: if claim_contrast {
            "h = h0 on the collar; |h| >= inf_abs_h there".into()
        } else {
            "not a contrast: h vanishes on the collar (h0 = 0)".into()
        },
    };
    Ok(Construction {
        contrast: ContrastField {
            lambda,
            h,
            q,
            match_depth: prof.plateau_depth() - s,
            h0_match_error: match_err,
            certificate,
            residual,
        },
        v,
        fraction,
    })
}

/// Per-mode collar solution on a disk: for each `m`,
/// `φ'' + φ'/r − (m²/r²)φ + (λ² + h₀(r))φ = 0` integrated inward from `R`
/// with `φ(R) = J_m(λR)`, `φ'(R) = λ J_m'(λR)` by classical RK4.
#[derive(Clone)]
pub struct RadialCollar {
    pub radius: f64,
    pub lambda: f64,
    pub depth: f64,
    step: f64,
    /// `(φ, φ', φ'')` per mode at `r_k = R − k·step`.
    tables: Vec<Vec<[f64; 3]>>,
    a: Vec<f64>,
    b: Vec<f64>,
    h0: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub report: RadialReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialReport {
    pub modes_requested: usize,
    pub modes_used: usize,
    /// Modes whose inward growth exceeded `1e6×` their boundary size.
    pub flagged: Vec<usize>,
    /// `max |v₀ − u₀|` and `max |∂_r v₀ − ∂_r u₀|` on `r = R`.
    pub value_mismatch: f64,
    pub slope_mismatch: f64,
    pub notices: Vec<String>,
}

const GROWTH_LIMIT: f64 = 1e6;

fn radial_rhs(m: usize, lam2: f64, h0: &dyn Fn(f64) -> f64, r: f64, y: [f64; 2]) -> [f64; 2] {
    let mm = (m * m) as f64;
    [y[1], -y[1] / r + (mm / (r * r) - lam2 - h0(r)) * y[0]]
}

/// Fixed-step RK4 for one mode from `R` down to `R − depth`.
/// Returns `(φ, φ')` at `R − k·depth/steps`.
pub fn integrate_mode(
    m: usize,
    lambda: f64,
    h0: &dyn Fn(f64) -> f64,
    radius: f64,
    depth: f64,
    steps: usize,
    start: [f64; 2],
) -> Vec<[f64; 2]> {
    let lam2 = lambda * lambda;
    let hstep = -depth / steps as f64;
    let mut y = start;
    let mut r = radius;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y);
    for _ in 0..steps {
        let f = |r: f64, y: [f64; 2]| radial_rhs(m, lam2, h0, r, y);
        let k1 = f(r, y);
        let k2 = f(r + 0.5 * hstep, [y[0] + 0.5 * hstep * k1[0], y[1] + 0.5 * hstep * k1[1]]);
        let k3 = f(r + 0.5 * hstep, [y[0] + 0.5 * hstep * k2[0], y[1] + 0.5 * hstep * k2[1]]);
        let k4 = f(r + hstep, [y[0] + hstep * k3[0], y[1] + hstep * k3[1]]);
        for i in 0..2 {
            y[i] += hstep / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        r += hstep;
        out.push(y);
    }
    out
}

/// Build the radial collar solution for the incident expansion `u0` on the
/// disk `B(0, R)`.
pub fn radial_cauchy_extension(
    radius: f64,
    lambda: f64,
    h0: impl Fn(f64) -> f64 + Send + Sync + 'static,
    u0: &RealHelmholtzExpansion,
    depth: f64,
    m_max: usize,
    steps: usize,
) -> Result<RadialCollar> {
    if !(radius > 0.0) || !(lambda > 0.0) {
        return invalid("radial extension needs R > 0 and lambda > 0");
    }
    if (u0.lambda - lambda).abs() > 1e-12 * lambda {
        return invalid("incident expansion has a different wavenumber");
    }
    if !(depth > 0.0) || depth > 0.3 * radius {
        return invalid(format!("collar depth must be in (0, 0.3R], got {depth}"));
    }
    if steps < 10 {
        return invalid("need at least 10 integration steps");
    }
    let h0: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(h0);
    let mut notices = Vec::new();
    let m_req = m_max.min(u0.max_mode());
    let j = bessel_j_seq(m_req + 1, lambda * radius);
    let weight = |m: usize| (u0.a[m].abs() + u0.b[m].abs()) * j[m].abs();
    let wmax = (0..=m_req).map(weight).fold(0.0, f64::max);
    let mut m_used = m_req;
    while m_used > 0 && weight(m_used) <= 1e-12 * wmax {
        m_used -= 1;
    }
    if m_used < m_req {
        notices.push(format!("modes above {m_used} dropped: negligible boundary data"));
    }
    let step = depth / steps as f64;
    let lam2 = lambda * lambda;
    let mut tables = Vec::new();
    let mut flagged = Vec::new();
    for m in 0..=m_used {
        let start = [j[m], lambda * j_derivative_from_seq(&j, m)];
        let sol = integrate_mode(m, lambda, &*h0, radius, depth, steps, start);
        let scale = start[0].abs().max(start[1].abs() / lambda).max(1e-300);
        let peak = sol.iter().map(|y| y[0].abs()).fold(0.0, f64::max);
        if peak > GROWTH_LIMIT * scale {
            flagged.push(m);
            break;
        }
        let table = sol
            .iter()
            .enumerate()
            .map(|(k, y)| {
                let r = radius - k as f64 * step;
                let d2 = radial_rhs(m, lam2, &*h0, r, *y)[1];
                [y[0], y[1], d2]
            })
            .collect();
        tables.push(table);
    }
    if !flagged.is_empty() {
        notices.push(format!(
            "mode {} grew beyond {GROWTH_LIMIT:e}x its boundary size; cutoff reduced to {}",
            flagged[0],
            tables.len().saturating_sub(1)
        ));
    }
    if tables.is_empty() {
        return Err(Error::PositivityViolated("no stable modes in the collar".into()));
    }
    let m_final = tables.len() - 1;
    let mut rc = RadialCollar {
        radius,
        lambda,
        depth,
        step,
        tables,
        a: u0.a[..=m_final].to_vec(),
        b: u0.b[..=m_final].to_vec(),
        h0,
        report: RadialReport {
            modes_requested: m_max,
            modes_used: m_final,
            flagged,
            value_mismatch: 0.0,
            slope_mismatch: 0.0,
            notices,
        },
    };
    let (mut dv, mut ds) = (0.0f64, 0.0f64);
    for k in 0..64 {
        let th = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
        let p = [radius * th.cos(), radius * th.sin()];
        let (v, g) = (rc.value(p)?, rc.gradient(p)?);
        let gu = u0.gradient(p);
        dv = dv.max((v - u0.eval(p)).abs());
        ds = ds.max(((g[0] - gu[0]) * th.cos() + (g[1] - gu[1]) * th.sin()).abs());
    }
    rc.report.value_mismatch = dv;
    rc.report.slope_mismatch = ds;
    Ok(rc)
}

impl RadialCollar {
    /// Cubic Hermite interpolation of `(φ, φ')` and `(φ', φ'')` at `r`.
    fn mode_at(&self, m: usize, r: f64) -> Result<(f64, f64)> {
        let t = (self.radius - r) / self.step;
        let n = self.tables[m].len() - 1;
        if t < -1e-9 || t > n as f64 + 1e-9 {
            return invalid(format!("radius {r} outside the collar"));
        }
        let k = (t.floor().max(0.0) as usize).min(n - 1);
        let u = (t - k as f64).clamp(0.0, 1.0);
        let (a, b) = (self.tables[m][k], self.tables[m][k + 1]);
        // parameter runs inward: d/dt = −step · d/dr
        let hs = -self.step;
        let h00 = 2.0 * u * u * u - 3.0 * u * u + 1.0;
        let h10 = u * u * u - 2.0 * u * u + u;
        let h01 = -2.0 * u * u * u + 3.0 * u * u;
        let h11 = u * u * u - u * u;
        let herm = |p0: f64, d0: f64, p1: f64, d1: f64| {
            h00 * p0 + h10 * hs * d0 + h01 * p1 + h11 * hs * d1
        };
        Ok((herm(a[0], a[1], b[0], b[1]), herm(a[1], a[2], b[1], b[2])))
    }

    pub fn h0(&self, r: f64) -> f64 {
        (self.h0)(r)
    }

    pub fn value(&self, p: Point) -> Result<f64> {
        let r = p[0].hypot(p[1]);
        let th = p[1].atan2(p[0]);
        let mut acc = 0.0;
        for m in 0..self.tables.len() {
            let (s, c) = (m as f64 * th).sin_cos();
            acc += self.mode_at(m, r)?.0 * (self.a[m] * c + self.b[m] * s);
        }
        Ok(acc)
    }

    pub fn gradient(&self, p: Point) -> Result<[f64; 2]> {
        let r = p[0].hypot(p[1]);
        let th = p[1].atan2(p[0]);
        let (mut ur, mut ut) = (0.0, 0.0);
        for m in 0..self.tables.len() {
            let (s, c) = (m as f64 * th).sin_cos();
            let (phi, dphi) = self.mode_at(m, r)?;
            ur += dphi * (self.a[m] * c + self.b[m] * s);
            ut += m as f64 * phi / r * (self.b[m] * c - self.a[m] * s);
        }
        let (s, c) = th.sin_cos();
        Ok([c * ur - s * ut, s * ur + c * ut])
    }

    /// Per-mode values `(φ_m, φ_m')` at `r` (for oracles and reports).
    pub fn mode(&self, m: usize, r: f64) -> Result<(f64, f64)> {
        if m >= self.tables.len() {
            return invalid(format!("mode {m} not integrated"));
        }
        self.mode_at(m, r)
    }
}

/// Contrast construction on the disk `B(0, R)` for `λ > 0`: radial collar
/// solution with prescribed `h₀`, glued with the analytic cutoff.
pub fn disk_radial_contrast(
    collar_solution: &RadialCollar,
    u0: &RealHelmholtzExpansion,
    profile: CutoffProfile,
    grid: &Grid2,
) -> Result<Construction> {
    let rc = collar_solution;
    if profile.core_depth() > rc.depth + 1e-12 {
        return invalid("cutoff transition reaches deeper than the integrated collar");
    }
    let domain = Domain::disk([0.0, 0.0], rc.radius)?;
    let cutoff = CutoffField::disk(profile, [0.0, 0.0], rc.radius, grid);
    let collar = |_: usize, p: Point| -> CollarSample {
        let r = p[0].hypot(p[1]);
        let h0 = rc.h0(r);
        if r >= rc.radius {
            return CollarSample {
                v0: u0.eval(p),
                grad: u0.gradient(p),
                helmholtz: 0.0,
                h0,
            };
        }
        let v0 = rc.value(p).expect("inside the collar");
        CollarSample {
            v0,
            grad: rc.gradient(p).expect("inside the collar"),
            helmholtz: -h0 * v0,
            h0,
        }
    };
    glue_construction(&domain, rc.lambda, u0, &collar, &cutoff, true)
}

/// Contrast for a quadrature domain at `λ = 0`: `v₀ = u + u₀` with the
/// modified potential `u`, `h₀ = −1/v₀`.
pub fn quadrature_contrast(
    domain: &Domain,
    mu: &QuadratureMeasure,
    u0: &dyn IncidentWave,
    profile: CutoffProfile,
    grid: &Grid2,
) -> Result<Construction> {
    if u0.wavenumber() != 0.0 {
        return invalid("quadrature contrasts are built for lambda = 0");
    }
    for nd in domain.boundary_nodes(512)?.iter() {
        let v = u0.value(nd.point);
        if !(v > 0.0) {
            return Err(Error::PositivityViolated(format!(
                "u0 = {v:.3e} <= 0 on the boundary at ({:.4}, {:.4})",
                nd.point[0], nd.point[1]
            )));
        }
    }
    let pot = modified_potential(domain, mu, grid)?;
    let reach = 3.0 * pot.collar;
    if profile.core_depth() >= reach {
        return invalid(format!(
            "cutoff transition (depth {}) reaches the measure support (distance {reach})",
            profile.core_depth()
        ));
    }
    let cutoff = CutoffField::sampled(profile, domain, grid);
    let inside: Vec<bool> = cutoff.depth.values.iter().map(|&d| d > 0.0).collect();
    let u = RealField {
        grid: *grid,
        values: pot
            .field
            .values
            .iter()
            .zip(&inside)
            .map(|(&v, &i)| if i { v } else { 0.0 })
            .collect(),
    };
    let (ux, uy) = u.gradient();
    let collar = |k: usize, p: Point| -> CollarSample {
        let g0 = u0.gradient(p);
        if !inside[k] {
            let v0 = u0.value(p);
            return CollarSample {
                v0,
                grad: g0,
                helmholtz: 0.0,
                h0: -1.0 / v0,
            };
        }
        let v0 = u.values[k] + u0.value(p);
        CollarSample {
            v0,
            grad: [ux.values[k] + g0[0], uy.values[k] + g0[1]],
            // Δu = 1 near ∂D and u₀ is harmonic
            helmholtz: 1.0,
            h0: -1.0 / v0,
        }
    };
    let mut c = glue_construction(domain, 0.0, u0, &collar, &cutoff, true)?;
    let sup_v0 = (0..grid.len())
        .filter(|&k| inside[k] && cutoff.depth.values[k] <= profile.plateau_depth())
        .map(|k| u.values[k] + u0.value(grid.point(k)))
        .fold(0.0, f64::max);
    let bound = 1.0 / (2.0 * sup_v0);
    let cert = &mut c.contrast.certificate;
    cert.bound = Some(bound);
    cert.is_contrast = cert.inf_abs_h >= bound;
    cert.note = format!("h = -1/v0 on the collar; inf |h| checked against 1/(2 sup v0) = {bound:.6}");
    Ok(c)
}

/// The `h₀ = 0` variant on any domain: `v = ψ u₀ + (1 − ψ)`. The potential
/// vanishes near `∂D`, so it is not a contrast.
pub fn interior_cutoff_potential(
    domain: &Domain,
    u0: &dyn IncidentWave,
    profile: CutoffProfile,
    grid: &Grid2,
) -> Result<Construction> {
    let cutoff = CutoffField::sampled(profile, domain, grid);
    let lambda = u0.wavenumber();
    let collar = |_: usize, p: Point| CollarSample {
        v0: u0.value(p),
        grad: u0.gradient(p),
        helmholtz: 0.0,
        h0: 0.0,
    };
    glue_construction(domain, lambda, u0, &collar, &cutoff, false)
}

/// `u_q`: `v` inside `D`, `u₀` outside.
pub fn total_field(c: &Construction) -> RealField {
    c.v.clone()
}

/// Potential for which the sampled glued field is an exact five-point
/// solution: `q_h = −(Δ_h + λ²) V / V` off the frame, zero on it.
pub fn discrete_contrast(c: &Construction) -> Result<RealField> {
    let v = &c.v;
    let g = v.grid;
    let lam2 = c.contrast.lambda * c.contrast.lambda;
    let lap = v.laplacian();
    let mut out = RealField::filled(g, 0.0);
    for k in 0..g.len() {
        let (i, j) = g.ij(k);
        if g.on_frame(i, j) {
            continue;
        }
        if !(v.values[k].abs() >= MIN_V) {
            return Err(Error::PositivityViolated(format!(
                "glued field {:.3e} too small for the discrete potential",
                v.values[k]
            )));
        }
        out.values[k] = -(lap.values[k] + lam2 * v.values[k]) / v.values[k];
    }
    Ok(out)
}
