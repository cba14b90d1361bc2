//! Point quadrature measures `μ` with `∫_D H dx = ⟨μ, H⟩` for harmonic `H`,
//! and the modified potential `u = N * (χ_D − μ)`, which vanishes outside
//! `D̄` and satisfies `Δu = χ_D` near `∂D`.
//!
//! Area moments of harmonic polynomials are boundary integrals:
//! `∫_D g dA = (1/2i) ∮ g z̄ dz` for holomorphic `g`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fft::Convolver;
use crate::geometry::{Domain, Point};
use crate::grid::{cell_fraction, Grid2, RealField};
use crate::specialfun::{laplace_kernel, laplace_kernel_gradient, laplace_kernel_hessian};

/// Boundary nodes used for moment integrals. The trapezoidal rule is
/// spectrally accurate on the smooth parametrized kinds.
const MOMENT_NODES: usize = 4096;

/// Relative tolerance for the moment system to count as closed.
pub const MOMENT_TOLERANCE: f64 = 1e-8;

/// Highest harmonic degree accepted by the residual checks.
pub const MAX_TEST_DEGREE: usize = 6;

/// `coeff · ∂^(kx, ky) H (location)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureTerm {
    pub location: Point,
    pub order: [u32; 2],
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMeasure {
    pub terms: Vec<MeasureTerm>,
}

impl QuadratureMeasure {
    pub fn point_mass(location: Point, mass: f64) -> Self {
        QuadratureMeasure {
            terms: vec![MeasureTerm {
                location,
                order: [0, 0],
                coeff: mass,
            }],
        }
    }

    /// `⟨μ, (z − c)^k⟩` (real and imaginary parts pair with `Re`/`Im`).
    pub fn pair_power(&self, c: Point, k: u32) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * power_derivative(t.location, c, k, t.order))
            .sum()
    }

    /// `⟨μ, N(x − ·)⟩`. A derivative in `y` of `N(x − y)` is minus the
    /// derivative of `N` in its argument.
    pub fn newtonian(&self, x: Point) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let d = [x[0] - t.location[0], x[1] - t.location[1]];
                let v = match t.order {
                    [0, 0] => laplace_kernel(d[0].hypot(d[1])),
                    [1, 0] => -laplace_kernel_gradient(d)[0],
                    [0, 1] => -laplace_kernel_gradient(d)[1],
                    [2, 0] => laplace_kernel_hessian(d)[0],
                    [1, 1] => laplace_kernel_hessian(d)[1],
                    [0, 2] => laplace_kernel_hessian(d)[2],
                    _ => unreachable!("validated order"),
                };
                t.coeff * v
            })
            .sum()
    }

    pub fn validate(&self, domain: &Domain) -> Result<()> {
        if self.terms.is_empty() || self.terms.len() > 8 {
            return invalid(format!("measure needs 1..=8 terms, got {}", self.terms.len()));
        }
        for t in &self.terms {
            if t.order[0] + t.order[1] > 2 {
                return invalid(format!("derivative order {:?} above 2", t.order));
            }
            if !domain.inside(t.location) {
                return invalid(format!("measure location {:?} not inside the domain", t.location));
            }
        }
        Ok(())
    }
}

/// `∂x^a ∂y^b (z − c)^k` at `p`, using `∂y = i ∂z` on holomorphic functions.
fn power_derivative(p: Point, c: Point, k: u32, order: [u32; 2]) -> Complex64 {
    let n = order[0] + order[1];
    if n > k {
        return Complex64::new(0.0, 0.0);
    }
    let falling: f64 = (0..n).map(|j| (k - j) as f64).product();
    let z = Complex64::new(p[0] - c[0], p[1] - c[1]);
    Complex64::i().powu(order[1]) * falling * z.powu(k - n)
}

/// `∫_D (z − c)^k dA` by boundary quadrature.
pub fn harmonic_moment(domain: &Domain, c: Point, k: u32) -> Result<Complex64> {
    let nodes = domain.boundary_nodes(MOMENT_NODES)?;
    Ok(nodes
        .iter()
        .map(|nd| {
            let z = Complex64::new(nd.point[0] - c[0], nd.point[1] - c[1]);
            let n = Complex64::new(nd.normal[0], nd.normal[1]);
            0.5 * z.powu(k) * z.conj() * n * nd.weight
        })
        .sum())
}

fn derivative_orders(max_order: u32) -> Vec<[u32; 2]> {
    // ∂yy = −∂xx on harmonic functions, so it is left out.
    let all = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1]];
    all.into_iter()
        .filter(|o| o[0] + o[1] <= max_order)
        .collect()
}

/// Fit a measure supported at `center` with derivative terms up to
/// `max_order` against the harmonic polynomials of degree `≤ max_order + 2`.
/// The extra degrees decide whether the moment system closes.
pub fn fit_quadrature_measure(
    domain: &Domain,
    center: Point,
    max_order: u32,
) -> Result<QuadratureMeasure> {
    if max_order > 2 {
        return invalid(format!("derivative order {max_order} above 2"));
    }
    if !domain.inside(center) {
        return invalid(format!("center {center:?} is not inside the domain"));
    }
    let diam = domain.diameter();
    let orders = derivative_orders(max_order);
    let degree = max_order + 2;
    // rows: 1, then Re/Im of ((z − c)/diam)^k
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for k in 0..=degree {
        let m = harmonic_moment(domain, center, k)? / diam.powi(k as i32);
        let entries: Vec<Complex64> = orders
            .iter()
            .map(|&o| {
                power_derivative(center, center, k, o) * diam.powi((o[0] + o[1]) as i32)
                    / diam.powi(k as i32)
            })
            .collect();
        rows.push((entries.iter().map(|e| e.re).collect(), m.re));
        if k > 0 {
            rows.push((entries.iter().map(|e| e.im).collect(), m.im));
        }
    }
    let a = DMatrix::from_fn(rows.len(), orders.len(), |i, j| rows[i].0[j]);
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let svd = a.clone().svd(true, true);
    let y = svd
        .solve(&b, 1e-12 * svd.singular_values.max())
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let resid = (&a * &y - &b).amax() / b.amax();
    if resid > MOMENT_TOLERANCE {
        return Err(Error::NotQuadratureDomain { residual: resid });
    }
    let terms = orders
        .iter()
        .zip(y.iter())
        .filter(|(_, &c)| c != 0.0)
        .map(|(&o, &c)| MeasureTerm {
            location: center,
            order: o,
            coeff: c * diam.powi((o[0] + o[1]) as i32),
        })
        .collect();
    Ok(QuadratureMeasure { terms })
}

/// `max_H |∫_D H − ⟨μ,H⟩| / (1 + |∫_D H|)` over `Re`/`Im (z − c)^k`,
/// `k ≤ degree`, with `c` the location of the first term of `μ`.
pub fn held_out_quadrature_residual(
    domain: &Domain,
    mu: &QuadratureMeasure,
    degree: u32,
) -> Result<f64> {
    if degree as usize > MAX_TEST_DEGREE {
        return invalid(format!("test degree {degree} above {MAX_TEST_DEGREE}"));
    }
    let c = mu
        .terms
        .first()
        .map(|t| t.location)
        .ok_or_else(|| Error::InvalidArgument("empty measure".into()))?;
    let mut worst: f64 = 0.0;
    for k in 0..=degree {
        let m = harmonic_moment(domain, c, k)?;
        let p = mu.pair_power(c, k);
        worst = worst.max((m.re - p.re).abs() / (1.0 + m.re.abs()));
        if k > 0 {
            worst = worst.max((m.im - p.im).abs() / (1.0 + m.im.abs()));
        }
    }
    Ok(worst)
}

/// `u = N * (χ_D − μ)` sampled on a grid.
#[derive(Debug, Clone)]
pub struct ModifiedPotential {
    pub field: RealField,
    /// A third of the distance from `∂D` to the nearest measure location:
    /// the band around `∂D` on which `Δu = χ_D` is checked. Closer to the
    /// measure the five-point stencil's truncation error on the singular
    /// terms (`~ s²/r⁵` for a dipole) dominates.
    pub collar: f64,
}

/// Offsets (in cells, max-norm) whose kernel cell integral is subsampled.
const NEAR_CELLS: isize = 2;
const NEAR_SUB: usize = 16;

/// Modified potential on `grid`. The volume term is the convolution of the
/// cell fractions of `D` with cell averages of `N` (subsampled within two
/// cells of the singularity, midpoint beyond); the measure term is
/// evaluated analytically, averaged over the cell at nodes next to a
/// measure location.
pub fn modified_potential(
    domain: &Domain,
    mu: &QuadratureMeasure,
    grid: &Grid2,
) -> Result<ModifiedPotential> {
    mu.validate(domain)?;
    let b = domain.bbox();
    let pad = 0.2 * domain.diameter();
    let gb = grid.bbox();
    if gb.min[0] > b.min[0] - pad
        || gb.min[1] > b.min[1] - pad
        || gb.max[0] < b.max[0] + pad
        || gb.max[1] < b.max[1] + pad
    {
        return invalid("grid must cover the domain plus a collar of 0.2·diam");
    }
    let s = grid.spacing();
    let frac = cell_fraction(domain, grid, 8);
    let conv = Convolver::new(grid.n, |di, dj| {
        let v = if di.abs() <= NEAR_CELLS && dj.abs() <= NEAR_CELLS {
            let mut acc = 0.0;
            for a in 0..NEAR_SUB {
                let ox = (a as f64 + 0.5) / NEAR_SUB as f64 - 0.5;
                for b in 0..NEAR_SUB {
                    let oy = (b as f64 + 0.5) / NEAR_SUB as f64 - 0.5;
                    acc += laplace_kernel(((di as f64 + ox) * s).hypot((dj as f64 + oy) * s));
                }
            }
            acc / (NEAR_SUB * NEAR_SUB) as f64
        } else {
            laplace_kernel((di as f64 * s).hypot(dj as f64 * s))
        };
        Complex64::new(v * s * s, 0.0)
    });
    let volume = conv.apply_real(&frac.values);
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let x = grid.point(k);
            let near = mu
                .terms
                .iter()
                .any(|t| (x[0] - t.location[0]).abs().max((x[1] - t.location[1]).abs()) < s);
            let m = if near {
                let sub = 4;
                let mut acc = 0.0;
                for a in 0..sub {
                    let ox = ((a as f64 + 0.5) / sub as f64 - 0.5) * s;
                    for b in 0..sub {
                        let oy = ((b as f64 + 0.5) / sub as f64 - 0.5) * s;
                        acc += mu.newtonian([x[0] + ox, x[1] + oy]);
                    }
                }
                acc / (sub * sub) as f64
            } else {
                mu.newtonian(x)
            };
            volume[k] - m
        })
        .collect();
    let collar = mu
        .terms
        .iter()
        .map(|t| domain.boundary_distance(t.location) / 3.0)
        .fold(f64::INFINITY, f64::min);
    Ok(ModifiedPotential {
        field: RealField {
            grid: *grid,
            values,
        },
        collar,
    })
}

/// Closed form for the disk of radius `r0` centred at the origin:
/// `(r² − R²)/4 − (R²/2) ln(r/R)` inside, `0` outside.
pub fn disk_potential(r0: f64, r: f64) -> f64 {
    if r >= r0 {
        0.0
    } else {
        (r * r - r0 * r0) / 4.0 - 0.5 * r0 * r0 * (r / r0).ln()
    }
}

/// Sup-norm of `Δ_h u − χ_D` over interior nodes whose distance to `∂D`
/// exceeds `band` and which lie within the collar (inside) or anywhere
/// outside `D`.
pub fn collar_residual(domain: &Domain, pot: &ModifiedPotential, band: f64) -> f64 {
    let g = pot.field.grid;
    let lap = pot.field.laplacian();
    (0..g.len())
        .into_par_iter()
        .filter_map(|k| {
            let (i, j) = g.ij(k);
            if g.on_frame(i, j) {
                return None;
            }
            let depth = domain.signed_depth(g.point(k));
            if depth.abs() <= band || depth > pot.collar {
                return None;
            }
            let chi = if depth > 0.0 { 1.0 } else { 0.0 };
            Some((lap.values[k] - chi).abs())
        })
        .reduce(|| 0.0, f64::max)
}

/// `∫_D g dA` for the image of the unit disk under `f(w) = w + a w²`,
/// computed in the `w` plane with Jacobian `|f'(w)|²` (midpoint rule in
/// `ρ`, trapezoid in angle). Independent of any boundary quadrature.
pub fn conformal_area_integral(a: f64, g: impl Fn(Point) -> f64, nr: usize, nt: usize) -> f64 {
    let mut acc = 0.0;
    let dr = 1.0 / nr as f64;
    let dt = 2.0 * PI / nt as f64;
    for i in 0..nr {
        let rho = (i as f64 + 0.5) * dr;
        for j in 0..nt {
            let w = Complex64::from_polar(rho, j as f64 * dt);
            let z = w + a * w * w;
            let jac = (1.0 + 2.0 * a * w).norm_sqr();
            acc += g([z.re, z.im]) * jac * rho * dr * dt;
        }
    }
    acc
}
