//! Bessel and Hankel functions of integer order, the half-integer order
//! `1/2`, fundamental solutions of the Laplace and Helmholtz operators and
//! the bounded radial Helmholtz solution.
//!
//! `J_m` is evaluated by the power series for `x < 1` and by Miller's
//! backward recurrence (normalised with `J_0 + 2 Σ J_2k = 1`) otherwise.
//! `Y_0` and `Y_1` come from the Neumann series in the same `J` table, and
//! higher `Y_m` from upward recurrence, which is stable for `Y`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Euler–Mascheroni constant (20 significant digits).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// Largest integer order accepted by the public entry points.
pub const MAX_ORDER: u32 = 60;

/// Order of a Bessel function: a nonnegative integer (2D angular modes) or
/// `1/2` (the radial constant in three dimensions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselOrder {
    Int(u32),
    Half,
}

impl BesselOrder {
    pub fn int(m: u32) -> Result<Self> {
        let order = BesselOrder::Int(m);
        order.validate()?;
        Ok(order)
    }

    /// Order `(n-2)/2` of the Bessel function whose first zero bounds the
    /// radius of sign-definite balls in dimension `n`.
    pub fn for_dimension(n: u32) -> Result<Self> {
        match n {
            2 => Ok(BesselOrder::Int(0)),
            3 => Ok(BesselOrder::Half),
            _ => Err(Error::UnsupportedOrder(format!("dimension {n}"))),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            BesselOrder::Int(m) if m > MAX_ORDER => {
                Err(Error::UnsupportedOrder(format!("{m} (max {MAX_ORDER})")))
            }
            _ => Ok(()),
        }
    }
}

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() {
        return invalid(format!("Bessel argument must be finite, got {x}"));
    }
    if x < 0.0 {
        return invalid(format!("Bessel argument must be nonnegative, got {x}"));
    }
    Ok(())
}

/// `J_order(x)` for `x >= 0`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    order.validate()?;
    check_arg(x)?;
    Ok(match order {
        BesselOrder::Int(m) => bessel_j_seq(m as usize, x)[m as usize],
        BesselOrder::Half => j_half(x),
    })
}

/// Derivative `J'_order(x)`; uses `J_m' = (J_{m-1} - J_{m+1})/2` and
/// `J_0' = -J_1`.
pub fn bessel_j_derivative(order: BesselOrder, x: f64) -> Result<f64> {
    order.validate()?;
    check_arg(x)?;
    match order {
        BesselOrder::Int(m) => {
            let j = bessel_j_seq(m as usize + 1, x);
            Ok(j_derivative_from_seq(&j, m as usize))
        }
        BesselOrder::Half => {
            if x == 0.0 {
                return invalid("J_{1/2}' is singular at 0");
            }
            let c = (2.0 / PI).sqrt();
            Ok(c * (x.cos() / x.sqrt() - 0.5 * x.sin() / (x * x.sqrt())))
        }
    }
}

/// `J_m'` given a table holding at least `J_0..=J_{m+1}`.
pub fn j_derivative_from_seq(j: &[f64], m: usize) -> f64 {
    if m == 0 {
        -j[1]
    } else {
        0.5 * (j[m - 1] - j[m + 1])
    }
}

fn j_half(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (2.0 / (PI * x)).sqrt() * x.sin()
    }
}

/// `J_0(x), ..., J_max_m(x)` for `x >= 0` (negative `x` is mirrored by
/// parity).
pub fn bessel_j_seq(max_m: usize, x: f64) -> Vec<f64> {
    if x < 0.0 {
        let mut j = bessel_j_seq(max_m, -x);
        for (m, v) in j.iter_mut().enumerate() {
            if m % 2 == 1 {
                *v = -*v;
            }
        }
        return j;
    }
    let mut table = j_table(x, max_m);
    table.truncate(max_m + 1);
    table
}

/// Table of `J_0..J_L` with `L >= max_m`, long enough that the Neumann
/// series for `Y_0`/`Y_1` can be summed from it.
fn j_table(x: f64, max_m: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut j = vec![0.0; max_m.max(1) + 2];
        j[0] = 1.0;
        return j;
    }
    if x < 1.0 {
        let len = max_m.max(32) + 2;
        return (0..len).map(|m| j_series(m, x)).collect();
    }
    miller(x, max_m)
}

/// Power series `Σ (-1)^k (x/2)^{2k+m} / (k! (k+m)!)`; accurate for small
/// `x` only.
fn j_series(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=m {
        lead *= half / k as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..200 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller(x: f64, max_m: usize) -> Vec<f64> {
    let top = (max_m as f64).max(x);
    let mut start = (top + 30.0 + 10.0 * x.cbrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut f = vec![0.0; start + 2];
    f[start] = 1e-30;
    for k in (1..=start).rev() {
        f[k - 1] = 2.0 * k as f64 / x * f[k] - f[k + 1];
        if f[k - 1].abs() > 1e250 {
            for v in f[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = f[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * f[k];
    }
    f.truncate(start + 1);
    for v in f.iter_mut() {
        *v /= norm;
    }
    f
}

/// `Y_0(x), ..., Y_max_m(x)` for `x > 0`, together with the `J` table.
pub fn bessel_jy_seq(max_m: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let table = j_table(x, max_m + 1);
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 < table.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * table[2 * k] / k as f64;
        s1 += sign * (table[2 * k - 1] - table[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = 2.0 / PI * (lg * table[0] - 2.0 * s0);
    let y1 = 2.0 / PI * (lg * table[1] - table[0] / x + s1);
    let mut y = Vec::with_capacity(max_m + 1);
    y.push(y0);
    if max_m >= 1 {
        y.push(y1);
    }
    for m in 1..max_m {
        let next = 2.0 * m as f64 / x * y[m] - y[m - 1];
        y.push(next);
    }
    let mut j = table;
    j.truncate(max_m + 1);
    (j, y)
}

/// `Y_m(x)` for `x > 0`.
pub fn bessel_y(m: u32, x: f64) -> Result<f64> {
    BesselOrder::Int(m).validate()?;
    check_arg(x)?;
    if x == 0.0 {
        return invalid("Y_m is singular at 0");
    }
    Ok(bessel_jy_seq(m as usize, x).1[m as usize])
}

/// Hankel function of the first kind `H_m^{(1)}(x) = J_m(x) + i Y_m(x)`.
pub fn hankel1(m: u32, x: f64) -> Result<Complex64> {
    BesselOrder::Int(m).validate()?;
    if !(x > 0.0) || !x.is_finite() {
        return invalid(format!("Hankel argument must be positive and finite, got {x}"));
    }
    let (j, y) = bessel_jy_seq(m as usize, x);
    Ok(Complex64::new(j[m as usize], y[m as usize]))
}

/// Result of a bisection: the midpoint of the final bracket and the bracket
/// width after every halving.
#[derive(Debug, Clone)]
pub struct Bisection {
    pub root: f64,
    pub widths: Vec<f64>,
}

/// Bisection on a sign change of `f` in `[a, b]`, run until the bracket is
/// no wider than `tol` or stops shrinking in floating point.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Result<Bisection> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(Bisection { root: a, widths: vec![0.0] });
    }
    if fb == 0.0 {
        return Ok(Bisection { root: b, widths: vec![0.0] });
    }
    if fa.signum() == fb.signum() {
        return invalid(format!("no sign change on [{a}, {b}]"));
    }
    let mut widths = vec![b - a];
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            a = mid;
            b = mid;
        } else if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        widths.push(b - a);
    }
    Ok(Bisection {
        root: 0.5 * (a + b),
        widths,
    })
}

/// First positive zero of `J_order`: `c_2 = j_{0,1}` for order 0 and
/// `c_3 = π` for order 1/2.
pub fn first_bessel_zero(order: BesselOrder) -> Result<f64> {
    Ok(first_bessel_zero_bisection(order)?.root)
}

pub fn first_bessel_zero_bisection(order: BesselOrder) -> Result<Bisection> {
    match order {
        BesselOrder::Int(0) => bisect(|x| bessel_j_seq(0, x)[0], 2.0, 3.0, 1e-15),
        BesselOrder::Half => bisect(j_half, 3.0, 3.5, 1e-15),
        other => Err(Error::UnsupportedOrder(format!(
            "{other:?} (first zero only for orders 0 and 1/2)"
        ))),
    }
}

/// Which fundamental solution to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operator", rename_all = "kebab-case")]
pub enum FundamentalSolution {
    /// `N(x) = ln|x| / 2π`, with `ΔN = δ`.
    Laplace,
    /// `Φ_λ(x) = (i/4) H_0^{(1)}(λ|x|)`, with `(Δ + λ²)Φ_λ = -δ`.
    HelmholtzOutgoing { wavenumber: f64 },
}

impl FundamentalSolution {
    pub fn helmholtz(wavenumber: f64) -> Result<Self> {
        if !(wavenumber > 0.0) || !wavenumber.is_finite() {
            return invalid(format!("outgoing kernel needs wavenumber > 0, got {wavenumber}"));
        }
        Ok(FundamentalSolution::HelmholtzOutgoing { wavenumber })
    }

    pub fn eval(&self, x: [f64; 2]) -> Result<Complex64> {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return invalid("fundamental solution is singular at the origin");
        }
        match *self {
            FundamentalSolution::Laplace => Ok(Complex64::new(laplace_kernel(r), 0.0)),
            FundamentalSolution::HelmholtzOutgoing { wavenumber } => {
                Ok(Complex64::new(0.0, 0.25) * hankel1(0, wavenumber * r)?)
            }
        }
    }

    /// Convention tag echoed into run outputs.
    pub fn convention(&self) -> &'static str {
        match self {
            FundamentalSolution::Laplace => "N(x) = ln|x|/(2*pi), Laplacian N = delta",
            FundamentalSolution::HelmholtzOutgoing { .. } => {
                "Phi(x) = (i/4) H0^(1)(lambda|x|), (Laplacian + lambda^2) Phi = -delta"
            }
        }
    }
}

/// `ln r / 2π`.
#[inline]
pub fn laplace_kernel(r: f64) -> f64 {
    r.ln() / (2.0 * PI)
}

/// Gradient of `N(x) = ln|x| / 2π`.
#[inline]
pub fn laplace_kernel_gradient(x: [f64; 2]) -> [f64; 2] {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let c = 1.0 / (2.0 * PI * r2);
    [c * x[0], c * x[1]]
}

/// Hessian `[∂xx, ∂xy, ∂yy]` of `N(x) = ln|x| / 2π`.
#[inline]
pub fn laplace_kernel_hessian(x: [f64; 2]) -> [f64; 3] {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let c = 1.0 / (2.0 * PI * r2 * r2);
    [
        c * (x[1] * x[1] - x[0] * x[0]),
        -2.0 * c * x[0] * x[1],
        c * (x[0] * x[0] - x[1] * x[1]),
    ]
}

/// Bounded radial solution of `(Δ + λ²)v = 0` in the plane with `v(0) = 1`,
/// i.e. `J_0(λr)`.
pub fn radial_helmholtz(lambda: f64, r: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return invalid(format!("radial solution needs lambda > 0, got {lambda}"));
    }
    check_arg(r)?;
    bessel_j(BesselOrder::Int(0), lambda * r)
}

/// Large-argument expansion of `H_m^{(1)}(x)` truncated after the `1/x²`
/// terms: `sqrt(2/(πx)) (P + iQ) e^{i(x - π/4 - mπ/2)}`.
pub fn hankel1_asymptotic(m: u32, x: f64) -> Complex64 {
    let mu = 4.0 * (m as f64).powi(2);
    let p = 1.0 - (mu - 1.0) * (mu - 9.0) / (2.0 * (8.0 * x).powi(2));
    let q = (mu - 1.0) / (8.0 * x);
    let phase = x - 0.25 * PI - FRAC_PI_2 * m as f64;
    (2.0 / (PI * x)).sqrt() * Complex64::new(p, q) * Complex64::from_polar(1.0, phase)
}
