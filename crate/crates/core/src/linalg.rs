//! Small linear-algebra kernels: restarted GMRES, a banded LU with partial
//! pivoting, and a fast sine-transform solver for the five-point Dirichlet
//! Helmholtz operator on a square.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

type C = Complex64;

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<C>,
    pub iterations: usize,
    /// Final relative residual `‖b - Ax‖ / ‖b‖` (true residual).
    pub residual: f64,
    /// Relative residual estimate after every inner iteration.
    pub history: Vec<f64>,
}

/// Restarted GMRES for `A x = b` with a matrix-free `apply(x, out)`.
pub fn gmres(
    apply: impl Fn(&[C], &mut [C]),
    b: &[C],
    x0: Option<&[C]>,
    restart: usize,
    tol: f64,
    max_iter: usize,
) -> Result<GmresOutcome> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![C::new(0.0, 0.0); n]);
    if bnorm == 0.0 {
        return Ok(GmresOutcome {
            x: vec![C::new(0.0, 0.0); n],
            iterations: 0,
            residual: 0.0,
            history: vec![],
        });
    }
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut ax = vec![C::new(0.0, 0.0); n];
    loop {
        apply(&x, &mut ax);
        let r: Vec<C> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm(&r);
        let rel = beta / bnorm;
        if rel <= tol || iterations >= max_iter {
            if rel <= tol {
                return Ok(GmresOutcome {
                    x,
                    iterations,
                    residual: rel,
                    history,
                });
            }
            return Err(Error::NonConvergence {
                iterations,
                residual: rel,
                history,
            });
        }
        let mut v: Vec<Vec<C>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut h = vec![vec![C::new(0.0, 0.0); restart]; restart + 1];
        let mut cs = vec![C::new(0.0, 0.0); restart];
        let mut sn = vec![C::new(0.0, 0.0); restart];
        let mut g = vec![C::new(0.0, 0.0); restart + 1];
        g[0] = C::new(beta, 0.0);
        let mut k_used = 0;
        for k in 0..restart {
            let mut w = vec![C::new(0.0, 0.0); n];
            apply(&v[k], &mut w);
            for (i, vi) in v.iter().enumerate() {
                let hik = dot(vi, &w);
                h[i][k] = hik;
                w.iter_mut().zip(vi).for_each(|(wj, vj)| *wj -= hik * vj);
            }
            let hn = norm(&w);
            h[k + 1][k] = C::new(hn, 0.0);
            for i in 0..k {
                let t = cs[i].conj() * h[i][k] + sn[i].conj() * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let (a, bb) = (h[k][k], h[k + 1][k]);
            let den = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if den == 0.0 {
                cs[k] = C::new(1.0, 0.0);
                sn[k] = C::new(0.0, 0.0);
            } else {
                cs[k] = a / den;
                sn[k] = bb / den;
            }
            h[k][k] = cs[k].conj() * a + sn[k].conj() * bb;
            h[k + 1][k] = C::new(0.0, 0.0);
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k].conj() * g[k];
            iterations += 1;
            k_used = k + 1;
            let est = g[k + 1].norm() / bnorm;
            history.push(est);
            if est <= tol * 0.5 || hn == 0.0 || iterations >= max_iter {
                break;
            }
            v.push(w.iter().map(|z| z / hn).collect());
        }
        // back substitution
        let mut y = vec![C::new(0.0, 0.0); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            x.iter_mut().zip(&v[j]).for_each(|(xi, vi)| *xi += yj * vi);
        }
    }
}

/// Banded matrix with `kl` sub- and `ku` super-diagonals, factored in place
/// by Gaussian elimination with partial pivoting (fill grows the upper band
/// to `kl + ku`).
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row-major band storage: row `i` holds columns `i - kl ..= i + kl + ku`.
    data: Vec<f64>,
    width: usize,
    pivots: Vec<usize>,
    factored: bool,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> BandMatrix {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            data: vec![0.0; n * width],
            width,
            pivots: vec![0; n],
            factored: false,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off as usize >= self.width {
            None
        } else {
            Some(i * self.width + off as usize)
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(!self.factored);
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i},{j}) outside band"
        );
        let s = self.slot(i, j).expect("inside band");
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// `y = A x` (before factoring).
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert!(!self.factored);
        (0..self.n)
            .into_par_iter()
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Factor in place. Returns the smallest pivot magnitude.
    pub fn factor(&mut self) -> Result<f64> {
        let (n, kl) = (self.n, self.kl);
        let upper = self.kl + self.ku;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::EigenvalueProximity(format!(
                    "zero pivot at row {k} of {n}"
                )));
            }
            min_pivot = min_pivot.min(best);
            self.pivots[k] = p;
            let cmax = (k + upper).min(n - 1);
            if p != k {
                for j in k..=cmax {
                    let a = self.slot(k, j).unwrap();
                    let b = self.slot(p, j).unwrap();
                    self.data.swap(a, b);
                }
            }
            let piv = self.get(k, k);
            for i in k + 1..=last {
                let si = self.slot(i, k).unwrap();
                let l = self.data[si] / piv;
                self.data[si] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=cmax {
                    let a = self.slot(k, j).unwrap();
                    let b = self.slot(i, j).unwrap();
                    self.data[b] -= l * self.data[a];
                }
            }
        }
        self.factored = true;
        Ok(min_pivot)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert!(self.factored);
        let (n, kl) = (self.n, self.kl);
        let upper = self.kl + self.ku;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let last = (k + kl).min(n - 1);
            for i in k + 1..=last {
                x[i] -= self.get(i, k) * x[k];
            }
        }
        for k in (0..n).rev() {
            let cmax = (k + upper).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=cmax {
                s -= self.get(k, j) * x[j];
            }
            x[k] = s / self.get(k, k);
        }
        x
    }
}

/// Exact solver for `(Δ_h + κ) U = F` on the `m × m` interior nodes of a
/// square grid with zero Dirichlet data, by a sine transform in each axis.
pub struct DirichletHelmholtz {
    m: usize,
    eig: Vec<f64>,
    plan: Arc<dyn Fft<f64>>,
}

impl DirichletHelmholtz {
    /// `m` interior nodes per axis, spacing `s`, shift `kappa` (= λ²).
    pub fn new(m: usize, s: f64, kappa: f64) -> Result<DirichletHelmholtz> {
        let mut planner = FftPlanner::new();
        let plan = planner.plan_fft_forward(2 * (m + 1));
        let lam: Vec<f64> = (1..=m)
            .map(|k| {
                let t = (std::f64::consts::PI * k as f64 / (2.0 * (m + 1) as f64)).sin();
                -4.0 * t * t / (s * s)
            })
            .collect();
        let mut eig = Vec::with_capacity(m * m);
        let mut smallest = f64::INFINITY;
        let scale = 8.0 / (s * s);
        for l in 0..m {
            for k in 0..m {
                let e = lam[k] + lam[l] + kappa;
                smallest = smallest.min(e.abs());
                eig.push(e);
            }
        }
        if smallest < 1e-10 * scale {
            return Err(Error::EigenvalueProximity(format!(
                "shift {kappa} coincides with a discrete Dirichlet eigenvalue"
            )));
        }
        Ok(DirichletHelmholtz { m, eig, plan })
    }

    /// Smallest `|eigenvalue|` of the shifted discrete operator.
    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eig.iter().fold(f64::INFINITY, |a, e| a.min(e.abs()))
    }

    fn dst_rows(&self, a: &mut [C]) {
        let m = self.m;
        let p = 2 * (m + 1);
        a.par_chunks_mut(m).for_each(|row| {
            let mut buf = vec![C::new(0.0, 0.0); p];
            for j in 0..m {
                buf[j + 1] = row[j];
                buf[p - 1 - j] = -row[j];
            }
            self.plan.process(&mut buf);
            for k in 0..m {
                row[k] = buf[k + 1] * C::new(0.0, 0.5);
            }
        });
    }

    fn dst2(&self, a: &mut [C]) {
        let m = self.m;
        self.dst_rows(a);
        let mut t = vec![C::new(0.0, 0.0); m * m];
        for j in 0..m {
            for i in 0..m {
                t[i * m + j] = a[j * m + i];
            }
        }
        self.dst_rows(&mut t);
        for j in 0..m {
            for i in 0..m {
                a[j * m + i] = t[i * m + j];
            }
        }
    }

    /// Solve for interior values (row-major `m × m`).
    pub fn solve(&self, f: &[C]) -> Vec<C> {
        let m = self.m;
        let mut a = f.to_vec();
        self.dst2(&mut a);
        let norm = (2.0 / (m + 1) as f64).powi(2);
        a.iter_mut()
            .zip(&self.eig)
            .for_each(|(v, e)| *v *= norm / e);
        self.dst2(&mut a);
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gmres_solves_small_nonsymmetric_system() {
        let n = 30;
        let a = |i: usize, j: usize| -> f64 {
            if i == j {
                4.0 + i as f64 * 0.1
            } else if j == i + 1 {
                -1.3
            } else if i == j + 1 {
                -0.7
            } else {
                0.0
            }
        };
        let apply = |x: &[C], out: &mut [C]| {
            for i in 0..n {
                out[i] = (0..n).map(|j| a(i, j) * x[j]).sum();
            }
        };
        let xs: Vec<C> = (0..n).map(|i| C::new(i as f64, 1.0 - i as f64)).collect();
        let mut b = vec![C::new(0.0, 0.0); n];
        apply(&xs, &mut b);
        let out = gmres(apply, &b, None, 7, 1e-12, 500).unwrap();
        assert!(out.residual <= 1e-12);
        for i in 0..n {
            assert!((out.x[i] - xs[i]).norm() < 1e-9);
        }
        // restart too small and too few iterations -> non-convergence report
        let err = gmres(apply, &b, None, 2, 1e-14, 3).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 3, .. }));
    }

    #[test]
    fn band_lu_with_pivoting() {
        let n = 40;
        let mut m = BandMatrix::new(n, 3, 2);
        for i in 0..n {
            for j in i.saturating_sub(3)..=(i + 2).min(n - 1) {
                // tiny diagonal forces pivoting
                let v = if i == j { 1e-3 } else { ((i * 7 + j * 3) % 5) as f64 - 2.0 };
                m.add(i, j, v);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = m.matvec(&x);
        m.factor().unwrap();
        let y = m.solve(&b);
        for i in 0..n {
            assert!((x[i] - y[i]).abs() < 1e-8, "{i}");
        }
    }

    #[test]
    fn sine_solver_inverts_five_point_operator() {
        let m = 15;
        let s = 0.1;
        let kappa = 2.5;
        let solver = DirichletHelmholtz::new(m, s, kappa).unwrap();
        let u: Vec<C> = (0..m * m)
            .map(|k| C::new((k as f64 * 0.21).cos(), (k as f64).sin()))
            .collect();
        let at = |i: isize, j: isize| -> C {
            if i < 0 || j < 0 || i >= m as isize || j >= m as isize {
                C::new(0.0, 0.0)
            } else {
                u[j as usize * m + i as usize]
            }
        };
        let f: Vec<C> = (0..m * m)
            .map(|k| {
                let (i, j) = ((k % m) as isize, (k / m) as isize);
                (at(i - 1, j) + at(i + 1, j) + at(i, j - 1) + at(i, j + 1) - at(i, j) * 4.0)
                    / (s * s)
                    + at(i, j) * kappa
            })
            .collect();
        let back = solver.solve(&f);
        for k in 0..m * m {
            assert!((back[k] - u[k]).norm() < 1e-10);
        }
    }
}
