//! Uniform square grids and the scalar fields sampled on them.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{BBox, Domain, Point};

/// `n × n` nodes on the square `[x0, x0 + side] × [y0, y0 + side]`,
/// spacing `side / (n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub origin: Point,
    pub side: f64,
    pub n: usize,
}

impl Grid2 {
    pub fn new(origin: Point, side: f64, n: usize) -> Result<Grid2> {
        if n < 4 {
            return invalid(format!("grid needs at least 4 nodes per axis, got {n}"));
        }
        if !(side > 0.0) || !side.is_finite() {
            return invalid(format!("grid side must be positive, got {side}"));
        }
        Ok(Grid2 { origin, side, n })
    }

    /// Square grid centred at `center` with half-width `half`.
    pub fn centered(center: Point, half: f64, n: usize) -> Result<Grid2> {
        Grid2::new([center[0] - half, center[1] - half], 2.0 * half, n)
    }

    /// Smallest square grid containing `bbox` grown by `margin` on every side.
    pub fn covering(bbox: &BBox, margin: f64, n: usize) -> Result<Grid2> {
        let half = 0.5 * bbox.width().max(bbox.height()) + margin;
        Grid2::centered(bbox.center(), half, n)
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.side / (self.n - 1) as f64
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Linear index of node `(i, j)`; `i` runs along x.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.n, k / self.n)
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point {
        let s = self.spacing();
        [self.origin[0] + i as f64 * s, self.origin[1] + j as f64 * s]
    }

    #[inline]
    pub fn point(&self, k: usize) -> Point {
        let (i, j) = self.ij(k);
        self.node(i, j)
    }

    pub fn bbox(&self) -> BBox {
        BBox {
            min: self.origin,
            max: [self.origin[0] + self.side, self.origin[1] + self.side],
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        let b = self.bbox();
        p[0] >= b.min[0] && p[0] <= b.max[0] && p[1] >= b.min[1] && p[1] <= b.max[1]
    }

    /// Nodes on the outer frame.
    pub fn on_frame(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.n || j + 1 == self.n
    }

    /// Same box, `2n - 1` nodes per axis (spacing halved).
    pub fn refined(&self) -> Grid2 {
        Grid2 {
            n: 2 * self.n - 1,
            ..*self
        }
    }
}

/// Samples of a real or complex function on a [`Grid2`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    pub grid: Grid2,
    pub values: Vec<T>,
}

pub type RealField = ScalarField<f64>;
pub type ComplexField = ScalarField<Complex64>;

impl<T: Copy + Send + Sync> ScalarField<T> {
    pub fn from_fn(grid: Grid2, f: impl Fn(Point) -> T + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| f(grid.point(k)))
            .collect();
        ScalarField { grid, values }
    }

    pub fn filled(grid: Grid2, v: T) -> Self {
        ScalarField {
            grid,
            values: vec![v; grid.len()],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.grid.idx(i, j)]
    }

    pub fn map<U: Copy + Send + Sync>(&self, f: impl Fn(T) -> U + Sync) -> ScalarField<U> {
        ScalarField {
            grid: self.grid,
            values: self.values.par_iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with<U: Copy + Send + Sync, V: Copy + Send + Sync>(
        &self,
        other: &ScalarField<U>,
        f: impl Fn(T, U) -> V + Sync,
    ) -> ScalarField<V> {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        ScalarField {
            grid: self.grid,
            values: self
                .values
                .par_iter()
                .zip(other.values.par_iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl<T> ScalarField<T>
where
    T: Copy + Send + Sync + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> + Default,
{
    /// Bilinear interpolation; `None` outside the grid box.
    pub fn interpolate(&self, p: Point) -> Option<T> {
        if !self.grid.contains(p) {
            return None;
        }
        let s = self.grid.spacing();
        let n = self.grid.n;
        let fx = (p[0] - self.grid.origin[0]) / s;
        let fy = (p[1] - self.grid.origin[1]) / s;
        let i = (fx.floor() as usize).min(n - 2);
        let j = (fy.floor() as usize).min(n - 2);
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        Some(
            v00 * ((1.0 - tx) * (1.0 - ty))
                + v10 * (tx * (1.0 - ty))
                + v01 * ((1.0 - tx) * ty)
                + v11 * (tx * ty),
        )
    }

    /// Five-point Laplacian; zero on the outer frame.
    pub fn laplacian(&self) -> ScalarField<T> {
        let g = self.grid;
        let n = g.n;
        let inv = 1.0 / (g.spacing() * g.spacing());
        let values = (0..g.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = g.ij(k);
                if g.on_frame(i, j) {
                    return T::default();
                }
                let c = self.values[k];
                (self.values[k - 1] + self.values[k + 1] + self.values[k - n] + self.values[k + n]
                    - c * 4.0)
                    * inv
            })
            .collect();
        ScalarField { grid: g, values }
    }
}

impl RealField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Central-difference gradient (one-sided on the frame).
    pub fn gradient(&self) -> (RealField, RealField) {
        let g = self.grid;
        let n = g.n;
        let s = g.spacing();
        let d = |k: usize, a: usize, step: usize| -> f64 {
            if a == 0 {
                (self.values[k + step] - self.values[k]) / s
            } else if a + 1 == n {
                (self.values[k] - self.values[k - step]) / s
            } else {
                (self.values[k + step] - self.values[k - step]) / (2.0 * s)
            }
        };
        let gx = (0..g.len()).map(|k| d(k, g.ij(k).0, 1)).collect();
        let gy = (0..g.len()).map(|k| d(k, g.ij(k).1, n)).collect();
        (
            ScalarField { grid: g, values: gx },
            ScalarField { grid: g, values: gy },
        )
    }

    /// CSV with header `x,y,<name>`.
    pub fn to_csv(&self, name: &str) -> String {
        let mut out = format!("x,y,{name}\n");
        for k in 0..self.grid.len() {
            let p = self.grid.point(k);
            let _ = writeln!(out, "{},{},{}", p[0], p[1], self.values[k]);
        }
        out
    }
}

impl ComplexField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// CSV with header `x,y,re,im,abs`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,re,im,abs\n");
        for k in 0..self.grid.len() {
            let p = self.grid.point(k);
            let v = self.values[k];
            let _ = writeln!(out, "{},{},{},{},{}", p[0], p[1], v.re, v.im, v.norm());
        }
        out
    }
}

/// Fraction of each node's cell (the square of side `s` centred at the node)
/// covered by the domain. Cells crossed by the boundary polyline are
/// subsampled on a `sub × sub` midpoint lattice, all others take the node's
/// membership.
pub fn cell_fraction(domain: &Domain, grid: &Grid2, sub: usize) -> RealField {
    let n = grid.n;
    let s = grid.spacing();
    let mut near = vec![false; grid.len()];
    let poly = domain.boundary_polyline();
    let lo = |x: f64, o: f64| (((x - o) / s - 0.5).floor().max(0.0) as usize).min(n - 1);
    let hi = |x: f64, o: f64| (((x - o) / s + 0.5).ceil().max(0.0) as usize).min(n - 1);
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let (x0, x1) = (a[0].min(b[0]), a[0].max(b[0]));
        let (y0, y1) = (a[1].min(b[1]), a[1].max(b[1]));
        if x1 < grid.origin[0] - s || y1 < grid.origin[1] - s {
            continue;
        }
        for i in lo(x0, grid.origin[0])..=hi(x1, grid.origin[0]) {
            for j in lo(y0, grid.origin[1])..=hi(y1, grid.origin[1]) {
                near[grid.idx(i, j)] = true;
            }
        }
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let p = grid.point(k);
            if !near[k] {
                return if domain.inside(p) { 1.0 } else { 0.0 };
            }
            let mut hits = 0usize;
            for a in 0..sub {
                let ox = ((a as f64 + 0.5) / sub as f64 - 0.5) * s;
                for b in 0..sub {
                    let oy = ((b as f64 + 0.5) / sub as f64 - 0.5) * s;
                    if domain.inside([p[0] + ox, p[1] + oy]) {
                        hits += 1;
                    }
                }
            }
            hits as f64 / (sub * sub) as f64
        })
        .collect();
    ScalarField { grid: *grid, values }
}

/// Node membership mask.
pub fn inside_mask(domain: &Domain, grid: &Grid2) -> Vec<bool> {
    (0..grid.len())
        .into_par_iter()
        .map(|k| domain.inside(grid.point(k)))
        .collect()
}
