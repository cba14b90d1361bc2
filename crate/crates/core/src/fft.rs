//! Aperiodic 2D convolution on an `n × n` grid by zero padding to a
//! `2n × 2n` cyclic FFT.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// `out[i,j] = Σ_{k,l} K(i-k, j-l) f[k,l]` for a kernel given on all
/// offsets `|di|, |dj| < n`.
pub struct Convolver {
    n: usize,
    p: usize,
    kernel_hat: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Convolver {
    pub fn new(n: usize, kernel: impl Fn(isize, isize) -> Complex64 + Sync) -> Convolver {
        let p = 2 * n;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(p);
        let inverse = planner.plan_fft_inverse(p);
        let ni = n as isize;
        let mut buf: Vec<Complex64> = (0..p * p)
            .into_par_iter()
            .map(|k| {
                let (a, b) = ((k % p) as isize, (k / p) as isize);
                let di = if a < ni { a } else { a - p as isize };
                let dj = if b < ni { b } else { b - p as isize };
                if di.abs() >= ni || dj.abs() >= ni {
                    Complex64::new(0.0, 0.0)
                } else {
                    kernel(di, dj)
                }
            })
            .collect();
        fft2(&mut buf, p, &forward);
        Convolver {
            n,
            p,
            kernel_hat: buf,
            forward,
            inverse,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Convolve `f` (row-major, x fastest) with the kernel.
    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        let (n, p) = (self.n, self.p);
        assert_eq!(f.len(), n * n);
        let mut buf = vec![Complex64::new(0.0, 0.0); p * p];
        for j in 0..n {
            buf[j * p..j * p + n].copy_from_slice(&f[j * n..(j + 1) * n]);
        }
        fft2(&mut buf, p, &self.forward);
        buf.par_iter_mut()
            .zip(self.kernel_hat.par_iter())
            .for_each(|(a, k)| *a *= k);
        fft2(&mut buf, p, &self.inverse);
        let scale = 1.0 / (p * p) as f64;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            out.extend(buf[j * p..j * p + n].iter().map(|v| v * scale));
        }
        out
    }

    pub fn apply_real(&self, f: &[f64]) -> Vec<f64> {
        let c: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.apply(&c).into_iter().map(|v| v.re).collect()
    }
}

/// In-place unnormalised 2D transform of a `p × p` row-major array.
fn fft2(buf: &mut [Complex64], p: usize, plan: &Arc<dyn Fft<f64>>) {
    buf.par_chunks_mut(p).for_each(|row| plan.process(row));
    let mut t = transpose(buf, p);
    t.par_chunks_mut(p).for_each(|col| plan.process(col));
    let back = transpose(&t, p);
    buf.copy_from_slice(&back);
}

fn transpose(a: &[Complex64], p: usize) -> Vec<Complex64> {
    let mut t = vec![Complex64::new(0.0, 0.0); p * p];
    for j in 0..p {
        for i in 0..p {
            t[i * p + j] = a[j * p + i];
        }
    }
    t
}
