use serde::{Deserialize, Serialize};

use super::{minimal_diameter, Point};
use crate::error::{invalid, Result};

pub const MIN_THICKNESS_SAMPLES: usize = 10_000;

const MAX_PASSES: usize = 12;

/// Estimate of `δ_r(K, z) = MD(K ∩ B(z, r)) / r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThicknessEstimate {
    pub delta: f64,
    /// `2 · (coarsest grid spacing of the final pass) / r`.
    pub error_bound: f64,
    pub points: usize,
    pub passes: usize,
}

/// Thickness of the set `{p : member(p)}` in the ball `B(z, r)`, from
/// uniform grid samples.
///
/// The first pass samples the bounding square of the ball on an `n × n`
/// grid (`n² >= samples`, `n` odd so a grid line passes through `z`). While
/// the sampled set fills only a small part of the sampling box along an
/// axis, the box is shrunk to the sampled extent plus one spacing and
/// resampled with the same node count, so thin sets such as cusp
/// complements get resolved. Everything is deterministic.
pub fn thickness(
    member: impl Fn(Point) -> bool,
    z: Point,
    r: f64,
    samples: usize,
) -> Result<ThicknessEstimate> {
    if !(r > 0.0) || !r.is_finite() {
        return invalid(format!("thickness radius must be positive, got {r}"));
    }
    if samples < MIN_THICKNESS_SAMPLES {
        return invalid(format!(
            "thickness needs at least {MIN_THICKNESS_SAMPLES} samples, got {samples}"
        ));
    }
    let mut n = (samples as f64).sqrt().ceil() as usize;
    if n % 2 == 0 {
        n += 1;
    }
    let mut lo = [z[0] - r, z[1] - r];
    let mut hi = [z[0] + r, z[1] + r];
    let mut points = Vec::new();
    let mut spacing: [f64; 2];
    let mut passes = 0;
    loop {
        passes += 1;
        spacing = [(hi[0] - lo[0]) / (n - 1) as f64, (hi[1] - lo[1]) / (n - 1) as f64];
        points.clear();
        for i in 0..n {
            let x = lo[0] + i as f64 * spacing[0];
            for j in 0..n {
                let y = lo[1] + j as f64 * spacing[1];
                let p = [x, y];
                if (x - z[0]).hypot(y - z[1]) < r && member(p) {
                    points.push(p);
                }
            }
        }
        if points.is_empty() || passes == MAX_PASSES {
            break;
        }
        let mut plo = [f64::INFINITY; 2];
        let mut phi = [f64::NEG_INFINITY; 2];
        for p in &points {
            for k in 0..2 {
                plo[k] = plo[k].min(p[k]);
                phi[k] = phi[k].max(p[k]);
            }
        }
        let mut shrunk = false;
        for k in 0..2 {
            let new_lo = (plo[k] - spacing[k]).max(lo[k]);
            let new_hi = (phi[k] + spacing[k]).min(hi[k]);
            if new_hi - new_lo < 0.5 * (hi[k] - lo[k]) {
                lo[k] = new_lo;
                hi[k] = new_hi;
                shrunk = true;
            }
        }
        if !shrunk {
            break;
        }
    }
    let delta = if points.is_empty() {
        0.0
    } else {
        minimal_diameter(&points) / r
    };
    Ok(ThicknessEstimate {
        delta,
        error_bound: 2.0 * spacing[0].max(spacing[1]) / r,
        points: points.len(),
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;

    #[test]
    fn half_plane_is_one() {
        for &r in &[0.01, 0.3, 2.0] {
            let t = thickness(|p| p[1] < 0.0, [0.0, 0.0], r, 10_000).unwrap();
            assert!((t.delta - 1.0).abs() <= t.error_bound + 1e-12, "{t:?}");
        }
    }

    #[test]
    fn empty_intersection() {
        let t = thickness(|_| false, [0.0, 0.0], 1.0, 10_000).unwrap();
        assert_eq!(t.delta, 0.0);
        assert!(thickness(|_| true, [0.0, 0.0], 0.0, 10_000).is_err());
        assert!(thickness(|_| true, [0.0, 0.0], 1.0, 100).is_err());
    }

    #[test]
    fn cusp_complement_decays_linearly_for_gamma_two() {
        let d = Domain::cusp_model(2.0, 1.0).unwrap();
        let radii = [0.2, 0.1, 0.05, 0.025];
        let logs: Vec<(f64, f64)> = radii
            .iter()
            .map(|&r| {
                let t = thickness(|p| !d.inside(p), [0.0, 0.0], r, 10_000).unwrap();
                (r.ln(), t.delta.ln())
            })
            .collect();
        let slope = crate::freeboundary::fit_slope(&logs);
        assert!((slope - 1.0).abs() <= 0.1, "{slope}");
    }

    #[test]
    fn square_complement_at_edge_midpoint() {
        let sq = Domain::square([0.0, 0.0], 1.0).unwrap();
        let mut r = 0.2;
        while r > 0.005 {
            let t = thickness(|p| !sq.inside(p), [0.5, 0.0], r, 10_000).unwrap();
            assert!(t.delta >= 0.5, "r={r} {t:?}");
            r *= 0.5;
        }
    }

    #[test]
    fn scale_invariance() {
        let d = Domain::cusp_model(1.5, 1.0).unwrap();
        let base = thickness(|p| !d.inside(p), [0.0, 0.0], 0.1, 10_000).unwrap();
        for &s in &[0.5, 2.0] {
            let t = thickness(|p| !d.inside([p[0] / s, p[1] / s]), [0.0, 0.0], 0.1 * s, 10_000).unwrap();
            assert!((t.delta - base.delta).abs() <= base.error_bound.max(t.error_bound), "{s}");
        }
    }
}
