//! Separable evaluation of a band-limited field at new per-axis coordinates:
//! Fourier zero-padding to 4x oversampling followed by cubic Lagrange
//! interpolation on the fine samples. Coordinates outside the box give 0.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::model::CartesianGrid;

pub const OVERSAMPLE: usize = 4;

struct LineResampler {
    m: usize,
    fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
    x0: f64,
    fine_h: f64,
    extent: f64,
}

impl LineResampler {
    fn new(grid: &CartesianGrid) -> Self {
        let m = grid.points();
        let mut planner = FftPlanner::new();
        LineResampler {
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(OVERSAMPLE * m),
            x0: grid.axis_coord(0),
            fine_h: grid.spacing() / OVERSAMPLE as f64,
            extent: grid.extent(),
        }
    }

    /// Fine samples at `x0 + q h / OVERSAMPLE`.
    fn refine(&self, line: &[Complex64]) -> Vec<Complex64> {
        let m = self.m;
        let mf = OVERSAMPLE * m;
        let mut hat = line.to_vec();
        self.fwd.process(&mut hat);
        let mut fine = vec![Complex64::new(0.0, 0.0); mf];
        let half = m / 2;
        fine[..half].copy_from_slice(&hat[..half]);
        fine[mf - half + 1..].copy_from_slice(&hat[half + 1..]);
        // The Nyquist coefficient is shared between +M/2 and -M/2.
        fine[half] = 0.5 * hat[half];
        fine[mf - half] = 0.5 * hat[half];
        self.inv.process(&mut fine);
        let s = 1.0 / m as f64;
        for z in fine.iter_mut() {
            *z *= s;
        }
        fine
    }

    fn interpolate(&self, fine: &[Complex64], x: f64) -> Complex64 {
        if !(x >= -self.extent && x < self.extent) {
            return Complex64::new(0.0, 0.0);
        }
        let mf = fine.len() as isize;
        let s = (x - self.x0) / self.fine_h;
        let q = s.floor();
        let t = s - q;
        let q = q as isize;
        if t == 0.0 {
            return fine[q.rem_euclid(mf) as usize];
        }
        // Cubic Lagrange weights on nodes q-1, q, q+1, q+2.
        let w = [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ];
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, wk) in w.iter().enumerate() {
            let idx = (q - 1 + k as isize).rem_euclid(mf) as usize;
            acc += fine[idx] * wk;
        }
        acc
    }
}

/// Values of the field `values` (on `grid`) at the tensor-product points
/// `(targets[0][j0], ..., targets[N-1][jN-1])`. All target lists share one
/// length `K`; the output is laid out like a field with `K` points per axis.
pub fn resample(grid: &CartesianGrid, values: &[Complex64], targets: &[Vec<f64>]) -> Vec<Complex64> {
    let n = grid.dim();
    let m = grid.points();
    assert_eq!(targets.len(), n);
    let k_out = targets.first().map_or(m, Vec::len);
    assert!(targets.iter().all(|t| t.len() == k_out));
    let lr = LineResampler::new(grid);
    // Axes before `axis` already have k_out entries, the rest still have m.
    let mut data = values.to_vec();
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for (axis, tgt) in targets.iter().enumerate() {
        let outer_len = k_out.pow(axis as u32);
        let stride = m.pow((n - 1 - axis) as u32);
        let mut next = vec![Complex64::new(0.0, 0.0); outer_len * k_out * stride];
        for outer in 0..outer_len {
            for inner in 0..stride {
                let src = outer * m * stride + inner;
                let dst = outer * k_out * stride + inner;
                for (k, z) in line.iter_mut().enumerate() {
                    *z = data[src + k * stride];
                }
                let fine = lr.refine(&line);
                for (k, &x) in tgt.iter().enumerate() {
                    next[dst + k * stride] = lr.interpolate(&fine, x);
                }
            }
        }
        data = next;
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_and_band_limited_functions() {
        let g = CartesianGrid::cell(1, 64, std::f64::consts::PI).unwrap();
        let f = |x: f64| Complex64::new((3.0 * x).cos(), (2.0 * x).sin());
        let v: Vec<Complex64> = g.axis_coords().into_iter().map(f).collect();
        let same = resample(&g, &v, &[g.axis_coords()]);
        for (a, b) in v.iter().zip(&same) {
            assert!((a - b).norm() < 1e-14);
        }
        let shifted: Vec<f64> = g.axis_coords().iter().map(|x| 0.9 * x + 0.01).collect();
        let out = resample(&g, &v, &[shifted.clone()]);
        for (x, z) in shifted.iter().zip(&out) {
            assert!((f(*x) - z).norm() < 1e-6, "{x}");
        }
    }

    #[test]
    fn outside_box_is_zero() {
        let g = CartesianGrid::cell(1, 16, 1.0).unwrap();
        let v = vec![Complex64::new(1.0, 0.0); 16];
        let out = resample(&g, &v, &[vec![2.0; 16]]);
        assert!(out.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn target_size_may_differ() {
        let g = CartesianGrid::cell(2, 32, 4.0).unwrap();
        let f = |x: f64, y: f64| Complex64::new((-(x * x) - 2.0 * y * y).exp(), 0.0);
        let v: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let idx = g.unravel(i);
                f(g.axis_coord(idx[0]), g.axis_coord(idx[1]))
            })
            .collect();
        let xs: Vec<f64> = (0..20).map(|j| -3.0 + 0.3 * j as f64).collect();
        let out = resample(&g, &v, &[xs.clone(), xs.clone()]);
        assert_eq!(out.len(), 400);
        for (i, z) in out.iter().enumerate() {
            let (x, y) = (xs[i / 20], xs[i % 20]);
            assert!((f(x, y) - z).norm() < 1e-5, "({x}, {y})");
        }
    }
}
