//! FFT-based derivative machinery on a periodic [`CartesianGrid`].

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::model::CartesianGrid;

/// Element count above which pointwise loops go through rayon.
pub const PAR_THRESHOLD: usize = 1 << 16;

/// FFT plans and Fourier symbols for one grid.
///
/// The Laplacian symbol is `-K` with `K = sum_d kappa_d^2`, where `kappa` is
/// the wavenumber with its Nyquist entry zeroed; the same `kappa` defines the
/// gradient, so `||grad u||^2` equals `<u, K u>` exactly.
pub struct Spectral {
    grid: CartesianGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kappa: Vec<f64>,
    k2: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &CartesianGrid) -> Self {
        let mut planner = FftPlanner::new();
        let m = grid.points();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let kappa = grid.wavenumbers();
        let sq: Vec<f64> = kappa.iter().map(|k| k * k).collect();
        let k2 = (0..grid.len())
            .map(|i| {
                let idx = grid.unravel(i);
                idx[..grid.dim()].iter().map(|&j| sq[j]).sum()
            })
            .collect();
        Spectral {
            grid: *grid,
            forward,
            inverse,
            kappa,
            k2,
        }
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    /// `K = |kappa|^2` in FFT order.
    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform in place, including the `1/M^N` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let s = 1.0 / self.grid.len() as f64;
        for_each_mut(data, |z| *z *= s);
    }

    /// Inverse transform without the `1/M^N` factor.
    pub fn inverse_unscaled(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.grid.len());
        let m = self.grid.points();
        let n = self.grid.dim();
        let total = data.len();
        let scratch_len = plan.get_inplace_scratch_len();
        let run_rows = |rows: &mut [Complex64]| {
            if rows.len() >= PAR_THRESHOLD {
                rows.par_chunks_mut((PAR_THRESHOLD / 4 / m).max(1) * m)
                    .for_each_init(
                        || vec![Complex64::new(0.0, 0.0); scratch_len],
                        |scratch, chunk| plan.process_with_scratch(chunk, scratch),
                    );
            } else {
                let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
                plan.process_with_scratch(rows, &mut scratch);
            }
        };
        // Last axis is contiguous.
        run_rows(data);
        if n == 1 {
            return;
        }
        let mut lines = vec![Complex64::new(0.0, 0.0); total];
        for axis in 0..n - 1 {
            let stride = m.pow((n - 1 - axis) as u32);
            let block = m * stride;
            gather(&mut lines, m, |line, k| {
                let outer = line / stride;
                let inner = line % stride;
                data[outer * block + k * stride + inner]
            });
            run_rows(&mut lines);
            let src = &lines;
            let put = |idx: usize, z: &mut Complex64| {
                let outer = idx / block;
                let rem = idx % block;
                let k = rem / stride;
                let inner = rem % stride;
                *z = src[(outer * stride + inner) * m + k];
            };
            if total >= PAR_THRESHOLD {
                data.par_iter_mut().enumerate().for_each(|(i, z)| put(i, z));
            } else {
                data.iter_mut().enumerate().for_each(|(i, z)| put(i, z));
            }
        }
    }

    /// Spectral partial derivative along `axis` of the samples in `u_hat`
    /// (already transformed), returned in physical space.
    pub fn derivative_from_hat(&self, u_hat: &[Complex64], axis: usize) -> Vec<Complex64> {
        let m = self.grid.points();
        let n = self.grid.dim();
        let stride = m.pow((n - 1 - axis) as u32);
        let mut out: Vec<Complex64> = u_hat
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let j = (i / stride) % m;
                z * Complex64::new(0.0, self.kappa[j])
            })
            .collect();
        self.inverse(&mut out);
        out
    }

    /// All partial derivatives of `u`.
    pub fn gradient(&self, u: &[Complex64]) -> Vec<Vec<Complex64>> {
        let mut hat = u.to_vec();
        self.forward(&mut hat);
        (0..self.grid.dim())
            .map(|d| self.derivative_from_hat(&hat, d))
            .collect()
    }

    /// `||grad u||_2^2` through Parseval.
    pub fn grad_norm_sq(&self, u: &[Complex64]) -> f64 {
        let mut hat = u.to_vec();
        self.forward(&mut hat);
        self.grad_norm_sq_from_hat(&hat)
    }

    pub fn grad_norm_sq_from_hat(&self, hat: &[Complex64]) -> f64 {
        let s = crate::numerics::ksum(hat.iter().zip(&self.k2).map(|(z, k)| k * z.norm_sqr()));
        s * self.grid.cell_volume() / self.grid.len() as f64
    }

    /// `-Delta u` in physical space.
    pub fn neg_laplacian(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut hat = u.to_vec();
        self.forward(&mut hat);
        for (z, k) in hat.iter_mut().zip(&self.k2) {
            *z *= *k;
        }
        self.inverse(&mut hat);
        hat
    }
}

fn gather(lines: &mut [Complex64], m: usize, src: impl Fn(usize, usize) -> Complex64 + Sync) {
    if lines.len() >= PAR_THRESHOLD {
        lines.par_chunks_mut(m).enumerate().for_each(|(line, chunk)| {
            for (k, z) in chunk.iter_mut().enumerate() {
                *z = src(line, k);
            }
        });
    } else {
        for (line, chunk) in lines.chunks_mut(m).enumerate() {
            for (k, z) in chunk.iter_mut().enumerate() {
                *z = src(line, k);
            }
        }
    }
}

/// Applies `f` to every element, in parallel for large slices.
pub fn for_each_mut<T: Send>(data: &mut [T], f: impl Fn(&mut T) + Sync + Send) {
    if data.len() >= PAR_THRESHOLD {
        data.par_iter_mut().for_each(f);
    } else {
        data.iter_mut().for_each(f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn roundtrip_all_dims() {
        for dim in 1..=3 {
            let g = CartesianGrid::cell(dim, 8, 1.0).unwrap();
            let s = Spectral::new(&g);
            let u: Vec<Complex64> = (0..g.len())
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect();
            let mut v = u.clone();
            s.forward(&mut v);
            s.inverse(&mut v);
            for (a, b) in u.iter().zip(&v) {
                assert!(close(*a, *b, 1e-13));
            }
        }
    }

    #[test]
    fn derivative_of_plane_wave() {
        let g = CartesianGrid::cell(3, 8, std::f64::consts::PI).unwrap();
        let s = Spectral::new(&g);
        let u: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let x = g.position(i);
                Complex64::new(0.0, 2.0 * x[0] - x[1] + 3.0 * x[2]).exp()
            })
            .collect();
        let grad = s.gradient(&u);
        for (axis, k) in [2.0, -1.0, 3.0].iter().enumerate() {
            for (d, z) in grad[axis].iter().zip(&u) {
                assert!(close(*d, Complex64::new(0.0, *k) * z, 1e-11));
            }
        }
        let want = 14.0 * g.box_volume();
        assert!((s.grad_norm_sq(&u) - want).abs() < 1e-9 * want);
    }

    #[test]
    fn nyquist_mode_has_zero_derivative() {
        let g = CartesianGrid::cell(1, 8, std::f64::consts::PI).unwrap();
        let s = Spectral::new(&g);
        let u: Vec<Complex64> = (0..8)
            .map(|j| Complex64::new(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        assert!(s.grad_norm_sq(&u).abs() < 1e-20);
    }
}
