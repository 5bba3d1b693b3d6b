//! Quadrature weights `w_j ~ |x_j|^{-b}` for the potential term.
//!
//! With [`WeightRule::CellAverage`] a node whose cell lies within `radius` of
//! the origin gets the exact mean of `|x|^{-b}` over its cell, so that
//! `sum_j w_j f(x_j) h^N` is second order for smooth `f`. Further out the
//! weight is the point value.

use rayon::prelude::*;

use super::{CartesianGrid, Centering};
use crate::error::{InlsError, Result};
use crate::numerics::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightRule {
    /// `|x_j|^{-b}` at every node; rejected when a node sits at the origin.
    Pointwise,
    /// Cell averages for cells whose center lies within `radius` of the origin.
    CellAverage { radius: f64 },
}

impl WeightRule {
    /// Cell averages inside `max(2h, 1)`.
    pub fn default_for(grid: &CartesianGrid) -> Self {
        WeightRule::CellAverage {
            radius: (2.0 * grid.spacing()).max(1.0),
        }
    }
}

pub fn potential_weights(grid: &CartesianGrid, b: f64, rule: WeightRule) -> Result<Vec<f64>> {
    if b == 0.0 {
        return Ok(vec![1.0; grid.len()]);
    }
    if !(b > 0.0 && b < grid.dim() as f64) {
        return Err(InlsError::InvalidParams(format!(
            "weight exponent b = {b} must satisfy 0 <= b < N = {}",
            grid.dim()
        )));
    }
    let h = grid.spacing();
    let radius = match rule {
        WeightRule::Pointwise => {
            if grid.centering() == Centering::Node {
                return Err(InlsError::SingularWeight(
                    "node-centered grid has a node at the origin; use cell averaging".into(),
                ));
            }
            -1.0
        }
        WeightRule::CellAverage { radius } => radius.max(0.5 * h * (grid.dim() as f64).sqrt()),
    };

    let n = grid.dim();
    let axis = grid.axis_coords();
    let mut w = vec![0.0; grid.len()];
    if n == 1 {
        for (wj, &x) in w.iter_mut().zip(&axis) {
            *wj = if x.abs() <= radius {
                cell_average_1d(x - 0.5 * h, x + 0.5 * h, b)
            } else {
                x.abs().powf(-b)
            };
        }
        return Ok(w);
    }

    w.par_iter_mut().enumerate().for_each(|(i, wi)| {
        let idx = grid.unravel(i);
        let mut x = [0.0; 3];
        let mut r2 = 0.0;
        for d in 0..n {
            x[d] = axis[idx[d]];
            r2 += x[d] * x[d];
        }
        let r = r2.sqrt();
        *wi = if r <= radius {
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for d in 0..n {
                lo[d] = x[d] - 0.5 * h;
                hi[d] = x[d] + 0.5 * h;
            }
            box_integral(&lo[..n], &hi[..n], b) / h.powi(n as i32)
        } else {
            r.powf(-b)
        };
    });
    Ok(w)
}

/// Mean of `|x|^{-b}` over `[a, c]`, `0 <= b < 1`.
pub fn cell_average_1d(a: f64, c: f64, b: f64) -> f64 {
    let f = |t: f64| t.signum() * t.abs().powf(1.0 - b) / (1.0 - b);
    (f(c) - f(a)) / (c - a)
}

/// `int_B |x|^{-b} dx` over an axis-aligned box, `0 < b < N`.
pub fn box_integral(lo: &[f64], hi: &[f64], b: f64) -> f64 {
    let n = lo.len();
    if n == 1 {
        return cell_average_1d(lo[0], hi[0], b) * (hi[0] - lo[0]);
    }
    let contains = (0..n).all(|d| lo[d] <= 0.0 && hi[d] >= 0.0);
    if !contains {
        return regular_integral(lo, hi, b);
    }
    // Split along every axis at 0; each piece has the origin as a corner.
    let mut total = 0.0;
    for mask in 0..(1usize << n) {
        let mut widths = [0.0; 3];
        let mut empty = false;
        for d in 0..n {
            widths[d] = if mask >> d & 1 == 1 { hi[d] } else { -lo[d] };
            if widths[d] <= 0.0 {
                empty = true;
            }
        }
        if !empty {
            total += corner_integral(&widths[..n], b);
        }
    }
    total
}

/// Integral over `[0, c_1] x ... x [0, c_N]`. Halving the box scales the
/// integral by `2^{b-N}`, so it equals the integral over the box minus its
/// lower-corner half, divided by `1 - 2^{b-N}`.
fn corner_integral(c: &[f64], b: f64) -> f64 {
    let n = c.len();
    let mut acc = 0.0;
    for mask in 1..(1usize << n) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for d in 0..n {
            if mask >> d & 1 == 1 {
                lo[d] = 0.5 * c[d];
                hi[d] = c[d];
            } else {
                hi[d] = 0.5 * c[d];
            }
        }
        acc += regular_integral(&lo[..n], &hi[..n], b);
    }
    acc / (1.0 - 2f64.powf(b - n as f64))
}

/// Tensor Gauss-Legendre on a box bounded away from the origin, bisected
/// until the box is no larger than its distance to the origin.
fn regular_integral(lo: &[f64], hi: &[f64], b: f64) -> f64 {
    let n = lo.len();
    let mut dist2 = 0.0;
    let mut diam2 = 0.0;
    for d in 0..n {
        let near = if lo[d] > 0.0 {
            lo[d]
        } else if hi[d] < 0.0 {
            -hi[d]
        } else {
            0.0
        };
        dist2 += near * near;
        diam2 += (hi[d] - lo[d]).powi(2);
    }
    if dist2 >= diam2 {
        let order = if dist2 >= 16.0 * diam2 { 6 } else { 12 };
        return tensor_gauss(lo, hi, b, order);
    }
    let mut total = 0.0;
    for mask in 0..(1usize << n) {
        let mut clo = [0.0; 3];
        let mut chi = [0.0; 3];
        for d in 0..n {
            let mid = 0.5 * (lo[d] + hi[d]);
            if mask >> d & 1 == 1 {
                clo[d] = mid;
                chi[d] = hi[d];
            } else {
                clo[d] = lo[d];
                chi[d] = mid;
            }
        }
        total += regular_integral(&clo[..n], &chi[..n], b);
    }
    total
}

fn tensor_gauss(lo: &[f64], hi: &[f64], b: f64, order: usize) -> f64 {
    thread_local! {
        static RULES: std::cell::RefCell<Vec<Option<(Vec<f64>, Vec<f64>)>>> =
            const { std::cell::RefCell::new(Vec::new()) };
    }
    RULES.with(|rules| {
        let mut rules = rules.borrow_mut();
        if rules.len() <= order {
            rules.resize(order + 1, None);
        }
        let (x, w) = rules[order].get_or_insert_with(|| gauss_legendre(order));
        let n = lo.len();
        let half: Vec<f64> = (0..n).map(|d| 0.5 * (hi[d] - lo[d])).collect();
        let mid: Vec<f64> = (0..n).map(|d| 0.5 * (hi[d] + lo[d])).collect();
        let total_points = order.pow(n as u32);
        let mut sum = 0.0;
        for k in 0..total_points {
            let mut rem = k;
            let mut r2 = 0.0;
            let mut wt = 1.0;
            for d in 0..n {
                let q = rem % order;
                rem /= order;
                let xd = mid[d] + half[d] * x[q];
                r2 += xd * xd;
                wt *= w[q];
            }
            sum += wt * r2.powf(-0.5 * b);
        }
        sum * half.iter().product::<f64>()
    })
}
