use serde::Serialize;

use crate::error::{InlsError, Result};

/// Least-squares fit of `log g = -alpha log(T - t) + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub alpha: f64,
    pub t_fit: f64,
    pub c: f64,
    /// Root-mean-square residual of the log fit.
    pub rms: f64,
}

fn fit_fixed(times: &[f64], values: &[f64], t_fit: f64) -> RateFit {
    let n = times.len() as f64;
    let xs: Vec<f64> = times.iter().map(|t| (t_fit - t).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    RateFit {
        alpha: -slope,
        t_fit,
        c: my - slope * mx,
        rms: (ss / n).sqrt(),
    }
}

/// Fits the blow-up law to `(t_i, g_i)`. With `t_blowup = None` the blow-up
/// time is a free parameter, searched beyond the last sample.
pub fn fit_rate(times: &[f64], values: &[f64], t_blowup: Option<f64>) -> Result<RateFit> {
    if times.len() != values.len() || times.len() < 3 {
        return Err(InlsError::InsufficientData("a rate fit needs at least three samples".into()));
    }
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(InlsError::NonFinite("rate fit needs positive finite values".into()));
    }
    let t_last = times[times.len() - 1];
    let span = t_last - times[0];
    if !(span > 0.0) {
        return Err(InlsError::InsufficientData("samples must span a time interval".into()));
    }
    if let Some(t) = t_blowup {
        if !(t > t_last) {
            return Err(InlsError::TimeOutOfRange(format!(
                "blow-up time {t} must follow the last sample {t_last}"
            )));
        }
        return Ok(fit_fixed(times, values, t));
    }
    // Search log(T - t_last) on a coarse grid, then refine by golden section.
    let lo = (span * 1e-6).ln();
    let hi = (span * 1e2).ln();
    let eval = |s: f64| fit_fixed(times, values, t_last + s.exp());
    let n = 200;
    let (mut best, mut best_s) = (f64::INFINITY, lo);
    for i in 0..=n {
        let s = lo + (hi - lo) * i as f64 / n as f64;
        let r = eval(s).rms;
        if r < best {
            best = r;
            best_s = s;
        }
    }
    let step = (hi - lo) / n as f64;
    let (mut a, mut b) = (best_s - step, best_s + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if eval(c).rms < eval(d).rms {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(eval(0.5 * (a + b)))
}
