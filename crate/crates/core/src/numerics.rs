//! Small numerical kernels shared across modules.

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Kahan-compensated sum; the reductions feed identities checked near
/// machine precision.
pub fn ksum(it: impl IntoIterator<Item = f64>) -> f64 {
    // Four interleaved accumulators keep the dependency chains short.
    let mut s = [0.0f64; 4];
    let mut c = [0.0f64; 4];
    let mut it = it.into_iter();
    'outer: loop {
        for l in 0..4 {
            let Some(v) = it.next() else { break 'outer };
            let y = v - c[l];
            let t = s[l] + y;
            c[l] = (t - s[l]) - y;
            s[l] = t;
        }
    }
    let mut total = 0.0;
    let mut comp = 0.0;
    for l in 0..4 {
        for v in [s[l], -c[l]] {
            let y = v - comp;
            let t = total + y;
            comp = (t - total) - y;
            total = t;
        }
    }
    total
}

/// `e^{i theta}`, using a short series when `|theta|` is small.
#[inline]
pub fn cis(theta: f64) -> num_complex::Complex64 {
    if theta.abs() < 0.1 {
        let q = theta * theta;
        const C: [f64; 7] = [
            1.0,
            -1.0 / 2.0,
            1.0 / 24.0,
            -1.0 / 720.0,
            1.0 / 40320.0,
            -1.0 / 3628800.0,
            1.0 / 479001600.0,
        ];
        const S: [f64; 7] = [
            1.0,
            -1.0 / 6.0,
            1.0 / 120.0,
            -1.0 / 5040.0,
            1.0 / 362880.0,
            -1.0 / 39916800.0,
            1.0 / 6227020800.0,
        ];
        let mut cos = C[6];
        let mut sin = S[6];
        for k in (0..6).rev() {
            cos = cos * q + C[k];
            sin = sin * q + S[k];
        }
        let sin = sin * theta;
        num_complex::Complex64::new(cos, sin)
    } else {
        num_complex::Complex64::cis(theta)
    }
}

/// `x^e` for `x >= 0`, with fast paths for integer and half-integer `e`.
#[derive(Debug, Clone, Copy)]
pub enum Power {
    Int(i32),
    HalfInt(i32),
    General(f64),
}

impl Power {
    pub fn new(e: f64) -> Self {
        let twice = 2.0 * e;
        if (e - e.round()).abs() < 1e-14 && e.abs() < 64.0 {
            Power::Int(e.round() as i32)
        } else if (twice - twice.round()).abs() < 1e-14 && e.abs() < 64.0 {
            Power::HalfInt((e - 0.5).round() as i32)
        } else {
            Power::General(e)
        }
    }

    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Power::Int(k) => x.powi(k),
            Power::HalfInt(k) => x.powi(k) * x.sqrt(),
            Power::General(e) => {
                if x == 0.0 {
                    if e > 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    x.powf(e)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg} q={q}");
            }
        }
    }

    #[test]
    fn power_fast_paths() {
        for e in [0.0, 1.0, 1.5, 2.0, 0.5, 2.0 / 3.0, -0.25, 3.5] {
            let p = Power::new(e);
            for x in [0.3, 1.0, 2.7] {
                let want: f64 = f64::powf(x, e);
                assert!((p.eval(x) - want).abs() < 1e-14 * want.max(1.0), "{e} {x}");
            }
        }
        assert!(matches!(Power::new(1.5), Power::HalfInt(1)));
        assert!(matches!(Power::new(0.5), Power::HalfInt(0)));
        assert_eq!(Power::new(1.5).eval(0.0), 0.0);
        assert_eq!(Power::new(2.0 / 3.0).eval(0.0), 0.0);
    }
}
