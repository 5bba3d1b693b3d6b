//! Seeded random fields and phases for property ensembles.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{mass_of, PhaseField};
use crate::error::{InlsError, Result};
use crate::model::{CartesianGrid, Field};
use crate::spectral::Spectral;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random field: a sum of `packets` Gaussian wave packets
/// centered within `spread` of the origin, projected onto the Fourier modes
/// with `|k| <= kmax`.
#[derive(Debug, Clone, Copy)]
pub struct RandomFieldSpec {
    pub packets: usize,
    pub spread: f64,
    pub width: (f64, f64),
    pub max_wavenumber: f64,
    pub kmax: f64,
}

impl Default for RandomFieldSpec {
    fn default() -> Self {
        RandomFieldSpec {
            packets: 3,
            spread: 1.5,
            width: (0.5, 2.0),
            max_wavenumber: 2.0,
            kmax: 12.0,
        }
    }
}

pub fn band_limited<R: Rng>(grid: &CartesianGrid, spec: &RandomFieldSpec, rng: &mut R) -> Result<Field> {
    let n = grid.dim();
    let packets: Vec<_> = (0..spec.packets.max(1))
        .map(|_| {
            let amp = Complex64::from_polar(rng.gen_range(0.3..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
            let width = rng.gen_range(spec.width.0..=spec.width.1);
            let mut center = [0.0; 3];
            let mut k = [0.0; 3];
            for d in 0..n {
                center[d] = rng.gen_range(-spec.spread..=spec.spread);
                k[d] = rng.gen_range(-spec.max_wavenumber..=spec.max_wavenumber);
            }
            (amp, width, center, k)
        })
        .collect();
    let mut values: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            packets
                .iter()
                .map(|(amp, width, c, k)| {
                    let mut r2 = 0.0;
                    let mut phase = 0.0;
                    for d in 0..n {
                        r2 += (x[d] - c[d]).powi(2);
                        phase += k[d] * x[d];
                    }
                    amp * Complex64::from_polar((-0.5 * r2 / (width * width)).exp(), phase)
                })
                .sum()
        })
        .collect();
    let sp = Spectral::new(grid);
    sp.forward(&mut values);
    let kappa = grid.wavenumbers();
    let kk = spec.kmax * spec.kmax;
    for (i, z) in values.iter_mut().enumerate() {
        let idx = grid.unravel(i);
        let k2: f64 = idx[..n].iter().map(|&j| kappa[j] * kappa[j]).sum();
        if k2 > kk {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    sp.inverse(&mut values);
    Field::new(*grid, 0.0, values)
}

/// Rescales `u` to have mass `target`.
pub fn normalize_to_mass(u: &Field, target: f64) -> Result<Field> {
    let m = mass_of(u.values(), u.grid().cell_volume());
    if !(m > 0.0) {
        return Err(InlsError::ZeroDenominator("cannot normalize the zero field".into()));
    }
    Ok(u.scaled_by((target / m).sqrt()))
}

/// Random smooth phase: a quadratic part plus Gaussian bumps, with exact
/// gradient.
pub fn random_phase<R: Rng>(grid: &CartesianGrid, rng: &mut R) -> Result<PhaseField> {
    let n = grid.dim();
    let quad = rng.gen_range(-0.5..0.5);
    let mut lin = [0.0; 3];
    for l in lin.iter_mut().take(n) {
        *l = rng.gen_range(-1.0..1.0);
    }
    let bumps: Vec<(f64, f64, [f64; 3])> = (0..3)
        .map(|_| {
            let mut c = [0.0; 3];
            for v in c.iter_mut().take(n) {
                *v = rng.gen_range(-2.0..2.0);
            }
            (rng.gen_range(-2.0..2.0), rng.gen_range(0.5..2.0), c)
        })
        .collect();
    let bumps2 = bumps.clone();
    PhaseField::from_fn(
        *grid,
        move |x| {
            let mut v = 0.0;
            let mut r2 = 0.0;
            for d in 0..x.len() {
                r2 += x[d] * x[d];
                v += lin[d] * x[d];
            }
            v += 0.5 * quad * r2;
            for (a, s, c) in &bumps {
                let q: f64 = (0..x.len()).map(|d| (x[d] - c[d]).powi(2)).sum();
                v += a * (-0.5 * q / (s * s)).exp();
            }
            v
        },
        move |x, g| {
            for d in 0..x.len() {
                g[d] = lin[d] + quad * x[d];
            }
            for (a, s, c) in &bumps2 {
                let q: f64 = (0..x.len()).map(|d| (x[d] - c[d]).powi(2)).sum();
                let e = a * (-0.5 * q / (s * s)).exp();
                for d in 0..x.len() {
                    g[d] -= e * (x[d] - c[d]) / (s * s);
                }
            }
        },
    )
}
