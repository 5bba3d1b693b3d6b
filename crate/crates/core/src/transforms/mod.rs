//! Scaling and phase symmetries, the pseudo-conformal transform and the
//! explicit blow-up family `S_{T, lambda0, gamma0}`.

pub mod resample;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{InlsError, Result};
use crate::functionals::mass_of;
use crate::ground_state::GroundState;
use crate::model::{CartesianGrid, Field};

/// Relative mass allowed to fall outside the box under a transform.
pub const SUPPORT_TOL: f64 = 1e-10;

/// `(T, lambda0, gamma0)` of the blow-up family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SFamilyParams {
    #[serde(rename = "T")]
    pub t_blowup: f64,
    pub lambda0: f64,
    pub gamma0: f64,
}

impl SFamilyParams {
    pub fn new(t_blowup: f64, lambda0: f64, gamma0: f64) -> Result<Self> {
        let sp = SFamilyParams {
            t_blowup,
            lambda0,
            gamma0,
        };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return Err(InlsError::InvalidParams(format!(
                "lambda0 = {} must be positive",
                self.lambda0
            )));
        }
        if !(self.t_blowup.is_finite() && self.gamma0.is_finite()) {
            return Err(InlsError::InvalidParams("T and gamma0 must be finite".into()));
        }
        Ok(())
    }

    /// `lambda(t) = lambda0 / (T - t)`.
    pub fn lambda_at(&self, t: f64) -> f64 {
        self.lambda0 / (self.t_blowup - t)
    }
}

fn escaped_fraction(grid: &CartesianGrid, values: &[Complex64], half_width: f64) -> f64 {
    let total = mass_of(values, 1.0);
    if total == 0.0 {
        return 0.0;
    }
    let n = grid.dim();
    let axis = grid.axis_coords();
    let outside: f64 = values
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let idx = grid.unravel(*i);
            idx[..n].iter().any(|&j| axis[j].abs() > half_width)
        })
        .map(|(_, z)| z.norm_sqr())
        .sum();
    outside / total
}

/// `lambda0^{N/2} u(lambda0 x)`, resampled on the grid of `u`.
pub fn scale(u: &Field, lambda0: f64) -> Result<Field> {
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(InlsError::InvalidParams(format!("lambda0 = {lambda0} must be positive")));
    }
    let grid = u.grid();
    if lambda0 < 1.0 {
        let lost = escaped_fraction(grid, u.values(), lambda0 * grid.extent());
        if lost > SUPPORT_TOL {
            return Err(InlsError::SupportEscapes(format!(
                "scaling by {lambda0} pushes a mass fraction {lost:.3e} out of the box"
            )));
        }
    }
    let axis: Vec<f64> = grid.axis_coords().iter().map(|x| lambda0 * x).collect();
    let targets = vec![axis; grid.dim()];
    let amp = lambda0.powf(0.5 * grid.dim() as f64);
    let values = resample::resample(grid, u.values(), &targets)
        .into_iter()
        .map(|z| z * amp)
        .collect();
    Field::new(*grid, u.time(), values)
}

/// `e^{i gamma0} u`.
pub fn phase(u: &Field, gamma0: f64) -> Field {
    let rot = Complex64::from_polar(1.0, gamma0);
    let values = u.values().iter().map(|z| z * rot).collect();
    Field::new(*u.grid(), u.time(), values).expect("unit rotation keeps samples finite")
}

/// Closed form
/// `e^{i gamma0} e^{i lambda0^2/(T-t)} e^{-i|x|^2/4(T-t)} (lambda0/(T-t))^{N/2} psi(lambda0 x/(T-t))`.
pub fn s_family(sp: &SFamilyParams, gs: &GroundState, t: f64, grid: &CartesianGrid) -> Result<Field> {
    sp.validate()?;
    let tau = sp.t_blowup - t;
    if !(tau > 0.0) {
        return Err(InlsError::TimeOutOfRange(format!(
            "S-family is defined for t < T = {}, got t = {t}",
            sp.t_blowup
        )));
    }
    let profile = gs.radial().ok_or_else(|| {
        InlsError::NotApplicable("the S-family needs a radial ground-state profile".into())
    })?;
    let lambda = sp.lambda0 / tau;
    let escaped = profile.mass_outside(lambda * grid.extent()) / gs.mass_sq();
    if escaped > 1e-6 {
        return Err(InlsError::SupportEscapes(format!(
            "mass fraction {escaped:.3e} of S(t = {t}) lies outside the box"
        )));
    }
    let base = gs.sample_scaled(grid, lambda)?;
    let r2 = grid.radii_sq();
    let global = sp.gamma0 + sp.lambda0 * sp.lambda0 / tau;
    let values = base
        .values()
        .iter()
        .zip(&r2)
        .map(|(z, r)| z * Complex64::from_polar(1.0, global - r / (4.0 * tau)))
        .collect();
    Field::new(*grid, t, values)
}

/// Resolution diagnostics for sampling `S(t)` on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolution {
    /// Local chirp wavenumber `|x|/(2(T-t))` at the effective support radius.
    pub chirp_wavenumber: f64,
    /// `lambda(t)` times the profile bandwidth `PROFILE_BANDWIDTH`.
    pub profile_wavenumber: f64,
    /// `pi / h`.
    pub nyquist: f64,
    pub resolvable: bool,
}

/// Wavenumber (in units of `lambda(t)`) that the profile needs resolved.
pub const PROFILE_BANDWIDTH: f64 = 8.0;
/// Amplitude, relative to `psi(0)`, that defines the effective support.
pub const SUPPORT_AMPLITUDE: f64 = 1e-8;

/// Whether the chirp and the contracted profile of `S(t)` fit below the
/// Nyquist wavenumber of `grid`.
pub fn resolution(sp: &SFamilyParams, gs: &GroundState, t: f64, grid: &CartesianGrid) -> Result<Resolution> {
    let tau = sp.t_blowup - t;
    if !(tau > 0.0) {
        return Err(InlsError::TimeOutOfRange(format!("t = {t} is not before T = {}", sp.t_blowup)));
    }
    let lambda = sp.lambda0 / tau;
    let r_eff = effective_radius(gs) / lambda;
    let reach = r_eff.min(grid.extent() * (grid.dim() as f64).sqrt());
    let chirp = reach / (2.0 * tau);
    let prof = lambda * PROFILE_BANDWIDTH;
    let nyquist = std::f64::consts::PI / grid.spacing();
    Ok(Resolution {
        chirp_wavenumber: chirp,
        profile_wavenumber: prof,
        nyquist,
        resolvable: chirp + prof <= nyquist,
    })
}

fn effective_radius(gs: &GroundState) -> f64 {
    let target = SUPPORT_AMPLITUDE * gs.psi0();
    let mut r = 0.0;
    while r < gs.r_max() {
        match gs.eval(r) {
            Ok(v) if v > target => r += 0.05,
            _ => break,
        }
    }
    r
}

/// Pseudo-conformal transform of the snapshot `v = u(s, .)`:
/// `e^{-i|x|^2/4(T-t)} (T-t)^{-N/2} v(x/(T-t))` at `t = T - 1/s`, sampled on
/// `target`.
pub fn pseudo_conformal(v: &Field, s: f64, t_blowup: f64, target: &CartesianGrid) -> Result<Field> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(InlsError::TimeOutOfRange(format!(
            "internal time s = {s} must be positive so that T - t = 1/s > 0"
        )));
    }
    if target.dim() != v.grid().dim() {
        return Err(InlsError::InvalidGrid("target grid dimension differs".into()));
    }
    let tau = 1.0 / s;
    let t = t_blowup - tau;
    let src = v.grid();
    let reach = target.extent() / tau;
    if reach < src.extent() {
        let lost = escaped_fraction(src, v.values(), reach);
        if lost > SUPPORT_TOL {
            return Err(InlsError::SupportEscapes(format!(
                "mass fraction {lost:.3e} of the snapshot falls outside the target box"
            )));
        }
    }
    let axis: Vec<f64> = target.axis_coords().iter().map(|x| x / tau).collect();
    let targets = vec![axis; target.dim()];
    let sampled = if *target == src.scaled(tau)? {
        v.values().to_vec()
    } else {
        resample::resample(src, v.values(), &targets)
    };
    let amp = tau.powf(-0.5 * target.dim() as f64);
    let r2 = target.radii_sq();
    let values = sampled
        .iter()
        .zip(&r2)
        .map(|(z, r)| z * Complex64::from_polar(amp, -r / (4.0 * tau)))
        .collect();
    Field::new(*target, t, values)
}
