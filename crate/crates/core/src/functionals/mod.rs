//! Conserved quantities, sharp inequalities and virial quantities on
//! discrete fields.

mod phase;
pub mod random;

pub use phase::PhaseField;

use num_complex::Complex64;
use serde::Serialize;

use crate::discretization::Discretization;
use crate::error::{InlsError, Result};
use crate::model::Field;
use crate::numerics::ksum;

/// Energy split into its two signed parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// `(1/2) ||grad u||^2`
    pub kinetic: f64,
    /// `(1/(p+1)) int |x|^{-b} |u|^{p+1}`
    pub potential: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(kinetic: f64, potential: f64) -> Self {
        EnergyBreakdown {
            kinetic,
            potential,
            total: kinetic - potential,
        }
    }

    pub fn grad_sq(&self) -> f64 {
        2.0 * self.kinetic
    }
}

/// How [`virial_gamma`] reacts to a field that has not decayed at the box
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    #[default]
    Warn,
    Strict,
    Ignore,
}

/// Relative amplitude allowed on the outermost layer of samples.
pub const BOUNDARY_DECAY: f64 = 1e-10;

pub fn mass(u: &Field) -> Result<f64> {
    u.check_finite()?;
    Ok(mass_of(u.values(), u.grid().cell_volume()))
}

pub(crate) fn mass_of(values: &[Complex64], cell: f64) -> f64 {
    ksum(values.iter().map(|z| z.norm_sqr())) * cell
}

/// `int |x|^{-b} |u|^{p+1}` by the weighted product-midpoint rule.
pub fn potential_integral(u: &Field, disc: &Discretization) -> Result<f64> {
    disc.check_field(u)?;
    Ok(potential_integral_of(u.values(), disc))
}

pub(crate) fn potential_integral_of(values: &[Complex64], disc: &Discretization) -> f64 {
    let pw = disc.potential_power();
    ksum(
        values
            .iter()
            .zip(disc.weights())
            .map(|(z, w)| w * pw.eval(z.norm_sqr())),
    ) * disc.grid().cell_volume()
}

pub fn grad_norm_sq(u: &Field, disc: &Discretization) -> Result<f64> {
    disc.check_field(u)?;
    Ok(disc.spectral().grad_norm_sq(u.values()))
}

pub fn energy(u: &Field, disc: &Discretization) -> Result<EnergyBreakdown> {
    disc.check_field(u)?;
    let e = energy_of(u.values(), disc);
    if !(e.kinetic.is_finite() && e.potential.is_finite()) {
        return Err(InlsError::NonFinite("energy".into()));
    }
    Ok(e)
}

pub(crate) fn energy_of(values: &[Complex64], disc: &Discretization) -> EnergyBreakdown {
    let kin = 0.5 * disc.spectral().grad_norm_sq(values);
    let pot = potential_integral_of(values, disc) / (disc.params().p() + 1.0);
    EnergyBreakdown::new(kin, pot)
}

/// `||grad u||^2 ||u||^{p-1} / int |x|^{-b}|u|^{p+1}`.
pub fn weinstein_j(u: &Field, disc: &Discretization) -> Result<f64> {
    disc.check_field(u)?;
    let den = potential_integral_of(u.values(), disc);
    if !(den > 0.0) {
        return Err(InlsError::ZeroDenominator(
            "potential integral vanishes in the Weinstein functional".into(),
        ));
    }
    let g = disc.spectral().grad_norm_sq(u.values());
    let m = mass_of(u.values(), disc.grid().cell_volume());
    Ok(g * m.powf(0.5 * (disc.params().p() - 1.0)) / den)
}

/// `E(u) - (1/2)||grad u||^2 (1 - (M(u)/M(psi))^{(2-b)/N})`, which the sharp
/// Gagliardo-Nirenberg inequality makes nonnegative. `psi_mass` is `||psi||_2^2`.
pub fn gn_gap(u: &Field, psi_mass: f64, disc: &Discretization) -> Result<f64> {
    let e = energy(u, disc)?;
    let m = mass_of(u.values(), disc.grid().cell_volume());
    let ratio = (m / psi_mass).powf(0.5 * disc.params().mass_exponent());
    Ok(e.total - e.kinetic * (1.0 - ratio))
}

/// Upper bound on `||grad u(t)||^2` for data below the critical mass:
/// `2 E(u0) / (1 - (M(u0)/M(psi))^{(2-b)/N})`.
pub fn subcritical_grad_bound(e0: f64, mass0: f64, psi_mass: f64, disc: &Discretization) -> Result<f64> {
    let ratio = (mass0 / psi_mass).powf(0.5 * disc.params().mass_exponent());
    if ratio >= 1.0 {
        return Err(InlsError::MassMismatch(format!(
            "mass {mass0} is not below the critical mass {psi_mass}"
        )));
    }
    Ok(2.0 * e0 / (1.0 - ratio))
}

fn boundary_check(u: &Field, policy: BoundaryPolicy) -> Result<()> {
    if policy == BoundaryPolicy::Ignore {
        return Ok(());
    }
    let g = u.grid();
    let h = g.spacing();
    let peak = u.values().iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if peak == 0.0 {
        return Ok(());
    }
    let edge = (0..g.len())
        .filter(|&i| g.in_boundary_layer(i, h))
        .fold(0.0f64, |a, i| a.max(u.values()[i].norm()));
    if edge > BOUNDARY_DECAY * peak {
        let msg = format!(
            "boundary amplitude {edge:.3e} exceeds {BOUNDARY_DECAY:e} of the peak {peak:.3e}"
        );
        if policy == BoundaryPolicy::Strict {
            return Err(InlsError::BoundaryContamination(msg));
        }
        log::warn!("virial truncation: {msg}");
    }
    Ok(())
}

/// `Gamma = int |x|^2 |u|^2`.
pub fn virial_gamma(u: &Field, policy: BoundaryPolicy) -> Result<f64> {
    u.check_finite()?;
    boundary_check(u, policy)?;
    let r2 = u.grid().radii_sq();
    Ok(ksum(u.values().iter().zip(&r2).map(|(z, r)| r * z.norm_sqr())) * u.grid().cell_volume())
}

/// `Gamma' = 4 Im int conj(u) (x . grad u)`.
pub fn virial_gamma_prime(u: &Field, disc: &Discretization, policy: BoundaryPolicy) -> Result<f64> {
    disc.check_field(u)?;
    boundary_check(u, policy)?;
    let grad = disc.spectral().gradient(u.values());
    let g = disc.grid();
    let axis = g.axis_coords();
    let n = g.dim();
    let s = ksum((0..g.len()).map(|i| {
        let idx = g.unravel(i);
        let mut xg = Complex64::new(0.0, 0.0);
        for d in 0..n {
            xg += grad[d][i] * axis[idx[d]];
        }
        (u.values()[i].conj() * xg).im
    }));
    Ok(4.0 * s * g.cell_volume())
}

/// `int grad(theta) . Im(conj(u) grad u)`.
pub fn phase_momentum(u: &Field, theta: &PhaseField, disc: &Discretization) -> Result<f64> {
    disc.check_field(u)?;
    theta.check_grid(disc.grid())?;
    let grad = disc.spectral().gradient(u.values());
    let n = disc.grid().dim();
    let s = ksum((0..u.values().len()).map(|i| {
        let c = u.values()[i].conj();
        (0..n).map(|d| theta.gradient()[d][i] * (c * grad[d][i]).im).sum::<f64>()
    }));
    Ok(s * disc.grid().cell_volume())
}

/// `int |grad theta|^2 |u|^2`.
pub fn phase_weighted_mass(u: &Field, theta: &PhaseField) -> Result<f64> {
    theta.check_grid(u.grid())?;
    let n = u.grid().dim();
    let s = ksum((0..u.values().len()).map(|i| {
        let g2: f64 = (0..n).map(|d| theta.gradient()[d][i].powi(2)).sum();
        g2 * u.values()[i].norm_sqr()
    }));
    Ok(s * u.grid().cell_volume())
}

/// Both sides of the Banica inequality
/// `|int grad(theta).Im(conj(u) grad u)| <= sqrt(2E(u)) (int |grad theta|^2 |u|^2)^{1/2}`
/// for `u` at the critical mass `psi_mass`.
pub fn banica_lhs_rhs(
    u: &Field,
    theta: &PhaseField,
    disc: &Discretization,
    psi_mass: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let m = mass(u)?;
    if (m.sqrt() - psi_mass.sqrt()).abs() >= tol {
        return Err(InlsError::MassMismatch(format!(
            "||u|| = {} differs from the critical norm {} by more than {tol:e}",
            m.sqrt(),
            psi_mass.sqrt()
        )));
    }
    let e = energy(u, disc)?.total;
    if e < -tol {
        return Err(InlsError::NegativeEnergy(e));
    }
    let lhs = phase_momentum(u, theta, disc)?.abs();
    let rhs = (2.0 * e.max(0.0)).sqrt() * phase_weighted_mass(u, theta)?.sqrt();
    Ok((lhs, rhs))
}

/// `E(u) + s int grad(theta).Im(conj(u) grad u) + (s^2/2) int |grad theta|^2|u|^2`,
/// the energy of `u e^{i s theta}` expanded in `s`.
pub fn phase_modulated_energy(u: &Field, theta: &PhaseField, s: f64, disc: &Discretization) -> Result<f64> {
    let e = energy(u, disc)?.total;
    let mom = phase_momentum(u, theta, disc)?;
    let w = phase_weighted_mass(u, theta)?;
    Ok(e + s * mom + 0.5 * s * s * w)
}

/// `u e^{i s theta}`.
pub fn modulate(u: &Field, theta: &PhaseField, s: f64) -> Result<Field> {
    theta.check_grid(u.grid())?;
    let values = u
        .values()
        .iter()
        .zip(theta.values())
        .map(|(z, t)| z * Complex64::from_polar(1.0, s * t))
        .collect();
    Field::new(*u.grid(), u.time(), values)
}

/// `int_{|x| < R} |u|^2`.
pub fn mass_within(u: &Field, radius: f64) -> f64 {
    let r2 = u.grid().radii_sq();
    let rr = radius * radius;
    ksum(
        u.values()
            .iter()
            .zip(&r2)
            .filter(|(_, &r)| r < rr)
            .map(|(z, _)| z.norm_sqr()),
    ) * u.grid().cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CartesianGrid, Params};

    fn disc1() -> Discretization {
        Discretization::new(Params::new(1, 0.5).unwrap(), CartesianGrid::cell(1, 256, 10.0).unwrap()).unwrap()
    }

    #[test]
    fn constant_field_mass() {
        let g = CartesianGrid::cell(2, 8, 1.5).unwrap();
        let u = Field::from_fn(g, 0.0, |_| Complex64::new(0.6, -0.8)).unwrap();
        assert!((mass(&u).unwrap() - 9.0).abs() < 1e-13);
    }

    #[test]
    fn zero_field_energy() {
        let d = disc1();
        let u = Field::zeros(*d.grid());
        assert_eq!(energy(&u, &d).unwrap(), EnergyBreakdown::new(0.0, 0.0));
        assert_eq!(virial_gamma(&u, BoundaryPolicy::Strict).unwrap(), 0.0);
        assert!(matches!(weinstein_j(&u, &d), Err(InlsError::ZeroDenominator(_))));
    }

    #[test]
    fn real_field_has_zero_gamma_prime() {
        let d = disc1();
        let u = Field::radial(*d.grid(), 0.0, |r| (-r * r).exp()).unwrap();
        let gp = virial_gamma_prime(&u, &d, BoundaryPolicy::Strict).unwrap();
        assert!(gp.abs() < 1e-15);
    }

    #[test]
    fn strict_boundary_rejects_wide_field() {
        let d = disc1();
        let u = Field::radial(*d.grid(), 0.0, |r| (-0.1 * r * r).exp()).unwrap();
        assert!(matches!(
            virial_gamma(&u, BoundaryPolicy::Strict),
            Err(InlsError::BoundaryContamination(_))
        ));
        assert!(virial_gamma(&u, BoundaryPolicy::Warn).is_ok());
    }

    #[test]
    fn mass_within_whole_box() {
        let d = disc1();
        let u = Field::radial(*d.grid(), 0.0, |r| 1.0 / (1.0 + r)).unwrap();
        assert_eq!(mass_within(&u, 20.0), mass(&u).unwrap());
    }
}
