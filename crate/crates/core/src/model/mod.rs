//! Parameters, grids and the discrete complex field shared by every other module.

mod field;
mod grid;
pub mod weights;

pub use field::Field;
pub use grid::{CartesianGrid, Centering, RadialGrid};
pub use weights::{potential_weights, WeightRule};

use crate::error::{InlsError, Result};

/// Equation parameters: dimension `N`, inhomogeneity exponent `b` and the
/// nonlinearity power `p`.
///
/// In the ordinary (critical) case `p = 1 + (4 - 2b)/N` is derived from `N`
/// and `b` on every access. A non-critical power can only be requested
/// through [`Params::with_power`]; it exists for the general virial law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    dim: usize,
    b: f64,
    power_override: Option<f64>,
}

impl Params {
    /// Critical parameters with `0 < b < min(2, N)`.
    pub fn new(dim: usize, b: f64) -> Result<Self> {
        Self::make(dim, b, false)
    }

    /// `b = 0` classic-limit parameters; the closed-form ground state is
    /// available only here.
    pub fn classic(dim: usize) -> Result<Self> {
        Self::make(dim, 0.0, true)
    }

    pub fn make(dim: usize, b: f64, allow_b_zero: bool) -> Result<Self> {
        if dim == 0 {
            return Err(InlsError::InvalidParams("dimension N must be >= 1".into()));
        }
        if !b.is_finite() {
            return Err(InlsError::InvalidParams(format!("b = {b} is not finite")));
        }
        let upper = upper_b(dim);
        let zero_ok = allow_b_zero && b == 0.0;
        if !(zero_ok || (b > 0.0 && b < upper)) {
            return Err(InlsError::InvalidParams(format!(
                "b = {b} outside 0 < b < min{{2, N}} = {upper} (N = {dim})"
            )));
        }
        Ok(Params {
            dim,
            b,
            power_override: None,
        })
    }

    /// Parameters with an arbitrary energy-subcritical power `p`
    /// (`1 < p`, and `p < 1 + (4-2b)/(N-2)` when `N >= 3`).
    pub fn with_power(dim: usize, b: f64, p: f64) -> Result<Self> {
        let base = Self::make(dim, b, true)?;
        if !(p > 1.0 && p.is_finite()) {
            return Err(InlsError::InvalidParams(format!("power p = {p} must exceed 1")));
        }
        if dim >= 3 {
            let energy_critical = 1.0 + (4.0 - 2.0 * b) / (dim as f64 - 2.0);
            if p >= energy_critical {
                return Err(InlsError::InvalidParams(format!(
                    "power p = {p} is not energy-subcritical (limit {energy_critical})"
                )));
            }
        }
        let power_override = if p == critical_power(dim, b) { None } else { Some(p) };
        Ok(Params {
            power_override,
            ..base
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn p(&self) -> f64 {
        self.power_override
            .unwrap_or_else(|| critical_power(self.dim, self.b))
    }

    pub fn is_critical(&self) -> bool {
        self.power_override.is_none()
    }

    /// `(4 - 2b)/N`, the exponent in the sharp Gagliardo-Nirenberg bound.
    pub fn mass_exponent(&self) -> f64 {
        (4.0 - 2.0 * self.b) / self.dim as f64
    }

    /// Exponent of the amplitude factor in the scaling symmetry,
    /// `(2 - b)/(p - 1)`; equal to `N/2` at the critical power.
    pub fn scaling_exponent(&self) -> f64 {
        (2.0 - self.b) / (self.p() - 1.0)
    }
}

pub fn critical_power(dim: usize, b: f64) -> f64 {
    1.0 + (4.0 - 2.0 * b) / dim as f64
}

fn upper_b(dim: usize) -> f64 {
    (dim as f64).min(2.0)
}

/// Surface area of the unit sphere in `R^N` (2 for `N = 1`).
pub fn sphere_area(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        n => 2.0 * PI * sphere_area(n - 2) / (n as f64 - 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_powers() {
        assert_eq!(Params::new(1, 0.5).unwrap().p(), 4.0);
        assert_eq!(Params::new(2, 1.0).unwrap().p(), 2.0);
        assert!((Params::new(3, 1.0).unwrap().p() - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_b() {
        assert!(Params::new(3, 2.0).is_err());
        assert!(Params::new(1, 1.0).is_err());
        assert!(Params::new(2, 0.0).is_err());
        assert!(Params::new(2, -0.1).is_err());
        assert!(Params::new(0, 0.5).is_err());
        assert!(Params::make(1, 0.0, true).is_ok());
        assert!(Params::make(1, 0.1, true).is_ok());
    }

    #[test]
    fn classic_limit_power() {
        for n in 1..=4 {
            let p = Params::classic(n).unwrap();
            assert_eq!(p.p(), 1.0 + 4.0 / n as f64);
        }
    }

    #[test]
    fn scaling_exponent_is_half_dimension_at_criticality() {
        for (n, b) in [(1, 0.5), (2, 1.0), (3, 1.5), (3, 0.25)] {
            let p = Params::new(n, b).unwrap();
            assert!((p.scaling_exponent() - n as f64 / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn non_critical_power() {
        let p = Params::with_power(1, 0.5, 3.0).unwrap();
        assert_eq!(p.p(), 3.0);
        assert!(!p.is_critical());
        assert!(Params::with_power(3, 1.0, 3.0).is_err());
        assert!(Params::with_power(1, 0.5, 1.0).is_err());
        assert!(Params::with_power(1, 0.5, 4.0).unwrap().is_critical());
    }

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert_eq!(sphere_area(1), 2.0);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }
}
