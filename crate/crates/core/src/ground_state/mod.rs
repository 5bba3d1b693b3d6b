//! The positive radial ground state `psi` of `Delta psi - psi + |x|^{-b} psi^p = 0`.

mod grid_solver;
mod ode;
mod shoot;

pub use grid_solver::{gradient_flow, solve_on_grid, GridSolution, GridSolverOptions};
pub use shoot::{shoot, ShootOptions};

use num_complex::Complex64;
use serde::Serialize;

use crate::discretization::Discretization;
use crate::error::{InlsError, Result};
use crate::functionals::{energy_of, mass_of};
use crate::model::{sphere_area, CartesianGrid, Field, Params, RadialGrid};
use crate::numerics::gauss_legendre;

/// Radial samples of `psi` with Hermite data, the series near the origin
/// and the fitted exponential tail.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    params: Params,
    grid: RadialGrid,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    psi0: f64,
    r_match: f64,
    match_index: usize,
    tail_c: f64,
    integrals: [f64; 3],
}

impl RadialProfile {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.phi
    }

    /// Radius beyond which `psi` is the fitted tail `C r^{-(N-1)/2} e^{-r}`.
    pub fn r_match(&self) -> f64 {
        self.r_match
    }

    pub fn tail_constant(&self) -> f64 {
        self.tail_c
    }

    pub fn r_max(&self) -> f64 {
        self.grid.r_max()
    }

    /// `(psi(r), psi'(r))`; zero beyond `r_max`.
    pub fn eval_with_derivative(&self, r: f64) -> (f64, f64) {
        let r = r.abs();
        if r < self.grid.r_min() {
            shoot::series_value(&self.params, self.psi0, r.max(0.0))
        } else if r <= self.r_match {
            shoot::hermite_eval(self, r)
        } else if r <= self.r_max() {
            self.tail(r)
        } else {
            (0.0, 0.0)
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_with_derivative(r).0
    }

    /// `||psi||^2` restricted to `|x| > radius`.
    pub fn mass_outside(&self, radius: f64) -> f64 {
        let n = self.params.dim();
        let w = sphere_area(n);
        let tail_from = |r0: f64| 0.5 * self.tail_c * self.tail_c * (-2.0 * r0).exp();
        if radius >= self.r_match {
            return w * tail_from(radius);
        }
        let lo = radius.max(0.0);
        let (x, gw) = gauss_legendre(8);
        let panels = ((self.r_match - lo) / 0.05).ceil().max(1.0) as usize;
        let width = (self.r_match - lo) / panels as f64;
        let mut s = 0.0;
        for k in 0..panels {
            let a = lo + k as f64 * width;
            for (xi, wi) in x.iter().zip(&gw) {
                let r = a + 0.5 * width * (xi + 1.0);
                s += wi * 0.5 * width * r.powi(n as i32 - 1) * self.eval(r).powi(2);
            }
        }
        w * (s + tail_from(self.r_match))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Radial(RadialProfile),
    /// Discrete standing wave on a Cartesian grid.
    Grid(Field),
}

/// The ground state with its norms.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    params: Params,
    profile: Profile,
    psi0: f64,
    mass_sq: f64,
    grad_sq: f64,
    potential_term: f64,
    j_min: f64,
    residual: f64,
}

/// Scalar summary written by the `ground-state` command.
#[derive(Debug, Clone, Serialize)]
pub struct GroundStateSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub b: f64,
    pub p: f64,
    pub psi0: f64,
    pub mass_sq: f64,
    pub grad_sq: f64,
    pub potential_term: f64,
    #[serde(rename = "J_min")]
    pub j_min: f64,
    pub residual: f64,
}

impl GroundState {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn radial(&self) -> Option<&RadialProfile> {
        match &self.profile {
            Profile::Radial(p) => Some(p),
            Profile::Grid(_) => None,
        }
    }

    /// `psi(0)`.
    pub fn psi0(&self) -> f64 {
        self.psi0
    }

    /// `||psi||_2^2`.
    pub fn mass_sq(&self) -> f64 {
        self.mass_sq
    }

    /// `||grad psi||_2^2`.
    pub fn grad_sq(&self) -> f64 {
        self.grad_sq
    }

    /// `int |x|^{-b} psi^{p+1}`.
    pub fn potential_term(&self) -> f64 {
        self.potential_term
    }

    /// `J(psi)`.
    pub fn j_min(&self) -> f64 {
        self.j_min
    }

    /// Relative bisection width for shooting; relative equation residual
    /// for grid solutions.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.grad_sq - self.potential_term / (self.params.p() + 1.0)
    }

    pub fn summary(&self) -> GroundStateSummary {
        GroundStateSummary {
            n: self.params.dim(),
            b: self.params.b(),
            p: self.params.p(),
            psi0: self.psi0,
            mass_sq: self.mass_sq,
            grad_sq: self.grad_sq,
            potential_term: self.potential_term,
            j_min: self.j_min,
            residual: self.residual,
        }
    }

    /// Largest radius at which the profile is available.
    pub fn r_max(&self) -> f64 {
        match &self.profile {
            Profile::Radial(p) => p.r_max(),
            Profile::Grid(f) => f.grid().extent(),
        }
    }

    /// `psi(r)` for radial profiles.
    pub fn eval(&self, r: f64) -> Result<f64> {
        match &self.profile {
            Profile::Radial(p) => Ok(p.eval(r)),
            Profile::Grid(_) => Err(InlsError::NotApplicable(
                "grid ground states are only available at their own nodes".into(),
            )),
        }
    }

    /// `lambda^{N/2} psi(lambda |x|)` on `grid`.
    pub fn sample_scaled(&self, grid: &CartesianGrid, lambda: f64) -> Result<Field> {
        if !(lambda > 0.0) {
            return Err(InlsError::InvalidParams(format!("scale {lambda} must be positive")));
        }
        match &self.profile {
            Profile::Radial(p) => {
                let reach = lambda * grid.extent() * (grid.dim() as f64).sqrt();
                if reach > p.r_max() {
                    return Err(InlsError::InvalidGrid(format!(
                        "grid reaches radius {reach} beyond the computed profile (r_max = {})",
                        p.r_max()
                    )));
                }
                let amp = lambda.powf(0.5 * grid.dim() as f64);
                Field::radial(*grid, 0.0, |r| amp * p.eval(lambda * r))
            }
            Profile::Grid(f) => {
                if lambda == 1.0 && f.grid() == grid {
                    Ok(f.clone())
                } else {
                    Err(InlsError::NotApplicable(
                        "grid ground states cannot be resampled".into(),
                    ))
                }
            }
        }
    }
}

/// Samples `psi(|x|)` on the nodes of `grid`.
pub fn to_cartesian(gs: &GroundState, grid: &CartesianGrid) -> Result<Field> {
    gs.sample_scaled(grid, 1.0)
}

/// Outcome of [`characterization_test`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Characterization {
    pub is_ground_state_orbit: bool,
    pub lambda0: f64,
    pub gamma0: f64,
    pub energy: f64,
    /// `||v - e^{i gamma0} lambda0^{N/2} psi(lambda0 .)||_{H^1} / ||v||_{H^1}`.
    pub h1_distance: f64,
}

/// Decides whether a critical-mass field `v` lies on the orbit
/// `e^{i gamma0} lambda0^{N/2} psi(lambda0 x)`.
///
/// The mass must match `||psi||^2` to relative accuracy `tol`. The energy
/// counts as zero when `|E(v)| < tol max(1, ||grad v||^2)`; in that case
/// `lambda0 = sqrt((p-1)/2) ||grad |v| || / ||v||`, `gamma0` is the phase of
/// `v` at its largest modulus, and membership requires the relative `H^1`
/// distance to the fitted orbit element to be below `tol`.
pub fn characterization_test(
    v: &Field,
    gs: &GroundState,
    disc: &Discretization,
    tol: f64,
) -> Result<Characterization> {
    disc.check_field(v)?;
    let grid = disc.grid();
    let cell = grid.cell_volume();
    let m = mass_of(v.values(), cell);
    if ((m / gs.mass_sq()).sqrt() - 1.0).abs() > tol {
        return Err(InlsError::MassMismatch(format!(
            "||v||^2 = {m} differs from ||psi||^2 = {} beyond {tol:e}",
            gs.mass_sq()
        )));
    }
    let e = energy_of(v.values(), disc);
    let grad_sq = e.grad_sq();
    if e.total.abs() >= tol * grad_sq.max(1.0) {
        return Ok(Characterization {
            is_ground_state_orbit: false,
            lambda0: f64::NAN,
            gamma0: f64::NAN,
            energy: e.total,
            h1_distance: f64::NAN,
        });
    }
    let modulus: Vec<Complex64> = v.values().iter().map(|z| Complex64::new(z.norm(), 0.0)).collect();
    let grad_mod = disc.spectral().grad_norm_sq(&modulus);
    let p = disc.params().p();
    let lambda0 = (0.5 * (p - 1.0)).sqrt() * (grad_mod / m).sqrt();
    let (imax, _) = v
        .values()
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
    let gamma0 = v.values()[imax].arg();
    let orbit = gs.sample_scaled(grid, lambda0)?;
    let rot = Complex64::from_polar(1.0, gamma0);
    let diff: Vec<Complex64> = v
        .values()
        .iter()
        .zip(orbit.values())
        .map(|(a, b)| a - rot * b)
        .collect();
    let d2 = mass_of(&diff, cell) + disc.spectral().grad_norm_sq(&diff);
    let n2 = m + grad_sq;
    let h1_distance = (d2 / n2).sqrt();
    Ok(Characterization {
        is_ground_state_orbit: h1_distance < tol,
        lambda0,
        gamma0,
        energy: e.total,
        h1_distance,
    })
}
