use num_complex::Complex64;

use super::{GroundState, Profile};
use crate::discretization::Discretization;
use crate::error::{InlsError, Result};
use crate::functionals::{mass_of, potential_integral_of};
use crate::model::{CartesianGrid, Field, Params};

#[derive(Debug, Clone, Copy)]
pub struct GridSolverOptions {
    /// Stop when `||-Delta u + omega u - w|u|^{p-1}u|| / ||u|| < tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Imaginary-time step of the semi-implicit update.
    pub dtau: f64,
    /// Frequency: the solution satisfies `-Delta u + omega u = w |u|^{p-1} u`,
    /// so `e^{i omega t} u` solves the discrete evolution equation.
    pub omega: f64,
}

impl Default for GridSolverOptions {
    fn default() -> Self {
        GridSolverOptions {
            tol: 1e-11,
            max_iter: 2000,
            dtau: 10.0,
            omega: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridSolution {
    pub field: Field,
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
    pub omega: f64,
}

/// Positive discrete solution of `-Delta u + omega u = w |u|^{p-1} u` on the
/// grid of `disc`.
///
/// Each iteration takes a semi-implicit imaginary-time step
/// `u <- (1 + dtau (K + omega))^{-1} (u + dtau w|u|^{p-1}u)` and then rescales
/// `u` onto the Nehari manifold `<u, (K+omega) u> = sum w |u|^{p+1}`. At the
/// critical power an L2 normalization would leave the frequency undetermined,
/// which the Nehari constraint fixes.
pub fn solve_on_grid(disc: &Discretization, seed: Option<&Field>, opts: &GridSolverOptions) -> Result<GridSolution> {
    if !(opts.omega > 0.0 && opts.dtau > 0.0 && opts.tol > 0.0) {
        return Err(InlsError::InvalidParams(
            "grid solver needs positive omega, dtau and tol".into(),
        ));
    }
    let grid = *disc.grid();
    let omega = opts.omega;
    let mut u: Vec<Complex64> = match seed {
        Some(f) => {
            disc.check_field(f)?;
            f.values().to_vec()
        }
        None => {
            let s = 1.0 / omega.sqrt();
            Field::radial(grid, 0.0, |r| (-0.5 * (r / s).powi(2)).exp())?.into_values()
        }
    };
    let sp = disc.spectral();
    let k2 = sp.k2();
    let w = disc.weights();
    let nl_pow = disc.nonlinear_power();
    let pm1 = disc.params().p() - 1.0;
    let cell = grid.cell_volume();

    let nonlinear = |u: &[Complex64]| -> Vec<Complex64> {
        u.iter()
            .zip(w)
            .map(|(z, wj)| z * (wj * nl_pow.eval(z.norm_sqr())))
            .collect()
    };
    let nehari = |u: &mut Vec<Complex64>| -> Result<()> {
        let mut hat = u.clone();
        sp.forward(&mut hat);
        let quad = sp.grad_norm_sq_from_hat(&hat) + omega * mass_of(u, cell);
        let pot = potential_integral_of(u, disc);
        if !(pot > 0.0 && quad.is_finite()) {
            return Err(InlsError::NonFinite("grid solver lost its nonlinear term".into()));
        }
        let c = (quad / pot).powf(1.0 / pm1);
        for z in u.iter_mut() {
            *z *= c;
        }
        Ok(())
    };
    let residual = |u: &[Complex64]| -> f64 {
        let lap = sp.neg_laplacian(u);
        let nl = nonlinear(u);
        let r: Vec<Complex64> = lap
            .iter()
            .zip(u)
            .zip(&nl)
            .map(|((l, z), n)| l + z * omega - n)
            .collect();
        (mass_of(&r, cell) / mass_of(u, cell)).sqrt()
    };

    if seed.is_none() {
        nehari(&mut u)?;
    }
    let mut history = vec![residual(&u)];
    let mut iterations = 0;
    while *history.last().unwrap() >= opts.tol {
        if iterations >= opts.max_iter {
            return Err(InlsError::NotConverged {
                iterations,
                residual: *history.last().unwrap(),
                history,
            });
        }
        iterations += 1;
        let nl = nonlinear(&u);
        let mut hat: Vec<Complex64> = u.iter().zip(&nl).map(|(z, n)| z + n * opts.dtau).collect();
        sp.forward(&mut hat);
        for (z, k) in hat.iter_mut().zip(k2) {
            *z /= 1.0 + opts.dtau * (k + omega);
        }
        sp.inverse(&mut hat);
        u = hat;
        nehari(&mut u)?;
        let res = residual(&u);
        if !res.is_finite() || res > 1e8 {
            history.push(res);
            return Err(InlsError::NotConverged {
                iterations,
                residual: res,
                history,
            });
        }
        history.push(res);
    }
    Ok(GridSolution {
        field: Field::new(grid, 0.0, u)?,
        residual: *history.last().unwrap(),
        iterations,
        history,
        omega,
    })
}

/// Ground state computed on a Cartesian grid by [`solve_on_grid`] with
/// `omega = 1`, an oracle independent of shooting.
pub fn gradient_flow(params: &Params, grid: &CartesianGrid, tol: f64) -> Result<GroundState> {
    let disc = Discretization::new(*params, *grid)?;
    let sol = solve_on_grid(
        &disc,
        None,
        &GridSolverOptions {
            tol,
            ..Default::default()
        },
    )?;
    from_grid_solution(&disc, sol)
}

pub(crate) fn from_grid_solution(disc: &Discretization, sol: GridSolution) -> Result<GroundState> {
    let params = *disc.params();
    let values = sol.field.values();
    let cell = disc.grid().cell_volume();
    let mass_sq = mass_of(values, cell);
    let grad_sq = disc.spectral().grad_norm_sq(values);
    let potential_term = potential_integral_of(values, disc);
    let j_min = grad_sq * mass_sq.powf(0.5 * (params.p() - 1.0)) / potential_term;
    let psi0 = extrapolate_center(&params, &sol.field, sol.omega);
    Ok(GroundState {
        params,
        psi0,
        mass_sq,
        grad_sq,
        potential_term,
        j_min,
        residual: sol.residual,
        profile: Profile::Grid(sol.field),
    })
}

/// Solves the small-radius series `a - a^p c1 + omega a c2 = u(r1)` for
/// `a = u(0)` using the sample nearest the origin.
fn extrapolate_center(params: &Params, u: &Field, omega: f64) -> f64 {
    let g = u.grid();
    let (i, r1) = (0..g.len())
        .map(|i| (i, g.radius(i)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let v = u.values()[i].norm();
    if r1 == 0.0 {
        return v;
    }
    let n = params.dim() as f64;
    let b = params.b();
    let p = params.p();
    let c1 = r1.powf(2.0 - b) / ((2.0 - b) * (n - b));
    let c2 = omega * r1 * r1 / (2.0 * n);
    let mut a = v;
    for _ in 0..50 {
        if !(a > 0.0 && a.is_finite()) {
            return v;
        }
        let f = a - a.powf(p) * c1 + a * c2 - v;
        let df = 1.0 - p * a.powf(p - 1.0) * c1 + c2;
        let step = f / df;
        a -= step;
        if step.abs() < 1e-15 * a.abs() {
            break;
        }
    }
    if a > 0.0 && a.is_finite() {
        a
    } else {
        v
    }
}
