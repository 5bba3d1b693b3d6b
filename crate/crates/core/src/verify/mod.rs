//! Scripted experiments that check the identities behind the blow-up
//! classification and report each as a [`CheckReport`].
//!
//! Only forward statements are checked: S-family data blows up at rate
//! `1/(T-t)`, concentrates its mass at the origin, and satisfies the virial
//! and energy identities. The converse (every critical-mass blow-up is an
//! S-family member) is out of reach numerically.

mod fit;
mod suite;

pub use fit::{fit_rate, RateFit};
pub use suite::{blowup_experiment, run_suite, Suite, SuiteConfig};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::discretization::Discretization;
use crate::error::{InlsError, Result};
use crate::evolution::{evolve, EvolutionConfig, Termination, Trajectory};
use crate::functionals::{
    self, energy, mass, mass_within, potential_integral, virial_gamma, virial_gamma_prime, BoundaryPolicy,
};
use crate::ground_state::{characterization_test, solve_on_grid, GridSolverOptions, GroundState};
use crate::model::{CartesianGrid, Field};
use crate::transforms::{pseudo_conformal, resolution, s_family, SFamilyParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default)]
    pub skipped: bool,
    pub context: Value,
}

impl CheckReport {
    /// `passed` is `|observed - expected| <= tolerance * max(1, |expected|)`.
    pub fn new(name: &str, observed: f64, expected: f64, tolerance: f64, context: Value) -> Self {
        CheckReport {
            name: name.to_string(),
            observed,
            expected,
            tolerance,
            passed: Self::within(observed, expected, tolerance),
            skipped: false,
            context,
        }
    }

    pub fn within(observed: f64, expected: f64, tolerance: f64) -> bool {
        (observed - expected).abs() <= tolerance * expected.abs().max(1.0)
    }

    /// A check that does not apply to the given data.
    pub fn skipped(name: &str, reason: &str, context: Value) -> Self {
        let mut context = context;
        if let Value::Object(m) = &mut context {
            m.insert("skipped_because".into(), reason.into());
        }
        CheckReport {
            name: name.to_string(),
            observed: 0.0,
            expected: 0.0,
            tolerance: 0.0,
            passed: true,
            skipped: true,
            context,
        }
    }

    /// One PASS/FAIL/SKIP line.
    pub fn summary_line(&self) -> String {
        let tag = if self.skipped {
            "SKIP"
        } else if self.passed {
            "PASS"
        } else {
            "FAIL"
        };
        format!(
            "{tag} {}: observed {:.6e}, expected {:.6e}, tolerance {:.1e}",
            self.name, self.observed, self.expected, self.tolerance
        )
    }
}

fn grid_context(grid: &CartesianGrid) -> Value {
    json!({
        "N": grid.dim(),
        "M": grid.points(),
        "L": grid.extent(),
        "centering": grid.centering(),
    })
}

fn disc_context(disc: &Discretization) -> Value {
    let mut v = grid_context(disc.grid());
    v["b"] = json!(disc.params().b());
    v["p"] = json!(disc.params().p());
    v
}

fn sp_context(sp: &SFamilyParams) -> Value {
    json!({"T": sp.t_blowup, "lambda0": sp.lambda0, "gamma0": sp.gamma0})
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(x), Value::Object(y)) = (&mut a, b) {
        x.extend(y);
    }
    a
}

fn ensure_resolvable(sp: &SFamilyParams, gs: &GroundState, t: f64, grid: &CartesianGrid) -> Result<()> {
    let r = resolution(sp, gs, t, grid)?;
    if !r.resolvable {
        return Err(InlsError::Unresolvable(format!(
            "S(t = {t}) needs wavenumber {:.3e} but the grid resolves {:.3e}",
            r.chirp_wavenumber + r.profile_wavenumber,
            r.nyquist
        )));
    }
    Ok(())
}

/// Evolves `s_family(t0)` to `t1` and reports the relative L2 distance to
/// the closed form at `t1`. `cfg.t_end` is replaced by `t1`.
pub fn check_s_family_evolution(
    sp: &SFamilyParams,
    gs: &GroundState,
    t0: f64,
    t1: f64,
    disc: &Discretization,
    cfg: &EvolutionConfig,
    tol: f64,
) -> Result<CheckReport> {
    if !(t0 <= t1 && t1 < sp.t_blowup) {
        return Err(InlsError::TimeOutOfRange(format!(
            "need t0 <= t1 < T, got t0 = {t0}, t1 = {t1}, T = {}",
            sp.t_blowup
        )));
    }
    let grid = disc.grid();
    ensure_resolvable(sp, gs, t1, grid)?;
    let u0 = s_family(sp, gs, t0, grid)?;
    let exact = s_family(sp, gs, t1, grid)?;
    let mut cfg = cfg.clone();
    cfg.t_end = t1;
    let traj = evolve(&u0, &cfg, disc)?;
    if traj.termination != Termination::ReachedTEnd {
        return Err(InlsError::NonFinite(format!(
            "S-family run ended with {:?} at t = {}",
            traj.termination,
            traj.final_state.time()
        )));
    }
    let err = traj.final_state.l2_distance(&exact)? / exact.l2_norm();
    let ctx = merge(
        merge(disc_context(disc), sp_context(sp)),
        json!({"t0": t0, "t1": t1, "dt0": cfg.dt0, "steps": traj.steps, "mass_drift": traj.mass_drift()}),
    );
    Ok(CheckReport::new("s_family_evolution", err, 0.0, tol, ctx))
}

/// Least-squares coefficient `a` in `Gamma(t) = a (T - t)^2`.
fn parabola_coefficient(times: &[f64], gammas: &[f64], t_blowup: f64) -> (f64, f64) {
    let num: f64 = times.iter().zip(gammas).map(|(t, g)| g * (t_blowup - t).powi(2)).sum();
    let den: f64 = times.iter().map(|t| (t_blowup - t).powi(4)).sum();
    let a = num / den;
    let scale = gammas.iter().fold(0.0f64, |m, g| m.max(g.abs())).max(f64::MIN_POSITIVE);
    let res = times
        .iter()
        .zip(gammas)
        .map(|(t, g)| (g - a * (t_blowup - t).powi(2)).abs())
        .fold(0.0, f64::max)
        / scale;
    (a, res)
}

/// Fits `Gamma(t) = a (T - t)^2` over the snapshots and compares `a` with
/// `8 E`, and `Gamma'` at the first snapshot with `-16 E (T - t)`.
///
/// When `E` vanishes (a standing wave) the parabola degenerates; the report
/// then measures the relative variation of `Gamma`, which should be 0.
pub fn check_gamma_parabola(snapshots: &[Field], t_blowup: f64, disc: &Discretization, tol: f64) -> Result<Vec<CheckReport>> {
    let first = snapshots
        .first()
        .ok_or_else(|| InlsError::InsufficientData("no snapshots".into()))?;
    let times: Vec<f64> = snapshots.iter().map(Field::time).collect();
    if times.iter().any(|t| *t >= t_blowup) {
        return Err(InlsError::TimeOutOfRange("all samples must precede T".into()));
    }
    let gammas = snapshots
        .iter()
        .map(|u| virial_gamma(u, BoundaryPolicy::Ignore))
        .collect::<Result<Vec<_>>>()?;
    let e = energy(first, disc)?;
    let ctx = merge(disc_context(disc), json!({"T": t_blowup, "times": times, "energy": e.total}));
    if e.total.abs() < 1e-12 * e.grad_sq().max(1.0) {
        let g0 = gammas[0];
        let var = gammas.iter().map(|g| (g - g0).abs()).fold(0.0, f64::max) / g0.abs().max(f64::MIN_POSITIVE);
        let ctx = merge(ctx, json!({"case": "zero energy, Gamma constant"}));
        return Ok(vec![CheckReport::new("gamma_parabola", var, 0.0, tol, ctx)]);
    }
    let (a, residual) = parabola_coefficient(&times, &gammas, t_blowup);
    let expected = 8.0 * e.total;
    let gp = virial_gamma_prime(first, disc, BoundaryPolicy::Ignore)?;
    let gp_expected = -16.0 * e.total * (t_blowup - first.time());
    Ok(vec![
        CheckReport::new(
            "gamma_parabola",
            a / expected,
            1.0,
            tol,
            merge(ctx.clone(), json!({"coefficient": a, "eight_energy": expected, "fit_residual": residual})),
        ),
        CheckReport::new(
            "gamma_prime_initial",
            gp / gp_expected,
            1.0,
            tol,
            merge(ctx, json!({"gamma_prime": gp, "expected_gamma_prime": gp_expected})),
        ),
    ])
}

/// [`check_gamma_parabola`] on closed-form S-family snapshots.
pub fn check_gamma_parabola_s_family(
    sp: &SFamilyParams,
    gs: &GroundState,
    t_samples: &[f64],
    disc: &Discretization,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let grid = disc.grid();
    let snaps = t_samples
        .iter()
        .map(|&t| {
            ensure_resolvable(sp, gs, t, grid)?;
            s_family(sp, gs, t, grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut reports = check_gamma_parabola(&snaps, sp.t_blowup, disc, tol)?;
    for r in &mut reports {
        r.context = merge(r.context.clone(), sp_context(sp));
    }
    Ok(reports)
}

/// Fits `||grad u|| ~ (T_fit - t)^{-alpha}` with `T_fit` free over the
/// recorded diagnostics and compares `alpha` with 1.
pub fn check_blowup_rate(traj: &Trajectory, t_blowup: Option<f64>, tol: f64) -> Result<CheckReport> {
    let rows = &traj.diagnostics.rows;
    let ctx = json!({"termination": traj.termination, "samples": rows.len()});
    if traj.termination != Termination::BlowupDetected {
        return Ok(CheckReport::skipped("blowup_rate", "no blow-up detected", ctx));
    }
    let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let grads: Vec<f64> = rows.iter().map(|r| r.grad_norm).collect();
    let (lo, hi) = grads
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), g| (a.min(*g), b.max(*g)));
    if rows.len() < 10 || hi < 10.0 * lo {
        return Err(InlsError::InsufficientData(format!(
            "{} samples with gradient range {:.3}; need 10 samples over a decade",
            rows.len(),
            hi / lo
        )));
    }
    let free = fit_rate(&times, &grads, None)?;
    let mut ctx = merge(ctx, json!({"t_fit": free.t_fit, "rms": free.rms, "growth": hi / lo}));
    if let Some(t) = t_blowup {
        let known = fit_rate(&times, &grads, Some(t))?;
        ctx = merge(ctx, json!({"T": t, "alpha_known_T": known.alpha}));
    }
    Ok(CheckReport::new("blowup_rate", free.alpha, 1.0, tol, ctx))
}

/// Mass inside `|x| < radius` at the last time over `||psi||^2`, and its
/// monotone growth over the final decade of `T - t`.
///
/// Returns two reports: `mass_concentration` compares the final fraction
/// with 1 at tolerance `1 - threshold`; `mass_concentration_trend` measures
/// the decrease of the recorded concentration fraction inside the window
/// (expected 0).
pub fn check_mass_concentration(
    traj: &Trajectory,
    radius: f64,
    psi_mass: f64,
    t_blowup: f64,
    threshold: f64,
) -> Result<Vec<CheckReport>> {
    if !(psi_mass > 0.0) {
        return Err(InlsError::InvalidParams(format!("critical mass {psi_mass} must be positive")));
    }
    let last = &traj.final_state;
    let total = mass(last)?;
    let fraction = mass_within(last, radius) / psi_mass;
    let t_last = last.time();
    if !(t_blowup > t_last) {
        return Err(InlsError::TimeOutOfRange(format!("T = {t_blowup} must follow t = {t_last}")));
    }
    let ctx = json!({"radius": radius, "T": t_blowup, "t_last": t_last, "threshold": threshold});
    let mut reports = vec![CheckReport::new(
        "mass_concentration",
        fraction,
        1.0,
        1.0 - threshold,
        merge(ctx.clone(), json!({"fraction": fraction, "mass": total, "psi_mass": psi_mass})),
    )];
    let window = 10.0 * (t_blowup - t_last);
    let series: Vec<f64> = traj
        .diagnostics
        .rows
        .iter()
        .filter(|r| t_blowup - r.t <= window)
        .map(|r| r.conc_fraction)
        .collect();
    if (traj.diagnostics.rows.first().map_or(t_last, |r| r.t)) > t_blowup - window || series.len() < 2 {
        reports.push(CheckReport::skipped(
            "mass_concentration_trend",
            "the run does not cover a decade of T - t",
            ctx,
        ));
        return Ok(reports);
    }
    let drops = series.windows(2).map(|w| (w[0] - w[1]).max(0.0)).fold(0.0, f64::max);
    let net = (series[0] - series[series.len() - 1]).max(0.0);
    reports.push(CheckReport::new(
        "mass_concentration_trend",
        drops + net,
        0.0,
        1e-9,
        merge(ctx, json!({"window_samples": series.len(), "first": series[0], "last": series[series.len() - 1]})),
    ));
    Ok(reports)
}

/// `u0 e^{i|x|^2/4T}`.
pub fn unchirp(u0: &Field, t_blowup: f64) -> Result<Field> {
    let r2 = u0.grid().radii_sq();
    let values = u0
        .values()
        .iter()
        .zip(&r2)
        .map(|(z, r)| z * Complex64::cis(r / (4.0 * t_blowup)))
        .collect();
    Field::new(*u0.grid(), u0.time(), values)
}

fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// Removes the chirp of `S(0)` and checks that what remains has zero energy
/// and lies on the ground-state orbit with `lambda0 = lambda1 T` and
/// `gamma0 = gamma1 - lambda0^2 / T`.
pub fn check_step4_identity(
    sp: &SFamilyParams,
    gs: &GroundState,
    disc: &Discretization,
    energy_tol: f64,
    param_tol: f64,
) -> Result<Vec<CheckReport>> {
    if !(sp.t_blowup > 0.0) {
        return Err(InlsError::TimeOutOfRange("the identity is stated at t = 0 < T".into()));
    }
    let grid = disc.grid();
    ensure_resolvable(sp, gs, 0.0, grid)?;
    let u0 = s_family(sp, gs, 0.0, grid)?;
    let grad0 = functionals::grad_norm_sq(&u0, disc)?;
    let v = unchirp(&u0, sp.t_blowup)?;
    let ev = energy(&v, disc)?.total;
    let ctx = merge(disc_context(disc), sp_context(sp));
    let mut reports = vec![CheckReport::new(
        "step4_energy",
        ev.abs() / grad0,
        0.0,
        energy_tol,
        merge(ctx.clone(), json!({"energy": ev, "grad_sq": grad0})),
    )];
    let ch = characterization_test(&v, gs, disc, param_tol)?;
    let lambda0 = ch.lambda0 * sp.t_blowup;
    let gamma0 = ch.gamma0 - lambda0 * lambda0 / sp.t_blowup;
    let ctx = merge(
        ctx,
        json!({"lambda1": ch.lambda0, "gamma1": ch.gamma0, "on_orbit": ch.is_ground_state_orbit, "h1_distance": ch.h1_distance}),
    );
    reports.push(CheckReport::new(
        "step4_lambda0",
        lambda0 / sp.lambda0,
        1.0,
        param_tol,
        merge(ctx.clone(), json!({"recovered": lambda0})),
    ));
    reports.push(CheckReport::new(
        "step4_gamma0",
        wrap_angle(gamma0 - sp.gamma0),
        0.0,
        param_tol,
        merge(ctx, json!({"recovered": gamma0})),
    ));
    Ok(reports)
}

/// Right-hand side of the virial law at time `t`:
/// `16 E(u) + (4/(p+1)) (N - N p - 2b + 4) int |x|^{-b}|u|^{p+1}`.
pub fn virial_rhs(u: &Field, disc: &Discretization) -> Result<f64> {
    let pr = disc.params();
    let n = pr.dim() as f64;
    let p = pr.p();
    let e = energy(u, disc)?.total;
    let pot = potential_integral(u, disc)?;
    Ok(16.0 * e + 4.0 / (p + 1.0) * (n - n * p - 2.0 * pr.b() + 4.0) * pot)
}

/// Centered second differences of `Gamma` with spacing `tau` at each
/// sample time, compared with [`virial_rhs`]. The observed value is the
/// largest relative mismatch.
pub fn check_virial_law(
    u0: &Field,
    disc: &Discretization,
    dt: f64,
    t_samples: &[f64],
    tau: f64,
    tol: f64,
) -> Result<CheckReport> {
    let t0 = u0.time();
    if t_samples.is_empty() || t_samples.iter().any(|t| t - tau < t0) {
        return Err(InlsError::TimeOutOfRange(format!(
            "sample times need t - tau >= t0 = {t0}"
        )));
    }
    let mut times = Vec::new();
    for &t in t_samples {
        times.extend([t - tau, t, t + tau]);
    }
    let t_end = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut cfg = EvolutionConfig::new(dt, t_end);
    cfg.record_every = usize::MAX;
    cfg.snapshot_times = times.clone();
    let traj = evolve(u0, &cfg, disc)?;
    if traj.termination != Termination::ReachedTEnd {
        return Err(InlsError::NonFinite(format!("virial run ended with {:?}", traj.termination)));
    }
    let mut snaps = traj.snapshots.clone();
    snaps.push(traj.final_state.clone());
    let at = |t: f64| -> Result<&Field> {
        snaps
            .iter()
            .find(|f| (f.time() - t).abs() <= 1e-12 * t.abs().max(1.0))
            .ok_or_else(|| InlsError::InsufficientData(format!("no snapshot at t = {t}")))
    };
    let mut worst = 0.0f64;
    let mut samples = Vec::new();
    for &t in t_samples {
        let g = |s: f64| -> Result<f64> { virial_gamma(at(s)?, BoundaryPolicy::Ignore) };
        let second = (g(t + tau)? - 2.0 * g(t)? + g(t - tau)?) / (tau * tau);
        let rhs = virial_rhs(at(t)?, disc)?;
        let rel = (second - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        samples.push(json!({"t": t, "second_difference": second, "rhs": rhs}));
    }
    let ctx = merge(
        disc_context(disc),
        json!({"dt": dt, "tau": tau, "samples": samples, "mass_drift": traj.mass_drift()}),
    );
    Ok(CheckReport::new("virial_law", worst, 0.0, tol, ctx))
}

/// Mass and energy drift over `[t0, t_end]` at fixed `dt`.
pub fn check_conservation(u0: &Field, disc: &Discretization, dt: f64, t_end: f64, record_every: usize) -> Result<Vec<CheckReport>> {
    let mut cfg = EvolutionConfig::new(dt, t_end);
    cfg.record_every = record_every;
    let traj = evolve(u0, &cfg, disc)?;
    if traj.termination != Termination::ReachedTEnd {
        return Err(InlsError::NonFinite(format!("run ended with {:?}", traj.termination)));
    }
    let ctx = merge(disc_context(disc), json!({"dt": dt, "t_end": t_end, "steps": traj.steps}));
    Ok(vec![
        CheckReport::new("mass_conservation", traj.mass_drift(), 0.0, 1e-12, ctx.clone()),
        CheckReport::new("energy_conservation", traj.energy_drift(), 0.0, 1e-6, ctx),
    ])
}

/// Evolves the discrete standing wave `e^{i omega t} Q` with
/// `omega = lambda0^2` for each step size and reports the L2 error at the
/// finest step and the error ratios under halving.
pub fn check_standing_wave(disc: &Discretization, lambda0: f64, dts: &[f64], t_end: f64, tol: f64) -> Result<Vec<CheckReport>> {
    let omega = lambda0 * lambda0;
    let sol = solve_on_grid(
        disc,
        None,
        &GridSolverOptions {
            omega,
            ..Default::default()
        },
    )?;
    let exact = sol.field.map(|z| z * Complex64::cis(omega * t_end))?.with_time(t_end);
    let mut errors = Vec::new();
    for &dt in dts {
        let mut cfg = EvolutionConfig::new(dt, t_end);
        cfg.record_every = usize::MAX;
        let traj = evolve(&sol.field, &cfg, disc)?;
        errors.push(traj.final_state.l2_distance(&exact)? / exact.l2_norm());
    }
    let gamma = virial_gamma(&sol.field, BoundaryPolicy::Ignore)?;
    let ctx = merge(
        disc_context(disc),
        json!({"lambda0": lambda0, "dts": dts, "errors": errors, "t_end": t_end, "solver_residual": sol.residual, "gamma": gamma}),
    );
    let mut reports = vec![CheckReport::new(
        "standing_wave_error",
        *errors.last().unwrap_or(&f64::NAN),
        0.0,
        tol,
        ctx.clone(),
    )];
    for (i, w) in errors.windows(2).enumerate() {
        reports.push(CheckReport::new(
            &format!("standing_wave_order_{i}"),
            w[0] / w[1],
            4.0,
            0.15,
            ctx.clone(),
        ));
    }
    Ok(reports)
}

/// Transforms the standing-wave snapshot at internal time `s` and compares
/// with `s_family` at `t = T - 1/s` on `target`. The snapshot is sampled on
/// `target` scaled by `s`, so no interpolation is involved.
pub fn check_pseudo_conformal(
    sp: &SFamilyParams,
    gs: &GroundState,
    s: f64,
    target: &CartesianGrid,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let src = target.scaled(s)?;
    let base = gs.sample_scaled(&src, sp.lambda0)?;
    let rot = sp.lambda0 * sp.lambda0 * s + sp.gamma0;
    let v = base.map(|z| z * Complex64::cis(rot))?.with_time(s);
    let u = pseudo_conformal(&v, s, sp.t_blowup, target)?;
    let exact = s_family(sp, gs, sp.t_blowup - 1.0 / s, target)?;
    let sup = u.sup_distance(&exact)?;
    let mv = mass(&v)?;
    let mu = mass(&u)?;
    let ctx = merge(merge(grid_context(target), sp_context(sp)), json!({"s": s}));
    Ok(vec![
        CheckReport::new("pseudo_conformal_pointwise", sup, 0.0, tol, ctx.clone()),
        CheckReport::new("pseudo_conformal_mass", mu / mv, 1.0, 1e-8, ctx),
    ])
}

/// Evolves `u0` and checks that `||grad u||^2` never exceeds the bound
/// `2E / (1 - (M/M_psi)^{(2-b)/N})` of a subcritical-mass solution.
pub fn check_subcritical_bound(u0: &Field, psi_mass: f64, disc: &Discretization, cfg: &EvolutionConfig) -> Result<CheckReport> {
    let e0 = energy(u0, disc)?.total;
    let m0 = mass(u0)?;
    let bound = functionals::subcritical_grad_bound(e0, m0, psi_mass, disc)?;
    let traj = evolve(u0, cfg, disc)?;
    if traj.termination == Termination::NumericalFailure {
        return Err(InlsError::NonFinite("subcritical run failed".into()));
    }
    let peak = traj
        .diagnostics
        .rows
        .iter()
        .map(|r| r.grad_norm * r.grad_norm)
        .fold(0.0, f64::max);
    let ctx = merge(
        disc_context(disc),
        json!({"bound": bound, "peak_grad_sq": peak, "mass_ratio": m0 / psi_mass, "t_end": traj.final_state.time(), "samples": traj.diagnostics.len()}),
    );
    Ok(CheckReport::new("subcritical_bound", (peak / bound - 1.0).max(0.0), 0.0, 0.0, ctx))
}

/// Zero energy and the two Pohozaev identities of a ground state.
pub fn check_ground_state(gs: &GroundState, tol: f64) -> Vec<CheckReport> {
    let pr = gs.params();
    let ctx = json!({"N": pr.dim(), "b": pr.b(), "p": pr.p(), "psi0": gs.psi0(), "mass_sq": gs.mass_sq()});
    let p = pr.p();
    vec![
        CheckReport::new("ground_state_energy", gs.energy().abs() / gs.grad_sq(), 0.0, tol, ctx.clone()),
        CheckReport::new(
            "pohozaev_multiplier",
            (gs.grad_sq() + gs.mass_sq()) / gs.potential_term(),
            1.0,
            tol,
            ctx.clone(),
        ),
        CheckReport::new(
            "pohozaev_energy",
            gs.grad_sq() * (p + 1.0) / (2.0 * gs.potential_term()),
            1.0,
            tol,
            ctx,
        ),
    ]
}

/// `J(v) >= J(psi)` over `count` seeded band-limited fields. The observed
/// value is the largest relative violation `(J(psi) - J(v)) / J(psi)`, or 0.
pub fn check_weinstein_minimality(gs: &GroundState, disc: &Discretization, count: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut rng = functionals::random::rng(seed);
    let spec = functionals::random::RandomFieldSpec::default();
    let j_min = gs.j_min();
    let mut worst = f64::NEG_INFINITY;
    let mut smallest = f64::INFINITY;
    for _ in 0..count {
        let v = functionals::random::band_limited(disc.grid(), &spec, &mut rng)?;
        let j = functionals::weinstein_j(&v, disc)?;
        smallest = smallest.min(j);
        worst = worst.max((j_min - j) / j_min);
    }
    let ctx = merge(
        disc_context(disc),
        json!({"count": count, "seed": seed, "J_min": j_min, "smallest_J": smallest}),
    );
    Ok(CheckReport::new("weinstein_minimality", worst.max(0.0), 0.0, tol, ctx))
}

/// Energy of `u e^{i s theta}` computed directly and through its expansion
/// in `s`, over `count` random triples; observed is the largest relative gap.
pub fn check_phase_expansion(disc: &Discretization, count: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    use rand::Rng;
    let mut rng = functionals::random::rng(seed);
    let spec = functionals::random::RandomFieldSpec::default();
    let mut worst = 0.0f64;
    for _ in 0..count {
        let u = functionals::random::band_limited(disc.grid(), &spec, &mut rng)?;
        let theta = functionals::random::random_phase(disc.grid(), &mut rng)?;
        let s: f64 = rng.gen_range(-1.0..1.0);
        let direct = energy(&functionals::modulate(&u, &theta, s)?, disc)?;
        let expanded = functionals::phase_modulated_energy(&u, &theta, s, disc)?;
        let scale = direct.kinetic + direct.potential;
        worst = worst.max((direct.total - expanded).abs() / scale);
    }
    let ctx = merge(disc_context(disc), json!({"count": count, "seed": seed}));
    Ok(CheckReport::new("phase_expansion", worst, 0.0, tol, ctx))
}

/// `|int grad(theta).Im(conj(u) grad u)| <= sqrt(2E(u)) (int |grad theta|^2|u|^2)^{1/2}`
/// for `count` random critical-mass fields. Observed is the largest
/// `lhs - rhs`, or 0.
pub fn check_phase_inequality(gs: &GroundState, disc: &Discretization, count: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut rng = functionals::random::rng(seed);
    let spec = functionals::random::RandomFieldSpec::default();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..count {
        let raw = functionals::random::band_limited(disc.grid(), &spec, &mut rng)?;
        let u = functionals::random::normalize_to_mass(&raw, gs.mass_sq())?;
        let theta = functionals::random::random_phase(disc.grid(), &mut rng)?;
        let (lhs, rhs) = functionals::banica_lhs_rhs(&u, &theta, disc, gs.mass_sq(), 1e-8)?;
        worst = worst.max(lhs - rhs);
    }
    let ctx = merge(disc_context(disc), json!({"count": count, "seed": seed}));
    Ok(CheckReport::new("phase_inequality", worst.max(0.0), 0.0, tol, ctx))
}
