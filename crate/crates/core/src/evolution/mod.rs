//! Strang split-step Fourier integration with blow-up detection.

mod diagnostics;

pub use diagnostics::{format_f64, DiagnosticsRow, DiagnosticsSeries, CSV_HEADER};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretization::Discretization;
use crate::error::{InlsError, Result};
use crate::functionals::mass_of;
use crate::model::Field;
use crate::numerics::Power;

/// Boundary layer width, as a fraction of `L`, watched in strict mode.
pub const BOUNDARY_LAYER_FRACTION: f64 = 0.1;
/// Boundary mass fraction that ends a strict run.
pub const BOUNDARY_MASS_TOL: f64 = 1e-6;

fn default_record_every() -> usize {
    1
}

fn default_radius() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt0: f64,
    pub t_end: f64,
    /// Run stops once `||grad u||_2` exceeds this. `None` disables the test.
    #[serde(default)]
    pub grad_blowup_threshold: Option<f64>,
    /// `dt = dt0 / (1 + ||grad u||^2 / ||grad u0||^2)`.
    #[serde(default)]
    pub adapt: bool,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub strict_boundary: bool,
    /// Times at which snapshots are kept; steps are shortened to hit them.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Also keep a snapshot every this many steps.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    /// Radius of the ball used for `conc_fraction`.
    #[serde(default = "default_radius")]
    pub concentration_radius: f64,
    #[serde(default)]
    pub max_steps: Option<usize>,
}

impl EvolutionConfig {
    pub fn new(dt0: f64, t_end: f64) -> Self {
        EvolutionConfig {
            dt0,
            t_end,
            grad_blowup_threshold: None,
            adapt: false,
            record_every: 1,
            strict_boundary: false,
            snapshot_times: Vec::new(),
            snapshot_every: None,
            concentration_radius: default_radius(),
            max_steps: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt0 > 0.0 && self.dt0.is_finite()) {
            return Err(InlsError::validation("dt0", "must be positive"));
        }
        if !self.t_end.is_finite() {
            return Err(InlsError::validation("t_end", "must be finite"));
        }
        if self.record_every == 0 {
            return Err(InlsError::validation("record_every", "must be at least 1"));
        }
        if self.snapshot_every == Some(0) {
            return Err(InlsError::validation("snapshot_every", "must be at least 1"));
        }
        if let Some(th) = self.grad_blowup_threshold {
            if !(th > 0.0) {
                return Err(InlsError::validation("grad_blowup_threshold", "must be positive"));
            }
        }
        if !(self.concentration_radius > 0.0) {
            return Err(InlsError::validation("concentration_radius", "must be positive"));
        }
        if self.snapshot_times.iter().any(|t| !t.is_finite()) {
            return Err(InlsError::validation("snapshot_times", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedTEnd,
    BlowupDetected,
    BoundaryContaminated,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Field>,
    pub diagnostics: DiagnosticsSeries,
    pub termination: Termination,
    /// State at the last time reached (the last finite state on failure).
    pub final_state: Field,
    pub steps: usize,
}

impl Trajectory {
    /// `max |mass(t) - mass(0)| / mass(0)` over the recorded rows.
    pub fn mass_drift(&self) -> f64 {
        relative_drift(&self.diagnostics, |r| r.mass)
    }

    pub fn energy_drift(&self) -> f64 {
        relative_drift(&self.diagnostics, |r| r.energy)
    }
}

fn relative_drift(series: &DiagnosticsSeries, f: impl Fn(&DiagnosticsRow) -> f64) -> f64 {
    let Some(first) = series.rows.first() else {
        return 0.0;
    };
    let v0 = f(first);
    let scale = if v0 != 0.0 { v0.abs() } else { 1.0 };
    series
        .rows
        .iter()
        .map(|r| (f(r) - v0).abs() / scale)
        .fold(0.0, f64::max)
}

/// Split-step propagator for one trajectory on one discretization. The
/// linear factor `e^{-iK dt} / M^N` is cached for the last `dt` used.
pub struct Stepper<'a> {
    disc: &'a Discretization,
    power: Power,
    dt: f64,
    linear: Vec<Complex64>,
    reference: Option<f64>,
}

/// Relative mass error tolerated before [`Stepper::linear`] rescales.
pub const MASS_RESYNC: f64 = 1e-14;

impl<'a> Stepper<'a> {
    pub fn new(disc: &'a Discretization) -> Self {
        Stepper {
            disc,
            power: disc.nonlinear_power(),
            dt: f64::NAN,
            linear: Vec::new(),
            reference: None,
        }
    }

    fn set_dt(&mut self, dt: f64) {
        if dt == self.dt {
            return;
        }
        let s = 1.0 / self.disc.grid().len() as f64;
        self.linear = self
            .disc
            .spectral()
            .k2()
            .iter()
            .map(|k| Complex64::from_polar(s, -k * dt))
            .collect();
        self.dt = dt;
    }

    /// Exact nonlinear flow over time `tau`: `u <- u exp(i tau w |u|^{p-1})`.
    pub fn nonlinear(&self, u: &mut [Complex64], tau: f64) {
        if tau == 0.0 {
            return;
        }
        let w = self.disc.weights();
        let pw = self.power;
        if u.len() >= crate::spectral::PAR_THRESHOLD {
            use rayon::prelude::*;
            u.par_iter_mut().zip(w.par_iter()).for_each(|(z, wj)| {
                *z *= crate::numerics::cis(tau * wj * pw.eval(z.norm_sqr()));
            });
        } else {
            for (z, wj) in u.iter_mut().zip(w) {
                *z *= crate::numerics::cis(tau * wj * pw.eval(z.norm_sqr()));
            }
        }
    }

    /// Exact free flow over `dt`; returns `||grad u||^2` of the input.
    ///
    /// The exact sub-step is unitary, but the transforms drift the mass by
    /// about `eps/3` per round trip in a fixed direction. Once the mass has
    /// moved more than `MASS_RESYNC` away from the mass seen on the first
    /// call, the samples are rescaled back to it.
    pub fn linear(&mut self, u: &mut [Complex64], dt: f64) -> f64 {
        self.set_dt(dt);
        let sp = self.disc.spectral();
        let reference = *self.reference.get_or_insert_with(|| mass_of(u, 1.0));
        sp.forward(u);
        let g = sp.grad_norm_sq_from_hat(u);
        let lin = &self.linear;
        if u.len() >= crate::spectral::PAR_THRESHOLD {
            use rayon::prelude::*;
            u.par_iter_mut().zip(lin.par_iter()).for_each(|(z, l)| *z *= l);
        } else {
            for (z, l) in u.iter_mut().zip(lin) {
                *z *= l;
            }
        }
        sp.inverse_unscaled(u);
        let after = mass_of(u, 1.0);
        let d = (reference - after) / after;
        if after > 0.0 && d.abs() > MASS_RESYNC {
            let c = (1.0 + d).sqrt();
            for z in u.iter_mut() {
                *z *= c;
            }
        }
        g
    }

    /// One Strang step `N(dt/2) L(dt) N(dt/2)`.
    pub fn strang(&mut self, u: &mut [Complex64], dt: f64) -> f64 {
        self.nonlinear(u, 0.5 * dt);
        let g = self.linear(u, dt);
        self.nonlinear(u, 0.5 * dt);
        g
    }
}

/// One Strang split step of length `dt`.
pub fn step(u: &Field, dt: f64, disc: &Discretization) -> Result<Field> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(InlsError::InvalidParams(format!("time step {dt} must be positive")));
    }
    disc.check_field(u)?;
    let mut values = u.values().to_vec();
    Stepper::new(disc).strang(&mut values, dt);
    if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(InlsError::NonFinite(format!("step from t = {}", u.time())));
    }
    Field::new(*u.grid(), u.time() + dt, values)
}

fn boundary_fraction(values: &[Complex64], disc: &Discretization) -> f64 {
    let g = disc.grid();
    let width = BOUNDARY_LAYER_FRACTION * g.extent();
    let total = mass_of(values, 1.0);
    if total == 0.0 {
        return 0.0;
    }
    let edge: f64 = (0..g.len())
        .filter(|&i| g.in_boundary_layer(i, width))
        .map(|i| values[i].norm_sqr())
        .sum();
    edge / total
}

/// Integrates from `u0` (at time `u0.time()`) up to `cfg.t_end`.
///
/// Consecutive nonlinear half-steps are merged, which is exact because the
/// nonlinear flow keeps `|u|` fixed; the state is completed to a full Strang
/// step whenever it is recorded.
pub fn evolve(u0: &Field, cfg: &EvolutionConfig, disc: &Discretization) -> Result<Trajectory> {
    cfg.validate()?;
    disc.check_field(u0)?;
    let grid = *disc.grid();
    let t0 = u0.time();
    let mut diagnostics = DiagnosticsSeries::default();
    let first = DiagnosticsRow::compute(u0.values(), t0, disc, cfg.concentration_radius);
    let g0 = first.grad_norm;
    let threshold = cfg.grad_blowup_threshold.unwrap_or(f64::INFINITY);
    if threshold <= g0 {
        return Err(InlsError::validation(
            "grad_blowup_threshold",
            format!("{threshold} does not exceed the initial gradient norm {g0}"),
        ));
    }
    diagnostics.push(first);

    let mut events: Vec<f64> = cfg
        .snapshot_times
        .iter()
        .copied()
        .filter(|&s| s > t0 && s < cfg.t_end)
        .collect();
    events.sort_by(f64::total_cmp);
    events.dedup();
    events.push(cfg.t_end);
    let mut snapshots = Vec::new();
    if cfg.snapshot_times.contains(&t0) {
        snapshots.push(u0.clone());
    }

    let mut stepper = Stepper::new(disc);
    let mut u = u0.values().to_vec();
    let mut last_good = u.clone();
    let mut t = t0;
    let mut steps = 0usize;
    let mut pending = 0.0;
    let mut grad_sq = g0 * g0;
    let g0_sq = (g0 * g0).max(f64::MIN_POSITIVE);
    let mut next_event = 0;
    let finish = |values: Vec<Complex64>, t: f64, term, snaps, diag, steps| -> Result<Trajectory> {
        Ok(Trajectory {
            snapshots: snaps,
            diagnostics: diag,
            termination: term,
            final_state: Field::new(grid, t, values)?,
            steps,
        })
    };

    if t0 >= cfg.t_end {
        return finish(u, t, Termination::ReachedTEnd, snapshots, diagnostics, 0);
    }

    loop {
        if cfg.max_steps.is_some_and(|m| steps >= m) {
            stepper.nonlinear(&mut u, pending);
            return finish(u, t, Termination::ReachedTEnd, snapshots, diagnostics, steps);
        }
        let target = events[next_event];
        let mut dt = if cfg.adapt {
            cfg.dt0 / (1.0 + grad_sq / g0_sq)
        } else {
            cfg.dt0
        };
        let mut hit = false;
        if t + dt >= target - 1e-9 * dt {
            dt = target - t;
            hit = true;
        }
        if !(dt > 0.0) || t + dt == t {
            stepper.nonlinear(&mut u, pending);
            log::warn!("time step underflow at t = {t}");
            return finish(last_good, t, Termination::NumericalFailure, snapshots, diagnostics, steps);
        }
        stepper.nonlinear(&mut u, pending + 0.5 * dt);
        grad_sq = stepper.linear(&mut u, dt);
        pending = 0.5 * dt;
        t = if hit { target } else { t + dt };
        steps += 1;
        if !grad_sq.is_finite() {
            return finish(last_good, t, Termination::NumericalFailure, snapshots, diagnostics, steps);
        }

        let suspect = grad_sq.sqrt() > threshold;
        let record = hit || suspect || steps % cfg.record_every == 0;
        let snap_step = cfg.snapshot_every.is_some_and(|k| steps % k == 0);
        if !(record || snap_step) {
            continue;
        }
        stepper.nonlinear(&mut u, pending);
        pending = 0.0;
        let row = DiagnosticsRow::compute(&u, t, disc, cfg.concentration_radius);
        if !row.is_finite_row() {
            return finish(last_good, t, Termination::NumericalFailure, snapshots, diagnostics, steps);
        }
        last_good.copy_from_slice(&u);
        grad_sq = row.grad_norm * row.grad_norm;
        if record {
            diagnostics.push(row);
        }
        let at_snapshot = hit && next_event + 1 < events.len();
        if at_snapshot || snap_step {
            snapshots.push(Field::new(grid, t, u.clone())?);
        }
        if row.grad_norm > threshold {
            if !record {
                diagnostics.push(row);
            }
            return finish(u, t, Termination::BlowupDetected, snapshots, diagnostics, steps);
        }
        if cfg.strict_boundary && boundary_fraction(&u, disc) > BOUNDARY_MASS_TOL {
            if !record {
                diagnostics.push(row);
            }
            return finish(u, t, Termination::BoundaryContaminated, snapshots, diagnostics, steps);
        }
        if hit {
            if next_event + 1 == events.len() {
                return finish(u, t, Termination::ReachedTEnd, snapshots, diagnostics, steps);
            }
            next_event += 1;
        }
    }
}
