use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::*;
use crate::ground_state::{shoot, ShootOptions};
use crate::model::Params;

/// How much of the harness to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Identities and short runs; seconds.
    Quick,
    /// Adds the virial law, the S-family evolution and the subcritical bound.
    Default,
    /// Adds the blow-up experiment and higher-dimensional ground states.
    Full,
}

impl FromStr for Suite {
    type Err = InlsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Suite::Quick),
            "default" => Ok(Suite::Default),
            "full" => Ok(Suite::Full),
            other => Err(InlsError::validation("suite", format!("unknown suite `{other}`"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Quick => "quick",
            Suite::Default => "default",
            Suite::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_suite")]
    pub suite: Suite,
    #[serde(rename = "N", default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_b")]
    pub b: f64,
    /// Base grid points per axis; refined grids are multiples of it.
    #[serde(rename = "M", default = "default_points")]
    pub points: usize,
    #[serde(rename = "L", default = "default_extent")]
    pub extent: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_suite() -> Suite {
    Suite::Default
}
fn default_dim() -> usize {
    1
}
fn default_b() -> f64 {
    0.5
}
fn default_points() -> usize {
    1024
}
fn default_extent() -> f64 {
    20.0
}
fn default_seed() -> u64 {
    20_240_601
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: default_suite(),
            dim: default_dim(),
            b: default_b(),
            points: default_points(),
            extent: default_extent(),
            seed: default_seed(),
        }
    }
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig {
            suite,
            ..Default::default()
        }
    }

    /// Checks every field before anything is computed.
    pub fn validate(&self) -> Result<(Params, CartesianGrid)> {
        if !(1..=3).contains(&self.dim) {
            return Err(InlsError::validation("N", format!("N = {} must be 1, 2 or 3", self.dim)));
        }
        let params = Params::new(self.dim, self.b).map_err(|e| InlsError::validation("b", e.to_string()))?;
        if self.points < 16 {
            return Err(InlsError::validation("M", format!("M = {} must be at least 16", self.points)));
        }
        let grid = CartesianGrid::cell(self.dim, self.points, self.extent).map_err(|e| {
            let field = if self.extent > 0.0 && self.extent.is_finite() { "M" } else { "L" };
            InlsError::validation(field, e.to_string())
        })?;
        Ok((params, grid))
    }
}

type Job<'a> = Box<dyn Fn() -> Result<Vec<CheckReport>> + Send + Sync + 'a>;

fn one(r: Result<CheckReport>) -> Result<Vec<CheckReport>> {
    r.map(|r| vec![r])
}

/// Largest step below the free-flow stability limit `h^2/pi` on `grid`.
fn stable_dt(grid: &CartesianGrid, wanted: f64) -> f64 {
    let h = grid.spacing();
    wanted.min(0.9 * h * h / std::f64::consts::PI)
}

fn one_dimensional_only(name: &str, cfg: &SuiteConfig) -> CheckReport {
    CheckReport::skipped(name, "runs on one-dimensional grids only", json!({"N": cfg.dim}))
}

/// Runs the checks of `cfg.suite` on independent threads and returns the
/// reports in a fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let (params, grid) = cfg.validate()?;
    let gs = shoot(&params, &ShootOptions::default())?;
    let disc = Discretization::new(params, grid)?;
    let psi_mass = gs.mass_sq();
    let m = cfg.points;
    let l = cfg.extent;
    let quick = cfg.suite == Suite::Quick;
    let full = cfg.suite == Suite::Full;
    let one_d = cfg.dim == 1;
    let sp = SFamilyParams::new(1.0, 1.0, 0.0)?;
    let seed = cfg.seed;
    let (gs, disc) = (&gs, &disc);

    let mut jobs: Vec<Job> = vec![
        Box::new(|| Ok(check_ground_state(gs, 1e-6))),
        Box::new(|| {
            let classic = shoot(&Params::classic(1)?, &ShootOptions::default())?;
            let expected = 3f64.sqrt() * std::f64::consts::PI / 2.0;
            Ok(vec![CheckReport::new(
                "classic_limit_mass",
                classic.mass_sq() / expected,
                1.0,
                1e-5,
                json!({"N": 1, "b": 0.0, "mass_sq": classic.mass_sq()}),
            )])
        }),
        Box::new(move || one(check_weinstein_minimality(gs, disc, if quick { 20 } else { 100 }, seed, 1e-6))),
        Box::new(move || one(check_phase_expansion(disc, 20, seed + 1, 1e-10))),
        Box::new(move || one(check_phase_inequality(gs, disc, if quick { 20 } else { 50 }, seed + 2, 1e-8))),
        Box::new(move || {
            let u0 = Field::gaussian(grid, 0.7, 0.7)?;
            let dt = stable_dt(&grid, 1e-4);
            check_conservation(&u0, disc, dt, if quick { 0.25 } else { 1.0 }, 100)
        }),
        Box::new(move || {
            let d0 = stable_dt(&grid, 2e-4);
            check_standing_wave(disc, 0.5, &[d0, d0 / 2.0, d0 / 4.0], 1.0, 1e-6)
        }),
        Box::new(move || check_pseudo_conformal(&sp, gs, 2.0, &grid, 1e-8)),
        Box::new(move || {
            if !one_d {
                return Ok(vec![one_dimensional_only("gamma_parabola", cfg)]);
            }
            let fine = Discretization::new(params, CartesianGrid::cell(1, 16 * m, l)?)?;
            let samples = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
            check_gamma_parabola_s_family(&sp, gs, &samples, &fine, 1e-4)
        }),
        Box::new(move || {
            if !one_d {
                return Ok(vec![one_dimensional_only("step4_energy", cfg)]);
            }
            let fine = Discretization::new(params, CartesianGrid::cell(1, 64 * m, l)?)?;
            check_step4_identity(&sp, gs, &fine, 1e-6, 1e-3)
        }),
    ];

    if !quick {
        jobs.push(Box::new(move || {
            if !one_d {
                return Ok(vec![one_dimensional_only("virial_law", cfg)]);
            }
            let g = CartesianGrid::cell(1, 4 * m, 2.0 * l)?;
            let u0 = Field::gaussian(g, 0.7, 0.7)?;
            let samples = [0.1, 0.3, 0.5];
            let critical = Discretization::new(params, g)?;
            let mut a = check_virial_law(&u0, &critical, stable_dt(&g, 2e-5), &samples, 0.01, 1e-3)?;
            let cubic = Discretization::new(Params::with_power(1, cfg.b, 3.0)?, g)?;
            let mut b = check_virial_law(&u0, &cubic, stable_dt(&g, 2e-5), &samples, 0.01, 1e-3)?;
            b.name = "virial_law_noncritical".into();
            a.context["p"] = json!(critical.params().p());
            b.context["p"] = json!(3.0);
            Ok(vec![a, b])
        }));
        jobs.push(Box::new(move || {
            if !one_d {
                return Ok(vec![one_dimensional_only("s_family_evolution", cfg)]);
            }
            let g = CartesianGrid::cell(1, 8 * m, l / 2.0)?;
            let d = Discretization::new(params, g)?;
            let mut ecfg = EvolutionConfig::new(stable_dt(&g, 1.8e-6), 0.5);
            ecfg.record_every = usize::MAX;
            one(check_s_family_evolution(&sp, gs, 0.0, 0.5, &d, &ecfg, 1e-3))
        }));
        jobs.push(Box::new(move || {
            let g = Field::gaussian(grid, 1.0, 1.0)?;
            let u0 = g.scaled_by(0.9 * (psi_mass / mass(&g)?).sqrt());
            let mut ecfg = EvolutionConfig::new(stable_dt(&grid, 1e-4), 2.0);
            ecfg.record_every = 10;
            one(check_subcritical_bound(&u0, psi_mass, disc, &ecfg))
        }));
    }

    if full {
        jobs.push(Box::new(move || {
            if !one_d {
                return Ok(vec![one_dimensional_only("blowup_rate", cfg)]);
            }
            // The blow-up runs at b <= 0.1: for larger b the discrete
            // critical mass drifts above ||psi||^2 fast enough to stop the
            // contraction on any grid that fits the time budget.
            let b = cfg.b.min(0.1);
            let p = Params::new(1, b)?;
            let g = if b == cfg.b { gs.clone() } else { shoot(&p, &ShootOptions::default())? };
            blowup_experiment(&g, p, 4 * m)
        }));
        for (n, b) in [(2usize, 1.0), (3, 1.0)] {
            jobs.push(Box::new(move || {
                let g = shoot(&Params::new(n, b)?, &ShootOptions::default())?;
                Ok(check_ground_state(&g, 1e-6)
                    .into_iter()
                    .map(|mut r| {
                        r.name = format!("{}_{n}d", r.name);
                        r
                    })
                    .collect())
            }));
        }
        jobs.push(Box::new(|| {
            let p2 = Params::new(2, 1.0)?;
            let g = CartesianGrid::cell(2, 64, 10.0)?;
            let d = Discretization::new(p2, g)?;
            let u0 = Field::gaussian(g, 0.5, 1.0)?;
            let mut reports = check_conservation(&u0, &d, 1e-3, 0.5, 10)?;
            for r in &mut reports {
                r.name = format!("{}_2d", r.name);
            }
            Ok(reports)
        }));
    }

    let results: Vec<Result<Vec<CheckReport>>> = jobs.par_iter().map(|job| job()).collect();
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    let base = json!({"suite": cfg.suite, "seed": cfg.seed});
    for r in &mut reports {
        r.context = merge(base.clone(), r.context.take());
    }
    Ok(reports)
}

/// S-family data with `lambda0 = 1.6`, `T = 1`, evolved until the gradient
/// has grown tenfold, then the blow-up rate and mass concentration checks.
pub fn blowup_experiment(gs: &GroundState, params: Params, points: usize) -> Result<Vec<CheckReport>> {
    let sp = SFamilyParams::new(1.0, 1.6, 0.0)?;
    let grid = CartesianGrid::cell(1, points, 5.0)?;
    let disc = Discretization::new(params, grid)?;
    let u0 = s_family(&sp, gs, 0.0, &grid)?;
    let g0 = functionals::grad_norm_sq(&u0, &disc)?.sqrt();
    let dt = stable_dt(&grid, 1.0);
    let mut cfg = EvolutionConfig::new(dt, sp.t_blowup);
    cfg.record_every = ((1e-3 / dt).round() as usize).max(1);
    cfg.grad_blowup_threshold = Some(10.5 * g0);
    let traj = evolve(&u0, &cfg, &disc)?;
    let ctx = merge(
        merge(disc_context(&disc), sp_context(&sp)),
        json!({"dt0": dt, "steps": traj.steps, "threshold": 10.5 * g0}),
    );
    let mut rate = check_blowup_rate(&traj, Some(sp.t_blowup), 0.05)?;
    rate.context = merge(ctx.clone(), rate.context.take());
    let mut reports = vec![rate];
    for mut r in check_mass_concentration(&traj, 0.5, gs.mass_sq(), sp.t_blowup, 0.95)? {
        r.context = merge(ctx.clone(), r.context.take());
        reports.push(r);
    }
    Ok(reports)
}
