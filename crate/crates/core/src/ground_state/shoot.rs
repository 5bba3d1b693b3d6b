use super::ode::{Dopri, State, Tolerances};
use super::{GroundState, Profile, RadialProfile};
use crate::error::{InlsError, Result};
use crate::model::{sphere_area, Params, RadialGrid};
use crate::numerics::gauss_legendre;

/// Settings for [`shoot`].
#[derive(Debug, Clone, Copy)]
pub struct ShootOptions {
    /// Relative width at which bisection on `psi(0)` stops.
    pub tol: f64,
    pub rtol: f64,
    pub max_iter: usize,
    /// First trial value of `psi(0)`; the bracket sweep tries `seed * 2^k`.
    pub seed: f64,
    /// Largest exponent `|k|` tried in the bracket sweep.
    pub sweep: i32,
    /// Maximum integration step, in units of the natural length scale.
    pub max_step: f64,
    /// Relative agreement of the two bracketing trajectories that defines
    /// the matching radius.
    pub agreement: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            tol: 1e-15,
            rtol: 1e-12,
            max_iter: 200,
            seed: 1.0,
            sweep: 40,
            max_step: 0.02,
            agreement: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    /// `phi` crossed zero.
    Over,
    /// `phi'` turned positive while `phi > 0`.
    Under,
}

struct Shot {
    outcome: Outcome,
    nodes: Vec<(f64, State, State)>,
}

/// Relative size of the launch radius against the natural length scale.
const START: f64 = 1e-6;

fn length_scale(params: &Params, a: f64) -> f64 {
    a.powf(-(params.p() - 1.0) / (2.0 - params.b()))
}

/// Series solution near the origin and the exact integrals of the three
/// densities over `[0, r]`.
fn series_start(params: &Params, a: f64, r: f64) -> State {
    let n = params.dim() as f64;
    let b = params.b();
    let p = params.p();
    let alpha = -a.powf(p) / ((2.0 - b) * (n - b));
    let beta = a / (2.0 * n);
    let phi = a + alpha * r.powf(2.0 - b) + beta * r * r;
    let dphi = (2.0 - b) * alpha * r.powf(1.0 - b) + 2.0 * beta * r;
    let i_mass = a * a * r.powf(n) / n;
    let lead = (2.0 - b) * alpha * r.powf(1.0 - b);
    let i_grad = if b > 0.0 {
        lead * lead * r.powf(n) / (n + 2.0 - 2.0 * b)
    } else {
        4.0 * (alpha + beta).powi(2) * r.powf(n + 2.0) / (n + 2.0)
    };
    let i_pot = a.powf(p + 1.0) * r.powf(n - b) / (n - b);
    [phi, dphi, i_mass, i_grad, i_pot]
}

fn rhs(params: &Params) -> impl Fn(f64, &State) -> State {
    let n1 = params.dim() as i32 - 1;
    let b = params.b();
    let pm1 = params.p() - 1.0;
    let pp1 = params.p() + 1.0;
    move |r, y| {
        let phi = y[0];
        let dphi = y[1];
        let rn = r.powi(n1);
        let rb = r.powf(-b);
        let aphi = phi.abs();
        let nl = rb * aphi.powf(pm1) * phi;
        [
            dphi,
            -(n1 as f64) / r * dphi + phi - nl,
            rn * phi * phi,
            rn * dphi * dphi,
            rn * rb * aphi.powf(pp1),
        ]
    }
}

fn fire(params: &Params, a: f64, opts: &ShootOptions, record: bool) -> Result<Shot> {
    let scale = length_scale(params, a);
    let r0 = START * scale;
    let y0 = series_start(params, a, r0);
    let mut solver = Dopri::new(
        rhs(params),
        r0,
        y0,
        r0,
        Tolerances {
            rtol: opts.rtol,
            atol: opts.rtol * 1e-3 * a,
            max_step: opts.max_step * scale,
        },
    );
    let r_cap = 400.0 * scale;
    let mut nodes = Vec::new();
    if record {
        nodes.push((r0, y0, *solver.dy()));
    }
    loop {
        let step = solver.step().ok_or_else(|| {
            InlsError::NonFinite(format!("shooting step size underflow at psi(0) = {a:e}"))
        })?;
        if !step.y[0].is_finite() {
            return Err(InlsError::NonFinite(format!("shooting from psi(0) = {a:e}")));
        }
        if record {
            nodes.push((step.r, step.y, step.dy));
        }
        if step.y[0] < 0.0 {
            return Ok(Shot {
                outcome: Outcome::Over,
                nodes,
            });
        }
        if step.y[1] > 0.0 {
            return Ok(Shot {
                outcome: Outcome::Under,
                nodes,
            });
        }
        if step.r > r_cap {
            // Only an equilibrium phi = const survives this long without
            // either event; it sits below the ground state.
            return Ok(Shot {
                outcome: Outcome::Under,
                nodes,
            });
        }
    }
}

/// Positive radial solution of `phi'' + (N-1)/r phi' - phi + r^{-b} phi^p = 0`
/// by shooting on `phi(0)`.
pub fn shoot(params: &Params, opts: &ShootOptions) -> Result<GroundState> {
    if !(opts.tol > 0.0) {
        return Err(InlsError::InvalidParams("shooting tolerance must be positive".into()));
    }
    let (mut lo, mut hi) = bracket(params, opts)?;
    let mut iterations = 0;
    while hi - lo > opts.tol * lo {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if iterations > opts.max_iter {
            return Err(InlsError::NotConverged {
                iterations,
                residual: (hi - lo) / lo,
                history: vec![],
            });
        }
        match fire(params, mid, opts, false)?.outcome {
            Outcome::Under => lo = mid,
            Outcome::Over => hi = mid,
        }
    }
    let under = fire(params, lo, opts, true)?;
    let over = fire(params, hi, opts, true)?;
    let profile = build_profile(params, lo, &under, &over, opts)?;
    let (mass_sq, grad_sq, potential_term) = profile.norms(params);
    let j_min = grad_sq * mass_sq.powf(0.5 * (params.p() - 1.0)) / potential_term;
    Ok(GroundState {
        params: *params,
        psi0: lo,
        mass_sq,
        grad_sq,
        potential_term,
        j_min,
        residual: (hi - lo) / lo,
        profile: Profile::Radial(profile),
    })
}

fn bracket(params: &Params, opts: &ShootOptions) -> Result<(f64, f64)> {
    let seed = opts.seed;
    let first = fire(params, seed, opts, false)?.outcome;
    let (dir, want) = match first {
        Outcome::Under => (1.0, Outcome::Over),
        Outcome::Over => (-1.0, Outcome::Under),
    };
    let mut prev = seed;
    for k in 1..=opts.sweep {
        let a = seed * 2f64.powf(dir * k as f64);
        if fire(params, a, opts, false)?.outcome == want {
            return Ok(if dir > 0.0 { (prev, a) } else { (a, prev) });
        }
        prev = a;
    }
    let far = seed * 2f64.powf(dir * opts.sweep as f64);
    Err(InlsError::BracketNotFound {
        lo: seed.min(far),
        hi: seed.max(far),
    })
}

fn hermite(r: f64, n0: &(f64, State, State), n1: &(f64, State, State), comp: usize) -> (f64, f64) {
    cubic_hermite(r, n0.0, n1.0, n0.1[comp], n0.2[comp], n1.1[comp], n1.2[comp])
}

/// Cubic Hermite interpolant through `(r0, y0, d0)` and `(r1, y1, d1)`, with
/// its derivative.
fn cubic_hermite(r: f64, r0: f64, r1: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> (f64, f64) {
    let h = r1 - r0;
    let s = (r - r0) / h;
    let (d0, d1) = (d0 * h, d1 * h);
    let s2 = s * s;
    let s3 = s2 * s;
    let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * d1;
    let dv = ((6.0 * s2 - 6.0 * s) * y0
        + (3.0 * s2 - 4.0 * s + 1.0) * d0
        + (-6.0 * s2 + 6.0 * s) * y1
        + (3.0 * s2 - 2.0 * s) * d1)
        / h;
    (v, dv)
}

fn build_profile(
    params: &Params,
    a: f64,
    under: &Shot,
    over: &Shot,
    opts: &ShootOptions,
) -> Result<RadialProfile> {
    // Largest prefix of the undershoot trajectory that the overshoot one
    // reproduces to the requested relative accuracy.
    let mut j = 0;
    let mut last = 0;
    for (i, node) in under.nodes.iter().enumerate() {
        let r = node.0;
        if node.1[0] <= 0.0 || node.1[1] >= 0.0 && i > 0 {
            break;
        }
        while j + 1 < over.nodes.len() && over.nodes[j + 1].0 < r {
            j += 1;
        }
        if j + 1 >= over.nodes.len() {
            break;
        }
        let (v, _) = hermite(r, &over.nodes[j], &over.nodes[j + 1], 0);
        if (v - node.1[0]).abs() > opts.agreement * node.1[0] {
            break;
        }
        last = i;
    }
    if last < 8 {
        return Err(InlsError::NotConverged {
            iterations: 0,
            residual: f64::NAN,
            history: vec![],
        });
    }
    let nodes = &under.nodes[..=last];
    RadialProfile::from_trajectory(params, a, nodes)
}

impl RadialProfile {
    fn from_trajectory(params: &Params, a: f64, nodes: &[(f64, State, State)]) -> Result<Self> {
        let n = params.dim() as f64;
        let (r_match, ym, _) = nodes[nodes.len() - 1];
        let tail_c = ym[0] * r_match.powf(0.5 * (n - 1.0)) * r_match.exp();
        let mut radii: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let mut phi: Vec<f64> = nodes.iter().map(|n| n.1[0]).collect();
        let mut dphi: Vec<f64> = nodes.iter().map(|n| n.1[1]).collect();
        // The launch state already carries the integrals over [0, r0].
        let integrals = [ym[2], ym[3], ym[4]];
        let mut profile = RadialProfile {
            params: *params,
            grid: RadialGrid::new(radii.clone())?,
            phi: phi.clone(),
            dphi: dphi.clone(),
            psi0: a,
            r_match,
            match_index: nodes.len() - 1,
            tail_c,
            integrals,
        };
        // Extend with exact tail samples until the profile is negligible.
        let r_max = r_match + (ym[0] * 1e250).ln().max(1.0);
        let dr = 0.25;
        let mut r = r_match + dr;
        while r < r_max + dr {
            let (v, d) = profile.tail(r);
            radii.push(r);
            phi.push(v);
            dphi.push(d);
            r += dr;
        }
        profile.grid = RadialGrid::new(radii)?;
        profile.phi = phi;
        profile.dphi = dphi;
        Ok(profile)
    }

    pub(super) fn tail(&self, r: f64) -> (f64, f64) {
        let n = self.params.dim() as f64;
        let e = 0.5 * (n - 1.0);
        let v = self.tail_c * r.powf(-e) * (-r).exp();
        (v, -v * (1.0 + e / r))
    }

    /// `(||psi||^2, ||grad psi||^2, int |x|^{-b} psi^{p+1})`.
    fn norms(&self, params: &Params) -> (f64, f64, f64) {
        let n = params.dim() as f64;
        let b = params.b();
        let p = params.p();
        let c = self.tail_c;
        let rm = self.r_match;
        let mass_tail = 0.5 * c * c * (-2.0 * rm).exp();
        let e = 0.5 * (n - 1.0);
        let grad_tail = tail_integral(rm, |r| {
            let f = 1.0 + e / r;
            c * c * (-2.0 * (r - rm)).exp() * f * f
        }) * (-2.0 * rm).exp();
        let pot_tail = tail_integral(rm, |r| {
            r.powf(n - 1.0 - b - e * (p + 1.0)) * c.powf(p + 1.0) * (-(p + 1.0) * (r - rm)).exp()
        }) * (-(p + 1.0) * rm).exp();
        let w = sphere_area(params.dim());
        (
            w * (self.integrals[0] + mass_tail),
            w * (self.integrals[1] + grad_tail),
            w * (self.integrals[2] + pot_tail),
        )
    }
}

/// `int_{r0}^{r0+40} f`, for integrands decaying at least like `e^{-2(r-r0)}`.
fn tail_integral(r0: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(16);
    let panels = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0];
    let mut s = 0.0;
    for win in panels.windows(2) {
        let (a, b) = (r0 + win[0], r0 + win[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * half * f(mid + half * xi);
        }
    }
    s
}

pub(super) fn hermite_eval(profile: &RadialProfile, r: f64) -> (f64, f64) {
    let i = profile.grid.locate(r);
    let nodes = profile.grid.nodes();
    cubic_hermite(
        r,
        nodes[i],
        nodes[i + 1],
        profile.phi[i],
        profile.dphi[i],
        profile.phi[i + 1],
        profile.dphi[i + 1],
    )
}

pub(super) fn series_value(params: &Params, a: f64, r: f64) -> (f64, f64) {
    let s = series_start(params, a, r);
    (s[0], s[1])
}
