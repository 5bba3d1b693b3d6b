//! The `inls` command line.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or input
//! error, 3 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::discretization::Discretization;
use crate::error::{InlsError, Result};
use crate::evolution::{evolve, Termination};
use crate::functionals;
use crate::ground_state::{shoot, GroundState, ShootOptions};
use crate::io::{self, InitialCondition, RunConfig};
use crate::model::{CartesianGrid, Field, Params};
use crate::transforms::{self, SFamilyParams};
use crate::verify::{run_suite, Suite, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Default blow-up threshold in units of `||grad psi||_2`.
pub const DEFAULT_THRESHOLD_FACTOR: f64 = 50.0;

#[derive(Debug, Parser)]
#[command(name = "inls", version, about = "Numerical laboratory for the L2-critical inhomogeneous NLS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the radial ground state by shooting.
    GroundState(GroundStateArgs),
    /// Evolve an initial condition described by a JSON config.
    Evolve(EvolveArgs),
    /// Write a closed-form S-family snapshot.
    SFamily(SFamilyArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Apply a symmetry to a snapshot.
    Transform(TransformArgs),
}

#[derive(Debug, Args)]
struct GroundStateArgs {
    #[arg(long = "N", default_value_t = 1)]
    dim: usize,
    /// Inhomogeneity exponent; 0 selects the classic equation.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    b: f64,
    /// Write the summary JSON here (`-` for standard output).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write `r,psi` samples here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Radial spacing of the CSV samples.
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    dr: f64,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Args)]
struct GridArg {
    /// Points per axis and half-width, as `M,L`.
    #[arg(long, value_parser = parse_grid)]
    grid: (usize, f64),
    #[arg(long = "N", default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    b: f64,
}

#[derive(Debug, Args)]
struct SFamilyArgs {
    #[arg(long = "T", allow_negative_numbers = true)]
    t_blowup: f64,
    #[arg(long, allow_negative_numbers = true)]
    lambda0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    gamma0: f64,
    /// Time of the snapshot, before `T`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
    #[command(flatten)]
    grid: GridArg,
    /// Snapshot path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value = "default", value_parser = parse_suite)]
    suite: Suite,
    /// Write the reports as a JSON array here (`-` for standard output).
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long = "N")]
    dim: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long = "M")]
    points: Option<usize>,
    #[arg(long = "L", allow_negative_numbers = true)]
    extent: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[command(subcommand)]
    op: TransformOp,
}

#[derive(Debug, Subcommand)]
enum TransformOp {
    /// `lambda0^{N/2} u(lambda0 x)`.
    Scale {
        #[arg(long, allow_negative_numbers = true)]
        lambda0: f64,
        #[command(flatten)]
        files: Files,
    },
    /// `e^{i gamma0} u`.
    Phase {
        #[arg(long, allow_negative_numbers = true)]
        gamma0: f64,
        #[command(flatten)]
        files: Files,
    },
    /// Pseudo-conformal image of a snapshot taken at internal time `s`.
    PseudoConformal {
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long = "T", allow_negative_numbers = true)]
        t_blowup: f64,
        /// Target grid `M,L`; defaults to the input grid shrunk by `s`.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, f64)>,
        #[command(flatten)]
        files: Files,
    },
}

#[derive(Debug, Args)]
struct Files {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, f64), String> {
    let (m, l) = s.split_once(',').ok_or_else(|| format!("expected M,L, got `{s}`"))?;
    let m = m.trim().parse::<usize>().map_err(|e| format!("bad M `{m}`: {e}"))?;
    let l = l.trim().parse::<f64>().map_err(|e| format!("bad L `{l}`: {e}"))?;
    Ok((m, l))
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: InlsError| e.to_string())
}

/// Exit code for an error: 3 for numerical failures, 2 otherwise.
pub fn exit_code(e: &InlsError) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

/// Caps the global thread pool at `INLS_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("INLS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| InlsError::validation("INLS_THREADS", format!("`{raw}` is not a positive integer")))?;
    // A pool may already exist when called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let result = match cli.command {
        Command::GroundState(a) => ground_state_cmd(a),
        Command::Evolve(a) => evolve_cmd(a),
        Command::SFamily(a) => s_family_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Transform(a) => transform_cmd(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if path.as_os_str() == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.write_all(b"\n")?;
        Ok(())
    } else {
        fs::write(path, format!("{text}\n"))?;
        Ok(())
    }
}

fn params_for(dim: usize, b: f64) -> Result<Params> {
    if b == 0.0 {
        Params::classic(dim)
    } else {
        Params::new(dim, b)
    }
}

fn ground_state(params: &Params) -> Result<GroundState> {
    shoot(params, &ShootOptions::default())
}

fn ground_state_cmd(a: GroundStateArgs) -> Result<i32> {
    let params = params_for(a.dim, a.b)?;
    let gs = ground_state(&params)?;
    let text = io::json::to_string(&gs.summary());
    match &a.json {
        Some(path) => write_text(path, &text)?,
        None => println!("{text}"),
    }
    if let Some(path) = &a.csv {
        if !(a.dr > 0.0) {
            return Err(InlsError::validation("dr", "must be positive"));
        }
        let mut out = String::from("r,psi\n");
        let n = (gs.r_max() / a.dr).floor() as usize;
        for i in 0..=n {
            let r = i as f64 * a.dr;
            let v = gs.eval(r)?;
            out.push_str(&format!("{},{}\n", fmt(r), fmt(v)));
        }
        fs::write(path, out)?;
    }
    Ok(EXIT_OK)
}

fn fmt(v: f64) -> String {
    crate::evolution::format_f64(v)
}

fn build_initial(cfg: &RunConfig, params: &Params, grid: &CartesianGrid) -> Result<Field> {
    match &cfg.initial_condition {
        InitialCondition::GroundState => ground_state(params)?.sample_scaled(grid, 1.0),
        InitialCondition::SFamily {
            t_blowup,
            lambda0,
            gamma0,
        } => {
            let sp = SFamilyParams::new(*t_blowup, *lambda0, *gamma0)?;
            transforms::s_family(&sp, &ground_state(params)?, 0.0, grid)
        }
        InitialCondition::Gaussian { amplitude, width } => Field::gaussian(*grid, *amplitude, *width),
        InitialCondition::Snapshot { path } => {
            let (field, b) = io::load_snapshot(path)?;
            if b != params.b() {
                return Err(InlsError::validation(
                    "initial_condition.path",
                    format!("snapshot was written with b = {b}, config has b = {}", params.b()),
                ));
            }
            Ok(field)
        }
    }
}

fn evolve_cmd(a: EvolveArgs) -> Result<i32> {
    let text = fs::read_to_string(&a.config)?;
    let mut cfg = io::parse_config(&text)?;
    let (params, grid) = cfg.validate()?;
    let disc = Discretization::new(params, grid)?;
    let u0 = build_initial(&cfg, &params, &grid)?;
    if cfg.evolution.grad_blowup_threshold.is_none() && params.is_critical() {
        let gs = ground_state(&params)?;
        cfg.evolution.grad_blowup_threshold = Some(DEFAULT_THRESHOLD_FACTOR * gs.grad_sq().sqrt());
    }
    let out = cfg.outputs.clone();
    fs::create_dir_all(&out.directory)?;
    fs::write(out.path(&out.echo), cfg.to_json() + "\n")?;
    log::info!("evolving {} samples to t = {}", grid.len(), cfg.evolution.t_end);
    let traj = evolve(&u0, &cfg.evolution, &disc)?;
    let mut diag = fs::File::create(out.path(&out.diagnostics))?;
    traj.diagnostics.write_csv(&mut diag)?;
    for (i, snap) in traj.snapshots.iter().enumerate() {
        io::save_snapshot(&out.snapshot_path(i), snap, params.b())?;
    }
    io::save_snapshot(&out.path(&out.final_state), &traj.final_state, params.b())?;
    let summary = json!({
        "termination": traj.termination,
        "steps": traj.steps,
        "t_final": traj.final_state.time(),
        "snapshots": traj.snapshots.len(),
        "mass_drift": traj.mass_drift(),
        "energy_drift": traj.energy_drift(),
    });
    println!("{}", io::json::to_string(&summary));
    Ok(if traj.termination == Termination::NumericalFailure {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    })
}

fn s_family_cmd(a: SFamilyArgs) -> Result<i32> {
    let params = params_for(a.grid.dim, a.grid.b)?;
    let grid = CartesianGrid::cell(a.grid.dim, a.grid.grid.0, a.grid.grid.1)?;
    let sp = SFamilyParams::new(a.t_blowup, a.lambda0, a.gamma0)?;
    let gs = ground_state(&params)?;
    let field = transforms::s_family(&sp, &gs, a.t, &grid)?;
    io::save_snapshot(&a.out, &field, params.b())?;
    let disc = Discretization::new(params, grid)?;
    let summary = json!({
        "t": a.t,
        "lambda": sp.lambda_at(a.t),
        "mass": functionals::mass(&field)?,
        "grad_norm": functionals::grad_norm_sq(&field, &disc)?.sqrt(),
        "resolvable": transforms::resolution(&sp, &gs, a.t, &grid)?.resolvable,
    });
    println!("{}", io::json::to_string(&summary));
    Ok(EXIT_OK)
}

fn verify_cmd(a: VerifyArgs) -> Result<i32> {
    let mut cfg = SuiteConfig::new(a.suite);
    if let Some(n) = a.dim {
        cfg.dim = n;
    }
    if let Some(b) = a.b {
        cfg.b = b;
    }
    if let Some(m) = a.points {
        cfg.points = m;
    }
    if let Some(l) = a.extent {
        cfg.extent = l;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let reports = run_suite(&cfg)?;
    let to_stdout = a.json.as_deref().is_some_and(|p| p.as_os_str() == "-");
    if !to_stdout {
        println!("# forward checks only: the converse classification is not tested");
        for r in &reports {
            println!("{}", r.summary_line());
        }
    }
    if let Some(path) = &a.json {
        write_text(path, &io::json::to_string(&reports))?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", reports.len());
        Ok(EXIT_CHECK_FAILED)
    } else {
        Ok(EXIT_OK)
    }
}

fn transform_cmd(a: TransformArgs) -> Result<i32> {
    let (files, result): (&Files, Box<dyn Fn(&Field) -> Result<Field>>) = match &a.op {
        TransformOp::Scale { lambda0, files } => {
            let l = *lambda0;
            (files, Box::new(move |u| transforms::scale(u, l)))
        }
        TransformOp::Phase { gamma0, files } => {
            let g = *gamma0;
            (files, Box::new(move |u| Ok(transforms::phase(u, g))))
        }
        TransformOp::PseudoConformal {
            s,
            t_blowup,
            grid,
            files,
        } => {
            let (s, t) = (*s, *t_blowup);
            let grid = *grid;
            (
                files,
                Box::new(move |u: &Field| {
                    if !(s > 0.0) {
                        return Err(InlsError::TimeOutOfRange(format!("s = {s} must be positive")));
                    }
                    let target = match grid {
                        Some((m, l)) => CartesianGrid::new(u.grid().dim(), m, l, u.grid().centering())?,
                        None => u.grid().scaled(1.0 / s)?,
                    };
                    transforms::pseudo_conformal(u, s, t, &target)
                }),
            )
        }
    };
    let (u, b) = io::load_snapshot(&files.input)?;
    let v = result(&u)?;
    io::save_snapshot(&files.output, &v, b)?;
    Ok(EXIT_OK)
}
