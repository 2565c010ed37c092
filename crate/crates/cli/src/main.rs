//! `gabor`: build Gabor frames, tighten windows, rotate them through the
//! time-frequency plane, and verify the invariances numerically.
//!
//! One JSON config per job (`--config file` or `-` for stdin), flags
//! override config fields, every report embeds the effective parameters
//! and their hash. Exit codes: 0 success, 2 usage/config, 3 domain
//! (e.g. violated frame condition), 4 verification threshold exceeded.

mod config;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use gabor_core::deform::spectral_invariance_report;
use gabor_core::io::{
    read_coefficients_csv, read_signal_csv, write_coefficients_csv, write_signal_csv,
    LatticeDescriptor, WindowDescriptor,
};
use gabor_core::*;

use config::{parse_grid_flag, write_report, JobConfig, Report};

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Domain(GaborError),
    Threshold(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Threshold(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Domain(e) => write!(f, "domain error: {e}"),
            CliError::Threshold(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

impl From<GaborError> for CliError {
    fn from(e: GaborError) -> Self {
        match e {
            GaborError::Format(_) | GaborError::Io(_) => CliError::Config(e.to_string()),
            other => CliError::Domain(other),
        }
    }
}

#[derive(Parser)]
#[command(name = "gabor", version, about = "Gabor frames and their rotations")]
struct Cli {
    /// JSON job config (path, or `-` for stdin).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Rotation angles, comma separated (radians).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    /// Hermite basis size.
    #[arg(long = "basis-size", global = true)]
    basis_size: Option<usize>,
    /// Grid: `n,dt,t0` or `balanced:n`.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Leakage above this is reported and taints leakage-sensitive checks.
    #[arg(long = "leakage-threshold", global = true)]
    leakage_threshold: Option<f64>,
    /// Input file (signal or coefficients, command dependent).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Modulation period tau (tighten/bounds).
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Translation step T (tighten/bounds).
    #[arg(long = "t-step", global = true)]
    t_step: Option<f64>,
    /// Negate the transport phase (sensitivity control for verify).
    #[arg(long = "flip-gamma", global = true, hide = true)]
    flip_gamma: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a window onto the grid and write it as CSV.
    Window,
    /// Build a frame and report its lattice and warnings.
    Frame,
    /// Tighten a window: h = H^{-1/2} g.
    Tighten,
    /// Frame bounds by periodization and by frame-operator eigenvalues.
    Bounds,
    /// Rotate a frame: deformed window CSV per angle plus invariance report.
    Deform,
    /// Gabor coefficients of an input signal over a frame.
    Analyze,
    /// Reconstruct a signal from coefficients over a lattice-spec frame.
    Synthesize,
    /// Run numeric self-checks (exit 4 on threshold failure).
    Verify {
        /// unitarity | group-law | bch | rotation | theorem1 | corollary2 | all
        #[arg(default_value = "all")]
        which: String,
    },
    /// Bound-invariance study at the configured size and at double size.
    Report,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn effective_config(cli: &Cli) -> CliResult<JobConfig> {
    let mut cfg = match &cli.config {
        Some(path) => JobConfig::load(path)?,
        None => JobConfig::default(),
    };
    if let Some(g) = &cli.grid {
        cfg.grid = Some(parse_grid_flag(g)?);
    }
    if let Some(t) = &cli.theta {
        cfg.theta = Some(t.clone());
    }
    if let Some(m) = cli.basis_size {
        cfg.basis_size = Some(m);
    }
    if let Some(l) = cli.leakage_threshold {
        cfg.leakage_threshold = Some(l);
    }
    if let Some(input) = &cli.input {
        cfg.input = Some(input.display().to_string());
    }
    if let Some(tau) = cli.tau {
        cfg.tau = Some(tau);
    }
    if let Some(t) = cli.t_step {
        cfg.t_step = Some(t);
    }
    if cli.flip_gamma {
        cfg.flip_gamma = true;
    }
    Ok(cfg)
}

fn resolve_window(cfg: &JobConfig, grid: Grid) -> CliResult<(SampledSignal, WindowDescriptor)> {
    let desc = cfg.window_or_default();
    let signal = match &desc {
        WindowDescriptor::Spec(spec) => sample_window(spec, grid)?,
        WindowDescriptor::File { file } => {
            let f = fs::File::open(file)
                .map_err(|e| CliError::Config(format!("opening {file}: {e}")))?;
            let sig = read_signal_csv(std::io::BufReader::new(f))?;
            if sig.grid() != grid {
                return Err(CliError::Config(format!(
                    "window file {file} grid does not match the configured grid"
                )));
            }
            sig
        }
    };
    Ok((signal, desc))
}

fn resolve_frame(cfg: &JobConfig, grid: Grid) -> CliResult<GaborFrame> {
    let (window, _) = resolve_window(cfg, grid)?;
    match cfg.lattice.clone() {
        Some(LatticeDescriptor::Spec(spec)) => Ok(GaborFrame::from_spec(window, spec)?),
        Some(LatticeDescriptor::Points { points }) => {
            let pts = points
                .into_iter()
                .map(|(omega, s)| TimeFreqPoint::new(omega, s))
                .collect();
            Ok(GaborFrame::from_points(window, pts, "explicit points")?)
        }
        None => {
            // Default: Gaussian-matched square lattice.
            let tau = cfg.tau.unwrap_or(2.0 * std::f64::consts::PI.sqrt());
            let t_step = cfg.t_step.unwrap_or(tau / 2.0);
            let spec = LatticeSpec::new(tau, t_step, (-3, 3), (-3, 3))?;
            Ok(GaborFrame::from_spec(window, spec)?)
        }
    }
}

fn write_signal(dir: &Path, name: &str, signal: &SampledSignal) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("creating {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let mut buf = Vec::new();
    write_signal_csv(signal, &mut buf)?;
    fs::write(&path, buf)
        .map_err(|e| CliError::Config(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}

fn envelope<T: Serialize>(
    command: &str,
    cfg: &JobConfig,
    grid: Grid,
    basis_size: Option<usize>,
    warnings: Vec<String>,
    results: T,
) -> Report<T> {
    Report {
        command: command.into(),
        config_hash: cfg.hash(),
        library_version: env!("CARGO_PKG_VERSION").into(),
        grid,
        basis_size,
        parameters: cfg.clone(),
        warnings,
        results,
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = effective_config(&cli)?;
    let out = cli.out.clone();
    match &cli.command {
        Command::Window => {
            let grid = cfg.grid_or_default()?;
            let (window, desc) = resolve_window(&cfg, grid)?;
            let path = write_signal(&out, "window.csv", &window)?;
            let report = envelope(
                "window",
                &cfg,
                grid,
                None,
                Vec::new(),
                json!({
                    "window": desc,
                    "norm": window.norm(),
                    "file": path.file_name().unwrap().to_string_lossy(),
                }),
            );
            let rp = write_report(&out, "window_report.json", &report)?;
            println!("wrote {} and {}", path.display(), rp.display());
        }
        Command::Frame => {
            let grid = cfg.grid_or_default()?;
            let frame = resolve_frame(&cfg, grid)?;
            let report = envelope(
                "frame",
                &cfg,
                grid,
                None,
                frame.warnings().to_vec(),
                json!({
                    "atoms": frame.len(),
                    "window_norm": frame.window().norm(),
                    "lattice_spec": frame.spec(),
                }),
            );
            let rp = write_report(&out, "frame_report.json", &report)?;
            println!("wrote {}", rp.display());
        }
        Command::Tighten => {
            let grid = cfg.grid_or_default()?;
            let (window, _) = resolve_window(&cfg, grid)?;
            let tau = cfg.tau.unwrap_or(1.0);
            let t_step = cfg.t_step.unwrap_or(tau / 2.0);
            let tightened = tighten_window(&window, t_step, tau)?;
            let path = write_signal(&out, "tightened.csv", &tightened)?;
            let norm_sq = tightened.norm_sq();
            let report = envelope(
                "tighten",
                &cfg,
                grid,
                None,
                Vec::new(),
                json!({
                    "tau": tau,
                    "T": t_step,
                    "norm_sq": norm_sq,
                    "t_over_tau": t_step / tau,
                    "file": path.file_name().unwrap().to_string_lossy(),
                }),
            );
            let rp = write_report(&out, "tighten_report.json", &report)?;
            println!(
                "wrote {} (norm_sq = {norm_sq}) and {}",
                path.display(),
                rp.display()
            );
        }
        Command::Bounds => {
            let grid = cfg.grid_or_default()?;
            let frame = resolve_frame(&cfg, grid)?;
            let eigen = frame_bounds_eigen(&frame)?;
            let per = frame.spec().map(|spec| -> CliResult<BoundsReport> {
                let h = periodization(frame.window(), spec.t_step, spec.tau)?;
                Ok(bounds_from_periodization(&h)?)
            });
            let per = per.transpose()?;
            let report = envelope(
                "bounds",
                &cfg,
                grid,
                None,
                frame.warnings().to_vec(),
                json!({ "eigen": eigen, "periodization": per }),
            );
            let rp = write_report(&out, "bounds.json", &report)?;
            println!("wrote {}", rp.display());
        }
        Command::Deform => {
            let grid = cfg.grid_or_default()?;
            let m = cfg.basis_or_default();
            let basis = HermiteBasis::new(grid, m)?;
            let frame = resolve_frame(&cfg, grid)?;
            let thetas: Vec<RotationAngle> = cfg
                .thetas_or_default()
                .into_iter()
                .map(RotationAngle::new)
                .collect();
            let mut files = Vec::new();
            for (i, &angle) in thetas.iter().enumerate() {
                let deformed = deform_frame(&basis, &frame, angle)?;
                let name = format!("deformed_{i:03}.csv");
                write_signal(&out, &name, deformed.window_theta())?;
                files.push(json!({
                    "theta": angle.theta(),
                    "file": name,
                    "leakage": deformed.leakage(),
                }));
            }
            let invariance = spectral_invariance_report(&basis, &frame, &thetas, 0.01)?;
            let report = envelope(
                "deform",
                &cfg,
                grid,
                Some(m),
                frame.warnings().to_vec(),
                json!({ "windows": files, "invariance": invariance }),
            );
            let rp = write_report(&out, "deform_report.json", &report)?;
            println!(
                "wrote {} deformed windows and {}",
                thetas.len(),
                rp.display()
            );
        }
        Command::Analyze => {
            let grid = cfg.grid_or_default()?;
            let frame = resolve_frame(&cfg, grid)?;
            let input = cfg.input.clone().ok_or_else(|| {
                CliError::Config("analyze needs an input signal (--input)".into())
            })?;
            let f = fs::File::open(&input)
                .map_err(|e| CliError::Config(format!("opening {input}: {e}")))?;
            let signal = read_signal_csv(std::io::BufReader::new(f))?;
            let coeffs = analyze(&frame, &signal)?;
            fs::create_dir_all(&out)
                .map_err(|e| CliError::Config(format!("creating {}: {e}", out.display())))?;
            let path = out.join("coefficients.csv");
            let mut buf = Vec::new();
            write_coefficients_csv(&coeffs, &mut buf)?;
            fs::write(&path, buf)
                .map_err(|e| CliError::Config(format!("writing {}: {e}", path.display())))?;
            let report = envelope(
                "analyze",
                &cfg,
                grid,
                None,
                frame.warnings().to_vec(),
                json!({
                    "coefficients": coeffs.values.len(),
                    "energy": coeffs.values.iter().map(|v| v.norm_sqr()).sum::<f64>(),
                    "file": "coefficients.csv",
                }),
            );
            let rp = write_report(&out, "analyze_report.json", &report)?;
            println!("wrote {} and {}", path.display(), rp.display());
        }
        Command::Synthesize => {
            let grid = cfg.grid_or_default()?;
            let frame = resolve_frame(&cfg, grid)?;
            let input = cfg.input.clone().ok_or_else(|| {
                CliError::Config("synthesize needs an input coefficient file (--input)".into())
            })?;
            let f = fs::File::open(&input)
                .map_err(|e| CliError::Config(format!("opening {input}: {e}")))?;
            let coeffs = read_coefficients_csv(std::io::BufReader::new(f))?;
            let signal = synthesize_compact(&frame, &coeffs)?;
            let path = write_signal(&out, "synthesized.csv", &signal)?;
            let report = envelope(
                "synthesize",
                &cfg,
                grid,
                None,
                frame.warnings().to_vec(),
                json!({ "norm": signal.norm(), "file": "synthesized.csv" }),
            );
            let rp = write_report(&out, "synthesize_report.json", &report)?;
            println!("wrote {} and {}", path.display(), rp.display());
        }
        Command::Verify { which } => {
            let grid = cfg.grid_or_default()?;
            let m = cfg.basis_or_default();
            let outcome = verify::run_checks(&cfg, which)?;
            let passed = outcome.all_passed();
            let report = envelope(
                "verify",
                &cfg,
                grid,
                Some(m),
                outcome.warnings.clone(),
                json!({ "target": which, "checks": outcome.checks }),
            );
            let rp = write_report(&out, "verify_report.json", &report)?;
            for check in &outcome.checks {
                println!(
                    "{:10} {:?}: measured {:.3e} vs threshold {:.1e}",
                    check.name, check.status, check.measured, check.threshold
                );
            }
            println!("wrote {}", rp.display());
            if !passed {
                return Err(CliError::Threshold(format!(
                    "one or more checks exceeded their thresholds; see {}",
                    rp.display()
                )));
            }
        }
        Command::Report => {
            let grid = cfg.grid_or_default()?;
            let m = cfg.basis_or_default();
            let thetas: Vec<RotationAngle> = cfg
                .thetas_or_default()
                .into_iter()
                .filter(|t| *t != 0.0)
                .map(RotationAngle::new)
                .collect();
            let mut studies = Vec::new();
            let mut max_devs = Vec::new();
            for scale in [1usize, 2] {
                let (n2, m2) = (grid.len() * scale, m * scale);
                let g2 = if scale == 1 {
                    grid
                } else {
                    scaled_grid(grid, n2, m2)?
                };
                let basis = HermiteBasis::new(g2, m2)?;
                let cfg2 = JobConfig {
                    grid: Some(g2),
                    basis_size: Some(m2),
                    ..cfg.clone()
                };
                let frame = resolve_frame(&cfg2, g2)?;
                let rows = spectral_invariance_report(&basis, &frame, &thetas, 0.01)?;
                let worst = rows
                    .iter()
                    .fold(0.0f64, |acc, r| acc.max(r.rel_dev_a).max(r.rel_dev_b));
                max_devs.push(worst);
                studies.push(json!({
                    "n": n2,
                    "m": m2,
                    "rows": rows,
                    "max_rel_dev": worst,
                }));
            }
            let report = envelope(
                "report",
                &cfg,
                grid,
                Some(m),
                Vec::new(),
                json!({
                    "studies": studies,
                    "deviation_shrinks_on_doubling": max_devs[1] < max_devs[0],
                }),
            );
            let rp = write_report(&out, "invariance_study.json", &report)?;
            println!(
                "max rel dev {:.3e} -> {:.3e} on doubling; wrote {}",
                max_devs[0],
                max_devs[1],
                rp.display()
            );
        }
    }
    Ok(())
}

/// Grid for the doubled study: keep the balanced family balanced, otherwise
/// use the smallest symmetric span that admits the doubled basis.
fn scaled_grid(base: Grid, n2: usize, m2: usize) -> CliResult<Grid> {
    let balanced = Grid::balanced(base.len())?;
    if base == balanced {
        return Ok(Grid::balanced(n2)?);
    }
    let span = 2.0 * (2.0 * m2 as f64).sqrt().max(base.span() / 2.0);
    let dt = span / n2 as f64;
    Ok(Grid::new(n2, dt, -(n2 as f64 / 2.0) * dt)?)
}
