//! Batch command-line front end.
//!
//! Commands: `gate`, `sample`, `recover`, `demo`, `gram`, `window eval`.
//! All output is data (JSON / CSV / GFLD1 / SPEC1); plotting is left to
//! external tools.
//!
//! Exit codes: 0 success (all gates pass / thresholds met), 1 a gate failed
//! or a residual threshold was missed, 2 parse or usage error, 3 support
//! violation while sampling, 4 gate enforcement stopped a recovery.

mod scenario;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use phaseless::error::Error as CoreError;
use phaseless::geometry::{CompactBox, CountableSet, Lattice};
use phaseless::grid::GridGeometry;
use phaseless::io;
use phaseless::paley_wiener::zero_flip_pair;
use phaseless::recovery::{
    aliasing_counterexample, gram_diagnostic, recover, GatePolicy,
};
use phaseless::transforms::sample_spectrogram;
use phaseless::uniqueness::{gamma_gate, lambda_gate};
use phaseless::windows::{airy_value, WindowSpec};
use phaseless::Complex64;

use scenario::Scenario;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SUPPORT: u8 = 3;
const EXIT_GATE: u8 = 4;

#[derive(Parser)]
#[command(name = "phaseless", about = "Phaseless STFT sampling and recovery", version)]
struct Cli {
    /// Worker threads for the data-parallel stages (default: PHASELESS_THREADS or 1).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Flags overriding scenario fields (CLI > file).
#[derive(Args, Clone, Default)]
struct Overrides {
    #[arg(long)]
    gate_policy: Option<String>,
    #[arg(long)]
    svd_tol: Option<f64>,
    #[arg(long)]
    lambda_horizon: Option<usize>,
    #[arg(long)]
    shannon_radius: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Λ and Γ uniqueness gates for a scenario.
    Gate {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Synthesize the scenario signal and write its spectrogram samples (SPEC1).
    Sample {
        scenario: PathBuf,
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Recover a signal from SPEC1 samples; writes <prefix>.report.json and
    /// <prefix>.estimate.gfld.
    Recover {
        samples: PathBuf,
        scenario: PathBuf,
        out_prefix: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Emit plottable CSV data for a named demo.
    Demo {
        /// zero_flip | aliasing | gram_sweep | airy_profile
        name: String,
        out_prefix: String,
    },
    /// Singular spectrum of the translate system for a scenario.
    Gram {
        scenario: PathBuf,
        /// Frequency offset (comma-separated coordinates; default 0).
        #[arg(long)]
        omega: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Window utilities.
    Window {
        #[command(subcommand)]
        cmd: WindowCmd,
    },
}

#[derive(Subcommand)]
enum WindowCmd {
    /// Evaluate a window (JSON spec file) on a grid; CSV to stdout or GFLD1
    /// with --out.
    Eval {
        window: PathBuf,
        /// Per-axis grid "lo:hi:n", comma-separated for higher dimensions.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("PHASELESS_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1);
    if threads > 0 {
        // ignore failure when a pool already exists (tests call main twice)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<CoreError>() {
                Some(CoreError::Support(_)) => EXIT_SUPPORT,
                Some(CoreError::Gate(_)) => EXIT_GATE,
                _ => EXIT_USAGE,
            };
            ExitCode::from(code)
        }
    }
}

fn apply_overrides(s: &mut Scenario, o: &Overrides) -> anyhow::Result<()> {
    if let Some(policy) = &o.gate_policy {
        s.config.gate_policy = match policy.as_str() {
            "enforce" => GatePolicy::Enforce,
            "warn" => GatePolicy::Warn,
            other => anyhow::bail!("unknown gate policy {other:?} (enforce|warn)"),
        };
    }
    if let Some(tol) = o.svd_tol {
        s.config.svd_tol = tol;
    }
    if let Some(h) = o.lambda_horizon {
        s.lambda_horizon = h;
    }
    if let Some(r) = o.shannon_radius {
        s.config.shannon_radius = r;
    }
    if let Some(seed) = o.seed {
        s.seed = seed;
    }
    Ok(())
}

fn run(cmd: Command) -> anyhow::Result<ExitCode> {
    match cmd {
        Command::Gate {
            scenario,
            overrides,
        } => {
            let mut s = Scenario::from_file(&scenario)?;
            apply_overrides(&mut s, &overrides)?;
            let lambda = lambda_gate(&s.window, &s.support, &s.lambda_set)?;
            let gamma = gamma_gate(&s.support, &s.gamma)?;
            let pass = lambda.pass && gamma.pass;
            let report = json!({
                "lambda_gate": lambda,
                "gamma_gate": gamma,
                "pass": pass,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            })
        }
        Command::Sample {
            scenario,
            out,
            overrides,
        } => {
            let mut s = Scenario::from_file(&scenario)?;
            apply_overrides(&mut s, &overrides)?;
            let signal = s.synthesize()?;
            let samples = sample_spectrogram(
                &signal,
                &s.window,
                &s.lambda_set,
                &s.gamma,
                s.lambda_horizon,
                &s.support,
            )?;
            io::write_spec_file(&out, &samples)?;
            eprintln!(
                "wrote {} ({} λ x {} γ samples)",
                out.display(),
                samples.lambda_horizon,
                samples.gamma_window.count()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Recover {
            samples,
            scenario,
            out_prefix,
            overrides,
        } => {
            let mut s = Scenario::from_file(&scenario)?;
            apply_overrides(&mut s, &overrides)?;
            let data = io::read_spec_file(&samples)?;
            let cfg = s.recovery_config()?;
            let truth = s.synthesize().ok();
            let report = recover(&data, &cfg, truth.as_ref())?;

            let report_path = PathBuf::from(format!("{out_prefix}.report.json"));
            let estimate_path = PathBuf::from(format!("{out_prefix}.estimate.gfld"));
            io::write_gfld_file(&estimate_path, &report.estimate)?;
            std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;

            if let Some(err) = report.aligned_error {
                println!("aligned_error {err:e}");
            }
            println!(
                "residuals interpolation={:e} solve_max={:e} assembly={:e} clipped_mass={:e}",
                report.residuals.interpolation,
                report.residuals.solve_max,
                report.residuals.assembly,
                report.residuals.clipped_mass
            );
            let ok = report.residuals.interpolation <= s.config.max_interpolation_residual
                && report.residuals.solve_max <= s.config.max_solve_residual
                && report.residuals.assembly <= s.config.max_assembly_residual
                && report.gates.iter().all(|g| g.pass);
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            })
        }
        Command::Demo { name, out_prefix } => demo(&name, &out_prefix),
        Command::Gram {
            scenario,
            omega,
            overrides,
        } => {
            let mut s = Scenario::from_file(&scenario)?;
            apply_overrides(&mut s, &overrides)?;
            let omega: Vec<f64> = match omega {
                Some(text) => text
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<Result<_, _>>()?,
                None => vec![0.0; s.support.dim()],
            };
            let diag = gram_diagnostic(
                &s.window,
                &omega,
                &s.lambda_set,
                s.lambda_horizon,
                &s.support,
                &s.signal_geometry()?,
            )?;
            println!("{}", serde_json::to_string(&diag)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Window { cmd } => match cmd {
            WindowCmd::Eval { window, grid, out } => {
                let text = std::fs::read_to_string(&window)?;
                let spec: WindowSpec = serde_json::from_str(&text)?;
                let geom = parse_grid(&grid)?;
                let field = spec.tabulate(&geom)?;
                match out {
                    Some(path) => io::write_gfld_file(&path, &field)?,
                    None => {
                        let stdout = std::io::stdout();
                        let mut outw = stdout.lock();
                        for off in 0..geom.len() {
                            let t = geom.node(&geom.unflat(off));
                            let v = field.values()[off];
                            let coords: Vec<String> =
                                t.iter().map(|x| format!("{x}")).collect();
                            writeln!(outw, "{},{},{}", coords.join(","), v.re, v.im)?;
                        }
                    }
                }
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}

fn parse_grid(text: &str) -> anyhow::Result<GridGeometry> {
    let mut origin = Vec::new();
    let mut spacing = Vec::new();
    let mut shape = Vec::new();
    for part in text.split(',') {
        let pieces: Vec<&str> = part.split(':').collect();
        if pieces.len() != 3 {
            anyhow::bail!("grid axis must be lo:hi:n, got {part:?}");
        }
        let lo: f64 = pieces[0].parse()?;
        let hi: f64 = pieces[1].parse()?;
        let n: usize = pieces[2].parse()?;
        if n < 2 || !(hi > lo) {
            anyhow::bail!("grid axis needs lo < hi and n >= 2");
        }
        origin.push(lo);
        spacing.push((hi - lo) / (n - 1) as f64);
        shape.push(n);
    }
    Ok(GridGeometry::new(origin, spacing, shape)?)
}

fn demo(name: &str, out_prefix: &str) -> anyhow::Result<ExitCode> {
    match name {
        "zero_flip" => {
            let geom = GridGeometry::span_1d(-8.0, 8.0, 2f64.powi(-5))?;
            let (f, h) = zero_flip_pair(Complex64::new(0.0, 1.0), &geom)?;
            let path = PathBuf::from(format!("{out_prefix}_zero_flip.csv"));
            let mut out = std::fs::File::create(&path)?;
            writeln!(out, "t,abs_f,abs_h,re_f,im_f,re_h,im_h")?;
            for off in 0..geom.len() {
                let t = geom.node(&geom.unflat(off))[0];
                let a = f.values()[off];
                let b = h.values()[off];
                writeln!(
                    out,
                    "{t},{},{},{},{},{},{}",
                    a.norm(),
                    b.norm(),
                    a.re,
                    a.im,
                    b.re,
                    b.im
                )?;
            }
            let dist = f.aligned_distance(&h)?;
            println!("zero_flip aligned_distance {dist:e} -> {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        "aliasing" => {
            let k = CompactBox::centered_cube(1.0, 1)?;
            let gamma = Lattice::scaled_integers(1.0)?;
            let w = WindowSpec::standard_gaussian(1)?;
            let demo = aliasing_counterexample(&k, &gamma, &w, None)?;
            let path = PathBuf::from(format!("{out_prefix}_aliasing.csv"));
            let mut out = std::fs::File::create(&path)?;
            writeln!(out, "t,abs_f,abs_h")?;
            let geom = demo.f.geometry().clone();
            for off in 0..geom.len() {
                let t = geom.node(&geom.unflat(off))[0];
                writeln!(
                    out,
                    "{t},{},{}",
                    demo.f.values()[off].norm(),
                    demo.h.values()[off].norm()
                )?;
            }
            println!(
                "aliasing xi={:?} max_sample_deviation {:e} signal_distance {:e} -> {}",
                demo.xi,
                demo.max_sample_deviation,
                demo.signal_distance,
                path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        "gram_sweep" => {
            let w = WindowSpec::standard_gaussian(1)?;
            let k = CompactBox::centered_cube(1.0, 1)?;
            let lambda = CountableSet::lattice(Lattice::scaled_integers(0.25)?);
            let grid = GridGeometry::span_1d(-1.0, 1.0, 0.125)?;
            let path = PathBuf::from(format!("{out_prefix}_gram_sweep.csv"));
            let mut out = std::fs::File::create(&path)?;
            writeln!(out, "lambda_horizon,sigma_min,sigma_max,cond")?;
            for horizon in [17usize, 25, 33, 49, 65] {
                let g = gram_diagnostic(&w, &[0.0], &lambda, horizon, &k, &grid)?;
                writeln!(out, "{horizon},{:e},{:e},{:e}", g.sigma_min, g.sigma_max, g.cond)?;
            }
            println!("gram_sweep -> {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        "airy_profile" => {
            // radial Airy profile against a one-dimensional Gaussian, both
            // normalized to 1 at the origin
            let path = PathBuf::from(format!("{out_prefix}_airy_profile.csv"));
            let mut out = std::fs::File::create(&path)?;
            writeln!(out, "r,airy,gaussian")?;
            let a = 1.0f64;
            let peak = std::f64::consts::PI.powi(2) * a.powi(4);
            let mut r = 0.0;
            while r <= 4.0 + 1e-12 {
                let airy = airy_value(a, &[r, 0.0]) / peak;
                let gauss = (-std::f64::consts::PI * r * r).exp();
                writeln!(out, "{r},{airy:e},{gauss:e}")?;
                r += 1.0 / 128.0;
            }
            println!("airy_profile -> {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        other => anyhow::bail!("unknown demo {other:?} (zero_flip|aliasing|gram_sweep|airy_profile)"),
    }
}
