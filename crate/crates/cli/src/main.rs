use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use pentagon_cli::io::{load_zeta, save_report};
use pentagon_cli::run::{run_mode, trial_rng, wiring_lines};
use pentagon_cli::{default_tolerance, run, CliError, Mode, TrialConfig, ZetaSource, TOL_ENV};
use pentagon_core::weights::{
    extract_weights, gaussian_isotropic_flips, pentagon_sides, proportionality,
};
use pentagon_core::{check_pentagon, ZetaFamily64};

#[derive(Parser)]
#[command(name = "pentagon", version)]
#[command(about = "Build and numerically verify pentagon-relation solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded verification campaign
    Verify {
        mode: Mode,
        /// Block size (defaults: 3, or the size the mode requires)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pass threshold for every residual (default 1e-9, or $PENTAGON_TOL)
        #[arg(long)]
        tol: Option<f64>,
        /// Zeta family file; runs a single trial on it
        #[arg(long)]
        zeta: Option<PathBuf>,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Worked examples
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Print the Gaussian weights of the isotropic flips of a family (n = 2)
    ExtractWeights {
        #[arg(long)]
        zeta: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Scalar flips for zeta = (5, 4, 3, 2, 1)
    Kashaev,
}

fn tolerance(tol: Option<f64>) -> Result<f64, CliError> {
    match tol {
        Some(t) => Ok(t),
        None => default_tolerance(),
    }
}

/// Write to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn verify(
    mode: Mode,
    n: Option<usize>,
    trials: usize,
    seed: u64,
    tol: Option<f64>,
    zeta: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let cfg = TrialConfig {
        mode,
        n: n.unwrap_or(mode.default_n()),
        trials,
        seed,
        tolerance: tolerance(tol)?,
        zeta_source: zeta.map_or(ZetaSource::Random, ZetaSource::File),
    };
    let report = run(&cfg)?;
    match out {
        Some(path) => save_report(&report, &path)?,
        None => emit(&(report.to_json() + "\n"))?,
    }
    eprintln!("{}", report.headline());
    let failed: Vec<_> = report.trials.iter().filter(|t| !t.pass).collect();
    for t in failed.iter().take(10) {
        let why = t
            .error
            .clone()
            .unwrap_or_else(|| format!("worst residual {:.2e}", t.worst()));
        eprintln!("  trial {} failed: {why}", t.trial);
    }
    if failed.len() > 10 {
        eprintln!("  ... and {} more", failed.len() - 10);
    }
    Ok(verdict(report.pass))
}

fn demo_kashaev() -> Result<ExitCode, CliError> {
    let tol = 1e-12;
    let z = [5.0, 4.0, 3.0, 2.0, 1.0].map(|x| Complex64::new(x, 0.0));
    let zf = ZetaFamily64::from_scalars(z).map_err(|e| CliError::Config(e.to_string()))?;
    let out = run_mode(Mode::Kashaev, 1, &mut trial_rng(0, 0), Some(&zf))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut text = String::from("zeta = (5, 4, 3, 2, 1)\n");
    for (k, v) in &out.values {
        let _ = writeln!(text, "{k:>11} = {:.15}", v.re);
    }
    let mut pass = true;
    for (k, v) in &out.residuals {
        let ok = *v <= tol;
        pass &= ok;
        let _ = writeln!(text, "{k:>13}: {v:.3e} {}", if ok { "ok" } else { "FAIL" });
    }
    emit(&text)?;
    Ok(verdict(pass))
}

fn extract(zeta: PathBuf, tol: Option<f64>) -> Result<ExitCode, CliError> {
    let tol = tolerance(tol)?;
    let zf = load_zeta(&zeta, true)?;
    if zf.n() != 2 {
        return Err(CliError::Config(format!(
            "weights need n = 2, got {}",
            zf.n()
        )));
    }
    let core = |e: pentagon_core::Error| CliError::Config(e.to_string());
    let fs = gaussian_isotropic_flips(&zf).map_err(core)?.flips;
    let weights = extract_weights(&fs).map_err(core)?;
    let mut text = String::from("wiring:\n");
    for line in wiring_lines() {
        let _ = writeln!(text, "  {line}");
    }
    text += "weights:\n";
    for w in &weights {
        let _ = writeln!(text, "  {w}");
    }
    let (l, r) = pentagon_sides(&weights).map_err(core)?;
    let ratio = proportionality(&l, &r).map_err(core)?;
    let _ = writeln!(
        text,
        "matrix pentagon residual: {:.3e}",
        check_pentagon(&fs)
    );
    let _ = writeln!(text, "const = {}", ratio.constant);
    let _ = writeln!(text, "grassmann residual: {:.3e}", ratio.residual);
    emit(&text)?;
    Ok(verdict(ratio.residual <= tol))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify {
            mode,
            n,
            trials,
            seed,
            tol,
            zeta,
            out,
        } => verify(mode, n, trials, seed, tol, zeta, out),
        Command::Demo {
            which: Demo::Kashaev,
        } => demo_kashaev(),
        Command::ExtractWeights { zeta, tol } => extract(zeta, tol),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Config(_)) && e.to_string().contains(TOL_ENV) {
                eprintln!("hint: unset {TOL_ENV} or set it to a positive number");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
