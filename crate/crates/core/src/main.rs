use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use double_power::criteria::{classify, find_omega_star, OMEGA_STAR_TOL};
use double_power::shooting::{self, resample, SolverControls, PROFILE_ROWS};
use double_power::sweep::{self, SweepGrid};
use double_power::{Error, Params};

/// Critical constants, uniqueness criteria and ground states for
/// Δu − ωu + u^p − u^{2p−1} = 0.
#[derive(Parser, Debug)]
#[command(name = "double-power", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the criteria report for one (p, ω) as JSON.
    Report {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        omega: f64,
    },
    /// Solve for the ground state by shooting and optionally export the profile.
    Solve {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        omega: f64,
        /// CSV destination for the resampled profile (r,u,du).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Integration horizon (default 200/√ω).
        #[arg(long)]
        r_max: Option<f64>,
        /// Bisection tolerance on the initial height.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Classify a grid of (p, ω) points.
    Sweep {
        #[arg(long)]
        p_min: f64,
        #[arg(long)]
        p_max: f64,
        #[arg(long)]
        p_steps: usize,
        #[arg(long)]
        omega_steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Locate ω*(p), where the extended uniqueness criterion stops holding.
    OmegaStar {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = OMEGA_STAR_TOL)]
        tol: f64,
    },
    /// Count positive solutions by scanning initial heights.
    Multiplicity {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn io_fail(e: std::io::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

/// `x` with 12 significant digits in positional notation.
fn twelve_digits(x: f64) -> String {
    let decimals = if x == 0.0 {
        11
    } else {
        (11 - x.abs().log10().floor() as i64).max(0) as usize
    };
    format!("{x:.decimals$}")
}

fn run(cmd: Command) -> ExitCode {
    match cmd {
        Command::Report { p, omega } => {
            let params = match Params::planar(p, omega) {
                Ok(pr) => pr,
                Err(e) => return fail(&e),
            };
            let report = classify(&params);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            ExitCode::SUCCESS
        }
        Command::Solve {
            n,
            p,
            omega,
            out,
            r_max,
            tol,
        } => {
            let params = match Params::new(n, p, omega) {
                Ok(pr) => pr,
                Err(e) => return fail(&e),
            };
            let mut controls = SolverControls {
                r_max,
                ..SolverControls::default()
            };
            if let Some(t) = tol {
                if !(t > 0.0) {
                    return fail(&Error::InvalidParams(format!("tol must be > 0 (got {t})")));
                }
                controls.d_tol = t;
            }
            let gs = match shooting::find_ground_state(&params, &controls) {
                Ok(gs) => gs,
                Err(e) => return fail(&e),
            };
            if let Some(path) = out {
                let rows = resample(&gs.profile, &params, PROFILE_ROWS);
                if let Err(e) =
                    sweep::write_atomically(&path, |f| sweep::write_profile_csv(f, &rows))
                {
                    return io_fail(e);
                }
            }
            println!("d_star = {}", sweep::fmt_f64(gs.d_star));
            println!("residual_sup = {}", sweep::fmt_f64(gs.residual_sup));
            ExitCode::SUCCESS
        }
        Command::Sweep {
            p_min,
            p_max,
            p_steps,
            omega_steps,
            format,
            out,
        } => {
            let grid = SweepGrid {
                p_min,
                p_max,
                p_steps,
                omega_steps,
            };
            let cells = match sweep::sweep(&grid) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let written = sweep::write_atomically(&out, |f| match format {
                Format::Csv => sweep::write_sweep_csv(f, &cells),
                Format::Json => sweep::write_sweep_json(f, &cells),
            });
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => io_fail(e),
            }
        }
        Command::OmegaStar { p, tol } => match find_omega_star(p, tol) {
            Ok(w) => {
                println!("{}", twelve_digits(w));
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Multiplicity { n, p, omega, grid } => {
            let params = match Params::new(n, p, omega) {
                Ok(pr) => pr,
                Err(e) => return fail(&e),
            };
            let scan = match shooting::multiplicity_scan(&params, grid, &SolverControls::default()) {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            println!("{}", scan.count);
            for w in &scan.warnings {
                eprintln!("warning: {w}");
            }
            if 2 * scan.unresolved > grid {
                eprintln!("error: {} of {grid} cells unresolved", scan.unresolved);
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(cli.command)
}
