use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use qukit::bench::{cross_mode_error, run_bench, BenchMode, BenchReport};
use qukit::io::{parse_any, state_to_json, sym_to_json, AnyState, ClassificationReport};
use qukit::random::{random_factors, random_state, rng_for};
use qukit::verify::{run_verify, VerifyConfig};
use qukit::{
    classify_symmetric, coherent_displace, coherent_product, dicke_normalized, is_product, make_product_state,
    project_symmetric, CoherentParams, DisplacementParams, Error, Occupation, DEFAULT_TOL,
};

const EXIT_ENTANGLED: u8 = 1;
const EXIT_FAILED: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_SIZE: u8 = 3;

const DEFAULT_SEED: u64 = 1;

/// Symmetric-subspace states, coherent states and product-state detection for N quKits.
#[derive(Debug, Parser)]
#[command(name = "qukit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Coherent,
    Dicke,
    Product,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Full,
    Compressed,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a state file.
    Gen {
        kind: Kind,
        /// Number of sites N.
        #[arg(long)]
        n: Option<usize>,
        /// Local dimension K.
        #[arg(long)]
        k: Option<usize>,
        /// Coherent tau_2..tau_K as comma-separated complex numbers, e.g. `0.5+0.1i,-2i`.
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        /// Displacement eta_2..eta_K, same syntax as --tau.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "tau")]
        eta: Option<String>,
        /// Occupation counts for a Dicke state, e.g. `1,2,0`.
        #[arg(long)]
        occ: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Output path; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a state file holds a product state. Exit 0 = product, 1 = entangled.
    Classify {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Project a full state file onto the symmetric subspace.
    Project {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized checks of both characterization results.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Include wall-clock time in the JSON report (breaks byte-identical output).
        #[arg(long)]
        timing: bool,
    },
    /// Time full-space vs compressed collective operators and coherent states.
    Bench {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Size(_) => EXIT_SIZE,
        _ => EXIT_BAD_INPUT,
    }
}

fn parse_complex_list(text: &str) -> Result<Vec<Complex64>, Error> {
    text.split(',')
        .map(|part| {
            let part = part.trim();
            part.parse::<Complex64>().map_err(|e| Error::InvalidParam(format!("bad complex number {part:?}: {e:?}")))
        })
        .collect()
}

fn required(value: Option<usize>, flag: &str) -> Result<usize, Error> {
    value.ok_or_else(|| Error::InvalidParam(format!("{flag} is required")))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))?,
        None => emit(text)?,
    }
    Ok(())
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) -> Result<(), Error> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    kind: Kind,
    n: Option<usize>,
    k: Option<usize>,
    tau: Option<&str>,
    eta: Option<&str>,
    occ: Option<&str>,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), Error> {
    let psi = match kind {
        Kind::Coherent => {
            let (n, k) = (required(n, "--n")?, required(k, "--k")?);
            if let Some(eta) = eta {
                coherent_displace(&DisplacementParams::new(n, k, parse_complex_list(eta)?)?)?
            } else {
                let tau = match tau {
                    Some(t) => parse_complex_list(t)?,
                    None => vec![Complex64::new(0.0, 0.0); k.saturating_sub(1)],
                };
                coherent_product(&CoherentParams::new(n, k, tau)?)?
            }
        }
        Kind::Dicke => {
            let occ: Occupation = occ.ok_or_else(|| Error::InvalidParam("--occ is required".into()))?.parse()?;
            if n.is_some_and(|n| n != occ.n_sites()) || k.is_some_and(|k| k != occ.local_dim()) {
                return Err(Error::InvalidParam(format!("--occ {occ} disagrees with --n/--k")));
            }
            dicke_normalized(&occ)?
        }
        Kind::Product => {
            let (n, k) = (required(n, "--n")?, required(k, "--k")?);
            make_product_state(&random_factors(&mut rng_for(seed, 0), n, k)?)?
        }
        Kind::Random => {
            let (n, k) = (required(n, "--n")?, required(k, "--k")?);
            random_state(&mut rng_for(seed, 0), n, k)?
        }
    };
    write_output(out, &state_to_json(&psi))
}

fn cmd_classify(input: &Path, tol: f64) -> Result<bool, Error> {
    let text = fs::read_to_string(input)?;
    let report = match parse_any(&text)? {
        AnyState::Full(psi) => ClassificationReport::from_full(&is_product(&psi, tol)?, tol),
        AnyState::Symmetric(sym) => {
            ClassificationReport::from_symmetric(&classify_symmetric(&sym, tol)?, sym.n_sites(), tol)
        }
    };
    emit(&to_json(&report))?;
    eprintln!("verdict: {} (defect {:.3e}, tol {:e})", report.verdict, report.defect, tol);
    Ok(report.is_product())
}

fn cmd_project(input: &Path, out: Option<&Path>) -> Result<(), Error> {
    let text = fs::read_to_string(input)?;
    let psi = match parse_any(&text)? {
        AnyState::Full(psi) => psi,
        AnyState::Symmetric(_) => return Err(Error::Format("input is already a compressed symmetric state".into())),
    };
    let (sym, residual) = project_symmetric(&psi)?;
    write_output(out, &sym_to_json(&sym))?;
    eprintln!("dim S = {}, |P_S psi|^2 = {:.6e}, residual = {:.6e}", sym.dim(), sym.norm_sqr(), residual);
    Ok(())
}

#[derive(Serialize)]
struct BenchOutput {
    reports: Vec<BenchReport>,
    cross_mode_max_error: Option<f64>,
}

fn cmd_bench(n: usize, k: usize, mode: ModeArg, reps: usize, seed: u64) -> Result<(), Error> {
    let modes: &[BenchMode] = match mode {
        ModeArg::Full => &[BenchMode::Full],
        ModeArg::Compressed => &[BenchMode::Compressed],
        ModeArg::Both => &[BenchMode::Full, BenchMode::Compressed],
    };
    let mut reports = Vec::new();
    for &m in modes {
        reports.extend(run_bench(n, k, m, reps, seed)?);
    }
    let cross_mode_max_error = match mode {
        ModeArg::Both => Some(cross_mode_error(n, k, seed)?),
        _ => None,
    };
    for r in &reports {
        eprintln!(
            "{:>10} {:<16} dim {:>8}  {:.3e} s total  {:.3e} ops/s",
            r.mode.to_string(),
            r.op,
            r.dim,
            r.wall_time,
            r.throughput
        );
    }
    emit(&to_json(&BenchOutput { reports, cross_mode_max_error }))?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Gen { kind, n, k, tau, eta, occ, seed, out } => {
            cmd_gen(kind, n, k, tau.as_deref(), eta.as_deref(), occ.as_deref(), seed, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { input, tol } => {
            Ok(if cmd_classify(&input, tol)? { ExitCode::SUCCESS } else { ExitCode::from(EXIT_ENTANGLED) })
        }
        Command::Project { input, out } => {
            cmd_project(&input, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { n, k, samples, seed, tol, threads, timing } => {
            let start = Instant::now();
            let cfg = VerifyConfig { n_sites: n, local_dim: k, samples, seed, tol, threads };
            let mut report = run_verify(&cfg)?;
            let elapsed = start.elapsed().as_secs_f64();
            if timing {
                report.elapsed = Some(elapsed);
            }
            emit(&to_json(&report))?;
            eprintln!(
                "N={n} K={k} seed={seed}: theorem1 {}/{}, theorem2 {}/{}, max defect {:.3e}, {:.2} s",
                report.theorem1_pass.passed,
                report.theorem1_pass.total,
                report.theorem2_pass.passed,
                report.theorem2_pass.total,
                report.max_defect,
                elapsed
            );
            Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED) })
        }
        Command::Bench { n, k, mode, reps, seed } => {
            cmd_bench(n, k, mode, reps, seed)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(EXIT_BAD_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
