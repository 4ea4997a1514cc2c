use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tropicore::dot::analysis_dot;
use tropicore::oracle::{random_instance, verify_bundle, CheckResult, VerifyConfig};
use tropicore::report::algebra_name;
use tropicore::{build_report, read_matrix, Error, ReportOptions, Semiring, Tolerance};

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 3;
const EXIT_RHO: u8 = 4;
const EXIT_KLEENE: u8 = 5;
const EXIT_ANALYSIS: u8 = 6;

#[derive(Parser)]
#[command(name = "tropicore", version, about = "Cores and eigencones of nonnegative matrices")]
struct Cli {
    /// Relative comparison tolerance.
    #[arg(long, global = true, env = "TROPICORE_TOL")]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algebra {
    Max,
    Nonneg,
    Both,
}

impl Algebra {
    fn semirings(self) -> Vec<Semiring> {
        match self {
            Algebra::Max => vec![Semiring::MaxTimes],
            Algebra::Nonneg => vec![Semiring::PlusTimes],
            Algebra::Both => vec![Semiring::MaxTimes, Semiring::PlusTimes],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a matrix given as JSON {"n", "entries"} or CSV.
    Analyze {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "max")]
        algebra: Algebra,
        /// Report eigencones of this power instead of 1 and σ_Λ.
        #[arg(long)]
        power: Option<usize>,
        /// Restrict eigencones to this eigenvalue.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        out: Output,
    },
    /// Run the oracle checks on seeded random matrices.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..=8))]
        size: u16,
        #[arg(long, value_enum, default_value = "both")]
        algebra: Algebra,
        /// Where witnesses of failed checks are written.
        #[arg(long, default_value = "witnesses")]
        witness_dir: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::InvalidMatrix(_) | Error::DimensionMismatch { .. } => EXIT_INPUT,
            Error::NotInSpectrum { .. } => EXIT_RHO,
            Error::KleeneDiverges => EXIT_KLEENE,
            _ => EXIT_ANALYSIS,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message,
    }
}

fn tolerance(tol: Option<f64>) -> Result<Tolerance, Failure> {
    match tol {
        None => Ok(Tolerance::default()),
        Some(t) => Tolerance::with_rel(t).map_err(|e| input_error(e.to_string())),
    }
}

fn analyze(
    input: &Path,
    algebra: Algebra,
    opts: &ReportOptions,
    out: Output,
    tol: &Tolerance,
) -> Result<String, Failure> {
    let a = read_matrix(input, Semiring::MaxTimes)?;
    if opts.power == Some(0) {
        return Err(input_error("--power must be at least 1".into()));
    }
    let mut reports = Vec::new();
    let mut dots = String::new();
    for sr in algebra.semirings() {
        let report = build_report(&a, sr, opts, tol)?;
        if out == Output::Dot {
            dots.push_str(&format!("// {}\n", algebra_name(sr)));
            dots.push_str(&analysis_dot(&a.with_semiring(sr), sr, tol)?);
        }
        reports.push(report);
    }
    Ok(match out {
        Output::Dot => dots,
        Output::Json if reports.len() == 1 => reports[0].to_json(),
        Output::Json => serde_json::to_string_pretty(&reports).expect("reports serialize"),
    })
}

fn write_witness(dir: &Path, seed: u64, trial: usize, sr: Semiring, check: &CheckResult) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
    let path = dir.join(format!("{}-seed{seed}-trial{trial}-{}.json", algebra_name(sr), check.name));
    let body = serde_json::to_string_pretty(check).expect("check serializes");
    fs::write(&path, body + "\n").map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn verify(
    seed: u64,
    trials: usize,
    size: usize,
    algebra: Algebra,
    witness_dir: &Path,
    tol: &Tolerance,
) -> Result<bool, Failure> {
    let mut failed = 0;
    for sr in algebra.semirings() {
        for trial in 0..trials {
            let (kind, a) = random_instance(seed, trial, size, sr);
            let cfg = VerifyConfig {
                tol: *tol,
                seed,
                instance: format!("{kind:?} trial {trial}"),
                ..VerifyConfig::default()
            };
            let report = verify_bundle(&a, sr, &cfg);
            for check in report.failures() {
                failed += 1;
                let path = write_witness(witness_dir, seed, trial, sr, check)?;
                println!(
                    "FAIL {} trial {trial} {}: {} ({})",
                    algebra_name(sr),
                    check.name,
                    check.detail,
                    path.display()
                );
            }
        }
    }
    let total = trials * algebra.semirings().len();
    if failed == 0 {
        println!("ok: {total} instances of size {size}, seed {seed}");
    } else {
        println!("{failed} failed checks over {total} instances");
    }
    Ok(failed == 0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let tol = tolerance(cli.tol)?;
    match cli.command {
        Command::Analyze {
            input,
            algebra,
            power,
            rho,
            out,
        } => {
            let text = analyze(&input, algebra, &ReportOptions { power, rho }, out, &tol)?;
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(0)
        }
        Command::Verify {
            seed,
            trials,
            size,
            algebra,
            witness_dir,
        } => {
            let ok = verify(seed, trials, size as usize, algebra, &witness_dir, &tol)?;
            Ok(if ok { 0 } else { EXIT_VERIFY })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
