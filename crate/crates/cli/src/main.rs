use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fpgm::algorithms::SigmaConstant;
use fpgm::schedules::MRounding;
use fpgm_bench::{
    cmd_certify, cmd_compare, cmd_quadopt, cmd_run, write_json, CliError, ExperimentConfig, Overrides, Result,
    SequenceSpec,
};

#[derive(Parser)]
#[command(name = "fpgm", version, about = "Proximal-gradient worst-case bounds, certificates and benchmarks")]
struct Cli {
    /// Experiment config (JSON). Without it a seeded 30-dimensional lasso at N = 20 is used.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed of the instance and starting-point generator.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reference-solve tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Rounding of m = N/2 in the OPG sequence.
    #[arg(long, global = true, value_enum)]
    m_rounding: Option<Rounding>,
    /// Prox constant of FPGM-sigma.
    #[arg(long, global = true, value_enum)]
    sigma_constant: Option<SigmaChoice>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rounding {
    Ceil,
    Floor,
}

#[derive(Clone, Copy, ValueEnum)]
enum SigmaChoice {
    #[value(name = "L_over_sigma")]
    LOverSigma,
    #[value(name = "sigma_L")]
    SigmaL,
}

#[derive(Clone, Copy, ValueEnum)]
enum SequenceKind {
    Fista,
    Linear,
    Opg,
    Custom,
}

#[derive(Subcommand)]
enum Command {
    /// Write one trace CSV per (algorithm, N) and the problem JSON.
    Run,
    /// Feasibility report for the cost and mapping certificates of a t-sequence.
    Certify {
        sequence: SequenceKind,
        /// Horizon; implied by --values for custom sequences.
        #[arg(short = 'n', long = "horizon")]
        n: Option<usize>,
        /// Parameter of the linear sequence t_i = (i + a)/a.
        #[arg(long, default_value_t = 4.0)]
        a: f64,
        /// Comma-separated t values for a custom sequence.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Markdown table of analytic bounds against observed gaps and mapping norms.
    Compare,
    /// Maximize the mapping-bound surrogate and compare with the OPG sequence.
    Quadopt {
        #[arg(short = 'n', long = "horizon")]
        n: usize,
    },
}

impl Cli {
    fn rounding(&self) -> MRounding {
        match self.m_rounding {
            Some(Rounding::Ceil) => MRounding::Ceil,
            Some(Rounding::Floor) | None => MRounding::Floor,
        }
    }

    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            out_dir: self.out.clone(),
            tolerance: self.tol,
            m_rounding: self.m_rounding.map(|_| self.rounding()),
            sigma_constant: self.sigma_constant.map(|c| match c {
                SigmaChoice::LOverSigma => SigmaConstant::LOverSigma,
                SigmaChoice::SigmaL => SigmaConstant::SigmaL,
            }),
        }
    }

    fn config(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        config.apply(&self.overrides());
        Ok(config)
    }
}

fn save(dir: &Option<PathBuf>, name: &str, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
        let path: PathBuf = Path::new(dir).join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Io { path, source })?;
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut buf = Vec::new();
    write_json(&mut buf, value).expect("writing to memory");
    buf
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run => {
            for path in cmd_run(&cli.config()?)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Compare => {
            let (table, ok) = cmd_compare(&cli.config()?)?;
            print!("{table}");
            save(&cli.out, "compare.md", table.as_bytes())?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Failed("an observed value exceeds its analytic bound".into()))
            }
        }
        Command::Certify { sequence, n, a, values } => {
            let spec = match sequence {
                SequenceKind::Fista => SequenceSpec::Fista,
                SequenceKind::Linear => SequenceSpec::Linear { a: *a },
                SequenceKind::Opg => SequenceSpec::Opg { rounding: cli.rounding() },
                SequenceKind::Custom if values.is_empty() => {
                    return Err(CliError::Usage("custom sequences need --values".into()))
                }
                SequenceKind::Custom => SequenceSpec::Custom { values: values.clone() },
            };
            let report = cmd_certify(&spec, *n)?;
            let json = to_json(&report);
            print!("{}", String::from_utf8_lossy(&json));
            save(&cli.out, "certificate.json", &json)?;
            if !report.valid {
                let idx = report.validation.violating_indices();
                Err(CliError::Failed(format!("t-sequence is not admissible at indices {idx:?}: {}", report.validation)))
            } else if !report.feasible() {
                Err(CliError::Failed("a certificate failed the feasibility check".into()))
            } else {
                Ok(())
            }
        }
        Command::Quadopt { n } => {
            let report = cmd_quadopt(*n, cli.rounding())?;
            let json = to_json(&report);
            print!("{}", String::from_utf8_lossy(&json));
            save(&cli.out, "quadopt.json", &json)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
