//! Command-line surface for single-function analysis and the experiment
//! suite. Every subcommand emits one machine-readable document (JSON by
//! default, CSV for histograms) with a strictly deterministic output
//! contract: identical argv, identical bytes.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fei::experiments::{
    chebyshev_bound, exhaustive_stats, family_scan, fourth_moment_table, fraction_bound,
    monte_carlo_with_cap,
};
use fei::measures::fei_report;
use fei::spectrum::TruthTable;
use fei::{Error, FamilySpec, DEFAULT_ARITY_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "fei", version, about = "Fourier entropy/influence analysis of boolean functions")]
struct Cli {
    /// Override the arity cap (also via FEI_ARITY_CAP).
    #[arg(long, global = true)]
    arity_cap: Option<u32>,
    /// Write the document to a file instead of standard output.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy, influence and FEI verdict for one function.
    Analyze {
        /// Function spec ("named:majority,n=3", "random:n=6,seed=1") or a
        /// hex truth-table literal ("n=3:8e").
        #[arg(long = "fn")]
        function: String,
        /// The constant C under test.
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Seeded Monte-Carlo moments and violation fraction for random functions.
    Montecarlo {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        trials: u64,
        /// Required: all randomness flows through this seed.
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exact moments over all 2^(2^n) functions, n <= 4.
    Exhaustive {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Enumerated fourth moments of coefficient pairs versus the closed form.
    Moments {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Extremal FEI-ratio scan over an enumerable family.
    Scan {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        /// csv emits the ratio histogram only.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Chebyshev tail bound and guaranteed-fraction bound for (n, epsilon/delta).
    Bound {
        #[arg(long)]
        n: u32,
        #[arg(long, conflicts_with = "delta")]
        epsilon: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn arity_cap(flag: Option<u32>) -> Result<u32, Error> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var("FEI_ARITY_CAP") {
        Ok(v) => v
            .parse()
            .map_err(|_| Error::Parse(format!("bad FEI_ARITY_CAP value {v:?}"))),
        Err(_) => Ok(DEFAULT_ARITY_CAP),
    }
}

fn parse_function(spec: &str, cap: u32) -> Result<TruthTable, Error> {
    if spec.starts_with("n=") {
        return TruthTable::from_hex_with_cap(spec, cap);
    }
    match spec.parse::<FamilySpec>()? {
        FamilySpec::Named(named) => named.build(),
        FamilySpec::Random { n, seed } => fei::families::random_function_with_cap(n, seed, 0, cap),
        other => Err(Error::Domain(format!(
            "{other} is a family, not a single function; use the scan subcommand"
        ))),
    }
}

fn json_only(format: Format) -> Result<(), Error> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::Parse(
            "csv output is only available for scan histograms".into(),
        )),
    }
}

fn run(cli: Cli) -> Result<String, Error> {
    let cap = arity_cap(cli.arity_cap)?;
    match cli.command {
        Command::Analyze { function, c, format } => {
            json_only(format)?;
            let tt = parse_function(&function, cap)?;
            let report = fei_report(&tt, c)?;
            Ok(serde_json::to_string(&report).expect("report serializes"))
        }
        Command::Montecarlo { n, trials, seed, epsilon, format } => {
            json_only(format)?;
            let rec = monte_carlo_with_cap(n, trials, seed, epsilon, cap)?;
            Ok(serde_json::to_string(&rec).expect("record serializes"))
        }
        Command::Exhaustive { n, epsilon, format } => {
            json_only(format)?;
            let rec = exhaustive_stats(n, epsilon)?;
            Ok(serde_json::to_string(&rec).expect("record serializes"))
        }
        Command::Moments { n, format } => {
            json_only(format)?;
            let table = fourth_moment_table(n)?;
            Ok(serde_json::to_string(&table).expect("table serializes"))
        }
        Command::Scan { family, c, format } => {
            let spec: FamilySpec = family.parse()?;
            let rec = family_scan(&spec, c)?;
            match format {
                Format::Json => Ok(serde_json::to_string(&rec).expect("record serializes")),
                Format::Csv => Ok(rec
                    .histogram
                    .expect("scan records always carry a histogram")
                    .to_csv()
                    .trim_end()
                    .to_string()),
            }
        }
        Command::Bound { n, epsilon, delta, format } => {
            json_only(format)?;
            let (eps, del) = match (epsilon, delta) {
                (Some(e), None) => (e, 2.0 * e),
                (None, Some(d)) => (d / 2.0, d),
                _ => {
                    return Err(Error::Parse(
                        "bound requires exactly one of --epsilon or --delta".into(),
                    ))
                }
            };
            let doc = serde_json::json!({
                "n": n,
                "epsilon": eps,
                "delta": del,
                "chebyshev_bound": chebyshev_bound(n, eps)?,
                "fraction_bound": fraction_bound(n, del)?,
            });
            Ok(doc.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    match run(cli) {
        Ok(doc) => {
            let mut doc = doc;
            doc.push('\n');
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, doc) {
                        eprintln!("{{\"error\":\"io\",\"message\":\"{e}\"}}");
                        return ExitCode::from(1);
                    }
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    stdout.write_all(doc.as_bytes()).expect("stdout write");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let kind = match e {
                Error::Capacity(_) => "capacity",
                Error::Domain(_) => "domain",
                Error::NotBoolean(_) => "not_boolean",
                Error::InvalidSpectrum(_) => "invalid_spectrum",
                Error::Parse(_) => "parse",
            };
            let line = serde_json::json!({"error": kind, "message": e.to_string()});
            eprintln!("{line}");
            // argument-shaped problems exit 2, computation limits exit 1
            match e {
                Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
