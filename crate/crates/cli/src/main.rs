//! `expldp`: run scenarios, evaluate conjugates and rate functions, and
//! execute the acceptance suite.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use expldp_core::models::PriorDescriptor;
use expldp_core::rates::{self, ContractionMethod};
use expldp_core::scenarios::{self, Format, Scenario, Table, SCENARIOS};
use expldp_core::{verify, Error, Family, Model, ModelPrior};

#[derive(Parser)]
#[command(
    name = "expldp",
    version,
    about = "Large-deviation rates for exponential-family posteriors and MLEs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List, inspect, or run registered scenarios.
    #[command(subcommand)]
    Scenario(ScenarioCmd),
    /// Convex conjugate of a family's cumulant at a mean point.
    Legendre(LegendreArgs),
    /// Tabulate a rate function.
    #[command(subcommand)]
    Rate(RateCmd),
    /// Run the acceptance criteria.
    Verify {
        /// Only criteria whose number, key, or tag matches.
        #[arg(long)]
        filter: Option<String>,
        /// Seed for randomized checks; defaults to EXPLDP_SEED.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    List,
    /// Print the JSON descriptor of a scenario.
    Show {
        name: String,
    },
    Run {
        name: String,
        /// Output directory; defaults to ./expldp-out/NAME.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct LegendreArgs {
    /// Built-in family name.
    #[arg(long, required_unless_present = "family_file")]
    family: Option<String>,
    /// JSON family descriptor instead of a built-in.
    #[arg(long, conflicts_with = "family")]
    family_file: Option<PathBuf>,
    /// Mean point, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    t: Vec<f64>,
}

#[derive(Subcommand)]
enum RateCmd {
    /// Posterior rate I(z) = l(theta_nu; mu0) - l(eta(z); mu0).
    Posterior {
        #[arg(long)]
        model: String,
        /// Closed prior support `lo,hi` on the model coordinate.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        support: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        mu0: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
    },
    /// Contraction rate of the constrained MLE.
    Mle {
        #[arg(long)]
        model: String,
        /// True natural parameter.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        theta0: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Method::LineMinimize)]
        method: Method,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
    },
    /// Cramer rate of the sample mean along the model curve.
    Cramer {
        #[arg(long)]
        model: String,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        theta0: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Pythagoras,
    LineMinimize,
    Brute,
}

impl From<Method> for ContractionMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Pythagoras => ContractionMethod::Pythagoras,
            Method::LineMinimize => ContractionMethod::LineMinimize,
            Method::Brute => ContractionMethod::Brute,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.chain().any(|c| {
                matches!(
                    c.downcast_ref::<Error>(),
                    Some(
                        Error::UnknownScenario(_)
                            | Error::UnknownBuiltin(_)
                            | Error::InvalidInput(_)
                            | Error::InvalidFamily(_)
                            | Error::InvalidModel(_)
                            | Error::InvalidPrior(_)
                            | Error::DimensionMismatch { .. }
                            | Error::OutsideDomain { .. }
                            | Error::MeanOutsideDomain { .. }
                            | Error::UnsupportedModel(_)
                    )
                )
            });
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Scenario(cmd) => scenario(cmd)?,
        Command::Legendre(args) => legendre(args)?,
        Command::Rate(cmd) => rate(cmd)?,
        Command::Verify { filter, seed } => {
            let seed = seed.unwrap_or_else(verify::seed_from_env);
            if verify::select(filter.as_deref()).is_empty() {
                bail!(Error::InvalidInput(format!(
                    "no criterion matches `{}`",
                    filter.unwrap_or_default()
                )));
            }
            let report = verify::verify_suite(filter.as_deref(), seed);
            println!("{report}");
            return Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn scenario(cmd: ScenarioCmd) -> Result<()> {
    match cmd {
        ScenarioCmd::List => {
            for name in SCENARIOS {
                let s = Scenario::builtin(name)?;
                println!(
                    "{name:<18} {} / {}: {}",
                    s.family,
                    s.model,
                    s.outputs.join(", ")
                );
            }
        }
        ScenarioCmd::Show { name } => println!("{}", Scenario::builtin(&name)?.to_json()),
        ScenarioCmd::Run { name, out, format } => {
            let dir = out.unwrap_or_else(|| PathBuf::from("expldp-out").join(&name));
            let summary = scenarios::run_scenario(&name, &dir, format.into())
                .with_context(|| format!("running scenario {name}"))?;
            for f in &summary.files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn load_family(name: Option<&str>, file: Option<&PathBuf>) -> Result<Family> {
    Ok(match (name, file) {
        (_, Some(path)) => {
            let json = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Family::from_json(&json)?
        }
        (Some(name), None) => Family::builtin(name)?,
        (None, None) => bail!(Error::InvalidInput("a family is required".into())),
    })
}

fn legendre(args: LegendreArgs) -> Result<()> {
    let family = load_family(args.family.as_deref(), args.family_file.as_ref())?;
    if args.t.len() != family.dim() {
        bail!(Error::DimensionMismatch {
            expected: family.dim(),
            found: args.t.len()
        });
    }
    let result = expldp_core::conjugate(&family, &args.t)?;
    println!("{}", serde_json::to_string_pretty(&result.to_json())?);
    Ok(())
}

fn emit(table: &Table, format: OutFormat) -> Result<()> {
    match format {
        OutFormat::Csv => print!("{}", table.to_csv()?),
        OutFormat::Json => println!("{}", serde_json::to_string_pretty(&table.to_json())?),
    }
    Ok(())
}

fn rate(cmd: RateCmd) -> Result<()> {
    match cmd {
        RateCmd::Posterior {
            model,
            support,
            mu0,
            grid,
            format,
        } => {
            if support.len() != 2 {
                bail!(Error::InvalidInput(
                    "--support takes exactly two values `lo,hi`".into()
                ));
            }
            let model = Model::builtin(&model)?;
            let desc: PriorDescriptor = serde_json::from_value(serde_json::json!({
                "kind": "uniform",
                "support": [support[0], support[1]],
            }))?;
            let prior = ModelPrior::from_descriptor(model, &desc)?;
            let t = rates::posterior_rate(&prior, &mu0, &grid)?;
            let mut table = Table::new("posterior_rate", &["coordinate", "rate"]);
            for (&z, &r) in t.coordinates.iter().zip(&t.rates) {
                table.push(vec![z.into(), r.into()]);
            }
            table.meta_text("kind", t.kind.as_str());
            if let Some(nu) = &t.theta_nu {
                table.meta_nums("theta_nu", nu);
            }
            emit(&table, format)
        }
        RateCmd::Mle {
            model,
            theta0,
            grid,
            method,
            format,
        } => {
            let model = Model::builtin(&model)?;
            let mut table = Table::new("mle_rate", &["coordinate", "rate"]);
            for &z in &grid {
                let r = rates::contraction_rate(&model, &theta0, z, method.into())?;
                table.push(vec![z.into(), r.into()]);
            }
            table.meta_text("kind", "mle");
            table.meta_nums("theta_0", &theta0);
            emit(&table, format)
        }
        RateCmd::Cramer {
            model,
            theta0,
            grid,
            format,
        } => {
            let model = Model::builtin(&model)?;
            let t = rates::cramer_table(&model, &theta0, &grid)?;
            let mut table = Table::new("cramer_rate", &["coordinate", "rate"]);
            for (&z, &r) in t.coordinates.iter().zip(&t.rates) {
                table.push(vec![z.into(), r.into()]);
            }
            table.meta_text("kind", t.kind.as_str());
            table.meta_nums("theta_0", &theta0);
            emit(&table, format)
        }
    }
}
