//! Command line interface for the fixed point locus analyzer.
//!
//! Exit codes: 0 success, 2 parse/config error, 3 precision/tower error,
//! 4 inconclusive, 5 oracle mismatch.

use berklocus::error::Error;
use berklocus::locus::GridParams;
use berklocus::report::{error_json, run_subcommand, Command, MapSpec, ReportDocument};
use berklocus::val::Val;
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Parser, Debug)]
#[command(
    name = "berklocus",
    about = "Analyze the Berkovich fixed point locus of a rational map over a p-adic field",
    after_help = "Subcommands: analyze | reduce | fixed-points | census | verify | sketch\n\
                  Example: berklocus analyze \"(z^2+1)/(z+1)\" -p 3"
)]
struct Cli {
    /// Subcommand: analyze, reduce, fixed-points, census, verify, sketch
    command: String,

    /// Map expression in z (integer/rational literals, the symbol p, + - * / ^)
    expression: String,

    /// The prime p
    #[arg(short, long)]
    prime: u64,

    /// Unramified degree of the coefficient tower
    #[arg(long, default_value_t = 1)]
    unram: usize,

    /// Ramification index of the coefficient tower (pi^ram = p)
    #[arg(long, default_value_t = 1)]
    ram: u64,

    /// Digits of working precision
    #[arg(long, default_value_t = 64)]
    precision: usize,

    /// Sampling grid rlog step, e.g. "1/2" (default 1/(2 ram))
    #[arg(long)]
    grid_step: Option<String>,

    /// Sampling grid depth per direction
    #[arg(long, default_value_t = 6)]
    grid_depth: usize,

    /// Conjugate the map by this Moebius expression first, e.g. "z/p"
    #[arg(long)]
    conjugate: Option<String>,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_step(s: &str) -> Result<Val, Error> {
    let parts: Vec<&str> = s.split('/').collect();
    let bad = || Error::Config(format!("invalid grid step '{s}'"));
    match parts.as_slice() {
        [n] => n.parse::<i64>().map(Val::from_integer).map_err(|_| bad()),
        [n, d] => {
            let n: i64 = n.parse().map_err(|_| bad())?;
            let d: i64 = d.parse().map_err(|_| bad())?;
            if d <= 0 || n <= 0 {
                return Err(bad());
            }
            Ok(Val::new(n, d))
        }
        _ => Err(bad()),
    }
}

fn run(cli: &Cli) -> Result<ReportDocument, Error> {
    let command = Command::parse(&cli.command)?;
    let mut spec = MapSpec::new(&cli.expression, cli.prime);
    spec.unram_degree = cli.unram;
    spec.ram_index = cli.ram;
    spec.precision = cli.precision;
    spec.conjugate = cli.conjugate.clone();
    let grid = GridParams {
        step: cli.grid_step.as_deref().map(parse_step).transpose()?,
        depth: cli.grid_depth,
    };
    run_subcommand(command, &spec, &grid)
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(doc) => {
            match cli.format {
                Format::Json => println!("{}", doc.to_json()),
                Format::Text => print!("{}", doc.to_text()),
                Format::Dot => match doc.to_dot() {
                    Some(dot) => print!("{dot}"),
                    None => println!("{}", doc.to_json()),
                },
            }
            std::process::exit(0);
        }
        Err(err) => {
            eprintln!("{}", serde_json::to_string_pretty(&error_json(&err)).unwrap());
            std::process::exit(err.exit_code());
        }
    }
}
