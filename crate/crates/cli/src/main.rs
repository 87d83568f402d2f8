//! `canonloop`: command-line access to the loop generating functions, the
//! brute-force oracle and the singularity analysis.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails or
//! a computation breaks down, 2 on a usage error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use canonloop::LoopKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Document, Format};

#[derive(Parser, Debug)]
#[command(name = "canonloop", version, about = "Loops in k-noncrossing canonical RNA structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Decimal digits for real-valued output.
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindArg {
    Hairpin,
    Interior,
    Bulge,
}

impl From<KindArg> for LoopKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Hairpin => LoopKind::Hairpin,
            KindArg::Interior => LoopKind::Interior,
            KindArg::Bulge => LoopKind::Bulge,
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Case {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub tau: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Counts f_k(2n, 0) of k-noncrossing perfect matchings for n <= N.
    Fk {
        #[arg(long)]
        k: usize,
        #[arg(long = "N", alias = "n")]
        n_max: usize,
    },
    /// Shape counts i_k(s, m) for s <= N.
    Shapes {
        #[arg(long)]
        k: usize,
        #[arg(long = "N", alias = "n")]
        s_max: usize,
        /// Count shapes by brute force instead of expanding the shape GF.
        #[arg(long)]
        brute_force: bool,
    },
    /// Coefficients of a loop generating function.
    Gf {
        #[command(flatten)]
        case: Case,
        /// Emit all coefficients up to z^N.
        #[arg(long = "N", conflicts_with = "n")]
        order: Option<usize>,
        /// Emit only the coefficient of z^n.
        #[arg(long = "n")]
        n: Option<usize>,
        /// Cap on the u-degree; defaults to ceil(N/2).
        #[arg(long)]
        u_cap: Option<usize>,
    },
    /// Brute-force loop histograms over all structures of length n.
    Enum {
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        tau: usize,
        #[arg(long = "n", alias = "N")]
        n: usize,
        /// List the structures themselves.
        #[arg(long)]
        list: bool,
    },
    /// Oracle and internal-consistency suites.
    Check {
        /// `quick` skips the larger cases; `full` adds the parameter tables.
        #[arg(long, value_enum, default_value_t = Scope::Default)]
        scope: Scope,
    },
    /// Dominant singularity, derivatives and (mu, sigma^2) for one case.
    Singularity {
        #[command(flatten)]
        case: Case,
    },
    /// The (mu, sigma^2) grid for k = 2..7, tau = 1..4 against published values.
    Tables {
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Exact loop-count distributions against the normal limit.
    Clt {
        #[command(flatten)]
        case: Case,
        /// Comma-separated lengths.
        #[arg(long = "n-list", alias = "n", value_delimiter = ',', default_value = "50,100,200")]
        n_list: Vec<usize>,
    },
    /// Coefficient growth against 1/gamma(0).
    Growth {
        #[command(flatten)]
        case: Case,
        #[arg(long = "N", alias = "n", default_value_t = 300)]
        n: usize,
        /// Allowed relative error of the coefficient ratio.
        #[arg(long, default_value_t = 0.01)]
        ratio_tol: f64,
        /// Allowed relative error of the exponent estimate.
        #[arg(long, default_value_t = 0.20)]
        exponent_tol: f64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Quick,
    Default,
    Full,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if wants_json(&argv) {
                let doc = Document::error("usage", "invalid_argument", &e.to_string());
                println!("{}", doc.json_text());
            } else {
                let _ = e.print();
            }
            return ExitCode::from(2);
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => match output::emit(&outcome.document, cli.format, cli.out.as_deref()) {
            Ok(()) => {
                if outcome.passed {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("canonloop: cannot write output: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            let code = if e.is_usage() { 2 } else { 1 };
            match cli.format {
                Format::Json => {
                    let doc = Document::error(if e.is_usage() { "usage" } else { "computation" }, e.code(), &e.to_string());
                    println!("{}", doc.json_text());
                }
                Format::Csv => eprintln!("canonloop: {e}"),
            }
            ExitCode::from(code)
        }
    }
}

/// Whether a parse error should be reported as JSON. Looks at the raw
/// arguments, since json is the default unless csv is asked for.
fn wants_json(argv: &[String]) -> bool {
    !argv.iter().any(|a| a == "--format=csv") && !argv.windows(2).any(|w| w[0] == "--format" && w[1] == "csv")
}
