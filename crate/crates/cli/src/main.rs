use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jetcomplex_cli::commands::{self, Options};
use jetcomplex_cli::report::ReportDocument;
use jetcomplex_cli::system_file::{parse_pairs, parse_system, print_system, wfamily_system};
use jetcomplex_cli::CliError;

#[derive(Parser)]
#[command(name = "jetcomplex", version, about = "Exact analysis of constant-coefficient first-order PDE systems")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Print the report as JSON
    #[arg(long, global = true)]
    json: bool,
    /// Master seed for coordinate samples and prime choices
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random coordinate systems in the Cartan test
    #[arg(long, global = true, default_value_t = 20)]
    samples: usize,
    /// Largest tableau order (analyze, wfamily) or syzygy degree bound (complex)
    #[arg(long, global = true, default_value_t = 4)]
    max_degree: u32,
    /// Largest number of operators in the complex (default n + 1)
    #[arg(long, global = true)]
    max_length: Option<usize>,
    /// Rank matrices with at least this many rows modulo primes
    #[arg(long, global = true, default_value_t = 2000)]
    modular_threshold: usize,
    /// Primes per modular rank
    #[arg(long, global = true, default_value_t = 2)]
    prime_trials: usize,
    /// Exit with status 3 when a cutoff was reached
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Tableau dimensions and the Cartan involution test
    Analyze { system: String },
    /// Compatibility complex by iterated syzygies
    Complex { system: String },
    /// Hilbert-Poincare series of the tableau dimensions
    Hp {
        system: String,
        /// Number of dimensions to compute (default 2(n+2))
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Jet-level exactness of the Cauchy-Fueter complex
    VerifyCf {
        #[arg(long, default_value_t = 3)]
        kmax: u32,
    },
    /// W-family for an index set of pairs (j0, j)
    Wfamily {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// "(j0,j);(j0,j)..."
        #[arg(long)]
        pairs: String,
    },
    /// Print a system in explicit JSON form
    Print { system: String },
}

fn run(cli: &Cli) -> Result<Option<ReportDocument>, CliError> {
    let g = &cli.global;
    let opts = Options {
        seed: g.seed,
        samples: g.samples,
        max_degree: g.max_degree,
        max_length: g.max_length,
        modular_threshold: g.modular_threshold,
        prime_trials: g.prime_trials,
    };
    if opts.samples == 0 {
        return Err(CliError::Input("--samples must be positive".into()));
    }
    let doc = match &cli.command {
        Command::Analyze { system } => commands::cmd_analyze(&parse_system(system)?, &opts)?,
        Command::Complex { system } => commands::cmd_complex(&parse_system(system)?, &opts)?,
        Command::Hp { system, terms } => commands::cmd_hp(&parse_system(system)?, *terms)?,
        Command::VerifyCf { kmax } => commands::cmd_verify_cf(*kmax, &opts)?,
        Command::Wfamily { n, m, pairs } => commands::cmd_wfamily(&wfamily_system(*n, *m, &parse_pairs(pairs)?)?, &opts)?,
        Command::Print { system } => {
            println!("{}", print_system(&parse_system(system)?));
            return Ok(None);
        }
    };
    Ok(Some(doc))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(doc)) => {
            if cli.global.json {
                println!("{}", doc.to_json());
            } else {
                println!("{doc}");
            }
            ExitCode::from(doc.exit_code(cli.global.strict) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
