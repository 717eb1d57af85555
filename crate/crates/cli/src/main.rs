mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use betaexp::bernoulli::Method;
use betaexp::generators::GeneratorMode;
use betaexp::numeric::DEFAULT_PRECISION_BITS;

use crate::commands::CliError;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "betaexp",
    version,
    about = "Prefixes, generators and growth bounds for expansions in a non-integer base"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Working precision in bits (53..=106).
    #[arg(long, env = "BETAEXP_PRECISION_BITS", default_value_t = DEFAULT_PRECISION_BITS, global = true)]
    precision_bits: u32,

    /// Absolute tolerance for interval membership tests.
    #[arg(long, global = true)]
    tolerance: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Thresholds omega_m and lambda_m with their polynomials.
    Roots {
        /// Comma-separated indices.
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3, 10, 100])]
        m: Vec<u32>,
        /// Print both threshold tables rounded to five decimals.
        #[arg(long)]
        reproduce_tables: bool,
    },
    /// Number of k-prefixes of x.
    Count {
        /// Base in (1, 2): a decimal, `omega:M` or `lambda:M`.
        #[arg(long)]
        beta: String,
        /// Point in [0, 1/(beta-1)], same syntax as the base.
        #[arg(long)]
        x: String,
        #[arg(long)]
        k: usize,
        /// Cross-check branching against direct enumeration.
        #[arg(long)]
        oracle: bool,
        /// Also list every prefix with its orbit value.
        #[arg(long)]
        list: bool,
    },
    /// Run the dense or paired prefix generator.
    Generate {
        /// Base in (1, 2): a decimal, `omega:M` or `lambda:M`.
        #[arg(long)]
        beta: String,
        /// Point in [0, 1/(beta-1)], same syntax as the base.
        #[arg(long)]
        x: String,
        /// `dense` (alias `m`) or `paired` (alias `s3`).
        #[arg(long, default_value = "dense")]
        mode: GeneratorMode,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 2)]
        blocks: usize,
        /// Skip the base threshold test; containment is still verified.
        #[arg(long)]
        unchecked: bool,
        /// Include the words of every stage.
        #[arg(long)]
        words: bool,
    },
    /// Every growth and local-dimension bound at one base.
    Bounds {
        /// Base in (1, 2): a decimal, `omega:M` or `lambda:M`.
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = betaexp::bounds::DEFAULT_M_MAX)]
        m_max: u32,
    },
    /// Finite-k growth rates compared with the bounds.
    Growth {
        /// Base in (1, 2): a decimal, `omega:M` or `lambda:M`.
        #[arg(long)]
        beta: String,
        /// Point in [0, 1/(beta-1)], same syntax as the base.
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 28)]
        k_max: usize,
        #[arg(long, default_value_t = betaexp::prefix::MIN_GROWTH_K)]
        k_min: usize,
    },
    /// Local dimension of the Bernoulli convolution at x.
    Bernoulli {
        /// Base in (1, 2): a decimal, `omega:M` or `lambda:M`.
        #[arg(long)]
        beta: String,
        /// Point in [0, 1/(beta-1)]; required unless --interval is given.
        #[arg(long)]
        x: Option<String>,
        /// Radii beta^-k for k in K_MIN:K_MAX.
        #[arg(long, default_value = "6:24")]
        radii: String,
        #[arg(long, default_value = "recursion")]
        method: Method,
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        /// Required for Monte Carlo.
        #[arg(long)]
        seed: Option<u64>,
        /// Measure the interval LO:HI instead of a local dimension.
        #[arg(long)]
        interval: Option<String>,
        /// Depth for --interval.
        #[arg(long, default_value_t = 30)]
        depth: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.global, cli.command) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.render(cli.global.format).as_bytes());
            ExitCode::SUCCESS
        }
        Err(err) => {
            if let Some(report) = err.partial_report() {
                let mut out = std::io::stdout().lock();
                let _ = out.write_all(report.render(cli.global.format).as_bytes());
            }
            report_error(&err)
        }
    }
}

fn report_error(err: &CliError) -> ExitCode {
    let code = err.exit_code();
    if code == 3 {
        eprintln!("{}", err.diagnostic());
    } else {
        eprintln!("error: {err}");
    }
    ExitCode::from(code)
}
