use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mrh_cli::commands::{self, Output};
use mrh_cli::error::EXIT_VALIDATION;
use mrh_cli::CliError;

/// Spectral solver for the mixed Riemann-Hilbert problem on the unit disk.
#[derive(Debug, Parser)]
#[command(name = "mrh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem file; writes solution.csv and report.json.
    Solve {
        problem: PathBuf,
        #[arg(short, long, default_value_os_t = commands::default_out_dir())]
        out: PathBuf,
    },
    /// Re-check a solution table against its problem file.
    Verify { problem: PathBuf, solution: PathBuf },
    /// Solve one linear problem from a table `theta,re_b,im_b,rhs`.
    Linear {
        table: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compare the solver with the log-linear oracle (circle fibers only).
    Oracle {
        problem: PathBuf,
        #[arg(short, long, default_value_os_t = commands::default_out_dir())]
        out: PathBuf,
    },
    /// Conjugate function of a real CSV column.
    Hilbert {
        input: PathBuf,
        #[arg(long, default_value = "u")]
        column: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Winding number of the complex CSV column `re + i im`.
    Winding {
        input: PathBuf,
        #[arg(long, default_value = "re")]
        re: String,
        #[arg(long, default_value = "im")]
        im: String,
        /// Accept coefficients that close onto their negative.
        #[arg(long)]
        allow_half: bool,
    },
}

fn run(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Solve { problem, out } => commands::solve(&problem, &out),
        Command::Verify { problem, solution } => commands::verify(&problem, &solution),
        Command::Linear { table, out } => commands::linear(&table, &out),
        Command::Oracle { problem, out } => commands::oracle(&problem, &out),
        Command::Hilbert { input, column, out } => commands::hilbert(&input, &column, out.as_deref()),
        Command::Winding { input, re, im, allow_half } => commands::winding(&input, &re, &im, allow_half),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.render().to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", out.stdout);
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
