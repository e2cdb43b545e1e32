use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qalg::commands::{self, Flags};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    CheckSat,
    Free,
    Reflect,
    MonadLaws,
    MonadCheck,
    Hausdorff,
    Colimit,
    EnumerateTerms,
    PresentationFromMonad,
}

impl Command {
    fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

/// Quantitative algebra toolkit.
///
/// Exit codes: 0 holds/ok, 1 refuted or an --expect failed, 2 input error,
/// 3 budget exceeded.
#[derive(Debug, Parser)]
#[command(name = "qalg", version)]
struct Cli {
    command: Command,
    /// A .qalg file; `-` or nothing reads standard input.
    file: Option<PathBuf>,
    /// Print a JSON report.
    #[arg(long)]
    json: bool,
    /// Term depth for `free` and `enumerate-terms`, default size for monads.
    #[arg(long)]
    depth: Option<usize>,
    /// Class, term or substitution budget.
    #[arg(long)]
    budget: Option<usize>,
    /// Monad to compare the free algebra with.
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// `path=value` check against the JSON report (repeatable).
    #[arg(long, value_name = "PATH=VALUE")]
    expect: Vec<String>,
    /// `key=value` argument overriding the file's `run` directive (repeatable).
    #[arg(long = "arg", value_name = "KEY=VALUE")]
    args: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match cli.file.as_deref() {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map(|_| s)
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read input: {e}");
            return ExitCode::from(2);
        }
    };
    let flags = Flags {
        json: cli.json,
        depth: cli.depth,
        budget: cli.budget,
        oracle: cli.oracle,
        seed: cli.seed,
        expect: cli.expect,
        args: cli.args,
    };
    let out = commands::run_text(&cli.command.name(), &text, &flags);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
