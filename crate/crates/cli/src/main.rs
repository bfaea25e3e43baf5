use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

mod commands;

/// Query finite nondeterministic structural causal models.
#[derive(Debug, Parser)]
#[command(name = "nscm", version)]
struct Cli {
    /// Emit a JSON envelope on stdout (and JSON errors on stderr).
    #[arg(long, global = true)]
    json: bool,
    /// Run even when the model exceeds the enumeration caps.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model file and report lints.
    Validate { model: PathBuf },
    /// List the solutions of a model, optionally after an intervention.
    Solve {
        model: PathBuf,
        /// Context as `U=u,...`; all contexts when omitted.
        #[arg(long)]
        context: Option<String>,
        /// Intervention as `X=x,...`.
        #[arg(long = "do")]
        intervention: Option<String>,
    },
    /// Evaluate a causal formula in a world, a context, or the whole model.
    Eval {
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        context: Option<String>,
        #[arg(long)]
        state: Option<String>,
    },
    /// Decide whether one variable depends on another.
    Depends {
        model: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Only consider settings that fix every other endogenous variable.
        #[arg(long)]
        direct: bool,
        /// Print the first witness found.
        #[arg(long)]
        witness: bool,
    },
    /// Decide actual causation in a world.
    Cause(CauseArgs),
    /// List graph simplifications, or apply one.
    Simplify {
        model: PathBuf,
        /// Edges to remove, as `P->C,...`.
        #[arg(long)]
        remove: Option<String>,
        #[arg(long)]
        setting_state: Option<String>,
        #[arg(long)]
        setting_context: Option<String>,
    },
    /// Check whether MODEL2 is an interventional extension of MODEL1.
    Extension { model1: PathBuf, model2: PathBuf },
    /// Infer a graph and a model from exhaustive interventional data.
    Discover(DiscoverArgs),
}

#[derive(Debug, Args)]
struct CauseArgs {
    model: PathBuf,
    #[arg(long)]
    state: String,
    #[arg(long)]
    context: Option<String>,
    /// Candidate cause as `X=x`.
    #[arg(long)]
    cause: String,
    /// Effect as `Y=y`.
    #[arg(long)]
    effect: String,
    /// List every witnessing simplification.
    #[arg(long)]
    witnesses: bool,
    /// Also try simplifications that disconnect cause from effect.
    #[arg(long)]
    no_prune: bool,
    /// Only try alternative cause values different from the actual one.
    #[arg(long)]
    require_distinct: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["model", "possibilities"]))]
struct DiscoverArgs {
    /// Ground-truth model to generate possibilities from.
    model: Option<PathBuf>,
    /// Possibility set JSON file.
    #[arg(long)]
    possibilities: Option<PathBuf>,
    /// `gs`, `complete`, or a file with an edge list.
    #[arg(long, default_value = "gs")]
    graph: String,
    /// Write the possibility set to this file.
    #[arg(long)]
    save_possibilities: Option<PathBuf>,
}

/// What a subcommand produced.
pub struct Report {
    pub text: String,
    pub json: Json,
    pub code: u8,
}

impl Report {
    pub fn ok(text: String, json: Json) -> Self {
        Report { text, json, code: 0 }
    }

    pub fn verdict(holds: bool, text: String, json: Json) -> Self {
        Report { text, json, code: if holds { 0 } else { 1 } }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn semantic(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    fn kind(&self) -> &'static str {
        if self.code == 2 {
            "usage"
        } else {
            "semantic"
        }
    }
}

impl From<nscm::Error> for Failure {
    fn from(e: nscm::Error) -> Self {
        use nscm::Error::*;
        match e {
            Parse { .. } | UnknownVariable(_) | ValueOutOfRange { .. } => Failure::usage(e.to_string()),
            _ => Failure::semantic(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let json = std::env::args().any(|a| a == "--json");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) if json => {
            report_failure(true, &Failure::usage(e.to_string().trim()));
            return ExitCode::from(2);
        }
        Err(e) => e.exit(),
    };
    match commands::run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&json!({"version": 1, "result": report.json})).unwrap());
            } else {
                print!("{}", report.text);
            }
            ExitCode::from(report.code)
        }
        Err(f) => {
            report_failure(cli.json, &f);
            ExitCode::from(f.code)
        }
    }
}

fn report_failure(json: bool, f: &Failure) {
    if json {
        let body = json!({"version": 1, "error": {"kind": f.kind(), "message": f.message}});
        eprintln!("{}", serde_json::to_string_pretty(&body).unwrap());
    } else {
        eprintln!("error: {}", f.message);
    }
}
