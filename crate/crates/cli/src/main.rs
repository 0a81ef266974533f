use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use extlab_cli::config::{resolve_builtin, Function, InstanceFile, ResolvedInstance, SEED_ENV};
use extlab_cli::curve::{emit_curve, parse_grid};
use extlab_cli::{emit_report, run_scenario, CliError, Format, Result, ScenarioConfig};
use extlab_core::TolerancePolicy;

#[derive(Parser)]
#[command(name = "extlab", version, about = "Scenario runner for extensions of Hermitian contractions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites of a scenario config and write a report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Report file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Sample a Q-function or the Weyl function on a grid and write CSV.
    Curve {
        /// Built-in name or a `.toml` instance file.
        #[arg(long)]
        instance: String,
        /// q0, q1, calq0, calq1 or weyl.
        #[arg(long)]
        function: String,
        /// `start:stop:count[:log]` or `z:re,im;re,im`.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        margin: f64,
    },
    /// Print the built-in instances.
    ListInstances,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn instance(name: &str, tol: &TolerancePolicy) -> Result<ResolvedInstance> {
    if name.ends_with(".toml") {
        let text = std::fs::read_to_string(name).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        let file: InstanceFile = toml::from_str(&text).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        return file.resolve(name.into(), tol);
    }
    resolve_builtin(name)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { config, out, format } => {
            let cfg = ScenarioConfig::load(&config)?;
            let env = std::env::var(SEED_ENV).ok();
            let doc = run_scenario(&cfg, env.as_deref())?;
            let mut w = output(out.as_deref())?;
            w.write_all(emit_report(&doc, format)?.as_bytes())?;
            w.flush()?;
            Ok(doc.exit_code())
        }
        Command::Curve { instance: name, function, grid, out, margin } => {
            let tol = TolerancePolicy::default();
            let f = Function::parse(&function)?;
            let points = parse_grid(&grid)?;
            let inst = instance(&name, &tol)?;
            let mut w = output(out.as_deref())?;
            emit_curve(&inst, f, &points, margin, &tol, &mut w)?;
            w.flush()?;
            Ok(0)
        }
        Command::ListInstances => {
            println!("E1\tdom B = span e1 in C^2, B e1 = 0");
            println!("E2\tdom B = span e1 in C^2, B e1 = e2/2");
            println!("E3\tE2 with the boundary pair (B_mu, B_M)");
            println!("random(seed,n,domdim)\trandom contraction on a random domdim-dimensional frame in C^n");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("extlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
