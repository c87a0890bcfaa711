use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zlap_core::io::scenario::LoadedGraph;
use zlap_core::io::{emit_report, load_graph, run_command, Command, Format, Params, Scenario};
use zlap_core::{Error, Result};

/// Graph shift operators, Z-Laplacian dynamics, spectral filters and bottlenecks.
#[derive(Parser)]
#[command(name = "zlap", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a transformed graph, shift operator or Laplacian.
    Transform(Common),
    /// Evolve a signal for `steps` (discrete) or to time `t` (continuous).
    Evolve(Common),
    /// Eigenvalues of a candidate Laplacian.
    Spectrum(Common),
    /// Band-filter a candidate Laplacian and reconstruct the adjacency.
    Filter(Common),
    /// Minimum-conductance cut under a protocol model.
    Bottleneck(Common),
    /// Rank candidate edges by the conductance they restore.
    Heal(Common),
    /// SIS epidemic threshold classification.
    Epidemic(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Edge-list file.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    graph: Option<PathBuf>,
    /// Treat the edge list as directed (a header line takes precedence).
    #[arg(long)]
    directed: bool,
    /// Parameters as inline JSON or a path to a JSON file.
    #[arg(long, conflicts_with = "scenario")]
    params: Option<String>,
    /// Scenario file bundling graph, command and parameters.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutFormat,
}

impl Cmd {
    fn split(&self) -> (Command, &Common) {
        match self {
            Cmd::Transform(c) => (Command::Transform, c),
            Cmd::Evolve(c) => (Command::Evolve, c),
            Cmd::Spectrum(c) => (Command::Spectrum, c),
            Cmd::Filter(c) => (Command::Filter, c),
            Cmd::Bottleneck(c) => (Command::Bottleneck, c),
            Cmd::Heal(c) => (Command::Heal, c),
            Cmd::Epidemic(c) => (Command::Epidemic, c),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_params(raw: Option<&str>) -> Result<Params> {
    match raw {
        None => Ok(Params::default()),
        Some(s) if s.trim_start().starts_with('{') => Params::from_json(s),
        Some(path) => Params::from_json(&read(Path::new(path))?).map_err(|e| e.context(path.to_string())),
    }
}

fn prepare(command: Command, args: &Common) -> Result<(LoadedGraph, Params)> {
    if let Some(path) = &args.scenario {
        let scenario = Scenario::from_json(&read(path)?).map_err(|e| e.context(path.display().to_string()))?;
        if scenario.command != command {
            return Err(Error::Scenario(format!(
                "{} is a `{}` scenario, not `{}`",
                path.display(),
                scenario.command.name(),
                command.name()
            )));
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let loaded = load_graph(&base.join(&scenario.graph), &scenario.graph, scenario.directed)?;
        return Ok((loaded, scenario.params));
    }
    let graph = args.graph.as_ref().expect("clap enforces --graph without --scenario");
    let loaded = load_graph(graph, &graph.display().to_string(), args.directed)?;
    Ok((loaded, parse_params(args.params.as_deref())?))
}

fn run(cli: &Cli) -> Result<()> {
    let (command, args) = cli.command.split();
    let (loaded, params) = prepare(command, args)?;
    let report = run_command(command, &loaded, &params)?;
    let format = match args.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    let text = emit_report(&report, format)?;
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zlap: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
