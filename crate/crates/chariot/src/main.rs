use std::path::PathBuf;
use std::process::ExitCode;

use chariot::scenario::{parse, run_config, RunOptions, ScenarioError};
use clap::{Args, Parser, Subcommand};

/// Parallel transport, holonomy and curvature experiments on surfaces.
///
/// Each subcommand reads a TOML scenario whose `[command] kind` must match
/// it; `run` accepts any kind. Results go to CSV files and `summary.txt`.
#[derive(Parser)]
#[command(name = "chariot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parallel transport along a path, or holonomy of a loop.
    Transport(Common),
    /// Two-wheeled chariot along a path.
    Chariot(Common),
    /// Shoot or connect a geodesic.
    Geodesic(Common),
    /// Relax a path to a geodesic.
    Relax(Common),
    /// Curvature as holonomy per unit area.
    Curvature(Common),
    /// Boundary holonomy against the integral of curvature.
    Gaussbonnet(Common),
    /// Angle excess of a geodesic polygon.
    Polygon(Common),
    /// Distance distortion of a flat map of the sphere.
    Mapcheck(Common),
    /// Intrinsic against extrinsic curvature.
    Egregium(Common),
    /// Run whatever the scenario's command is.
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    config: PathBuf,
    /// Output directory (overrides `[output] directory`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed for sampling commands.
    #[arg(long)]
    seed: Option<u64>,
    /// Write angles in degrees.
    #[arg(long)]
    degrees: bool,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
}

impl Command {
    fn split(self) -> (Option<&'static str>, Common) {
        match self {
            Command::Transport(c) => (Some("transport"), c),
            Command::Chariot(c) => (Some("chariot"), c),
            Command::Geodesic(c) => (Some("geodesic"), c),
            Command::Relax(c) => (Some("relax"), c),
            Command::Curvature(c) => (Some("curvature"), c),
            Command::Gaussbonnet(c) => (Some("gaussbonnet"), c),
            Command::Polygon(c) => (Some("polygon"), c),
            Command::Mapcheck(c) => (Some("mapcheck"), c),
            Command::Egregium(c) => (Some("egregium"), c),
            Command::Run(c) => (None, c),
        }
    }
}

fn run(cli: Cli) -> Result<(), ScenarioError> {
    let (expected, common) = cli.command.split();
    let text = std::fs::read_to_string(&common.config).map_err(|source| ScenarioError::Io {
        path: common.config.clone(),
        source,
    })?;
    let config = parse(&text)?;
    if let Some(want) = expected {
        if config.command.name() != want {
            return Err(ScenarioError::Validation {
                field: "command.kind".into(),
                message: format!(
                    "scenario is a `{}` run, not `{want}`",
                    config.command.name()
                ),
            });
        }
    }
    let opts = RunOptions {
        out: common.out,
        seed: common.seed,
        degrees: common.degrees,
        svg: common.svg,
    };
    let report = run_config(&config, &opts)?;
    print!("{}", report.outcome.summary.render(opts.degrees));
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
