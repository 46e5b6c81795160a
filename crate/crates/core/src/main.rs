use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cpt_eq::cli::{
    self, CheckMode, ExampleConfig, ExitStatus, GameFile, OutputFormat, RegionsRequest, RunConfig,
};
use cpt_eq::fmt::g12;

#[derive(Parser)]
#[command(name = "cpt-eq", version, about = "Equilibrium analysis under cumulative prospect theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GameSource {
    /// Game file (JSON).
    #[arg(long, conflicts_with = "preset")]
    game: Option<PathBuf>,
    /// Built-in game instead of a file.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    EutCe,
    CptCe,
    CptNash,
}

#[derive(Subcommand)]
enum Command {
    /// CPT value of a prospect, or a regret with --against.
    Value {
        #[command(flatten)]
        source: GameSource,
        /// Player whose preferences are used (1-based).
        #[arg(long, default_value_t = 1)]
        player: usize,
        /// Probability:outcome pairs, e.g. 0.5:10,0.5:20.
        #[arg(long, required = true, num_args = 1..)]
        prospect: Vec<String>,
        /// Comma-separated outcomes y; prints V(p, x) - V(p, y).
        #[arg(long, allow_hyphen_values = true)]
        against: Option<String>,
    },
    /// Correlated or Nash equilibrium membership of a joint distribution.
    Check {
        #[command(flatten)]
        source: GameSource,
        /// Joint distribution file: JSON array or CSV numbers, last player fastest.
        #[arg(long)]
        mu: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::CptCe)]
        mode: Mode,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Rescale the entries of mu to sum to one.
        #[arg(long)]
        normalize: bool,
    },
    /// Characterize a 2x2 game: class, constraints, vertices, Nash set.
    Classify {
        #[command(flatten)]
        source: GameSource,
    },
    /// Rasterize deviation regions of one player and count components.
    Regions {
        #[command(flatten)]
        source: GameSource,
        /// Player (1-based).
        #[arg(long)]
        player: usize,
        /// Recommended strategy, by name or 1-based index.
        #[arg(long)]
        signal: String,
        /// Single deviation; all deviations and their intersection if omitted.
        #[arg(long)]
        deviation: Option<String>,
        /// Grid resolution.
        #[arg(short = 'n', long = "resolution", default_value_t = 200)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Comma-separated subset of csv,json,svg.
        #[arg(long, default_value = "csv,json,svg")]
        formats: String,
        /// Allow grids above the point limit.
        #[arg(long)]
        force: bool,
    },
    /// Reproduce the disconnected-region example as a pass/fail checklist.
    ExampleDisconnected {
        #[arg(short = 'n', long = "resolution", default_value_t = 200)]
        resolution: usize,
        /// Prelec exponent of player 1.
        #[arg(long, default_value_t = 0.5)]
        alpha1: f64,
        /// Prelec exponent of player 2.
        #[arg(long, default_value_t = 1.0)]
        alpha2: f64,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

fn load_game(source: &GameSource) -> anyhow::Result<GameFile> {
    match (&source.game, &source.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            GameFile::parse(&text).with_context(|| format!("in {}", path.display()))
        }
        (None, Some(name)) => cli::preset(name).with_context(|| {
            format!("unknown preset '{name}' (available: {})", cli::PRESET_NAMES.join(", "))
        }),
        (None, None) => bail!("one of --game or --preset is required"),
    }
}

fn player_index(gf: &GameFile, player: usize) -> anyhow::Result<usize> {
    if player == 0 || player > gf.players {
        bail!("--player must lie in 1..={}", gf.players);
    }
    Ok(player - 1)
}

fn run(cli: Cli) -> anyhow::Result<ExitStatus> {
    match cli.command {
        Command::Value {
            source,
            player,
            prospect,
            against,
        } => {
            let gf = if source.game.is_some() || source.preset.is_some() {
                Some(load_game(&source)?)
            } else {
                None
            };
            if player == 0 {
                bail!("--player is 1-based");
            }
            let prospect = cli::parse_prospect(&prospect)?;
            let y = against
                .map(|s| cli::parse_list(&s, "against"))
                .transpose()?;
            let v = cli::value(gf.as_ref(), player - 1, &prospect, y.as_deref())?;
            println!("{}", g12(v));
            Ok(ExitStatus::Success)
        }
        Command::Check {
            source,
            mu,
            mode,
            tolerance,
            normalize,
        } => {
            let gf = load_game(&source)?;
            let text = std::fs::read_to_string(&mu)
                .with_context(|| format!("reading {}", mu.display()))?;
            let values = cli::parse_mu(&text).with_context(|| format!("in {}", mu.display()))?;
            let mode = match mode {
                Mode::EutCe => CheckMode::EutCe,
                Mode::CptCe => CheckMode::CptCe,
                Mode::CptNash => CheckMode::CptNash,
            };
            let out = cli::check(&gf, &values, mode, tolerance, normalize)?;
            print!("{}", out.json);
            Ok(if out.member {
                ExitStatus::Success
            } else {
                ExitStatus::Negative
            })
        }
        Command::Classify { source } => {
            let gf = load_game(&source)?;
            print!("{}", cli::classify(&gf)?);
            Ok(ExitStatus::Success)
        }
        Command::Regions {
            source,
            player,
            signal,
            deviation,
            resolution,
            tolerance,
            out,
            formats,
            force,
        } => {
            let gf = load_game(&source)?;
            let player = player_index(&gf, player)?;
            let signal = gf.strategy_index(player, &signal)?;
            let deviation = deviation
                .map(|d| gf.strategy_index(player, &d))
                .transpose()?;
            if deviation == Some(signal) {
                bail!("--deviation must differ from --signal");
            }
            let formats = formats
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(str::parse::<OutputFormat>)
                .collect::<Result<Vec<_>, _>>()?;
            let config = RunConfig {
                tolerance,
                resolution,
                output_dir: out,
                formats,
            };
            let req = RegionsRequest {
                player,
                signal,
                deviation,
                force,
            };
            let outcome = cli::regions(&gf, &req, &config)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", outcome.summary_json);
            Ok(ExitStatus::Success)
        }
        Command::ExampleDisconnected {
            resolution,
            alpha1,
            alpha2,
            tolerance,
        } => {
            RunConfig {
                tolerance,
                resolution,
                ..RunConfig::default()
            }
            .validate()?;
            let report = cli::run_disconnected_example(&ExampleConfig {
                resolution,
                alpha1,
                alpha2,
                tolerance,
            })?;
            print!("{}", report.render());
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            match report.first_failure() {
                None => Ok(ExitStatus::Success),
                Some(c) => {
                    eprintln!("first failing check: {}", c.name);
                    Ok(ExitStatus::Negative)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitStatus::Error as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli::thread_limit() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: {e}");
                return ExitCode::from(ExitStatus::Error as u8);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(ExitStatus::Error as u8);
        }
    }
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ExitStatus::Error as u8)
        }
    }
}
