use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lfqh::experiment::{self, Excitation, ExperimentConfig, MeshSource, Overrides};
use lfqh::precond::PrecondMode;
use lfqh::Error;

#[derive(Parser)]
#[command(name = "lfqh", version, about = "Filtered quasi-Helmholtz projectors and wavelet preconditioning for the EFIE")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated mesh as OFF and print its statistics.
    GenMesh {
        #[command(subcommand)]
        shape: Shape,
        #[arg(short, long, default_value = "mesh.off", global = true)]
        out: PathBuf,
    },
    /// Spectra of the cured operator, its band blocks and the preconditioned operator.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Use the identity in place of the EFIE operator.
        #[arg(long)]
        identity: bool,
    },
    /// Condition numbers and iteration counts across icosphere levels.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subdivision levels, e.g. 1,2,3.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<u32>>,
    },
    /// Solve a plane-wave scattering problem.
    Solve {
        #[command(flatten)]
        common: Common,
        /// JSON with direction, polarization and amplitude.
        #[arg(long)]
        excitation: Option<PathBuf>,
    },
    /// Compare the fast sphere filter with the dense loop projector.
    FilterBench {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        window_low: Option<f64>,
        #[arg(long)]
        window_high: Option<f64>,
        #[arg(long)]
        vectors: Option<usize>,
    },
}

#[derive(Subcommand)]
enum Shape {
    Icosphere {
        #[arg(long, default_value_t = 1)]
        subdiv: u32,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    Torus {
        #[arg(long, default_value_t = 8)]
        maj: usize,
        #[arg(long, default_value_t = 6)]
        min: usize,
        #[arg(long, default_value_t = 2.0)]
        major_radius: f64,
        #[arg(long, default_value_t = 0.5)]
        minor_radius: f64,
    },
    HoledPlate {
        #[arg(long, default_value_t = 1)]
        holes: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Precond {
    None,
    Lf,
    LfWavelet,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mesh file (.off or .obj).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Icosphere subdivision level.
    #[arg(long)]
    subdiv: Option<u32>,
    #[arg(long)]
    k: Option<f64>,
    /// Number of wavelet levels L.
    #[arg(long)]
    wavelet_levels: Option<usize>,
    #[arg(long, value_enum)]
    precond: Option<Precond>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn config(&self, extra: Overrides) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        cfg.apply(&Overrides {
            mesh: self.mesh.clone(),
            subdivisions: self.subdiv,
            k: self.k,
            wavelet_levels: self.wavelet_levels,
            precond: self.precond.map(|p| match p {
                Precond::None => PrecondMode::None,
                Precond::Lf => PrecondMode::Lf,
                Precond::LfWavelet => PrecondMode::LfWavelet,
            }),
            output: self.out.clone(),
            seed: self.seed,
            tol: self.tol,
            ..extra
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

fn fail(code: u8, e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(code)
}

/// Configuration problems exit with 2 in every subcommand.
fn config_or(code: u8, e: &Error) -> ExitCode {
    match e {
        Error::Config(_) | Error::Json(_) | Error::Limit(_) | Error::Parse { .. } => fail(2, e),
        _ => fail(code, e),
    }
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serialisable"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.command {
        Command::GenMesh { shape, out } => {
            let source = match shape {
                Shape::Icosphere { subdiv, radius } => MeshSource::Icosphere { subdivisions: subdiv, radius },
                Shape::Torus { maj, min, major_radius, minor_radius } => MeshSource::Torus {
                    major_segments: maj,
                    minor_segments: min,
                    major_radius,
                    minor_radius,
                },
                Shape::HoledPlate { holes } => MeshSource::HoledPlate { holes },
            };
            match experiment::gen_mesh(&source, &out) {
                Ok(stats) => print_json(&stats),
                Err(e) => return fail(2, &e),
            }
        }
        Command::Spectrum { common, identity } => {
            let run = common
                .config(Overrides { identity, ..Default::default() })
                .and_then(|cfg| experiment::spectrum(&cfg));
            match run {
                Ok((_, summary)) => print_json(&summary),
                Err(e) => return config_or(3, &e),
            }
        }
        Command::Sweep { common, levels } => {
            let run = common
                .config(Overrides { sweep_levels: levels, ..Default::default() })
                .and_then(|cfg| experiment::sweep(&cfg));
            match run {
                Ok(result) => print!("{}", result.summary()),
                Err(e) => return config_or(1, &e),
            }
        }
        Command::Solve { common, excitation } => {
            let run = common.config(Overrides::default()).and_then(|mut cfg| {
                if let Some(p) = excitation {
                    let text = std::fs::read_to_string(p)?;
                    cfg.excitation = serde_json::from_str::<Excitation>(&text)?;
                }
                experiment::solve(&cfg)
            });
            match run {
                Ok(outcome) => print_json(&outcome),
                Err(e @ Error::NoConvergence(_)) => return fail(4, &e),
                Err(e) => return config_or(3, &e),
            }
        }
        Command::FilterBench { common, window_low, window_high, vectors } => {
            let run = common
                .config(Overrides { window_low, window_high, vectors, ..Default::default() })
                .and_then(|cfg| experiment::filter_bench(&cfg));
            match run {
                Ok(bench) => print_json(&bench),
                Err(e @ (Error::Genus(_) | Error::Fold(_))) => return fail(5, &e),
                Err(e) => return config_or(1, &e),
            }
        }
    }
    ExitCode::SUCCESS
}
