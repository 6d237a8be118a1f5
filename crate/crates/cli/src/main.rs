mod commands;
mod config;
mod error;
mod output;
mod reproduce;

use clap::{Args, Parser, Subcommand};
use commands::{Command, Context};
use config::{ExperimentConfig, Format, GammaSpec, OutageMethodChoice};
use error::CliError;
use outagelab::mutual_info::Engine;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "outagelab", version, about = "Outage analysis of precoded constellations over block-fading channels")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Instantaneous mutual information at given fading gains
    Mi,
    /// Outage anchors and hypersphere bounds
    Anchors,
    /// Outage probability over an SNR grid
    Outage,
    /// Outage boundary in polar form (B=2)
    Boundary,
    /// Required SNR over a grid of precoder angles
    Sweep,
    /// Precoder angle minimizing the required SNR
    Optimize,
    /// Optimized required SNR of several constellations at one rate
    Expand,
    /// Regenerate the data behind a canned figure
    Reproduce {
        #[arg(value_enum)]
        target: reproduce::Figure,
        /// Coarse grids and few samples, for smoke runs
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON experiment config; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Registry name, or `gaussian` / `gaussian_complex`
    #[arg(long, global = true)]
    constellation: Option<String>,
    #[arg(long, global = true)]
    constellation_file: Option<PathBuf>,
    /// Number of fading blocks
    #[arg(long = "B", global = true)]
    dim: Option<usize>,
    /// Rate in bits per channel use
    #[arg(long = "R", global = true, allow_hyphen_values = true)]
    rate: Option<f64>,
    /// Bits per multidimensional symbol
    #[arg(long, global = true)]
    m: Option<f64>,
    /// Code rate; the rate becomes Rc·m/B
    #[arg(long = "Rc", global = true)]
    rc: Option<f64>,
    #[arg(long, alias = "theta", global = true, allow_hyphen_values = true)]
    theta_deg: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta1_deg: Option<f64>,
    /// Circulant eigenvalue phases, comma separated
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    phases_deg: Option<Vec<f64>>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda0_sign: Option<i8>,
    /// Average SNR in dB: `x` or `a:b:step`
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma_db: Option<String>,
    /// Fading gains for `mi`, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Angle grid in degrees, `a:b:step`
    #[arg(long, global = true)]
    theta_range_deg: Option<String>,
    /// Constellations compared by `expand`, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    constellations: Option<Vec<String>>,
    #[arg(long, global = true, value_enum)]
    method: Option<OutageMethodChoice>,
    /// Monte Carlo fading samples per outage point
    #[arg(long, global = true)]
    outage_samples: Option<usize>,
    /// Fading directions for ray Monte Carlo
    #[arg(long, global = true)]
    rays: Option<usize>,
    /// Angular intervals of a traced boundary
    #[arg(long, global = true)]
    intervals: Option<usize>,
    #[arg(long, global = true, value_enum)]
    engine: Option<EngineArg>,
    #[arg(long, global = true)]
    gh_order: Option<usize>,
    /// Noise samples of the Monte Carlo MI engine
    #[arg(long, global = true)]
    mc_samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (directory for `reproduce`); stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum EngineArg {
    Auto,
    Quadrature,
    Mc,
}

impl Flags {
    fn apply(self, mut c: ExperimentConfig) -> ExperimentConfig {
        macro_rules! set {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag { c.$field = Some(v); })*
            };
        }
        set!(
            constellation => constellation,
            constellation_file => constellation_file,
            dim => dim,
            rate => rate,
            m => m,
            rc => rc,
            theta_deg => theta_deg,
            theta1_deg => theta1_deg,
            phases_deg => phases_deg,
            lambda0_sign => lambda0_sign,
            alpha => alpha,
            theta_range_deg => theta_range_deg,
            constellations => constellations,
            out => out,
            threads => threads,
        );
        if let Some(g) = self.gamma_db {
            c.gamma_db = Some(GammaSpec::Range(g));
        }
        if let Some(v) = self.method {
            c.method = v;
        }
        if let Some(v) = self.outage_samples {
            c.outage_samples = v;
        }
        if let Some(v) = self.rays {
            c.rays = v;
        }
        if let Some(v) = self.intervals {
            c.boundary_intervals = v;
        }
        if let Some(v) = self.engine {
            c.engine.engine = match v {
                EngineArg::Auto => Engine::Auto,
                EngineArg::Quadrature => Engine::Quadrature,
                EngineArg::Mc => Engine::Mc,
            };
        }
        if let Some(v) = self.gh_order {
            c.engine.gh_order = v;
        }
        if let Some(v) = self.mc_samples {
            c.engine.mc_samples = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.format {
            c.format = v;
        }
        c
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.flags.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let cfg = cli.flags.apply(base).finalize()?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let cmd = match cli.command {
        Cmd::Mi => Command::Mi,
        Cmd::Anchors => Command::Anchors,
        Cmd::Outage => Command::Outage,
        Cmd::Boundary => Command::Boundary,
        Cmd::Sweep => Command::Sweep,
        Cmd::Optimize => Command::Optimize,
        Cmd::Expand => Command::Expand,
        Cmd::Reproduce { target, quick } => return reproduce::run(target, &cfg, quick),
    };
    let ctx = Context::new(cfg)?;
    let table = ctx.run(cmd)?;
    for (k, v) in &table.notes {
        if cmd == Command::Optimize {
            eprintln!("{k}: {v}");
        }
    }
    let bytes = output::render(&table, cmd.name(), &ctx.cfg, ctx.cfg.format)?;
    output::write(&bytes, ctx.cfg.out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
