use clap::{builder::PossibleValuesParser, Args, Parser, Subcommand};
use photon_wigner::flat_sr::Boost;
use photon_wigner::format_sig17;
use photon_wigner_cli::emit::{to_destination, write_bell, write_flat, write_profile, write_sweep};
use photon_wigner_cli::scenario::{
    bell_evolve, flat_wigner, load_config, preset, schwarzschild_psi, sweep, FlatCase, FlatConfig, OutputFormat,
    ScenarioConfig, PRESETS,
};
use photon_wigner_cli::validate::run_all;
use photon_wigner_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "photon-wigner", version, about = "Wigner rotation of photon polarization in Schwarzschild spacetime")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON scenario file applied on top of the preset
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named starting scenario
    #[arg(long, global = true, value_parser = PossibleValuesParser::new(PRESETS))]
    preset: Option<String>,
    /// Schwarzschild radius
    #[arg(long, allow_negative_numbers = true, global = true)]
    rs: Option<f64>,
    /// Photon impact parameter
    #[arg(long, allow_negative_numbers = true, global = true)]
    b: Option<f64>,
    /// Observer angular momentum per unit mass
    #[arg(long, allow_negative_numbers = true, global = true)]
    l: Option<f64>,
    /// Starting radius of the photon
    #[arg(long, allow_negative_numbers = true, global = true)]
    r_start: Option<f64>,
    /// Radius where integration stops
    #[arg(long, allow_negative_numbers = true, global = true)]
    r_end: Option<f64>,
    /// Affine-parameter step
    #[arg(long, allow_negative_numbers = true, global = true)]
    step: Option<f64>,
    /// Output format (validate prints a text report for csv)
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweep
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Wigner angle of a single boost in flat spacetime
    FlatWigner {
        #[arg(long, value_enum)]
        case: Option<FlatCase>,
        /// Boost direction as x,y,z
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        boost_dir: Option<Vec<f64>>,
        #[arg(long, allow_negative_numbers = true, conflicts_with = "speed")]
        rapidity: Option<f64>,
        /// Boost speed with tanh(rapidity) = -speed
        #[arg(long, allow_negative_numbers = true)]
        speed: Option<f64>,
        /// Photon direction as x,y,z
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        k: Option<Vec<f64>>,
    },
    /// Profile of the Wigner angle rate along one scenario and its total
    SchwarzschildPsi,
    /// Grid over photon impact parameter and observer angular momentum
    Sweep {
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        b_values: Option<Vec<f64>>,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        l_values: Option<Vec<f64>>,
    },
    /// Relative phase of a helicity Bell pair on an inbound and an outbound photon
    BellEvolve {
        #[arg(long, allow_negative_numbers = true)]
        lambda1: Option<i8>,
        #[arg(long, allow_negative_numbers = true)]
        lambda2: Option<i8>,
        #[arg(long, allow_negative_numbers = true)]
        sign: Option<i8>,
    },
    /// Run the invariant checks; exits nonzero if any fails
    Validate,
}

fn triple(name: &str, v: &[f64]) -> Result<[f64; 3], CliError> {
    <[f64; 3]>::try_from(v).map_err(|_| CliError::config(format!("--{name} needs three comma-separated values")))
}

fn resolve(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let c = &cli.common;
    let default = if matches!(cli.command, Command::FlatWigner { .. }) { "flat-in-plane" } else { "radial-stationary" };
    let mut cfg = preset(c.preset.as_deref().unwrap_or(default))?;
    if let Some(path) = &c.config {
        cfg = load_config(cfg, path)?;
    }
    if let Some(v) = c.rs {
        cfg.metric.r_s = v;
    }
    if let Some(v) = c.b {
        cfg.photon.b_ph = v;
    }
    if let Some(v) = c.l {
        cfg.observer.l_obs = v;
    }
    if let Some(v) = c.r_start {
        cfg.r_start = v;
    }
    if let Some(v) = c.r_end {
        cfg.r_end = v;
    }
    if let Some(v) = c.step {
        cfg.step = v;
    }
    if let Some(v) = c.format {
        cfg.output.format = v;
    }
    if let Some(v) = &c.out {
        cfg.output.path = Some(v.display().to_string());
    }
    match &cli.command {
        Command::FlatWigner { case, boost_dir, rapidity, speed, k } => {
            if let Some(case) = case {
                cfg.flat = FlatConfig::case(*case);
            }
            if boost_dir.is_some() || rapidity.is_some() || speed.is_some() || k.is_some() {
                cfg.flat.case = FlatCase::Custom;
            }
            if let Some(d) = boost_dir {
                cfg.flat.boost_direction = triple("boost-dir", d)?;
            }
            if let Some(x) = rapidity {
                cfg.flat.rapidity = *x;
            }
            if let Some(s) = speed {
                cfg.flat.rapidity = Boost::with_speed(cfg.flat.boost_direction, *s)?.rapidity;
            }
            if let Some(k) = k {
                cfg.flat.k_hat = triple("k", k)?;
            }
        }
        Command::Sweep { b_values, l_values } => {
            if let Some(b) = b_values {
                cfg.sweep.b_values = b.clone();
            }
            if let Some(l) = l_values {
                cfg.sweep.l_values = l.clone();
            }
        }
        Command::BellEvolve { lambda1, lambda2, sign } => {
            cfg.pair.lambda1 = lambda1.unwrap_or(cfg.pair.lambda1);
            cfg.pair.lambda2 = lambda2.unwrap_or(cfg.pair.lambda2);
            cfg.pair.sign = sign.unwrap_or(cfg.pair.sign);
        }
        Command::SchwarzschildPsi | Command::Validate => {}
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let cfg = resolve(cli)?;
    let format = cfg.output.format;
    let out = cfg.output.path.as_ref().map(PathBuf::from);
    match cli.command {
        Command::FlatWigner { .. } => {
            let report = flat_wigner(&cfg.flat)?;
            to_destination(out.as_deref(), |w| write_flat(&report, format, w))?;
        }
        Command::SchwarzschildPsi => {
            let result = schwarzschild_psi(&cfg)?;
            to_destination(out.as_deref(), |w| write_profile(&result, format, w))?;
            eprintln!("psi_total = {} over {} samples", format_sig17(result.psi_total), result.samples.len());
        }
        Command::Sweep { .. } => {
            let cells = sweep(&cfg, cli.common.threads)?;
            to_destination(out.as_deref(), |w| write_sweep(&cells, format, w))?;
        }
        Command::BellEvolve { .. } => {
            let report = bell_evolve(&cfg)?;
            to_destination(out.as_deref(), |w| write_bell(&report, format, w))?;
        }
        Command::Validate => {
            let outcomes = run_all();
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            match format {
                OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&outcomes).unwrap_or_default()),
                OutputFormat::Csv => {
                    for o in &outcomes {
                        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
                    }
                    println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
                }
            }
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(2)
        }
    }
}
