use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optomech::Error;
use optomech_cli::config::preset_text;
use optomech_cli::{run, KeyValues, RunConfig, RunSummary, Scenario};

#[derive(Parser)]
#[command(
    name = "optomech",
    version,
    about = "Reduced optical dynamics and g2 estimation for optomechanical cavities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bloch-vector and purity time series
    Evolve(Common),
    /// r_x spectrum and its peaks
    Spectrum(Common),
    /// QFI, photodetection CFI and homodyne CFI over time
    Qfi(Common),
    /// QFI against CFI around the first recurrence
    Cfi(Common),
    /// Homodyne CFI against the quadrature phase
    SweepPhase(Common),
    /// QFI against temperature at several recurrences
    SweepTemperature(Common),
    /// Closed form against brute-force Fock evolution
    OracleCheck(Common),
    /// Run the scenario named by --scenario or by the config file
    Run(Common),
    /// Print the built-in parameter presets in config format
    Presets {
        #[arg(long)]
        preset: Option<String>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// unitless or real-world
    #[arg(long)]
    preset: Option<String>,
    /// Flat key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Scenario name, see `run`
    #[arg(long)]
    scenario: Option<String>,
    /// One-photon population of the initial optical state
    #[arg(long)]
    s: Option<f64>,
    /// pure or mixed
    #[arg(long)]
    state: Option<String>,
    /// Homodyne phase
    #[arg(long)]
    phi: Option<f64>,
    /// Relative finite-difference step in g2 (default: automatic)
    #[arg(long)]
    step: Option<f64>,
    /// Grid length in slow periods 2π/Δ
    #[arg(long)]
    periods: Option<f64>,
    /// Samples per fast period (or per slow period with period_basis = slow)
    #[arg(long)]
    samples_per_period: Option<usize>,
    /// Mechanical Fock truncation for oracle-check
    #[arg(long)]
    nmech: Option<usize>,
    /// Any config key, as KEY=VALUE; may be repeated
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Run twice and fail unless every output file is byte-identical
    #[arg(long)]
    seedless: bool,
}

fn key_values(c: &Common, scenario: Option<Scenario>) -> Result<KeyValues, Error> {
    let mut kv = match &c.config {
        Some(path) => KeyValues::load(path)?,
        None => KeyValues::default(),
    };
    if let Some(p) = &c.preset {
        kv.set("preset", p)?;
    }
    if let Some(s) = &c.scenario {
        kv.set("scenario", s)?;
    }
    if let Some(sc) = scenario {
        kv.set("scenario", sc)?;
    }
    let numbers = [("s", c.s), ("phi", c.phi), ("step", c.step), ("periods", c.periods)];
    for (k, v) in numbers {
        if let Some(v) = v {
            kv.set(k, format!("{v:?}"))?;
        }
    }
    if let Some(s) = &c.state {
        kv.set("state", s)?;
    }
    if let Some(n) = c.samples_per_period {
        kv.set("samples_per_period", n)?;
    }
    if let Some(n) = c.nmech {
        kv.set("nmech", n)?;
    }
    for pair in &c.set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got '{pair}'")))?;
        kv.set(k.trim(), v.trim())?;
    }
    Ok(kv)
}

fn compare_dirs(a: &RunSummary, rerun_dir: &Path) -> Result<(), Error> {
    for file in &a.files {
        let name = file.file_name().unwrap_or_default();
        let first = fs::read(file)?;
        let second = fs::read(rerun_dir.join(name))?;
        if first != second {
            return Err(Error::Io(std::io::Error::other(format!(
                "{} differs between two identical runs",
                name.to_string_lossy()
            ))));
        }
    }
    Ok(())
}

fn execute(c: &Common, scenario: Option<Scenario>) -> Result<(), Error> {
    let cfg = RunConfig::from_key_values(&key_values(c, scenario)?)?;
    let summary = run(&cfg, &c.out)?;
    if c.seedless {
        let rerun = c.out.join(".rerun");
        let again = run(&cfg, &rerun);
        let check = again.and_then(|_| compare_dirs(&summary, &rerun));
        let _ = fs::remove_dir_all(&rerun);
        check?;
        println!("determinism check passed ({} files)", summary.files.len());
    }
    for note in &summary.notes {
        println!("{note}");
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evolve(c) => execute(c, Some(Scenario::Bloch)),
        Command::Spectrum(c) => execute(c, Some(Scenario::Spectrum)),
        Command::Qfi(c) => execute(c, Some(Scenario::QfiTime)),
        Command::Cfi(c) => execute(c, Some(Scenario::CfiVsQfi)),
        Command::SweepPhase(c) => execute(c, Some(Scenario::PhaseSweep)),
        Command::SweepTemperature(c) => execute(c, Some(Scenario::TemperatureSweep)),
        Command::OracleCheck(c) => execute(c, Some(Scenario::OracleCheck)),
        Command::Run(c) => execute(c, None),
        Command::Presets { preset } => {
            let names = match preset {
                Some(p) => vec![p.as_str()],
                None => vec!["unitless", "real-world"],
            };
            names
                .into_iter()
                .try_for_each(|n| preset_text(n).map(|t| println!("{t}")))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
