use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use flagdyn_cli::config::{defaults_help, RunConfig};
use flagdyn_cli::pipeline::{clear_error, run, stage_fn, write_error, Stage};

#[derive(Parser, Debug)]
#[command(name = "flagdyn", version, about = "Dual affine surface-group representations, their Jordan curves and flag dynamics")]
#[command(after_help = defaults_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file: `key = value` lines or a JSON object.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Word length for the sweeps (at most 10).
    #[arg(long, global = true)]
    max_len: Option<usize>,
    /// Seed for the solved cocycle.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Norm of the solved cocycle.
    #[arg(long, global = true)]
    amplitude: Option<f64>,
    /// Cocycle mode: zero, coboundary, solved or file.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// SVG window in chart coordinates.
    #[arg(long, global = true, value_name = "X0,Y0,X1,Y1", allow_hyphen_values = true)]
    zoom: Option<String>,
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Extra `key=value` settings, applied last.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Write the Fuchsian base representation.
    Gen,
    /// Attach a cocycle (and optional twist) to the base representation.
    Deform,
    /// Check the relation and the saddle condition on every short word.
    Certify,
    /// Sample the invariant curve, check equivariance and regularity.
    Curve,
    /// Draw the curve as SVG.
    Render,
    /// Classify random flags and probe orbit accumulation.
    Foliate,
    /// Every stage in order.
    All,
}

impl Command {
    fn stage(self) -> Option<Stage> {
        match self {
            Command::Gen => Some(Stage::Gen),
            Command::Deform => Some(Stage::Deform),
            Command::Certify => Some(Stage::Certify),
            Command::Curve => Some(Stage::Curve),
            Command::Render => Some(Stage::Render),
            Command::Foliate => Some(Stage::Foliate),
            Command::All => None,
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &cli.config {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
        cfg.apply_text(&text).with_context(|| format!("in config {}", p.display()))?;
    }
    let flags = [
        ("out", cli.out.as_ref().map(|p| p.display().to_string())),
        ("max_len", cli.max_len.map(|x| x.to_string())),
        ("seed", cli.seed.map(|x| x.to_string())),
        ("amplitude", cli.amplitude.map(|x| x.to_string())),
        ("mode", cli.mode.clone()),
        ("window", cli.zoom.clone()),
        ("threads", cli.threads.map(|x| x.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v).with_context(|| format!("--{}", k.replace('_', "-")))?;
        }
    }
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').with_context(|| format!("--set expects KEY=VALUE, got {kv:?}"))?;
        cfg.set(k.trim(), v)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stage = cli.command.stage();
    let stage_name = stage.map(Stage::name).unwrap_or("all");
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            let _ = write_error(&RunConfig::default(), stage_name, "config", &format!("{e:#}"), &[]);
            return ExitCode::from(1);
        }
    };
    if let Err(e) = clear_error(&cfg) {
        eprintln!("warning: {e:#}");
    }
    match run(&cfg, stage_fn(stage)) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(f)) => {
            eprintln!("certificate failed in {}: {}", f.stage.name(), f.reason);
            for w in f.words.iter().take(10) {
                eprintln!("  violating word: {w}");
            }
            if f.words.len() > 10 {
                eprintln!("  ... and {} more in error.json", f.words.len() - 10);
            }
            if let Err(e) = write_error(&cfg, f.stage.name(), "certificate", &f.reason, &f.words) {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Err(e2) = write_error(&cfg, stage_name, "error", &format!("{e:#}"), &[]) {
                eprintln!("error: {e2:#}");
            }
            ExitCode::from(1)
        }
    }
}
