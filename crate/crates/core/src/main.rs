use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use szego::config::{ExperimentConfig, Preset, GAUSSIAN_LONG_HORIZON};
use szego::experiments::{run_criterion, run_preset, run_spectrum, run_stable_manifold, run_verify, run_wode, RunSummary};

#[derive(Parser)]
#[command(name = "szego", version, about = "Damped cubic Szegő equation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Grid size N.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Any configuration key, e.g. `--set ic=blaschke --set zeros=0.3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more presets and write their artifacts.
    Simulate {
        /// Comma-separated preset names.
        #[arg(long)]
        preset: Option<String>,
        /// Presets run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Restore the t = 1000 horizon of the Gaussian preset.
        #[arg(long)]
        long_horizon: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Print the explosion verdict of an initial condition as JSON.
    Criterion {
        #[arg(long)]
        preset: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the clustered spectrum of K_u^2 as CSV.
    Spectrum {
        #[arg(long)]
        preset: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the (b, c, p) system on W.
    Wode {
        #[arg(long)]
        preset: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Build a trajectory converging to the circle orbit.
    StableManifold {
        #[arg(long)]
        beta_inf: Option<f64>,
        #[arg(long)]
        momentum: Option<f64>,
        #[arg(long)]
        t_start: Option<f64>,
        #[arg(long)]
        t_end_back: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the closed-form identities at (alpha, M).
    Verify {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        momentum: f64,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
    },
}

fn overrides(common: &Common) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for kv in &common.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got {kv:?}"))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            out.push((k.to_string(), v));
        }
    };
    push("alpha", common.alpha.map(|x| x.to_string()));
    push("dt", common.dt.map(|x| x.to_string()));
    push("n", common.n.map(|x| x.to_string()));
    push("t_end", common.t_end.map(|x| x.to_string()));
    push("out", common.out.as_ref().map(|p| p.display().to_string()));
    Ok(out)
}

fn load(preset: Option<Preset>, common: &Common, extra: Vec<(String, String)>, fallback: Preset) -> Result<ExperimentConfig, String> {
    let text = match &common.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?),
        None => None,
    };
    let mut over = overrides(common)?;
    over.extend(extra);
    ExperimentConfig::load(preset, text.as_deref(), &over, fallback).map_err(|e| e.to_string())
}

fn parse_preset(s: Option<&str>) -> Result<Option<Preset>, String> {
    s.map(|p| p.trim().parse()).transpose()
}

fn report(summary: &RunSummary) {
    print!("{}", summary.render());
    println!("{} {}", if summary.pass { "PASS" } else { "FAIL" }, summary.preset);
}

fn simulate(preset: Option<String>, jobs: usize, long_horizon: bool, common: Common) -> Result<bool, String> {
    let names: Vec<Option<Preset>> = match &preset {
        Some(list) => list.split(',').map(|p| parse_preset(Some(p))).collect::<Result<_, _>>()?,
        None => vec![None],
    };
    let many = names.len() > 1;
    let mut configs = Vec::new();
    for p in names {
        let mut cfg = load(p, &common, Vec::new(), Preset::SinglePole)?;
        if many {
            if let Some(out) = &common.out {
                cfg.output_dir = out.join(cfg.preset.name());
            }
        }
        if long_horizon && cfg.preset == Preset::Gaussian {
            cfg.solver.t_end = GAUSSIAN_LONG_HORIZON;
        }
        configs.push(cfg);
    }
    let mut all_pass = true;
    for chunk in configs.chunks(jobs.max(1)) {
        let results: Vec<_> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk.iter().map(|cfg| scope.spawn(move || run_preset(cfg))).collect();
            handles.into_iter().map(|h| h.join().expect("preset thread panicked")).collect()
        });
        for (cfg, res) in chunk.iter().zip(results) {
            match res {
                Ok(summary) => {
                    report(&summary);
                    all_pass &= summary.pass;
                }
                Err(e) => {
                    eprintln!("{}: {e}", cfg.preset);
                    all_pass = false;
                }
            }
        }
    }
    Ok(all_pass)
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Simulate {
            preset,
            jobs,
            long_horizon,
            common,
        } => simulate(preset, jobs, long_horizon, common),
        Command::Criterion { preset, common } => {
            let cfg = load(parse_preset(preset.as_deref())?, &common, Vec::new(), Preset::Custom)?;
            let verdict = run_criterion(&cfg).map_err(|e| e.to_string())?;
            println!("{}", json(&verdict));
            Ok(true)
        }
        Command::Spectrum { preset, common } => {
            let cfg = load(parse_preset(preset.as_deref())?, &common, Vec::new(), Preset::Custom)?;
            let (spec, summary) = run_spectrum(&cfg).map_err(|e| e.to_string())?;
            if common.out.is_some() {
                szego::io::write_artifact(&cfg.output_dir, "spectrum.csv", &spec.to_csv_string()).map_err(|e| e.to_string())?;
                szego::io::write_json(&cfg.output_dir, "verdict.json", &summary).map_err(|e| e.to_string())?;
            } else {
                print!("{}", spec.to_csv_string());
            }
            eprintln!("{}", json(&summary));
            Ok(true)
        }
        Command::Wode { preset, common } => {
            let cfg = load(parse_preset(preset.as_deref())?, &common, Vec::new(), Preset::Custom)?;
            let summary = run_wode(&cfg).map_err(|e| e.to_string())?;
            println!("{}", json(&summary));
            Ok(true)
        }
        Command::StableManifold {
            beta_inf,
            momentum,
            t_start,
            t_end_back,
            common,
        } => {
            let mut extra = Vec::new();
            for (k, v) in [("beta_inf", beta_inf), ("momentum", momentum), ("t_start", t_start), ("t_end_back", t_end_back)] {
                if let Some(v) = v {
                    extra.push((k.to_string(), v.to_string()));
                }
            }
            let cfg = load(Some(Preset::StableManifold), &common, extra, Preset::StableManifold)?;
            let summary = run_stable_manifold(&cfg).map_err(|e| e.to_string())?;
            report(&summary);
            Ok(summary.pass)
        }
        Command::Verify { alpha, momentum, s } => {
            let r = run_verify(alpha, momentum, s).map_err(|e| e.to_string())?;
            println!("{}", json(&r));
            Ok(r.pass)
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialise")
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
