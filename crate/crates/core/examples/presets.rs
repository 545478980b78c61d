//! Runs a preset through the experiment harness and prints its checks.
//!
//! ```text
//! cargo run --release --example presets -- kappa_fit [out_dir]
//! ```

use szego::config::{ExperimentConfig, Preset};
use szego::experiments::run_preset;

fn main() -> szego::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "stable_manifold".into());
    let preset: Preset = name.parse().map_err(|message| szego::Error::Config { line: 0, message })?;
    let mut cfg = ExperimentConfig::for_preset(preset);
    if let Some(dir) = args.next() {
        cfg.output_dir = dir.into();
    }
    let summary = run_preset(&cfg)?;
    print!("{}", summary.render());
    println!("{} -> {}", if summary.pass { "PASS" } else { "FAIL" }, cfg.output_dir.display());
    Ok(())
}
