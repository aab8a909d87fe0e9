//! Full episode from a TOML config (or the built-in default) with every
//! artifact exported.
//!
//! `cargo run --example run_episode -- [config.toml] [out_dir]`

use std::path::PathBuf;

use panav::pipeline::{export_artifacts, run_episode, EpisodeConfig};
use panav::scene::LayoutParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(path) => EpisodeConfig::load(path.as_ref())?,
        None => EpisodeConfig::synthetic(7, LayoutParams::default()),
    };
    let out = PathBuf::from(args.next().unwrap_or_else(|| "episode_out".into()));

    let run = run_episode(&cfg)?;
    println!("{}: \"{}\"", run.report.area, run.report.instruction);
    for c in &run.report.candidates {
        println!("  path_{} risk {:8.3}  {:6.2} m  {}", c.path_id, c.risk, c.world_length, c.nodes.join(" > "));
    }
    println!("chosen path_{}", run.report.chosen_path_id);

    for p in export_artifacts(&run, &out)? {
        println!("  {}", p.display());
    }
    Ok(())
}
