//! Projects a scene onto the top-view and traversability grids and writes
//! them as PNG, PGM and a geometry sidecar.
//!
//! `cargo run --example grid_maps -- [out_dir]`

use std::path::PathBuf;

use panav::grid::{
    build_top_view, build_traversability, write_geometry_sidecar, write_top_view_png, write_traversability_pgm,
    MapParams,
};
use panav::scene::{generate_synthetic_world, LayoutParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "maps_out".into()));
    std::fs::create_dir_all(&out)?;

    let scene = generate_synthetic_world(3, &LayoutParams::default())?;
    let params = MapParams::default();
    let policy = params.ceiling_policy.resolve(&scene);
    let top = build_top_view(&scene, params.resolution, policy)?;
    let tra = build_traversability(&scene, top.geometry(), policy, params.floor_band, params.obstacle_band)?;

    let g = top.geometry();
    println!("ceiling policy {policy:?}");
    println!("{}x{} cells at {} m", g.width, g.height, g.resolution);
    println!("{} occupied, {} traversable", top.occupied_count(), tra.traversable_count());

    write_top_view_png(&top, &out.join("top_view.png"))?;
    write_traversability_pgm(&tra, &out.join("traversability.pgm"))?;
    write_geometry_sidecar(g, &out.join("grid.txt"))?;
    println!("wrote {}", out.display());
    Ok(())
}
