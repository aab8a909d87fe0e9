//! Distance field from office and conference cells, both Gaussian modes,
//! and a heatmap of the default one.
//!
//! `cargo run --example privacy_field -- [heatmap.png]`

use std::collections::BTreeSet;

use panav::field::{field_heatmap_png, fmm_distance, gaussian_modulate, FieldMode, DEFAULT_SIGMA_D};
use panav::grid::{build_room_mask, build_top_view, build_traversability, MapParams};
use panav::scene::{generate_synthetic_world, LayoutParams, RoomCategory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "privacy_field.png".into());
    let scene = generate_synthetic_world(7, &LayoutParams::default())?;
    let params = MapParams {
        resolution: 0.1,
        ..MapParams::default()
    };
    let policy = params.ceiling_policy.resolve(&scene);
    let top = build_top_view(&scene, params.resolution, policy)?;
    let tra = build_traversability(&scene, top.geometry(), policy, params.floor_band, params.obstacle_band)?;

    let masked: BTreeSet<_> = [RoomCategory::Office, RoomCategory::Conference].into();
    let mask = build_room_mask(&scene, tra.geometry(), &masked)?;
    let sources = mask.masked_cells();
    let distance = fmm_distance(&tra, &sources)?;
    println!("{} source cells, farthest reachable cell {:.1} cells away", sources.len(), distance.max_finite());

    for mode in [FieldMode::Gaussian, FieldMode::RiskInverted] {
        let field = gaussian_modulate(&distance, DEFAULT_SIGMA_D, mode)?;
        let mean = field.values().iter().sum::<f64>() / field.values().len() as f64;
        println!("{mode}: mu {:.2}, sigma {:.2}, mean value {mean:.4}", field.mu, field.sigma);
    }

    let field = gaussian_modulate(&distance, DEFAULT_SIGMA_D, FieldMode::RiskInverted)?;
    std::fs::write(&out, field_heatmap_png(distance.geometry(), field.values()))?;
    println!("wrote {out}");
    Ok(())
}
