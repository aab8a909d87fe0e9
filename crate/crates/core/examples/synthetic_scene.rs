//! Generates a loop-office world, saves it as a PANAV-SCENE file and reads it back.
//!
//! `cargo run --example synthetic_scene -- [seed] [out.scene]`

use panav::scene::{generate_synthetic_world, parse_scene_file, write_scene_file, LayoutParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let out = args.next().unwrap_or_else(|| "world.scene".into());

    let scene = generate_synthetic_world(seed, &LayoutParams::default())?;
    println!("{}: {} rooms, {} points", scene.area_name(), scene.rooms().len(), scene.point_count());
    for room in scene.rooms() {
        let (cx, cy) = room.xy_centroid();
        println!("  {:<18} {:<10} centroid ({cx:6.2}, {cy:6.2})", room.name(), room.category().as_str());
    }

    write_scene_file(&scene, out.as_ref())?;
    let back = parse_scene_file(out.as_ref())?;
    assert_eq!(back.point_count(), scene.point_count());
    println!("saved to {out}");
    Ok(())
}
