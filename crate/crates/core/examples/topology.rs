//! Builds the room graph and prints its hallway-incident edges.

use panav::grid::{build_top_view, build_traversability, MapParams};
use panav::scene::{generate_synthetic_world, LayoutParams};
use panav::topo::{build_topology, write_graph, DEFAULT_ADJACENCY_THRESHOLD};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scene = generate_synthetic_world(11, &LayoutParams::default())?;
    let params = MapParams::default();
    let policy = params.ceiling_policy.resolve(&scene);
    let top = build_top_view(&scene, params.resolution, policy)?;
    let tra = build_traversability(&scene, top.geometry(), policy, params.floor_band, params.obstacle_band)?;

    let graph = build_topology(&scene, &tra, DEFAULT_ADJACENCY_THRESHOLD)?;
    for e in graph.edges() {
        let (a, b) = (&graph.nodes()[e.a], &graph.nodes()[e.b]);
        println!("{:<18} -- {:<18} gap {:.2} m, {:.1} m apart", a.room_name, b.room_name, e.clearance, e.length);
    }
    println!();
    write_graph(&graph, std::io::stdout().lock())?;
    Ok(())
}
