//! Enumerates simple room sequences, filters them to hallway-only
//! candidates and realizes each with A*.

use panav::grid::{build_top_view, build_traversability, MapParams};
use panav::planning::{enumerate_simple_paths, filter_candidates, realize_all, write_paths, DEFAULT_K};
use panav::scene::{generate_synthetic_world, LayoutParams};
use panav::topo::{build_topology, DEFAULT_ADJACENCY_THRESHOLD};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let layout = LayoutParams {
        hallways: 5,
        ..LayoutParams::default()
    };
    let scene = generate_synthetic_world(5, &layout)?;
    let params = MapParams::default();
    let policy = params.ceiling_policy.resolve(&scene);
    let top = build_top_view(&scene, params.resolution, policy)?;
    let tra = build_traversability(&scene, top.geometry(), policy, params.floor_band, params.obstacle_band)?;
    let graph = build_topology(&scene, &tra, DEFAULT_ADJACENCY_THRESHOLD)?;

    let (start, goal) = layout.endpoint_rooms();
    let all = enumerate_simple_paths(&graph, &start, &goal)?;
    let candidates = filter_candidates(&all, DEFAULT_K);
    println!("{} simple paths, {} candidates", all.len(), candidates.len());

    let paths = realize_all(&candidates, &graph, &tra).into_iter().collect::<Result<Vec<_>, _>>()?;
    for p in &paths {
        println!("path_{}: {:.2} m, {} cells  {}", p.path_id, p.world_length, p.cells.len(), p.nodes.join(" > "));
    }
    println!();
    write_paths(&paths, false, std::io::stdout().lock())?;
    Ok(())
}
