//! Route candidates: simple room sequences between two rooms, filtered to
//! hallway-only detours, then realized on the grid with A*.

mod astar;
mod cost;
mod export;
mod topological;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, TraversabilityMap};
use crate::topo::TopoGraph;

pub use astar::{astar, GridPath};
pub use cost::OctileCost;
pub use export::{read_paths, write_paths, PathRecord};
pub use topological::{enumerate_simple_paths, filter_candidates, TopologicalPath};

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricPath {
    pub path_id: usize,
    pub nodes: Vec<String>,
    pub cells: Vec<Cell>,
    pub cost: OctileCost,
    /// Step cost in cells: 1 per axis step, sqrt(2) per diagonal.
    pub cell_length: f64,
    /// `cell_length * resolution`, meters.
    pub world_length: f64,
}

/// Joins A* segments between consecutive node centers into one grid path.
/// Each junction cell appears once.
pub fn realize_metric_path(
    topo: &TopologicalPath,
    graph: &TopoGraph,
    tra: &TraversabilityMap,
) -> Result<MetricPath> {
    let centers = topo
        .nodes
        .iter()
        .map(|n| graph.node(n).map(|node| node.center_cell))
        .collect::<Result<Vec<_>>>()?;
    let Some(&first) = centers.first() else {
        return Err(Error::InvalidParameter("empty topological path".into()));
    };
    if !tra.is_traversable(first) {
        return Err(Error::NotTraversable {
            col: first.col,
            row: first.row,
        });
    }
    let mut cells = vec![first];
    let mut cost = OctileCost::ZERO;
    for (i, pair) in centers.windows(2).enumerate() {
        let seg = astar(tra, pair[0], pair[1]).map_err(|e| match e {
            Error::Unreachable { .. } | Error::NotTraversable { .. } => {
                Error::SegmentUnreachable(topo.nodes[i].clone(), topo.nodes[i + 1].clone())
            }
            other => other,
        })?;
        cells.extend_from_slice(&seg.cells[1..]);
        cost = cost + seg.cost;
    }
    let cell_length = cost.value();
    Ok(MetricPath {
        path_id: topo.path_id,
        nodes: topo.nodes.clone(),
        cells,
        cost,
        cell_length,
        world_length: cell_length * tra.geometry().resolution,
    })
}

/// Realizes every candidate in parallel; output keeps the input order.
pub fn realize_all(
    candidates: &[TopologicalPath],
    graph: &TopoGraph,
    tra: &TraversabilityMap,
) -> Vec<Result<MetricPath>> {
    candidates
        .par_iter()
        .map(|c| realize_metric_path(c, graph, tra))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::RoomCategory;
    use crate::topo::{TopoEdge, TopoNode};

    fn graph(nodes: &[(&str, usize, usize)], edges: &[(usize, usize)]) -> TopoGraph {
        let nodes = nodes
            .iter()
            .map(|&(n, c, r)| TopoNode {
                room_name: n.into(),
                category: RoomCategory::from_room_name(n),
                center_cell: Cell::new(c, r),
            })
            .collect();
        let edges = edges
            .iter()
            .map(|&(a, b)| TopoEdge { a, b, clearance: 0.0, length: 1.0 })
            .collect();
        TopoGraph::new(nodes, edges).unwrap()
    }

    fn topo(nodes: &[&str]) -> TopologicalPath {
        TopologicalPath {
            path_id: 3,
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            topo_length: 0.0,
        }
    }

    const ROOM: &str = "..........
                        ..........
                        ..........
                        ..........";

    #[test]
    fn single_segment_matches_astar() {
        let tra = TraversabilityMap::from_ascii(ROOM).unwrap();
        let g = graph(&[("office_1", 0, 0), ("hallway_1", 9, 3)], &[(0, 1)]);
        let m = realize_metric_path(&topo(&["office_1", "hallway_1"]), &g, &tra).unwrap();
        let direct = astar(&tra, Cell::new(0, 0), Cell::new(9, 3)).unwrap();
        assert_eq!(m.cells, direct.cells);
        assert_eq!(m.cost, direct.cost);
        assert_eq!(m.path_id, 3);
        assert_eq!(m.world_length, m.cell_length * tra.geometry().resolution);
    }

    #[test]
    fn junction_appears_once() {
        let tra = TraversabilityMap::from_ascii(ROOM).unwrap();
        let g = graph(
            &[("office_1", 0, 0), ("hallway_1", 5, 3), ("office_2", 9, 0)],
            &[(0, 1), (1, 2)],
        );
        let m = realize_metric_path(&topo(&["office_1", "hallway_1", "office_2"]), &g, &tra).unwrap();
        let a = astar(&tra, Cell::new(0, 0), Cell::new(5, 3)).unwrap();
        let b = astar(&tra, Cell::new(5, 3), Cell::new(9, 0)).unwrap();
        assert_eq!(m.cells.len(), a.cells.len() + b.cells.len() - 1);
        assert_eq!(m.cells.iter().filter(|&&c| c == Cell::new(5, 3)).count(), 1);
        assert_eq!(m.cost, a.cost + b.cost);
        assert!(m.cells.windows(2).all(|w| w[0].is_8_adjacent(w[1])));
    }

    #[test]
    fn blocked_doorway() {
        let tra = TraversabilityMap::from_ascii(
            "...#...
             ...#...",
        )
        .unwrap();
        let g = graph(&[("office_1", 0, 0), ("hallway_1", 6, 1)], &[(0, 1)]);
        let err = realize_metric_path(&topo(&["office_1", "hallway_1"]), &g, &tra).unwrap_err();
        assert!(matches!(err, Error::SegmentUnreachable(a, b) if a == "office_1" && b == "hallway_1"));
    }
}
