//! Room-level topological graph.
//!
//! Every room becomes a node anchored at a traversable grid cell near its
//! centroid. Two rooms are joined when their point clouds come within the
//! adjacency threshold of each other and at least one of them is a hallway,
//! so rooms only ever connect through corridors.

mod graph_file;
mod kdtree;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, GridGeometry, TraversabilityMap};
use crate::scene::{Room, RoomCategory, SceneSet};
use kdtree::KdTree;

pub use graph_file::{read_graph, write_graph};

pub const DEFAULT_ADJACENCY_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopoNode {
    pub room_name: String,
    pub category: RoomCategory,
    pub center_cell: Cell,
}

impl TopoNode {
    pub fn is_hallway(&self) -> bool {
        self.category == RoomCategory::Hallway
    }
}

/// Undirected edge between node indices `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopoEdge {
    pub a: usize,
    pub b: usize,
    /// Minimum 3D distance between the two rooms' points, meters.
    pub clearance: f64,
    /// Distance between the two node centers, meters.
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopoGraph {
    nodes: Vec<TopoNode>,
    edges: Vec<TopoEdge>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl TopoGraph {
    /// Assembles a graph, checking the structural invariants: valid
    /// endpoints, no self loops or duplicates, every edge hallway-incident.
    pub fn new(nodes: Vec<TopoNode>, mut edges: Vec<TopoEdge>) -> Result<Self> {
        let mut names: Vec<&str> = nodes.iter().map(|n| n.room_name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedScene("duplicate graph node".into()));
        }
        for e in &mut edges {
            if e.a > e.b {
                std::mem::swap(&mut e.a, &mut e.b);
            }
            if e.a == e.b || e.b >= nodes.len() {
                return Err(Error::MalformedScene(format!("bad edge {}-{}", e.a, e.b)));
            }
            if !nodes[e.a].is_hallway() && !nodes[e.b].is_hallway() {
                return Err(Error::MalformedScene(format!(
                    "edge {}-{} touches no hallway",
                    nodes[e.a].room_name, nodes[e.b].room_name
                )));
            }
        }
        edges.sort_by_key(|e| (e.a, e.b));
        if edges.windows(2).any(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b)) {
            return Err(Error::MalformedScene("duplicate graph edge".into()));
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.a].push((e.b, i));
            adjacency[e.b].push((e.a, i));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(TopoGraph {
            nodes,
            edges,
            adjacency,
        })
    }

    pub fn nodes(&self) -> &[TopoNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[TopoEdge] {
        &self.edges
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.room_name == name)
    }

    pub fn node(&self, name: &str) -> Result<&TopoNode> {
        self.node_index(name)
            .map(|i| &self.nodes[i])
            .ok_or_else(|| Error::UnknownRoom(name.to_string()))
    }

    /// `(neighbor, edge index)` pairs sorted by neighbor index.
    pub fn neighbors(&self, node: usize) -> &[(usize, usize)] {
        &self.adjacency[node]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<&TopoEdge> {
        self.adjacency[a]
            .iter()
            .find(|(n, _)| *n == b)
            .map(|&(_, e)| &self.edges[e])
    }
}

fn room_points(room: &Room) -> Vec<[f64; 3]> {
    room.points().iter().map(|p| [p.x, p.y, p.z]).collect()
}

fn aabb_gap_sq(a: &([f64; 3], [f64; 3]), b: &([f64; 3], [f64; 3])) -> f64 {
    (0..3)
        .map(|k| {
            let gap = (b.0[k] - a.1[k]).max(a.0[k] - b.1[k]).max(0.0);
            gap * gap
        })
        .sum()
}

/// Exact minimum distance over all point pairs of two rooms.
pub fn min_room_distance(a: &Room, b: &Room) -> Result<f64> {
    for r in [a, b] {
        if r.points().is_empty() {
            return Err(Error::EmptyRoom(r.name().to_string()));
        }
    }
    let (small, large) = if a.points().len() <= b.points().len() {
        (a, b)
    } else {
        (b, a)
    };
    let tree = KdTree::new(room_points(large));
    let best = small
        .points()
        .iter()
        .fold(f64::INFINITY, |best, p| tree.nearest_sq([p.x, p.y, p.z], best));
    Ok(best.sqrt())
}

/// Minimum distance if it does not exceed `threshold`, else `None`.
fn min_distance_within(
    query: &[[f64; 3]],
    tree: &KdTree,
    tree_box: &([f64; 3], [f64; 3]),
    threshold: f64,
) -> Option<f64> {
    let bound = threshold * threshold;
    // Only query points near the other room's box can realize a pair within threshold.
    // The search bound is exclusive, so start just above the threshold.
    let best = query
        .iter()
        .filter(|q| aabb_gap_sq(&(**q, **q), tree_box) <= bound)
        .fold(bound.next_up(), |best, &q| tree.nearest_sq(q, best));
    (best <= bound).then(|| best.sqrt())
}

/// Nearest traversable cell to the room's xy centroid within the room's
/// bounding box grown by one meter. Cells the room itself covers are
/// preferred; ties go to the first cell in row-major order.
fn snap_center(room: &Room, tra: &TraversabilityMap) -> Result<Cell> {
    let g: &GridGeometry = tra.geometry();
    let (lo, hi) = room.bounds();
    let clamp_cell = |x: f64, y: f64| -> (usize, usize) {
        let fx = ((x - g.origin_x) / g.resolution).floor();
        let fy = ((y - g.origin_y) / g.resolution).floor();
        (
            fx.clamp(0.0, (g.width - 1) as f64) as usize,
            fy.clamp(0.0, (g.height - 1) as f64) as usize,
        )
    };
    let (c0, r0) = clamp_cell(lo[0] - 1.0, lo[1] - 1.0);
    let (c1, r1) = clamp_cell(hi[0] + 1.0, hi[1] + 1.0);
    let (cx, cy) = room.xy_centroid();
    let (ccol, crow) = clamp_cell(cx, cy);

    let w = c1 - c0 + 1;
    let mut claimed = vec![false; w * (r1 - r0 + 1)];
    for p in room.points() {
        if let Some(cell) = g.world_to_cell(p.x, p.y) {
            if (c0..=c1).contains(&cell.col) && (r0..=r1).contains(&cell.row) {
                claimed[(cell.row - r0) * w + (cell.col - c0)] = true;
            }
        }
    }

    // Key: (not claimed, squared distance, cell) so derived ordering picks the winner.
    let mut best: Option<(bool, usize, Cell)> = None;
    for row in r0..=r1 {
        for col in c0..=c1 {
            let cell = Cell::new(col, row);
            if !tra.is_traversable(cell) {
                continue;
            }
            let d = col.abs_diff(ccol).pow(2) + row.abs_diff(crow).pow(2);
            let key = (!claimed[(row - r0) * w + (col - c0)], d, cell);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
    }
    best.map(|(_, _, c)| c)
        .ok_or_else(|| Error::NoTraversableCenter(room.name().to_string()))
}

pub fn build_topology(
    scene: &SceneSet,
    tra: &TraversabilityMap,
    adjacency_threshold: f64,
) -> Result<TopoGraph> {
    if adjacency_threshold.is_nan() || adjacency_threshold <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "adjacency_threshold {adjacency_threshold} must be > 0"
        )));
    }
    let rooms = scene.rooms();
    if let Some(r) = rooms.iter().find(|r| r.points().is_empty()) {
        return Err(Error::EmptyRoom(r.name().to_string()));
    }

    let nodes = rooms
        .par_iter()
        .map(|room| {
            Ok(TopoNode {
                room_name: room.name().to_string(),
                category: room.category(),
                center_cell: snap_center(room, tra)?,
            })
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let boxes: Vec<_> = rooms.iter().map(Room::bounds).collect();
    let bound = adjacency_threshold * adjacency_threshold;
    let pairs: Vec<(usize, usize)> = (0..rooms.len())
        .flat_map(|i| (i + 1..rooms.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| rooms[i].is_hallway() || rooms[j].is_hallway())
        .filter(|&(i, j)| aabb_gap_sq(&boxes[i], &boxes[j]) <= bound)
        .collect();

    // One tree per room that takes part in a candidate pair.
    let mut needed: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    needed.sort_unstable();
    needed.dedup();
    let trees: BTreeMap<usize, (Vec<[f64; 3]>, KdTree)> = needed
        .par_iter()
        .map(|&i| {
            let pts = room_points(&rooms[i]);
            (i, (pts.clone(), KdTree::new(pts)))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let geometry = tra.geometry();
    let edges: Vec<TopoEdge> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            // Query the smaller cloud against the larger one's tree.
            let (q, t) = if trees[&i].0.len() <= trees[&j].0.len() { (i, j) } else { (j, i) };
            let clearance =
                min_distance_within(&trees[&q].0, &trees[&t].1, &boxes[t], adjacency_threshold)?;
            let (ax, ay) = geometry.cell_center(nodes[i].center_cell);
            let (bx, by) = geometry.cell_center(nodes[j].center_cell);
            Some(TopoEdge {
                a: i,
                b: j,
                clearance,
                length: (ax - bx).hypot(ay - by),
            })
        })
        .collect();

    TopoGraph::new(nodes, edges)
}
