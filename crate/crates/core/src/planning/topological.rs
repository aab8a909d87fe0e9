use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::RoomCategory;
use crate::topo::TopoGraph;

/// Room sequence from start to goal without repeated rooms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologicalPath {
    /// Enumeration index, then rank after [`filter_candidates`].
    pub path_id: usize,
    pub nodes: Vec<String>,
    /// Sum of edge lengths, meters.
    pub topo_length: f64,
}

/// Every simple path from `start` to `goal`, ordered lexicographically by
/// node names.
pub fn enumerate_simple_paths(graph: &TopoGraph, start: &str, goal: &str) -> Result<Vec<TopologicalPath>> {
    let s = graph
        .node_index(start)
        .ok_or_else(|| Error::UnknownRoom(start.to_string()))?;
    let e = graph
        .node_index(goal)
        .ok_or_else(|| Error::UnknownRoom(goal.to_string()))?;

    let mut found: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut on_path = vec![false; graph.nodes().len()];
    let mut stack = vec![s];
    on_path[s] = true;
    dfs(graph, e, &mut stack, &mut on_path, 0.0, &mut found);

    let mut paths: Vec<TopologicalPath> = found
        .into_iter()
        .map(|(idx, len)| TopologicalPath {
            path_id: 0,
            nodes: idx.iter().map(|&i| graph.nodes()[i].room_name.clone()).collect(),
            topo_length: len,
        })
        .collect();
    paths.sort_by(|a, b| a.nodes.cmp(&b.nodes));
    for (i, p) in paths.iter_mut().enumerate() {
        p.path_id = i;
    }
    Ok(paths)
}

fn dfs(
    graph: &TopoGraph,
    goal: usize,
    stack: &mut Vec<usize>,
    on_path: &mut [bool],
    length: f64,
    found: &mut Vec<(Vec<usize>, f64)>,
) {
    let here = *stack.last().expect("stack starts non-empty");
    if here == goal {
        found.push((stack.clone(), length));
        return;
    }
    for &(next, edge) in graph.neighbors(here) {
        if on_path[next] {
            continue;
        }
        on_path[next] = true;
        stack.push(next);
        dfs(graph, goal, stack, on_path, length + graph.edges()[edge].length, found);
        stack.pop();
        on_path[next] = false;
    }
}

/// Keeps hallway-only routes that are not detours of another route, then the
/// `k` shortest by topological length. Survivors are renumbered `0..`.
pub fn filter_candidates(paths: &[TopologicalPath], k: usize) -> Vec<TopologicalPath> {
    let through_hallways: Vec<&TopologicalPath> = paths
        .iter()
        .filter(|p| {
            let n = p.nodes.len();
            n < 3 || p.nodes[1..n - 1]
                .iter()
                .all(|r| RoomCategory::from_room_name(r) == RoomCategory::Hallway)
        })
        .collect();
    let sets: Vec<BTreeSet<&str>> = through_hallways
        .iter()
        .map(|p| p.nodes.iter().map(String::as_str).collect())
        .collect();
    // Strict inclusion is transitive, so comparing against all hallway routes
    // is the same as comparing against the final survivors.
    let mut kept: Vec<TopologicalPath> = through_hallways
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            !sets
                .iter()
                .enumerate()
                .any(|(j, a)| j != i && a.len() < sets[i].len() && a.is_subset(&sets[i]))
        })
        .map(|(_, p)| (*p).clone())
        .collect();
    kept.sort_by(|a, b| {
        a.topo_length
            .total_cmp(&b.topo_length)
            .then_with(|| a.nodes.cmp(&b.nodes))
    });
    kept.truncate(k);
    for (i, p) in kept.iter_mut().enumerate() {
        p.path_id = i;
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;
    use crate::topo::{TopoEdge, TopoNode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph(names: &[&str], edges: &[(usize, usize, f64)]) -> TopoGraph {
        let nodes = names
            .iter()
            .map(|n| TopoNode {
                room_name: n.to_string(),
                category: RoomCategory::from_room_name(n),
                center_cell: Cell::new(0, 0),
            })
            .collect();
        let edges = edges
            .iter()
            .map(|&(a, b, length)| TopoEdge { a, b, clearance: 0.0, length })
            .collect();
        TopoGraph::new(nodes, edges).unwrap()
    }

    fn names(paths: &[TopologicalPath]) -> Vec<Vec<&str>> {
        paths
            .iter()
            .map(|p| p.nodes.iter().map(String::as_str).collect())
            .collect()
    }

    fn diamond() -> TopoGraph {
        // S=office_1, H1=hallway_1, H2=hallway_2, E=office_2
        graph(
            &["office_1", "hallway_1", "hallway_2", "office_2"],
            &[(0, 1, 1.0), (0, 2, 1.5), (1, 3, 1.0), (2, 3, 1.5), (1, 2, 1.0)],
        )
    }

    /// All orderings of all subsets of intermediate nodes, kept when every
    /// consecutive pair is adjacent.
    fn brute_force(g: &TopoGraph, s: usize, e: usize) -> BTreeSet<Vec<usize>> {
        let n = g.nodes().len();
        let others: Vec<usize> = (0..n).filter(|&i| i != s && i != e).collect();
        let mut out = BTreeSet::new();
        if s == e {
            out.insert(vec![s]);
            return out;
        }
        for mask in 0u32..(1 << others.len()) {
            let mut subset: Vec<usize> = others
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &x)| x)
                .collect();
            let mut perms = Vec::new();
            heap_permutations(subset.len(), &mut subset, &mut perms);
            for p in perms {
                let mut seq = vec![s];
                seq.extend(p);
                seq.push(e);
                if seq.windows(2).all(|w| g.edge_between(w[0], w[1]).is_some()) {
                    out.insert(seq);
                }
            }
        }
        out
    }

    fn heap_permutations(k: usize, v: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(v.clone());
            return;
        }
        for i in 0..k - 1 {
            heap_permutations(k - 1, v, out);
            if k % 2 == 0 {
                v.swap(i, k - 1);
            } else {
                v.swap(0, k - 1);
            }
        }
        heap_permutations(k - 1, v, out);
    }

    #[test]
    fn diamond_has_four_paths() {
        let g = diamond();
        let paths = enumerate_simple_paths(&g, "office_1", "office_2").unwrap();
        assert_eq!(
            names(&paths),
            vec![
                vec!["office_1", "hallway_1", "hallway_2", "office_2"],
                vec!["office_1", "hallway_1", "office_2"],
                vec!["office_1", "hallway_2", "hallway_1", "office_2"],
                vec!["office_1", "hallway_2", "office_2"],
            ]
        );
        assert_eq!(paths[1].topo_length, 2.0);
        assert_eq!(paths[0].topo_length, 3.5);
    }

    #[test]
    fn degenerate_and_disconnected() {
        let g = graph(&["office_1", "hallway_1", "office_2"], &[(0, 1, 1.0)]);
        assert!(enumerate_simple_paths(&g, "office_1", "office_2").unwrap().is_empty());
        let same = enumerate_simple_paths(&g, "office_1", "office_1").unwrap();
        assert_eq!(names(&same), vec![vec!["office_1"]]);
        assert_eq!(same[0].topo_length, 0.0);
        assert!(matches!(
            enumerate_simple_paths(&g, "office_1", "lobby_9"),
            Err(Error::UnknownRoom(_))
        ));
    }

    #[test]
    fn matches_brute_force_on_small_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let n = rng.gen_range(2..=8);
            let hallways = rng.gen_range(1..=n);
            let names: Vec<String> = (0..n)
                .map(|i| if i < hallways { format!("hallway_{i}") } else { format!("office_{i}") })
                .collect();
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if (a < hallways || b < hallways) && rng.gen_bool(0.5) {
                        edges.push((a, b, rng.gen_range(0.5..5.0)));
                    }
                }
            }
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let g = graph(&refs, &edges);
            let s = rng.gen_range(0..n);
            let e = rng.gen_range(0..n);
            let got: BTreeSet<Vec<usize>> = enumerate_simple_paths(&g, &names[s], &names[e])
                .unwrap()
                .iter()
                .map(|p| p.nodes.iter().map(|x| g.node_index(x).unwrap()).collect())
                .collect();
            assert_eq!(got, brute_force(&g, s, e));
        }
    }

    fn path(nodes: &[&str], len: f64) -> TopologicalPath {
        TopologicalPath {
            path_id: 99,
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            topo_length: len,
        }
    }

    #[test]
    fn drops_paths_through_rooms() {
        let out = filter_candidates(
            &[
                path(&["office_1", "office_2", "office_3"], 1.0),
                path(&["office_1", "hallway_1", "office_3"], 5.0),
            ],
            5,
        );
        assert_eq!(names(&out), vec![vec!["office_1", "hallway_1", "office_3"]]);
        assert_eq!(out[0].path_id, 0);
    }

    #[test]
    fn drops_detours() {
        let out = filter_candidates(
            &[
                path(&["office_1", "hallway_2", "hallway_1", "office_2"], 1.0),
                path(&["office_1", "hallway_1", "office_2"], 9.0),
            ],
            5,
        );
        assert_eq!(names(&out), vec![vec!["office_1", "hallway_1", "office_2"]]);
    }

    #[test]
    fn keeps_k_shortest_of_seven() {
        // Seven single-hallway routes, mutually incomparable as sets.
        let input: Vec<TopologicalPath> = (0..7)
            .map(|i| {
                let h = format!("hallway_{i}");
                path(&["office_1", &h, "office_2"], [4.0, 2.0, 7.0, 1.0, 5.0, 3.0, 6.0][i])
            })
            .collect();
        let out = filter_candidates(&input, 5);
        let lengths: Vec<f64> = out.iter().map(|p| p.topo_length).collect();
        assert_eq!(lengths, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(out.iter().map(|p| p.path_id).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn length_ties_break_by_names() {
        let out = filter_candidates(
            &[
                path(&["office_1", "hallway_b", "office_2"], 2.0),
                path(&["office_1", "hallway_a", "office_2"], 2.0),
            ],
            5,
        );
        assert_eq!(out[0].nodes[1], "hallway_a");
    }

    #[test]
    fn filter_is_idempotent_and_clean() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let n = rng.gen_range(3..=8);
            let names: Vec<String> = (0..n)
                .map(|i| if i % 3 == 2 { format!("lobby_{i}") } else { format!("hallway_{i}") })
                .collect();
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    let hall = !names[a].starts_with("lobby") || !names[b].starts_with("lobby");
                    if hall && rng.gen_bool(0.6) {
                        edges.push((a, b, rng.gen_range(0.5..5.0)));
                    }
                }
            }
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let g = graph(&refs, &edges);
            let all = enumerate_simple_paths(&g, &names[0], &names[n - 1]).unwrap();
            let k = rng.gen_range(1..=6);
            let once = filter_candidates(&all, k);
            assert_eq!(filter_candidates(&once, k), once);
            for p in &once {
                let m = p.nodes.len();
                if m > 2 {
                    assert!(p.nodes[1..m - 1].iter().all(|r| r.starts_with("hallway")));
                }
                let sp: BTreeSet<&String> = p.nodes.iter().collect();
                for q in &once {
                    let sq: BTreeSet<&String> = q.nodes.iter().collect();
                    assert!(!(sq.len() < sp.len() && sq.is_subset(&sp)));
                }
            }
        }
    }
}
