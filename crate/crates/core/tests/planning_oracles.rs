use std::cmp::Ordering;
use std::collections::BinaryHeap;

use panav::grid::{Cell, GridGeometry, TraversabilityMap};
use panav::planning::{astar, OctileCost};
use panav::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(PartialEq)]
struct Entry(f64, u32, u32, usize);

impl Eq for Entry {}
impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
    }
}
impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Plain Dijkstra carrying (axis, diagonal) step counts, ordered by float.
fn dijkstra(free: &[bool], w: usize, h: usize, from: (usize, usize), to: (usize, usize)) -> Option<(u32, u32)> {
    let idx = |c: usize, r: usize| r * w + c;
    let mut done = vec![false; w * h];
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, 0, 0, idx(from.0, from.1)));
    while let Some(Entry(_, a, d, i)) = heap.pop() {
        if done[i] {
            continue;
        }
        done[i] = true;
        let (c, r) = (i % w, i / w);
        if (c, r) == to {
            return Some((a, d));
        }
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (nc, nr) = (c as i64 + dc, r as i64 + dr);
                if nc < 0 || nr < 0 || nc >= w as i64 || nr >= h as i64 {
                    continue;
                }
                let (nc, nr) = (nc as usize, nr as usize);
                if !free[idx(nc, nr)] {
                    continue;
                }
                let diag = dc != 0 && dr != 0;
                if diag && !(free[idx(nc, r)] && free[idx(c, nr)]) {
                    continue;
                }
                let (na, nd) = if diag { (a, d + 1) } else { (a + 1, d) };
                heap.push(Entry(na as f64 + nd as f64 * 2f64.sqrt(), na, nd, idx(nc, nr)));
            }
        }
    }
    None
}

#[test]
fn astar_matches_dijkstra_on_random_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (w, h) = (64, 64);
    let mut reachable = 0;
    for _ in 0..200 {
        let density = rng.gen_range(0.1..0.4);
        let free: Vec<bool> = (0..w * h).map(|_| !rng.gen_bool(density)).collect();
        let geo = GridGeometry::new(0.0, 0.0, 0.1, w, h).unwrap();
        let tra = TraversabilityMap::from_cells(geo, free.clone()).unwrap();
        let pick = |rng: &mut ChaCha8Rng| loop {
            let (c, r) = (rng.gen_range(0..w), rng.gen_range(0..h));
            if free[r * w + c] {
                break (c, r);
            }
        };
        let (s, e) = (pick(&mut rng), pick(&mut rng));
        let got = astar(&tra, Cell::new(s.0, s.1), Cell::new(e.0, e.1));
        match (dijkstra(&free, w, h, s, e), got) {
            (Some((a, d)), Ok(path)) => {
                reachable += 1;
                assert_eq!(path.cost, OctileCost { axis: a, diagonal: d });
                let mut recomputed = 0.0;
                for pair in path.cells.windows(2) {
                    assert!(pair[0].is_8_adjacent(pair[1]));
                    let diag = pair[0].col != pair[1].col && pair[0].row != pair[1].row;
                    recomputed += if diag { 2f64.sqrt() } else { 1.0 };
                }
                assert!((recomputed - path.cost.value()).abs() < 1e-9);
                assert!(path.cells.iter().all(|&c| tra.is_traversable(c)));
            }
            (None, Err(Error::Unreachable { .. })) => {}
            (oracle, got) => panic!("oracle {oracle:?} vs astar {got:?}"),
        }
    }
    assert!(reachable > 100, "only {reachable} reachable cases");
}

#[test]
fn empty_three_by_three_diagonal() {
    let free = vec![true; 9];
    let (a, d) = dijkstra(&free, 3, 3, (0, 0), (2, 2)).unwrap();
    let oracle = a as f64 + d as f64 * 2f64.sqrt();
    let tra = TraversabilityMap::from_cells(GridGeometry::new(0.0, 0.0, 1.0, 3, 3).unwrap(), free).unwrap();
    let p = astar(&tra, Cell::new(0, 0), Cell::new(2, 2)).unwrap();
    assert_eq!(p.cost.value(), oracle);
    assert!((oracle - 2.8284).abs() < 1e-4);
}
