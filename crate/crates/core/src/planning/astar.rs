use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::OctileCost;
use crate::error::{Error, Result};
use crate::grid::{Cell, TraversabilityMap};

/// Cell sequence from start to goal with its exact step cost.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    pub cells: Vec<Cell>,
    pub cost: OctileCost,
}

/// Whether a move of `(dc, dr)` out of `cell` is allowed: the target must be
/// traversable and a diagonal may not cut past an obstacle corner.
pub(crate) fn step_allowed(tra: &TraversabilityMap, cell: Cell, next: Cell, dc: i8, dr: i8) -> bool {
    if !tra.is_traversable(next) {
        return false;
    }
    if dc != 0 && dr != 0 {
        let side_a = Cell::new(next.col, cell.row);
        let side_b = Cell::new(cell.col, next.row);
        return tra.is_traversable(side_a) && tra.is_traversable(side_b);
    }
    true
}

/// Optimal 8-connected grid path under the octile heuristic.
///
/// Diagonal steps cost `sqrt(2)` and require both orthogonally adjacent
/// cells to be free. Among equal `f`, the node with smaller `h` expands
/// first, then the lower cell in row-major order.
pub fn astar(tra: &TraversabilityMap, from: Cell, to: Cell) -> Result<GridPath> {
    for c in [from, to] {
        if !tra.is_traversable(c) {
            return Err(Error::NotTraversable {
                col: c.col,
                row: c.row,
            });
        }
    }
    let g = tra.geometry();
    let heuristic = |c: Cell| OctileCost::octile(c.col.abs_diff(to.col), c.row.abs_diff(to.row));

    let mut best: Vec<Option<OctileCost>> = vec![None; g.len()];
    let mut parent: Vec<u32> = vec![u32::MAX; g.len()];
    let mut closed = vec![false; g.len()];
    let mut open = BinaryHeap::new();

    best[g.index(from)] = Some(OctileCost::ZERO);
    let h0 = heuristic(from);
    open.push(Reverse((h0, h0, from)));

    while let Some(Reverse((_, _, cell))) = open.pop() {
        let ci = g.index(cell);
        if closed[ci] {
            continue;
        }
        closed[ci] = true;
        if cell == to {
            let mut cells = vec![cell];
            let mut at = ci;
            while parent[at] != u32::MAX {
                at = parent[at] as usize;
                cells.push(g.cell_at(at));
            }
            cells.reverse();
            return Ok(GridPath {
                cells,
                cost: best[ci].expect("goal was reached"),
            });
        }
        let base = best[ci].expect("expanded cells have a cost");
        for (next, dc, dr) in g.neighbors8(cell) {
            let ni = g.index(next);
            if closed[ni] || !step_allowed(tra, cell, next, dc, dr) {
                continue;
            }
            let step = if dc != 0 && dr != 0 {
                OctileCost::DIAGONAL
            } else {
                OctileCost::AXIS
            };
            let cand = base + step;
            if best[ni].is_none_or(|b| cand < b) {
                best[ni] = Some(cand);
                parent[ni] = ci as u32;
                let h = heuristic(next);
                open.push(Reverse((cand + h, h, next)));
            }
        }
    }
    Err(Error::Unreachable {
        from_col: from.col,
        from_row: from.row,
        to_col: to.col,
        to_row: to.row,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_corridor() {
        let tra = TraversabilityMap::from_ascii(".....").unwrap();
        let p = astar(&tra, Cell::new(0, 0), Cell::new(4, 0)).unwrap();
        assert_eq!(p.cost.value(), 4.0);
        assert_eq!(p.cells.len(), 5);
    }

    #[test]
    fn open_diagonal() {
        let tra = TraversabilityMap::from_ascii("...\n...\n...").unwrap();
        let p = astar(&tra, Cell::new(0, 0), Cell::new(2, 2)).unwrap();
        assert_eq!(p.cost, OctileCost { axis: 0, diagonal: 2 });
        assert!((p.cost.value() - 2.8284271247461903).abs() < 1e-12);
    }

    #[test]
    fn no_corner_cutting() {
        let tra = TraversabilityMap::from_ascii(
            "..
             #.",
        )
        .unwrap();
        // (0,1) top-left -> (1,0) bottom-right would cut the `#` corner.
        let p = astar(&tra, Cell::new(0, 1), Cell::new(1, 0)).unwrap();
        assert_eq!(p.cost.value(), 2.0);
    }

    #[test]
    fn enclosed_goal_unreachable() {
        let tra = TraversabilityMap::from_ascii(
            ".....
             .###.
             .#.#.
             .###.
             .....",
        )
        .unwrap();
        assert!(matches!(
            astar(&tra, Cell::new(0, 0), Cell::new(2, 2)),
            Err(Error::Unreachable { .. })
        ));
        assert!(matches!(
            astar(&tra, Cell::new(1, 1), Cell::new(0, 0)),
            Err(Error::NotTraversable { col: 1, row: 1 })
        ));
    }

    #[test]
    fn trivial_path() {
        let tra = TraversabilityMap::from_ascii("..").unwrap();
        let p = astar(&tra, Cell::new(1, 0), Cell::new(1, 0)).unwrap();
        assert_eq!(p.cells, vec![Cell::new(1, 0)]);
        assert_eq!(p.cost, OctileCost::ZERO);
    }
}
