use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::DistanceField;
use crate::error::{Error, Result};
use crate::grid::{Cell, TraversabilityMap};

#[derive(Clone, Copy, PartialEq)]
struct Key(f64, Cell);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn source_mask(tra: &TraversabilityMap, sources: &[Cell]) -> Result<Vec<bool>> {
    if sources.is_empty() {
        return Err(Error::EmptySources);
    }
    let g = tra.geometry();
    let mut mask = vec![false; g.len()];
    for &s in sources {
        if !g.contains(s) {
            return Err(Error::GeometryMismatch(format!("source {s} outside the grid")));
        }
        mask[g.index(s)] = true;
    }
    Ok(mask)
}

/// Fast-marching arrival times from `sources`, in cells, propagating only
/// through traversable cells.
///
/// First-order upwind Godunov update, taking the smaller of the axis stencil
/// and the 45-degree rotated stencil over diagonal neighbors. Diagonal
/// neighbors only count when the move would not cut an obstacle corner.
/// Cells directly beside a source take exactly 1.0. Cells the front cannot
/// reach keep `f64::INFINITY`.
pub fn fmm_distance(tra: &TraversabilityMap, sources: &[Cell]) -> Result<DistanceField> {
    let is_source = source_mask(tra, sources)?;
    let g = tra.geometry();
    let mut value = vec![f64::INFINITY; g.len()];
    let mut accepted = vec![false; g.len()];
    let mut pinned = vec![false; g.len()];
    let mut trial = BinaryHeap::new();
    for (i, &s) in is_source.iter().enumerate() {
        if s {
            value[i] = 0.0;
            accepted[i] = true;
        }
    }
    for (i, &s) in is_source.iter().enumerate() {
        if !s {
            continue;
        }
        for n in g.neighbors4(g.cell_at(i)) {
            let ni = g.index(n);
            if !accepted[ni] && tra.is_traversable(n) && value[ni] > 1.0 {
                value[ni] = 1.0;
                pinned[ni] = true;
                trial.push(Reverse(Key(1.0, n)));
            }
        }
    }

    while let Some(Reverse(Key(d, cell))) = trial.pop() {
        let ci = g.index(cell);
        if accepted[ci] || d > value[ci] {
            continue;
        }
        accepted[ci] = true;
        for (n, dc, dr) in g.neighbors8(cell) {
            let ni = g.index(n);
            let diagonal = dc != 0 && dr != 0;
            if accepted[ni] || pinned[ni] || !tra.is_traversable(n) || (diagonal && !diagonal_open(tra, cell, n, &value)) {
                continue;
            }
            let u = update(tra, n, &value, &accepted);
            if u < value[ni] {
                value[ni] = u;
                trial.push(Reverse(Key(u, n)));
            }
        }
    }
    Ok(DistanceField::new(*g, value))
}

/// Accepted value of the neighbor at `(dc, dr)`, or ∞.
fn settled(tra: &TraversabilityMap, cell: Cell, dc: i8, dr: i8, value: &[f64], accepted: &[bool]) -> f64 {
    let g = tra.geometry();
    let (col, row) = (cell.col as isize + dc as isize, cell.row as isize + dr as isize);
    if col < 0 || row < 0 || col as usize >= g.width || row as usize >= g.height {
        return f64::INFINITY;
    }
    let n = Cell::new(col as usize, row as usize);
    let i = g.index(n);
    if !accepted[i] || (dc != 0 && dr != 0 && !diagonal_open(tra, cell, n, value)) {
        return f64::INFINITY;
    }
    value[i]
}

/// Sources may sit on obstacle cells, so corner checks treat them as open.
fn diagonal_open(tra: &TraversabilityMap, from: Cell, to: Cell, value: &[f64]) -> bool {
    let g = tra.geometry();
    [Cell::new(to.col, from.row), Cell::new(from.col, to.row)]
        .iter()
        .all(|&c| tra.is_traversable(c) || value[g.index(c)] == 0.0)
}

/// Two-neighbor eikonal solve for neighbors `a`, `b` at spacing `h`.
fn solve(a: f64, b: f64, h: f64) -> f64 {
    if (a - b).abs() >= h {
        a.min(b) + h
    } else {
        (a + b + (2.0 * h * h - (a - b) * (a - b)).sqrt()) / 2.0
    }
}

fn update(tra: &TraversabilityMap, n: Cell, value: &[f64], accepted: &[bool]) -> f64 {
    let v = |dc, dr| settled(tra, n, dc, dr, value, accepted);
    let axis = solve(v(-1, 0).min(v(1, 0)), v(0, -1).min(v(0, 1)), 1.0);
    let diag = solve(
        v(1, 1).min(v(-1, -1)),
        v(-1, 1).min(v(1, -1)),
        std::f64::consts::SQRT_2,
    );
    axis.min(diag)
}

/// Straight-line distance in cells from each traversable cell to the nearest
/// source center, by exhaustive search. Sources are 0, other obstacles ∞.
pub fn exact_distance_oracle(tra: &TraversabilityMap, sources: &[Cell]) -> Result<DistanceField> {
    let is_source = source_mask(tra, sources)?;
    let g = tra.geometry();
    let value = (0..g.len())
        .map(|i| {
            let c = g.cell_at(i);
            if is_source[i] {
                0.0
            } else if !tra.is_traversable(c) {
                f64::INFINITY
            } else {
                sources
                    .iter()
                    .map(|s| (c.col as f64 - s.col as f64).hypot(c.row as f64 - s.row as f64))
                    .fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    Ok(DistanceField::new(*g, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridGeometry;

    fn open(w: usize, h: usize) -> TraversabilityMap {
        TraversabilityMap::from_cells(GridGeometry::new(0.0, 0.0, 1.0, w, h).unwrap(), vec![true; w * h])
            .unwrap()
    }

    #[test]
    fn boundary_and_first_ring() {
        let tra = open(7, 7);
        let src = [Cell::new(3, 3), Cell::new(4, 3)];
        let d = fmm_distance(&tra, &src).unwrap();
        for s in src {
            assert_eq!(d.get(s), 0.0);
        }
        assert_eq!(d.get(Cell::new(2, 3)), 1.0);
        assert_eq!(d.get(Cell::new(3, 4)), 1.0);
        assert_eq!(d.get(Cell::new(5, 3)), 1.0);
    }

    #[test]
    fn corner_of_l_shaped_source_is_still_one() {
        let tra = open(5, 5);
        let d = fmm_distance(&tra, &[Cell::new(1, 2), Cell::new(2, 1)]).unwrap();
        assert_eq!(d.get(Cell::new(2, 2)), 1.0);
    }

    #[test]
    fn walls_block_the_front() {
        let tra = TraversabilityMap::from_ascii(
            "...#...
             ...#...",
        )
        .unwrap();
        let d = fmm_distance(&tra, &[Cell::new(0, 0)]).unwrap();
        assert!(d.get(Cell::new(3, 0)).is_infinite());
        assert!(d.get(Cell::new(6, 1)).is_infinite());
        assert!(d.get(Cell::new(2, 1)).is_finite());
        assert!(matches!(fmm_distance(&tra, &[]), Err(Error::EmptySources)));
    }

    #[test]
    fn oracle_three_four_five() {
        let tra = open(6, 6);
        let d = exact_distance_oracle(&tra, &[Cell::new(0, 0)]).unwrap();
        assert_eq!(d.get(Cell::new(3, 4)), 5.0);
        assert_eq!(d.get(Cell::new(0, 0)), 0.0);
    }

    #[test]
    fn straight_line_front_is_exact() {
        let tra = open(20, 1);
        let d = fmm_distance(&tra, &[Cell::new(0, 0)]).unwrap();
        for c in 0..20 {
            assert_eq!(d.get(Cell::new(c, 0)), c as f64);
        }
    }
}
