//! Aligned 2D grids projected from a scene: the top-view map, the
//! traversability map and the room mask.

mod export;
mod maps;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use export::{
    read_geometry_sidecar, read_traversability_pgm, render_top_view_rgb, top_view_png,
    traversability_pgm, write_geometry_sidecar, write_top_view_png, write_traversability_pgm,
};
pub(crate) use export::encode_png;
pub use maps::{
    build_room_mask, build_top_view, build_traversability, floor_height, CeilingPolicy, MapParams,
    RoomMask, TopCell, TopViewMap, TraversabilityMap,
};

/// Grid cell; derived ordering is row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(col: usize, row: usize) -> Self {
        Cell { row, col }
    }

    /// Chebyshev adjacency, excluding the cell itself.
    pub fn is_8_adjacent(self, other: Cell) -> bool {
        let dc = self.col.abs_diff(other.col);
        let dr = self.row.abs_diff(other.row);
        dc <= 1 && dr <= 1 && (dc | dr) != 0
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.col, self.row)
    }
}

/// Placement of a grid in world coordinates. `(origin_x, origin_y)` is the
/// outer corner of cell `(0, 0)`; rows grow with `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub origin_x: f64,
    pub origin_y: f64,
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
}

/// Points sitting on a cell boundary within this many cells snap upward, so
/// lattice-aligned clouds land one point per cell regardless of rounding.
const BOUNDARY_EPS: f64 = 1e-6;

impl GridGeometry {
    pub fn new(origin_x: f64, origin_y: f64, resolution: f64, width: usize, height: usize) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidParameter(format!("resolution {resolution} must be > 0")));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("grid must be at least 1x1".into()));
        }
        if !(origin_x.is_finite() && origin_y.is_finite()) {
            return Err(Error::InvalidParameter("grid origin must be finite".into()));
        }
        Ok(GridGeometry {
            origin_x,
            origin_y,
            resolution,
            width,
            height,
        })
    }

    /// Tight bounds of the xy points, padded by one cell on every side.
    pub fn bounding(points: impl IntoIterator<Item = (f64, f64)>, resolution: f64) -> Result<Self> {
        let (mut lo_x, mut lo_y) = (f64::INFINITY, f64::INFINITY);
        let (mut hi_x, mut hi_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            lo_x = lo_x.min(x);
            lo_y = lo_y.min(y);
            hi_x = hi_x.max(x);
            hi_y = hi_y.max(y);
        }
        if !lo_x.is_finite() {
            return Err(Error::InvalidParameter("no points to bound".into()));
        }
        let span = |extent: f64| ((extent / resolution - BOUNDARY_EPS).ceil().max(0.0) as usize) + 2;
        GridGeometry::new(
            lo_x - resolution,
            lo_y - resolution,
            resolution,
            span(hi_x - lo_x),
            span(hi_y - lo_y),
        )
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(self.contains(cell));
        cell.row * self.width + cell.col
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width)
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.col < self.width && cell.row < self.height
    }

    pub fn world_to_cell(&self, x: f64, y: f64) -> Option<Cell> {
        let fx = ((x - self.origin_x) / self.resolution + BOUNDARY_EPS).floor();
        let fy = ((y - self.origin_y) / self.resolution + BOUNDARY_EPS).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some(Cell::new(fx as usize, fy as usize))
    }

    pub fn cell_center(&self, cell: Cell) -> (f64, f64) {
        (
            self.origin_x + (cell.col as f64 + 0.5) * self.resolution,
            self.origin_y + (cell.row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |row| (0..self.width).map(move |col| Cell::new(col, row)))
    }

    /// In-bounds 8-neighbours with their column/row offsets.
    pub fn neighbors8(&self, cell: Cell) -> impl Iterator<Item = (Cell, i8, i8)> + '_ {
        const OFFSETS: [(i8, i8); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        OFFSETS.iter().filter_map(move |&(dc, dr)| {
            let col = cell.col.checked_add_signed(dc as isize)?;
            let row = cell.row.checked_add_signed(dr as isize)?;
            let c = Cell::new(col, row);
            self.contains(c).then_some((c, dc, dr))
        })
    }

    pub fn neighbors4(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        self.neighbors8(cell)
            .filter(|&(_, dc, dr)| dc == 0 || dr == 0)
            .map(|(c, _, _)| c)
    }

    /// Field-wise equality, the pairing check between maps.
    pub fn ensure_same(&self, other: &GridGeometry) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GeometryMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_meter_room_at_decimeter() {
        // Independent recomputation: 10 m / 0.1 m = 100 cells, plus one pad cell per side.
        let pts = [(0.0, 0.0), (10.0, 10.0), (3.3, 7.1)];
        let g = GridGeometry::bounding(pts, 0.1).unwrap();
        assert_eq!((g.width, g.height), (102, 102));
        assert!((g.origin_x + 0.1).abs() < 1e-12);
        for (x, y) in pts {
            assert!(g.world_to_cell(x, y).is_some());
        }
        assert_eq!(g.world_to_cell(0.0, 0.0), Some(Cell::new(1, 1)));
    }

    #[test]
    fn lattice_points_one_per_cell() {
        let s = 0.05;
        let pts: Vec<(f64, f64)> = (0..40).map(|i| ((i as f64 + 0.5) * s, 0.25)).collect();
        let g = GridGeometry::bounding(pts.iter().copied(), s).unwrap();
        let cols: Vec<usize> = pts
            .iter()
            .map(|&(x, y)| g.world_to_cell(x, y).unwrap().col)
            .collect();
        assert_eq!(cols, (1..41).collect::<Vec<_>>());
    }

    #[test]
    fn row_major_order() {
        let mut cells = vec![Cell::new(5, 1), Cell::new(0, 2), Cell::new(9, 0)];
        cells.sort();
        assert_eq!(cells, vec![Cell::new(9, 0), Cell::new(5, 1), Cell::new(0, 2)]);
    }

    #[test]
    fn neighbors_at_corner() {
        let g = GridGeometry::new(0.0, 0.0, 1.0, 3, 3).unwrap();
        assert_eq!(g.neighbors8(Cell::new(0, 0)).count(), 3);
        assert_eq!(g.neighbors4(Cell::new(1, 1)).count(), 4);
        assert_eq!(g.neighbors8(Cell::new(1, 1)).count(), 8);
    }
}
