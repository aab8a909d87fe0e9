use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Cell, GridGeometry};
use crate::error::{Error, Result};
use crate::scene::{LabeledPoint, RoomCategory, SceneSet};

/// How ceiling points are removed before projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CeilingPolicy {
    /// Labels when the scene carries any, otherwise a height cut at 0.85.
    Auto,
    ByLabel,
    /// Drop points above `floor_z + fraction * (max_z - floor_z)`.
    ByHeightCut(f64),
}

impl CeilingPolicy {
    pub const DEFAULT_HEIGHT_CUT: f64 = 0.85;

    pub fn resolve(self, scene: &SceneSet) -> CeilingPolicy {
        match self {
            CeilingPolicy::Auto if scene.has_semantic_labels() => CeilingPolicy::ByLabel,
            CeilingPolicy::Auto => CeilingPolicy::ByHeightCut(Self::DEFAULT_HEIGHT_CUT),
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MapParams {
    pub resolution: f64,
    pub ceiling_policy: CeilingPolicy,
    /// Height above floor that still counts as floor.
    pub floor_band: f64,
    /// `[low, high]` above floor; any point here blocks the cell.
    pub obstacle_band: [f64; 2],
}

impl Default for MapParams {
    fn default() -> Self {
        MapParams {
            resolution: 0.05,
            ceiling_policy: CeilingPolicy::Auto,
            floor_band: 0.2,
            obstacle_band: [0.3, 1.8],
        }
    }
}

/// 1st percentile of every point's z (lower nearest rank).
pub fn floor_height(scene: &SceneSet) -> f64 {
    let mut zs: Vec<f64> = scene.points().map(|p| p.z).collect();
    if zs.is_empty() {
        return 0.0;
    }
    let k = ((zs.len() - 1) as f64 * 0.01).floor() as usize;
    let (_, z, _) = zs.select_nth_unstable_by(k, f64::total_cmp);
    *z
}

/// Keeps a point iff the resolved ceiling policy retains it.
struct Retention {
    policy: CeilingPolicy,
    cut: f64,
}

impl Retention {
    fn new(scene: &SceneSet, policy: CeilingPolicy, floor_z: f64) -> Self {
        let policy = policy.resolve(scene);
        let cut = match policy {
            CeilingPolicy::ByHeightCut(f) => {
                let max_z = scene.points().map(|p| p.z).fold(f64::NEG_INFINITY, f64::max);
                floor_z + f * (max_z - floor_z)
            }
            _ => f64::INFINITY,
        };
        Retention { policy, cut }
    }

    fn keeps(&self, p: &LabeledPoint) -> bool {
        match self.policy {
            CeilingPolicy::ByLabel => !p.is_ceiling(),
            _ => p.z <= self.cut,
        }
    }
}

fn check_resolution(resolution: f64) -> Result<()> {
    if resolution > 0.005 && resolution <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "resolution {resolution} outside (0.005, 1.0] m"
        )))
    }
}

fn retained_geometry(scene: &SceneSet, keep: &Retention, resolution: f64) -> Result<GridGeometry> {
    let mut any = false;
    let pts = scene.points().filter(|p| keep.keeps(p)).map(|p| {
        any = true;
        (p.x, p.y)
    });
    let geometry = GridGeometry::bounding(pts, resolution);
    if !any {
        return Err(Error::EmptyAfterFilter);
    }
    geometry
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopCell {
    pub height: f64,
    pub color: [u8; 3],
}

/// Highest retained point per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TopViewMap {
    geometry: GridGeometry,
    cells: Vec<Option<TopCell>>,
}

impl TopViewMap {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn get(&self, cell: Cell) -> Option<TopCell> {
        self.cells[self.geometry.index(cell)]
    }

    pub fn is_occupied(&self, cell: Cell) -> bool {
        self.get(cell).is_some()
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }
}

pub fn build_top_view(
    scene: &SceneSet,
    resolution: f64,
    policy: CeilingPolicy,
) -> Result<TopViewMap> {
    check_resolution(resolution)?;
    if scene.point_count() == 0 {
        return Err(Error::InvalidParameter("scene has no points".into()));
    }
    let keep = Retention::new(scene, policy, floor_height(scene));
    let geometry = retained_geometry(scene, &keep, resolution)?;
    let mut cells: Vec<Option<TopCell>> = vec![None; geometry.len()];
    for p in scene.points().filter(|p| keep.keeps(p)) {
        let cell = geometry
            .world_to_cell(p.x, p.y)
            .expect("retained point inside its own bounding geometry");
        let slot = &mut cells[geometry.index(cell)];
        // Strictly higher wins, so ties keep the earlier point.
        if slot.is_none_or(|c| p.z > c.height) {
            *slot = Some(TopCell {
                height: p.z,
                color: p.rgb(),
            });
        }
    }
    Ok(TopViewMap { geometry, cells })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraversabilityMap {
    geometry: GridGeometry,
    traversable: Vec<bool>,
}

impl TraversabilityMap {
    pub fn from_cells(geometry: GridGeometry, traversable: Vec<bool>) -> Result<Self> {
        if traversable.len() != geometry.len() {
            return Err(Error::GeometryMismatch(format!(
                "{} cells for a {}x{} grid",
                traversable.len(),
                geometry.width,
                geometry.height
            )));
        }
        Ok(TraversabilityMap {
            geometry,
            traversable,
        })
    }

    /// Parses rows of `.` (traversable) and `#` (obstacle); the first line
    /// is the top row (highest `row` index). Handy for fixtures.
    pub fn from_ascii(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let height = lines.len();
        let width = lines.first().map_or(0, |l| l.len());
        if lines.iter().any(|l| l.len() != width) {
            return Err(Error::InvalidParameter("ragged ascii grid".into()));
        }
        let geometry = GridGeometry::new(0.0, 0.0, 1.0, width, height)?;
        let mut traversable = vec![false; geometry.len()];
        for (i, line) in lines.iter().enumerate() {
            let row = height - 1 - i;
            for (col, ch) in line.chars().enumerate() {
                traversable[row * width + col] = match ch {
                    '.' => true,
                    '#' => false,
                    other => {
                        return Err(Error::InvalidParameter(format!("bad ascii cell `{other}`")))
                    }
                };
            }
        }
        Self::from_cells(geometry, traversable)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn is_traversable(&self, cell: Cell) -> bool {
        self.geometry.contains(cell) && self.traversable[self.geometry.index(cell)]
    }

    pub fn cells(&self) -> &[bool] {
        &self.traversable
    }

    pub fn traversable_count(&self) -> usize {
        self.traversable.iter().filter(|t| **t).count()
    }

    pub fn set(&mut self, cell: Cell, traversable: bool) {
        let i = self.geometry.index(cell);
        self.traversable[i] = traversable;
    }

    /// Marks every cell within `radius` cells (Euclidean, center to center)
    /// of an obstacle as an obstacle.
    pub fn inflated(&self, radius: usize) -> TraversabilityMap {
        if radius == 0 {
            return self.clone();
        }
        let g = self.geometry;
        let r = radius as isize;
        let offsets: Vec<(isize, isize)> = (-r..=r)
            .flat_map(|dr| (-r..=r).map(move |dc| (dc, dr)))
            .filter(|&(dc, dr)| dc * dc + dr * dr <= r * r)
            .collect();
        let mut out = self.traversable.clone();
        for cell in g.cells().filter(|&c| !self.is_traversable(c)) {
            for &(dc, dr) in &offsets {
                let (Some(col), Some(row)) = (
                    cell.col.checked_add_signed(dc),
                    cell.row.checked_add_signed(dr),
                ) else {
                    continue;
                };
                let n = Cell::new(col, row);
                if g.contains(n) {
                    out[g.index(n)] = false;
                }
            }
        }
        TraversabilityMap {
            geometry: g,
            traversable: out,
        }
    }
}

pub fn build_traversability(
    scene: &SceneSet,
    geometry: &GridGeometry,
    policy: CeilingPolicy,
    floor_band: f64,
    obstacle_band: [f64; 2],
) -> Result<TraversabilityMap> {
    if !(floor_band >= 0.0 && obstacle_band[0] <= obstacle_band[1]) {
        return Err(Error::InvalidParameter(format!(
            "floor_band {floor_band} / obstacle_band {obstacle_band:?}"
        )));
    }
    let floor_z = floor_height(scene);
    let keep = Retention::new(scene, policy, floor_z);
    retained_geometry(scene, &keep, geometry.resolution)?.ensure_same(geometry)?;

    let floor_top = floor_z + floor_band;
    let (lo, hi) = (floor_z + obstacle_band[0], floor_z + obstacle_band[1]);
    let mut has_floor = vec![false; geometry.len()];
    let mut blocked = vec![false; geometry.len()];
    for p in scene.points().filter(|p| keep.keeps(p)) {
        let Some(cell) = geometry.world_to_cell(p.x, p.y) else {
            continue;
        };
        let i = geometry.index(cell);
        if p.z <= floor_top {
            has_floor[i] = true;
        }
        if p.z >= lo && p.z <= hi {
            blocked[i] = true;
        }
    }
    let traversable = has_floor
        .iter()
        .zip(&blocked)
        .map(|(f, b)| *f && !*b)
        .collect();
    TraversabilityMap::from_cells(*geometry, traversable)
}

/// Cells claimed by rooms of the selected categories.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomMask {
    geometry: GridGeometry,
    room_names: Vec<String>,
    /// Per cell, indices into `room_names`.
    claims: Vec<Vec<u16>>,
}

impl RoomMask {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn is_masked(&self, cell: Cell) -> bool {
        !self.claims[self.geometry.index(cell)].is_empty()
    }

    pub fn claimants(&self, cell: Cell) -> impl Iterator<Item = &str> {
        self.claims[self.geometry.index(cell)]
            .iter()
            .map(|&i| self.room_names[i as usize].as_str())
    }

    pub fn masked_cells(&self) -> Vec<Cell> {
        self.claims
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(i, _)| self.geometry.cell_at(i))
            .collect()
    }
}

/// Points outside `geometry` are skipped; a geometry that no point of the
/// scene falls into is a mismatch.
pub fn build_room_mask(
    scene: &SceneSet,
    geometry: &GridGeometry,
    categories: &BTreeSet<RoomCategory>,
) -> Result<RoomMask> {
    if categories.is_empty() {
        return Err(Error::InvalidParameter("room mask needs at least one category".into()));
    }
    let mut room_names = Vec::new();
    let mut claims: Vec<Vec<u16>> = vec![Vec::new(); geometry.len()];
    let mut any_inside = false;
    for room in scene.rooms() {
        let selected = categories.contains(&room.category());
        let id = room_names.len() as u16;
        for p in room.points() {
            let Some(cell) = geometry.world_to_cell(p.x, p.y) else {
                continue;
            };
            any_inside = true;
            if selected {
                let slot = &mut claims[geometry.index(cell)];
                if slot.last() != Some(&id) {
                    slot.push(id);
                }
            }
        }
        if selected {
            room_names.push(room.name().to_string());
        }
    }
    if !any_inside {
        return Err(Error::GeometryMismatch(
            "no scene point falls inside the grid".into(),
        ));
    }
    Ok(RoomMask {
        geometry: *geometry,
        room_names,
        claims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Room, SemanticClass};
    use proptest::prelude::*;

    fn p(x: f64, y: f64, z: f64) -> LabeledPoint {
        LabeledPoint::new(x, y, z, [(z * 10.0) as u8, 0, 0])
    }

    fn scene(rooms: Vec<(&str, Vec<LabeledPoint>)>) -> SceneSet {
        SceneSet::new(
            "t",
            rooms
                .into_iter()
                .map(|(n, pts)| Room::new(n, pts).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn highest_point_wins() {
        let s = scene(vec![(
            "office_1",
            vec![p(0.05, 0.05, 0.1), p(0.05, 0.05, 2.5), p(0.05, 0.05, 1.0), p(1.0, 1.0, 0.0)],
        )]);
        let top = build_top_view(&s, 0.1, CeilingPolicy::ByHeightCut(1.0)).unwrap();
        let cell = top.geometry().world_to_cell(0.05, 0.05).unwrap();
        let c = top.get(cell).unwrap();
        assert_eq!(c.height, 2.5);
        assert_eq!(c.color, [25, 0, 0]);
    }

    #[test]
    fn tie_keeps_first_point_in_room_order() {
        let mut a = p(0.05, 0.05, 1.0);
        a.r = 1;
        let mut b = p(0.05, 0.05, 1.0);
        b.r = 2;
        let s = scene(vec![("office_2", vec![b]), ("office_1", vec![a, p(1.0, 1.0, 0.0)])]);
        let top = build_top_view(&s, 0.1, CeilingPolicy::ByHeightCut(1.0)).unwrap();
        let cell = top.geometry().world_to_cell(0.05, 0.05).unwrap();
        assert_eq!(top.get(cell).unwrap().color[0], 1);
    }

    #[test]
    fn all_ceiling_is_empty_after_filter() {
        let s = scene(vec![(
            "office_1",
            vec![p(0.0, 0.0, 3.0).with_class(SemanticClass::Ceiling)],
        )]);
        assert!(matches!(
            build_top_view(&s, 0.1, CeilingPolicy::ByLabel),
            Err(Error::EmptyAfterFilter)
        ));
    }

    #[test]
    fn height_cut_drops_top() {
        let mut pts: Vec<LabeledPoint> = (0..200).map(|i| p(i as f64 * 0.01, 0.0, 0.0)).collect();
        pts.push(p(0.5, 0.5, 3.0));
        pts.push(p(0.6, 0.5, 2.0));
        let s = scene(vec![("hallway_1", pts)]);
        let top = build_top_view(&s, 0.1, CeilingPolicy::Auto).unwrap();
        let g = top.geometry();
        assert!(g.world_to_cell(0.5, 0.5).map_or(true, |c| !top.is_occupied(c)));
        assert!(top.is_occupied(g.world_to_cell(0.6, 0.5).unwrap()));
    }

    fn trav_scene() -> SceneSet {
        scene(vec![(
            "hallway_1",
            vec![
                p(0.05, 0.05, 0.0),
                p(0.05, 0.05, 0.15),
                p(0.25, 0.05, 0.0),
                p(0.25, 0.05, 1.0),
                p(0.45, 0.05, 2.5),
                p(0.85, 0.05, 0.0),
            ],
        )])
    }

    #[test]
    fn traversability_rules() {
        let s = trav_scene();
        let policy = CeilingPolicy::ByHeightCut(1.0);
        let top = build_top_view(&s, 0.1, policy).unwrap();
        let g = *top.geometry();
        let tra = build_traversability(&s, &g, policy, 0.2, [0.3, 1.8]).unwrap();
        let at = |x| tra.is_traversable(g.world_to_cell(x, 0.05).unwrap());
        assert!(at(0.05), "floor-only cell");
        assert!(!at(0.25), "point inside obstacle band");
        assert!(!at(0.45), "no floor point");
        assert!(!at(0.65), "empty cell");
        assert!(at(0.85));
        for c in g.cells() {
            assert!(!tra.is_traversable(c) || top.is_occupied(c));
        }
    }

    #[test]
    fn traversability_rejects_foreign_geometry() {
        let s = trav_scene();
        let policy = CeilingPolicy::ByHeightCut(1.0);
        let g = GridGeometry::new(0.0, 0.0, 0.1, 4, 4).unwrap();
        assert!(matches!(
            build_traversability(&s, &g, policy, 0.2, [0.3, 1.8]),
            Err(Error::GeometryMismatch(_))
        ));
    }

    #[test]
    fn room_mask_by_category() {
        let s = scene(vec![
            ("office_1", vec![p(0.05, 0.05, 0.0)]),
            ("hallway_1", vec![p(0.55, 0.05, 0.0)]),
            ("conferenceRoom_1", vec![p(0.95, 0.05, 0.0)]),
        ]);
        let top = build_top_view(&s, 0.1, CeilingPolicy::ByLabel).unwrap();
        let g = *top.geometry();
        let cats: BTreeSet<_> = [RoomCategory::Office, RoomCategory::Conference].into();
        let mask = build_room_mask(&s, &g, &cats).unwrap();
        let at = |x| g.world_to_cell(x, 0.05).unwrap();
        assert!(mask.is_masked(at(0.05)));
        assert!(!mask.is_masked(at(0.55)));
        assert!(mask.is_masked(at(0.95)));
        assert_eq!(mask.claimants(at(0.05)).collect::<Vec<_>>(), vec!["office_1"]);

        let only_office: BTreeSet<_> = [RoomCategory::Office].into();
        let mask = build_room_mask(&s, &g, &only_office).unwrap();
        assert!(!mask.is_masked(at(0.95)));
        assert!(build_room_mask(&s, &g, &BTreeSet::new()).is_err());
    }

    #[test]
    fn inflation_grows_obstacles() {
        let tra = TraversabilityMap::from_ascii(
            ".....
             .....
             ..#..
             .....
             .....",
        )
        .unwrap();
        let inf = tra.inflated(1);
        assert_eq!(inf.traversable_count(), 25 - 5);
        assert_eq!(tra.inflated(0), tra);
    }

    fn arb_cloud() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
        prop::collection::vec((0.0f64..5.0, 0.0f64..5.0, prop::sample::select(vec![0.0, 0.1, 1.0, 2.0])), 5..80)
    }

    proptest! {
        #[test]
        fn shift_moves_origin_only(cloud in arb_cloud(), dx in -50i32..50, dy in -50i32..50) {
            let (dx, dy) = (dx as f64 * 0.37, dy as f64 * 0.53);
            let policy = CeilingPolicy::ByHeightCut(1.0);
            let build = |ox: f64, oy: f64| {
                let pts = cloud.iter().map(|&(x, y, z)| p(x + ox, y + oy, z)).collect();
                let s = scene(vec![("hallway_1", pts)]);
                let top = build_top_view(&s, 0.1, policy).unwrap();
                let tra = build_traversability(&s, top.geometry(), policy, 0.2, [0.3, 1.8]).unwrap();
                (top, tra)
            };
            let (t0, r0) = build(0.0, 0.0);
            let (t1, r1) = build(dx, dy);
            let (g0, g1) = (t0.geometry(), t1.geometry());
            prop_assert!((g1.origin_x - g0.origin_x - dx).abs() < 1e-9);
            prop_assert!((g1.origin_y - g0.origin_y - dy).abs() < 1e-9);
            prop_assert_eq!((g0.width, g0.height), (g1.width, g1.height));
            // Off-boundary points keep their cell under the shift.
            for &(x, y, _) in &cloud {
                let fx = (x - g0.origin_x) / 0.1;
                let fy = (y - g0.origin_y) / 0.1;
                if (fx - fx.round()).abs() < 1e-4 || (fy - fy.round()).abs() < 1e-4 {
                    continue;
                }
                let c0 = g0.world_to_cell(x, y).unwrap();
                let c1 = g1.world_to_cell(x + dx, y + dy).unwrap();
                prop_assert_eq!(c0, c1);
                prop_assert_eq!(r0.is_traversable(c0), r1.is_traversable(c1));
            }
        }

        #[test]
        fn obstacle_point_never_frees_a_cell(cloud in arb_cloud(), pick in any::<prop::sample::Index>(), z in 0.3f64..1.8) {
            let policy = CeilingPolicy::ByHeightCut(1.0);
            let pts: Vec<_> = cloud.iter().map(|&(x, y, z)| p(x, y, z)).collect();
            let (ex, ey, _) = cloud[pick.index(cloud.len())];
            let mut more = pts.clone();
            more.push(p(ex, ey, z));
            let s0 = scene(vec![("hallway_1", pts)]);
            let s1 = scene(vec![("hallway_1", more)]);
            let t0 = build_top_view(&s0, 0.1, policy).unwrap();
            let t1 = build_top_view(&s1, 0.1, policy).unwrap();
            let g = *t1.geometry();
            prop_assume!(t0.geometry() == &g);
            let r0 = build_traversability(&s0, &g, policy, 0.2, [0.3, 1.8]).unwrap();
            let r1 = build_traversability(&s1, &g, policy, 0.2, [0.3, 1.8]).unwrap();
            for c in g.cells() {
                prop_assert!(!r1.is_traversable(c) || r0.is_traversable(c));
            }
        }
    }
}
