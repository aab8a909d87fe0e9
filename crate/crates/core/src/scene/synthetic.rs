//! Seeded office-floor generator.
//!
//! Worlds are drawn on a design raster whose cell size equals the point
//! spacing. Every room is a union of axis-aligned rectangles; a room cell
//! touching anything other than its own room becomes a wall cell, except at
//! doors and where two hallway segments meet. Each floor cell yields a floor
//! point and a ceiling point, each wall cell a vertical stack of wall points,
//! and furniture adds points inside the robot's obstacle height band.
//!
//! Loop layout (y grows upwards):
//!
//! ```text
//!            [ north row: offices / conference rooms ]
//!  [office_1][=========== north corridor ============][office_2]
//!  [        ][W]            (unscanned core)       [E][        ]
//!            [=========== south corridor ============]
//!            [ south row: bathrooms / storage        ]
//! ```
//!
//! `office_1` and `office_2` open onto the west and east connectors, so the
//! two of them are joined by a short route past the north offices and a
//! longer one along the south corridor.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LabeledPoint, Room, RoomCategory, SceneSet, SemanticClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// One straight corridor with rooms on both sides.
    Linear,
    /// A rectangular corridor ring.
    Loop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutParams {
    pub offices: usize,
    pub conference_rooms: usize,
    pub bathrooms: usize,
    pub storage_rooms: usize,
    pub hallways: usize,
    pub topology: Topology,
    /// Meters.
    pub corridor_width: f64,
    pub room_width: f64,
    pub room_depth: f64,
    /// Length of the connectors joining the two long corridors of a loop.
    pub ring_height: f64,
    pub wall_height: f64,
    pub door_width: f64,
    pub point_spacing: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            offices: 8,
            conference_rooms: 1,
            bathrooms: 1,
            storage_rooms: 3,
            hallways: 4,
            topology: Topology::Loop,
            corridor_width: 2.0,
            room_width: 4.0,
            room_depth: 4.0,
            ring_height: 8.0,
            wall_height: 3.0,
            door_width: 1.0,
            point_spacing: 0.05,
        }
    }
}

impl LayoutParams {
    /// Start and goal rooms the layout is built around.
    pub fn endpoint_rooms(&self) -> (String, String) {
        ("office_1".to_string(), "office_2".to_string())
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidLayout(m.to_string()));
        if self.hallways == 0 {
            return bad("at least one hallway is required");
        }
        let others = self.offices + self.conference_rooms + self.bathrooms + self.storage_rooms;
        if others < 2 {
            return bad("at least two non-hallway rooms are required");
        }
        if self.offices < 2 {
            return bad("the start and goal offices require at least two offices");
        }
        if self.topology == Topology::Loop && self.hallways < 2 {
            return bad("a loop needs at least two hallway segments");
        }
        let s = self.point_spacing;
        if !(s > 0.0 && s <= 0.5) {
            return bad("point_spacing must lie in (0, 0.5] m");
        }
        for (name, v) in [
            ("corridor_width", self.corridor_width),
            ("room_width", self.room_width),
            ("room_depth", self.room_depth),
            ("ring_height", self.ring_height),
            ("wall_height", self.wall_height),
            ("door_width", self.door_width),
        ] {
            if !(v.is_finite() && v >= 4.0 * s) {
                return Err(Error::InvalidLayout(format!(
                    "{name} = {v} must be finite and span at least four point spacings"
                )));
            }
        }
        if self.door_width + 4.0 * s > self.room_width.min(self.room_depth) {
            return bad("door_width must fit within a room wall");
        }
        if self.wall_height < 2.0 {
            return bad("wall_height must be at least 2 m");
        }
        if self.topology == Topology::Loop && self.ring_height < 2.0 * self.door_width {
            return bad("ring_height too small for the wing doors");
        }
        Ok(())
    }
}

/// Half-open cell rectangle on the design raster.
#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: i64,
    y0: i64,
    x1: i64,
    y1: i64,
}

impl Rect {
    fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Rect { x0, y0, x1, y1 }
    }
    fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
    fn width(&self) -> i64 {
        self.x1 - self.x0
    }
    fn height(&self) -> i64 {
        self.y1 - self.y0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Side {
    North,
    South,
    East,
    West,
}

struct Furniture {
    rect: Rect,
    heights: Vec<f64>,
    class: SemanticClass,
    color: [u8; 3],
}

struct PlanRoom {
    name: String,
    rects: Vec<Rect>,
    floor_color: [u8; 3],
    wall_color: [u8; 3],
    furniture: Vec<Furniture>,
}

impl PlanRoom {
    fn new(name: String, rects: Vec<Rect>, rng: &mut ChaCha8Rng) -> Self {
        let tint: i16 = rng.gen_range(-12..=12);
        let shade = |base: [u8; 3]| base.map(|c| (c as i16 + tint).clamp(0, 255) as u8);
        PlanRoom {
            name,
            rects,
            floor_color: shade([128, 118, 104]),
            wall_color: shade([206, 204, 196]),
            furniture: Vec::new(),
        }
    }

    fn is_hallway(&self) -> bool {
        RoomCategory::from_room_name(&self.name) == RoomCategory::Hallway
    }
}

/// Builds a deterministic office floor from `seed` and `params`.
pub fn generate_synthetic_world(seed: u64, params: &LayoutParams) -> Result<SceneSet> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan = match params.topology {
        Topology::Loop => loop_plan(params, &mut rng),
        Topology::Linear => linear_plan(params, &mut rng),
    };
    rasterize(&plan, params, seed)
}

struct Plan {
    rooms: Vec<PlanRoom>,
    /// Door cells, exempt from wall status in both rooms.
    doors: Vec<Rect>,
}

fn cells(meters: f64, spacing: f64) -> i64 {
    (meters / spacing).round().max(1.0) as i64
}

fn jitter(base: i64, frac: f64, rng: &mut ChaCha8Rng) -> i64 {
    let f: f64 = rng.gen_range(1.0 - frac..=1.0 + frac);
    ((base as f64) * f).round() as i64
}

/// Names of the non-endpoint rooms, shuffled for the given row.
fn row_names(prefix_counts: &[(&str, std::ops::Range<usize>)], rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut names: Vec<String> = prefix_counts
        .iter()
        .flat_map(|(prefix, range)| range.clone().map(move |i| format!("{prefix}_{i}")))
        .collect();
    names.shuffle(rng);
    names
}

/// Splits `[x0, x1)` into `n` near-equal consecutive spans.
fn split_span(x0: i64, x1: i64, n: usize) -> Vec<(i64, i64)> {
    let n = n.max(1) as i64;
    let len = x1 - x0;
    (0..n)
        .map(|i| (x0 + len * i / n, x0 + len * (i + 1) / n))
        .collect()
}

/// Lays rooms of jittered width side by side starting at `x0`; returns their
/// spans and the total width.
fn lay_row(count: usize, width: i64, rng: &mut ChaCha8Rng, x0: i64) -> (Vec<(i64, i64)>, i64) {
    let mut spans = Vec::with_capacity(count);
    let mut x = x0;
    for _ in 0..count {
        let w = jitter(width, 0.15, rng);
        spans.push((x, x + w));
        x += w;
    }
    (spans, x - x0)
}

fn door_along_x(room: &Rect, side: Side, dw: i64, rng: &mut ChaCha8Rng) -> Rect {
    let lo = room.x0 + 2;
    let hi = (room.x1 - 2 - dw).max(lo);
    let dx = rng.gen_range(lo..=hi);
    match side {
        Side::South => Rect::new(dx, room.y0 - 1, dx + dw, room.y0 + 1),
        Side::North => Rect::new(dx, room.y1 - 1, dx + dw, room.y1 + 1),
        _ => unreachable!("horizontal door on a vertical wall"),
    }
}

fn door_along_y(room: &Rect, side: Side, dw: i64) -> Rect {
    let dy = room.y0 + (room.height() - dw) / 2;
    match side {
        Side::West => Rect::new(room.x0 - 1, dy, room.x0 + 1, dy + dw),
        Side::East => Rect::new(room.x1 - 1, dy, room.x1 + 1, dy + dw),
        _ => unreachable!("vertical door on a horizontal wall"),
    }
}

/// Furniture placed against the wall opposite the door.
fn furnish(room: &mut PlanRoom, door_side: Side, p: &LayoutParams, rng: &mut ChaCha8Rng) {
    let s = p.point_spacing;
    let r = room.rects[0];
    let category = RoomCategory::from_room_name(&room.name);
    let back = match door_side {
        Side::North => Side::South,
        Side::South => Side::North,
        Side::East => Side::West,
        Side::West => Side::East,
    };
    // Rectangle of `along` x `deep` cells hugging the back wall, inset by one wall cell.
    let against_back = |along: i64, deep: i64, rng: &mut ChaCha8Rng| -> Rect {
        match back {
            Side::North | Side::South => {
                let along = along.min(r.width() - 4);
                let x = rng.gen_range(r.x0 + 2..=(r.x1 - 2 - along).max(r.x0 + 2));
                if back == Side::North {
                    Rect::new(x, r.y1 - 1 - deep, x + along, r.y1 - 1)
                } else {
                    Rect::new(x, r.y0 + 1, x + along, r.y0 + 1 + deep)
                }
            }
            Side::East | Side::West => {
                let along = along.min(r.height() - 4);
                let y = rng.gen_range(r.y0 + 2..=(r.y1 - 2 - along).max(r.y0 + 2));
                if back == Side::East {
                    Rect::new(r.x1 - 1 - deep, y, r.x1 - 1, y + along)
                } else {
                    Rect::new(r.x0 + 1, y, r.x0 + 1 + deep, y + along)
                }
            }
        }
    };
    let piece = match category {
        RoomCategory::Office => Furniture {
            rect: against_back(cells(1.4, s), cells(0.7, s), rng),
            heights: vec![0.72, 0.75],
            class: SemanticClass::Table,
            color: [139, 96, 58],
        },
        RoomCategory::Storage => Furniture {
            rect: against_back(r.width().max(r.height()) / 2, cells(0.4, s), rng),
            heights: vec![0.5, 1.0, 1.5, 2.0],
            class: SemanticClass::Bookcase,
            color: [101, 78, 60],
        },
        RoomCategory::Bathroom => Furniture {
            rect: against_back(cells(0.6, s), cells(0.6, s), rng),
            heights: vec![0.9],
            class: SemanticClass::Clutter,
            color: [235, 235, 240],
        },
        RoomCategory::Conference => {
            let (w, h) = (r.width() / 2, r.height() / 3);
            let x = r.x0 + (r.width() - w) / 2;
            let y = r.y0 + (r.height() - h) / 2;
            Furniture {
                rect: Rect::new(x, y, x + w, y + h),
                heights: vec![0.74, 0.76],
                class: SemanticClass::Table,
                color: [92, 64, 40],
            }
        }
        _ => return,
    };
    room.furniture.push(piece);
}

fn loop_plan(p: &LayoutParams, rng: &mut ChaCha8Rng) -> Plan {
    let s = p.point_spacing;
    let cw = cells(p.corridor_width, s);
    let rw = cells(p.room_width, s);
    let od = cells(p.room_depth, s);
    let dw = cells(p.door_width, s);
    let ring = jitter(cells(p.ring_height, s), 0.2, rng);

    let north_names = row_names(
        &[
            ("office", 3..p.offices + 1),
            ("conferenceRoom", 1..p.conference_rooms + 1),
        ],
        rng,
    );
    let south_names = row_names(
        &[("WC", 1..p.bathrooms + 1), ("storage", 1..p.storage_rooms + 1)],
        rng,
    );

    let x_ring = od;
    let (north_spans, north_len) = lay_row(north_names.len(), rw, rng, x_ring);
    let lx = north_len.max(4 * cw + 2 * dw).max(south_names.len() as i64 * (dw + 4));

    let y_south_corr = od;
    let y_conn = od + cw;
    let y_north_corr = y_conn + ring;
    let y_north_row = y_north_corr + cw;

    let north = Rect::new(x_ring, y_north_corr, x_ring + lx, y_north_row);
    let south = Rect::new(x_ring, y_south_corr, x_ring + lx, y_conn);
    let west = Rect::new(x_ring, y_conn, x_ring + cw, y_north_corr);
    let east = Rect::new(x_ring + lx - cw, y_conn, x_ring + lx, y_north_corr);

    // Corridor pieces in perimeter order: north..., east, south..., west.
    let h = p.hallways;
    let mut segments: Vec<Vec<Rect>> = match h {
        2 => vec![vec![north], vec![east, south, west]],
        3 => vec![vec![north], vec![east], vec![south, west]],
        _ => {
            let n_north = (h - 2).div_ceil(2);
            let n_south = (h - 2) / 2;
            let mut segs: Vec<Vec<Rect>> = split_span(north.x0, north.x1, n_north)
                .into_iter()
                .map(|(a, b)| vec![Rect::new(a, north.y0, b, north.y1)])
                .collect();
            segs.push(vec![east]);
            segs.extend(
                split_span(south.x0, south.x1, n_south)
                    .into_iter()
                    .rev()
                    .map(|(a, b)| vec![Rect::new(a, south.y0, b, south.y1)]),
            );
            segs.push(vec![west]);
            segs
        }
    };

    let mut rooms = Vec::new();
    let mut doors = Vec::new();
    for (i, rects) in segments.drain(..).enumerate() {
        rooms.push(PlanRoom::new(format!("hallway_{}", i + 1), rects, rng));
    }

    for (name, (a, b)) in north_names.into_iter().zip(north_spans) {
        let rect = Rect::new(a, y_north_row, b, y_north_row + od);
        doors.push(door_along_x(&rect, Side::South, dw, rng));
        let mut room = PlanRoom::new(name, vec![rect], rng);
        furnish(&mut room, Side::South, p, rng);
        rooms.push(room);
    }

    if !south_names.is_empty() {
        let spans = split_span(x_ring, x_ring + lx, south_names.len());
        for (name, (a, b)) in south_names.into_iter().zip(spans) {
            let rect = Rect::new(a, 0, b, y_south_corr);
            doors.push(door_along_x(&rect, Side::North, dw, rng));
            let mut room = PlanRoom::new(name, vec![rect], rng);
            furnish(&mut room, Side::North, p, rng);
            rooms.push(room);
        }
    }

    // Wings hang off the connectors just below the north corridor.
    let wing_w = jitter(rw, 0.15, rng).min(ring);
    let wing_y0 = (y_north_corr - wing_w).max(y_conn);
    let west_wing = Rect::new(0, wing_y0, od, y_north_corr);
    let east_wing = Rect::new(x_ring + lx, wing_y0, x_ring + lx + od, y_north_corr);
    for (name, rect, side) in [
        ("office_1", west_wing, Side::East),
        ("office_2", east_wing, Side::West),
    ] {
        doors.push(door_along_y(&rect, side, dw));
        let mut room = PlanRoom::new(name.to_string(), vec![rect], rng);
        furnish(&mut room, side, p, rng);
        rooms.push(room);
    }

    Plan { rooms, doors }
}

fn linear_plan(p: &LayoutParams, rng: &mut ChaCha8Rng) -> Plan {
    let s = p.point_spacing;
    let cw = cells(p.corridor_width, s);
    let rw = cells(p.room_width, s);
    let od = cells(p.room_depth, s);
    let dw = cells(p.door_width, s);

    let mut north_names = vec!["office_1".to_string()];
    north_names.extend(row_names(
        &[
            ("office", 3..p.offices + 1),
            ("conferenceRoom", 1..p.conference_rooms + 1),
        ],
        rng,
    ));
    north_names.push("office_2".to_string());
    let south_names = row_names(
        &[("WC", 1..p.bathrooms + 1), ("storage", 1..p.storage_rooms + 1)],
        rng,
    );

    let (north_spans, north_len) = lay_row(north_names.len(), rw, rng, 0);
    let lx = north_len.max(p.hallways as i64 * (dw + 4));
    let y_corr = od;
    let y_north = od + cw;

    let mut rooms = Vec::new();
    let mut doors = Vec::new();
    for (i, (a, b)) in split_span(0, lx, p.hallways).into_iter().enumerate() {
        rooms.push(PlanRoom::new(
            format!("hallway_{}", i + 1),
            vec![Rect::new(a, y_corr, b, y_north)],
            rng,
        ));
    }
    for (name, (a, b)) in north_names.into_iter().zip(north_spans) {
        let rect = Rect::new(a, y_north, b, y_north + od);
        doors.push(door_along_x(&rect, Side::South, dw, rng));
        let mut room = PlanRoom::new(name, vec![rect], rng);
        furnish(&mut room, Side::South, p, rng);
        rooms.push(room);
    }
    if !south_names.is_empty() {
        for (name, (a, b)) in south_names
            .into_iter()
            .zip(split_span(0, lx, p.bathrooms + p.storage_rooms))
        {
            let rect = Rect::new(a, 0, b, y_corr);
            doors.push(door_along_x(&rect, Side::North, dw, rng));
            let mut room = PlanRoom::new(name, vec![rect], rng);
            furnish(&mut room, Side::North, p, rng);
            rooms.push(room);
        }
    }
    Plan { rooms, doors }
}

const NO_ROOM: u16 = u16::MAX;

fn rasterize(plan: &Plan, p: &LayoutParams, seed: u64) -> Result<SceneSet> {
    let s = p.point_spacing;
    let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for r in plan.rooms.iter().flat_map(|r| &r.rects) {
        x0 = x0.min(r.x0);
        y0 = y0.min(r.y0);
        x1 = x1.max(r.x1);
        y1 = y1.max(r.y1);
    }
    let (w, h) = ((x1 - x0) as usize, (y1 - y0) as usize);
    let mut label = vec![NO_ROOM; w * h];
    for (idx, room) in plan.rooms.iter().enumerate() {
        for r in &room.rects {
            for y in r.y0..r.y1 {
                for x in r.x0..r.x1 {
                    label[(y - y0) as usize * w + (x - x0) as usize] = idx as u16;
                }
            }
        }
    }
    let at = |x: i64, y: i64| -> u16 {
        if x < x0 || x >= x1 || y < y0 || y >= y1 {
            NO_ROOM
        } else {
            label[(y - y0) as usize * w + (x - x0) as usize]
        }
    };
    let in_door = |x: i64, y: i64| plan.doors.iter().any(|d| d.contains(x, y));

    let wall_top = p.wall_height - 0.3;
    let wall_levels: Vec<f64> = (1..)
        .map(|k| 0.5 * k as f64)
        .take_while(|z| *z <= wall_top + 1e-9)
        .collect();
    let ceiling_rgb = [231, 229, 222];

    let mut points: Vec<Vec<LabeledPoint>> = plan.rooms.iter().map(|_| Vec::new()).collect();
    for y in y0..y1 {
        for x in x0..x1 {
            let idx = at(x, y);
            if idx == NO_ROOM {
                continue;
            }
            let room = &plan.rooms[idx as usize];
            let wall = !in_door(x, y)
                && (-1..=1).any(|dy| {
                    (-1..=1).any(|dx| {
                        let other = at(x + dx, y + dy);
                        other != idx
                            && !(other != NO_ROOM
                                && room.is_hallway()
                                && plan.rooms[other as usize].is_hallway())
                    })
                });
            let (px, py) = ((x as f64 + 0.5) * s, (y as f64 + 0.5) * s);
            let out = &mut points[idx as usize];
            if wall {
                for &z in &wall_levels {
                    out.push(
                        LabeledPoint::new(px, py, z, room.wall_color).with_class(SemanticClass::Wall),
                    );
                }
            } else {
                out.push(
                    LabeledPoint::new(px, py, 0.0, room.floor_color).with_class(SemanticClass::Floor),
                );
                for f in room.furniture.iter().filter(|f| f.rect.contains(x, y)) {
                    for &z in &f.heights {
                        out.push(LabeledPoint::new(px, py, z, f.color).with_class(f.class.clone()));
                    }
                }
            }
            out.push(
                LabeledPoint::new(px, py, p.wall_height, ceiling_rgb)
                    .with_class(SemanticClass::Ceiling),
            );
        }
    }

    let rooms = plan
        .rooms
        .iter()
        .zip(points)
        .map(|(room, pts)| Room::new(room.name.clone(), pts))
        .collect::<Result<Vec<_>>>()?;
    SceneSet::new(format!("synthetic_{seed}"), rooms)
}
