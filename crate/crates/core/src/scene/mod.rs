//! Annotated indoor scenes: points grouped into named rooms.
//!
//! Scenes come from three places: an S3DIS-style area directory
//! ([`parse_s3dis_area`]), the portable `PANAV-SCENE v1` text format
//! ([`parse_scene_file`] / [`write_scene_file`]) and the seeded office
//! generator ([`generate_synthetic_world`]).

mod s3dis;
mod scene_file;
mod synthetic;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use s3dis::parse_s3dis_area;
pub use scene_file::{parse_scene_file, read_scene, write_scene, write_scene_file};
pub use synthetic::{generate_synthetic_world, LayoutParams, Topology};

/// Object class attached to a point by the dataset annotations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemanticClass {
    Ceiling,
    Floor,
    Wall,
    Beam,
    Column,
    Window,
    Door,
    Table,
    Chair,
    Sofa,
    Bookcase,
    Board,
    Clutter,
    Stairs,
    Other(String),
}

impl SemanticClass {
    pub fn as_str(&self) -> &str {
        match self {
            SemanticClass::Ceiling => "ceiling",
            SemanticClass::Floor => "floor",
            SemanticClass::Wall => "wall",
            SemanticClass::Beam => "beam",
            SemanticClass::Column => "column",
            SemanticClass::Window => "window",
            SemanticClass::Door => "door",
            SemanticClass::Table => "table",
            SemanticClass::Chair => "chair",
            SemanticClass::Sofa => "sofa",
            SemanticClass::Bookcase => "bookcase",
            SemanticClass::Board => "board",
            SemanticClass::Clutter => "clutter",
            SemanticClass::Stairs => "stairs",
            SemanticClass::Other(s) => s,
        }
    }

    /// Class names are single whitespace-free tokens so they survive the
    /// line-oriented scene format.
    pub fn parse_token(token: &str) -> Option<Self> {
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return None;
        }
        Some(match token.to_ascii_lowercase().as_str() {
            "ceiling" => SemanticClass::Ceiling,
            "floor" => SemanticClass::Floor,
            "wall" => SemanticClass::Wall,
            "beam" => SemanticClass::Beam,
            "column" => SemanticClass::Column,
            "window" => SemanticClass::Window,
            "door" => SemanticClass::Door,
            "table" => SemanticClass::Table,
            "chair" => SemanticClass::Chair,
            "sofa" => SemanticClass::Sofa,
            "bookcase" => SemanticClass::Bookcase,
            "board" => SemanticClass::Board,
            "clutter" => SemanticClass::Clutter,
            "stairs" => SemanticClass::Stairs,
            _ => SemanticClass::Other(token.to_string()),
        })
    }
}

impl fmt::Display for SemanticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub semantic_class: Option<SemanticClass>,
}

impl LabeledPoint {
    pub fn new(x: f64, y: f64, z: f64, rgb: [u8; 3]) -> Self {
        LabeledPoint {
            x,
            y,
            z,
            r: rgb[0],
            g: rgb[1],
            b: rgb[2],
            semantic_class: None,
        }
    }

    pub fn with_class(mut self, class: SemanticClass) -> Self {
        self.semantic_class = Some(class);
        self
    }

    pub fn rgb(&self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn is_ceiling(&self) -> bool {
        self.semantic_class == Some(SemanticClass::Ceiling)
    }
}

/// Room category, derived from the room-name prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoomCategory {
    Office,
    Hallway,
    Conference,
    Lobby,
    Bathroom,
    Storage,
    Other,
}

impl RoomCategory {
    pub const ALL: [RoomCategory; 7] = [
        RoomCategory::Office,
        RoomCategory::Hallway,
        RoomCategory::Conference,
        RoomCategory::Lobby,
        RoomCategory::Bathroom,
        RoomCategory::Storage,
        RoomCategory::Other,
    ];

    /// `"hallway_2"` is a hallway, `"WC_1"` a bathroom, `"pantry_1"` other.
    pub fn from_room_name(name: &str) -> Self {
        let prefix = name.split('_').next().unwrap_or("").to_ascii_lowercase();
        match prefix.as_str() {
            "office" => RoomCategory::Office,
            "hallway" | "hallways" | "corridor" => RoomCategory::Hallway,
            "conference" | "conferenceroom" | "meeting" | "meetingroom" => {
                RoomCategory::Conference
            }
            "lobby" => RoomCategory::Lobby,
            "wc" | "bathroom" | "restroom" | "toilet" => RoomCategory::Bathroom,
            "storage" => RoomCategory::Storage,
            _ => RoomCategory::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RoomCategory::Office => "office",
            RoomCategory::Hallway => "hallway",
            RoomCategory::Conference => "conference",
            RoomCategory::Lobby => "lobby",
            RoomCategory::Bathroom => "bathroom",
            RoomCategory::Storage => "storage",
            RoomCategory::Other => "other",
        }
    }
}

impl fmt::Display for RoomCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RoomCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RoomCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown room category `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    name: String,
    category: RoomCategory,
    points: Vec<LabeledPoint>,
}

impl Room {
    /// Builds a room whose category follows from its name.
    pub fn new(name: impl Into<String>, points: Vec<LabeledPoint>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::MalformedScene(format!(
                "room name `{name}` must be a non-empty token"
            )));
        }
        if points.is_empty() {
            return Err(Error::EmptyRoom(name));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::MalformedScene(format!(
                "room {name}: non-finite point ({}, {}, {})",
                p.x, p.y, p.z
            )));
        }
        let category = RoomCategory::from_room_name(&name);
        Ok(Room {
            name,
            category,
            points,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn category(&self) -> RoomCategory {
        self.category
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn is_hallway(&self) -> bool {
        self.category == RoomCategory::Hallway
    }

    /// Axis-aligned bounds as `([min_x, min_y, min_z], [max_x, max_y, max_z])`.
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.points {
            for (axis, v) in [p.x, p.y, p.z].into_iter().enumerate() {
                lo[axis] = lo[axis].min(v);
                hi[axis] = hi[axis].max(v);
            }
        }
        (lo, hi)
    }

    pub fn xy_centroid(&self) -> (f64, f64) {
        let n = self.points.len() as f64;
        let (sx, sy) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        (sx / n, sy / n)
    }
}

/// One scanned area: a set of uniquely named rooms, kept sorted by name.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSet {
    area_name: String,
    rooms: Vec<Room>,
}

impl SceneSet {
    pub fn new(area_name: impl Into<String>, mut rooms: Vec<Room>) -> Result<Self> {
        rooms.sort_by(|a, b| a.name.cmp(&b.name));
        if let Some(w) = rooms.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(Error::MalformedScene(format!(
                "duplicate room name `{}`",
                w[0].name
            )));
        }
        Ok(SceneSet {
            area_name: area_name.into(),
            rooms,
        })
    }

    pub fn area_name(&self) -> &str {
        &self.area_name
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn room(&self, name: &str) -> Option<&Room> {
        self.rooms
            .binary_search_by(|r| r.name.as_str().cmp(name))
            .ok()
            .map(|i| &self.rooms[i])
    }

    pub fn point_count(&self) -> usize {
        self.rooms.iter().map(|r| r.points.len()).sum()
    }

    /// Points in room-name-then-file order.
    pub fn points(&self) -> impl Iterator<Item = &LabeledPoint> {
        self.rooms.iter().flat_map(|r| r.points.iter())
    }

    pub fn categories(&self) -> BTreeSet<RoomCategory> {
        self.rooms.iter().map(|r| r.category).collect()
    }

    pub fn has_semantic_labels(&self) -> bool {
        self.points().any(|p| p.semantic_class.is_some())
    }
}

/// One navigation task: instruction plus start and goal rooms within a scene.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Episode {
    pub area_name: String,
    pub instruction: String,
    pub start_room: String,
    pub goal_room: String,
}

impl Episode {
    pub fn new(
        scene: &SceneSet,
        instruction: impl Into<String>,
        start_room: impl Into<String>,
        goal_room: impl Into<String>,
    ) -> Result<Self> {
        let instruction = instruction.into();
        let start_room = start_room.into();
        let goal_room = goal_room.into();
        if instruction.trim().is_empty() {
            return Err(Error::InvalidParameter("episode instruction is empty".into()));
        }
        for room in [&start_room, &goal_room] {
            if scene.room(room).is_none() {
                return Err(Error::UnknownRoom(room.clone()));
            }
        }
        Ok(Episode {
            area_name: scene.area_name.clone(),
            instruction,
            start_room,
            goal_room,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64) -> LabeledPoint {
        LabeledPoint::new(x, 0.0, 0.0, [1, 2, 3])
    }

    #[test]
    fn category_from_prefix() {
        assert_eq!(RoomCategory::from_room_name("hallway_2"), RoomCategory::Hallway);
        assert_eq!(RoomCategory::from_room_name("WC_1"), RoomCategory::Bathroom);
        assert_eq!(
            RoomCategory::from_room_name("conferenceRoom_1"),
            RoomCategory::Conference
        );
        assert_eq!(RoomCategory::from_room_name("pantry_1"), RoomCategory::Other);
        assert_eq!(RoomCategory::from_room_name("office"), RoomCategory::Office);
    }

    #[test]
    fn rooms_sorted_and_unique() {
        let rooms = vec![
            Room::new("office_2", vec![pt(0.0)]).unwrap(),
            Room::new("hallway_1", vec![pt(1.0)]).unwrap(),
        ];
        let scene = SceneSet::new("a", rooms).unwrap();
        assert_eq!(scene.rooms()[0].name(), "hallway_1");
        assert!(scene.room("office_2").is_some());

        let dup = vec![
            Room::new("office_1", vec![pt(0.0)]).unwrap(),
            Room::new("office_1", vec![pt(1.0)]).unwrap(),
        ];
        assert!(matches!(
            SceneSet::new("a", dup),
            Err(Error::MalformedScene(_))
        ));
    }

    #[test]
    fn empty_room_rejected() {
        assert!(matches!(Room::new("office_1", vec![]), Err(Error::EmptyRoom(_))));
        assert!(Room::new("", vec![pt(0.0)]).is_err());
    }

    #[test]
    fn episode_checks_rooms() {
        let scene = SceneSet::new(
            "a",
            vec![
                Room::new("office_1", vec![pt(0.0)]).unwrap(),
                Room::new("hallway_1", vec![pt(1.0)]).unwrap(),
            ],
        )
        .unwrap();
        assert!(Episode::new(&scene, "go", "office_1", "hallway_1").is_ok());
        assert!(matches!(
            Episode::new(&scene, "go", "office_1", "office_9"),
            Err(Error::UnknownRoom(r)) if r == "office_9"
        ));
        assert!(Episode::new(&scene, "  ", "office_1", "hallway_1").is_err());
    }
}
