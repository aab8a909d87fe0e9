//! `PANAV-SCENE v1` text format.
//!
//! ```text
//! PANAV-SCENE v1
//! AREA <area_name>
//! ROOM <name> <category> <point_count>
//! <x> <y> <z> <r> <g> <b> [class]
//! ...
//! ```
//!
//! The `AREA` line is optional; without it the area takes the file stem.
//! Coordinates are written in shortest round-trip form, so write-then-read
//! reproduces the scene exactly.

use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::s3dis::parse_record;
use super::{Room, RoomCategory, SceneSet, SemanticClass};
use crate::error::{Error, Result};

const HEADER: &str = "PANAV-SCENE v1";

pub fn write_scene<W: Write>(scene: &SceneSet, mut out: W) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    writeln!(out, "AREA {}", scene.area_name())?;
    for room in scene.rooms() {
        writeln!(
            out,
            "ROOM {} {} {}",
            room.name(),
            room.category(),
            room.points().len()
        )?;
        for p in room.points() {
            write!(out, "{} {} {} {} {} {}", p.x, p.y, p.z, p.r, p.g, p.b)?;
            if let Some(class) = &p.semantic_class {
                write!(out, " {class}")?;
            }
            out.write_all(b"\n")?;
        }
    }
    out.flush()
}

pub fn write_scene_file(scene: &SceneSet, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_scene(scene, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn parse_scene_file(path: &Path) -> Result<SceneSet> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let default_area = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scene".into());
    read_scene(BufReader::new(file), &default_area)
}

pub fn read_scene<R: BufRead>(reader: R, default_area: &str) -> Result<SceneSet> {
    let mut lines = reader.lines().enumerate();
    let bad = |line: usize, msg: &str| Error::MalformedScene(format!("line {line}: {msg}"));

    match lines.next() {
        Some((_, Ok(h))) if h.trim_end() == HEADER => {}
        _ => return Err(bad(1, "missing `PANAV-SCENE v1` header")),
    }

    let mut area = default_area.to_string();
    let mut rooms = Vec::new();
    // (name, category, declared count, points)
    let mut current: Option<(String, RoomCategory, usize, Vec<_>)> = None;

    let finish = |cur: Option<(String, RoomCategory, usize, Vec<_>)>,
                  rooms: &mut Vec<Room>|
     -> Result<()> {
        if let Some((name, category, count, points)) = cur {
            if points.len() != count {
                return Err(Error::MalformedScene(format!(
                    "room {name}: declared {count} points, found {}",
                    points.len()
                )));
            }
            let room = Room::new(name, points)?;
            if room.category() != category {
                return Err(Error::MalformedScene(format!(
                    "room {}: category `{category}` disagrees with name prefix (`{}`)",
                    room.name(),
                    room.category()
                )));
            }
            rooms.push(room);
        }
        Ok(())
    };

    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| bad(lineno, &e.to_string()))?;
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix("AREA ") {
            if current.is_some() || !rooms.is_empty() {
                return Err(bad(lineno, "AREA must precede rooms"));
            }
            area = rest.trim().to_string();
            continue;
        }
        if let Some(rest) = text.strip_prefix("ROOM ") {
            finish(current.take(), &mut rooms)?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad(lineno, "expected `ROOM <name> <category> <count>`"));
            }
            let category: RoomCategory = fields[1]
                .parse()
                .map_err(|_| bad(lineno, "unknown category"))?;
            let count: usize = fields[2]
                .parse()
                .map_err(|_| bad(lineno, "bad point count"))?;
            current = Some((fields[0].to_string(), category, count, Vec::with_capacity(count)));
            continue;
        }
        let Some((_, _, _, points)) = current.as_mut() else {
            return Err(bad(lineno, "point record before any ROOM line"));
        };
        let mut fields = text.split_whitespace();
        let head: Vec<&str> = fields.by_ref().take(6).collect();
        let mut point = parse_record(&head.join(" ")).map_err(|m| bad(lineno, &m))?;
        if let Some(class) = fields.next() {
            point.semantic_class =
                Some(SemanticClass::parse_token(class).ok_or_else(|| bad(lineno, "bad class"))?);
        }
        if fields.next().is_some() {
            return Err(bad(lineno, "too many fields"));
        }
        points.push(point);
    }
    finish(current, &mut rooms)?;
    if rooms.is_empty() {
        return Err(Error::MalformedScene("no rooms".into()));
    }
    SceneSet::new(area, rooms)
}
