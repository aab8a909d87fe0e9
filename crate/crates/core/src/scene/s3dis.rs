use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{LabeledPoint, Room, SceneSet, SemanticClass};
use crate::error::{Error, Result};

/// Reads an S3DIS-style area: one subdirectory per room, holding either
/// `Annotations/<class>_<n>.txt` object files or a single `<room>.txt`.
///
/// Annotation files win when both are present, since they carry labels.
pub fn parse_s3dis_area(root: &Path) -> Result<SceneSet> {
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let mut room_dirs = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if path.is_dir() {
            room_dirs.push(path);
        }
    }
    if room_dirs.is_empty() {
        return Err(Error::NoScenes(root.to_path_buf()));
    }
    room_dirs.sort();

    let rooms = room_dirs
        .par_iter()
        .map(|dir| parse_room_dir(dir))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let area_name = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "area".to_string());
    SceneSet::new(area_name, rooms)
}

fn parse_room_dir(dir: &Path) -> Result<Room> {
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();

    let annotations = dir.join("Annotations");
    let mut points = Vec::new();
    let object_files = if annotations.is_dir() {
        txt_files(&annotations)?
    } else {
        Vec::new()
    };

    if object_files.is_empty() {
        let whole = dir.join(format!("{name}.txt"));
        if whole.is_file() {
            read_records(&whole, None, &mut points)?;
        }
    } else {
        for file in &object_files {
            let class = file
                .file_stem()
                .and_then(|s| s.to_str())
                .map(class_from_stem)
                .and_then(|s| SemanticClass::parse_token(&s));
            read_records(file, class, &mut points)?;
        }
    }
    Room::new(name, points)
}

fn txt_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// `chair_12` -> `chair`; a stem without a numeric suffix is kept whole.
fn class_from_stem(stem: &str) -> String {
    match stem.rsplit_once('_') {
        Some((class, n)) if !class.is_empty() && n.chars().all(|c| c.is_ascii_digit()) => {
            class.to_string()
        }
        _ => stem.to_string(),
    }
}

fn read_records(
    file: &Path,
    class: Option<SemanticClass>,
    out: &mut Vec<LabeledPoint>,
) -> Result<()> {
    let reader = BufReader::new(fs::File::open(file).map_err(|e| Error::io(file, e))?);
    for (idx, line) in reader.split(b'\n').enumerate() {
        let line = line.map_err(|e| Error::io(file, e))?;
        let malformed = |reason: String| Error::MalformedRecord {
            file: file.to_path_buf(),
            line: idx + 1,
            reason,
        };
        let text = std::str::from_utf8(&line)
            .map_err(|_| malformed("invalid UTF-8".to_string()))?
            .trim();
        if text.is_empty() {
            continue;
        }
        let mut point = parse_record(text).map_err(malformed)?;
        point.semantic_class = class.clone();
        out.push(point);
    }
    Ok(())
}

pub(crate) fn parse_record(text: &str) -> std::result::Result<LabeledPoint, String> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 6 {
        return Err(format!("expected 6 fields `x y z r g b`, found {}", fields.len()));
    }
    let mut coords = [0.0f64; 3];
    for (slot, field) in coords.iter_mut().zip(&fields[..3]) {
        *slot = field
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("bad coordinate `{field}`"))?;
    }
    let mut rgb = [0u8; 3];
    for (slot, field) in rgb.iter_mut().zip(&fields[3..]) {
        *slot = field
            .parse::<u8>()
            .map_err(|_| format!("bad color channel `{field}`"))?;
    }
    Ok(LabeledPoint::new(coords[0], coords[1], coords[2], rgb))
}
