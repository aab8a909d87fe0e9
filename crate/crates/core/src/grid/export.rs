//! Map export: binary PGM for traversability, PNG for the top view and a
//! `key=value` sidecar holding the grid geometry.
//!
//! Rasters are written north-up: the first image row is the grid's highest
//! row, as map servers expect.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, RgbImage};

use super::{Cell, GridGeometry, TopViewMap, TraversabilityMap};
use crate::error::{Error, Result};

const UNOCCUPIED_RGB: [u8; 3] = [255, 255, 255];

/// `P5` bytes: 255 traversable, 0 obstacle.
pub fn traversability_pgm(map: &TraversabilityMap) -> Vec<u8> {
    let g = map.geometry();
    let mut out = format!("P5\n{} {}\n255\n", g.width, g.height).into_bytes();
    out.reserve(g.len());
    for row in (0..g.height).rev() {
        for col in 0..g.width {
            out.push(if map.is_traversable(Cell::new(col, row)) { 255 } else { 0 });
        }
    }
    out
}

pub fn write_traversability_pgm(map: &TraversabilityMap, path: &Path) -> Result<()> {
    fs::write(path, traversability_pgm(map)).map_err(|e| Error::io(path, e))
}

/// Reads a `P5` map written by [`write_traversability_pgm`]; any value above
/// 127 counts as traversable.
pub fn read_traversability_pgm(path: &Path, geometry: GridGeometry) -> Result<TraversabilityMap> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |m: &str| Error::MalformedFile(format!("{}: {m}", path.display()));
    // Header: magic, width, height, maxval separated by whitespace, then one byte.
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "255" {
        return Err(bad("expected 8-bit P5"));
    }
    let (w, h): (usize, usize) = (
        fields[1].parse().map_err(|_| bad("width"))?,
        fields[2].parse().map_err(|_| bad("height"))?,
    );
    if (w, h) != (geometry.width, geometry.height) {
        return Err(Error::GeometryMismatch(format!(
            "pgm is {w}x{h}, sidecar says {}x{}",
            geometry.width, geometry.height
        )));
    }
    let pixels = bytes.get(pos..pos + w * h).ok_or_else(|| bad("truncated raster"))?;
    let mut cells = vec![false; w * h];
    for (i, &v) in pixels.iter().enumerate() {
        let (img_row, col) = (i / w, i % w);
        cells[(h - 1 - img_row) * w + col] = v > 127;
    }
    TraversabilityMap::from_cells(geometry, cells)
}

/// Top view as an RGB image, one pixel per cell, north-up.
pub fn render_top_view_rgb(top: &TopViewMap) -> RgbImage {
    let g = top.geometry();
    RgbImage::from_fn(g.width as u32, g.height as u32, |x, y| {
        let cell = Cell::new(x as usize, g.height - 1 - y as usize);
        image::Rgb(top.get(cell).map_or(UNOCCUPIED_RGB, |c| c.color))
    })
}

pub(crate) fn encode_png(img: &RgbImage) -> Vec<u8> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)
        .expect("PNG encoding into memory cannot fail");
    buf.into_inner()
}

pub fn top_view_png(top: &TopViewMap) -> Vec<u8> {
    encode_png(&render_top_view_rgb(top))
}

pub fn write_top_view_png(top: &TopViewMap, path: &Path) -> Result<()> {
    fs::write(path, top_view_png(top)).map_err(|e| Error::io(path, e))
}

pub fn write_geometry_sidecar(geometry: &GridGeometry, path: &Path) -> Result<()> {
    let text = format!(
        "origin_x={}\norigin_y={}\nresolution={}\nwidth={}\nheight={}\n",
        geometry.origin_x, geometry.origin_y, geometry.resolution, geometry.width, geometry.height
    );
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_geometry_sidecar(path: &Path) -> Result<GridGeometry> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |m: String| Error::MalformedFile(format!("{}: {m}", path.display()));
    let mut values = std::collections::BTreeMap::new();
    for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got `{line}`")))?;
        values.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| {
        values
            .get(k)
            .ok_or_else(|| bad(format!("missing `{k}`")))
    };
    let float = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(format!("bad `{k}`"))) };
    let int = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| bad(format!("bad `{k}`"))) };
    GridGeometry::new(
        float("origin_x")?,
        float("origin_y")?,
        float("resolution")?,
        int("width")?,
        int("height")?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_and_sidecar_round_trip() {
        let mut tra = TraversabilityMap::from_ascii(
            "#..
             ..#",
        )
        .unwrap();
        let g = GridGeometry::new(-1.25, 3.5, 0.05, 3, 2).unwrap();
        tra = TraversabilityMap::from_cells(g, tra.cells().to_vec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (pgm, meta) = (dir.path().join("m.pgm"), dir.path().join("m.yaml"));
        write_traversability_pgm(&tra, &pgm).unwrap();
        write_geometry_sidecar(&g, &meta).unwrap();

        let bytes = fs::read(&pgm).unwrap();
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        // First image row is the top grid row: `#..`
        assert_eq!(&bytes[bytes.len() - 6..], &[0, 255, 255, 255, 255, 0]);

        let g2 = read_geometry_sidecar(&meta).unwrap();
        assert_eq!(g2, g);
        assert_eq!(read_traversability_pgm(&pgm, g2).unwrap(), tra);
    }
}
