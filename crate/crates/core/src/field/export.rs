//! `PANAV-FIELD v1` container:
//!
//! ```text
//! "PANAV-FIELD v1\n"
//! u32 width, u32 height                       (little endian)
//! f64 origin_x, f64 origin_y, f64 resolution  (little endian)
//! f32 value * width * height                  (little endian, row-major from row 0)
//! ```

use std::io::{self, Read, Write};

use image::RgbImage;

use crate::error::{Error, Result};
use crate::grid::{encode_png, Cell, GridGeometry};

const MAGIC: &[u8] = b"PANAV-FIELD v1\n";

const RAMP: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

#[derive(Debug, Clone, PartialEq)]
pub struct FieldRaster {
    pub geometry: GridGeometry,
    pub values: Vec<f32>,
}

pub fn write_field<W: Write>(geometry: &GridGeometry, values: &[f64], mut out: W) -> io::Result<()> {
    assert_eq!(values.len(), geometry.len(), "one value per cell");
    out.write_all(MAGIC)?;
    out.write_all(&(geometry.width as u32).to_le_bytes())?;
    out.write_all(&(geometry.height as u32).to_le_bytes())?;
    for v in [geometry.origin_x, geometry.origin_y, geometry.resolution] {
        out.write_all(&v.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(values.len() * 4);
    for &v in values {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()
}

pub fn read_field<R: Read>(mut reader: R) -> Result<FieldRaster> {
    let bad = |m: &str| Error::MalformedFile(format!("field: {m}"));
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| bad(&e.to_string()))?;
    let rest = bytes.strip_prefix(MAGIC).ok_or_else(|| bad("missing `PANAV-FIELD v1` header"))?;
    if rest.len() < 32 {
        return Err(bad("truncated header"));
    }
    let u32_at = |i: usize| u32::from_le_bytes(rest[i..i + 4].try_into().unwrap()) as usize;
    let f64_at = |i: usize| f64::from_le_bytes(rest[i..i + 8].try_into().unwrap());
    let geometry = GridGeometry::new(f64_at(8), f64_at(16), f64_at(24), u32_at(0), u32_at(4))
        .map_err(|e| bad(&e.to_string()))?;
    let body = &rest[32..];
    if body.len() != geometry.len() * 4 {
        return Err(bad("raster size disagrees with header"));
    }
    let values = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(FieldRaster { geometry, values })
}

fn ramp(t: f64) -> [u8; 3] {
    let x = t.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (x.floor() as usize).min(RAMP.len() - 2);
    let f = x - i as f64;
    let mut px = [0u8; 3];
    for (k, p) in px.iter_mut().enumerate() {
        *p = (RAMP[i][k] + (RAMP[i + 1][k] - RAMP[i][k]) * f).round() as u8;
    }
    px
}

/// North-up heatmap scaled to the largest finite value; non-finite cells are
/// drawn black.
pub fn field_heatmap_png(geometry: &GridGeometry, values: &[f64]) -> Vec<u8> {
    let max = values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let img = RgbImage::from_fn(geometry.width as u32, geometry.height as u32, |x, y| {
        let cell = Cell::new(x as usize, geometry.height - 1 - y as usize);
        let v = values[geometry.index(cell)];
        if !v.is_finite() {
            return image::Rgb([0, 0, 0]);
        }
        image::Rgb(ramp(if max > 0.0 { v / max } else { 0.0 }))
    });
    encode_png(&img)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = GridGeometry::new(-1.5, 2.25, 0.05, 3, 2).unwrap();
        let values = [0.0, 1.0, 1.5, f64::INFINITY, 0.25, 7.0];
        let mut buf = Vec::new();
        write_field(&g, &values, &mut buf).unwrap();
        assert!(buf.starts_with(b"PANAV-FIELD v1\n"));
        assert_eq!(buf.len(), 15 + 32 + 24);
        let back = read_field(buf.as_slice()).unwrap();
        assert_eq!(back.geometry, g);
        let expect: Vec<f32> = values.iter().map(|&v| v as f32).collect();
        assert_eq!(back.values, expect);
        buf.pop();
        assert!(read_field(buf.as_slice()).is_err());
    }

    #[test]
    fn heatmap_decodes() {
        let g = GridGeometry::new(0.0, 0.0, 1.0, 4, 3).unwrap();
        let mut values = vec![1.0; 12];
        values[0] = f64::INFINITY;
        let png = field_heatmap_png(&g, &values);
        let img = image::load_from_memory(&png).unwrap().to_rgb8();
        assert_eq!(img.dimensions(), (4, 3));
        assert_eq!(img.get_pixel(0, 2).0, [0, 0, 0]);
        assert_eq!(img.get_pixel(1, 0).0, [253, 231, 37]);
    }
}
