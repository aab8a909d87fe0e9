use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use super::font::{draw_text, text_width, GLYPH_H};
use crate::error::{Error, Result};
use crate::grid::{encode_png, render_top_view_rgb, TopViewMap};
use crate::planning::MetricPath;

pub const PATH_RGB: [u8; 3] = [255, 0, 0];

/// One candidate drawn over the top view, labeled `path_<id>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRendering {
    pub path_id: usize,
    /// PNG bytes.
    #[serde(skip)]
    pub image: Vec<u8>,
    pub caption: String,
}

pub fn caption(path_id: usize) -> String {
    format!("path_{path_id}")
}

/// Draws `path` in red over the top view scaled by `scale` pixels per cell.
/// `stroke` is the side of the square drawn per path cell, in pixels,
/// clamped to `1..=scale`.
pub fn render_candidate(top: &TopViewMap, path: &MetricPath, scale: u32, stroke: u32) -> Result<CandidateRendering> {
    if scale == 0 {
        return Err(Error::InvalidParameter("render scale must be >= 1".into()));
    }
    let g = top.geometry();
    if let Some(c) = path.cells.iter().find(|c| !g.contains(**c)) {
        return Err(Error::GeometryMismatch(format!(
            "path_{} cell {c} outside the {}x{} top view",
            path.path_id, g.width, g.height
        )));
    }
    let base = render_top_view_rgb(top);
    let (w, h) = (base.width() * scale, base.height() * scale);
    let mut img = RgbImage::from_fn(w, h, |x, y| *base.get_pixel(x / scale, y / scale));

    let stroke = stroke.clamp(1, scale);
    let inset = (scale - stroke) / 2;
    for c in &path.cells {
        let x0 = c.col as u32 * scale + inset;
        let y0 = (g.height - 1 - c.row) as u32 * scale + inset;
        for y in y0..y0 + stroke {
            for x in x0..x0 + stroke {
                img.put_pixel(x, y, Rgb(PATH_RGB));
            }
        }
    }

    let label = caption(path.path_id);
    let zoom = (w.min(h) / 200).max(1);
    let pad = 2 * zoom;
    let (bw, bh) = (text_width(&label, zoom) + 2 * pad, GLYPH_H * zoom + 2 * pad);
    for y in 0..bh.min(h) {
        for x in 0..bw.min(w) {
            img.put_pixel(x, y, Rgb([255, 255, 255]));
        }
    }
    draw_text(&label, zoom, |x, y| {
        let (x, y) = (x + pad, y + pad);
        if x < w && y < h {
            img.put_pixel(x, y, Rgb([0, 0, 0]));
        }
    });

    Ok(CandidateRendering {
        path_id: path.path_id,
        image: encode_png(&img),
        caption: label,
    })
}
