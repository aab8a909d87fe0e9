use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::{EpisodeRun, SelectorKind};
use crate::error::{Error, Result};
use crate::field::{field_heatmap_png, write_field};
use crate::grid::{top_view_png, traversability_pgm, write_geometry_sidecar};
use crate::planning::write_paths;
use crate::select::{render_candidate, write_transcript_log};
use crate::topo::write_graph;

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes maps, graph, paths, fields, candidate images, the selected route
/// and the JSON report into `out_dir`. Returns the written paths in order.
pub fn export_artifacts(run: &EpisodeRun, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut out = |name: &str| {
        let p = out_dir.join(name);
        written.push(p.clone());
        p
    };

    write_bytes(&out("top_view.png"), &top_view_png(&run.top))?;
    write_bytes(&out("traversability.pgm"), &traversability_pgm(&run.traversability))?;
    write_geometry_sidecar(run.top.geometry(), &out("grid.txt"))?;
    write_with(&out("graph.txt"), |w| write_graph(&run.graph, w))?;
    write_with(&out("paths.txt"), |w| write_paths(&run.paths, true, w))?;
    let g = run.distance.geometry();
    write_with(&out("distance_field.bin"), |w| write_field(g, run.distance.values(), w))?;
    write_with(&out("privacy_field.bin"), |w| write_field(g, run.field.values(), w))?;
    write_bytes(&out("privacy_field.png"), &field_heatmap_png(g, run.field.values()))?;

    let sp = &run.report.config.selection;
    for p in &run.paths {
        let image = match run.renderings.iter().find(|r| r.path_id == p.path_id) {
            Some(r) => r.image.clone(),
            None => render_candidate(&run.top, p, sp.render_scale, sp.stroke)?.image,
        };
        write_bytes(&out(&format!("candidate_path_{}.png", p.path_id)), &image)?;
    }
    let chosen = render_candidate(&run.top, run.chosen(), sp.render_scale, sp.stroke)?;
    write_bytes(&out("selected_path.png"), &chosen.image)?;
    if sp.selector == SelectorKind::Vlm {
        write_with(&out("transcript.txt"), |w| write_transcript_log(&run.episode, &run.verdict, w))?;
    }
    write_bytes(&out("report.json"), run.report.to_json().as_bytes())?;
    Ok(written)
}
