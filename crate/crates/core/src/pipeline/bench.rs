use std::fmt;
use std::fs;
use std::path::Path;
use std::io::{self, Write};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{execute, EpisodeConfig, EpisodeRun, EpisodeSection, SceneSource, SelectorKind, DELIVERY_TASKS};
use crate::error::{Error, Result};
use crate::field::cell_risk;
use crate::planning::astar;
use crate::scene::{LayoutParams, Topology};
use crate::select::ChatClient;

pub const CSV_HEADER: &str = "area,method,p_risk,cell_distance,world_distance_m,path_id,runtime_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PrivacyAware,
    ShortestAstar,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::PrivacyAware => "privacy-aware",
            Method::ShortestAstar => "shortest-astar",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One method on one episode. Metric fields are `None` when the run failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub area: String,
    pub method: Method,
    pub p_risk: Option<f64>,
    pub cell_distance: Option<f64>,
    pub world_distance_m: Option<f64>,
    pub path_id: Option<usize>,
    pub runtime_ms: f64,
    /// Candidates the pipeline produced for this episode; not written to CSV.
    pub candidates: Option<usize>,
    pub error: Option<String>,
}

impl BenchmarkRow {
    fn failed(area: String, method: Method, error: String) -> Self {
        BenchmarkRow {
            area,
            method,
            p_risk: None,
            cell_distance: None,
            world_distance_m: None,
            path_id: None,
            runtime_ms: 0.0,
            candidates: None,
            error: Some(error),
        }
    }
}

fn area_label(config: &EpisodeConfig) -> String {
    use super::SceneSource::*;
    match &config.scene {
        S3dis { area, .. } => area.clone(),
        SceneFile { path } => path.file_stem().map_or_else(
            || path.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        ),
        Synthetic { seed, .. } => format!("synthetic_{seed}"),
    }
}

fn baseline_row(run: &EpisodeRun) -> Result<BenchmarkRow> {
    let t = Instant::now();
    let from = run.graph.node(&run.episode.start_room)?.center_cell;
    let to = run.graph.node(&run.episode.goal_room)?.center_cell;
    let path = astar(&run.planning_map, from, to)?;
    let risk = cell_risk(&path.cells, &run.field)?;
    let cell_length = path.cost.value();
    Ok(BenchmarkRow {
        area: run.episode.area_name.clone(),
        method: Method::ShortestAstar,
        p_risk: Some(risk),
        cell_distance: Some(cell_length),
        world_distance_m: Some(cell_length * run.planning_map.geometry().resolution),
        path_id: None,
        runtime_ms: t.elapsed().as_secs_f64() * 1e3,
        candidates: Some(run.paths.len()),
        error: None,
    })
}

fn episode_rows(config: &EpisodeConfig, client: Option<&dyn ChatClient>) -> Vec<BenchmarkRow> {
    let label = area_label(config);
    let run = match execute(config, client, false) {
        Ok(run) => run,
        Err(e) => {
            return vec![
                BenchmarkRow::failed(label.clone(), Method::PrivacyAware, e.to_string()),
                BenchmarkRow::failed(label, Method::ShortestAstar, e.to_string()),
            ]
        }
    };
    let chosen = run.verdict.chosen;
    let ours = BenchmarkRow {
        area: run.episode.area_name.clone(),
        method: Method::PrivacyAware,
        p_risk: Some(run.scores[chosen].risk),
        cell_distance: Some(run.paths[chosen].cell_length),
        world_distance_m: Some(run.paths[chosen].world_length),
        path_id: Some(chosen),
        runtime_ms: run.planning_time.as_secs_f64() * 1e3,
        candidates: Some(run.paths.len()),
        error: None,
    };
    let base = baseline_row(&run)
        .unwrap_or_else(|e| BenchmarkRow::failed(run.episode.area_name.clone(), Method::ShortestAstar, e.to_string()));
    vec![ours, base]
}

/// Both methods on every episode, episodes in parallel. Rows are sorted by
/// (area, method), episode order kept within a group. A failing episode
/// yields rows carrying the error instead of aborting the run.
pub fn run_benchmark(
    configs: &[EpisodeConfig],
    client: Option<&dyn ChatClient>,
) -> Result<Vec<BenchmarkRow>> {
    if configs.is_empty() {
        return Err(Error::InvalidParameter("benchmark needs at least one episode".into()));
    }
    if client.is_none() && configs.iter().any(|c| c.selection.selector == SelectorKind::Vlm) {
        return Err(Error::InvalidParameter("vlm selector needs a chat client".into()));
    }
    let mut rows: Vec<BenchmarkRow> = configs
        .par_iter()
        .map(|c| episode_rows(c, client))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|a, b| (a.area.as_str(), a.method).cmp(&(b.area.as_str(), b.method)));
    Ok(rows)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with the fixed header; failed rows leave metric columns empty.
pub fn write_csv<W: Write>(rows: &[BenchmarkRow], mut out: W) -> io::Result<()> {
    let num = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_default();
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{:.3}",
            csv_field(&r.area),
            r.method,
            num(r.p_risk),
            num(r.cell_distance),
            num(r.world_distance_m),
            r.path_id.map(|p| p.to_string()).unwrap_or_default(),
            r.runtime_ms
        )?;
    }
    out.flush()
}

/// `count` loop worlds with seeded layout variation, coarse enough (0.1 m
/// points and cells) to run in seconds each.
pub fn synthetic_suite(count: usize, base_seed: u64) -> Vec<EpisodeConfig> {
    (0..count as u64)
        .map(|i| {
            let seed = base_seed + i;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_f1ce);
            let offices = rng.gen_range(4..=10);
            let conference_rooms = rng.gen_range(0..=2);
            let room_width = rng.gen_range(3.2..5.0);
            // Keep the ring shorter than the north row so the loop is a real detour choice.
            let north_len = (offices - 2 + conference_rooms) as f64 * room_width;
            let ring_max = (0.6 * north_len).clamp(5.0, 12.0);
            let layout = LayoutParams {
                offices,
                conference_rooms,
                bathrooms: rng.gen_range(1..=2),
                storage_rooms: rng.gen_range(1..=4),
                hallways: rng.gen_range(2..=6),
                topology: Topology::Loop,
                corridor_width: rng.gen_range(1.6..2.6),
                room_width,
                room_depth: rng.gen_range(3.5..5.0),
                ring_height: rng.gen_range(4.5..ring_max),
                wall_height: 3.0,
                door_width: rng.gen_range(0.9..1.2),
                point_spacing: 0.1,
            };
            let mut cfg = EpisodeConfig::synthetic(seed, layout);
            cfg.grid_maps.resolution = 0.1;
            cfg
        })
        .collect()
}

/// Room directory names under an S3DIS area, sorted.
fn room_names(area_dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(area_dir).map_err(|e| Error::io(area_dir, e))? {
        let entry = entry.map_err(|e| Error::io(area_dir, e))?;
        if entry.path().is_dir() {
            names.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    names.sort_by_key(|n| room_sort_key(n));
    Ok(names)
}

fn room_sort_key(name: &str) -> (String, u64) {
    match name.rsplit_once('_') {
        Some((stem, n)) => (stem.to_string(), n.parse().unwrap_or(u64::MAX)),
        None => (name.to_string(), u64::MAX),
    }
}

/// Three episodes per area, one per [`DELIVERY_TASKS`] task: from the lowest
/// numbered office to the highest numbered office, to the first conference
/// room and to the first WC. Tasks whose goal category is absent are skipped.
pub fn s3dis_suite(root: &Path, areas: &[&str]) -> Result<Vec<EpisodeConfig>> {
    let mut configs = Vec::new();
    for area in areas {
        let names = room_names(&root.join(area))?;
        let first = |prefix: &str| names.iter().find(|n| room_sort_key(n).0 == prefix).cloned();
        let Some(start) = first("office") else {
            continue;
        };
        let last_office = names.iter().rev().find(|n| room_sort_key(n).0 == "office").cloned();
        let goals = [
            last_office.filter(|g| *g != start),
            first("conferenceRoom"),
            first("WC"),
        ];
        for (task, goal) in DELIVERY_TASKS.iter().zip(goals) {
            let Some(goal) = goal else { continue };
            let mut cfg = EpisodeConfig::synthetic(0, LayoutParams::default());
            cfg.scene = SceneSource::S3dis {
                area: area.to_string(),
                root: Some(root.to_path_buf()),
            };
            cfg.episode = EpisodeSection {
                instruction: task.to_string(),
                start_room: start.clone(),
                goal_room: goal,
            };
            configs.push(cfg);
        }
    }
    Ok(configs)
}
