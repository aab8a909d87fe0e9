//! End-to-end episodes, artifact export and the baseline comparison.

mod bench;
mod config;
mod export;

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{fmm_distance, gaussian_modulate, path_risk, DistanceField, FieldMode, PrivacyField, RiskScore};
use crate::grid::{
    build_room_mask, build_top_view, build_traversability, CeilingPolicy, GridGeometry, TopViewMap,
    TraversabilityMap,
};
use crate::planning::{enumerate_simple_paths, filter_candidates, realize_all, MetricPath, TopologicalPath};
use crate::scene::Episode;
use crate::select::{
    render_candidate, CandidateRendering, ChatClient, HeuristicSelector, HttpChatClient, Selector,
    SelectorVerdict, VlmOptions, VlmSelector,
};
use crate::topo::{build_topology, TopoGraph};

pub use bench::{
    run_benchmark, s3dis_suite, synthetic_suite, write_csv, BenchmarkRow, Method, CSV_HEADER,
};
pub use config::{
    default_config_toml, EpisodeConfig, EpisodeSection, FieldParams, PlanningParams, SceneSource,
    SelectionParams, SelectorKind, TopoParams, VlmParams, DATA_DIR_ENV, DELIVERY_TASKS,
};
pub use export::export_artifacts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    SceneIngest,
    GridMaps,
    TopoGraph,
    PathPlanning,
    PrivacyField,
    Selection,
    Export,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::SceneIngest => "scene_ingest",
            Stage::GridMaps => "grid_maps",
            Stage::TopoGraph => "topo_graph",
            Stage::PathPlanning => "path_planning",
            Stage::PrivacyField => "privacy_field",
            Stage::Selection => "selection",
            Stage::Export => "export",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A module error tagged with the stage that raised it.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub path_id: usize,
    pub nodes: Vec<String>,
    pub topo_length: f64,
    pub cell_count: usize,
    pub cell_length: f64,
    pub world_length: f64,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub mode: FieldMode,
    pub sigma_d: f64,
    pub mu: f64,
    pub sigma: f64,
    pub source_cells: usize,
}

/// Machine-readable episode summary; contains no timings so identical
/// configs give identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub area: String,
    pub instruction: String,
    pub start_room: String,
    pub goal_room: String,
    pub config: EpisodeConfig,
    pub ceiling_policy: CeilingPolicy,
    pub grid: GridGeometry,
    pub traversable_cells: usize,
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub simple_paths: usize,
    pub candidates: Vec<CandidateReport>,
    pub field: FieldSummary,
    pub selection: SelectorVerdict,
    pub chosen_path_id: usize,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report always serializes");
        s.push('\n');
        s
    }
}

/// Everything an episode produced, kept for export and inspection.
pub struct EpisodeRun {
    pub episode: Episode,
    pub top: TopViewMap,
    pub traversability: TraversabilityMap,
    /// The map A* ran on: the traversability map after optional inflation.
    pub planning_map: TraversabilityMap,
    pub graph: TopoGraph,
    pub candidates: Vec<TopologicalPath>,
    pub paths: Vec<MetricPath>,
    pub distance: DistanceField,
    pub field: PrivacyField,
    pub scores: Vec<RiskScore>,
    pub renderings: Vec<CandidateRendering>,
    pub verdict: SelectorVerdict,
    pub report: Report,
    /// Wall time of candidate planning, scoring and selection.
    pub planning_time: Duration,
}

impl EpisodeRun {
    pub fn chosen(&self) -> &MetricPath {
        &self.paths[self.verdict.chosen]
    }
}

/// Runs every stage. A VLM selector talks to `vlm.endpoint` with the key
/// from `PANAV_VLM_KEY`.
pub fn run_episode(config: &EpisodeConfig) -> std::result::Result<EpisodeRun, PipelineError> {
    if config.selection.selector == SelectorKind::Vlm {
        let client = HttpChatClient::from_env(
            config.vlm.endpoint.clone(),
            Duration::from_secs(config.vlm.timeout_secs),
        )
        .at(Stage::Selection)?;
        execute(config, Some(&client), true)
    } else {
        execute(config, None, true)
    }
}

/// Like [`run_episode`] with a caller-supplied chat client (e.g. a mock).
pub fn run_episode_with_client(
    config: &EpisodeConfig,
    client: &dyn ChatClient,
) -> std::result::Result<EpisodeRun, PipelineError> {
    execute(config, Some(client), true)
}

struct ClientRef<'a>(&'a dyn ChatClient);

impl ChatClient for ClientRef<'_> {
    fn complete(&self, request: &crate::select::VlmRequest) -> Result<String> {
        self.0.complete(request)
    }
}

pub(crate) fn execute(
    config: &EpisodeConfig,
    client: Option<&dyn ChatClient>,
    render: bool,
) -> std::result::Result<EpisodeRun, PipelineError> {
    let ep = &config.episode;
    if ep.instruction.trim().is_empty() {
        return Err(Error::InvalidParameter("instruction is empty".into())).at(Stage::SceneIngest);
    }
    let scene = config.scene.load().at(Stage::SceneIngest)?;

    let mp = &config.grid_maps;
    let policy = mp.ceiling_policy.resolve(&scene);
    let top = build_top_view(&scene, mp.resolution, policy).at(Stage::GridMaps)?;
    let tra = build_traversability(&scene, top.geometry(), policy, mp.floor_band, mp.obstacle_band)
        .at(Stage::GridMaps)?;
    let planning_map = match config.path_planning.inflation_cells {
        0 => tra.clone(),
        r => tra.inflated(r),
    };

    let graph = build_topology(&scene, &planning_map, config.topo_graph.adjacency_threshold)
        .at(Stage::TopoGraph)?;
    for room in [&ep.start_room, &ep.goal_room] {
        graph.node(room).at(Stage::TopoGraph)?;
    }
    let episode = Episode {
        area_name: scene.area_name().to_string(),
        instruction: ep.instruction.clone(),
        start_room: ep.start_room.clone(),
        goal_room: ep.goal_room.clone(),
    };

    let clock = Instant::now();
    let mut off_clock = Duration::ZERO;
    let k = config.path_planning.k;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into())).at(Stage::PathPlanning);
    }
    let all = enumerate_simple_paths(&graph, &ep.start_room, &ep.goal_room).at(Stage::PathPlanning)?;
    let candidates = filter_candidates(&all, k);
    if candidates.is_empty() {
        return Err(Error::NoCandidates).at(Stage::PathPlanning);
    }
    let paths = realize_all(&candidates, &graph, &planning_map)
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .at(Stage::PathPlanning)?;

    let field_start = Instant::now();
    let fp = &config.privacy_field;
    let mask = build_room_mask(&scene, tra.geometry(), &fp.masked_categories).at(Stage::PrivacyField)?;
    let sources = mask.masked_cells();
    let distance = fmm_distance(&tra, &sources).at(Stage::PrivacyField)?;
    let field = gaussian_modulate(&distance, fp.sigma_d, fp.mode).at(Stage::PrivacyField)?;
    off_clock += field_start.elapsed();
    let scores = paths
        .iter()
        .map(|p| path_risk(p, &field))
        .collect::<Result<Vec<_>>>()
        .at(Stage::PrivacyField)?;

    let sp = &config.selection;
    let render_start = Instant::now();
    let renderings = if render || sp.selector == SelectorKind::Vlm {
        paths
            .iter()
            .map(|p| render_candidate(&top, p, sp.render_scale, sp.stroke))
            .collect::<Result<Vec<_>>>()
            .at(Stage::Selection)?
    } else {
        Vec::new()
    };
    if render && sp.selector != SelectorKind::Vlm {
        off_clock += render_start.elapsed();
    }
    let verdict = match sp.selector {
        SelectorKind::Heuristic => HeuristicSelector.select(&episode, &renderings, &scores),
        SelectorKind::Vlm => {
            let client = client.ok_or_else(|| Error::InvalidParameter("vlm selector needs a chat client".into()));
            client.and_then(|c| {
                VlmSelector {
                    client: ClientRef(c),
                    options: VlmOptions {
                        model: config.vlm.model.clone(),
                        temperature: config.vlm.temperature,
                    },
                }
                .select(&episode, &renderings, &scores)
            })
        }
    }
    .at(Stage::Selection)?;
    let planning_time = clock.elapsed().saturating_sub(off_clock);

    let report = Report {
        area: episode.area_name.clone(),
        instruction: episode.instruction.clone(),
        start_room: episode.start_room.clone(),
        goal_room: episode.goal_room.clone(),
        config: config.clone(),
        ceiling_policy: policy,
        grid: *top.geometry(),
        traversable_cells: tra.traversable_count(),
        graph_nodes: graph.nodes().len(),
        graph_edges: graph.edges().len(),
        simple_paths: all.len(),
        candidates: candidates
            .iter()
            .zip(&paths)
            .zip(&scores)
            .map(|((c, p), s)| CandidateReport {
                path_id: p.path_id,
                nodes: c.nodes.clone(),
                topo_length: c.topo_length,
                cell_count: p.cells.len(),
                cell_length: p.cell_length,
                world_length: p.world_length,
                risk: s.risk,
            })
            .collect(),
        field: FieldSummary {
            mode: field.mode,
            sigma_d: fp.sigma_d,
            mu: field.mu,
            sigma: field.sigma,
            source_cells: sources.len(),
        },
        selection: verdict.clone(),
        chosen_path_id: verdict.chosen,
    };

    Ok(EpisodeRun {
        episode,
        top,
        traversability: tra,
        planning_map,
        graph,
        candidates,
        paths,
        distance,
        field,
        scores,
        renderings,
        verdict,
        report,
        planning_time,
    })
}
