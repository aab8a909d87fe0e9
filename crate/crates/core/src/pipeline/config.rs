use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldMode, DEFAULT_SIGMA_D};
use crate::grid::MapParams;
use crate::planning::DEFAULT_K;
use crate::scene::{
    generate_synthetic_world, parse_s3dis_area, parse_scene_file, LayoutParams, RoomCategory, SceneSet,
};
use crate::select::{DEFAULT_ENDPOINT, DEFAULT_MODEL, DEFAULT_TEMPERATURE};
use crate::topo::DEFAULT_ADJACENCY_THRESHOLD;

pub const DATA_DIR_ENV: &str = "PANAV_DATA_DIR";

/// Where the point cloud comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum SceneSource {
    /// `<root>/<area>/` in S3DIS layout; `root` defaults to `$PANAV_DATA_DIR`.
    S3dis {
        area: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        root: Option<PathBuf>,
    },
    SceneFile { path: PathBuf },
    Synthetic {
        seed: u64,
        #[serde(default)]
        layout: LayoutParams,
    },
}

impl SceneSource {
    pub fn load(&self) -> Result<SceneSet> {
        match self {
            SceneSource::S3dis { area, root } => {
                let root = match root {
                    Some(r) => r.clone(),
                    None => std::env::var_os(DATA_DIR_ENV).map(PathBuf::from).ok_or_else(|| {
                        Error::InvalidParameter(format!("no S3DIS root given and {DATA_DIR_ENV} is unset"))
                    })?,
                };
                parse_s3dis_area(&root.join(area))
            }
            SceneSource::SceneFile { path } => parse_scene_file(path),
            SceneSource::Synthetic { seed, layout } => generate_synthetic_world(*seed, layout),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSection {
    pub instruction: String,
    pub start_room: String,
    pub goal_room: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopoParams {
    pub adjacency_threshold: f64,
}

impl Default for TopoParams {
    fn default() -> Self {
        TopoParams {
            adjacency_threshold: DEFAULT_ADJACENCY_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanningParams {
    pub k: usize,
    /// Obstacle inflation radius in cells; 0 disables it.
    pub inflation_cells: usize,
}

impl Default for PlanningParams {
    fn default() -> Self {
        PlanningParams {
            k: DEFAULT_K,
            inflation_cells: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldParams {
    pub sigma_d: f64,
    pub mode: FieldMode,
    /// Room categories whose cells seed the distance field.
    pub masked_categories: BTreeSet<RoomCategory>,
}

impl Default for FieldParams {
    fn default() -> Self {
        FieldParams {
            sigma_d: DEFAULT_SIGMA_D,
            mode: FieldMode::RiskInverted,
            masked_categories: [RoomCategory::Office, RoomCategory::Conference].into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorKind {
    #[default]
    Heuristic,
    Vlm,
}

impl std::str::FromStr for SelectorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heuristic" => Ok(SelectorKind::Heuristic),
            "vlm" => Ok(SelectorKind::Vlm),
            _ => Err(Error::InvalidParameter(format!("selector `{s}` (expected heuristic or vlm)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionParams {
    pub selector: SelectorKind,
    /// Pixels per grid cell in candidate images.
    pub render_scale: u32,
    /// Side of the square drawn per path cell, pixels.
    pub stroke: u32,
}

impl Default for SelectionParams {
    fn default() -> Self {
        SelectionParams {
            selector: SelectorKind::Heuristic,
            render_scale: 2,
            stroke: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VlmParams {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub timeout_secs: u64,
}

impl Default for VlmParams {
    fn default() -> Self {
        VlmParams {
            endpoint: DEFAULT_ENDPOINT.to_string(),
            model: DEFAULT_MODEL.to_string(),
            temperature: DEFAULT_TEMPERATURE,
            timeout_secs: 120,
        }
    }
}

/// One episode: scene, task and every tunable, one TOML table per stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub scene: SceneSource,
    pub episode: EpisodeSection,
    #[serde(default)]
    pub grid_maps: MapParams,
    #[serde(default)]
    pub topo_graph: TopoParams,
    #[serde(default)]
    pub path_planning: PlanningParams,
    #[serde(default)]
    pub privacy_field: FieldParams,
    #[serde(default)]
    pub selection: SelectionParams,
    #[serde(default)]
    pub vlm: VlmParams,
}

impl EpisodeConfig {
    /// Synthetic loop world between its two endpoint offices.
    pub fn synthetic(seed: u64, layout: LayoutParams) -> Self {
        let (start, goal) = layout.endpoint_rooms();
        EpisodeConfig {
            scene: SceneSource::Synthetic { seed, layout },
            episode: EpisodeSection {
                instruction: DELIVERY_TASKS[0].to_string(),
                start_room: start,
                goal_room: goal,
            },
            grid_maps: MapParams::default(),
            topo_graph: TopoParams::default(),
            path_planning: PlanningParams::default(),
            privacy_field: FieldParams::default(),
            selection: SelectionParams::default(),
            vlm: VlmParams::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config always serializes")
    }
}

/// The three delivery tasks used for the building benchmarks.
pub const DELIVERY_TASKS: [&str; 3] = [
    "send a classified file from the office to the HR office",
    "send fragile equipment from the office to the meeting room",
    "send medicine from the office to the bathroom",
];

/// A complete config with every default spelled out.
pub fn default_config_toml() -> String {
    let mut text = String::from(
        "# Every key below shows its default. `scene.source` is one of\n\
         # s3dis (area, optional root), scene-file (path) or synthetic (seed, layout).\n\n",
    );
    text.push_str(&EpisodeConfig::synthetic(7, LayoutParams::default()).to_toml());
    text
}
