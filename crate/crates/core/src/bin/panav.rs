use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use panav::field::{field_heatmap_png, fmm_distance, gaussian_modulate, write_field, FieldMode};
use panav::grid::{
    build_room_mask, build_top_view, build_traversability, write_geometry_sidecar, write_top_view_png,
    write_traversability_pgm,
};
use panav::pipeline::{
    default_config_toml, export_artifacts, run_benchmark, run_episode, s3dis_suite, synthetic_suite, write_csv,
    EpisodeConfig, EpisodeRun, SceneSource, SelectorKind, DATA_DIR_ENV,
};
use panav::planning::write_paths;
use panav::scene::{write_scene_file, LayoutParams};
use panav::select::{write_transcript_log, HttpChatClient};
use panav::topo::{build_topology, write_graph};

#[derive(Parser)]
#[command(name = "panav", version, about = "Privacy-aware route planning over annotated point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a scene and list its rooms; optionally save it as a PANAV-SCENE file.
    Ingest {
        #[command(flatten)]
        opts: EpisodeOpts,
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Top view (PNG), traversability (PGM) and grid sidecar.
    Maps(StageArgs),
    /// Topological graph.
    Graph(StageArgs),
    /// Candidate metric paths.
    Paths(StageArgs),
    /// Distance and privacy fields with a heatmap.
    Field(StageArgs),
    /// Risk score of every candidate.
    Score(StageArgs),
    /// Run the selector and print its verdict.
    Select(StageArgs),
    /// Full episode with every artifact.
    Run(StageArgs),
    /// Privacy-aware vs shortest A* as CSV.
    Bench(BenchArgs),
    /// Print a config file with every default.
    ExportDefaults,
}

#[derive(Args)]
struct StageArgs {
    #[command(flatten)]
    opts: EpisodeOpts,
    /// Output directory.
    #[arg(long, short, default_value = "panav_out")]
    out: PathBuf,
}

#[derive(Args)]
struct EpisodeOpts {
    /// TOML episode config; other source flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// PANAV-SCENE file.
    #[arg(long, conflicts_with_all = ["config", "s3dis"])]
    scene: Option<PathBuf>,
    /// S3DIS area name under the data root.
    #[arg(long, conflicts_with = "config")]
    s3dis: Option<String>,
    #[arg(long, env = DATA_DIR_ENV)]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    goal: Option<String>,
    #[arg(long)]
    instruction: Option<String>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Clone)]
struct Overrides {
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    sigma_d: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    field_mode: Option<FieldMode>,
    #[arg(long)]
    selector: Option<SelectorKind>,
    #[arg(long)]
    adjacency_threshold: Option<f64>,
    /// Synthetic world seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut EpisodeConfig) {
        if let Some(v) = self.resolution {
            cfg.grid_maps.resolution = v;
        }
        if let Some(v) = self.sigma_d {
            cfg.privacy_field.sigma_d = v;
        }
        if let Some(v) = self.k {
            cfg.path_planning.k = v;
        }
        if let Some(v) = self.field_mode {
            cfg.privacy_field.mode = v;
        }
        if let Some(v) = self.selector {
            cfg.selection.selector = v;
        }
        if let Some(v) = self.adjacency_threshold {
            cfg.topo_graph.adjacency_threshold = v;
        }
        if let (Some(v), SceneSource::Synthetic { seed, .. }) = (self.seed, &mut cfg.scene) {
            *seed = v;
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Episode configs; without any, S3DIS Area_3/4/5a under the data root
    /// are used when present, else a synthetic suite.
    configs: Vec<PathBuf>,
    #[arg(long, env = DATA_DIR_ENV)]
    data_dir: Option<PathBuf>,
    /// Synthetic worlds when no dataset is found.
    #[arg(long, default_value_t = 50)]
    worlds: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn episode_config(o: &EpisodeOpts) -> AnyResult<EpisodeConfig> {
    let mut cfg = match (&o.config, &o.scene, &o.s3dis) {
        (Some(path), _, _) => EpisodeConfig::load(path)?,
        (None, scene, area) => {
            let mut cfg = EpisodeConfig::synthetic(o.overrides.seed.unwrap_or(7), LayoutParams::default());
            if let Some(path) = scene {
                cfg.scene = SceneSource::SceneFile { path: path.clone() };
            } else if let Some(area) = area {
                cfg.scene = SceneSource::S3dis {
                    area: area.clone(),
                    root: o.data_dir.clone(),
                };
            }
            cfg
        }
    };
    if let Some(s) = &o.start {
        cfg.episode.start_room = s.clone();
    }
    if let Some(g) = &o.goal {
        cfg.episode.goal_room = g.clone();
    }
    if let Some(i) = &o.instruction {
        cfg.episode.instruction = i.clone();
    }
    o.overrides.apply(&mut cfg);
    Ok(cfg)
}

fn create(path: &Path) -> AnyResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| format!("{}: {e}", path.display()))?))
}

fn say(path: &Path) {
    eprintln!("wrote {}", path.display());
}

fn ingest(opts: &EpisodeOpts, save: Option<&Path>) -> AnyResult<()> {
    let cfg = episode_config(opts)?;
    let scene = cfg.scene.load()?;
    println!("area {} rooms {} points {}", scene.area_name(), scene.rooms().len(), scene.point_count());
    for room in scene.rooms() {
        println!("{:<20} {:<12} {}", room.name(), room.category().as_str(), room.points().len());
    }
    if let Some(path) = save {
        write_scene_file(&scene, path)?;
        say(path);
    }
    Ok(())
}

/// Stages that need no episode endpoints.
fn early_stage(cmd: &str, args: &StageArgs) -> AnyResult<()> {
    let cfg = episode_config(&args.opts)?;
    let scene = cfg.scene.load()?;
    let mp = &cfg.grid_maps;
    let policy = mp.ceiling_policy.resolve(&scene);
    let top = build_top_view(&scene, mp.resolution, policy)?;
    let tra = build_traversability(&scene, top.geometry(), policy, mp.floor_band, mp.obstacle_band)?;
    fs::create_dir_all(&args.out)?;
    let out = |name: &str| args.out.join(name);
    match cmd {
        "maps" => {
            write_top_view_png(&top, &out("top_view.png"))?;
            write_traversability_pgm(&tra, &out("traversability.pgm"))?;
            write_geometry_sidecar(top.geometry(), &out("grid.txt"))?;
            for name in ["top_view.png", "traversability.pgm", "grid.txt"] {
                say(&out(name));
            }
            println!("{}x{} cells, {} traversable", top.geometry().width, top.geometry().height, tra.traversable_count());
        }
        "graph" => {
            let map = match cfg.path_planning.inflation_cells {
                0 => tra,
                r => tra.inflated(r),
            };
            let graph = build_topology(&scene, &map, cfg.topo_graph.adjacency_threshold)?;
            let path = out("graph.txt");
            let mut w = create(&path)?;
            write_graph(&graph, &mut w)?;
            w.flush()?;
            say(&path);
            for e in graph.edges() {
                println!("{} -- {}", graph.nodes()[e.a].room_name, graph.nodes()[e.b].room_name);
            }
        }
        _ => {
            let fp = &cfg.privacy_field;
            let mask = build_room_mask(&scene, tra.geometry(), &fp.masked_categories)?;
            let distance = fmm_distance(&tra, &mask.masked_cells())?;
            let field = gaussian_modulate(&distance, fp.sigma_d, fp.mode)?;
            let g = distance.geometry();
            for (name, values) in [("distance_field.bin", distance.values()), ("privacy_field.bin", field.values())] {
                let mut w = create(&out(name))?;
                write_field(g, values, &mut w)?;
                w.flush()?;
                say(&out(name));
            }
            fs::write(out("privacy_field.png"), field_heatmap_png(g, field.values()))?;
            say(&out("privacy_field.png"));
            println!("mode {} mu {:.3} sigma {:.3}", field.mode, field.mu, field.sigma);
        }
    }
    Ok(())
}

fn episode(cfg: &EpisodeConfig) -> AnyResult<EpisodeRun> {
    Ok(run_episode(cfg)?)
}

fn late_stage(cmd: &str, args: &StageArgs) -> AnyResult<()> {
    let cfg = episode_config(&args.opts)?;
    let run = episode(&cfg)?;
    fs::create_dir_all(&args.out)?;
    match cmd {
        "paths" => {
            let path = args.out.join("paths.txt");
            let mut w = create(&path)?;
            write_paths(&run.paths, true, &mut w)?;
            w.flush()?;
            say(&path);
            for p in &run.paths {
                println!("path_{} {:.2} m  {}", p.path_id, p.world_length, p.nodes.join(" > "));
            }
        }
        "score" => {
            println!("path_id,risk,cell_length,world_length_m");
            for s in &run.scores {
                println!("{},{:.3},{:.3},{:.3}", s.path_id, s.risk, s.cell_length, s.world_length);
            }
        }
        "select" => {
            if cfg.selection.selector == SelectorKind::Vlm {
                let path = args.out.join("transcript.txt");
                let mut w = create(&path)?;
                write_transcript_log(&run.episode, &run.verdict, &mut w)?;
                w.flush()?;
                say(&path);
            }
            for (i, r) in run.verdict.runs.iter().enumerate() {
                match (r.path_id, &r.error) {
                    (Some(id), _) => println!("run {i}: path_{id}"),
                    (None, e) => println!("run {i}: failed ({})", e.as_deref().unwrap_or("no verdict")),
                }
            }
            println!("chosen path_{}", run.verdict.chosen);
        }
        _ => {
            for p in export_artifacts(&run, &args.out)? {
                say(&p);
            }
            let chosen = run.chosen();
            println!(
                "chosen path_{} risk {:.3} length {:.2} m: {}",
                chosen.path_id,
                run.scores[chosen.path_id].risk,
                chosen.world_length,
                chosen.nodes.join(" > ")
            );
        }
    }
    Ok(())
}

fn bench(args: &BenchArgs) -> AnyResult<()> {
    let mut configs = if !args.configs.is_empty() {
        args.configs.iter().map(|p| EpisodeConfig::load(p)).collect::<Result<Vec<_>, _>>()?
    } else {
        let areas = ["Area_3", "Area_4", "Area_5a"];
        match &args.data_dir {
            Some(root) if areas.iter().all(|a| root.join(a).is_dir()) => s3dis_suite(root, &areas)?,
            _ => {
                eprintln!("no S3DIS areas found, using {} synthetic worlds", args.worlds);
                synthetic_suite(args.worlds, args.overrides.seed.unwrap_or(1))
            }
        }
    };
    let overrides = Overrides { seed: None, ..args.overrides.clone() };
    for cfg in &mut configs {
        overrides.apply(cfg);
    }
    let needs_vlm = configs.iter().any(|c| c.selection.selector == SelectorKind::Vlm);
    let rows = if needs_vlm {
        let vlm = &configs[0].vlm;
        let client = HttpChatClient::from_env(vlm.endpoint.clone(), std::time::Duration::from_secs(vlm.timeout_secs))?;
        run_benchmark(&configs, Some(&client))?
    } else {
        run_benchmark(&configs, None)?
    };
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("{} {}: {}", r.area, r.method, r.error.as_deref().unwrap_or_default());
    }
    match &args.csv {
        Some(path) => {
            write_csv(&rows, create(path)?)?;
            say(path);
        }
        None => write_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest { opts, save } => ingest(opts, save.as_deref()),
        Command::Maps(a) => early_stage("maps", a),
        Command::Graph(a) => early_stage("graph", a),
        Command::Field(a) => early_stage("field", a),
        Command::Paths(a) => late_stage("paths", a),
        Command::Score(a) => late_stage("score", a),
        Command::Select(a) => late_stage("select", a),
        Command::Run(a) => late_stage("run", a),
        Command::Bench(a) => bench(a),
        Command::ExportDefaults => {
            print!("{}", default_config_toml());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
