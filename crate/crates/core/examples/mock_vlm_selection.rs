//! Five-run majority vote against a scripted chat client, so no API key is
//! needed. Swap in `HttpChatClient::from_env` for a live model.

use panav::pipeline::{run_episode_with_client, EpisodeConfig, SelectorKind};
use panav::scene::LayoutParams;
use panav::select::{write_transcript_log, ScriptedClient, ScriptedReply};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = EpisodeConfig::synthetic(7, LayoutParams::default());
    cfg.grid_maps.resolution = 0.1;
    cfg.selection.selector = SelectorKind::Vlm;

    let client = ScriptedClient::new([
        ScriptedReply::Text("The north corridor passes every office.\nFINAL: path_1".into()),
        ScriptedReply::Text("Step by step: path_0 is shorter but busier.\nFINAL: path_1".into()),
        ScriptedReply::Text("I cannot decide.".into()),
        ScriptedReply::TransportError("connection reset".into()),
        ScriptedReply::Text("FINAL: path_0".into()),
    ]);
    let run = run_episode_with_client(&cfg, &client)?;

    let prompt = &client.requests()[0];
    println!("model {} at temperature {}, {} images", prompt.model, prompt.temperature, prompt.images.len());
    for (i, r) in run.verdict.runs.iter().enumerate() {
        println!("run {i}: {:?} {}", r.path_id, r.error.as_deref().unwrap_or(""));
    }
    println!("majority: path_{}\n", run.verdict.chosen);
    write_transcript_log(&run.episode, &run.verdict, std::io::stdout().lock())?;
    Ok(())
}
