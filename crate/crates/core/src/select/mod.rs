//! Choosing one candidate: a five-run vision-language vote over rendered
//! route maps, or the lowest-risk route when no model is available.

mod client;
mod font;
mod prompt;
mod render;
mod verdict;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RiskScore;
use crate::scene::Episode;

pub use client::{
    request_body, response_text, ChatClient, HttpChatClient, ScriptedClient, ScriptedReply,
    DEFAULT_ENDPOINT, KEY_ENV,
};
pub use prompt::{build_prompt, PromptImage, VlmRequest, DEFAULT_MODEL, DEFAULT_TEMPERATURE};
pub use render::{caption, render_candidate, CandidateRendering, PATH_RGB};
pub use verdict::{heuristic_select, majority_select, parse_verdict};

pub const VLM_RUNS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMethod {
    Vlm,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub transcript: Option<String>,
    pub path_id: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorVerdict {
    pub runs: Vec<RunRecord>,
    pub chosen: usize,
    pub method: SelectionMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VlmOptions {
    pub model: String,
    pub temperature: f64,
}

impl Default for VlmOptions {
    fn default() -> Self {
        VlmOptions {
            model: DEFAULT_MODEL.to_string(),
            temperature: DEFAULT_TEMPERATURE,
        }
    }
}

/// Five independent queries, each parsed on its own; the vote runs over the
/// ones that produced a valid id. A rejected credential stops at once.
pub fn vlm_select(
    client: &dyn ChatClient,
    episode: &Episode,
    candidates: &[CandidateRendering],
    options: &VlmOptions,
) -> Result<SelectorVerdict> {
    if !(0.0..=2.0).contains(&options.temperature) {
        return Err(Error::InvalidParameter(format!(
            "temperature {} outside [0, 2]",
            options.temperature
        )));
    }
    let mut request = build_prompt(episode, candidates)?;
    request.model = options.model.clone();
    request.temperature = options.temperature;

    let mut runs = Vec::with_capacity(VLM_RUNS);
    for _ in 0..VLM_RUNS {
        let record = match client.complete(&request) {
            Ok(text) => match parse_verdict(&text, candidates.len()) {
                Ok(id) => RunRecord {
                    // Ids in the vote refer to rendering order.
                    path_id: Some(candidates[id].path_id),
                    transcript: Some(text),
                    error: None,
                },
                Err(e) => RunRecord {
                    transcript: Some(text),
                    path_id: None,
                    error: Some(e.to_string()),
                },
            },
            Err(e @ Error::Unauthorized(_)) => return Err(e),
            Err(e) => RunRecord {
                transcript: None,
                path_id: None,
                error: Some(e.to_string()),
            },
        };
        runs.push(record);
    }
    let votes: Vec<usize> = runs.iter().filter_map(|r| r.path_id).collect();
    if votes.is_empty() {
        return Err(Error::AllRunsFailed(
            runs.into_iter().filter_map(|r| r.error).collect(),
        ));
    }
    Ok(SelectorVerdict {
        chosen: majority_select(&votes),
        runs,
        method: SelectionMethod::Vlm,
    })
}

/// Selector interface shared by the model-backed and offline choosers.
pub trait Selector {
    fn select(
        &self,
        episode: &Episode,
        candidates: &[CandidateRendering],
        scores: &[RiskScore],
    ) -> Result<SelectorVerdict>;
}

pub struct HeuristicSelector;

impl Selector for HeuristicSelector {
    fn select(&self, _: &Episode, _: &[CandidateRendering], scores: &[RiskScore]) -> Result<SelectorVerdict> {
        if scores.is_empty() {
            return Err(Error::NoCandidates);
        }
        Ok(SelectorVerdict {
            runs: Vec::new(),
            chosen: heuristic_select(scores),
            method: SelectionMethod::Heuristic,
        })
    }
}

pub struct VlmSelector<C> {
    pub client: C,
    pub options: VlmOptions,
}

impl<C: ChatClient> Selector for VlmSelector<C> {
    fn select(&self, episode: &Episode, candidates: &[CandidateRendering], _: &[RiskScore]) -> Result<SelectorVerdict> {
        vlm_select(&self.client, episode, candidates, &self.options)
    }
}

/// Plain-text audit log of every run.
pub fn write_transcript_log<W: Write>(episode: &Episode, verdict: &SelectorVerdict, mut out: W) -> io::Result<()> {
    writeln!(out, "area: {}", episode.area_name)?;
    writeln!(out, "instruction: {}", episode.instruction)?;
    writeln!(out, "start: {}", episode.start_room)?;
    writeln!(out, "goal: {}", episode.goal_room)?;
    for (i, run) in verdict.runs.iter().enumerate() {
        writeln!(out, "\n=== run {} ===", i + 1)?;
        match run.path_id {
            Some(id) => writeln!(out, "parsed: path_{id}")?,
            None => writeln!(out, "parsed: none")?,
        }
        if let Some(e) = &run.error {
            writeln!(out, "error: {e}")?;
        }
        if let Some(t) = &run.transcript {
            writeln!(out, "--- transcript ---\n{t}")?;
        }
    }
    writeln!(out, "\nchosen: path_{}", verdict.chosen)?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn episode() -> Episode {
        Episode {
            area_name: "synthetic".into(),
            instruction: "deliver the mail".into(),
            start_room: "office_1".into(),
            goal_room: "office_2".into(),
        }
    }

    fn candidates(n: usize) -> Vec<CandidateRendering> {
        (0..n)
            .map(|i| CandidateRendering { path_id: i, image: vec![0], caption: caption(i) })
            .collect()
    }

    #[test]
    fn scripted_majority() {
        let client = ScriptedClient::texts(&[
            "FINAL: path_1",
            "FINAL: path_1",
            "FINAL: path_2",
            "FINAL: path_0",
            "FINAL: path_1",
        ]);
        let v = vlm_select(&client, &episode(), &candidates(3), &VlmOptions::default()).unwrap();
        assert_eq!(v.chosen, 1);
        assert_eq!(v.runs.len(), 5);
        assert_eq!(v.method, SelectionMethod::Vlm);
        assert_eq!(client.requests().len(), 5);
        assert_eq!(client.requests()[0].temperature, 0.5);
    }

    #[test]
    fn failures_are_excluded() {
        let client = ScriptedClient::texts(&["hmm", "FINAL: path_2", "no", "FINAL: path_2", "FINAL: path_9"]);
        let v = vlm_select(&client, &episode(), &candidates(3), &VlmOptions::default()).unwrap();
        assert_eq!(v.chosen, 2);
        assert_eq!(v.runs.iter().filter(|r| r.error.is_some()).count(), 3);
    }

    #[test]
    fn all_transport_errors() {
        let client = ScriptedClient::new((0..5).map(|i| ScriptedReply::TransportError(format!("timeout {i}"))));
        let err = vlm_select(&client, &episode(), &candidates(2), &VlmOptions::default()).unwrap_err();
        assert!(matches!(err, Error::AllRunsFailed(ref causes) if causes.len() == 5));
    }

    #[test]
    fn unauthorized_stops_immediately() {
        let client = ScriptedClient::new([ScriptedReply::Unauthorized, ScriptedReply::Text("FINAL: path_0".into())]);
        let err = vlm_select(&client, &episode(), &candidates(2), &VlmOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Unauthorized(_)));
        assert_eq!(client.requests().len(), 1);
    }

    #[test]
    fn constant_answer_wins() {
        for k in 0..4 {
            let client = ScriptedClient::constant(&format!("FINAL: path_{k}"), 5);
            let v = vlm_select(&client, &episode(), &candidates(4), &VlmOptions::default()).unwrap();
            assert_eq!(v.chosen, k);
        }
    }

    #[test]
    fn transcript_log_lists_runs() {
        let client = ScriptedClient::constant("FINAL: path_0", 5);
        let v = vlm_select(&client, &episode(), &candidates(1), &VlmOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_transcript_log(&episode(), &v, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("parsed: path_0").count(), 5);
        assert!(text.ends_with("chosen: path_0\n"));
    }
}
