use serde::{Deserialize, Serialize};

use super::CandidateRendering;
use crate::error::{Error, Result};
use crate::scene::Episode;

pub const DEFAULT_TEMPERATURE: f64 = 0.5;
pub const DEFAULT_MODEL: &str = "gpt-4o";

const SYSTEM: &str = "You are a navigation assistant for an indoor service robot. \
You are shown top-view maps of a building, each with one candidate route drawn in red \
and labeled in its top-left corner. Choose the route that best respects the privacy of \
the people in the building while completing the task.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptImage {
    pub label: String,
    /// PNG bytes.
    #[serde(skip)]
    pub png: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VlmRequest {
    pub model: String,
    pub temperature: f64,
    pub system: String,
    pub user: String,
    pub images: Vec<PromptImage>,
}

pub fn build_prompt(episode: &Episode, candidates: &[CandidateRendering]) -> Result<VlmRequest> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let labels: Vec<&str> = candidates.iter().map(|c| c.caption.as_str()).collect();
    let mut user = String::new();
    user.push_str(&format!("Task: {}\n", episode.instruction));
    user.push_str(&format!("Start room: {}\n", episode.start_room));
    user.push_str(&format!("Goal room: {}\n", episode.goal_room));
    user.push_str(&format!(
        "There are {} candidate routes, one per attached image, in this order: {}.\n",
        candidates.len(),
        labels.join(", ")
    ));
    user.push_str(
        "Offices and conference rooms are occupied by people. A route that passes close \
to them, or through busy corridors beside them, exposes what the robot carries and \
disturbs the occupants.\n",
    );
    user.push_str("Let's think step by step about which rooms each route passes before choosing.\n");
    user.push_str("End your answer with one line of exactly this form: FINAL: path_<id>\n");
    Ok(VlmRequest {
        model: DEFAULT_MODEL.to_string(),
        temperature: DEFAULT_TEMPERATURE,
        system: SYSTEM.to_string(),
        user,
        images: candidates
            .iter()
            .map(|c| PromptImage {
                label: c.caption.clone(),
                png: c.image.clone(),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn candidate(id: usize) -> CandidateRendering {
        CandidateRendering {
            path_id: id,
            image: vec![id as u8],
            caption: super::super::caption(id),
        }
    }

    #[test]
    fn contents() {
        let ep = Episode {
            area_name: "Area_3".into(),
            instruction: "send a classified file from the office to the HR office".into(),
            start_room: "office_1".into(),
            goal_room: "office_9".into(),
        };
        let req = build_prompt(&ep, &[candidate(0), candidate(1), candidate(2)]).unwrap();
        assert!(req.user.contains("send a classified file from the office to the HR office"));
        assert!(req.user.contains("office_1") && req.user.contains("office_9"));
        assert!(req.user.contains("step by step"));
        assert!(req.user.contains("FINAL: path_<id>"));
        let labels: Vec<&str> = req.images.iter().map(|i| i.label.as_str()).collect();
        assert_eq!(labels, ["path_0", "path_1", "path_2"]);
        assert_eq!(req.temperature, 0.5);
        assert!(matches!(build_prompt(&ep, &[]), Err(Error::NoCandidates)));
    }
}
