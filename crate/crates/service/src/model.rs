use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use ltg_core::GapelmaperReport;
use serde::{Deserialize, Serialize};

/// Challenge lifecycle. Only moves forward.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChallengePhase {
    #[default]
    Registration,
    Leaderboard,
    HumanEval,
    Complete,
}

impl ChallengePhase {
    pub fn as_str(self) -> &'static str {
        match self {
            ChallengePhase::Registration => "registration",
            ChallengePhase::Leaderboard => "leaderboard",
            ChallengePhase::HumanEval => "human_eval",
            ChallengePhase::Complete => "complete",
        }
    }
}

impl fmt::Display for ChallengePhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChallengePhase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "registration" => Ok(ChallengePhase::Registration),
            "leaderboard" => Ok(ChallengePhase::Leaderboard),
            "human_eval" => Ok(ChallengePhase::HumanEval),
            "complete" => Ok(ChallengePhase::Complete),
            other => Err(format!("unknown phase {other:?}")),
        }
    }
}

/// A registered prompt. Submissions must start with `text`; judges may be
/// shown `reference_text`, a human-written continuation of the same prompt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_text: Option<String>,
}

/// Outcome of scoring a submission.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ScoreStatus {
    Scored { report: GapelmaperReport },
    Error { error: ErrorBody },
}

impl ScoreStatus {
    pub fn gapelmaper(&self) -> Option<f64> {
        match self {
            ScoreStatus::Scored { report } => Some(report.gapelmaper),
            ScoreStatus::Error { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmissionRecord {
    pub id: String,
    pub team: String,
    pub prompt_id: String,
    pub text: String,
    pub token_count: usize,
    #[serde(flatten)]
    pub score: ScoreStatus,
    pub received_at: DateTime<Utc>,
}

/// The four rating dimensions, each an integer on a 1..=5 scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingScores {
    pub relevance: i64,
    pub consistency: i64,
    pub fluency: i64,
    pub coherence: i64,
}

impl RatingScores {
    pub const MIN: i64 = 1;
    pub const MAX: i64 = 5;

    pub fn new(relevance: i64, consistency: i64, fluency: i64, coherence: i64) -> Self {
        RatingScores {
            relevance,
            consistency,
            fluency,
            coherence,
        }
    }

    pub fn dimensions(&self) -> [(&'static str, i64); 4] {
        [
            ("relevance", self.relevance),
            ("consistency", self.consistency),
            ("fluency", self.fluency),
            ("coherence", self.coherence),
        ]
    }

    /// First dimension outside the scale, if any.
    pub fn out_of_range(&self) -> Option<(&'static str, i64)> {
        self.dimensions()
            .into_iter()
            .find(|&(_, v)| !(Self::MIN..=Self::MAX).contains(&v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub id: String,
    pub assignment_id: String,
    pub submission_id: String,
    pub judge_id: String,
    #[serde(flatten)]
    pub scores: RatingScores,
    pub submitted_at: DateTime<Utc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub id: String,
    pub submission_id: String,
    pub judge_id: String,
    pub issued_at: DateTime<Utc>,
}

/// What a judge receives: the text to rate and, when the prompt has one,
/// the human-written reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignmentView {
    pub assignment_id: String,
    pub submission_id: String,
    pub prompt_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_text: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HumanEvalScore {
    pub submission_id: String,
    pub relevance_mean: f64,
    pub consistency_mean: f64,
    pub fluency_mean: f64,
    pub coherence_mean: f64,
    pub n_judges: usize,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub team: String,
    pub submission_id: String,
    pub gapelmaper: f64,
    pub received_at: DateTime<Utc>,
}
