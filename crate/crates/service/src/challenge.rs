//! Challenge workflow: submission intake and scoring, leaderboard, judge
//! assignments, ratings and their aggregation, phase gating.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::{DateTime, Utc};
use ltg_core::{analyze_text, count_tokens, AnalysisConfig, EmbeddingTable};

use crate::error::ServiceError;
use crate::events::{Event, EventLog};
use crate::model::{
    Assignment, AssignmentView, ChallengePhase, ErrorBody, HumanEvalScore, LeaderboardEntry,
    Prompt, RatingRecord, RatingScores, ScoreStatus, SubmissionRecord,
};
use crate::state::ChallengeState;

#[derive(Clone, Debug)]
pub struct ChallengeConfig {
    pub prompts: BTreeMap<String, Prompt>,
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub judges_per_submission: usize,
    pub analysis: AnalysisConfig,
}

impl Default for ChallengeConfig {
    fn default() -> Self {
        ChallengeConfig {
            prompts: BTreeMap::new(),
            min_tokens: 40_000,
            max_tokens: 2_000_000,
            judges_per_submission: 5,
            analysis: AnalysisConfig::default(),
        }
    }
}

impl ChallengeConfig {
    pub fn with_prompts(prompts: impl IntoIterator<Item = Prompt>) -> Self {
        ChallengeConfig {
            prompts: prompts.into_iter().map(|p| (p.id.clone(), p)).collect(),
            ..Default::default()
        }
    }

    /// Reads a JSON array of `{id, text, reference_text?}` objects.
    pub fn load_prompts(path: impl AsRef<Path>) -> Result<Vec<Prompt>, ServiceError> {
        let raw = fs::read_to_string(path)?;
        serde_json::from_str(&raw).map_err(|e| ServiceError::BadRequest(format!("prompt file: {e}")))
    }
}

/// Collapses whitespace runs to single spaces and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A submission that passed the intake checks and awaits scoring.
#[derive(Clone, Debug)]
pub struct ValidSubmission {
    pub team: String,
    pub prompt_id: String,
    pub text: String,
    pub token_count: usize,
}

/// Runs the metric and folds its outcome into a record status.
pub fn score_text(text: &str, table: &EmbeddingTable, config: &AnalysisConfig) -> ScoreStatus {
    match analyze_text(text, table, config) {
        Ok(report) => ScoreStatus::Scored { report },
        Err(e) => ScoreStatus::Error {
            error: ErrorBody {
                error: e.code().to_owned(),
                message: e.to_string(),
            },
        },
    }
}

type Clock = Box<dyn Fn() -> DateTime<Utc> + Send + Sync>;

pub struct Challenge {
    config: ChallengeConfig,
    state: ChallengeState,
    log: EventLog,
    clock: Clock,
}

impl Challenge {
    /// A challenge whose events are not persisted.
    pub fn in_memory(config: ChallengeConfig) -> Self {
        Challenge {
            config,
            state: ChallengeState::default(),
            log: EventLog::memory(),
            clock: Box::new(Utc::now),
        }
    }

    /// Opens the event log at `path`, rebuilding state from it.
    pub fn open(config: ChallengeConfig, path: impl AsRef<Path>) -> Result<Self, ServiceError> {
        let (log, events) = EventLog::open(path)?;
        Ok(Challenge {
            config,
            state: ChallengeState::from_events(&events),
            log,
            clock: Box::new(Utc::now),
        })
    }

    pub fn with_clock(mut self, clock: impl Fn() -> DateTime<Utc> + Send + Sync + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    pub fn config(&self) -> &ChallengeConfig {
        &self.config
    }

    pub fn state(&self) -> &ChallengeState {
        &self.state
    }

    pub fn phase(&self) -> ChallengePhase {
        self.state.phase()
    }

    fn record(&mut self, event: Event) -> Result<(), ServiceError> {
        self.log.append(&event)?;
        self.state.apply(&event);
        Ok(())
    }

    fn require_phase(&self, required: ChallengePhase) -> Result<(), ServiceError> {
        let current = self.phase();
        if current != required {
            return Err(ServiceError::WrongPhase { current, required });
        }
        Ok(())
    }

    pub fn set_phase(&mut self, phase: ChallengePhase) -> Result<(), ServiceError> {
        let from = self.phase();
        if phase <= from {
            return Err(ServiceError::InvalidPhaseTransition { from, to: phase });
        }
        let at = (self.clock)();
        tracing::info!(%from, to = %phase, "phase change");
        self.record(Event::PhaseChange { phase, at })
    }

    /// Intake checks that do not need the metric: phase, prompt, prefix and
    /// length bounds.
    pub fn validate_submission(
        &self,
        team: &str,
        prompt_id: &str,
        text: &str,
    ) -> Result<ValidSubmission, ServiceError> {
        self.require_phase(ChallengePhase::Leaderboard)?;
        if team.trim().is_empty() {
            return Err(ServiceError::BadRequest("team must not be empty".into()));
        }
        let prompt = self
            .config
            .prompts
            .get(prompt_id)
            .ok_or_else(|| ServiceError::UnknownPrompt(prompt_id.to_owned()))?;
        if !normalize_whitespace(text).starts_with(&normalize_whitespace(&prompt.text)) {
            return Err(ServiceError::PromptPrefixMismatch(prompt_id.to_owned()));
        }
        let tokens = count_tokens(text);
        if tokens < self.config.min_tokens {
            return Err(ServiceError::TooShort {
                tokens,
                min: self.config.min_tokens,
            });
        }
        if tokens > self.config.max_tokens {
            return Err(ServiceError::TooLong {
                tokens,
                max: self.config.max_tokens,
            });
        }
        Ok(ValidSubmission {
            team: team.to_owned(),
            prompt_id: prompt_id.to_owned(),
            text: text.to_owned(),
            token_count: tokens,
        })
    }

    /// Persists a validated, scored submission. The phase is checked again
    /// since scoring runs outside any lock.
    pub fn commit_submission(
        &mut self,
        submission: ValidSubmission,
        score: ScoreStatus,
    ) -> Result<SubmissionRecord, ServiceError> {
        self.require_phase(ChallengePhase::Leaderboard)?;
        let record = SubmissionRecord {
            id: self.state.next_submission_id(),
            team: submission.team,
            prompt_id: submission.prompt_id,
            text: submission.text,
            token_count: submission.token_count,
            score,
            received_at: (self.clock)(),
        };
        tracing::info!(id = %record.id, team = %record.team, value = ?record.score.gapelmaper(), "submission");
        self.record(Event::Submission {
            record: record.clone(),
        })?;
        Ok(record)
    }

    /// Validate, score and persist in one call.
    pub fn submit(
        &mut self,
        team: &str,
        prompt_id: &str,
        text: &str,
        table: &EmbeddingTable,
    ) -> Result<SubmissionRecord, ServiceError> {
        let valid = self.validate_submission(team, prompt_id, text)?;
        let score = score_text(&valid.text, table, &self.config.analysis);
        self.commit_submission(valid, score)
    }

    pub fn leaderboard(&self) -> Result<Vec<LeaderboardEntry>, ServiceError> {
        if self.phase() < ChallengePhase::Leaderboard {
            return Err(ServiceError::WrongPhase {
                current: self.phase(),
                required: ChallengePhase::Leaderboard,
            });
        }
        Ok(self.state.leaderboard())
    }

    /// Hands the judge their open assignment, or issues a new one for the
    /// least-rated submission they have not seen.
    pub fn next_assignment(&mut self, judge_id: &str) -> Result<AssignmentView, ServiceError> {
        self.require_phase(ChallengePhase::HumanEval)?;
        if judge_id.trim().is_empty() {
            return Err(ServiceError::BadRequest("judge id must not be empty".into()));
        }
        let assignment = match self.state.open_assignment_for(judge_id) {
            Some(open) => open.clone(),
            None => {
                let submission = self
                    .state
                    .candidate_for(judge_id, self.config.judges_per_submission)
                    .ok_or_else(|| ServiceError::NoWorkAvailable(judge_id.to_owned()))?;
                let assignment = Assignment {
                    id: self.state.next_assignment_id(),
                    submission_id: submission.id.clone(),
                    judge_id: judge_id.to_owned(),
                    issued_at: (self.clock)(),
                };
                self.record(Event::AssignmentIssued {
                    assignment: assignment.clone(),
                })?;
                assignment
            }
        };
        let submission = self
            .state
            .submission(&assignment.submission_id)
            .expect("assignments reference recorded submissions");
        let reference_text = self
            .config
            .prompts
            .get(&submission.prompt_id)
            .and_then(|p| p.reference_text.clone());
        Ok(AssignmentView {
            assignment_id: assignment.id,
            submission_id: submission.id.clone(),
            prompt_id: submission.prompt_id.clone(),
            text: submission.text.clone(),
            reference_text,
        })
    }

    pub fn record_rating(
        &mut self,
        assignment_id: &str,
        scores: RatingScores,
    ) -> Result<RatingRecord, ServiceError> {
        self.require_phase(ChallengePhase::HumanEval)?;
        let assignment = self
            .state
            .assignment(assignment_id)
            .ok_or_else(|| ServiceError::UnknownAssignment(assignment_id.to_owned()))?
            .clone();
        if self.state.is_closed(assignment_id)
            || self
                .state
                .ratings_for(&assignment.submission_id)
                .any(|r| r.judge_id == assignment.judge_id)
        {
            return Err(ServiceError::DuplicateRating(assignment_id.to_owned()));
        }
        if let Some((dimension, value)) = scores.out_of_range() {
            return Err(ServiceError::ScoreOutOfRange { dimension, value });
        }
        let record = RatingRecord {
            id: self.state.next_rating_id(),
            assignment_id: assignment.id,
            submission_id: assignment.submission_id,
            judge_id: assignment.judge_id,
            scores,
            submitted_at: (self.clock)(),
        };
        self.record(Event::Rating {
            record: record.clone(),
        })?;
        Ok(record)
    }

    pub fn aggregate_human_scores(&self, submission_id: &str) -> Result<HumanEvalScore, ServiceError> {
        if self.state.submission(submission_id).is_none() {
            return Err(ServiceError::UnknownSubmission(submission_id.to_owned()));
        }
        self.state
            .aggregate(submission_id, self.config.judges_per_submission)
            .ok_or_else(|| ServiceError::NoRatings(submission_id.to_owned()))
    }
}
