use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use crate::events::Event;
use crate::model::{
    Assignment, ChallengePhase, HumanEvalScore, LeaderboardEntry, RatingRecord, SubmissionRecord,
};

/// In-memory fold of the event log. `apply` trusts its input: events are
/// validated before they are written.
#[derive(Clone, Debug, Default)]
pub struct ChallengeState {
    phase: ChallengePhase,
    submissions: Vec<SubmissionRecord>,
    submission_index: HashMap<String, usize>,
    assignments: Vec<Assignment>,
    assignment_index: HashMap<String, usize>,
    closed_assignments: HashSet<String>,
    ratings: Vec<RatingRecord>,
    ratings_by_submission: HashMap<String, Vec<usize>>,
}

impl ChallengeState {
    pub fn from_events<'a>(events: impl IntoIterator<Item = &'a Event>) -> Self {
        let mut state = ChallengeState::default();
        for event in events {
            state.apply(event);
        }
        state
    }

    pub fn apply(&mut self, event: &Event) {
        match event {
            Event::Submission { record } => {
                self.submission_index
                    .insert(record.id.clone(), self.submissions.len());
                self.submissions.push(record.clone());
            }
            Event::AssignmentIssued { assignment } => {
                self.assignment_index
                    .insert(assignment.id.clone(), self.assignments.len());
                self.assignments.push(assignment.clone());
            }
            Event::Rating { record } => {
                self.closed_assignments.insert(record.assignment_id.clone());
                self.ratings_by_submission
                    .entry(record.submission_id.clone())
                    .or_default()
                    .push(self.ratings.len());
                self.ratings.push(record.clone());
            }
            Event::PhaseChange { phase, .. } => self.phase = *phase,
        }
    }

    pub fn phase(&self) -> ChallengePhase {
        self.phase
    }

    pub fn submissions(&self) -> &[SubmissionRecord] {
        &self.submissions
    }

    pub fn submission(&self, id: &str) -> Option<&SubmissionRecord> {
        self.submission_index.get(id).map(|&i| &self.submissions[i])
    }

    pub fn assignment(&self, id: &str) -> Option<&Assignment> {
        self.assignment_index.get(id).map(|&i| &self.assignments[i])
    }

    pub fn is_closed(&self, assignment_id: &str) -> bool {
        self.closed_assignments.contains(assignment_id)
    }

    pub fn ratings_for(&self, submission_id: &str) -> impl Iterator<Item = &RatingRecord> {
        self.ratings_by_submission
            .get(submission_id)
            .into_iter()
            .flatten()
            .map(|&i| &self.ratings[i])
    }

    pub fn rating_count(&self, submission_id: &str) -> usize {
        self.ratings_by_submission
            .get(submission_id)
            .map_or(0, Vec::len)
    }

    pub fn next_submission_id(&self) -> String {
        format!("sub-{:06}", self.submissions.len() + 1)
    }

    pub fn next_assignment_id(&self) -> String {
        format!("asg-{:06}", self.assignments.len() + 1)
    }

    pub fn next_rating_id(&self) -> String {
        format!("rat-{:06}", self.ratings.len() + 1)
    }

    /// Best scored submission per team, ascending by metric value, then by
    /// arrival time, then by id.
    pub fn leaderboard(&self) -> Vec<LeaderboardEntry> {
        let mut best: BTreeMap<&str, LeaderboardEntry> = BTreeMap::new();
        for record in &self.submissions {
            let Some(value) = record.score.gapelmaper() else {
                continue;
            };
            let entry = LeaderboardEntry {
                team: record.team.clone(),
                submission_id: record.id.clone(),
                gapelmaper: value,
                received_at: record.received_at,
            };
            match best.get(record.team.as_str()) {
                Some(current) if rank(current, &entry) != Ordering::Greater => {}
                _ => {
                    best.insert(&record.team, entry);
                }
            }
        }
        let mut entries: Vec<_> = best.into_values().collect();
        entries.sort_by(rank);
        entries
    }

    /// The open assignment a judge is already holding, if any.
    pub fn open_assignment_for(&self, judge_id: &str) -> Option<&Assignment> {
        self.assignments
            .iter()
            .find(|a| a.judge_id == judge_id && !self.is_closed(&a.id))
    }

    /// Submission this judge should rate next: never one they were already
    /// assigned, never one that has `target` ratings; fewest ratings first.
    pub fn candidate_for(&self, judge_id: &str, target: usize) -> Option<&SubmissionRecord> {
        let mut seen_by_judge = HashSet::new();
        let mut open_per_submission: HashMap<&str, usize> = HashMap::new();
        for a in &self.assignments {
            if a.judge_id == judge_id {
                seen_by_judge.insert(a.submission_id.as_str());
            }
            if !self.is_closed(&a.id) {
                *open_per_submission.entry(&a.submission_id).or_default() += 1;
            }
        }
        self.submissions
            .iter()
            .filter(|s| !seen_by_judge.contains(s.id.as_str()))
            .filter(|s| self.rating_count(&s.id) < target)
            .min_by_key(|s| {
                (
                    self.rating_count(&s.id),
                    open_per_submission.get(s.id.as_str()).copied().unwrap_or(0),
                    s.received_at,
                    s.id.clone(),
                )
            })
    }

    pub fn aggregate(&self, submission_id: &str, target: usize) -> Option<HumanEvalScore> {
        let ratings: Vec<_> = self.ratings_for(submission_id).collect();
        if ratings.is_empty() {
            return None;
        }
        let n = ratings.len() as f64;
        let mean = |f: fn(&RatingRecord) -> i64| ratings.iter().map(|r| f(r) as f64).sum::<f64>() / n;
        Some(HumanEvalScore {
            submission_id: submission_id.to_owned(),
            relevance_mean: mean(|r| r.scores.relevance),
            consistency_mean: mean(|r| r.scores.consistency),
            fluency_mean: mean(|r| r.scores.fluency),
            coherence_mean: mean(|r| r.scores.coherence),
            n_judges: ratings.len(),
            complete: ratings.len() >= target,
        })
    }
}

fn rank(a: &LeaderboardEntry, b: &LeaderboardEntry) -> Ordering {
    a.gapelmaper
        .total_cmp(&b.gapelmaper)
        .then(a.received_at.cmp(&b.received_at))
        .then_with(|| a.submission_id.cmp(&b.submission_id))
}
