//! Challenge service: accepts long-text submissions, scores them with the
//! GAPELMAPER metric, keeps a leaderboard of each team's best submission,
//! and runs the human-evaluation campaign in which five judges rate every
//! text on relevance, consistency, fluency and coherence.
//!
//! State is event-sourced: every mutation is appended to a newline-delimited
//! JSON log before it is applied, and [`Challenge::open`] rebuilds the exact
//! same state by replaying that log.

pub mod challenge;
pub mod error;
pub mod events;
pub mod http;
pub mod model;
pub mod state;

pub use challenge::{normalize_whitespace, score_text, Challenge, ChallengeConfig, ValidSubmission};
pub use error::ServiceError;
pub use events::{Event, EventLog};
pub use http::{router, serve, AppState};
pub use model::*;
pub use state::ChallengeState;
