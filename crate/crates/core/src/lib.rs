//! Graded mutual belief in two-party dialogue.
//!
//! Utterances are replayed one at a time. Each opens an assumption record
//! whose weakest assumption bounds how well the addressee is taken to have
//! understood it. Informationally redundant utterances (repeats,
//! paraphrases, explicit inferences and the like) upgrade the evidence
//! behind those assumptions. Acceptance is inferred by default unless the
//! reply shows a discrepancy, and defaults are retracted, with everything
//! built on them, when stronger contrary evidence arrives.

pub mod acceptance;
pub mod analysis;
pub mod engine;
pub mod error;
pub mod evidence;
pub mod grounding;
pub mod ids;
pub mod propositions;
pub mod state;
pub mod trace;
pub mod transcript;

pub use engine::{replay, Engine};
pub use error::{Error, Result};
pub use evidence::{defeats, min_strength, EvidenceStrength};
pub use grounding::{Assumption, AssumptionRecord, IruClass, UtteranceEvent};
pub use ids::{NodeId, Participant, Status, UtteranceId};
pub use propositions::{Context, Literal, Proposition};
pub use state::DiscourseState;
pub use trace::{write_trace, TraceRecord};
pub use transcript::{parse, serialize, Transcript};
