use thiserror::Error;

use crate::evidence::EvidenceStrength;
use crate::ids::{NodeId, UtteranceId};
use crate::propositions::ConflictDetected;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Conflict(#[from] ConflictDetected),

    #[error("duplicate utterance id `{0}`")]
    DuplicateUtterance(UtteranceId),

    #[error("utterance `{event}` refers to `{antecedent}`, which is not an earlier utterance")]
    DanglingAntecedent {
        event: UtteranceId,
        antecedent: UtteranceId,
    },

    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),

    #[error("unknown belief {0}")]
    UnknownNode(NodeId),

    #[error("ordering violation: {0}")]
    OrderingViolation(String),

    #[error("{target} held at {target_strength} cannot be defeated by {evidence_strength} evidence")]
    DefeatRejected {
        target: NodeId,
        target_strength: EvidenceStrength,
        evidence_strength: EvidenceStrength,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
