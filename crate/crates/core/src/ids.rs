use std::fmt;

/// Identifier of one utterance within a dialogue (`u7`, `u20`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UtteranceId(pub String);

impl UtteranceId {
    pub fn new(id: impl Into<String>) -> Self {
        UtteranceId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UtteranceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UtteranceId {
    fn from(s: &str) -> Self {
        UtteranceId(s.to_string())
    }
}

/// One of the two dialogue participants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Participant(pub String);

impl Participant {
    pub fn new(id: impl Into<String>) -> Self {
        Participant(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Participant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Participant {
    fn from(s: &str) -> Self {
        Participant(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntryId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AcceptanceId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportId(pub u32);

/// A node of the dependency graph used for retraction.
///
/// Utterance nodes are evidence leaves: beliefs may depend on them but they
/// are never defeated themselves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeId {
    Entry(EntryId),
    Acceptance(AcceptanceId),
    Support(SupportId),
    Utterance(UtteranceId),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Entry(e) => write!(f, "entry#{}", e.0),
            NodeId::Acceptance(a) => write!(f, "acceptance#{}", a.0),
            NodeId::Support(s) => write!(f, "support#{}", s.0),
            NodeId::Utterance(u) => write!(f, "utterance:{u}"),
        }
    }
}

impl From<EntryId> for NodeId {
    fn from(id: EntryId) -> Self {
        NodeId::Entry(id)
    }
}

impl From<AcceptanceId> for NodeId {
    fn from(id: AcceptanceId) -> Self {
        NodeId::Acceptance(id)
    }
}

impl From<SupportId> for NodeId {
    fn from(id: SupportId) -> Self {
        NodeId::Support(id)
    }
}

/// Live beliefs can be defeated; defeated ones stay in the store for the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Live,
    Defeated,
}
