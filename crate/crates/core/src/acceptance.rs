//! Acceptance of what was said, and its retraction.
//!
//! Conversants must surface a detected discrepancy in belief as soon as
//! possible. So when the addressee's next turn is neither an affirmation nor
//! evidence of conflict, and the dialogue needs acceptance, acceptance is
//! inferred as a default. A checking IRU with rising intonation blocks that
//! inference until the accepter's following turn. Defaults can later be
//! defeated by strictly stronger evidence, which retracts everything that
//! depends on them.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::evidence::{defeats, EvidenceStrength};
use crate::grounding::{normalize_tokens, Act, Intonation, UtteranceEvent};
use crate::ids::{AcceptanceId, NodeId, Participant, Status, SupportId, UtteranceId};
use crate::propositions::{Literal, Proposition};
use crate::state::DiscourseState;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptanceBelief {
    pub id: AcceptanceId,
    /// Utterance whose content was accepted.
    pub utterance: UtteranceId,
    pub proposition: Proposition,
    pub accepting_agent: Participant,
    /// `default` or `linguistic`.
    pub strength: EvidenceStrength,
    pub dependencies: BTreeSet<NodeId>,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConflictKind {
    ExplicitRejection,
    ContradictoryAssertion,
    RisingIru,
}

impl ConflictKind {
    pub fn label(self) -> &'static str {
        match self {
            ConflictKind::ExplicitRejection => "explicit_rejection",
            ConflictKind::ContradictoryAssertion => "contradictory_assertion",
            ConflictKind::RisingIru => "rising_iru",
        }
    }
}

impl fmt::Display for ConflictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Evidence, carried by one utterance, against earlier content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictEvidence {
    pub event: UtteranceId,
    pub kind: ConflictKind,
    /// The clashing pair, when there is propositional content to clash.
    pub clash: Option<(Proposition, Proposition)>,
    /// Utterances whose content the evidence is against.
    pub targets: Vec<UtteranceId>,
    pub strength: EvidenceStrength,
}

impl ConflictEvidence {
    pub fn is_against(&self, utterance: &UtteranceId) -> bool {
        self.targets.contains(utterance)
    }
}

impl fmt::Display for ConflictEvidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.targets.is_empty() {
            let targets: Vec<&str> = self.targets.iter().map(|t| t.as_str()).collect();
            write!(f, " against {}", targets.join(", "))?;
        }
        if let Some((a, b)) = &self.clash {
            write!(f, " ({a} / {b})")?;
        }
        Ok(())
    }
}

/// `belief` is offered as a reason to adopt `goal`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportLink {
    pub id: SupportId,
    pub belief: Proposition,
    pub goal: Proposition,
    pub strength: EvidenceStrength,
    pub dependencies: BTreeSet<NodeId>,
    pub status: Status,
}

/// An acceptance inference held back by a checking question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockedAcceptance {
    pub utterance: UtteranceId,
    pub accepter: Participant,
    pub evidence: ConflictEvidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AcceptanceOutcome {
    Accepted {
        strength: EvidenceStrength,
        beliefs: Vec<AcceptanceId>,
    },
    Blocked,
    Rejected(ConflictEvidence),
    /// The reply carries conflict evidence against other content, so no
    /// default is inferred for this one either.
    Withheld(ConflictEvidence),
    /// Nothing contradicts the content, but the dialogue does not need acceptance.
    NotRequired,
    /// The next turn says nothing about this content.
    NotApplicable,
}

impl AcceptanceOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            AcceptanceOutcome::Accepted { strength, .. } => strength.label(),
            AcceptanceOutcome::Blocked => "blocked",
            AcceptanceOutcome::Rejected(_) => "rejected",
            AcceptanceOutcome::Withheld(_) => "withheld",
            AcceptanceOutcome::NotRequired => "not_required",
            AcceptanceOutcome::NotApplicable => "not_applicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractionReport {
    pub target: NodeId,
    pub evidence: UtteranceId,
    /// All defeated nodes, the target included, sorted.
    pub defeated: Vec<NodeId>,
}

/// Phrases that make an utterance an explicit affirmation when it opens with them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffirmationLexicon {
    phrases: Vec<Vec<String>>,
}

impl Default for AffirmationLexicon {
    fn default() -> Self {
        AffirmationLexicon::new(["that's correct", "right", "yup", "absolutely"])
    }
}

impl AffirmationLexicon {
    pub fn new<I, S>(phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let phrases = phrases
            .into_iter()
            .map(|p| normalize_tokens(p.as_ref()))
            .filter(|p| !p.is_empty())
            .collect();
        AffirmationLexicon { phrases }
    }

    pub fn matches(&self, text: &str) -> bool {
        let tokens = normalize_tokens(text);
        self.phrases.iter().any(|p| tokens.starts_with(p))
    }
}

/// Evidence in `event` against what is in the common ground.
///
/// Annotated rejections come first; otherwise the event's content is
/// checked for a contradiction with the closure of the context.
pub fn detect_conflict(state: &DiscourseState, event: &UtteranceEvent) -> Option<ConflictEvidence> {
    if let Some(target) = &event.rejects {
        let clash = state
            .event(target)
            .and_then(|t| t.realizes.iter().find_map(|p| p.as_literal()))
            .map(|l| (Proposition::Literal(l.clone()), Proposition::Literal(l.negate())));
        return Some(ConflictEvidence {
            event: event.id.clone(),
            kind: ConflictKind::ExplicitRejection,
            clash,
            targets: vec![target.clone()],
            strength: EvidenceStrength::Linguistic,
        });
    }
    if !event.asserts_content() || event.realizes.is_empty() {
        return None;
    }
    let ctx = state.context();
    let found = ctx.would_conflict(&event.realizes, EvidenceStrength::Linguistic, &event.id)?;
    let live_side = |(pos, neg): &(Literal, Literal)| {
        [pos, neg]
            .into_iter()
            .find_map(|l| ctx.find_live(&Proposition::Literal(l.clone())))
    };
    // prefer a clash with something already in the common ground
    let (pos, neg) = found
        .clashes
        .iter()
        .find(|c| live_side(c).is_some())
        .or(found.clashes.first())?
        .clone();
    let live = live_side(&(pos.clone(), neg.clone()));
    let targets = live.map(|e| ctx.supporting_utterances(e.id)).unwrap_or_default();
    Some(ConflictEvidence {
        event: event.id.clone(),
        kind: ConflictKind::ContradictoryAssertion,
        clash: Some((Proposition::Literal(pos), Proposition::Literal(neg))),
        targets,
        strength: EvidenceStrength::Linguistic,
    })
}

fn conflict_from<'a>(state: &'a DiscourseState, event: &UtteranceId) -> Option<&'a ConflictEvidence> {
    state.conflicts.iter().find(|c| &c.event == event)
}

/// Records `evidence` unless the same event's evidence is already recorded.
pub fn record_conflict(state: &mut DiscourseState, evidence: ConflictEvidence) {
    if conflict_from(state, &evidence.event).is_none() {
        state.conflicts.push(evidence);
    }
}

/// What `next`, the addressee's reply, says about acceptance of `prev`.
pub fn evaluate_acceptance(
    state: &mut DiscourseState,
    prev: &UtteranceEvent,
    next: &UtteranceEvent,
) -> Result<AcceptanceOutcome> {
    if next.turn <= prev.turn {
        return Err(Error::OrderingViolation(format!(
            "`{}` (turn {}) cannot answer `{}` (turn {})",
            next.id, next.turn, prev.id, prev.turn
        )));
    }
    if next.speaker != prev.addressee || next.interrupted {
        return Ok(AcceptanceOutcome::NotApplicable);
    }
    if !prev.asserts_content() || prev.realizes.is_empty() {
        return Ok(AcceptanceOutcome::NotApplicable);
    }
    if conflict_from(state, &next.id).is_none() {
        if let Some(c) = detect_conflict(state, next) {
            state.conflicts.push(c);
        }
    }
    judge(state, prev, next)
}

fn judge(state: &mut DiscourseState, prev: &UtteranceEvent, next: &UtteranceEvent) -> Result<AcceptanceOutcome> {
    if next.act == Act::Affirmation {
        return Ok(accept(state, prev, next, EvidenceStrength::Linguistic));
    }
    if let Some(c) = conflict_from(state, &next.id).filter(|c| c.is_against(&prev.id)) {
        let c = c.clone();
        state
            .blocked
            .retain(|b| b.utterance != prev.id || b.accepter != next.speaker);
        return Ok(AcceptanceOutcome::Rejected(c));
    }
    if let Some(c) = conflict_from(state, &next.id) {
        return Ok(AcceptanceOutcome::Withheld(c.clone()));
    }
    if next.intonation == Intonation::Rising {
        if !state
            .blocked
            .iter()
            .any(|b| b.utterance == prev.id && b.accepter == next.speaker)
        {
            state.blocked.push(BlockedAcceptance {
                utterance: prev.id.clone(),
                accepter: next.speaker.clone(),
                evidence: ConflictEvidence {
                    event: next.id.clone(),
                    kind: ConflictKind::RisingIru,
                    clash: None,
                    targets: vec![prev.id.clone()],
                    strength: EvidenceStrength::Linguistic,
                },
            });
        }
        return Ok(AcceptanceOutcome::Blocked);
    }
    if state.require_acceptance() {
        return Ok(accept(state, prev, next, EvidenceStrength::Default));
    }
    Ok(AcceptanceOutcome::NotRequired)
}

/// Gives every acceptance blocked for `next`'s speaker another look, in
/// the order they were blocked.
pub fn reevaluate_blocked(
    state: &mut DiscourseState,
    next: &UtteranceEvent,
) -> Result<Vec<(UtteranceId, AcceptanceOutcome)>> {
    if next.interrupted {
        return Ok(Vec::new());
    }
    let pending: Vec<UtteranceId> = state
        .blocked
        .iter()
        .filter(|b| b.accepter == next.speaker)
        .map(|b| b.utterance.clone())
        .collect();
    let mut out = Vec::new();
    for id in pending {
        let prev = state
            .event(&id)
            .cloned()
            .ok_or_else(|| Error::UnknownNode(NodeId::Utterance(id.clone())))?;
        if next.turn <= prev.turn {
            return Err(Error::OrderingViolation(format!(
                "`{}` does not follow `{}`",
                next.id, prev.id
            )));
        }
        if conflict_from(state, &next.id).is_none() {
            if let Some(c) = detect_conflict(state, next) {
                state.conflicts.push(c);
            }
        }
        let outcome = judge(state, &prev, next)?;
        if outcome != AcceptanceOutcome::Blocked {
            state
                .blocked
                .retain(|b| b.utterance != id || b.accepter != next.speaker);
        }
        out.push((id, outcome));
    }
    Ok(out)
}

fn accept(
    state: &mut DiscourseState,
    prev: &UtteranceEvent,
    next: &UtteranceEvent,
    strength: EvidenceStrength,
) -> AcceptanceOutcome {
    let trigger = NodeId::Utterance(next.id.clone());
    let mut beliefs = Vec::new();
    for p in &prev.realizes {
        let existing = state.acceptances.iter_mut().find(|a| {
            a.status == Status::Live
                && a.utterance == prev.id
                && &a.proposition == p
                && a.accepting_agent == next.speaker
        });
        match existing {
            Some(a) => {
                a.strength = a.strength.max(strength);
                a.dependencies.insert(trigger.clone());
                beliefs.push(a.id);
            }
            None => {
                let id = AcceptanceId(state.acceptances.len() as u32);
                state.acceptances.push(AcceptanceBelief {
                    id,
                    utterance: prev.id.clone(),
                    proposition: p.clone(),
                    accepting_agent: next.speaker.clone(),
                    strength,
                    dependencies: [trigger.clone()].into_iter().collect(),
                    status: Status::Live,
                });
                beliefs.push(id);
            }
        }
    }
    state
        .blocked
        .retain(|b| b.utterance != prev.id || b.accepter != next.speaker);
    AcceptanceOutcome::Accepted { strength, beliefs }
}

/// Defeats `target` with strictly stronger evidence and retracts every live
/// belief that depends on it, directly or transitively. Strengths are left
/// untouched; only statuses change.
pub fn defeat(state: &mut DiscourseState, target: NodeId, by: &ConflictEvidence) -> Result<RetractionReport> {
    if matches!(target, NodeId::Utterance(_)) {
        return Err(Error::InvalidArgument(format!("{target} is evidence, not a belief")));
    }
    let (Some(strength), Some(status)) = (state.strength_of(&target), state.status_of(&target)) else {
        return Err(Error::UnknownNode(target));
    };
    if status == Status::Defeated {
        return Ok(RetractionReport {
            target,
            evidence: by.event.clone(),
            defeated: Vec::new(),
        });
    }
    if !defeats(by.strength, strength) {
        return Err(Error::DefeatRejected {
            target,
            target_strength: strength,
            evidence_strength: by.strength,
        });
    }
    let defeated = state.cascade(std::slice::from_ref(&target));
    Ok(RetractionReport {
        target,
        evidence: by.event.clone(),
        defeated,
    })
}

/// Records that `belief` is a reason for adopting `goal`. Live acceptances
/// of the goal come to depend on the link.
pub fn record_support(state: &mut DiscourseState, belief: &Proposition, goal: &Proposition) -> Result<SupportId> {
    for p in [belief, goal] {
        if !state.holds(p) {
            return Err(Error::UnknownProposition(p.to_string()));
        }
    }
    if let Some(s) = state
        .supports
        .iter()
        .find(|s| s.status == Status::Live && &s.belief == belief && &s.goal == goal)
    {
        return Ok(s.id);
    }
    let (strength, dependencies) = match state.context().find_live(belief) {
        Some(e) => (e.strength, [NodeId::Entry(e.id)].into_iter().collect()),
        None => (EvidenceStrength::Inference, BTreeSet::new()),
    };
    let id = SupportId(state.supports.len() as u32);
    state.supports.push(SupportLink {
        id,
        belief: belief.clone(),
        goal: goal.clone(),
        strength,
        dependencies,
        status: Status::Live,
    });
    for a in state.acceptances.iter_mut() {
        if a.status == Status::Live && &a.proposition == goal {
            a.dependencies.insert(NodeId::Support(id));
        }
    }
    Ok(id)
}
