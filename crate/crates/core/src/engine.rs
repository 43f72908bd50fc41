//! Replays utterance events through grounding and acceptance.

use std::collections::BTreeSet;

use crate::acceptance::{
    defeat, detect_conflict, evaluate_acceptance, record_conflict, record_support, reevaluate_blocked,
    AcceptanceOutcome, ConflictEvidence, ConflictKind, RetractionReport,
};
use crate::error::{Error, Result};
use crate::evidence::EvidenceStrength;
use crate::grounding::{classify_iru, IruClass, LicenseLink, LicenseOrigin, UtteranceEvent};
use crate::ids::{EntryId, NodeId, Participant, Status, UtteranceId};
use crate::propositions::{Origin, Proposition};
use crate::state::DiscourseState;
use crate::trace::{AcceptanceLine, DerivedLine, RecordSnapshot, SupportLine, TraceRecord};
use crate::transcript::Transcript;

/// Sequential processor for one dialogue.
#[derive(Debug, Clone)]
pub struct Engine {
    state: DiscourseState,
}

impl Engine {
    pub fn new(a: Participant, b: Participant, require_acceptance: bool) -> Result<Self> {
        Ok(Engine {
            state: DiscourseState::new(a, b, require_acceptance)?,
        })
    }

    pub fn for_transcript(t: &Transcript) -> Result<Self> {
        let [a, b] = t.participants.clone();
        Engine::new(a, b, t.require_acceptance)
    }

    pub fn state(&self) -> &DiscourseState {
        &self.state
    }

    pub fn into_state(self) -> DiscourseState {
        self.state
    }

    /// Processes one event. On error the state is left as it was.
    pub fn process(&mut self, event: UtteranceEvent) -> Result<TraceRecord> {
        let mut next = self.state.clone();
        let record = step(&mut next, event)?;
        self.state = next;
        Ok(record)
    }
}

/// Replays a whole transcript, returning the final state and one trace
/// record per event.
pub fn replay(t: &Transcript) -> Result<(DiscourseState, Vec<TraceRecord>)> {
    let mut engine = Engine::for_transcript(t)?;
    let mut records = Vec::with_capacity(t.events.len());
    for e in &t.events {
        records.push(engine.process(e.clone())?);
    }
    Ok((engine.into_state(), records))
}

fn step(state: &mut DiscourseState, event: UtteranceEvent) -> Result<TraceRecord> {
    state.check_event(&event)?;
    let classification = classify_iru(&event, state)?;
    let licenses_before = state.licenses().to_vec();
    let mut touched: BTreeSet<UtteranceId> = BTreeSet::new();

    state.open_record(&event)?;
    touched.insert(event.id.clone());

    // any next utterance by the addressee, before the event's own upgrade
    if !event.interrupted {
        for id in state.awaiting_next_from(&event.speaker) {
            if state.upgrade_any_next(&id)? {
                touched.insert(id);
            }
        }
    }

    let class = classification.class;
    if class.is_iru() {
        for a in &classification.antecedents {
            let addressed = state.event(a).map(|e| e.addressee == event.speaker).unwrap_or(false);
            if addressed && state.upgrade_iru(a, class)? {
                touched.insert(a.clone());
            }
        }
        let origin = match class {
            IruClass::ExplicitInference => Some(LicenseOrigin::Entailment),
            IruClass::ImplicatureReinforcement => Some(LicenseOrigin::Implicature),
            _ => None,
        };
        if let Some(origin) = origin {
            let links: Vec<LicenseLink> = state
                .licenses()
                .iter()
                .filter(|l| l.origin == origin && event.realizes.contains(&l.conclusion))
                .cloned()
                .collect();
            for l in links {
                state.record_license_evidence(l, EvidenceStrength::Linguistic)?;
            }
        }
    }

    let conflict = detect_conflict(state, &event);
    if let Some(c) = &conflict {
        record_conflict(state, c.clone());
    }

    let mut acceptances = Vec::new();
    let mut retractions = Vec::new();
    let mut answered = BTreeSet::new();
    for (utterance, outcome) in reevaluate_blocked(state, &event)? {
        answered.insert(utterance.clone());
        acceptances.push(AcceptanceLine {
            utterance,
            agent: event.speaker.clone(),
            outcome,
        });
    }
    if let Some(prev) = state.last_event().cloned() {
        if !answered.contains(&prev.id) {
            let outcome = evaluate_acceptance(state, &prev, &event)?;
            if outcome != AcceptanceOutcome::NotApplicable {
                acceptances.push(AcceptanceLine {
                    utterance: prev.id.clone(),
                    agent: event.speaker.clone(),
                    outcome,
                });
            }
        }
    }

    // stronger evidence against older content defeats default acceptances of it
    if let Some(c) = &conflict {
        for target in &c.targets {
            let weaker: Vec<NodeId> = state
                .acceptances()
                .iter()
                .filter(|a| a.status == Status::Live && &a.utterance == target && a.strength < c.strength)
                .map(|a| NodeId::Acceptance(a.id))
                .collect();
            for node in weaker {
                let report = defeat(state, node, c)?;
                if !report.defeated.is_empty() {
                    retractions.push(report);
                }
            }
        }
    }

    state.push_event(event.clone())?;

    let mut derived = Vec::new();
    let mut kept_out = false;
    if event.asserts_content() && !event.realizes.is_empty() {
        let mut trial = state.clone();
        match assert_content(&mut trial, &event, conflict.as_ref()) {
            Ok((reports, touched_entries)) => {
                *state = trial;
                retractions.extend(reports);
                derived = record_entailments(state, &touched_entries)?;
            }
            // the clash stands; the content stays out of the common ground
            Err(Error::Conflict(_)) => kept_out = true,
            Err(e) => return Err(e),
        }
    }

    // annotations on content that never entered the common ground have nothing to attach to
    if let Some(link) = event.implicates.as_ref().filter(|_| !kept_out) {
        state.record_license_evidence(
            LicenseLink {
                premise: link.from.clone(),
                conclusion: link.to.clone(),
                strength: EvidenceStrength::Hypothesis,
                origin: LicenseOrigin::Implicature,
                source: Some(event.id.clone()),
            },
            EvidenceStrength::Hypothesis,
        )?;
    }

    let mut supports = Vec::new();
    if let Some(link) = event.supports.as_ref().filter(|_| !kept_out) {
        let id = record_support(state, &link.from, &link.to)?;
        let s = &state.supports()[id.0 as usize];
        supports.push(SupportLine {
            belief: s.belief.clone(),
            goal: s.goal.clone(),
            strength: s.strength,
        });
    }

    let licenses = state
        .licenses()
        .iter()
        .filter(|l| !licenses_before.contains(l))
        .cloned()
        .collect();
    let records = state
        .records()
        .iter()
        .filter(|r| touched.contains(&r.utterance_id))
        .map(RecordSnapshot::of)
        .collect();

    Ok(TraceRecord {
        event: event.id.clone(),
        turn: event.turn,
        speaker: event.speaker.clone(),
        addressee: event.addressee.clone(),
        act: event.act,
        intonation: event.intonation,
        class,
        antecedents: classification.antecedents,
        records,
        acceptances,
        conflicts: conflict.into_iter().collect(),
        retractions,
        licenses,
        derived,
        supports,
    })
}

// Adds the event's content at linguistic strength, first defeating weaker
// beliefs it contradicts. Fails with a conflict when a clash cannot be
// resolved that way.
fn assert_content(
    state: &mut DiscourseState,
    event: &UtteranceEvent,
    conflict: Option<&ConflictEvidence>,
) -> Result<(Vec<RetractionReport>, Vec<EntryId>)> {
    let strength = EvidenceStrength::Linguistic;
    let mut reports = Vec::new();
    while let Some(found) = state.context().would_conflict(&event.realizes, strength, &event.id) {
        let weaker: Vec<EntryId> = found
            .clashes
            .iter()
            .flat_map(|(pos, neg)| [pos, neg])
            .filter_map(|l| state.context().find_live(&Proposition::Literal(l.clone())))
            .filter(|e| e.strength < strength)
            .map(|e| e.id)
            .collect();
        let Some(target) = weaker.first() else {
            return Err(found.into());
        };
        let by = match conflict {
            Some(c) => c.clone(),
            None => ConflictEvidence {
                event: event.id.clone(),
                kind: ConflictKind::ContradictoryAssertion,
                clash: None,
                targets: Vec::new(),
                strength,
            },
        };
        reports.push(defeat(state, NodeId::Entry(*target), &by)?);
    }
    for p in &event.realizes {
        let (outcome, defeated) = state.assert_said(p.clone(), strength, event.id.clone())?;
        if !defeated.is_empty() {
            reports.push(RetractionReport {
                target: NodeId::Entry(outcome.superseded[0]),
                evidence: event.id.clone(),
                defeated,
            });
        }
    }
    let touched = state.close_context()?;
    Ok((reports, touched))
}

// Each newly derived literal is licensed by the literal premises it rests on.
fn record_entailments(state: &mut DiscourseState, touched: &[EntryId]) -> Result<Vec<DerivedLine>> {
    let mut derived = Vec::new();
    for id in touched {
        let Some(entry) = state.context().entry(*id).cloned() else {
            continue;
        };
        if !entry.is_live() || entry.origin != Origin::Inferred {
            continue;
        }
        derived.push(DerivedLine {
            proposition: entry.proposition.clone(),
            strength: entry.strength,
        });
        for d in &entry.dependencies {
            let NodeId::Entry(premise) = d else { continue };
            let Some(premise) = state.context().entry(*premise).cloned() else {
                continue;
            };
            if premise.proposition.as_literal().is_none() {
                continue;
            }
            state.record_license_evidence(
                LicenseLink {
                    premise: premise.proposition,
                    conclusion: entry.proposition.clone(),
                    strength: entry.strength,
                    origin: LicenseOrigin::Entailment,
                    source: None,
                },
                entry.strength,
            )?;
        }
    }
    Ok(derived)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::EvidenceStrength::*;
    use crate::grounding::{Act, Assumption, Intonation};

    fn p(s: &str) -> Proposition {
        s.parse().unwrap()
    }

    fn ev(id: &str, turn: usize, speaker: &str, text: &str, props: &[&str]) -> UtteranceEvent {
        let addressee = if speaker == "h" { "r" } else { "h" };
        let mut e = UtteranceEvent::new(id, turn, speaker, addressee, text);
        e.realizes = props.iter().map(|s| p(s)).collect();
        e
    }

    #[test]
    fn repeat_after_answer() {
        let mut engine = Engine::new("h".into(), "r".into(), true).unwrap();
        let mut q = ev("u6", 0, "r", "does it knock her out", &["knocksOut"]);
        q.act = Act::Question;
        engine.process(q).unwrap();
        engine.process(ev("u7", 1, "h", "yes it does", &["knocksOut"])).unwrap();
        let mut rep = ev("u8", 2, "r", "IT DOES", &["knocksOut"]);
        rep.antecedents = vec!["u7".into()];
        let t = engine.process(rep).unwrap();
        assert_eq!(t.class, IruClass::Repeat);
        let u7 = t.record("u7").unwrap();
        assert_eq!(u7.get(Assumption::Copresent), Some(Linguistic));
        assert_eq!(u7.get(Assumption::Attend), Some(Linguistic));
        assert_eq!(u7.get(Assumption::Hear), Some(Linguistic));
        assert_eq!(u7.get(Assumption::Realize), Some(Default));
        assert_eq!(u7.understand, Default);
        assert_eq!(t.acceptance("u7").unwrap().outcome.label(), "default");
    }

    #[test]
    fn failed_event_leaves_state_alone() {
        let mut engine = Engine::new("h".into(), "r".into(), false).unwrap();
        engine.process(ev("u1", 1, "h", "a", &["a"])).unwrap();
        let before = engine.state().events().len();
        let err = engine.process(ev("u2", 1, "r", "b", &["b"])).unwrap_err();
        assert!(matches!(err, Error::OrderingViolation(_)));
        assert_eq!(engine.state().events().len(), before);
        assert!(engine.state().record(&"u2".into()).is_none());
    }

    #[test]
    fn contradiction_keeps_content_out() {
        let mut engine = Engine::new("h".into(), "r".into(), true).unwrap();
        engine
            .process(ev("u13", 0, "h", "available last year", &["avail"]))
            .unwrap();
        let t = engine
            .process(ev(
                "u14",
                1,
                "r",
                "started this year",
                &["started", "started -> !avail"],
            ))
            .unwrap();
        assert_eq!(t.conflicts[0].kind, ConflictKind::ContradictoryAssertion);
        assert_eq!(t.acceptance("u13").unwrap().outcome.label(), "rejected");
        assert!(!engine.state().holds(&p("started")));
        assert!(engine.state().holds(&p("avail")));
    }

    #[test]
    fn weaker_derived_belief_gives_way() {
        let mut engine = Engine::new("h".into(), "r".into(), false).unwrap();
        engine.process(ev("u1", 0, "h", "if a then b", &["a -> b"])).unwrap();
        engine.process(ev("u2", 1, "r", "b is false", &["!b"])).unwrap();
        // !a was derived by contraposition at inference strength
        assert_eq!(
            engine.state().context().find_live(&p("!a")).unwrap().strength,
            Inference
        );
        let t = engine.process(ev("u3", 2, "h", "a holds", &["a"])).unwrap();
        // a -> b and !b are both linguistic, so a cannot be made to hold
        assert!(t.conflicts.len() == 1);
        assert!(!engine.state().holds(&p("a")));
    }

    #[test]
    fn rising_reply_blocks_then_affirmation_is_not_from_the_accepter() {
        let mut engine = Engine::new("h".into(), "r".into(), true).unwrap();
        engine
            .process(ev("u38", 0, "h", "fifteen in a two and a half", &["cd"]))
            .unwrap();
        let mut check = ev("u39", 1, "r", "the full 15 in a 2 and a half?", &["cd"]);
        check.act = Act::Question;
        check.intonation = Intonation::Rising;
        check.antecedents = vec!["u38".into()];
        let t = engine.process(check).unwrap();
        assert_eq!(t.acceptance("u38").unwrap().outcome, AcceptanceOutcome::Blocked);
        let mut yes = ev("u40", 2, "h", "that's correct", &[]);
        yes.act = Act::Affirmation;
        let t = engine.process(yes).unwrap();
        assert!(t.acceptances.is_empty());
        let mut no = ev("u41", 3, "r", "GEE. NOT AT MY AGE", &[]);
        no.act = Act::Other;
        no.rejects = Some("u38".into());
        let t = engine.process(no).unwrap();
        assert_eq!(t.acceptance("u38").unwrap().outcome.label(), "rejected");
        assert!(engine.state().acceptances().is_empty());
    }
}
