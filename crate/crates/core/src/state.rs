use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::acceptance::{AcceptanceBelief, BlockedAcceptance, ConflictEvidence, SupportLink};
use crate::error::{Error, Result};
use crate::evidence::EvidenceStrength;
use crate::grounding::{
    apply_any_next_upgrade, apply_iru_upgrade, open_record, understanding_strength, AssumptionRecord, IruClass,
    LicenseLink, UnderstandingBelief, UtteranceEvent,
};
use crate::ids::{EntryId, NodeId, Participant, Status, UtteranceId};
use crate::propositions::{AssertOutcome, Context, Proposition};

/// Everything known about one two-party dialogue so far.
///
/// Processing is strictly sequential; distinct dialogues have distinct
/// states and can be replayed in parallel.
#[derive(Debug, Clone)]
pub struct DiscourseState {
    participants: [Participant; 2],
    require_acceptance: bool,
    events: Vec<UtteranceEvent>,
    event_index: HashMap<UtteranceId, usize>,
    records: Vec<AssumptionRecord>,
    record_index: HashMap<UtteranceId, usize>,
    any_next_done: BTreeSet<UtteranceId>,
    context: Context,
    licenses: Vec<LicenseLink>,
    pub(crate) acceptances: Vec<AcceptanceBelief>,
    pub(crate) supports: Vec<SupportLink>,
    pub(crate) conflicts: Vec<ConflictEvidence>,
    pub(crate) blocked: Vec<BlockedAcceptance>,
}

impl DiscourseState {
    pub fn new(a: Participant, b: Participant, require_acceptance: bool) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidArgument(format!(
                "participants must differ, got `{a}` twice"
            )));
        }
        Ok(DiscourseState {
            participants: [a, b],
            require_acceptance,
            events: Vec::new(),
            event_index: HashMap::new(),
            records: Vec::new(),
            record_index: HashMap::new(),
            any_next_done: BTreeSet::new(),
            context: Context::new(),
            licenses: Vec::new(),
            acceptances: Vec::new(),
            supports: Vec::new(),
            conflicts: Vec::new(),
            blocked: Vec::new(),
        })
    }

    pub fn participants(&self) -> &[Participant; 2] {
        &self.participants
    }

    /// Whether the goals of the dialogue require acceptance of what is said.
    pub fn require_acceptance(&self) -> bool {
        self.require_acceptance
    }

    pub fn events(&self) -> &[UtteranceEvent] {
        &self.events
    }

    pub fn event(&self, id: &UtteranceId) -> Option<&UtteranceEvent> {
        self.event_index.get(id).map(|i| &self.events[*i])
    }

    pub fn last_event(&self) -> Option<&UtteranceEvent> {
        self.events.last()
    }

    /// Checks `event` can follow the events so far.
    pub fn check_event(&self, event: &UtteranceEvent) -> Result<()> {
        if self.event_index.contains_key(&event.id) {
            return Err(Error::DuplicateUtterance(event.id.clone()));
        }
        for p in [&event.speaker, &event.addressee] {
            if !self.participants.contains(p) {
                return Err(Error::InvalidArgument(format!("`{p}` is not a participant")));
            }
        }
        if event.speaker == event.addressee {
            return Err(Error::InvalidArgument(format!(
                "utterance `{}` is addressed to its own speaker",
                event.id
            )));
        }
        if let Some(last) = self.events.last() {
            if event.turn <= last.turn {
                return Err(Error::OrderingViolation(format!(
                    "utterance `{}` at turn {} does not follow `{}` at turn {}",
                    event.id, event.turn, last.id, last.turn
                )));
            }
        }
        for a in event.antecedents.iter().chain(event.rejects.iter()) {
            if !self.event_index.contains_key(a) {
                return Err(Error::DanglingAntecedent {
                    event: event.id.clone(),
                    antecedent: a.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn push_event(&mut self, event: UtteranceEvent) -> Result<()> {
        self.check_event(&event)?;
        self.event_index.insert(event.id.clone(), self.events.len());
        self.events.push(event);
        Ok(())
    }

    /// Opens the assumption record for `event` with every assumption a hypothesis.
    pub fn open_record(&mut self, event: &UtteranceEvent) -> Result<&AssumptionRecord> {
        if self.record_index.contains_key(&event.id) {
            return Err(Error::DuplicateUtterance(event.id.clone()));
        }
        self.record_index.insert(event.id.clone(), self.records.len());
        self.records.push(open_record(event));
        Ok(self.records.last().expect("just pushed"))
    }

    pub fn record(&self, id: &UtteranceId) -> Option<&AssumptionRecord> {
        self.record_index.get(id).map(|i| &self.records[*i])
    }

    pub fn records(&self) -> &[AssumptionRecord] {
        &self.records
    }

    fn record_mut(&mut self, id: &UtteranceId) -> Result<&mut AssumptionRecord> {
        match self.record_index.get(id) {
            Some(i) => Ok(&mut self.records[*i]),
            None => Err(Error::InvalidArgument(format!("no assumption record for `{id}`"))),
        }
    }

    /// Applies the IRU row for `class` to the record of `id`. Returns whether anything changed.
    pub fn upgrade_iru(&mut self, id: &UtteranceId, class: IruClass) -> Result<bool> {
        let record = self.record_mut(id)?;
        let upgraded = apply_iru_upgrade(record, class);
        let changed = upgraded != *record;
        *record = upgraded;
        Ok(changed)
    }

    /// Applies the any-next-utterance row to the record of `id`.
    pub fn upgrade_any_next(&mut self, id: &UtteranceId) -> Result<bool> {
        let record = self.record_mut(id)?;
        let upgraded = apply_any_next_upgrade(record);
        let changed = upgraded != *record;
        *record = upgraded;
        self.any_next_done.insert(id.clone());
        Ok(changed)
    }

    /// Records of utterances addressed to `addressee` still waiting for
    /// the addressee's next utterance, oldest first.
    pub fn awaiting_next_from(&self, addressee: &Participant) -> Vec<UtteranceId> {
        self.events
            .iter()
            .filter(|e| &e.addressee == addressee && !self.any_next_done.contains(&e.id))
            .filter(|e| self.record_index.contains_key(&e.id))
            .map(|e| e.id.clone())
            .collect()
    }

    pub fn understanding_strength(&self, id: &UtteranceId) -> Option<EvidenceStrength> {
        self.record(id).map(understanding_strength)
    }

    /// One understanding belief per proposition the utterance realizes.
    pub fn understanding(&self, id: &UtteranceId) -> Vec<UnderstandingBelief> {
        let (Some(event), Some(strength)) = (self.event(id), self.understanding_strength(id)) else {
            return Vec::new();
        };
        event
            .realizes
            .iter()
            .map(|p| UnderstandingBelief {
                utterance_id: id.clone(),
                proposition: p.clone(),
                strength,
            })
            .collect()
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    /// Whether `p` is live in the common ground, asserted or entailed.
    pub fn holds(&self, p: &Proposition) -> bool {
        if self.context.find_live(p).is_some() {
            return true;
        }
        match p.as_literal() {
            Some(l) => self.context.closure().map(|c| c.contains(l)).unwrap_or(false),
            None => false,
        }
    }

    /// Adds `p` to the common ground as said by `source`; a weaker contrary
    /// belief is defeated along with everything depending on it.
    pub fn assert_said(
        &mut self,
        p: Proposition,
        strength: EvidenceStrength,
        source: UtteranceId,
    ) -> Result<(AssertOutcome, Vec<NodeId>)> {
        let outcome = self.context.assert_prop(p, strength, source)?;
        let roots: Vec<NodeId> = outcome.superseded.iter().map(|e| NodeId::Entry(*e)).collect();
        let defeated = self.cascade(&roots);
        Ok((outcome, defeated))
    }

    /// Re-closes the common ground; returns entries created or changed.
    pub fn close_context(&mut self) -> Result<Vec<EntryId>> {
        Ok(self.context.close()?)
    }

    /// Adds a literal held on the strength of other live beliefs; its
    /// strength is their weakest link, capped at `inference`.
    pub fn derive_dependent(&mut self, p: Proposition, dependencies: BTreeSet<NodeId>) -> Result<EntryId> {
        let mut strengths = Vec::new();
        for d in &dependencies {
            if let NodeId::Utterance(u) = d {
                if self.event(u).is_none() {
                    return Err(Error::UnknownNode(d.clone()));
                }
                continue;
            }
            match (self.strength_of(d), self.status_of(d)) {
                (Some(s), Some(Status::Live)) => strengths.push(s),
                (Some(_), _) => {
                    return Err(Error::InvalidArgument(format!("{d} is defeated")));
                }
                (None, _) => return Err(Error::UnknownNode(d.clone())),
            }
        }
        let strength = crate::evidence::min_strength(&strengths)
            .map_err(|_| Error::InvalidArgument("a derived belief needs at least one supporting belief".into()))?
            .min(EvidenceStrength::Inference);
        Ok(self.context.add_dependent(p, strength, dependencies))
    }

    pub fn licenses(&self) -> &[LicenseLink] {
        &self.licenses
    }

    pub fn license(&self, premise: &Proposition, conclusion: &Proposition) -> Option<&LicenseLink> {
        self.licenses
            .iter()
            .find(|l| &l.premise == premise && &l.conclusion == conclusion)
    }

    /// Stores `link`, or raises a stored link with the same premise,
    /// conclusion and origin to `strength`. Returns the stored link.
    pub fn record_license_evidence(&mut self, link: LicenseLink, strength: EvidenceStrength) -> Result<&LicenseLink> {
        if strength > EvidenceStrength::Linguistic {
            return Err(Error::InvalidArgument(format!("license evidence cannot be {strength}")));
        }
        if !self.holds(&link.premise) {
            return Err(Error::UnknownProposition(link.premise.to_string()));
        }
        let existing = self
            .licenses
            .iter()
            .position(|l| l.premise == link.premise && l.conclusion == link.conclusion && l.origin == link.origin);
        let i = match existing {
            Some(i) => {
                let stored = &mut self.licenses[i];
                stored.strength = stored.strength.max(strength);
                i
            }
            None => {
                let strength = strength.max(link.strength);
                self.licenses.push(LicenseLink { strength, ..link });
                self.licenses.len() - 1
            }
        };
        Ok(&self.licenses[i])
    }

    pub fn acceptances(&self) -> &[AcceptanceBelief] {
        &self.acceptances
    }

    pub fn supports(&self) -> &[SupportLink] {
        &self.supports
    }

    pub fn conflicts(&self) -> &[ConflictEvidence] {
        &self.conflicts
    }

    /// Acceptances blocked by a checking IRU and waiting for the accepter's next turn.
    pub fn blocked(&self) -> &[BlockedAcceptance] {
        &self.blocked
    }

    pub fn strength_of(&self, node: &NodeId) -> Option<EvidenceStrength> {
        match node {
            NodeId::Entry(e) => self.context.entry(*e).map(|x| x.strength),
            NodeId::Acceptance(a) => self.acceptances.get(a.0 as usize).map(|x| x.strength),
            NodeId::Support(s) => self.supports.get(s.0 as usize).map(|x| x.strength),
            NodeId::Utterance(_) => None,
        }
    }

    pub fn status_of(&self, node: &NodeId) -> Option<Status> {
        match node {
            NodeId::Entry(e) => self.context.entry(*e).map(|x| x.status),
            NodeId::Acceptance(a) => self.acceptances.get(a.0 as usize).map(|x| x.status),
            NodeId::Support(s) => self.supports.get(s.0 as usize).map(|x| x.status),
            NodeId::Utterance(u) => self.event(u).map(|_| Status::Live),
        }
    }

    pub fn dependencies_of(&self, node: &NodeId) -> Option<&BTreeSet<NodeId>> {
        match node {
            NodeId::Entry(e) => self.context.entry(*e).map(|x| &x.dependencies),
            NodeId::Acceptance(a) => self.acceptances.get(a.0 as usize).map(|x| &x.dependencies),
            NodeId::Support(s) => self.supports.get(s.0 as usize).map(|x| &x.dependencies),
            NodeId::Utterance(_) => None,
        }
    }

    /// Every belief node, live or defeated.
    pub fn belief_nodes(&self) -> Vec<NodeId> {
        let entries = self.context.entries().iter().map(|e| NodeId::Entry(e.id));
        let acceptances = self.acceptances.iter().map(|a| NodeId::Acceptance(a.id));
        let supports = self.supports.iter().map(|s| NodeId::Support(s.id));
        entries.chain(acceptances).chain(supports).collect()
    }

    pub(crate) fn set_status(&mut self, node: &NodeId, status: Status) {
        match node {
            NodeId::Entry(e) => self.context.set_status(*e, status),
            NodeId::Acceptance(a) => self.acceptances[a.0 as usize].status = status,
            NodeId::Support(s) => self.supports[s.0 as usize].status = status,
            NodeId::Utterance(_) => {}
        }
    }

    /// Defeats `roots` and every live belief whose dependencies reach them.
    /// Returns the nodes whose status changed, sorted.
    pub(crate) fn cascade(&mut self, roots: &[NodeId]) -> Vec<NodeId> {
        if roots.is_empty() {
            return Vec::new();
        }
        let mut dependents: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for node in self.belief_nodes() {
            if self.status_of(&node) != Some(Status::Live) {
                continue;
            }
            for d in self.dependencies_of(&node).into_iter().flatten() {
                dependents.entry(d.clone()).or_default().push(node.clone());
            }
        }
        let mut reached = BTreeSet::new();
        let mut queue: VecDeque<NodeId> = roots.iter().cloned().collect();
        while let Some(n) = queue.pop_front() {
            if !reached.insert(n.clone()) {
                continue;
            }
            if let Some(ds) = dependents.get(&n) {
                queue.extend(ds.iter().cloned());
            }
        }
        let mut changed = Vec::new();
        for n in reached {
            if self.status_of(&n) == Some(Status::Live) && !matches!(n, NodeId::Utterance(_)) {
                self.set_status(&n, Status::Defeated);
                changed.push(n);
            }
        }
        changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::EvidenceStrength::*;
    use crate::grounding::LicenseOrigin;

    fn state() -> DiscourseState {
        DiscourseState::new("h".into(), "r".into(), true).unwrap()
    }

    fn p(s: &str) -> Proposition {
        s.parse().unwrap()
    }

    #[test]
    fn participants_must_differ() {
        assert!(DiscourseState::new("h".into(), "h".into(), false).is_err());
    }

    #[test]
    fn duplicate_record_is_rejected() {
        let mut s = state();
        let e = UtteranceEvent::new("u7", 0, "h", "r", "yes it does");
        s.open_record(&e).unwrap();
        assert_eq!(s.open_record(&e).unwrap_err(), Error::DuplicateUtterance("u7".into()));
    }

    #[test]
    fn event_checks() {
        let mut s = state();
        s.push_event(UtteranceEvent::new("u1", 3, "h", "r", "a")).unwrap();
        let err = s.push_event(UtteranceEvent::new("u2", 3, "r", "h", "b")).unwrap_err();
        assert!(matches!(err, Error::OrderingViolation(_)));
        let err = s.push_event(UtteranceEvent::new("u1", 4, "r", "h", "b")).unwrap_err();
        assert_eq!(err, Error::DuplicateUtterance("u1".into()));
        let mut e = UtteranceEvent::new("u2", 4, "r", "h", "b");
        e.antecedents = vec!["u9".into()];
        assert!(matches!(s.push_event(e).unwrap_err(), Error::DanglingAntecedent { .. }));
        assert!(s.push_event(UtteranceEvent::new("u2", 4, "r", "r", "b")).is_err());
        assert!(s.push_event(UtteranceEvent::new("u2", 4, "x", "h", "b")).is_err());
    }

    #[test]
    fn license_evidence_only_rises() {
        let mut s = state();
        s.assert_said(p("pension"), Linguistic, "u16".into()).unwrap();
        let link = LicenseLink {
            premise: p("pension"),
            conclusion: p("!eligible81"),
            strength: Hypothesis,
            origin: LicenseOrigin::Entailment,
            source: None,
        };
        assert_eq!(
            s.record_license_evidence(link.clone(), Inference).unwrap().strength,
            Inference
        );
        assert_eq!(
            s.record_license_evidence(link.clone(), Linguistic).unwrap().strength,
            Linguistic
        );
        assert_eq!(
            s.record_license_evidence(link.clone(), Default).unwrap().strength,
            Linguistic
        );
        assert_eq!(s.licenses().len(), 1);
        assert!(s.record_license_evidence(link.clone(), Physical).is_err());

        let unknown = LicenseLink {
            premise: p("nothing"),
            ..link
        };
        assert_eq!(
            s.record_license_evidence(unknown, Inference).unwrap_err(),
            Error::UnknownProposition("nothing".into())
        );
    }

    #[test]
    fn dependent_strength_is_capped_weakest_link() {
        let mut s = state();
        let (a, _) = s.assert_said(p("a"), Linguistic, "u1".into()).unwrap();
        let (b, _) = s.assert_said(p("b"), Default, "u2".into()).unwrap();
        let c = s
            .derive_dependent(p("c"), [NodeId::Entry(a.entry)].into_iter().collect())
            .unwrap();
        assert_eq!(s.strength_of(&NodeId::Entry(c)), Some(Inference));
        let d = s
            .derive_dependent(
                p("d"),
                [NodeId::Entry(a.entry), NodeId::Entry(b.entry)].into_iter().collect(),
            )
            .unwrap();
        assert_eq!(s.strength_of(&NodeId::Entry(d)), Some(Default));
        assert!(s.derive_dependent(p("e"), BTreeSet::new()).is_err());
        assert!(s
            .derive_dependent(p("e"), [NodeId::Entry(EntryId(99))].into_iter().collect())
            .is_err());
    }
}
