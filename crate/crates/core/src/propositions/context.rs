//! The common-ground store and its forward-chaining closure.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{ConflictDetected, Literal, Proposition};
use crate::evidence::EvidenceStrength;
use crate::ids::{EntryId, NodeId, Status, UtteranceId};

/// Where an entry's support comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    /// Said outright by one or more utterances.
    Asserted { utterances: Vec<UtteranceId> },
    /// Produced by [`Context::close`]; rewritten on every closure pass.
    Inferred,
    /// Added by the caller on top of other beliefs (see [`Context::add_dependent`]).
    Dependent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextEntry {
    pub id: EntryId,
    pub proposition: Proposition,
    pub strength: EvidenceStrength,
    pub origin: Origin,
    pub dependencies: BTreeSet<NodeId>,
    pub status: Status,
}

impl ContextEntry {
    pub fn is_live(&self) -> bool {
        self.status == Status::Live
    }

    pub fn is_asserted(&self) -> bool {
        matches!(self.origin, Origin::Asserted { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertOutcome {
    pub entry: EntryId,
    /// Weaker live entries of opposite polarity that this assertion defeated,
    /// together with the entries depending on them.
    pub superseded: Vec<EntryId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RedundancyVerdict {
    NotRedundant,
    /// Explicitly asserted before, by these utterances.
    Said {
        utterances: Vec<UtteranceId>,
    },
    /// Follows from the context without having been asserted.
    Entailed {
        premises: Vec<EntryId>,
        utterances: Vec<UtteranceId>,
    },
}

impl RedundancyVerdict {
    pub fn is_redundant(&self) -> bool {
        !matches!(self, RedundancyVerdict::NotRedundant)
    }

    pub fn utterances(&self) -> &[UtteranceId] {
        match self {
            RedundancyVerdict::NotRedundant => &[],
            RedundancyVerdict::Said { utterances } | RedundancyVerdict::Entailed { utterances, .. } => utterances,
        }
    }
}

/// Graded common ground: propositions with evidence strengths and the
/// dependency edges needed to retract them.
#[derive(Debug, Clone, Default)]
pub struct Context {
    entries: Vec<ContextEntry>,
    live_index: BTreeMap<Proposition, EntryId>,
}

// One inference step usable by the closure.
#[derive(Debug, Clone)]
struct Implication {
    antecedents: Vec<Literal>,
    consequent: Literal,
    rules: Vec<EntryId>,
    strength: EvidenceStrength,
}

#[derive(Debug, Clone, Copy)]
enum Premise {
    Entry(EntryId),
    Derived(usize),
}

#[derive(Debug, Clone)]
struct Derivation {
    literal: Literal,
    strength: EvidenceStrength,
    premises: Vec<Premise>,
}

#[derive(Debug, Clone, Copy)]
struct Known {
    strength: EvidenceStrength,
    premise: Premise,
    rank: u64,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[ContextEntry] {
        &self.entries
    }

    pub fn entry(&self, id: EntryId) -> Option<&ContextEntry> {
        self.entries.get(id.0 as usize)
    }

    pub fn live(&self) -> impl Iterator<Item = &ContextEntry> {
        self.entries.iter().filter(|e| e.is_live())
    }

    pub fn find_live(&self, p: &Proposition) -> Option<&ContextEntry> {
        self.live_index.get(p).map(|id| &self.entries[id.0 as usize])
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `p` as said by `source`.
    ///
    /// Re-asserting raises the stored strength, never lowers it. A live
    /// contrary literal at least as strong as `strength` is a conflict; a
    /// weaker one is defeated, along with everything in the context that
    /// depends on it.
    pub fn assert_prop(
        &mut self,
        p: Proposition,
        strength: EvidenceStrength,
        source: UtteranceId,
    ) -> Result<AssertOutcome, ConflictDetected> {
        let mut superseded = Vec::new();
        if let Proposition::Literal(l) = &p {
            let contrary = Proposition::Literal(l.negate());
            if let Some(existing) = self.find_live(&contrary) {
                if existing.strength >= strength {
                    return Err(ConflictDetected {
                        clashes: vec![ordered_clash(l)],
                    });
                }
                let id = existing.id;
                superseded = self.retract(id);
            }
        }

        if let Some(id) = self.live_index.get(&p).copied() {
            let entry = &mut self.entries[id.0 as usize];
            entry.strength = entry.strength.max(strength);
            match &mut entry.origin {
                Origin::Asserted { utterances } => {
                    if !utterances.contains(&source) {
                        utterances.push(source);
                    }
                }
                origin => {
                    *origin = Origin::Asserted {
                        utterances: vec![source],
                    };
                    entry.dependencies.clear();
                }
            }
            return Ok(AssertOutcome { entry: id, superseded });
        }

        let id = self.push(
            p,
            strength,
            Origin::Asserted {
                utterances: vec![source],
            },
            BTreeSet::new(),
        );
        Ok(AssertOutcome { entry: id, superseded })
    }

    /// Adds a literal held on the strength of arbitrary other beliefs.
    ///
    /// The caller supplies the strength; for weakest-link consistency it
    /// should be the minimum over `dependencies`.
    pub fn add_dependent(
        &mut self,
        p: Proposition,
        strength: EvidenceStrength,
        dependencies: BTreeSet<NodeId>,
    ) -> EntryId {
        if let Some(id) = self.live_index.get(&p).copied() {
            let entry = &mut self.entries[id.0 as usize];
            if strength > entry.strength && !entry.is_asserted() {
                entry.strength = strength;
                entry.origin = Origin::Dependent;
                entry.dependencies = dependencies;
            }
            return id;
        }
        self.push(p, strength, Origin::Dependent, dependencies)
    }

    /// The literal consequences of the live context.
    pub fn closure(&self) -> Result<BTreeSet<Literal>, ConflictDetected> {
        let (facts, derived) = self.derive()?;
        Ok(facts
            .into_keys()
            .chain(derived.into_iter().map(|d| d.literal))
            .collect())
    }

    /// Materializes the closure: every derived literal gets a live entry
    /// whose dependencies are its premises. Returns the entries created or
    /// changed by this pass.
    pub fn close(&mut self) -> Result<Vec<EntryId>, ConflictDetected> {
        let (_, derived) = self.derive()?;
        let mut ids: Vec<EntryId> = Vec::with_capacity(derived.len());
        let mut touched = Vec::new();
        for d in &derived {
            let deps: BTreeSet<NodeId> = d
                .premises
                .iter()
                .map(|p| match p {
                    Premise::Entry(e) => NodeId::Entry(*e),
                    Premise::Derived(i) => NodeId::Entry(ids[*i]),
                })
                .collect();
            let prop = Proposition::Literal(d.literal.clone());
            match self.live_index.get(&prop).copied() {
                Some(id) => {
                    let entry = &mut self.entries[id.0 as usize];
                    debug_assert_eq!(entry.origin, Origin::Inferred);
                    if entry.strength != d.strength || entry.dependencies != deps {
                        entry.strength = d.strength;
                        entry.dependencies = deps;
                        touched.push(id);
                    }
                    ids.push(id);
                }
                None => {
                    let id = self.push(prop, d.strength, Origin::Inferred, deps);
                    touched.push(id);
                    ids.push(id);
                }
            }
        }
        Ok(touched)
    }

    /// Whether `p` adds nothing to the context.
    pub fn is_redundant(&self, p: &Proposition) -> RedundancyVerdict {
        if let Some(entry) = self.find_live(p) {
            if let Origin::Asserted { utterances } = &entry.origin {
                return RedundancyVerdict::Said {
                    utterances: utterances.clone(),
                };
            }
        }
        let Proposition::Literal(target) = p else {
            return RedundancyVerdict::NotRedundant;
        };
        let Ok((facts, derived)) = self.derive() else {
            return RedundancyVerdict::NotRedundant;
        };
        let root = if let Some(k) = facts.get(target) {
            k.premise
        } else if let Some(i) = derived.iter().position(|d| &d.literal == target) {
            Premise::Derived(i)
        } else {
            return RedundancyVerdict::NotRedundant;
        };

        let mut premises = BTreeSet::new();
        let mut stack = vec![root];
        let mut seen_derived = BTreeSet::new();
        while let Some(p) = stack.pop() {
            match p {
                Premise::Entry(e) => {
                    let entry = &self.entries[e.0 as usize];
                    match &entry.origin {
                        Origin::Asserted { .. } => {
                            premises.insert(e);
                        }
                        _ => {
                            premises.insert(e);
                            stack.extend(entry.dependencies.iter().filter_map(|d| match d {
                                NodeId::Entry(x) => Some(Premise::Entry(*x)),
                                _ => None,
                            }));
                        }
                    }
                }
                Premise::Derived(i) => {
                    if seen_derived.insert(i) {
                        stack.extend(derived[i].premises.iter().copied());
                    }
                }
            }
        }
        let premises: Vec<EntryId> = premises.into_iter().collect();
        let utterances = self.utterances_of(&premises);
        RedundancyVerdict::Entailed { premises, utterances }
    }

    /// The conflict, if any, that asserting `props` at `strength` would cause.
    pub fn would_conflict(
        &self,
        props: &[Proposition],
        strength: EvidenceStrength,
        source: &UtteranceId,
    ) -> Option<ConflictDetected> {
        let mut trial = self.clone();
        for p in props {
            if let Proposition::Literal(l) = p {
                // a weaker contrary would be superseded, not clash; report it anyway
                if trial.find_live(&Proposition::Literal(l.negate())).is_some() {
                    return Some(ConflictDetected {
                        clashes: vec![ordered_clash(l)],
                    });
                }
            }
            if let Err(c) = trial.assert_prop(p.clone(), strength, source.clone()) {
                return Some(c);
            }
        }
        trial.closure().err()
    }

    /// Utterances whose assertions an entry ultimately rests on.
    pub fn supporting_utterances(&self, id: EntryId) -> Vec<UtteranceId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        let mut roots = Vec::new();
        while let Some(e) = stack.pop() {
            if !seen.insert(e) {
                continue;
            }
            let entry = &self.entries[e.0 as usize];
            if entry.is_asserted() {
                roots.push(e);
            }
            for d in &entry.dependencies {
                if let NodeId::Entry(x) = d {
                    stack.push(*x);
                }
            }
        }
        roots.sort();
        self.utterances_of(&roots)
    }

    pub(crate) fn set_status(&mut self, id: EntryId, status: Status) {
        let entry = &mut self.entries[id.0 as usize];
        if entry.status == status {
            return;
        }
        entry.status = status;
        match status {
            Status::Live => {
                self.live_index.insert(entry.proposition.clone(), id);
            }
            Status::Defeated => {
                if self.live_index.get(&entry.proposition) == Some(&id) {
                    self.live_index.remove(&entry.proposition);
                }
            }
        }
    }

    fn utterances_of(&self, entries: &[EntryId]) -> Vec<UtteranceId> {
        let mut out: Vec<UtteranceId> = Vec::new();
        for e in entries {
            if let Origin::Asserted { utterances } = &self.entries[e.0 as usize].origin {
                for u in utterances {
                    if !out.contains(u) {
                        out.push(u.clone());
                    }
                }
            }
        }
        out
    }

    fn push(
        &mut self,
        proposition: Proposition,
        strength: EvidenceStrength,
        origin: Origin,
        dependencies: BTreeSet<NodeId>,
    ) -> EntryId {
        let id = EntryId(self.entries.len() as u32);
        self.live_index.insert(proposition.clone(), id);
        self.entries.push(ContextEntry {
            id,
            proposition,
            strength,
            origin,
            dependencies,
            status: Status::Live,
        });
        id
    }

    // Defeats `root` and every live context entry depending on it.
    fn retract(&mut self, root: EntryId) -> Vec<EntryId> {
        let mut dependents: BTreeMap<EntryId, Vec<EntryId>> = BTreeMap::new();
        for e in self.live() {
            for d in &e.dependencies {
                if let NodeId::Entry(x) = d {
                    dependents.entry(*x).or_default().push(e.id);
                }
            }
        }
        let mut out = BTreeSet::new();
        let mut queue = VecDeque::from([root]);
        while let Some(e) = queue.pop_front() {
            if !out.insert(e) {
                continue;
            }
            if let Some(ds) = dependents.get(&e) {
                queue.extend(ds.iter().copied());
            }
        }
        for e in &out {
            self.set_status(*e, Status::Defeated);
        }
        out.into_iter().collect()
    }

    fn implications(&self) -> Vec<Implication> {
        let mut out = Vec::new();
        for e in self.live() {
            let step = |antecedents: Vec<Literal>, consequent: Literal| Implication {
                antecedents,
                consequent,
                rules: vec![e.id],
                strength: e.strength,
            };
            match &e.proposition {
                Proposition::Literal(_) => {}
                Proposition::Rule {
                    antecedents,
                    consequent,
                } => {
                    out.push(step(antecedents.clone(), consequent.clone()));
                    if let [only] = antecedents.as_slice() {
                        out.push(step(vec![consequent.negate()], only.negate()));
                    }
                }
                Proposition::Biconditional(l, r) => {
                    out.push(step(vec![l.clone()], r.clone()));
                    out.push(step(vec![r.clone()], l.clone()));
                    out.push(step(vec![r.negate()], l.negate()));
                    out.push(step(vec![l.negate()], r.negate()));
                }
            }
        }
        let reductio = reductio_steps(&out);
        out.extend(reductio);
        out
    }

    // Best derivation of every literal consequence. Steps are finalized
    // strongest first, so a literal's derivation has the maximal weakest
    // link; ties go to the derivation whose premises are earliest.
    fn derive(&self) -> Result<(BTreeMap<Literal, Known>, Vec<Derivation>), ConflictDetected> {
        let mut known: BTreeMap<Literal, Known> = BTreeMap::new();
        for e in self.live() {
            if let (Proposition::Literal(l), false) = (&e.proposition, e.origin == Origin::Inferred) {
                known.insert(
                    l.clone(),
                    Known {
                        strength: e.strength,
                        premise: Premise::Entry(e.id),
                        rank: u64::from(e.id.0),
                    },
                );
            }
        }
        let facts = known.clone();
        let implications = self.implications();
        let base = self.entries.len() as u64;
        let mut derived: Vec<Derivation> = Vec::new();

        loop {
            let mut best: Option<(EvidenceStrength, Vec<u64>, &Literal, Vec<Premise>)> = None;
            for imp in &implications {
                if known.contains_key(&imp.consequent) {
                    continue;
                }
                let Some(ants) = imp
                    .antecedents
                    .iter()
                    .map(|a| known.get(a))
                    .collect::<Option<Vec<&Known>>>()
                else {
                    continue;
                };
                let strength = ants
                    .iter()
                    .map(|k| k.strength)
                    .fold(imp.strength, EvidenceStrength::min)
                    .min(EvidenceStrength::Inference);
                let mut key: Vec<u64> = imp
                    .rules
                    .iter()
                    .map(|r| u64::from(r.0))
                    .chain(ants.iter().map(|k| k.rank))
                    .collect();
                key.sort_unstable();
                let better = match &best {
                    None => true,
                    Some((s, k, l, _)) => {
                        (strength, std::cmp::Reverse(&key), std::cmp::Reverse(&imp.consequent))
                            > (*s, std::cmp::Reverse(k), std::cmp::Reverse(*l))
                    }
                };
                if better {
                    let premises = imp
                        .rules
                        .iter()
                        .map(|r| Premise::Entry(*r))
                        .chain(ants.iter().map(|k| k.premise))
                        .collect();
                    best = Some((strength, key, &imp.consequent, premises));
                }
            }
            let Some((strength, _, literal, premises)) = best else {
                break;
            };
            let literal = literal.clone();
            let idx = derived.len();
            known.insert(
                literal.clone(),
                Known {
                    strength,
                    premise: Premise::Derived(idx),
                    rank: base + idx as u64,
                },
            );
            derived.push(Derivation {
                literal,
                strength,
                premises,
            });
        }

        let clashes: Vec<(Literal, Literal)> = known
            .keys()
            .filter(|l| l.positive && known.contains_key(&l.negate()))
            .map(|l| (l.clone(), l.negate()))
            .collect();
        if !clashes.is_empty() {
            return Err(ConflictDetected { clashes });
        }
        Ok((facts, derived))
    }
}

fn ordered_clash(l: &Literal) -> (Literal, Literal) {
    if l.positive {
        (l.clone(), l.negate())
    } else {
        (l.negate(), l.clone())
    }
}

// Reductio over the single-antecedent implication graph: if !l leads to l,
// then l holds. The weakest link of the strongest such path is the step's
// strength. Together with modus ponens this makes the closure complete for
// contexts of literals, biconditionals and single-antecedent rules.
fn reductio_steps(implications: &[Implication]) -> Vec<Implication> {
    let edges: Vec<&Implication> = implications.iter().filter(|i| i.antecedents.len() == 1).collect();
    let literals: BTreeSet<Literal> = edges
        .iter()
        .flat_map(|i| [i.antecedents[0].clone(), i.consequent.clone()])
        .collect();

    let mut out = Vec::new();
    for target in &literals {
        let start = target.negate();
        for threshold in EvidenceStrength::ALL.into_iter().rev() {
            if let Some(path) = find_path(&edges, &start, target, threshold) {
                let mut rules: Vec<EntryId> = path.iter().flat_map(|i| i.rules.iter().copied()).collect();
                rules.sort_unstable();
                rules.dedup();
                out.push(Implication {
                    antecedents: Vec::new(),
                    consequent: target.clone(),
                    rules,
                    strength: threshold,
                });
                break;
            }
        }
    }
    out
}

fn find_path<'a>(
    edges: &[&'a Implication],
    start: &Literal,
    goal: &Literal,
    threshold: EvidenceStrength,
) -> Option<Vec<&'a Implication>> {
    let mut parent: BTreeMap<Literal, Option<usize>> = BTreeMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(at) = queue.pop_front() {
        for (i, e) in edges.iter().enumerate() {
            if e.strength < threshold || e.antecedents[0] != at || parent.contains_key(&e.consequent) {
                continue;
            }
            parent.insert(e.consequent.clone(), Some(i));
            if &e.consequent == goal {
                let mut path = Vec::new();
                let mut cur = goal.clone();
                while let Some(Some(ix)) = parent.get(&cur) {
                    path.push(edges[*ix]);
                    cur = edges[*ix].antecedents[0].clone();
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(e.consequent.clone());
        }
    }
    None
}
