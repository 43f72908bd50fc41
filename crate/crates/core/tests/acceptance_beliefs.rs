mod common;

use std::collections::{BTreeSet, VecDeque};

use iru_core::acceptance::{defeat, record_support, AcceptanceOutcome, ConflictEvidence, ConflictKind};
use iru_core::evidence::EvidenceStrength::{self, *};
use iru_core::grounding::Intonation;
use iru_core::ids::{AcceptanceId, NodeId, Status};
use iru_core::{replay, DiscourseState, Engine, Error, Proposition, UtteranceEvent, UtteranceId};
use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Proposition {
    s.parse().unwrap()
}

fn evidence(strength: EvidenceStrength) -> ConflictEvidence {
    ConflictEvidence {
        event: "x".into(),
        kind: ConflictKind::ExplicitRejection,
        clash: None,
        targets: vec![],
        strength,
    }
}

#[test]
fn checking_question_blocks_then_rejection() {
    let (state, trace) = replay(&common::fixture("example5.dlg")).unwrap();
    let u39 = trace.iter().find(|r| r.event.as_str() == "u39").unwrap();
    assert_eq!(u39.acceptance("u38").unwrap().outcome, AcceptanceOutcome::Blocked);
    let u41 = trace.iter().find(|r| r.event.as_str() == "u41").unwrap();
    assert!(matches!(
        u41.acceptance("u38").unwrap().outcome,
        AcceptanceOutcome::Rejected(_)
    ));
    assert_eq!(u41.conflicts[0].kind, ConflictKind::ExplicitRejection);
    assert!(state.acceptances().is_empty());
    assert!(state.blocked().is_empty());
}

#[test]
fn contradiction_is_not_acceptance() {
    let (state, trace) = replay(&common::fixture("example6.dlg")).unwrap();
    let u14 = &trace[1];
    assert_eq!(u14.conflicts.len(), 1);
    assert_eq!(u14.conflicts[0].kind, ConflictKind::ContradictoryAssertion);
    assert_eq!(u14.conflicts[0].targets, vec!["u13".into()]);
    assert!(state.acceptances().is_empty());
    assert!(state.holds(&p("iraAvailableLastYear")));
}

#[test]
fn silence_on_a_goal_gives_default() {
    let (state, trace) = replay(&common::fixture("goal_default.dlg")).unwrap();
    assert_eq!(trace[1].acceptance("u1").unwrap().outcome.label(), "default");
    let a = &state.acceptances()[0];
    assert_eq!(a.strength, Default);
    assert!(a.dependencies.contains(&NodeId::Utterance("u2".into())));
}

#[test]
fn affirmation_beats_default() {
    let mut t = common::fixture("goal_default.dlg");
    t.events[1].act = iru_core::grounding::Act::Affirmation;
    let (state, _) = replay(&t).unwrap();
    assert_eq!(state.acceptances()[0].strength, Linguistic);
    assert!(Linguistic > Default);
}

// A default acceptance with three direct dependents, two of which carry a
// further dependent each, and one unrelated belief.
fn retraction_fixture() -> (DiscourseState, NodeId) {
    let mut engine = Engine::new("h".into(), "r".into(), true).unwrap();
    let mut u1 = UtteranceEvent::new("u1", 0, "h", "r", "take the money");
    u1.realizes = vec![p("takeMoney")];
    engine.process(u1).unwrap();
    let mut u2 = UtteranceEvent::new("u2", 1, "r", "h", "the bank opens at nine");
    u2.realizes = vec![p("bankOpensAtNine")];
    engine.process(u2).unwrap();
    let mut state = engine.into_state();
    let root = NodeId::Acceptance(AcceptanceId(0));
    assert_eq!(state.strength_of(&root), Some(Default));

    let dep = |nodes: &[NodeId]| nodes.iter().cloned().collect::<BTreeSet<_>>();
    let d1 = state
        .derive_dependent(p("planWithdrawal"), dep(std::slice::from_ref(&root)))
        .unwrap();
    let d2 = state
        .derive_dependent(p("closeAccount"), dep(std::slice::from_ref(&root)))
        .unwrap();
    let d3 = state
        .derive_dependent(p("skipAnnuity"), dep(std::slice::from_ref(&root)))
        .unwrap();
    state
        .derive_dependent(p("visitBank"), dep(&[NodeId::Entry(d1)]))
        .unwrap();
    state
        .derive_dependent(p("noBeneficiary"), dep(&[NodeId::Entry(d2), NodeId::Entry(d3)]))
        .unwrap();
    let unrelated = state.context().find_live(&p("bankOpensAtNine")).unwrap().id;
    state
        .derive_dependent(p("arriveEarly"), dep(&[NodeId::Entry(unrelated)]))
        .unwrap();
    (state, root)
}

fn dependency_closure(state: &DiscourseState, node: &NodeId) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<NodeId> = state.dependencies_of(node).into_iter().flatten().cloned().collect();
    while let Some(n) = queue.pop_front() {
        if seen.insert(n.clone()) {
            queue.extend(state.dependencies_of(&n).into_iter().flatten().cloned());
        }
    }
    seen
}

fn assert_closed(state: &DiscourseState) {
    for n in state.belief_nodes() {
        if state.status_of(&n) != Some(Status::Live) {
            continue;
        }
        for d in dependency_closure(state, &n) {
            assert_ne!(state.status_of(&d), Some(Status::Defeated), "{n} rests on defeated {d}");
        }
    }
}

#[test]
fn defeating_the_root_retracts_its_reach() {
    let (mut state, root) = retraction_fixture();
    let live_before = state
        .belief_nodes()
        .iter()
        .filter(|n| state.status_of(n) == Some(Status::Live))
        .count();
    let report = defeat(&mut state, root.clone(), &evidence(Linguistic)).unwrap();
    assert_eq!(report.defeated.len(), 6);
    assert!(report.defeated.contains(&root));
    let live_after = state
        .belief_nodes()
        .iter()
        .filter(|n| state.status_of(n) == Some(Status::Live))
        .count();
    assert_eq!(live_before - live_after, 6);
    assert!(state.holds(&p("arriveEarly")));
    assert!(!state.holds(&p("noBeneficiary")));
    assert_closed(&state);

    // once defeated, a second defeat finds nothing left to do
    assert!(defeat(&mut state, root, &evidence(Physical))
        .unwrap()
        .defeated
        .is_empty());
}

#[test]
fn leaf_defeat_touches_only_the_leaf() {
    let (mut state, _) = retraction_fixture();
    let leaf = NodeId::Entry(state.context().find_live(&p("visitBank")).unwrap().id);
    assert_eq!(
        defeat(&mut state, leaf.clone(), &evidence(Linguistic))
            .unwrap()
            .defeated,
        vec![leaf]
    );
}

#[test]
fn defeat_needs_strictly_stronger_evidence() {
    for target in [Hypothesis, Default, Inference, Linguistic] {
        for by in EvidenceStrength::ALL {
            let mut state = DiscourseState::new("a".into(), "b".into(), false).unwrap();
            let (out, _) = state.assert_said(p("x"), target, "u1".into()).unwrap();
            let node = NodeId::Entry(out.entry);
            match defeat(&mut state, node.clone(), &evidence(by)) {
                Ok(r) => {
                    assert!(by > target);
                    assert_eq!(r.defeated, vec![node]);
                }
                Err(Error::DefeatRejected { .. }) => assert!(by <= target),
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn random_dependency_graphs_stay_closed() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let mut state = DiscourseState::new("a".into(), "b".into(), false).unwrap();
        for i in 0..rng.gen_range(1..4) {
            let s = *[Hypothesis, Default, Inference].choose(&mut rng).unwrap();
            state
                .assert_said(p(&format!("root{i}")), s, UtteranceId::new(format!("u{i}")))
                .unwrap();
        }
        for i in 0..rng.gen_range(0..12) {
            let live: Vec<NodeId> = state
                .belief_nodes()
                .into_iter()
                .filter(|n| state.status_of(n) == Some(Status::Live))
                .collect();
            let k = rng.gen_range(1..=2.min(live.len()));
            let deps: BTreeSet<NodeId> = live.into_iter().choose_multiple(&mut rng, k).into_iter().collect();
            state.derive_dependent(p(&format!("d{i}")), deps).unwrap();
        }
        let target = state.belief_nodes().choose(&mut rng).cloned().unwrap();
        defeat(&mut state, target, &evidence(Linguistic)).unwrap();
        assert_closed(&state);
    }
}

#[test]
fn no_default_after_conflict_or_rising_reply() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for _ in 0..500 {
        let t = common::random_transcript(&mut rng, 12);
        let (state, trace) = replay(&t).unwrap();
        for (e, r) in t.events.iter().zip(&trace) {
            if e.intonation == Intonation::Rising || !r.conflicts.is_empty() {
                checked += 1;
                for a in &r.acceptances {
                    assert!(
                        !matches!(a.outcome, AcceptanceOutcome::Accepted { strength: Default, .. }),
                        "{} created a default acceptance of {}",
                        e.id,
                        a.utterance
                    );
                }
            }
        }
        for a in state.acceptances().iter().filter(|a| a.strength == Default) {
            let trigger = a
                .dependencies
                .iter()
                .find_map(|d| match d {
                    NodeId::Utterance(u) => Some(u.clone()),
                    _ => None,
                })
                .expect("a default acceptance records its trigger");
            let e = state.event(&trigger).unwrap();
            assert_ne!(e.intonation, Intonation::Rising);
            assert!(state.conflicts().iter().all(|c| c.event != trigger));
        }
    }
    assert!(checked > 100);
}

#[test]
fn support_links() {
    let (mut state, trace) = replay(&common::fixture("example4.dlg")).unwrap();
    let last = trace.last().unwrap();
    assert_eq!(last.supports.len(), 1);
    let s = &state.supports()[0];
    assert_eq!(
        (s.belief.clone(), s.goal.clone()),
        (p("only1500PerYear"), p("takeMoney"))
    );
    let goal_acceptances: Vec<_> = state
        .acceptances()
        .iter()
        .filter(|a| a.proposition == p("takeMoney"))
        .collect();
    assert!(!goal_acceptances.is_empty());
    for a in goal_acceptances {
        assert!(a.dependencies.contains(&NodeId::Support(s.id)));
    }

    let id = s.id;
    let before = state.supports().len();
    assert_eq!(
        record_support(&mut state, &p("only1500PerYear"), &p("takeMoney")).unwrap(),
        id
    );
    assert_eq!(state.supports().len(), before);
    assert!(matches!(
        record_support(&mut state, &p("only1500PerYear"), &p("buyAnnuity")),
        Err(Error::UnknownProposition(_))
    ));
}
