#![allow(dead_code)]

use std::path::PathBuf;

use iru_core::grounding::{Act, Intonation, PropositionLink, UtteranceEvent};
use iru_core::propositions::{Atom, Literal, Proposition};
use iru_core::transcript::Transcript;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> Transcript {
    let text = std::fs::read_to_string(fixtures().join(name)).unwrap();
    iru_core::parse(&text).unwrap()
}

const WORDS: [&str; 8] = ["the", "rate", "is", "five", "it", "does", "not", "yes"];

fn literal<R: Rng>(rng: &mut R) -> Literal {
    Literal {
        atom: Atom::new(["p", "q", "r", "s"].choose(rng).unwrap()).unwrap(),
        positive: rng.gen_bool(0.6),
    }
}

fn text<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=5);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// A random but well-formed two-party dialogue over four atoms.
pub fn random_transcript<R: Rng>(rng: &mut R, max_events: usize) -> Transcript {
    let n = rng.gen_range(1..=max_events);
    let mut events: Vec<UtteranceEvent> = Vec::with_capacity(n);
    let mut turn = 0;
    for i in 0..n {
        turn += rng.gen_range(1..=2);
        let (speaker, addressee) = if rng.gen_bool(0.5) { ("a", "b") } else { ("b", "a") };
        let mut e = UtteranceEvent::new(format!("u{i}"), turn, speaker, addressee, text(rng));
        e.act = *[
            Act::Assert,
            Act::Assert,
            Act::Question,
            Act::Prompt,
            Act::Affirmation,
            Act::Other,
        ]
        .choose(rng)
        .unwrap();
        e.intonation = *[Intonation::Unmarked, Intonation::Rising, Intonation::Falling]
            .choose(rng)
            .unwrap();
        if e.act != Act::Prompt {
            for _ in 0..rng.gen_range(0..=2) {
                let p = if rng.gen_bool(0.2) {
                    Proposition::Rule {
                        antecedents: vec![literal(rng)],
                        consequent: literal(rng),
                    }
                } else {
                    literal(rng).into()
                };
                if !e.realizes.contains(&p) {
                    e.realizes.push(p);
                }
            }
        }
        if i > 0 {
            for _ in 0..rng.gen_range(0..=2) {
                let a = events[rng.gen_range(0..i)].id.clone();
                if !e.antecedents.contains(&a) {
                    e.antecedents.push(a);
                }
            }
            if rng.gen_bool(0.1) {
                e.rejects = Some(events[rng.gen_range(0..i)].id.clone());
            }
        }
        if e.asserts_content() && rng.gen_bool(0.1) {
            if let Some(from) = e.realizes.iter().find(|p| p.as_literal().is_some()).cloned() {
                e.implicates = Some(PropositionLink {
                    from,
                    to: literal(rng).into(),
                });
            }
        }
        e.interrupted = rng.gen_bool(0.1);
        events.push(e);
    }
    Transcript {
        dialogue: "random".into(),
        participants: ["a".into(), "b".into()],
        require_acceptance: rng.gen_bool(0.7),
        events,
    }
}
