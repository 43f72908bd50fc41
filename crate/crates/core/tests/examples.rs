//! The worked examples replayed end to end.

mod common;

use std::time::{Duration, Instant};

use iru_core::evidence::EvidenceStrength::*;
use iru_core::grounding::{Assumption::*, IruClass};
use iru_core::{replay, Proposition};

fn p(s: &str) -> Proposition {
    s.parse().unwrap()
}

#[test]
fn repeat_leaves_realize_at_default() {
    let start = Instant::now();
    let (state, trace) = replay(&common::fixture("example1.dlg")).unwrap();
    let u8 = trace.iter().find(|r| r.event.as_str() == "u8").unwrap();
    assert_eq!(u8.class, IruClass::Repeat);
    let u7 = u8.record("u7").unwrap();
    assert_eq!(
        u7.strengths,
        vec![
            (Copresent, Linguistic),
            (Attend, Linguistic),
            (Hear, Linguistic),
            (Realize, Default)
        ]
    );
    assert_eq!(u7.understand, Default);
    assert!(state.record(&"u7".into()).is_some());
    assert!(start.elapsed() < Duration::from_secs(1));
}

#[test]
fn paraphrase_grounds_fully() {
    let start = Instant::now();
    let (state, trace) = replay(&common::fixture("example2.dlg")).unwrap();
    let u20 = trace.iter().find(|r| r.event.as_str() == "u20").unwrap();
    assert_eq!(u20.class, IruClass::Paraphrase);
    assert_eq!(u20.record("u19").unwrap().understand, Linguistic);
    assert_eq!(state.understanding_strength(&"u19".into()), Some(Linguistic));
    assert!(start.elapsed() < Duration::from_secs(1));
}

#[test]
fn inference_and_implicature_licenses() {
    let start = Instant::now();
    let t = common::fixture("example3.dlg");
    let at = |n: usize| {
        replay(&iru_core::Transcript {
            events: t.events[..n].to_vec(),
            ..t.clone()
        })
        .unwrap()
    };

    let (s16, _) = at(2);
    assert!(s16.holds(&p("!eligible81")));
    assert_eq!(
        s16.license(&p("pension"), &p("!eligible81")).unwrap().strength,
        Inference
    );

    let (s17, trace) = at(3);
    assert_eq!(trace[2].class, IruClass::ExplicitInference);
    assert_eq!(
        s17.license(&p("pension"), &p("!eligible81")).unwrap().strength,
        Linguistic
    );
    assert_eq!(
        s17.license(&p("!eligible81"), &p("eligible82")).unwrap().strength,
        Hypothesis
    );

    let (s18, trace) = at(4);
    assert_eq!(trace[3].class, IruClass::ImplicatureReinforcement);
    assert_eq!(
        s18.license(&p("!eligible81"), &p("eligible82")).unwrap().strength,
        Linguistic
    );
    assert!(start.elapsed() < Duration::from_secs(1));
}

#[test]
fn prompts_and_interruption() {
    let (state, trace) = replay(&common::fixture("example4.dlg")).unwrap();
    let classes: Vec<_> = trace.iter().map(|r| (r.event.as_str().to_string(), r.class)).collect();
    assert!(classes.contains(&("u4".into(), IruClass::Prompt)));
    assert!(classes.contains(&("u6".into(), IruClass::Prompt)));
    assert_eq!(trace.last().unwrap().class, IruClass::ExplicitInference);
    // u8 broke the flow, so u7 only gets its next-turn evidence from u10
    let u8 = trace.iter().find(|r| r.event.as_str() == "u8").unwrap();
    assert!(u8.record("u7").is_none());
    assert_eq!(state.record(&"u7".into()).unwrap().get(Copresent), Some(Linguistic));
}
