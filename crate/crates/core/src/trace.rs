//! Belief-state traces: one block per processed utterance.
//!
//! ```text
//! event u8
//!   turn: 2
//!   speaker: r
//!   addressee: h
//!   act: assert
//!   intonation: unmarked
//!   class: repeat
//!   antecedents: u7
//!   record u7
//!     copresent: linguistic
//!     attend: linguistic
//!     hear: linguistic
//!     realize: default
//!     understand: default
//!   acceptance: default u7 by r
//! ```
//!
//! Optional lines (`antecedents`, `acceptance`, `conflict`, `retracted`,
//! `license`, `derived`, `support`) appear only when there is something to
//! say, always in that order. Blocks are separated by one blank line.

use std::fmt::Write as _;

use crate::acceptance::{AcceptanceOutcome, ConflictEvidence, RetractionReport};
use crate::evidence::EvidenceStrength;
use crate::grounding::{Act, Assumption, AssumptionRecord, Intonation, IruClass, LicenseLink};
use crate::ids::{NodeId, Participant, UtteranceId};
use crate::propositions::Proposition;

/// An assumption record as it stood after an event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordSnapshot {
    pub utterance: UtteranceId,
    pub strengths: Vec<(Assumption, EvidenceStrength)>,
    pub understand: EvidenceStrength,
}

impl RecordSnapshot {
    pub fn of(record: &AssumptionRecord) -> Self {
        RecordSnapshot {
            utterance: record.utterance_id.clone(),
            strengths: record.strengths().collect(),
            understand: crate::grounding::understanding_strength(record),
        }
    }

    pub fn get(&self, assumption: Assumption) -> Option<EvidenceStrength> {
        self.strengths.iter().find(|(a, _)| *a == assumption).map(|(_, s)| *s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptanceLine {
    pub utterance: UtteranceId,
    pub agent: Participant,
    pub outcome: AcceptanceOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedLine {
    pub proposition: Proposition,
    pub strength: EvidenceStrength,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportLine {
    pub belief: Proposition,
    pub goal: Proposition,
    pub strength: EvidenceStrength,
}

/// What one event did to the discourse state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub event: UtteranceId,
    pub turn: usize,
    pub speaker: Participant,
    pub addressee: Participant,
    pub act: Act,
    pub intonation: Intonation,
    pub class: IruClass,
    pub antecedents: Vec<UtteranceId>,
    /// Records opened or upgraded by the event, in utterance order.
    pub records: Vec<RecordSnapshot>,
    pub acceptances: Vec<AcceptanceLine>,
    pub conflicts: Vec<ConflictEvidence>,
    pub retractions: Vec<RetractionReport>,
    /// License links created or strengthened.
    pub licenses: Vec<LicenseLink>,
    pub derived: Vec<DerivedLine>,
    pub supports: Vec<SupportLine>,
}

impl TraceRecord {
    pub fn record(&self, utterance: &str) -> Option<&RecordSnapshot> {
        self.records.iter().find(|r| r.utterance.as_str() == utterance)
    }

    pub fn acceptance(&self, utterance: &str) -> Option<&AcceptanceLine> {
        self.acceptances.iter().find(|a| a.utterance.as_str() == utterance)
    }
}

fn join_ids(ids: &[UtteranceId]) -> String {
    ids.iter().map(UtteranceId::as_str).collect::<Vec<_>>().join(", ")
}

fn join_nodes(nodes: &[NodeId]) -> String {
    nodes.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn write_block(out: &mut String, r: &TraceRecord) {
    let _ = writeln!(out, "event {}", r.event);
    let _ = writeln!(out, "  turn: {}", r.turn);
    let _ = writeln!(out, "  speaker: {}", r.speaker);
    let _ = writeln!(out, "  addressee: {}", r.addressee);
    let _ = writeln!(out, "  act: {}", r.act);
    let _ = writeln!(out, "  intonation: {}", r.intonation);
    let _ = writeln!(out, "  class: {}", r.class);
    if !r.antecedents.is_empty() {
        let _ = writeln!(out, "  antecedents: {}", join_ids(&r.antecedents));
    }
    for rec in &r.records {
        let _ = writeln!(out, "  record {}", rec.utterance);
        for (a, s) in &rec.strengths {
            let _ = writeln!(out, "    {a}: {s}");
        }
        let _ = writeln!(out, "    understand: {}", rec.understand);
    }
    for a in &r.acceptances {
        let _ = writeln!(
            out,
            "  acceptance: {} {} by {}",
            a.outcome.label(),
            a.utterance,
            a.agent
        );
    }
    for c in &r.conflicts {
        let _ = writeln!(out, "  conflict: {c}");
    }
    for x in &r.retractions {
        let _ = writeln!(
            out,
            "  retracted: {} by {}: {}",
            x.target,
            x.evidence,
            join_nodes(&x.defeated)
        );
    }
    for l in &r.licenses {
        let _ = writeln!(out, "  license: {l}");
    }
    for d in &r.derived {
        let _ = writeln!(out, "  derived: {} [{}]", d.proposition, d.strength);
    }
    for s in &r.supports {
        let _ = writeln!(out, "  support: {} => {} [{}]", s.belief, s.goal, s.strength);
    }
}

/// Text rendering of a trace. An empty trace renders as an empty document.
pub fn write_trace(records: &[TraceRecord]) -> String {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_block(&mut out, r);
    }
    out
}

/// Tab-separated rendering: one row per record snapshot or acceptance line.
pub fn write_trace_tabular(records: &[TraceRecord]) -> String {
    let mut out = String::from("event\tturn\tclass\tkind\tsubject\tdetail\n");
    for r in records {
        let head = format!("{}\t{}\t{}", r.event, r.turn, r.class);
        for rec in &r.records {
            let detail: Vec<String> = rec.strengths.iter().map(|(a, s)| format!("{a}={s}")).collect();
            let _ = writeln!(
                out,
                "{head}\trecord\t{}\t{} understand={}",
                rec.utterance,
                detail.join(" "),
                rec.understand
            );
        }
        for a in &r.acceptances {
            let _ = writeln!(
                out,
                "{head}\tacceptance\t{}\t{} by {}",
                a.utterance,
                a.outcome.label(),
                a.agent
            );
        }
        for c in &r.conflicts {
            let _ = writeln!(out, "{head}\tconflict\t{}\t{c}", c.event);
        }
        for x in &r.retractions {
            let _ = writeln!(out, "{head}\tretracted\t{}\t{}", x.target, join_nodes(&x.defeated));
        }
        for l in &r.licenses {
            let _ = writeln!(out, "{head}\tlicense\t{}\t{l}", l.conclusion);
        }
        for d in &r.derived {
            let _ = writeln!(out, "{head}\tderived\t{}\t{}", d.proposition, d.strength);
        }
        for s in &r.supports {
            let _ = writeln!(out, "{head}\tsupport\t{}\t{} [{}]", s.goal, s.belief, s.strength);
        }
    }
    out
}
