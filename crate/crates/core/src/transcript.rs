//! The `.dlg` annotated-transcript format.
//!
//! A transcript is a sequence of blank-line-separated records of
//! `key: value` lines. The first record is the header:
//!
//! ```text
//! dialogue: example1
//! participants: h, r
//! require-acceptance: true
//! ```
//!
//! Every following record is one utterance. `id`, `turn`, `speaker`,
//! `addressee` and `text` are required; `act`, `intonation`, `realizes`,
//! `antecedents`, `implicates`, `supports`, `rejects` and `interrupted` are
//! optional. Lines starting with `#` are comments. Unknown keys are errors.
//!
//! [`serialize`] writes the canonical form: fixed key order, `act` always
//! present, `intonation: unmarked`, `interrupted: false` and empty lists
//! omitted, LF line endings.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::acceptance::AffirmationLexicon;
use crate::grounding::{Act, Intonation, PropositionLink, UtteranceEvent};
use crate::ids::{Participant, UtteranceId};
use crate::propositions::Proposition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub dialogue: String,
    pub participants: [Participant; 2],
    pub require_acceptance: bool,
    pub events: Vec<UtteranceEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty transcript")]
    EmptyTranscript,
    #[error("missing header record (dialogue, participants, require-acceptance)")]
    MissingHeader,
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("field `{0}` given twice")]
    DuplicateField(String),
    #[error("missing required field `{0}`")]
    MissingField(String),
    #[error("expected `key: value`")]
    MalformedLine,
    #[error("invalid value for `{field}`: {reason}")]
    InvalidValue { field: String, reason: String },
    #[error("bad proposition syntax: {0}")]
    BadPropositionSyntax(String),
    #[error("duplicate utterance id `{0}`")]
    DuplicateUtterance(String),
    #[error("`{0}` does not name an earlier utterance")]
    DanglingAntecedent(String),
}

/// A parse problem at a 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

/// Every problem found in a document, in line order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

const HEADER_KEYS: [&str; 3] = ["dialogue", "participants", "require-acceptance"];
const EVENT_KEYS: [&str; 13] = [
    "id",
    "turn",
    "speaker",
    "addressee",
    "text",
    "act",
    "intonation",
    "realizes",
    "antecedents",
    "implicates",
    "supports",
    "rejects",
    "interrupted",
];

struct Field {
    line: usize,
    value: String,
}

struct RawRecord {
    line: usize,
    fields: BTreeMap<String, Field>,
}

pub fn parse(text: &str) -> Result<Transcript, ParseErrors> {
    parse_with(text, &AffirmationLexicon::default())
}

/// Parses with a custom lexicon for resolving utterances without an `act`.
pub fn parse_with(text: &str, lexicon: &AffirmationLexicon) -> Result<Transcript, ParseErrors> {
    let mut errors = Vec::new();
    let records = split_records(text, &mut errors);
    let Some((header, events)) = records.split_first() else {
        errors.push(ParseError {
            line: 1,
            kind: ParseErrorKind::EmptyTranscript,
        });
        return Err(ParseErrors(errors));
    };

    let header = parse_header(header, &mut errors);
    if events.is_empty() && header.is_some() {
        errors.push(ParseError {
            line: records[0].line,
            kind: ParseErrorKind::EmptyTranscript,
        });
    }

    let mut parsed = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for raw in events {
        let event = parse_event(raw, header.as_ref().map(|h| &h.1), lexicon, &mut errors);
        if let Some(event) = &event {
            // references must point backwards
            let rejects: Vec<UtteranceId> = event.rejects.iter().cloned().collect();
            for (key, ids) in [("antecedents", &event.antecedents), ("rejects", &rejects)] {
                for a in ids {
                    if !seen.contains(a.as_str()) {
                        errors.push(ParseError {
                            line: raw.fields[key].line,
                            kind: ParseErrorKind::DanglingAntecedent(a.0.clone()),
                        });
                    }
                }
            }
        }
        // ids count as defined even when the rest of their record is broken
        if let Some(id) = raw.fields.get("id") {
            if !seen.insert(id.value.clone()) {
                errors.push(ParseError {
                    line: id.line,
                    kind: ParseErrorKind::DuplicateUtterance(id.value.clone()),
                });
            }
        }
        parsed.extend(event);
    }

    if !errors.is_empty() {
        errors.sort_by_key(|e| e.line);
        return Err(ParseErrors(errors));
    }
    let (dialogue, participants, require_acceptance) = header.expect("header errors were reported");
    Ok(Transcript {
        dialogue,
        participants,
        require_acceptance,
        events: parsed,
    })
}

fn split_records(text: &str, errors: &mut Vec<ParseError>) -> Vec<RawRecord> {
    let mut records = Vec::new();
    let mut current: Option<RawRecord> = None;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            records.extend(current.take());
            continue;
        }
        let record = current.get_or_insert_with(|| RawRecord {
            line: n,
            fields: BTreeMap::new(),
        });
        let Some((key, value)) = line.split_once(':') else {
            errors.push(ParseError {
                line: n,
                kind: ParseErrorKind::MalformedLine,
            });
            continue;
        };
        let key = key.trim().to_string();
        if record.fields.contains_key(&key) {
            errors.push(ParseError {
                line: n,
                kind: ParseErrorKind::DuplicateField(key),
            });
            continue;
        }
        record.fields.insert(
            key,
            Field {
                line: n,
                value: value.trim().to_string(),
            },
        );
    }
    records.extend(current);
    records
}

// Returns whether every required key is present.
fn check_keys(raw: &RawRecord, allowed: &[&str], required: &[&str], errors: &mut Vec<ParseError>) -> bool {
    // unknown keys are reported but do not stop the rest of the record being checked
    let mut ok = true;
    for (k, f) in &raw.fields {
        if !allowed.contains(&k.as_str()) {
            errors.push(ParseError {
                line: f.line,
                kind: ParseErrorKind::UnknownField(k.clone()),
            });
        }
    }
    for k in required {
        if !raw.fields.contains_key(*k) {
            errors.push(ParseError {
                line: raw.line,
                kind: ParseErrorKind::MissingField(k.to_string()),
            });
            ok = false;
        }
    }
    ok
}

fn invalid(field: &Field, key: &str, reason: impl Into<String>) -> ParseError {
    ParseError {
        line: field.line,
        kind: ParseErrorKind::InvalidValue {
            field: key.to_string(),
            reason: reason.into(),
        },
    }
}

fn parse_bool(field: &Field, key: &str) -> Result<bool, ParseError> {
    match field.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(invalid(field, key, format!("expected true or false, got `{other}`"))),
    }
}

fn parse_id(field: &Field, key: &str) -> Result<String, ParseError> {
    let v = field.value.as_str();
    if v.is_empty() || v.chars().any(|c| c.is_whitespace() || c == ',') {
        return Err(invalid(field, key, format!("`{v}` is not an identifier")));
    }
    Ok(v.to_string())
}

fn parse_header(raw: &RawRecord, errors: &mut Vec<ParseError>) -> Option<(String, [Participant; 2], bool)> {
    if !raw.fields.contains_key("dialogue") && raw.fields.contains_key("id") {
        errors.push(ParseError {
            line: raw.line,
            kind: ParseErrorKind::MissingHeader,
        });
        return None;
    }
    if !check_keys(raw, &HEADER_KEYS, &["dialogue", "participants"], errors) {
        return None;
    }
    let mut ok = true;
    let mut push = |r: Result<(), ParseError>| {
        if let Err(e) = r {
            errors.push(e);
            ok = false;
        }
    };

    let dialogue = parse_id(&raw.fields["dialogue"], "dialogue");
    let dialogue = dialogue.map_err(|e| push(Err(e))).ok();

    let pf = &raw.fields["participants"];
    let names: Vec<&str> = pf.value.split(',').map(str::trim).collect();
    let participants = match names.as_slice() {
        [a, b] if !a.is_empty() && !b.is_empty() && a != b && !a.contains(' ') && !b.contains(' ') => {
            Some([Participant::new(*a), Participant::new(*b)])
        }
        _ => {
            push(Err(invalid(pf, "participants", "expected exactly two distinct names")));
            None
        }
    };

    let require = match raw.fields.get("require-acceptance") {
        Some(f) => parse_bool(f, "require-acceptance").map_err(|e| push(Err(e))).ok(),
        None => Some(false),
    };
    match (dialogue, participants, require, ok) {
        (Some(d), Some(p), Some(r), true) => Some((d, p, r)),
        _ => None,
    }
}

fn parse_event(
    raw: &RawRecord,
    participants: Option<&[Participant; 2]>,
    lexicon: &AffirmationLexicon,
    errors: &mut Vec<ParseError>,
) -> Option<UtteranceEvent> {
    if !check_keys(raw, &EVENT_KEYS, &EVENT_KEYS[..5], errors) {
        return None;
    }
    let before = errors.len();
    let unknown = raw.fields.keys().any(|k| !EVENT_KEYS.contains(&k.as_str()));
    let f = |k: &str| raw.fields.get(k);
    let mut take = |r: Result<(), ParseError>| {
        if let Err(e) = r {
            errors.push(e);
        }
    };

    let id = parse_id(&raw.fields["id"], "id").map_err(|e| take(Err(e))).ok();
    let turn_field = &raw.fields["turn"];
    let turn = turn_field
        .value
        .parse::<usize>()
        .map_err(|_| take(Err(invalid(turn_field, "turn", "expected a non-negative integer"))))
        .ok();

    let mut who = |key: &str| -> Option<Participant> {
        let field = &raw.fields[key];
        let p = Participant::new(field.value.clone());
        match participants {
            Some(ps) if !ps.contains(&p) => {
                take(Err(invalid(
                    field,
                    key,
                    format!("`{}` is not a participant", field.value),
                )));
                None
            }
            _ => Some(p),
        }
    };
    let speaker = who("speaker");
    let addressee = who("addressee");
    if let (Some(s), Some(a)) = (&speaker, &addressee) {
        if s == a {
            take(Err(invalid(
                &raw.fields["addressee"],
                "addressee",
                "speaker cannot address themselves",
            )));
        }
    }

    let text = raw.fields["text"].value.clone();

    let realizes: Vec<Proposition> = match f("realizes") {
        None => Vec::new(),
        Some(field) => {
            let mut out = Vec::new();
            for part in field.value.split(';') {
                match part.parse::<Proposition>() {
                    Ok(p) => out.push(p),
                    Err(e) => take(Err(ParseError {
                        line: field.line,
                        kind: ParseErrorKind::BadPropositionSyntax(e.0),
                    })),
                }
            }
            out
        }
    };

    let act = match f("act") {
        None => Some(if lexicon.matches(&text) {
            Act::Affirmation
        } else if realizes.is_empty() {
            Act::Other
        } else {
            Act::Assert
        }),
        Some(field) => field
            .value
            .parse::<Act>()
            .map_err(|r| take(Err(invalid(field, "act", r))))
            .ok(),
    };
    if act == Some(Act::Prompt) && !realizes.is_empty() {
        take(Err(invalid(
            &raw.fields["act"],
            "act",
            "a prompt realizes no proposition",
        )));
    }

    let intonation = match f("intonation") {
        None => Some(Intonation::Unmarked),
        Some(field) => field
            .value
            .parse::<Intonation>()
            .map_err(|r| take(Err(invalid(field, "intonation", r))))
            .ok(),
    };

    let antecedents: Vec<UtteranceId> = match f("antecedents") {
        None => Vec::new(),
        Some(field) => {
            let mut out = Vec::new();
            for part in field.value.split(',') {
                let part = part.trim();
                if part.is_empty() || part.contains(char::is_whitespace) {
                    take(Err(invalid(
                        field,
                        "antecedents",
                        format!("`{}` is not an id list", field.value),
                    )));
                    break;
                }
                out.push(UtteranceId::new(part));
            }
            out
        }
    };

    let mut link = |key: &str| -> Option<PropositionLink> {
        let field = f(key)?;
        field
            .value
            .parse::<PropositionLink>()
            .map_err(|e| {
                take(Err(ParseError {
                    line: field.line,
                    kind: ParseErrorKind::BadPropositionSyntax(e.0),
                }))
            })
            .ok()
    };
    let implicates = link("implicates");
    let supports = link("supports");

    let rejects = f("rejects").and_then(|field| {
        parse_id(field, "rejects")
            .map(UtteranceId::new)
            .map_err(|e| take(Err(e)))
            .ok()
    });
    let interrupted = match f("interrupted") {
        None => Some(false),
        Some(field) => parse_bool(field, "interrupted").map_err(|e| take(Err(e))).ok(),
    };

    if errors.len() != before || unknown {
        return None;
    }
    Some(UtteranceEvent {
        id: UtteranceId::new(id?),
        turn: turn?,
        speaker: speaker?,
        addressee: addressee?,
        text,
        act: act?,
        intonation: intonation?,
        realizes,
        antecedents,
        implicates,
        supports,
        rejects,
        interrupted: interrupted?,
    })
}

/// Canonical text form of `t`.
pub fn serialize(t: &Transcript) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dialogue: {}", t.dialogue);
    let _ = writeln!(out, "participants: {}, {}", t.participants[0], t.participants[1]);
    let _ = writeln!(out, "require-acceptance: {}", t.require_acceptance);
    for e in &t.events {
        out.push('\n');
        let _ = writeln!(out, "id: {}", e.id);
        let _ = writeln!(out, "turn: {}", e.turn);
        let _ = writeln!(out, "speaker: {}", e.speaker);
        let _ = writeln!(out, "addressee: {}", e.addressee);
        let _ = writeln!(out, "text: {}", e.text);
        let _ = writeln!(out, "act: {}", e.act);
        if e.intonation != Intonation::Unmarked {
            let _ = writeln!(out, "intonation: {}", e.intonation);
        }
        if !e.realizes.is_empty() {
            let props: Vec<String> = e.realizes.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "realizes: {}", props.join("; "));
        }
        if !e.antecedents.is_empty() {
            let ids: Vec<&str> = e.antecedents.iter().map(UtteranceId::as_str).collect();
            let _ = writeln!(out, "antecedents: {}", ids.join(", "));
        }
        if let Some(l) = &e.implicates {
            let _ = writeln!(out, "implicates: {l}");
        }
        if let Some(l) = &e.supports {
            let _ = writeln!(out, "supports: {l}");
        }
        if let Some(r) = &e.rejects {
            let _ = writeln!(out, "rejects: {r}");
        }
        if e.interrupted {
            let _ = writeln!(out, "interrupted: true");
        }
    }
    out
}
