//! Inference of mutual understanding.
//!
//! When A says u to B intending p, B's understanding of u as p rests on
//! four assumptions (A and B were copresent, B attended, B heard, B takes u
//! to realize p), plus a fifth when u is meant to license a further
//! inference. Each starts out as a bare hypothesis. The addressee's next
//! utterance is the evidence that raises them:
//!
//! | next utterance              | assumptions raised              | to          |
//! |-----------------------------|---------------------------------|-------------|
//! | prompt                      | attend                          | linguistic  |
//! | repeat                      | attend, hear                    | linguistic  |
//! | paraphrase                  | attend, hear, realize           | linguistic  |
//! | explicit inference          | attend, hear, realize, license  | linguistic  |
//! | implicature reinforcement   | attend, hear, realize, license  | linguistic  |
//! | any next utterance          | copresent                       | linguistic  |
//! |                             | attend, hear, realize, license  | default     |
//!
//! Understanding is then the weakest of the record's assumptions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evidence::{min_strength, EvidenceStrength};
use crate::ids::{Participant, UtteranceId};
use crate::propositions::{Proposition, RedundancyVerdict, SyntaxError};
use crate::state::DiscourseState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Act {
    Assert,
    Question,
    Prompt,
    Affirmation,
    Other,
}

impl Act {
    pub const ALL: [Act; 5] = [Act::Assert, Act::Question, Act::Prompt, Act::Affirmation, Act::Other];

    pub fn label(self) -> &'static str {
        match self {
            Act::Assert => "assert",
            Act::Question => "question",
            Act::Prompt => "prompt",
            Act::Affirmation => "affirmation",
            Act::Other => "other",
        }
    }
}

impl fmt::Display for Act {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Act {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Act::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| format!("unknown act `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Intonation {
    Rising,
    Falling,
    #[default]
    Unmarked,
}

impl Intonation {
    pub fn label(self) -> &'static str {
        match self {
            Intonation::Rising => "rising",
            Intonation::Falling => "falling",
            Intonation::Unmarked => "unmarked",
        }
    }
}

impl fmt::Display for Intonation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Intonation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rising" => Ok(Intonation::Rising),
            "falling" => Ok(Intonation::Falling),
            "unmarked" => Ok(Intonation::Unmarked),
            _ => Err(format!("unknown intonation `{s}`")),
        }
    }
}

/// `p => q`: an annotated relation between two propositions, used both for
/// intended implicatures and for support links.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropositionLink {
    pub from: Proposition,
    pub to: Proposition,
}

impl fmt::Display for PropositionLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.from, self.to)
    }
}

impl FromStr for PropositionLink {
    type Err = SyntaxError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (from, to) = s
            .split_once("=>")
            .ok_or_else(|| SyntaxError(format!("expected `p => q`, got `{s}`")))?;
        Ok(PropositionLink {
            from: from.parse()?,
            to: to.parse()?,
        })
    }
}

/// One `say(speaker, addressee, u, p)` act with its annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtteranceEvent {
    pub id: UtteranceId,
    pub turn: usize,
    pub speaker: Participant,
    pub addressee: Participant,
    pub text: String,
    pub act: Act,
    pub intonation: Intonation,
    pub realizes: Vec<Proposition>,
    pub antecedents: Vec<UtteranceId>,
    /// Intended inference the speaker means the realized content to license.
    pub implicates: Option<PropositionLink>,
    /// The speaker offers `from` as a reason to adopt `to`.
    pub supports: Option<PropositionLink>,
    /// Explicit rejection of an earlier utterance.
    pub rejects: Option<UtteranceId>,
    /// The flow of conversation broke before this event.
    pub interrupted: bool,
}

impl UtteranceEvent {
    /// A bare assertion; annotations can be filled in afterwards.
    pub fn new(
        id: impl Into<String>,
        turn: usize,
        speaker: impl Into<String>,
        addressee: impl Into<String>,
        text: impl Into<String>,
    ) -> Self {
        UtteranceEvent {
            id: UtteranceId::new(id),
            turn,
            speaker: Participant::new(speaker),
            addressee: Participant::new(addressee),
            text: text.into(),
            act: Act::Assert,
            intonation: Intonation::Unmarked,
            realizes: Vec::new(),
            antecedents: Vec::new(),
            implicates: None,
            supports: None,
            rejects: None,
            interrupted: false,
        }
    }

    pub fn surface_tokens(&self) -> Vec<String> {
        normalize_tokens(&self.text)
    }

    /// Whether the realized content enters the common ground as said.
    pub fn asserts_content(&self) -> bool {
        !matches!(self.act, Act::Question | Act::Prompt)
    }
}

/// Lowercase, strip punctuation, split on whitespace.
pub fn normalize_tokens(text: &str) -> Vec<String> {
    text.chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn contains_run(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// True when one token sequence occurs contiguously inside the other.
pub fn is_token_repeat(a: &[String], b: &[String]) -> bool {
    contains_run(a, b) || contains_run(b, a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assumption {
    Copresent,
    Attend,
    Hear,
    Realize,
    License,
}

impl Assumption {
    pub const ALL: [Assumption; 5] = [
        Assumption::Copresent,
        Assumption::Attend,
        Assumption::Hear,
        Assumption::Realize,
        Assumption::License,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Assumption::Copresent => "copresent",
            Assumption::Attend => "attend",
            Assumption::Hear => "hear",
            Assumption::Realize => "realize",
            Assumption::License => "license",
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Evidence behind each assumption underlying understanding of one utterance.
///
/// Strengths only ever go up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumptionRecord {
    pub utterance_id: UtteranceId,
    strengths: BTreeMap<Assumption, EvidenceStrength>,
}

impl AssumptionRecord {
    /// Fresh record, every assumption a hypothesis. `license` applies only
    /// when the utterance carries an intended inference.
    pub fn new(utterance_id: UtteranceId, with_license: bool) -> Self {
        let strengths = Assumption::ALL
            .into_iter()
            .filter(|a| with_license || *a != Assumption::License)
            .map(|a| (a, EvidenceStrength::Hypothesis))
            .collect();
        AssumptionRecord {
            utterance_id,
            strengths,
        }
    }

    pub fn get(&self, assumption: Assumption) -> Option<EvidenceStrength> {
        self.strengths.get(&assumption).copied()
    }

    pub fn has(&self, assumption: Assumption) -> bool {
        self.strengths.contains_key(&assumption)
    }

    /// Applicable assumptions with their strengths, in a fixed order.
    pub fn strengths(&self) -> impl Iterator<Item = (Assumption, EvidenceStrength)> + '_ {
        self.strengths.iter().map(|(a, s)| (*a, *s))
    }

    /// Raises an applicable assumption to at least `to`. Returns whether it changed.
    pub fn raise(&mut self, assumption: Assumption, to: EvidenceStrength) -> bool {
        match self.strengths.get_mut(&assumption) {
            Some(s) if *s < to => {
                *s = to;
                true
            }
            _ => false,
        }
    }
}

/// `understand(addressee, u, p)` at the strength of the record's weakest assumption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnderstandingBelief {
    pub utterance_id: UtteranceId,
    pub proposition: Proposition,
    pub strength: EvidenceStrength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LicenseOrigin {
    /// Found by closing the context over what was said.
    Entailment,
    /// Annotated on the utterance as an intended implicature.
    Implicature,
}

/// Belief that `premise` licenses `conclusion` in the current context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LicenseLink {
    pub premise: Proposition,
    pub conclusion: Proposition,
    pub strength: EvidenceStrength,
    pub origin: LicenseOrigin,
    /// Utterance that introduced the link, for annotated implicatures.
    pub source: Option<UtteranceId>,
}

impl fmt::Display for LicenseLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {} [{}]", self.premise, self.conclusion, self.strength)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IruClass {
    Prompt,
    Repeat,
    Paraphrase,
    ExplicitInference,
    ImplicatureReinforcement,
    None,
}

impl IruClass {
    pub const ALL: [IruClass; 6] = [
        IruClass::Prompt,
        IruClass::Repeat,
        IruClass::Paraphrase,
        IruClass::ExplicitInference,
        IruClass::ImplicatureReinforcement,
        IruClass::None,
    ];

    pub fn label(self) -> &'static str {
        match self {
            IruClass::Prompt => "prompt",
            IruClass::Repeat => "repeat",
            IruClass::Paraphrase => "paraphrase",
            IruClass::ExplicitInference => "explicit_inference",
            IruClass::ImplicatureReinforcement => "implicature_reinforcement",
            IruClass::None => "none",
        }
    }

    pub fn is_iru(self) -> bool {
        self != IruClass::None
    }

    /// The assumptions an IRU of this class raises to `linguistic`.
    pub fn upgraded_assumptions(self) -> &'static [Assumption] {
        use Assumption::*;
        match self {
            IruClass::Prompt => &[Attend],
            IruClass::Repeat => &[Attend, Hear],
            IruClass::Paraphrase => &[Attend, Hear, Realize],
            IruClass::ExplicitInference | IruClass::ImplicatureReinforcement => &[Attend, Hear, Realize, License],
            IruClass::None => &[],
        }
    }

    // overlap precedence among redundancy-based classes
    fn precedence(self) -> u8 {
        match self {
            IruClass::ImplicatureReinforcement => 4,
            IruClass::ExplicitInference => 3,
            IruClass::Repeat => 2,
            IruClass::Paraphrase => 1,
            IruClass::Prompt | IruClass::None => 0,
        }
    }
}

impl fmt::Display for IruClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An IRU class together with the utterances it is redundant with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub class: IruClass,
    pub antecedents: Vec<UtteranceId>,
}

pub fn open_record(event: &UtteranceEvent) -> AssumptionRecord {
    AssumptionRecord::new(event.id.clone(), event.implicates.is_some())
}

/// Classifies `event` against the state as it stood before the event.
pub fn classify_iru(event: &UtteranceEvent, state: &DiscourseState) -> Result<Classification> {
    for a in &event.antecedents {
        match state.event(a) {
            Some(prev) if prev.turn < event.turn => {}
            _ => {
                return Err(Error::DanglingAntecedent {
                    event: event.id.clone(),
                    antecedent: a.clone(),
                })
            }
        }
    }
    let annotated_or = |fallback: &[UtteranceId]| -> Vec<UtteranceId> {
        if event.antecedents.is_empty() {
            fallback.to_vec()
        } else {
            event.antecedents.clone()
        }
    };

    if event.act == Act::Prompt {
        let previous: Vec<UtteranceId> = state.last_event().map(|e| e.id.clone()).into_iter().collect();
        return Ok(Classification {
            class: IruClass::Prompt,
            antecedents: annotated_or(&previous),
        });
    }

    let tokens = event.surface_tokens();
    let mut best = Classification {
        class: IruClass::None,
        antecedents: Vec::new(),
    };
    let mut consider = |class: IruClass, antecedents: Vec<UtteranceId>| {
        if class.precedence() > best.class.precedence() {
            best = Classification { class, antecedents };
        }
    };
    for p in &event.realizes {
        if let Some(link) = state.licenses().iter().find(|l| {
            l.origin == LicenseOrigin::Implicature && &l.conclusion == p && l.strength < EvidenceStrength::Linguistic
        }) {
            let source: Vec<UtteranceId> = link.source.clone().into_iter().collect();
            consider(IruClass::ImplicatureReinforcement, annotated_or(&source));
        }
        match state.context().is_redundant(p) {
            RedundancyVerdict::NotRedundant => {}
            RedundancyVerdict::Entailed { utterances, .. } => {
                consider(IruClass::ExplicitInference, annotated_or(&utterances));
            }
            RedundancyVerdict::Said { utterances } => {
                let candidates = annotated_or(&utterances);
                let repeated = candidates
                    .iter()
                    .filter_map(|id| state.event(id))
                    .any(|prev| is_token_repeat(&tokens, &prev.surface_tokens()));
                let class = if repeated {
                    IruClass::Repeat
                } else {
                    IruClass::Paraphrase
                };
                consider(class, candidates);
            }
        }
    }
    Ok(best)
}

/// Raises exactly the assumptions `class` addresses to `linguistic`.
pub fn apply_iru_upgrade(record: &AssumptionRecord, class: IruClass) -> AssumptionRecord {
    let mut out = record.clone();
    for a in class.upgraded_assumptions() {
        out.raise(*a, EvidenceStrength::Linguistic);
    }
    out
}

/// Evidence carried by any next utterance of the addressee.
pub fn apply_any_next_upgrade(record: &AssumptionRecord) -> AssumptionRecord {
    let mut out = record.clone();
    out.raise(Assumption::Copresent, EvidenceStrength::Linguistic);
    for a in [
        Assumption::Attend,
        Assumption::Hear,
        Assumption::Realize,
        Assumption::License,
    ] {
        out.raise(a, EvidenceStrength::Default);
    }
    out
}

pub fn understanding_strength(record: &AssumptionRecord) -> EvidenceStrength {
    let values: Vec<EvidenceStrength> = record.strengths().map(|(_, s)| s).collect();
    min_strength(&values).expect("a record always holds the four core assumptions")
}
