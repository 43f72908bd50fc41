//! Evidence strengths and the weakest-link combination law.
//!
//! Every belief in the model is supported by evidence of one of five kinds,
//! ordered by how easily the belief can be defeated:
//!
//! ```text
//! hypothesis < default < inference < linguistic < physical
//! ```
//!
//! A belief resting on several assumptions is only as strong as the weakest
//! of them, so strengths are combined with [`min_strength`] and nothing else.
//! `physical` is part of the lattice but reserved: no operation in this crate
//! produces it.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Position in the five-point evidence lattice.
///
/// The derived `Ord` follows declaration order, which is the lattice order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvidenceStrength {
    Hypothesis,
    Default,
    Inference,
    Linguistic,
    Physical,
}

impl EvidenceStrength {
    /// All five labels, weakest first.
    pub const ALL: [EvidenceStrength; 5] = [
        EvidenceStrength::Hypothesis,
        EvidenceStrength::Default,
        EvidenceStrength::Inference,
        EvidenceStrength::Linguistic,
        EvidenceStrength::Physical,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EvidenceStrength::Hypothesis => "hypothesis",
            EvidenceStrength::Default => "default",
            EvidenceStrength::Inference => "inference",
            EvidenceStrength::Linguistic => "linguistic",
            EvidenceStrength::Physical => "physical",
        }
    }
}

impl fmt::Display for EvidenceStrength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EvidenceStrength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EvidenceStrength::ALL
            .into_iter()
            .find(|e| e.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown evidence strength `{s}`")))
    }
}

/// Weakest link: the strength of a belief resting on `strengths`.
///
/// A belief with no supporting assumptions has no strength at all, so an
/// empty slice is rejected.
pub fn min_strength(strengths: &[EvidenceStrength]) -> Result<EvidenceStrength, Error> {
    strengths
        .iter()
        .copied()
        .min()
        .ok_or_else(|| Error::InvalidArgument("min_strength of an empty set of assumptions".into()))
}

/// True iff evidence of strength `a` can defeat a belief held at `b`.
pub fn defeats(a: EvidenceStrength, b: EvidenceStrength) -> bool {
    a > b
}
