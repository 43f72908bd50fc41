//! The small propositional language beliefs and utterances are written in.
//!
//! Surface syntax, as used in transcript files:
//!
//! ```text
//! atom            positive literal
//! !atom           negative literal
//! a & b -> c      rule with a conjunctive antecedent
//! a <-> !b        biconditional between two literals
//! ```
//!
//! Identifiers match `[A-Za-z][A-Za-z0-9_]*` and are case-sensitive.
//! Whitespace around operators is ignored.

mod context;

pub use context::{AssertOutcome, Context, ContextEntry, Origin, RedundancyVerdict};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: &str) -> Result<Self, SyntaxError> {
        let mut chars = name.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(Atom(name.to_string()))
        } else {
            Err(SyntaxError(format!("`{name}` is not a valid identifier")))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }

    pub fn negate(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        write!(f, "{}", self.atom)
    }
}

impl FromStr for Literal {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.strip_prefix('!') {
            Some(rest) => {
                let rest = rest.trim_start();
                if rest.starts_with('!') {
                    return Err(SyntaxError(format!("double negation in `{s}`")));
                }
                Ok(Literal::neg(Atom::new(rest)?))
            }
            None => Ok(Literal::pos(Atom::new(s)?)),
        }
    }
}

/// Content of a belief or utterance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Proposition {
    Literal(Literal),
    /// Conjunction of distinct antecedent literals implies the consequent.
    Rule {
        antecedents: Vec<Literal>,
        consequent: Literal,
    },
    Biconditional(Literal, Literal),
}

impl Proposition {
    pub fn rule(antecedents: Vec<Literal>, consequent: Literal) -> Result<Self, SyntaxError> {
        if antecedents.is_empty() {
            return Err(SyntaxError("rule without antecedents".into()));
        }
        let distinct: BTreeSet<_> = antecedents.iter().collect();
        if distinct.len() != antecedents.len() {
            return Err(SyntaxError("duplicate literal in rule antecedent".into()));
        }
        Ok(Proposition::Rule {
            antecedents,
            consequent,
        })
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Proposition::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn atoms(&self) -> BTreeSet<&Atom> {
        match self {
            Proposition::Literal(l) => [&l.atom].into_iter().collect(),
            Proposition::Rule {
                antecedents,
                consequent,
            } => antecedents
                .iter()
                .chain(std::iter::once(consequent))
                .map(|l| &l.atom)
                .collect(),
            Proposition::Biconditional(l, r) => [&l.atom, &r.atom].into_iter().collect(),
        }
    }
}

impl From<Literal> for Proposition {
    fn from(l: Literal) -> Self {
        Proposition::Literal(l)
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Proposition::Literal(l) => write!(f, "{l}"),
            Proposition::Rule {
                antecedents,
                consequent,
            } => {
                for (i, a) in antecedents.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, " -> {consequent}")
            }
            Proposition::Biconditional(l, r) => write!(f, "{l} <-> {r}"),
        }
    }
}

impl FromStr for Proposition {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(SyntaxError("empty proposition".into()));
        }
        if let Some((l, r)) = s.split_once("<->") {
            if r.contains("<->") || r.contains("->") || l.contains("->") {
                return Err(SyntaxError(format!("cannot parse `{s}`")));
            }
            return Ok(Proposition::Biconditional(l.parse()?, r.parse()?));
        }
        if let Some((l, r)) = s.split_once("->") {
            if r.contains("->") || r.contains('&') {
                return Err(SyntaxError(format!("cannot parse `{s}`")));
            }
            let antecedents = l.split('&').map(str::parse).collect::<Result<Vec<Literal>, _>>()?;
            return Proposition::rule(antecedents, r.parse()?);
        }
        if s.contains('&') {
            return Err(SyntaxError(format!("conjunction outside a rule antecedent in `{s}`")));
        }
        Ok(Proposition::Literal(s.parse()?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct SyntaxError(pub String);

/// Two literals of opposite polarity would both be live.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("conflicting literals: {}", render_clashes(.clashes))]
pub struct ConflictDetected {
    /// Each pair is `(positive, negative)`.
    pub clashes: Vec<(Literal, Literal)>,
}

fn render_clashes(clashes: &[(Literal, Literal)]) -> String {
    clashes
        .iter()
        .map(|(a, b)| format!("{a} / {b}"))
        .collect::<Vec<_>>()
        .join(", ")
}
