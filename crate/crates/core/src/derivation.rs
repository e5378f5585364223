//! Step-by-step checking of equational proofs in a presented group.
//!
//! A script starts from a word and repeatedly inserts a conjugate of a
//! relator (or of a previously verified identity `lhs rhs^-1`) at some
//! position, freely reducing after each insertion. Every step preserves the
//! group element, so reaching `end` proves `start = end`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coset::{word_is_identity, CosetTable, EnumerationConfig, WordVerdict};
use crate::presentation::Presentation;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepSource {
    /// Relator name, or 1-based index into the relator list.
    Relator(String),
    /// Name of a verified identity in the environment.
    Identity(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub source: StepSource,
    /// `1` or `-1`.
    pub exponent: i8,
    pub position: usize,
    pub conjugator: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationScript {
    pub name: String,
    pub presentation_label: String,
    pub start: Word,
    pub steps: Vec<DerivationStep>,
    pub end: Word,
}

impl DerivationScript {
    /// The proved identity as a single word, `start end^-1`.
    pub fn identity_word(&self) -> Word {
        self.start.concat(&self.end.inverse())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("no relator {0:?} in the presentation")]
    UnknownRelator(String),
    #[error("identity {0:?} has not been verified")]
    UnknownIdentity(String),
    #[error("position {position} out of range for a word of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("exponent must be +1 or -1, got {0}")]
    BadExponent(i8),
}

/// Verified identities, keyed by script name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DerivationEnvironment {
    identities: BTreeMap<String, (Word, Word)>,
}

impl DerivationEnvironment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&(Word, Word)> {
        self.identities.get(name)
    }

    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.identities.keys().map(String::as_str)
    }

    /// Adds the identity proved by `script` if `report` verifies it.
    /// Returns whether it was added.
    pub fn admit(&mut self, script: &DerivationScript, report: &CheckReport) -> bool {
        if report.verdict != Verdict::Verified {
            return false;
        }
        self.identities.insert(
            script.name.clone(),
            (script.start.clone(), script.end.clone()),
        );
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    /// `step_index` is 0-based; it equals the number of steps when every
    /// step applied but the final word differs from `end`.
    Failed {
        step_index: usize,
        reason: String,
        word_before: Word,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub verdict: Verdict,
    /// Start word followed by the reduced word after each applied step.
    pub trace: Vec<Word>,
}

impl CheckReport {
    pub fn is_verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }
}

fn inserted_word(
    s: &DerivationStep,
    p: &Presentation,
    env: &DerivationEnvironment,
) -> Result<Word, StepError> {
    let base = match &s.source {
        StepSource::Relator(r) => p
            .find_relator(r)
            .map(|rel| rel.word.clone())
            .ok_or_else(|| StepError::UnknownRelator(r.clone()))?,
        StepSource::Identity(n) => {
            let (l, r) = env
                .get(n)
                .ok_or_else(|| StepError::UnknownIdentity(n.clone()))?;
            l.concat(&r.inverse())
        }
    };
    let base = match s.exponent {
        1 => base,
        -1 => base.inverse(),
        e => return Err(StepError::BadExponent(e)),
    };
    Ok(base.conjugate(&s.conjugator))
}

/// Inserts the step's conjugated relator or identity into `w` and reduces.
pub fn apply_step(
    w: &Word,
    s: &DerivationStep,
    p: &Presentation,
    env: &DerivationEnvironment,
) -> Result<Word, StepError> {
    if s.position > w.len() {
        return Err(StepError::PositionOutOfRange {
            position: s.position,
            len: w.len(),
        });
    }
    let ins = inserted_word(s, p, env)?;
    let (pre, suf) = w.split_at(s.position);
    Ok(pre.concat(&ins).concat(&suf))
}

pub fn check_script(
    s: &DerivationScript,
    p: &Presentation,
    env: &DerivationEnvironment,
) -> CheckReport {
    let mut w = s.start.clone();
    let mut trace = vec![w.clone()];
    for (i, step) in s.steps.iter().enumerate() {
        match apply_step(&w, step, p, env) {
            Ok(next) => {
                w = next;
                trace.push(w.clone());
            }
            Err(e) => {
                return CheckReport {
                    verdict: Verdict::Failed {
                        step_index: i,
                        reason: e.to_string(),
                        word_before: w,
                    },
                    trace,
                }
            }
        }
    }
    let verdict = if w == s.end {
        Verdict::Verified
    } else {
        Verdict::Failed {
            step_index: s.steps.len(),
            reason: format!("final word {w} differs from expected end {}", s.end),
            word_before: w,
        }
    };
    CheckReport { verdict, trace }
}

/// Decides `start = end` by coset enumeration, ignoring the steps.
pub fn oracle_check(
    s: &DerivationScript,
    p: &Presentation,
    cfg: &EnumerationConfig,
) -> WordVerdict {
    word_is_identity(p, &s.identity_word(), cfg).unwrap_or(WordVerdict::Inconclusive)
}

/// Decides `start = end` from an already completed table of the group (the
/// identity word must fix every coset of the trivial subgroup's table).
pub fn oracle_with_table(s: &DerivationScript, t: &CosetTable) -> WordVerdict {
    let w = s.identity_word();
    for c in 1..=t.num_cosets() {
        match t.trace(c, &w) {
            Ok(d) if d == c => {}
            Ok(_) => return WordVerdict::False,
            Err(_) => return WordVerdict::Inconclusive,
        }
    }
    WordVerdict::True
}

/// Checks scripts in order, admitting each verified identity before the next.
pub fn check_in_order<'a>(
    scripts: impl IntoIterator<Item = &'a DerivationScript>,
    p: &Presentation,
    env: &mut DerivationEnvironment,
) -> Vec<(String, CheckReport)> {
    scripts
        .into_iter()
        .map(|s| {
            let r = check_script(s, p, env);
            env.admit(s, &r);
            (s.name.clone(), r)
        })
        .collect()
}
