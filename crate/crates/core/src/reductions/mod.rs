//! Replayable reduction witnesses for `f ≲ g` (weak) and `f ≲′ g` (strong,
//! which also allows negating input bits).
//!
//! A witness starts from the source `g` and applies elementary steps until
//! it reaches the target `f`. Positions are 0-based in memory and 1-based in
//! the JSON form.

mod construct;
mod decide;

pub use construct::{bs_reduction_witness, lift_reduction, switch_compose_witness, Side};
pub use decide::{decide, is_switchable, Budget, Decision, Switchability};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::boolfn::{
    add_superfluous, duplicate_bit, format_bits, negate_bits, parse_bits, remove_duplicate, remove_superfluous,
    rename_indices, restrict, PartialFunction,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// `≲`: renaming, superfluous bits, duplication and promise restriction.
    Weak,
    /// `≲′`: the weak operations plus negation of input bits.
    Strong,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Weak => "weak",
            Mode::Strong => "strong",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Mode::Weak),
            "strong" => Ok(Mode::Strong),
            other => Err(Error::invalid(format!("unknown reduction mode `{other}` (expected weak or strong)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionStep {
    /// New bit `perm[i]` is old bit `i`.
    IndexRename(Vec<usize>),
    /// Appends `width` bits ranging over `set`.
    AddSuperfluous { width: usize, set: Vec<u64> },
    RemoveSuperfluous(Vec<usize>),
    /// Appends a copy of the bit.
    DuplicateBit(usize),
    /// Removes `index`, which must equal bit `of` on the whole domain.
    RemoveDuplicate { index: usize, of: usize },
    RestrictPromise(Vec<u64>),
    NegateBits(u64),
}

impl ReductionStep {
    pub fn is_weak(&self) -> bool {
        !matches!(self, ReductionStep::NegateBits(_))
    }

    fn name(&self) -> &'static str {
        match self {
            ReductionStep::IndexRename(_) => "IndexRename",
            ReductionStep::AddSuperfluous { .. } => "AddSuperfluous",
            ReductionStep::RemoveSuperfluous(_) => "RemoveSuperfluous",
            ReductionStep::DuplicateBit(_) => "DuplicateBit",
            ReductionStep::RemoveDuplicate { .. } => "RemoveDuplicate",
            ReductionStep::RestrictPromise(_) => "RestrictPromise",
            ReductionStep::NegateBits(_) => "NegateBits",
        }
    }

    /// Arity after the step, given the arity before it.
    pub fn output_arity(&self, n: usize) -> usize {
        match self {
            ReductionStep::AddSuperfluous { width, .. } => n + width,
            ReductionStep::RemoveSuperfluous(p) => n.saturating_sub(p.len()),
            ReductionStep::DuplicateBit(_) => n + 1,
            ReductionStep::RemoveDuplicate { .. } => n.saturating_sub(1),
            _ => n,
        }
    }

    pub fn apply(&self, f: &PartialFunction) -> Result<PartialFunction> {
        match self {
            ReductionStep::IndexRename(perm) => rename_indices(f, perm),
            ReductionStep::AddSuperfluous { width, set } => add_superfluous(f, *width, set),
            ReductionStep::RemoveSuperfluous(p) => {
                if p.is_empty() {
                    return Err(Error::invalid("no positions given"));
                }
                remove_superfluous(f, p)
            }
            ReductionStep::DuplicateBit(i) => duplicate_bit(f, *i),
            ReductionStep::RemoveDuplicate { index, of } => remove_duplicate(f, *index, *of),
            ReductionStep::RestrictPromise(p) => restrict(f, p),
            ReductionStep::NegateBits(z) => negate_bits(f, *z),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionWitness {
    pub mode: Mode,
    /// The function `g` the steps start from.
    pub source: PartialFunction,
    pub steps: Vec<ReductionStep>,
    /// The function `f` claimed to satisfy `f ≲ g`.
    pub target: PartialFunction,
}

impl ReductionWitness {
    pub fn identity(f: &PartialFunction) -> Self {
        ReductionWitness {
            mode: Mode::Weak,
            source: f.clone(),
            steps: Vec::new(),
            target: f.clone(),
        }
    }

    /// Replays every step, returning the function reached.
    pub fn replay(&self) -> Result<PartialFunction> {
        let mut current = self.source.clone();
        for (index, step) in self.steps.iter().enumerate() {
            if self.mode == Mode::Weak && !step.is_weak() {
                return Err(Error::StepInapplicable {
                    index,
                    reason: "bit negation is not allowed in a weak witness".into(),
                });
            }
            current = step.apply(&current).map_err(|e| Error::StepInapplicable {
                index,
                reason: format!("{}: {e}", step.name()),
            })?;
        }
        Ok(current)
    }

    /// Concatenation: `self` proves `f ≲ g` and `next` proves `e ≲ f`.
    pub fn then(&self, next: &ReductionWitness) -> Result<ReductionWitness> {
        if next.source != self.target {
            return Err(Error::invalid("the second witness must start where the first one ends"));
        }
        let mode = if self.mode == Mode::Strong || next.mode == Mode::Strong {
            Mode::Strong
        } else {
            Mode::Weak
        };
        Ok(ReductionWitness {
            mode,
            source: self.source.clone(),
            steps: self.steps.iter().chain(&next.steps).cloned().collect(),
            target: next.target.clone(),
        })
    }

    pub fn to_json(&self) -> Value {
        let mut n = self.source.arity();
        let mut steps = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            steps.push(serde_json::to_value(StepWire::from_step(step, n)).expect("steps serialize"));
            n = step.output_arity(n);
        }
        serde_json::json!({
            "mode": self.mode.to_string(),
            "source": self.source,
            "steps": steps,
            "target": self.target,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: WitnessWire = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mode: Mode = wire.mode.parse()?;
        let mut n = wire.source.arity();
        let mut steps = Vec::with_capacity(wire.steps.len());
        for (index, w) in wire.steps.into_iter().enumerate() {
            let step = w.into_step(n).map_err(|e| Error::invalid(format!("step {index}: {e}")))?;
            n = step.output_arity(n);
            steps.push(step);
        }
        Ok(ReductionWitness {
            mode,
            source: wire.source,
            steps,
            target: wire.target,
        })
    }
}

/// True iff every step applies and the replay reproduces the target.
pub fn verify(w: &ReductionWitness) -> Result<bool> {
    Ok(w.replay()? == w.target)
}

#[derive(Serialize, Deserialize)]
struct WitnessWire {
    mode: String,
    source: PartialFunction,
    steps: Vec<StepWire>,
    target: PartialFunction,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op")]
enum StepWire {
    IndexRename { perm: Vec<usize> },
    AddSuperfluous { set: Vec<String> },
    RemoveSuperfluous { indices: Vec<usize> },
    DuplicateBit { index: usize },
    RemoveDuplicate { index: usize, of: usize },
    RestrictPromise { promise: Vec<String> },
    NegateBits { mask: String },
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn zero_based(v: &[usize]) -> Result<Vec<usize>> {
    v.iter()
        .map(|&i| i.checked_sub(1).ok_or_else(|| Error::invalid("positions are 1-based")))
        .collect()
}

fn parse_width(s: &str, width: usize) -> Result<u64> {
    if s.len() != width {
        return Err(Error::invalid(format!("`{s}` should have {width} bits")));
    }
    parse_bits(s)
}

impl StepWire {
    fn from_step(step: &ReductionStep, n: usize) -> Self {
        match step {
            ReductionStep::IndexRename(perm) => StepWire::IndexRename { perm: one_based(perm) },
            ReductionStep::AddSuperfluous { width, set } => StepWire::AddSuperfluous {
                set: set.iter().map(|&y| format_bits(y, *width)).collect(),
            },
            ReductionStep::RemoveSuperfluous(p) => StepWire::RemoveSuperfluous { indices: one_based(p) },
            ReductionStep::DuplicateBit(i) => StepWire::DuplicateBit { index: i + 1 },
            ReductionStep::RemoveDuplicate { index, of } => StepWire::RemoveDuplicate {
                index: index + 1,
                of: of + 1,
            },
            ReductionStep::RestrictPromise(p) => StepWire::RestrictPromise {
                promise: p.iter().map(|&x| format_bits(x, n)).collect(),
            },
            ReductionStep::NegateBits(z) => StepWire::NegateBits { mask: format_bits(*z, n) },
        }
    }

    fn into_step(self, n: usize) -> Result<ReductionStep> {
        Ok(match self {
            StepWire::IndexRename { perm } => ReductionStep::IndexRename(zero_based(&perm)?),
            StepWire::AddSuperfluous { set } => {
                let width = set.first().map(|s| s.len()).ok_or(Error::EmptyPromise)?;
                let set = set.iter().map(|s| parse_width(s, width)).collect::<Result<_>>()?;
                ReductionStep::AddSuperfluous { width, set }
            }
            StepWire::RemoveSuperfluous { indices } => ReductionStep::RemoveSuperfluous(zero_based(&indices)?),
            StepWire::DuplicateBit { index } => ReductionStep::DuplicateBit(zero_based(&[index])?[0]),
            StepWire::RemoveDuplicate { index, of } => {
                let v = zero_based(&[index, of])?;
                ReductionStep::RemoveDuplicate { index: v[0], of: v[1] }
            }
            StepWire::RestrictPromise { promise } => {
                ReductionStep::RestrictPromise(promise.iter().map(|s| parse_width(s, n)).collect::<Result<_>>()?)
            }
            StepWire::NegateBits { mask } => ReductionStep::NegateBits(parse_width(&mask, n)?),
        })
    }
}

/// Applies steps one at a time and records them; used by the constructions.
pub(crate) struct Builder {
    pub(crate) current: PartialFunction,
    pub(crate) steps: Vec<ReductionStep>,
    pub(crate) max_domain: usize,
}

impl Builder {
    pub(crate) fn new(source: &PartialFunction) -> Self {
        Builder {
            current: source.clone(),
            steps: Vec::new(),
            max_domain: source.domain_size(),
        }
    }

    pub(crate) fn push(&mut self, step: ReductionStep) -> Result<()> {
        let next = step.apply(&self.current).map_err(|e| Error::StepInapplicable {
            index: self.steps.len(),
            reason: format!("{}: {e}", step.name()),
        })?;
        self.max_domain = self.max_domain.max(next.domain_size());
        self.current = next;
        self.steps.push(step);
        Ok(())
    }

    pub(crate) fn arity(&self) -> usize {
        self.current.arity()
    }

    pub(crate) fn finish(self, source: &PartialFunction, mode: Mode) -> ReductionWitness {
        ReductionWitness {
            mode,
            source: source.clone(),
            steps: self.steps,
            target: self.current,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{identity, parse_bits, pror, switch};

    fn bits(s: &str) -> u64 {
        parse_bits(s).unwrap()
    }

    #[test]
    fn identity_reduces_to_promise_or() {
        let w = ReductionWitness {
            mode: Mode::Weak,
            source: pror(3),
            steps: vec![
                ReductionStep::RestrictPromise(vec![bits("000"), bits("100")]),
                ReductionStep::RemoveSuperfluous(vec![1, 2]),
            ],
            target: identity(),
        };
        assert!(verify(&w).unwrap());
    }

    #[test]
    fn identity_strongly_reduces_to_switch() {
        let w = ReductionWitness {
            mode: Mode::Strong,
            source: switch(),
            steps: vec![
                ReductionStep::NegateBits(bits("01")),
                ReductionStep::RemoveDuplicate { index: 0, of: 1 },
            ],
            target: identity(),
        };
        assert!(verify(&w).unwrap());
        let weak = ReductionWitness { mode: Mode::Weak, ..w };
        assert!(matches!(verify(&weak), Err(Error::StepInapplicable { index: 0, .. })));
    }

    #[test]
    fn reflexivity_and_wrong_targets() {
        assert!(verify(&ReductionWitness::identity(&switch())).unwrap());
        let w = ReductionWitness {
            target: identity(),
            ..ReductionWitness::identity(&switch())
        };
        assert!(!verify(&w).unwrap());
    }

    #[test]
    fn inapplicable_step_reports_its_index() {
        let w = ReductionWitness {
            mode: Mode::Weak,
            source: pror(3),
            steps: vec![
                ReductionStep::IndexRename(vec![0, 1, 2]),
                ReductionStep::RemoveDuplicate { index: 0, of: 1 },
            ],
            target: pror(2),
        };
        assert!(matches!(verify(&w), Err(Error::StepInapplicable { index: 1, .. })));
    }

    #[test]
    fn json_round_trip() {
        let w = ReductionWitness {
            mode: Mode::Strong,
            source: pror(3),
            steps: vec![
                ReductionStep::RestrictPromise(vec![bits("000"), bits("100")]),
                ReductionStep::NegateBits(bits("010")),
                ReductionStep::AddSuperfluous {
                    width: 2,
                    set: vec![bits("01"), bits("10")],
                },
                ReductionStep::DuplicateBit(0),
                ReductionStep::IndexRename(vec![5, 0, 1, 2, 3, 4]),
            ],
            target: pror(3),
        };
        let text = w.to_json().to_string();
        assert!(text.contains(r#"{"mask":"010","op":"NegateBits"}"#), "{text}");
        assert!(text.contains(r#""perm":[6,1,2,3,4,5]"#), "{text}");
        assert_eq!(ReductionWitness::from_json(&text).unwrap(), w);
        let bad = text.replace(r#""mask":"010""#, r#""mask":"01""#);
        assert!(ReductionWitness::from_json(&bad).is_err());
    }
}
