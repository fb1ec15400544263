//! Deciding `f ≲ g` and `f ≲′ g` for small explicit functions.
//!
//! Every sequence of operations from `g` to `f` keeps the invariant that the
//! current function equals `g ∘ r` on its domain, where `r` fills each bit of
//! `g` with a constant, a bit of the current input, or (strong mode) its
//! negation. Removing a superfluous bit replaces its uses by a fixed
//! completion; removing a duplicate points its uses at the copy. So `f ≲ g`
//! holds exactly when such a column map `τ` sends `Dom(f)` into `Dom(g)`
//! with matching values, and conversely every such map yields a witness:
//! restrict, negate, drop constant and repeated columns, pad the bits of `f`
//! that `τ` never reads, restrict again and rename. The search over `τ` is
//! therefore complete, and the budget only limits the size of the witness.

use rustc_hash::FxHashSet;

use super::{Builder, Mode, ReductionStep, ReductionWitness};
use crate::boolfn::{bit, drop_bit, extract_bits, low_mask, negate_output, PartialFunction};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest domain of any function produced by the witness.
    pub max_domain: usize,
    /// Widest single AddSuperfluous step.
    pub max_pad_width: usize,
    /// Search nodes before giving up.
    pub max_nodes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_domain: 64,
            max_pad_width: 2,
            max_nodes: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Reducible(ReductionWitness),
    NotReducible(String),
    Inconclusive(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Index(usize),
    Negated(usize),
    Const(bool),
}

/// Removes superfluous and duplicate bits one at a time until none is left
/// (keeping at least one bit).
fn normalize(b: &mut Builder) -> Result<()> {
    'outer: while b.arity() > 1 {
        for i in 0..b.arity() {
            if drop_bit(&b.current, i).is_ok() {
                let step = if crate::boolfn::is_superfluous_set(&b.current, 1 << i) {
                    ReductionStep::RemoveSuperfluous(vec![i])
                } else {
                    let of = crate::boolfn::duplicate_of(&b.current, i).expect("droppable bit");
                    ReductionStep::RemoveDuplicate { index: i, of }
                };
                b.push(step)?;
                continue 'outer;
            }
        }
        break;
    }
    Ok(())
}

struct Search<'a> {
    f: &'a PartialFunction,
    labels: Vec<Label>,
    /// `prefixes[c]` holds `(y mod 2^c, g(y))` for every `y ∈ Dom(g)`.
    prefixes: Vec<FxHashSet<(u64, bool)>>,
    n_g: usize,
    nodes: u64,
    max_nodes: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn value(label: Label, x: u64) -> bool {
        match label {
            Label::Index(k) => bit(x, k),
            Label::Negated(k) => !bit(x, k),
            Label::Const(b) => b,
        }
    }

    /// Depth-first over column maps; `visit` returns true to stop.
    fn run(
        &mut self,
        tau: &mut Vec<Label>,
        images: &mut Vec<u64>,
        visit: &mut dyn FnMut(&[Label]) -> bool,
    ) -> bool {
        let c = tau.len();
        if c == self.n_g {
            return visit(tau);
        }
        for li in 0..self.labels.len() {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.exhausted = true;
                return true;
            }
            let label = self.labels[li];
            let ok = self.f.entries().iter().zip(images.iter()).all(|(&(x, v), &y)| {
                let y = y | (Self::value(label, x) as u64) << c;
                self.prefixes[c + 1].contains(&(y, v))
            });
            if !ok {
                continue;
            }
            let saved = images.clone();
            for (y, &(x, _)) in images.iter_mut().zip(self.f.entries()) {
                *y |= (Self::value(label, x) as u64) << c;
            }
            tau.push(label);
            let stop = self.run(tau, images, visit);
            tau.pop();
            *images = saved;
            if stop {
                return true;
            }
        }
        false
    }
}

/// Searches for a witness of `f ≲ g` (or `f ≲′ g`).
pub fn decide(f: &PartialFunction, g: &PartialFunction, mode: Mode, budget: &Budget) -> Result<Decision> {
    let mut base = Builder::new(g);
    normalize(&mut base)?;
    let h = base.current.clone();
    let n_f = f.arity();
    let n_g = h.arity();

    let mut labels: Vec<Label> = (0..n_f).map(Label::Index).collect();
    if mode == Mode::Strong {
        labels.extend((0..n_f).map(Label::Negated));
    }
    labels.extend([Label::Const(false), Label::Const(true)]);
    let prefixes = (0..=n_g)
        .map(|c| h.entries().iter().map(|&(y, v)| (y & low_mask(c), v)).collect())
        .collect();
    let mut search = Search {
        f,
        labels,
        prefixes,
        n_g,
        nodes: 0,
        max_nodes: budget.max_nodes,
        exhausted: false,
    };

    let mut found_any = false;
    let mut witness = None;
    let mut failure = None;
    let mut visit = |tau: &[Label]| -> bool {
        found_any = true;
        let mut b = Builder {
            current: base.current.clone(),
            steps: base.steps.clone(),
            max_domain: 0,
        };
        match build(&mut b, f, tau, budget) {
            Ok(true) => {
                witness = Some(b);
                true
            }
            Ok(false) => false,
            Err(e) => {
                failure = Some(e);
                true
            }
        }
    };
    search.run(&mut Vec::with_capacity(n_g), &mut vec![0; f.domain_size()], &mut visit);
    if let Some(e) = failure {
        return Err(e);
    }
    if let Some(b) = witness {
        let w = b.finish(g, mode);
        debug_assert!(super::verify(&w).unwrap_or(false));
        return Ok(Decision::Reducible(w));
    }
    if search.exhausted {
        return Ok(Decision::Inconclusive(format!("search stopped after {} nodes", budget.max_nodes)));
    }
    if found_any {
        return Ok(Decision::Inconclusive(format!(
            "column maps exist but every witness exceeds the budget (domain {}, padding width {})",
            budget.max_domain, budget.max_pad_width
        )));
    }
    Ok(Decision::NotReducible(format!(
        "no map from the {n_g} bits of the normalized source to constants and {} input bits is consistent",
        if mode == Mode::Strong { "possibly negated" } else { "plain" }
    )))
}

/// Turns a column map into steps. Returns false when the budget is exceeded.
fn build(b: &mut Builder, f: &PartialFunction, tau: &[Label], budget: &Budget) -> Result<bool> {
    let n_f = f.arity();
    let image = |x: u64| -> u64 {
        tau.iter()
            .enumerate()
            .fold(0u64, |y, (c, &l)| y | (Search::value(l, x) as u64) << c)
    };
    let mut promise: Vec<u64> = f.domain().map(image).collect();
    promise.sort_unstable();
    promise.dedup();
    if promise.len() < b.current.domain_size() {
        b.push(ReductionStep::RestrictPromise(promise))?;
    }
    let negated = tau
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l, Label::Negated(_)))
        .fold(0u64, |z, (c, _)| z | 1 << c);
    if negated != 0 {
        b.push(ReductionStep::NegateBits(negated))?;
    }

    // cols[c] is the bit of f held by column c, or None for a constant
    let mut cols: Vec<Option<usize>> = tau
        .iter()
        .map(|l| match *l {
            Label::Index(k) | Label::Negated(k) => Some(k),
            Label::Const(_) => None,
        })
        .collect();
    let keep_constant = cols.iter().all(Option::is_none);
    let constants: Vec<usize> = (0..cols.len())
        .filter(|&c| cols[c].is_none() && !(keep_constant && c == 0))
        .collect();
    if !constants.is_empty() {
        b.push(ReductionStep::RemoveSuperfluous(constants.clone()))?;
        for &c in constants.iter().rev() {
            cols.remove(c);
        }
    }
    let mut c = cols.len();
    while c > 0 {
        c -= 1;
        if let Some(k) = cols[c] {
            if let Some(first) = cols[..c].iter().position(|&o| o == Some(k)) {
                b.push(ReductionStep::RemoveDuplicate { index: c, of: first })?;
                cols.remove(c);
            }
        }
    }

    let missing: Vec<usize> = (0..n_f).filter(|k| !cols.contains(&Some(*k))).collect();
    if !missing.is_empty() {
        if missing.len() > budget.max_pad_width {
            return Ok(false);
        }
        let mask = missing.iter().fold(0u64, |m, &k| m | 1 << k);
        let mut set: Vec<u64> = f.domain().map(|x| extract_bits(x, mask)).collect();
        set.sort_unstable();
        set.dedup();
        b.push(ReductionStep::AddSuperfluous {
            width: missing.len(),
            set,
        })?;
        cols.extend(missing.iter().map(|&k| Some(k)));
        if b.current.domain_size() > budget.max_domain {
            return Ok(false);
        }
        let arrange = |x: u64| -> u64 {
            cols.iter().enumerate().fold(0u64, |y, (c, &k)| match k {
                Some(k) => y | (bit(x, k) as u64) << c,
                None => y | (b.current.entries()[0].0 & 1 << c),
            })
        };
        let mut promise: Vec<u64> = f.domain().map(arrange).collect();
        promise.sort_unstable();
        if promise.len() < b.current.domain_size() {
            b.push(ReductionStep::RestrictPromise(promise))?;
        }
    }
    if keep_constant {
        b.push(ReductionStep::RemoveSuperfluous(vec![0]))?;
        cols.remove(0);
    }
    let perm: Vec<usize> = cols.iter().map(|k| k.expect("constants removed")).collect();
    if perm.iter().enumerate().any(|(i, &p)| i != p) {
        b.push(ReductionStep::IndexRename(perm))?;
    }
    if b.max_domain > budget.max_domain {
        return Ok(false);
    }
    if b.current != *f {
        return Err(crate::error::Error::Internal("column map did not reproduce the target".into()));
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Switchability {
    /// `f̄ ≲ f`.
    StronglySwitchable(ReductionWitness),
    /// `f̄ ≲′ f` (and `f̄ ≲ f` was not established).
    Switchable(ReductionWitness),
    No,
    Inconclusive(String),
}

pub fn is_switchable(f: &PartialFunction, budget: &Budget) -> Result<Switchability> {
    let neg = negate_output(f);
    let weak = decide(&neg, f, Mode::Weak, budget)?;
    if let Decision::Reducible(w) = weak {
        return Ok(Switchability::StronglySwitchable(w));
    }
    Ok(match decide(&neg, f, Mode::Strong, budget)? {
        Decision::Reducible(w) => Switchability::Switchable(w),
        Decision::NotReducible(_) => Switchability::No,
        Decision::Inconclusive(why) => Switchability::Inconclusive(why),
    })
}
