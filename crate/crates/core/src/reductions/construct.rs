//! Explicit witnesses: `S∘f ≲ f`, `PrOR_{bs(f)}∘S ≲ f`, and lifting a
//! witness through composition.

use rustc_hash::FxHashSet;

use super::{verify, Builder, Mode, ReductionStep, ReductionWitness};
use crate::boolfn::{bit, compose, low_mask, negate_output, PartialFunction};
use crate::error::{Error, Result};
use crate::measures::{block_sensitivity_at, DEFAULT_BLOCK_CAP};

/// `S∘f ≲ f`: append a second copy of the input and promise that the two
/// copies disagree in value.
pub fn switch_compose_witness(f: &PartialFunction) -> Result<ReductionWitness> {
    if f.is_constant() {
        return Err(Error::invalid("S∘f needs a non-constant f"));
    }
    let n = f.arity();
    let mut b = Builder::new(f);
    b.push(ReductionStep::AddSuperfluous {
        width: n,
        set: f.domain().collect(),
    })?;
    let mut promise = Vec::new();
    for &(x, u) in f.entries() {
        for &(y, v) in f.entries() {
            if u != v {
                promise.push(x | y << n);
            }
        }
    }
    promise.sort_unstable();
    b.push(ReductionStep::RestrictPromise(promise))?;
    Ok(b.finish(f, Mode::Weak))
}

/// Restricts `f` to an input `x` of maximum block sensitivity and its block
/// flips, then shapes each block into a pair reading `01` at `x`.
///
/// Inputs with `f(x) = 0` are preferred; the target is then exactly
/// `PrOR_k ∘ S`. When every input of maximum block sensitivity has value 1
/// the same construction ends at the negation of `PrOR_k ∘ S`.
pub fn bs_reduction_witness(f: &PartialFunction) -> Result<ReductionWitness> {
    if f.is_constant() {
        return Err(Error::invalid("a constant function has no sensitive blocks"));
    }
    let mut best: Option<(u64, bool, Vec<u64>)> = None;
    for &(x, v) in f.entries() {
        let blocks = block_sensitivity_at(f, x, DEFAULT_BLOCK_CAP)?;
        let better = match &best {
            None => true,
            Some((_, bv, bb)) => blocks.len() > bb.len() || (blocks.len() == bb.len() && *bv && !v),
        };
        if better {
            best = Some((x, v, blocks));
        }
    }
    let (x, _, blocks) = best.expect("non-empty domain");
    let k = blocks.len();

    let mut b = Builder::new(f);
    let mut promise: Vec<u64> = std::iter::once(x).chain(blocks.iter().map(|&m| x ^ m)).collect();
    promise.sort_unstable();
    if promise.len() < f.domain_size() {
        b.push(ReductionStep::RestrictPromise(promise))?;
    }
    let union = blocks.iter().fold(0, |u, m| u | m);
    let outside: Vec<usize> = (0..f.arity()).filter(|&i| !bit(union, i)).collect();
    if !outside.is_empty() {
        b.push(ReductionStep::RemoveSuperfluous(outside))?;
    }
    // (block, value at x) for every remaining column
    let mut cols: Vec<(usize, bool)> = (0..f.arity())
        .filter(|&i| bit(union, i))
        .map(|i| (blocks.iter().position(|m| bit(*m, i)).expect("in a block"), bit(x, i)))
        .collect();
    let mut c = cols.len();
    while c > 0 {
        c -= 1;
        if let Some(first) = cols[..c].iter().position(|&o| o == cols[c]) {
            b.push(ReductionStep::RemoveDuplicate { index: c, of: first })?;
            cols.remove(c);
        }
    }
    for j in 0..k {
        let members: Vec<usize> = (0..cols.len()).filter(|&c| cols[c].0 == j).collect();
        if members.len() == 1 {
            let single = members[0];
            let n = b.arity();
            b.push(ReductionStep::AddSuperfluous {
                width: 1,
                set: vec![0, 1],
            })?;
            let promise = b
                .current
                .domain()
                .filter(|&y| bit(y, n) != bit(y, single))
                .collect();
            b.push(ReductionStep::RestrictPromise(promise))?;
            cols.push((j, !cols[single].1));
        }
    }
    let perm: Vec<usize> = cols.iter().map(|&(j, v)| 2 * j + v as usize).collect();
    if perm.iter().enumerate().any(|(i, &p)| i != p) {
        b.push(ReductionStep::IndexRename(perm))?;
    }
    Ok(b.finish(f, Mode::Weak))
}

/// Which side of a composition the lifted witness acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The witness is `g′ ≲ g`; the result is `f∘g′ ≲ f∘g` with `f` given.
    Inner,
    /// The witness is `f′ ≲ f`; the result is `f′∘g ≲ f∘g` with `g` given.
    Outer,
}

/// Tracks a composition whose blocks may temporarily differ in width.
struct Blocks {
    b: Builder,
    widths: Vec<usize>,
}

impl Blocks {
    fn offset(&self, j: usize) -> usize {
        self.widths[..j].iter().sum()
    }

    fn block(&self, x: u64, j: usize) -> u64 {
        (x >> self.offset(j)) & low_mask(self.widths[j])
    }

    /// Moves the last `len` bits so that they start at `dest`.
    fn move_tail(&mut self, len: usize, dest: usize) -> Result<()> {
        let n = self.b.arity();
        if dest == n - len {
            return Ok(());
        }
        let perm = (0..n)
            .map(|i| match i {
                i if i < dest => i,
                i if i < n - len => i + len,
                i => dest + i - (n - len),
            })
            .collect();
        self.b.push(ReductionStep::IndexRename(perm))
    }

    fn restrict_where(&mut self, keep: impl Fn(&Self, u64) -> bool) -> Result<()> {
        let promise: Vec<u64> = self.b.current.domain().filter(|&x| keep(self, x)).collect();
        if promise.len() < self.b.current.domain_size() {
            self.b.push(ReductionStep::RestrictPromise(promise))?;
        }
        Ok(())
    }

    /// Applies a step of the inner function to each listed block.
    fn inner_step(&mut self, step: &ReductionStep, targets: &[usize]) -> Result<()> {
        match step {
            ReductionStep::IndexRename(perm) => {
                let n = self.b.arity();
                let mut full: Vec<usize> = (0..n).collect();
                for &j in targets {
                    let off = self.offset(j);
                    for (k, &p) in perm.iter().enumerate() {
                        full[off + k] = off + p;
                    }
                }
                self.b.push(ReductionStep::IndexRename(full))?;
            }
            ReductionStep::RestrictPromise(p) => {
                let allowed: FxHashSet<u64> = p.iter().copied().collect();
                self.restrict_where(|s, x| targets.iter().all(|&j| allowed.contains(&s.block(x, j))))?;
            }
            ReductionStep::NegateBits(z) => {
                let mask = targets.iter().fold(0u64, |m, &j| m | z << self.offset(j));
                self.b.push(ReductionStep::NegateBits(mask))?;
            }
            ReductionStep::RemoveSuperfluous(pos) => {
                let mut all = Vec::new();
                for &j in targets {
                    let off = self.offset(j);
                    all.extend(pos.iter().map(|p| off + p));
                }
                self.b.push(ReductionStep::RemoveSuperfluous(all))?;
                for &j in targets {
                    self.widths[j] -= pos.len();
                }
            }
            ReductionStep::RemoveDuplicate { index, of } => {
                let mut desc = targets.to_vec();
                desc.sort_unstable_by(|a, b| b.cmp(a));
                for j in desc {
                    let off = self.offset(j);
                    self.b.push(ReductionStep::RemoveDuplicate {
                        index: off + index,
                        of: off + of,
                    })?;
                    self.widths[j] -= 1;
                }
            }
            ReductionStep::DuplicateBit(i) => {
                for &j in targets {
                    let off = self.offset(j);
                    self.b.push(ReductionStep::DuplicateBit(off + i))?;
                    self.move_tail(1, off + self.widths[j])?;
                    self.widths[j] += 1;
                }
            }
            ReductionStep::AddSuperfluous { width, set } => {
                for &j in targets {
                    self.b.push(ReductionStep::AddSuperfluous {
                        width: *width,
                        set: set.clone(),
                    })?;
                    self.move_tail(*width, self.offset(j) + self.widths[j])?;
                    self.widths[j] += width;
                }
            }
        }
        Ok(())
    }

    /// Applies a step of the outer function; every block holds `g`.
    fn outer_step(&mut self, step: &ReductionStep, g: &PartialFunction, switch: Option<&ReductionWitness>) -> Result<()> {
        let m = g.arity();
        let value = |y: u64| g.get(y).expect("block lies in Dom(g)");
        match step {
            ReductionStep::IndexRename(perm) => {
                let full = (0..self.b.arity()).map(|i| perm[i / m] * m + i % m).collect();
                self.b.push(ReductionStep::IndexRename(full))?;
            }
            ReductionStep::RestrictPromise(p) => {
                let allowed: FxHashSet<u64> = p.iter().copied().collect();
                let blocks = self.widths.len();
                self.restrict_where(|s, x| {
                    let y = (0..blocks).fold(0u64, |y, j| y | (value(s.block(x, j)) as u64) << j);
                    allowed.contains(&y)
                })?;
            }
            ReductionStep::AddSuperfluous { width, set } => {
                let mut strings = Vec::new();
                for &s in set {
                    let mut partial = vec![0u64];
                    for t in 0..*width {
                        let pre = g.preimage(bit(s, t));
                        partial = partial
                            .iter()
                            .flat_map(|&p| pre.iter().map(move |&y| p | y << (t * m)))
                            .collect();
                    }
                    strings.extend(partial);
                }
                strings.sort_unstable();
                self.b.push(ReductionStep::AddSuperfluous {
                    width: width * m,
                    set: strings,
                })?;
                self.widths.extend(std::iter::repeat(m).take(*width));
            }
            ReductionStep::RemoveSuperfluous(pos) => {
                let all = pos.iter().flat_map(|&j| (0..m).map(move |k| j * m + k)).collect();
                self.b.push(ReductionStep::RemoveSuperfluous(all))?;
                self.widths.truncate(self.widths.len() - pos.len());
            }
            ReductionStep::DuplicateBit(i) => {
                let last = self.widths.len();
                self.b.push(ReductionStep::AddSuperfluous {
                    width: m,
                    set: g.domain().collect(),
                })?;
                self.widths.push(m);
                self.restrict_where(|s, x| value(s.block(x, last)) == value(s.block(x, *i)))?;
            }
            ReductionStep::RemoveDuplicate { index, of } => {
                let (i, j) = (*index, *of);
                self.restrict_where(|s, x| s.block(x, i) == s.block(x, j))?;
                for k in (0..m).rev() {
                    let shift = if j > i { m - 1 - k } else { 0 };
                    self.b.push(ReductionStep::RemoveDuplicate {
                        index: i * m + k,
                        of: j * m + k - shift,
                    })?;
                }
                self.widths.pop();
            }
            ReductionStep::NegateBits(z) => {
                let w = switch.ok_or(Error::SwitchabilityRequired)?;
                for j in (0..self.widths.len()).filter(|&j| bit(*z, j)) {
                    for s in &w.steps {
                        self.inner_step(s, &[j])?;
                    }
                    if self.widths[j] != m {
                        return Err(Error::Internal("switch witness changed the block width".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Lifts a witness through composition with `other`.
///
/// For [`Side::Outer`] a witness containing bit negations needs `switch`, a
/// witness of `ḡ ≲ g` or `ḡ ≲′ g`; each negated outer bit becomes that
/// witness applied to one block. The result is weak exactly when no strong
/// step survives.
pub fn lift_reduction(
    w: &ReductionWitness,
    other: &PartialFunction,
    side: Side,
    switch: Option<&ReductionWitness>,
) -> Result<ReductionWitness> {
    if !verify(w)? {
        return Err(Error::invalid("the witness to lift does not verify"));
    }
    let (source, target) = match side {
        Side::Inner => (compose(other, &w.source)?, compose(other, &w.target)?),
        Side::Outer => (compose(&w.source, other)?, compose(&w.target, other)?),
    };
    let negates = w.steps.iter().any(|s| !s.is_weak());
    let mut mode = w.mode;
    if side == Side::Outer && negates {
        let sw = switch.ok_or(Error::SwitchabilityRequired)?;
        if sw.source != *other || sw.target != negate_output(other) || !verify(sw)? {
            return Err(Error::invalid("switch witness must prove ḡ ≲ g for the inner function"));
        }
        mode = if sw.mode == Mode::Weak { Mode::Weak } else { Mode::Strong };
    }
    let mut blocks = match side {
        Side::Inner => Blocks {
            b: Builder::new(&source),
            widths: vec![w.source.arity(); other.arity()],
        },
        Side::Outer => Blocks {
            b: Builder::new(&source),
            widths: vec![other.arity(); w.source.arity()],
        },
    };
    let all: Vec<usize> = (0..blocks.widths.len()).collect();
    for step in &w.steps {
        match side {
            Side::Inner => blocks.inner_step(step, &all)?,
            Side::Outer => blocks.outer_step(step, other, switch)?,
        }
    }
    let lifted = blocks.b.finish(&source, mode);
    if lifted.target != target {
        return Err(Error::Internal("lifted witness missed the composed target".into()));
    }
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{catalog, identity, maj3, nand2, pror, switch};
    use crate::reductions::{decide, is_switchable, Budget, Decision, Switchability};

    fn check(w: &ReductionWitness) {
        assert!(verify(w).unwrap(), "{}", w.to_json());
    }

    #[test]
    fn switch_composition() {
        for f in [nand2(), identity(), maj3()] {
            let w = switch_compose_witness(&f).unwrap();
            check(&w);
            assert_eq!(w.target, compose(&switch(), &f).unwrap());
            assert_eq!(w.steps.len(), 2);
        }
        assert_eq!(switch_compose_witness(&maj3()).unwrap().target.arity(), 6);
        assert_eq!(switch_compose_witness(&identity()).unwrap().target, switch());
    }

    #[test]
    fn block_sensitivity_reduction() {
        for (f, k) in [(maj3(), 2), (pror(3), 3), (identity(), 1), (nand2(), 2)] {
            let w = bs_reduction_witness(&f).unwrap();
            check(&w);
            let want = compose(&pror(k), &switch()).unwrap();
            assert_eq!(w.target, want, "{f}");
        }
        assert_eq!(bs_reduction_witness(&identity()).unwrap().target, switch());
    }

    #[test]
    fn block_sensitivity_only_at_one_inputs() {
        // AND₂ reaches bs = 2 only at 11, where the value is 1
        let and = catalog("AND", Some(2)).unwrap();
        let w = bs_reduction_witness(&and).unwrap();
        check(&w);
        let want = compose(&pror(2), &switch()).unwrap();
        assert_eq!(w.target, negate_output(&want));
        assert!(matches!(
            decide(&want, &and, Mode::Strong, &Budget::default()).unwrap(),
            Decision::NotReducible(_)
        ));
    }

    fn reduction(f: &PartialFunction, g: &PartialFunction, mode: Mode) -> ReductionWitness {
        match decide(f, g, mode, &Budget::default()).unwrap() {
            Decision::Reducible(w) => w,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inner_lifting() {
        let w = reduction(&identity(), &pror(2), Mode::Weak);
        let lifted = lift_reduction(&w, &nand2(), Side::Inner, None).unwrap();
        check(&lifted);
        assert_eq!(lifted.target, nand2());
        let id = ReductionWitness::identity(&maj3());
        let lifted = lift_reduction(&id, &nand2(), Side::Inner, None).unwrap();
        assert!(lifted.steps.is_empty());
        let strong = reduction(&identity(), &switch(), Mode::Strong);
        let lifted = lift_reduction(&strong, &maj3(), Side::Inner, None).unwrap();
        check(&lifted);
        assert_eq!(lifted.mode, Mode::Strong);
        let dup = ReductionWitness {
            mode: Mode::Weak,
            source: nand2(),
            steps: vec![
                ReductionStep::DuplicateBit(0),
                ReductionStep::AddSuperfluous { width: 1, set: vec![1] },
                ReductionStep::IndexRename(vec![3, 1, 2, 0]),
            ],
            target: ReductionStep::IndexRename(vec![3, 1, 2, 0])
                .apply(
                    &ReductionStep::AddSuperfluous { width: 1, set: vec![1] }
                        .apply(&ReductionStep::DuplicateBit(0).apply(&nand2()).unwrap())
                        .unwrap(),
                )
                .unwrap(),
        };
        check(&lift_reduction(&dup, &switch(), Side::Inner, None).unwrap());
    }

    #[test]
    fn outer_lifting() {
        let w = reduction(&identity(), &pror(2), Mode::Weak);
        let lifted = lift_reduction(&w, &switch(), Side::Outer, None).unwrap();
        check(&lifted);
        assert_eq!(lifted.target, switch());
    }

    #[test]
    fn outer_duplicates_and_padding() {
        // NAND₂ → append a copy of bit 1 → drop it again, around an inner S
        let steps = vec![
            ReductionStep::DuplicateBit(1),
            ReductionStep::AddSuperfluous { width: 1, set: vec![0, 1] },
            ReductionStep::RemoveSuperfluous(vec![3]),
            ReductionStep::RemoveDuplicate { index: 1, of: 2 },
        ];
        let w = ReductionWitness {
            mode: Mode::Weak,
            source: nand2(),
            steps,
            target: nand2(),
        };
        check(&w);
        for g in [switch(), identity(), pror(2)] {
            check(&lift_reduction(&w, &g, Side::Outer, None).unwrap());
        }
    }

    #[test]
    fn outer_negation_needs_switchability() {
        let w = reduction(&identity(), &switch(), Mode::Strong);
        assert_eq!(lift_reduction(&w, &maj3(), Side::Outer, None), Err(Error::SwitchabilityRequired));
        let Switchability::Switchable(sw) = is_switchable(&maj3(), &Budget::default()).unwrap() else {
            panic!("MAJ3 is switchable");
        };
        let lifted = lift_reduction(&w, &maj3(), Side::Outer, Some(&sw)).unwrap();
        check(&lifted);
        assert_eq!(lifted.mode, Mode::Strong);
        let sn = compose(&switch(), &nand2()).unwrap();
        let Switchability::StronglySwitchable(ssw) = is_switchable(&sn, &Budget::default()).unwrap() else {
            panic!("S∘NAND2 is strongly switchable");
        };
        let lifted = lift_reduction(&w, &sn, Side::Outer, Some(&ssw)).unwrap();
        check(&lifted);
        assert_eq!(lifted.mode, Mode::Weak);
    }
}
