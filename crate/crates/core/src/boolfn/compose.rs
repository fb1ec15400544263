use super::{bit, catalog::identity, PartialFunction, MAX_ARITY};
use crate::error::{Error, Result};

/// Default cap on candidate strings enumerated while materializing a
/// composition.
pub const DEFAULT_CAP: u64 = 1 << 26;

/// `f ∘ g` with the default materialization cap.
pub fn compose(f: &PartialFunction, g: &PartialFunction) -> Result<PartialFunction> {
    compose_with_cap(f, g, DEFAULT_CAP)
}

pub fn compose_with_cap(f: &PartialFunction, g: &PartialFunction, cap: u64) -> Result<PartialFunction> {
    let blocks = vec![g; f.arity()];
    compose_blocks(f, &blocks, cap)
}

/// Composition with a possibly different inner function per outer bit:
/// the input is `y¹y²…` with `yⁱ ∈ Dom(blocks[i])`, and the value is
/// `f(blocks[0](y¹) blocks[1](y²) …)` whenever that string lies in `Dom(f)`.
pub fn compose_blocks(f: &PartialFunction, blocks: &[&PartialFunction], cap: u64) -> Result<PartialFunction> {
    if blocks.len() != f.arity() {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks supplied for an outer function on {} bits",
            blocks.len(),
            f.arity()
        )));
    }
    let arity: usize = blocks.iter().map(|g| g.arity()).sum();
    if arity > MAX_ARITY {
        return Err(Error::ArityTooLarge { arity, max: MAX_ARITY });
    }
    let needed = blocks
        .iter()
        .fold(1u128, |acc, g| acc.saturating_mul(g.domain_size() as u128));
    if needed > cap as u128 {
        return Err(Error::SizeCapExceeded { needed, cap });
    }

    let mut offsets = Vec::with_capacity(blocks.len());
    let mut off = 0;
    for g in blocks {
        offsets.push(off);
        off += g.arity();
    }
    let preimages: Vec<[Vec<u64>; 2]> = blocks.iter().map(|g| [g.preimage(false), g.preimage(true)]).collect();

    let mut entries = Vec::new();
    let mut choice = vec![0usize; blocks.len()];
    for &(z, value) in f.entries() {
        let lists: Vec<&Vec<u64>> = (0..blocks.len())
            .map(|i| &preimages[i][bit(z, i) as usize])
            .collect();
        if lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        choice.iter_mut().for_each(|c| *c = 0);
        // odometer over the product of the per-block preimages
        loop {
            let x = lists
                .iter()
                .zip(&offsets)
                .zip(&choice)
                .fold(0u64, |acc, ((l, &o), &c)| acc | (l[c] << o));
            entries.push((x, value));
            let mut i = 0;
            loop {
                if i == choice.len() {
                    break;
                }
                choice[i] += 1;
                if choice[i] < lists[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::EmptyDomain);
    }
    Ok(PartialFunction::from_distinct(arity, entries))
}

/// `f^k` with `f^0 = I`.
pub fn power(f: &PartialFunction, k: usize) -> Result<PartialFunction> {
    power_with_cap(f, k, DEFAULT_CAP)
}

pub fn power_with_cap(f: &PartialFunction, k: usize, cap: u64) -> Result<PartialFunction> {
    let mut acc = identity();
    for _ in 0..k {
        acc = compose_with_cap(f, &acc, cap)?;
    }
    Ok(acc)
}
