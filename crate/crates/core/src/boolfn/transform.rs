//! The elementary transformations underlying well-behaved measures and the
//! reduction relations: index renaming, superfluous bits, bit duplication,
//! alphabet renaming, output negation and promise restriction.

use super::{bit, delete_bit, extract_bits, format_bits, low_mask, PartialFunction, DEFAULT_CAP, MAX_ARITY};
use crate::error::{Error, Result};

/// `f̄(x) = 1 - f(x)` on the same domain.
pub fn negate_output(f: &PartialFunction) -> PartialFunction {
    let entries = f.entries().iter().map(|&(x, v)| (x, !v)).collect();
    PartialFunction::from_sorted_unchecked(f.arity(), entries)
}

/// Alphabet renaming: `f_z(x) = f(x ⊕ z)` on `{x : x ⊕ z ∈ Dom(f)}`.
pub fn negate_bits(f: &PartialFunction, z: u64) -> Result<PartialFunction> {
    if z & !low_mask(f.arity()) != 0 {
        return Err(Error::invalid("negation mask is wider than the function"));
    }
    let entries = f.entries().iter().map(|&(x, v)| (x ^ z, v)).collect();
    Ok(PartialFunction::from_distinct(f.arity(), entries))
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::invalid(format!("permutation has length {}, expected {n}", perm.len())));
    }
    let mut seen = 0u64;
    for &p in perm {
        if p >= n || bit(seen, p) {
            return Err(Error::invalid(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen |= 1 << p;
    }
    Ok(())
}

/// Index renaming `f_π(x) = f(x_π)` where `(x_π)_i = x_{π(i)}` and
/// `perm[i] = π(i)`.
pub fn rename_indices(f: &PartialFunction, perm: &[usize]) -> Result<PartialFunction> {
    check_permutation(perm, f.arity())?;
    let entries = f
        .entries()
        .iter()
        .map(|&(y, v)| {
            let x = perm
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &p)| acc | (((y >> i) & 1) << p));
            (x, v)
        })
        .collect();
    Ok(PartialFunction::from_distinct(f.arity(), entries))
}

/// `f|_P` for a non-empty `P ⊆ Dom(f)`.
pub fn restrict(f: &PartialFunction, promise: &[u64]) -> Result<PartialFunction> {
    if promise.is_empty() {
        return Err(Error::EmptyPromise);
    }
    let mut entries = Vec::with_capacity(promise.len());
    for &x in promise {
        match f.get(x) {
            Some(v) => entries.push((x, v)),
            None => return Err(Error::PromiseOutsideDomain(format_bits(x, f.arity()))),
        }
    }
    PartialFunction::new(f.arity(), entries)
}

/// `f_S(xy) = f(x)` on `{xy : x ∈ Dom(f), y ∈ S}` for a set `S` of
/// `m`-bit strings appended on the right.
pub fn add_superfluous(f: &PartialFunction, m: usize, set: &[u64]) -> Result<PartialFunction> {
    let n = f.arity();
    if m == 0 {
        return Err(Error::invalid("superfluous block must have positive width"));
    }
    if n + m > MAX_ARITY {
        return Err(Error::ArityTooLarge {
            arity: n + m,
            max: MAX_ARITY,
        });
    }
    if set.is_empty() {
        return Err(Error::EmptyPromise);
    }
    if set.iter().any(|&y| y & !low_mask(m) != 0) {
        return Err(Error::invalid(format!("superfluous strings must have width {m}")));
    }
    let needed = f.domain_size() as u128 * set.len() as u128;
    if needed > DEFAULT_CAP as u128 {
        return Err(Error::SizeCapExceeded { needed, cap: DEFAULT_CAP });
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateEntry(format_bits(w[0], m)));
    }
    let entries = f
        .entries()
        .iter()
        .flat_map(|&(x, v)| sorted.iter().map(move |&y| (x | (y << n), v)))
        .collect();
    Ok(PartialFunction::from_distinct(n + m, entries))
}

/// Appends a copy of bit `i`: `f_i(x x_i) = f(x)`.
pub fn duplicate_bit(f: &PartialFunction, i: usize) -> Result<PartialFunction> {
    let n = f.arity();
    if i >= n {
        return Err(Error::invalid(format!("bit {i} out of range for arity {n}")));
    }
    if n + 1 > MAX_ARITY {
        return Err(Error::ArityTooLarge {
            arity: n + 1,
            max: MAX_ARITY,
        });
    }
    let entries = f
        .entries()
        .iter()
        .map(|&(x, v)| (x | (((x >> i) & 1) << n), v))
        .collect();
    Ok(PartialFunction::from_distinct(n + 1, entries))
}

/// A set of positions is superfluous when the value depends only on the
/// other bits and every assignment of the other bits admits the same set of
/// completions on these positions.
pub fn is_superfluous_set(f: &PartialFunction, mask: u64) -> bool {
    let mask = mask & low_mask(f.arity());
    if mask == 0 {
        return true;
    }
    let mut rows: Vec<(u64, u64, bool)> = f
        .entries()
        .iter()
        .map(|&(x, v)| (x & !mask, extract_bits(x, mask), v))
        .collect();
    rows.sort_unstable();
    let mut reference: Option<Vec<u64>> = None;
    for group in rows.chunk_by(|a, b| a.0 == b.0) {
        let v = group[0].2;
        if group.iter().any(|r| r.2 != v) {
            return false;
        }
        let completions: Vec<u64> = group.iter().map(|r| r.1).collect();
        match &reference {
            None => reference = Some(completions),
            Some(r) if *r == completions => {}
            Some(_) => return false,
        }
    }
    true
}

fn delete_positions(x: u64, positions_desc: &[usize]) -> u64 {
    positions_desc.iter().fold(x, |acc, &i| delete_bit(acc, i))
}

/// Removes a superfluous set of positions (see [`is_superfluous_set`]).
pub fn remove_superfluous(f: &PartialFunction, positions: &[usize]) -> Result<PartialFunction> {
    let n = f.arity();
    let mut mask = 0u64;
    for &i in positions {
        if i >= n {
            return Err(Error::invalid(format!("bit {i} out of range for arity {n}")));
        }
        mask |= 1 << i;
    }
    let removed = mask.count_ones() as usize;
    if removed == 0 {
        return Ok(f.clone());
    }
    if removed >= n {
        return Err(Error::invalid("cannot remove every bit of a function"));
    }
    if !is_superfluous_set(f, mask) {
        let first = mask.trailing_zeros() as usize;
        return Err(Error::NotDroppable { index: first });
    }
    let mut desc: Vec<usize> = (0..n).filter(|&i| bit(mask, i)).collect();
    desc.reverse();
    let mut entries: Vec<(u64, bool)> = f
        .entries()
        .iter()
        .map(|&(x, v)| (delete_positions(x, &desc), v))
        .collect();
    entries.sort_unstable();
    entries.dedup();
    Ok(PartialFunction::from_sorted_unchecked(n - removed, entries))
}

/// The smallest `j ≠ i` such that bit `j` equals bit `i` on the whole domain.
pub fn duplicate_of(f: &PartialFunction, i: usize) -> Option<usize> {
    (0..f.arity())
        .filter(|&j| j != i)
        .find(|&j| f.domain().all(|x| bit(x, i) == bit(x, j)))
}

/// Removes bit `i`, which must equal bit `j` on the whole domain.
pub fn remove_duplicate(f: &PartialFunction, i: usize, j: usize) -> Result<PartialFunction> {
    let n = f.arity();
    if i >= n || j >= n || i == j {
        return Err(Error::invalid(format!("bits ({i}, {j}) are not two distinct positions below {n}")));
    }
    if !f.domain().all(|x| bit(x, i) == bit(x, j)) {
        return Err(Error::NotDroppable { index: i });
    }
    let entries = f.entries().iter().map(|&(x, v)| (delete_bit(x, i), v)).collect();
    Ok(PartialFunction::from_sorted_unchecked_or_sort(n - 1, entries))
}

/// Removes bit `i` when it is superfluous or duplicates another bit.
pub fn drop_bit(f: &PartialFunction, i: usize) -> Result<PartialFunction> {
    if i >= f.arity() {
        return Err(Error::invalid(format!("bit {i} out of range for arity {}", f.arity())));
    }
    if f.arity() == 1 {
        return Err(Error::NotDroppable { index: i });
    }
    if is_superfluous_set(f, 1 << i) {
        return remove_superfluous(f, &[i]);
    }
    match duplicate_of(f, i) {
        Some(j) => remove_duplicate(f, i, j),
        None => Err(Error::NotDroppable { index: i }),
    }
}

impl PartialFunction {
    pub(crate) fn from_sorted_unchecked_or_sort(n: usize, mut entries: Vec<(u64, bool)>) -> Self {
        if !entries.windows(2).all(|w| w[0].0 < w[1].0) {
            entries.sort_unstable_by_key(|e| e.0);
        }
        Self::from_sorted_unchecked(n, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{identity, maj3, parse_bits, pror, switch};

    fn bits(s: &str) -> u64 {
        parse_bits(s).unwrap()
    }

    #[test]
    fn negate_then_drop_gives_identity() {
        let g = negate_bits(&switch(), bits("01")).unwrap();
        // domain becomes {00, 11}
        assert_eq!(g.domain().collect::<Vec<_>>(), vec![0, 3]);
        let i = drop_bit(&g, 1).unwrap();
        assert_eq!(i, identity());
    }

    #[test]
    fn restrict_then_drop_constants_gives_identity() {
        let g = restrict(&pror(3), &[bits("000"), bits("100")]).unwrap();
        let g = drop_bit(&g, 2).unwrap();
        let g = drop_bit(&g, 1).unwrap();
        assert_eq!(g, identity());
    }

    #[test]
    fn identity_permutation_is_noop() {
        let f = maj3();
        assert_eq!(rename_indices(&f, &[0, 1, 2]).unwrap(), f);
        let s = switch();
        let swapped = rename_indices(&s, &[1, 0]).unwrap();
        assert_eq!(swapped, negate_output(&s));
        assert!(rename_indices(&s, &[0, 0]).is_err());
    }

    #[test]
    fn rename_follows_definition() {
        // f(y) = y_0 on 3 bits; with π = (1, 2, 0) the renamed function reads x_{π(0)} = x_1
        let f = PartialFunction::total(3, |y| y & 1 == 1).unwrap();
        let g = rename_indices(&f, &[1, 2, 0]).unwrap();
        for x in 0..8 {
            assert_eq!(g.get(x), Some(bit(x, 1)));
        }
    }

    #[test]
    fn superfluous_round_trip() {
        let s = switch();
        let padded = add_superfluous(&s, 2, &[0, 3]).unwrap();
        assert_eq!(padded.arity(), 4);
        assert_eq!(padded.domain_size(), 4);
        assert!(is_superfluous_set(&padded, 0b1100));
        // the two padded bits are duplicates of each other but neither alone is superfluous
        assert!(!is_superfluous_set(&padded, 0b0100));
        assert_eq!(remove_superfluous(&padded, &[2, 3]).unwrap(), s);
        assert!(matches!(remove_superfluous(&padded, &[0]), Err(Error::NotDroppable { .. })));
    }

    #[test]
    fn duplicate_round_trip() {
        let f = maj3();
        let d = duplicate_bit(&f, 1).unwrap();
        assert_eq!(duplicate_of(&d, 3), Some(1));
        assert_eq!(remove_duplicate(&d, 3, 1).unwrap(), f);
        assert!(drop_bit(&f, 0).is_err());
    }

    #[test]
    fn restrict_errors() {
        assert_eq!(restrict(&switch(), &[]).unwrap_err(), Error::EmptyPromise);
        assert!(matches!(restrict(&switch(), &[0]), Err(Error::PromiseOutsideDomain(_))));
    }
}
