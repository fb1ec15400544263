//! Possibly partial Boolean functions on up to 64 bits.
//!
//! An input string is packed into a `u64` with bit `i` holding the `i`-th
//! character counted from the left (so the string `"10"` is the integer 1).
//! A function keeps its domain as an explicit table sorted by input, which
//! stays small for the sparse promise problems that dominate this crate.

mod catalog;
mod compose;
mod io;
mod transform;

pub use catalog::{catalog, constant, identity, maj3, nand2, pror, switch, Catalog};
pub use compose::{compose, compose_blocks, compose_with_cap, power, power_with_cap, DEFAULT_CAP};
pub use io::{FunctionSpec, ParseFormat};
pub use transform::{
    add_superfluous, drop_bit, duplicate_bit, duplicate_of, is_superfluous_set, negate_bits,
    negate_output, remove_duplicate, remove_superfluous, rename_indices, restrict,
};

use std::fmt;

use crate::error::{Error, Result};

/// Maximum arity of a materialized function.
pub const MAX_ARITY: usize = 64;

#[inline]
pub fn bit(x: u64, i: usize) -> bool {
    (x >> i) & 1 == 1
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Gathers the bits of `x` selected by `mask` into the low bits of the result.
#[inline]
pub fn extract_bits(x: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    let mut k = 0;
    while m != 0 {
        let i = m.trailing_zeros();
        out |= ((x >> i) & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Inverse of [`extract_bits`]: scatters the low bits of `x` onto `mask`.
#[inline]
pub fn deposit_bits(x: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    let mut k = 0;
    while m != 0 {
        let i = m.trailing_zeros();
        out |= ((x >> k) & 1) << i;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Removes bit `i` from `x`, shifting the higher bits down by one.
#[inline]
pub fn delete_bit(x: u64, i: usize) -> u64 {
    let low = x & low_mask(i);
    let high = if i + 1 >= 64 { 0 } else { (x >> (i + 1)) << i };
    low | high
}

pub fn format_bits(x: u64, n: usize) -> String {
    (0..n).map(|i| if bit(x, i) { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Result<u64> {
    if s.len() > MAX_ARITY {
        return Err(Error::ArityTooLarge {
            arity: s.len(),
            max: MAX_ARITY,
        });
    }
    let mut x = 0u64;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => x |= 1 << i,
            other => return Err(Error::invalid(format!("unexpected character `{other}` in bit string"))),
        }
    }
    Ok(x)
}

/// A string over `{0,1,*}`: `mask` marks the fixed positions and `bits`
/// holds their values (zero outside the mask).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialAssignment {
    n: usize,
    mask: u64,
    bits: u64,
}

impl PartialAssignment {
    pub fn new(n: usize, mask: u64, bits: u64) -> Self {
        debug_assert!(n <= MAX_ARITY);
        let mask = mask & low_mask(n);
        PartialAssignment { n, mask, bits: bits & mask }
    }

    /// The restriction of the full input `x` to the positions in `mask`.
    pub fn from_input(n: usize, x: u64, mask: u64) -> Self {
        Self::new(n, mask, x)
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, 0, 0)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Number of fixed positions, `|p|`.
    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        bit(self.mask, i).then(|| bit(self.bits, i))
    }

    /// Fixed positions in increasing order.
    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| bit(self.mask, i))
    }

    /// `p ⊆ x`: every fixed position agrees with the full input `x`.
    pub fn is_contained_in(&self, x: u64) -> bool {
        (x & self.mask) == self.bits
    }

    pub fn is_consistent_with(&self, other: &PartialAssignment) -> bool {
        let common = self.mask & other.mask;
        (self.bits & common) == (other.bits & common)
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let c = match self.get(i) {
                None => '*',
                Some(true) => '1',
                Some(false) => '0',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PartialAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_ARITY {
            return Err(Error::ArityTooLarge {
                arity: s.len(),
                max: MAX_ARITY,
            });
        }
        let (mut mask, mut bits) = (0u64, 0u64);
        for (i, c) in s.chars().enumerate() {
            match c {
                '*' => {}
                '0' => mask |= 1 << i,
                '1' => {
                    mask |= 1 << i;
                    bits |= 1 << i;
                }
                other => return Err(Error::invalid(format!("unexpected character `{other}` in partial assignment"))),
            }
        }
        Ok(PartialAssignment::new(s.len(), mask, bits))
    }
}

/// A Boolean function defined on a non-empty subset of `{0,1}^n`.
///
/// Immutable after construction; equality compares arity and the full
/// domain table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialFunction {
    n: usize,
    entries: Vec<(u64, bool)>,
}

impl PartialFunction {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (u64, bool)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("arity must be positive"));
        }
        if n > MAX_ARITY {
            return Err(Error::ArityTooLarge { arity: n, max: MAX_ARITY });
        }
        let mut entries: Vec<(u64, bool)> = entries.into_iter().collect();
        let outside = !low_mask(n);
        if let Some(&(x, _)) = entries.iter().find(|(x, _)| x & outside != 0) {
            return Err(Error::invalid(format!("input {x:#x} does not fit in {n} bits")));
        }
        entries.sort_unstable_by_key(|e| e.0);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateEntry(format_bits(w[0].0, n)));
        }
        if entries.is_empty() {
            return Err(Error::EmptyDomain);
        }
        Ok(PartialFunction { n, entries })
    }

    /// Entries given as bit strings, e.g. `[("01", false), ("10", true)]`.
    pub fn from_strings<S: AsRef<str>>(n: usize, table: impl IntoIterator<Item = (S, bool)>) -> Result<Self> {
        let mut entries = Vec::new();
        for (s, v) in table {
            let s = s.as_ref();
            if s.len() != n {
                return Err(Error::invalid(format!("`{s}` does not have length {n}")));
            }
            entries.push((parse_bits(s)?, v));
        }
        Self::new(n, entries)
    }

    /// The total function on `n` bits given by `f`.
    pub fn total(n: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        if n > 26 {
            return Err(Error::SizeCapExceeded {
                needed: 1u128 << n,
                cap: DEFAULT_CAP,
            });
        }
        Self::new(n, (0..1u64 << n).map(|x| (x, f(x))))
    }

    pub(crate) fn from_sorted_unchecked(n: usize, entries: Vec<(u64, bool)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(!entries.is_empty());
        PartialFunction { n, entries }
    }

    /// Builds from unsorted entries that are known to be distinct.
    pub(crate) fn from_distinct(n: usize, mut entries: Vec<(u64, bool)>) -> Self {
        entries.sort_unstable_by_key(|e| e.0);
        Self::from_sorted_unchecked(n, entries)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// `|Dom(f)|`.
    pub fn domain_size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u64, bool)] {
        &self.entries
    }

    pub fn domain(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn get(&self, x: u64) -> Option<bool> {
        self.entries
            .binary_search_by_key(&x, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn contains(&self, x: u64) -> bool {
        self.get(x).is_some()
    }

    pub fn preimage(&self, value: bool) -> Vec<u64> {
        self.entries.iter().filter(|e| e.1 == value).map(|e| e.0).collect()
    }

    pub fn is_total(&self) -> bool {
        self.n < 64 && self.entries.len() as u64 == 1u64 << self.n
    }

    pub fn is_constant(&self) -> bool {
        let v = self.entries[0].1;
        self.entries.iter().all(|e| e.1 == v)
    }

    /// The common value when the function is constant.
    pub fn constant_value(&self) -> Option<bool> {
        self.is_constant().then(|| self.entries[0].1)
    }
}

impl fmt::Display for PartialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
