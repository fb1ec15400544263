//! Sensitivity, block sensitivity and fractional block sensitivity.

use num_traits::{One, Zero};

use super::certificate::minimal_sets;
use crate::boolfn::PartialFunction;
use crate::error::{Error, Result};
use crate::ratlp::{self, Direction, LinearProgram, Rational, Relation, Solution};

/// Default cap on minimal sensitive blocks per input.
pub const DEFAULT_BLOCK_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensitivityWitness {
    pub input: u64,
    pub bits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockWitness {
    pub input: u64,
    /// Pairwise disjoint sensitive blocks as bit masks.
    pub blocks: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalWitness {
    pub input: u64,
    pub weights: Vec<(u64, Rational)>,
}

pub fn sensitive_bits(f: &PartialFunction, x: u64) -> Vec<usize> {
    let v = f.get(x).expect("input must lie in the domain");
    (0..f.arity()).filter(|&i| f.get(x ^ (1 << i)) == Some(!v)).collect()
}

pub fn sensitivity(f: &PartialFunction) -> (usize, SensitivityWitness) {
    let mut best = SensitivityWitness {
        input: f.entries()[0].0,
        bits: Vec::new(),
    };
    for &(x, _) in f.entries() {
        let bits = sensitive_bits(f, x);
        if bits.len() > best.bits.len() {
            best = SensitivityWitness { input: x, bits };
        }
    }
    (best.bits.len(), best)
}

/// Inclusion-minimal blocks `B` with `x^B ∈ Dom(f)` and `f(x^B) ≠ f(x)`.
pub fn minimal_sensitive_blocks(f: &PartialFunction, x: u64, cap: usize) -> Result<Vec<u64>> {
    let v = f.get(x).expect("input must lie in the domain");
    let blocks = minimal_sets(f.entries().iter().filter(|e| e.1 != v).map(|e| e.0 ^ x).collect());
    if blocks.len() > cap {
        return Err(Error::TooManyBlocks {
            count: blocks.len(),
            cap,
        });
    }
    Ok(blocks)
}

/// Maximum number of pairwise disjoint sensitive blocks at `x`.
pub fn block_sensitivity_at(f: &PartialFunction, x: u64, cap: usize) -> Result<Vec<u64>> {
    let blocks = minimal_sensitive_blocks(f, x, cap)?;
    Ok(max_packing(&blocks, f.arity()))
}

pub fn block_sensitivity(f: &PartialFunction) -> Result<(usize, BlockWitness)> {
    block_sensitivity_with_cap(f, DEFAULT_BLOCK_CAP)
}

pub fn block_sensitivity_with_cap(f: &PartialFunction, cap: usize) -> Result<(usize, BlockWitness)> {
    let mut best = BlockWitness {
        input: f.entries()[0].0,
        blocks: Vec::new(),
    };
    for &(x, _) in f.entries() {
        let blocks = block_sensitivity_at(f, x, cap)?;
        if blocks.len() > best.blocks.len() {
            best = BlockWitness { input: x, blocks };
        }
    }
    Ok((best.blocks.len(), best))
}

/// Exact maximum set packing by branch and bound. Blocks are tried in order
/// of increasing size, which finds large packings early.
pub(crate) fn max_packing(blocks: &[u64], n: usize) -> Vec<u64> {
    let mut sorted = blocks.to_vec();
    sorted.sort_unstable_by_key(|b| (b.count_ones(), *b));
    let mut best = Vec::new();
    let mut current = Vec::new();
    pack(&sorted, 0, 0, n, &mut current, &mut best);
    best.sort_unstable();
    best
}

fn pack(blocks: &[u64], start: usize, used: u64, n: usize, current: &mut Vec<u64>, best: &mut Vec<u64>) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    let rest: Vec<usize> = (start..blocks.len()).filter(|&j| blocks[j] & used == 0).collect();
    if rest.is_empty() {
        return;
    }
    // every further block needs at least the smallest remaining size
    let smallest = blocks[rest[0]].count_ones() as usize;
    let room = (n - used.count_ones() as usize) / smallest.max(1);
    if current.len() + rest.len().min(room) <= best.len() {
        return;
    }
    for (k, &j) in rest.iter().enumerate() {
        if current.len() + (rest.len() - k).min(room) <= best.len() {
            return;
        }
        current.push(blocks[j]);
        pack(blocks, j + 1, used | blocks[j], n, current, best);
        current.pop();
    }
}

/// `fbs_x(f)`: maximize `Σ w_B` subject to `Σ_{B ∋ i} w_B ≤ 1` for every bit.
pub fn fractional_block_sensitivity_at(f: &PartialFunction, x: u64, cap: usize) -> Result<FractionalWitness> {
    let blocks = minimal_sensitive_blocks(f, x, cap)?;
    if blocks.is_empty() {
        return Ok(FractionalWitness { input: x, weights: Vec::new() });
    }
    let mut lp = LinearProgram::new(Direction::Maximize, vec![Rational::one(); blocks.len()]);
    for i in 0..f.arity() {
        let terms: Vec<(usize, Rational)> = blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| (*b >> i) & 1 == 1)
            .map(|(j, _)| (j, Rational::one()))
            .collect();
        if !terms.is_empty() {
            lp.add_sparse(&terms, Relation::Le, Rational::one());
        }
    }
    match ratlp::solve(&lp)? {
        Solution::Optimal(o) => Ok(FractionalWitness {
            input: x,
            weights: blocks
                .into_iter()
                .zip(o.assignment)
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        }),
        other => Err(Error::Internal(format!("fractional block LP ended as {other:?}"))),
    }
}

pub fn fractional_block_sensitivity(f: &PartialFunction) -> Result<(Rational, FractionalWitness)> {
    fractional_block_sensitivity_with_cap(f, DEFAULT_BLOCK_CAP)
}

pub fn fractional_block_sensitivity_with_cap(f: &PartialFunction, cap: usize) -> Result<(Rational, FractionalWitness)> {
    let mut best_value = Rational::zero();
    let mut best = FractionalWitness {
        input: f.entries()[0].0,
        weights: Vec::new(),
    };
    for &(x, _) in f.entries() {
        let blocks = minimal_sensitive_blocks(f, x, cap)?;
        // Σ w_B ≤ Σ w_B |B| ≤ |⋃ B|, and no more than one unit per block
        let union = blocks.iter().fold(0u64, |u, b| u | b).count_ones() as usize;
        let bound = Rational::from_integer(union.min(blocks.len()).into());
        if bound <= best_value {
            continue;
        }
        let w = fractional_block_sensitivity_at(f, x, cap)?;
        let value: Rational = w.weights.iter().map(|(_, v)| v.clone()).sum();
        if value > best_value {
            best_value = value;
            best = w;
        }
    }
    Ok((best_value, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{bit, catalog, compose, maj3, nand2, parse_bits, pror, switch};
    use crate::ratlp::int;

    /// Maximum number of disjoint sensitive blocks by trying every family of
    /// masks, for functions on at most three bits.
    fn brute_bs(f: &PartialFunction) -> usize {
        let n = f.arity();
        let mut best = 0;
        for &(x, v) in f.entries() {
            let sensitive: Vec<u64> = (1..1u64 << n).filter(|&b| f.get(x ^ b) == Some(!v)).collect();
            for family in 0..1u64 << sensitive.len() {
                let chosen: Vec<u64> = (0..sensitive.len()).filter(|&j| bit(family, j)).map(|j| sensitive[j]).collect();
                let disjoint = chosen.iter().enumerate().all(|(a, p)| chosen[a + 1..].iter().all(|q| p & q == 0));
                if disjoint {
                    best = best.max(chosen.len());
                }
            }
        }
        best
    }

    #[test]
    fn majority() {
        let (s, w) = sensitivity(&maj3());
        assert_eq!(s, 2);
        assert_eq!(sensitive_bits(&maj3(), parse_bits("110").unwrap()), vec![0, 1]);
        assert_eq!(w.bits.len(), 2);
        assert_eq!(block_sensitivity(&maj3()).unwrap().0, 2);
    }

    #[test]
    fn pror_blocks() {
        let f = pror(3);
        let (bs, w) = block_sensitivity(&f).unwrap();
        assert_eq!(bs, 3);
        assert_eq!(w.input, 0);
        let (fbs, fw) = fractional_block_sensitivity(&f).unwrap();
        assert_eq!(fbs, int(3));
        assert!(fw.weights.iter().all(|(_, w)| *w == int(1)));
    }

    #[test]
    fn packing_matches_brute_force() {
        let fs = [maj3(), nand2(), pror(3), switch(), catalog("PARITY", Some(3)).unwrap(), catalog("AND", Some(3)).unwrap()];
        for f in &fs {
            assert_eq!(block_sensitivity(f).unwrap().0, brute_bs(f), "{f}");
        }
    }

    #[test]
    fn fractional_exceeds_integral_on_a_triangle() {
        // 0 is sensitive to the blocks {1,2}, {2,3}, {1,3} and nothing smaller
        let f = PartialFunction::from_strings(3, [("000", false), ("110", true), ("011", true), ("101", true)]).unwrap();
        assert_eq!(block_sensitivity(&f).unwrap().0, 1);
        assert_eq!(fractional_block_sensitivity(&f).unwrap().0, crate::ratlp::rat(3, 2));
    }

    #[test]
    fn block_cap() {
        let f = compose(&maj3(), &nand2()).unwrap();
        assert!(matches!(block_sensitivity_with_cap(&f, 1), Err(Error::TooManyBlocks { .. })));
    }
}
