//! Brute-force oracles written independently of the library algorithms.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use qlimit_core::PartialFunction;

fn bit(x: u64, i: usize) -> bool {
    x >> i & 1 == 1
}

/// Decision-tree depth by minimax over every subcube, memoized on
/// `(fixed mask, fixed bits)`.
pub fn brute_d(f: &PartialFunction) -> usize {
    fn go(f: &PartialFunction, mask: u64, bits: u64, memo: &mut HashMap<(u64, u64), usize>) -> usize {
        if let Some(&v) = memo.get(&(mask, bits)) {
            return v;
        }
        let values: BTreeSet<bool> = f.entries().iter().filter(|e| e.0 & mask == bits).map(|e| e.1).collect();
        let v = if values.len() <= 1 {
            0
        } else {
            (0..f.arity())
                .filter(|&i| mask >> i & 1 == 0)
                .map(|i| {
                    let m = mask | 1 << i;
                    1 + go(f, m, bits, memo).max(go(f, m, bits | 1 << i, memo))
                })
                .min()
                .unwrap()
        };
        memo.insert((mask, bits), v);
        v
    }
    go(f, 0, 0, &mut HashMap::new())
}

/// `(C0, C1)` by trying every subset of positions for every input.
pub fn brute_c(f: &PartialFunction) -> (usize, usize) {
    let n = f.arity();
    let mut c = [0usize; 2];
    for &(x, v) in f.entries() {
        let best = (0u64..1 << n)
            .filter(|&m| f.entries().iter().all(|&(y, w)| w == v || (x ^ y) & m != 0))
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap();
        c[v as usize] = c[v as usize].max(best);
    }
    (c[0], c[1])
}

pub fn brute_s(f: &PartialFunction) -> usize {
    f.entries()
        .iter()
        .map(|&(x, v)| (0..f.arity()).filter(|&i| f.get(x ^ 1 << i) == Some(!v)).count())
        .max()
        .unwrap_or(0)
}

/// Largest number of disjoint sensitive blocks, by exhaustive packing.
pub fn brute_bs(f: &PartialFunction) -> usize {
    let n = f.arity();
    let mut best = 0;
    for &(x, v) in f.entries() {
        let blocks: Vec<u64> = (1u64..1 << n).filter(|&b| f.get(x ^ b) == Some(!v)).collect();
        fn pack(blocks: &[u64], used: u64) -> usize {
            blocks
                .iter()
                .enumerate()
                .filter(|(_, &b)| b & used == 0)
                .map(|(i, &b)| 1 + pack(&blocks[i + 1..], used | b))
                .max()
                .unwrap_or(0)
        }
        best = best.max(pack(&blocks, 0));
    }
    best
}

fn permute(x: u64, perm: &[usize]) -> u64 {
    perm.iter().enumerate().fold(0, |y, (i, &p)| y | (bit(x, i) as u64) << p)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest entry table over all renamings of the bits.
pub fn canonical(f: &PartialFunction) -> Vec<(u64, bool)> {
    permutations(f.arity())
        .iter()
        .map(|p| {
            let mut t: Vec<(u64, bool)> = f.entries().iter().map(|&(x, v)| (permute(x, p), v)).collect();
            t.sort();
            t
        })
        .min()
        .unwrap()
}

/// Every partial function on `n` bits (each input absent, 0 or 1) with a
/// non-empty domain, one per renaming class.
pub fn all_functions(n: usize) -> Vec<PartialFunction> {
    let size = 1usize << n;
    let total = 3usize.pow(size as u32);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for code in 1..total {
        let mut c = code;
        let mut entries = Vec::new();
        for x in 0..size as u64 {
            match c % 3 {
                1 => entries.push((x, false)),
                2 => entries.push((x, true)),
                _ => {}
            }
            c /= 3;
        }
        let f = PartialFunction::new(n, entries).unwrap();
        if seen.insert(canonical(&f)) {
            out.push(f);
        }
    }
    out
}
