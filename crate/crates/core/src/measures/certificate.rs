//! Certificate complexity with lexicographic tie-breaking.
//!
//! Two search strategies share one contract: for each domain input `x`, the
//! certificate is the lexicographically smallest index set among those of
//! minimum size. Large dense functions on at most 16 bits use a table of all
//! `3^n` subcubes; everything else uses a per-input hitting-set search.

use crate::boolfn::{low_mask, PartialAssignment, PartialFunction};

/// Per-input minimum certificates together with `C`, `C₀` and `C₁`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub c: usize,
    pub c0: usize,
    pub c1: usize,
    /// One entry per domain input, in domain order.
    pub certificates: Vec<(u64, PartialAssignment)>,
}

impl CertificateReport {
    pub fn certificate(&self, x: u64) -> Option<&PartialAssignment> {
        self.certificates
            .binary_search_by_key(&x, |e| e.0)
            .ok()
            .map(|i| &self.certificates[i].1)
    }

    /// A domain input attaining `C_b` (or `C` when `value` is `None`).
    pub fn witness(&self, f: &PartialFunction, value: Option<bool>) -> Option<(u64, PartialAssignment)> {
        let target = match value {
            None => self.c,
            Some(false) => self.c0,
            Some(true) => self.c1,
        };
        self.certificates
            .iter()
            .find(|(x, p)| p.size() == target && value.is_none_or(|b| f.get(*x) == Some(b)))
            .copied()
    }
}

/// `p` is consistent with `x` and every domain input consistent with `p`
/// takes the value `f(x)`.
pub fn verify_certificate(f: &PartialFunction, x: u64, p: &PartialAssignment) -> bool {
    let Some(v) = f.get(x) else {
        return false;
    };
    p.arity() == f.arity()
        && p.is_contained_in(x)
        && f.entries().iter().all(|&(y, w)| w == v || !p.is_contained_in(y))
}

pub fn certificate_complexity(f: &PartialFunction) -> CertificateReport {
    let certificates = if f.arity() <= DENSE_MAX_ARITY && f.domain_size() > DENSE_MIN_DOMAIN {
        dense_certificates(f)
    } else {
        f.entries().iter().map(|&(x, _)| (x, min_certificate(f, x))).collect()
    };
    let mut report = CertificateReport {
        c: 0,
        c0: 0,
        c1: 0,
        certificates,
    };
    for (&(_, v), (_, p)) in f.entries().iter().zip(&report.certificates) {
        let slot = if v { &mut report.c1 } else { &mut report.c0 };
        *slot = (*slot).max(p.size());
        report.c = report.c.max(p.size());
    }
    report
}

/// `C(f)` alone.
pub fn certificate_value(f: &PartialFunction) -> usize {
    certificate_complexity(f).c
}

const DENSE_MAX_ARITY: usize = 16;
const DENSE_MIN_DOMAIN: usize = 1024;

/// Minimum certificate for one domain input.
pub fn min_certificate(f: &PartialFunction, x: u64) -> PartialAssignment {
    let n = f.arity();
    let v = f.get(x).expect("input must lie in the domain");
    let mut masks: Vec<u64> = f.entries().iter().filter(|e| e.1 != v).map(|e| e.0 ^ x).collect();
    if masks.len() <= 4096 {
        masks = minimal_sets(masks);
    }
    for size in 0..=n {
        let mut chosen = Vec::with_capacity(size);
        if hitting_set(&masks, n, 0, size, 0, &mut chosen) {
            let mask = chosen.iter().fold(0u64, |m, &i| m | 1 << i);
            return PartialAssignment::from_input(n, x, mask);
        }
    }
    unreachable!("the full assignment is always a certificate")
}

/// Keeps the inclusion-minimal masks.
pub(crate) fn minimal_sets(mut masks: Vec<u64>) -> Vec<u64> {
    masks.sort_unstable_by_key(|m| (m.count_ones(), *m));
    masks.dedup();
    let mut kept: Vec<u64> = Vec::new();
    for m in masks {
        if !kept.iter().any(|&k| k & m == k) {
            kept.push(m);
        }
    }
    kept
}

/// Depth-first search over index sets in lexicographic order; `hit` is the
/// union of chosen positions.
fn hitting_set(masks: &[u64], n: usize, start: usize, left: usize, hit: u64, chosen: &mut Vec<usize>) -> bool {
    let Some(&first) = masks.iter().find(|&&m| m & hit == 0) else {
        return true;
    };
    if left == 0 || first & !low_mask(start) == 0 {
        return false;
    }
    for i in start..n {
        if i > start && first & !low_mask(i) == 0 {
            // the first unhit mask has no position left to choose
            return false;
        }
        chosen.push(i);
        if hitting_set(masks, n, i + 1, left - 1, hit | 1 << i, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

const EMPTY: u8 = 0;
const ZERO: u8 = 1;
const ONE: u8 = 2;
const MIXED: u8 = 3;

/// State of every subcube, indexed in base 3 with digit 2 meaning `*`.
fn subcube_states(f: &PartialFunction) -> Vec<u8> {
    let n = f.arity();
    let size = 3usize.pow(n as u32);
    let mut point = vec![EMPTY; 1 << n];
    for &(x, v) in f.entries() {
        point[x as usize] = if v { ONE } else { ZERO };
    }
    let pow3: Vec<usize> = (0..n).map(|i| 3usize.pow(i as u32)).collect();
    let mut states = vec![EMPTY; size];
    let mut digits = vec![0u8; n];
    for idx in 0..size {
        match digits.iter().position(|&d| d == 2) {
            None => {
                let x = digits.iter().enumerate().fold(0usize, |acc, (i, &d)| acc | (d as usize) << i);
                states[idx] = point[x];
            }
            Some(s) => {
                let a = states[idx - 2 * pow3[s]];
                let b = states[idx - pow3[s]];
                states[idx] = if a == EMPTY {
                    b
                } else if b == EMPTY || a == b {
                    a
                } else {
                    MIXED
                };
            }
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < 3 {
                break;
            }
            *d = 0;
        }
    }
    states
}

fn dense_certificates(f: &PartialFunction) -> Vec<(u64, PartialAssignment)> {
    let n = f.arity();
    let states = subcube_states(f);
    let pow3: Vec<usize> = (0..n).map(|i| 3usize.pow(i as u32)).collect();
    let all_star: usize = pow3.iter().map(|p| 2 * p).sum();
    let mut value = vec![EMPTY; 1 << n];
    for &(x, v) in f.entries() {
        value[x as usize] = if v { ONE } else { ZERO };
    }
    let mut assigned: Vec<Option<u64>> = vec![None; 1 << n];
    let mut remaining = f.domain_size();
    let full = low_mask(n);

    for size in 0..=n {
        let mut positions: Vec<usize> = (0..size).collect();
        loop {
            let mask = positions.iter().fold(0u64, |m, &i| m | 1 << i);
            for pattern in 0..1u64 << size {
                let mut bits = 0u64;
                let mut idx = all_star;
                for (k, &i) in positions.iter().enumerate() {
                    let b = (pattern >> k) & 1;
                    bits |= b << i;
                    idx = idx - 2 * pow3[i] + b as usize * pow3[i];
                }
                let state = states[idx];
                if state != ZERO && state != ONE {
                    continue;
                }
                // assign every completion that is still open
                let free = full & !mask;
                let mut sub = free;
                loop {
                    let x = (bits | sub) as usize;
                    if value[x] != EMPTY && assigned[x].is_none() {
                        assigned[x] = Some(mask);
                        remaining -= 1;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & free;
                }
            }
            if remaining == 0 {
                break;
            }
            if !next_combination(&mut positions, n) {
                break;
            }
        }
        if remaining == 0 {
            break;
        }
    }
    f.entries()
        .iter()
        .map(|&(x, _)| {
            let mask = assigned[x as usize].expect("every input has a certificate");
            (x, PartialAssignment::from_input(n, x, mask))
        })
        .collect()
}

/// Advances to the next `k`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{bit, maj3, nand2, parse_bits, power, pror, switch};

    /// Smallest-size, then lexicographically smallest, index set by direct
    /// enumeration of all subsets.
    fn brute(f: &PartialFunction, x: u64) -> u64 {
        let n = f.arity();
        let mut sets: Vec<Vec<usize>> = (0..1u64 << n)
            .map(|m| (0..n).filter(|&i| bit(m, i)).collect())
            .collect();
        sets.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        for s in sets {
            let mask = s.iter().fold(0u64, |m, &i| m | 1 << i);
            if verify_certificate(f, x, &PartialAssignment::from_input(n, x, mask)) {
                return mask;
            }
        }
        unreachable!()
    }

    #[test]
    fn switch_and_nand() {
        let r = certificate_complexity(&switch());
        assert_eq!(r.c, 1);
        assert_eq!(r.certificate(parse_bits("10").unwrap()).unwrap().to_string(), "1*");
        let r = certificate_complexity(&nand2());
        assert_eq!((r.c0, r.c1, r.c), (2, 1, 2));
        assert_eq!(certificate_value(&pror(3)), 3);
    }

    #[test]
    fn verify_examples() {
        let f = nand2();
        let x11 = parse_bits("11").unwrap();
        assert!(verify_certificate(&f, x11, &"11".parse().unwrap()));
        assert!(!verify_certificate(&f, parse_bits("01").unwrap(), &"*1".parse().unwrap()));
        for &(x, _) in maj3().entries() {
            assert!(verify_certificate(&maj3(), x, &PartialAssignment::from_input(3, x, 0b111)));
        }
    }

    #[test]
    fn sparse_matches_brute_force() {
        for f in [maj3(), nand2(), pror(3), switch(), crate::boolfn::compose(&switch(), &nand2()).unwrap()] {
            let r = certificate_complexity(&f);
            for (x, p) in &r.certificates {
                assert_eq!(p.mask(), brute(&f, *x), "{f} at {x}");
            }
        }
    }

    #[test]
    fn dense_matches_sparse() {
        let f = power(&nand2(), 3).unwrap();
        let g = power(&maj3(), 2).unwrap();
        for h in [f, g] {
            let dense = dense_certificates(&h);
            let sparse: Vec<_> = h.entries().iter().map(|&(x, _)| (x, min_certificate(&h, x))).collect();
            assert_eq!(dense, sparse);
        }
    }

    #[test]
    fn nand_power_certificates() {
        let values: Vec<usize> = (1..=3).map(|k| certificate_value(&power(&nand2(), k).unwrap())).collect();
        assert_eq!(values, vec![2, 2, 4]);
    }

    #[test]
    fn combinations_in_order() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while next_combination(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut empty: Vec<usize> = vec![];
        assert!(!next_combination(&mut empty, 3));
    }
}
