//! Deterministic query complexity by memoized recursion over restrictions.

use rustc_hash::FxHashMap;

use super::tree::DecisionTree;
use crate::boolfn::{bit, delete_bit, PartialFunction};

type Entries = Vec<(u64, bool)>;

fn is_constant(e: &[(u64, bool)]) -> bool {
    e.iter().all(|x| x.1 == e[0].1)
}

fn contains(e: &[(u64, bool)], x: u64) -> Option<bool> {
    e.binary_search_by_key(&x, |p| p.0).ok().map(|i| e[i].1)
}

/// Splits on variable `i`, deleting it; both halves stay sorted because the
/// deleted bit is fixed within each half.
fn split(e: &[(u64, bool)], i: usize) -> (Entries, Entries) {
    let mut zero = Vec::new();
    let mut one = Vec::new();
    for &(x, v) in e {
        let y = delete_bit(x, i);
        if bit(x, i) {
            one.push((y, v));
        } else {
            zero.push((y, v));
        }
    }
    (zero, one)
}

/// Removes variables that are constant over the domain or individually
/// superfluous, until none are left. `vars` tracks original indices.
fn normalize(mut n: usize, mut e: Entries, vars: &mut Vec<usize>) -> (usize, Entries) {
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < n {
            let first = bit(e[0].0, i);
            let constant = e.iter().all(|&(x, _)| bit(x, i) == first);
            let superfluous = !constant && e.iter().all(|&(x, v)| contains(&e, x ^ (1 << i)) == Some(v));
            if constant || superfluous {
                e = if constant {
                    e.iter().map(|&(x, v)| (delete_bit(x, i), v)).collect()
                } else {
                    e.iter().filter(|p| !bit(p.0, i)).map(|&(x, v)| (delete_bit(x, i), v)).collect()
                };
                vars.remove(i);
                n -= 1;
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            return (n, e);
        }
    }
}

fn sensitivity_of(n: usize, e: &[(u64, bool)]) -> usize {
    e.iter()
        .map(|&(x, v)| (0..n).filter(|&i| contains(e, x ^ (1 << i)) == Some(!v)).count())
        .max()
        .unwrap_or(0)
}

fn lower_bound(n: usize, e: &[(u64, bool)]) -> usize {
    // a total function with an odd number of 1-inputs needs all n queries:
    // a leaf at depth below n covers an even number of inputs
    if n < 64 && e.len() as u64 == 1u64 << n && e.iter().filter(|p| p.1).count() % 2 == 1 {
        return n;
    }
    sensitivity_of(n, e).max(1)
}

#[derive(Default)]
struct Solver {
    memo: FxHashMap<(usize, Entries), usize>,
}

impl Solver {
    fn value(&mut self, n: usize, e: Entries) -> usize {
        if is_constant(&e) {
            return 0;
        }
        let mut vars: Vec<usize> = (0..n).collect();
        let (n, e) = normalize(n, e, &mut vars);
        self.value_normalized(n, e)
    }

    fn value_normalized(&mut self, n: usize, e: Entries) -> usize {
        if n == 1 {
            return 1;
        }
        let key = (n, e);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let e = &key.1;
        let lb = lower_bound(n, e);
        let mut best = n;
        if lb < best {
            for i in 0..n {
                let (e0, e1) = split(e, i);
                let d0 = self.value(n - 1, e0);
                if 1 + d0 >= best {
                    continue;
                }
                let d1 = self.value(n - 1, e1);
                best = best.min(1 + d0.max(d1));
                if best <= lb {
                    break;
                }
            }
        }
        self.memo.insert(key, best);
        best
    }

    fn tree(&mut self, n: usize, e: Entries, vars: Vec<usize>) -> DecisionTree {
        if is_constant(&e) {
            return DecisionTree::leaf(e[0].1);
        }
        let mut vars = vars;
        let (n, e) = normalize(n, e, &mut vars);
        let target = self.value_normalized(n, e.clone());
        if target == n {
            return full_tree(&e, &vars);
        }
        for i in 0..n {
            let (e0, e1) = split(&e, i);
            let d0 = self.value(n - 1, e0.clone());
            let d1 = self.value(n - 1, e1.clone());
            if 1 + d0.max(d1) == target {
                let mut rest = vars.clone();
                let index = rest.remove(i);
                let zero = self.tree(n - 1, e0, rest.clone());
                let one = self.tree(n - 1, e1, rest);
                return DecisionTree::query(index, zero, one);
            }
        }
        unreachable!("an optimal variable always exists")
    }
}

/// Queries the variables in order until the restriction is constant.
fn full_tree(e: &[(u64, bool)], vars: &[usize]) -> DecisionTree {
    if e.is_empty() {
        return DecisionTree::leaf(false);
    }
    if is_constant(e) || vars.is_empty() {
        return DecisionTree::leaf(e[0].1);
    }
    let (e0, e1) = split(e, 0);
    DecisionTree::query(vars[0], full_tree(&e0, &vars[1..]), full_tree(&e1, &vars[1..]))
}

/// `D(f)`.
pub fn decision_tree_depth(f: &PartialFunction) -> usize {
    Solver::default().value(f.arity(), f.entries().to_vec())
}

/// `D(f)` together with an optimal tree.
pub fn deterministic_complexity(f: &PartialFunction) -> (usize, DecisionTree) {
    let mut solver = Solver::default();
    let value = solver.value(f.arity(), f.entries().to_vec());
    let tree = solver.tree(f.arity(), f.entries().to_vec(), (0..f.arity()).collect());
    debug_assert_eq!(tree.height(), value);
    (value, tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{catalog, identity, maj3, nand2, power, pror, switch};
    use crate::measures::tree::verify_tree;

    /// Minimum height over every decision tree on the given variables.
    fn brute_force(f: &PartialFunction) -> usize {
        fn best(f: &PartialFunction, fixed_mask: u64, fixed_bits: u64) -> usize {
            let live: Vec<_> = f
                .entries()
                .iter()
                .filter(|(x, _)| x & fixed_mask == fixed_bits)
                .map(|e| e.1)
                .collect();
            if live.iter().all(|&v| v == live.first().copied().unwrap_or(false)) {
                return 0;
            }
            (0..f.arity())
                .filter(|&i| !bit(fixed_mask, i))
                .map(|i| {
                    let m = fixed_mask | 1 << i;
                    1 + best(f, m, fixed_bits).max(best(f, m, fixed_bits | 1 << i))
                })
                .min()
                .unwrap()
        }
        best(f, 0, 0)
    }

    #[test]
    fn small_values() {
        assert_eq!(decision_tree_depth(&identity()), 1);
        assert_eq!(decision_tree_depth(&switch()), 1);
        assert_eq!(decision_tree_depth(&pror(3)), 3);
        assert_eq!(decision_tree_depth(&pror(3)), brute_force(&pror(3)));
        assert_eq!(decision_tree_depth(&catalog("CONST1", Some(3)).unwrap()), 0);
    }

    #[test]
    fn nand_powers() {
        for k in 1..=3 {
            let f = power(&nand2(), k).unwrap();
            let (d, t) = deterministic_complexity(&f);
            assert_eq!(d, 1 << k);
            assert!(verify_tree(&f, &t));
        }
    }

    #[test]
    fn trees_are_optimal_and_correct() {
        let fs = [maj3(), nand2(), pror(3), switch(), crate::boolfn::compose(&switch(), &nand2()).unwrap()];
        for f in &fs {
            let (d, t) = deterministic_complexity(f);
            assert_eq!(d, brute_force(f), "{f}");
            assert!(verify_tree(f, &t));
            assert_eq!(t.height(), d);
        }
    }

    #[test]
    fn partial_function_where_projection_would_be_wrong() {
        // x3 = x1 xor x2 on the promise; no single variable is superfluous,
        // but any two determine the third
        let f = PartialFunction::new(3, (0..4u64).map(|x| (x | (((x & 1) ^ (x >> 1)) << 2), x & 1 == 1))).unwrap();
        assert_eq!(decision_tree_depth(&f), brute_force(&f));
        assert_eq!(decision_tree_depth(&f), 1);
    }
}
