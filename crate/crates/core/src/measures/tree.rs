use serde_json::{json, Value};

use crate::boolfn::{bit, PartialAssignment, PartialFunction};

/// A deterministic query algorithm. Indices are 0-based internally and
/// 1-based in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DecisionTree {
    Leaf(bool),
    Query {
        index: usize,
        zero: Box<DecisionTree>,
        one: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn leaf(v: bool) -> Self {
        DecisionTree::Leaf(v)
    }

    pub fn query(index: usize, zero: DecisionTree, one: DecisionTree) -> Self {
        DecisionTree::Query {
            index,
            zero: Box::new(zero),
            one: Box::new(one),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Query { zero, one, .. } => 1 + zero.height().max(one.height()),
        }
    }

    pub fn evaluate(&self, x: u64) -> bool {
        let mut node = self;
        loop {
            match node {
                DecisionTree::Leaf(v) => return *v,
                DecisionTree::Query { index, zero, one } => node = if bit(x, *index) { one } else { zero },
            }
        }
    }

    /// Number of queries made on input `x`.
    pub fn cost(&self, x: u64) -> usize {
        let mut node = self;
        let mut c = 0;
        while let DecisionTree::Query { index, zero, one } = node {
            c += 1;
            node = if bit(x, *index) { one } else { zero };
        }
        c
    }

    /// The bits seen along the path followed by `x`.
    pub fn path(&self, n: usize, x: u64) -> PartialAssignment {
        let mut node = self;
        let mut mask = 0u64;
        while let DecisionTree::Query { index, zero, one } = node {
            mask |= 1 << index;
            node = if bit(x, *index) { one } else { zero };
        }
        PartialAssignment::from_input(n, x, mask)
    }

    pub fn num_nodes(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Query { zero, one, .. } => 1 + zero.num_nodes() + one.num_nodes(),
        }
    }

    /// No index repeats on a root-to-leaf path and every index is below `n`.
    pub fn is_well_formed(&self, n: usize) -> bool {
        fn walk(t: &DecisionTree, n: usize, seen: u64) -> bool {
            match t {
                DecisionTree::Leaf(_) => true,
                DecisionTree::Query { index, zero, one } => {
                    *index < n && !bit(seen, *index) && walk(zero, n, seen | 1 << index) && walk(one, n, seen | 1 << index)
                }
            }
        }
        walk(self, n, 0)
    }

    pub fn to_json(&self) -> Value {
        match self {
            DecisionTree::Leaf(v) => json!({ "leaf": *v as u8 }),
            DecisionTree::Query { index, zero, one } => json!({
                "query": index + 1,
                "zero": zero.to_json(),
                "one": one.to_json(),
            }),
        }
    }
}

/// `D` is well formed and agrees with `f` on every domain input.
pub fn verify_tree(f: &PartialFunction, tree: &DecisionTree) -> bool {
    tree.is_well_formed(f.arity()) && f.entries().iter().all(|&(x, v)| tree.evaluate(x) == v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{nand2, parse_bits};

    fn nand_tree() -> DecisionTree {
        use DecisionTree as T;
        T::query(0, T::leaf(true), T::query(1, T::leaf(true), T::leaf(false)))
    }

    #[test]
    fn evaluation_and_cost() {
        let t = nand_tree();
        assert!(verify_tree(&nand2(), &t));
        assert_eq!(t.height(), 2);
        assert_eq!(t.cost(parse_bits("01").unwrap()), 1);
        assert_eq!(t.cost(parse_bits("11").unwrap()), 2);
        assert_eq!(t.path(2, parse_bits("10").unwrap()).to_string(), "10");
        assert_eq!(t.path(2, parse_bits("01").unwrap()).to_string(), "0*");
    }

    #[test]
    fn repeated_index_is_rejected() {
        use DecisionTree as T;
        let t = T::query(0, T::leaf(false), T::query(0, T::leaf(false), T::leaf(true)));
        assert!(!t.is_well_formed(2));
        assert!(!T::query(2, T::leaf(false), T::leaf(true)).is_well_formed(2));
    }

    #[test]
    fn json_uses_one_based_indices() {
        assert_eq!(nand_tree().to_json()["query"], 1);
        assert_eq!(nand_tree().to_json()["one"]["query"], 2);
    }
}
