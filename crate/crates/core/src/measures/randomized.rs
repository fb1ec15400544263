//! Exact randomized query complexity for functions on at most three bits.
//!
//! Every decision tree on the variables is enumerated, trees dominated on the
//! domain are dropped, and the remaining columns feed an exact LP.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::tree::DecisionTree;
use crate::boolfn::PartialFunction;
use crate::error::{Error, Result};
use crate::ratlp::{self, int, Direction, LinearProgram, Optimum, Rational, Relation, Solution};

pub const MAX_RANDOMIZED_ARITY: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// `R_ε`: smallest height of a distribution with error at most `ε`.
    Height,
    /// `R̄_ε`: smallest worst-case expected cost with error at most `ε`.
    Expected,
    /// `R₀`: expected cost of zero-error algorithms.
    ZeroError,
}

/// A probability distribution over decision trees.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedAlgorithm {
    pub support: Vec<(DecisionTree, Rational)>,
}

impl RandomizedAlgorithm {
    pub fn cost(&self, x: u64) -> Rational {
        self.support.iter().map(|(t, p)| p * int(t.cost(x) as i64)).sum()
    }

    pub fn error(&self, f: &PartialFunction, x: u64) -> Rational {
        let v = f.get(x).expect("input must lie in the domain");
        self.support
            .iter()
            .filter(|(t, _)| t.evaluate(x) != v)
            .map(|(_, p)| p.clone())
            .sum()
    }

    pub fn height(&self) -> usize {
        self.support.iter().map(|(t, _)| t.height()).max().unwrap_or(0)
    }

    pub fn max_cost(&self, f: &PartialFunction) -> Rational {
        f.domain().map(|x| self.cost(x)).max().unwrap_or_else(Rational::zero)
    }

    pub fn max_error(&self, f: &PartialFunction) -> Rational {
        f.domain().map(|x| self.error(f, x)).max().unwrap_or_else(Rational::zero)
    }

    pub fn is_distribution(&self) -> bool {
        self.support.iter().all(|(_, p)| *p >= Rational::zero())
            && self.support.iter().map(|(_, p)| p.clone()).sum::<Rational>() == Rational::one()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedResult {
    pub value: Rational,
    pub algorithm: RandomizedAlgorithm,
    /// The LP behind `value` and its optimum, including the dual.
    pub program: LinearProgram,
    pub optimum: Optimum,
    /// Number of trees left after domination pruning.
    pub columns: usize,
}

/// Every decision tree on the variables in `avail`, including trees that
/// query variables irrelevant to the function.
pub fn all_trees(avail: u64) -> Vec<DecisionTree> {
    let mut out = vec![DecisionTree::leaf(false), DecisionTree::leaf(true)];
    let mut m = avail;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        let sub = all_trees(avail & !(1 << i));
        for a in &sub {
            for b in &sub {
                out.push(DecisionTree::query(i, a.clone(), b.clone()));
            }
        }
    }
    out
}

struct Column {
    tree: DecisionTree,
    outputs: Vec<bool>,
    costs: Vec<usize>,
}

/// Trees not dominated by another tree that is correct wherever they are
/// correct and costs pointwise no more on the domain. Replacing a dominated
/// tree by its dominator never raises any input's cost or error, so the LP
/// optima are unchanged. Among equal signatures the first tree is kept.
fn undominated(f: &PartialFunction) -> Vec<Column> {
    let n = f.arity();
    let values: Vec<bool> = f.entries().iter().map(|e| e.1).collect();
    let mut seen: BTreeMap<(u64, Vec<usize>), Column> = BTreeMap::new();
    for tree in all_trees((1u64 << n) - 1) {
        let outputs: Vec<bool> = f.domain().map(|x| tree.evaluate(x)).collect();
        let costs: Vec<usize> = f.domain().map(|x| tree.cost(x)).collect();
        let correct = outputs
            .iter()
            .zip(&values)
            .enumerate()
            .fold(0u64, |m, (k, (a, b))| if a == b { m | 1 << k } else { m });
        seen.entry((correct, costs.clone())).or_insert(Column { tree, outputs, costs });
    }
    let sigs: Vec<(u64, Vec<usize>)> = seen.keys().cloned().collect();
    let dominated = |a: &(u64, Vec<usize>)| {
        sigs.iter().any(|b| {
            b != a && b.0 & a.0 == a.0 && b.1.iter().zip(&a.1).all(|(x, y)| x <= y)
        })
    };
    let keep: Vec<bool> = sigs.iter().map(|a| !dominated(a)).collect();
    seen.into_values().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect()
}

fn check_inputs(f: &PartialFunction, eps: &Rational) -> Result<()> {
    if f.arity() > MAX_RANDOMIZED_ARITY {
        return Err(Error::ArityTooLarge {
            arity: f.arity(),
            max: MAX_RANDOMIZED_ARITY,
        });
    }
    if *eps < Rational::zero() || *eps >= ratlp::rat(1, 2) {
        return Err(Error::invalid(format!("error bound {} must lie in [0, 1/2)", ratlp::format_rational(eps))));
    }
    Ok(())
}

pub fn randomized_complexity(f: &PartialFunction, eps: &Rational, flavor: Flavor) -> Result<RandomizedResult> {
    let eps = if flavor == Flavor::ZeroError { Rational::zero() } else { eps.clone() };
    check_inputs(f, &eps)?;
    let values: Vec<bool> = f.entries().iter().map(|e| e.1).collect();
    let mut columns = undominated(f);
    if flavor == Flavor::ZeroError {
        columns.retain(|c| c.outputs == values);
    }
    match flavor {
        Flavor::Height => height_flavor(f, &eps, columns, &values),
        Flavor::Expected | Flavor::ZeroError => expected_flavor(&eps, columns, &values),
    }
}

fn error_rows(lp: &mut LinearProgram, columns: &[Column], values: &[bool], eps: &Rational) {
    for (k, &v) in values.iter().enumerate() {
        let terms: Vec<(usize, Rational)> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.outputs[k] != v)
            .map(|(j, _)| (j, Rational::one()))
            .collect();
        if !terms.is_empty() {
            lp.add_sparse(&terms, Relation::Le, eps.clone());
        }
    }
    let all: Vec<(usize, Rational)> = (0..columns.len()).map(|j| (j, Rational::one())).collect();
    lp.add_sparse(&all, Relation::Eq, Rational::one());
}

fn algorithm(columns: &[Column], weights: &[Rational]) -> RandomizedAlgorithm {
    RandomizedAlgorithm {
        support: columns
            .iter()
            .zip(weights)
            .filter(|(_, p)| !p.is_zero())
            .map(|(c, p)| (c.tree.clone(), p.clone()))
            .collect(),
    }
}

/// Minimize `t` subject to `Σ p_D cost(D, x) ≤ t` and the error rows.
fn expected_flavor(eps: &Rational, columns: Vec<Column>, values: &[bool]) -> Result<RandomizedResult> {
    let m = columns.len();
    let mut objective = vec![Rational::zero(); m + 1];
    objective[m] = Rational::one();
    let mut lp = LinearProgram::new(Direction::Minimize, objective);
    for k in 0..values.len() {
        let mut terms: Vec<(usize, Rational)> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.costs[k] > 0)
            .map(|(j, c)| (j, int(c.costs[k] as i64)))
            .collect();
        terms.push((m, int(-1)));
        lp.add_sparse(&terms, Relation::Le, Rational::zero());
    }
    error_rows(&mut lp, &columns, values, eps);
    match ratlp::solve(&lp)? {
        Solution::Optimal(o) => Ok(RandomizedResult {
            value: o.value.clone(),
            algorithm: algorithm(&columns, &o.assignment[..m]),
            program: lp,
            optimum: o,
            columns: m,
        }),
        other => Err(Error::Internal(format!("randomized LP ended as {other:?}"))),
    }
}

/// Smallest `h` for which trees of height at most `h` (on the domain) admit
/// a mixture with error at most `ε`.
fn height_flavor(f: &PartialFunction, eps: &Rational, columns: Vec<Column>, values: &[bool]) -> Result<RandomizedResult> {
    for h in 0..=f.arity() {
        let allowed: Vec<Column> = columns
            .iter()
            .filter(|c| c.costs.iter().all(|&k| k <= h))
            .map(|c| Column {
                tree: c.tree.clone(),
                outputs: c.outputs.clone(),
                costs: c.costs.clone(),
            })
            .collect();
        let m = allowed.len();
        let mut lp = LinearProgram::feasibility(m);
        error_rows(&mut lp, &allowed, values, eps);
        if let Solution::Optimal(o) = ratlp::solve(&lp)? {
            return Ok(RandomizedResult {
                value: int(h as i64),
                algorithm: algorithm(&allowed, &o.assignment),
                program: lp,
                optimum: o,
                columns: m,
            });
        }
    }
    Err(Error::Internal("querying every bit is always exact".into()))
}

/// Every leaf of every tree in the support, reached by a domain input,
/// carries a path that certifies the input's value.
pub fn leaves_are_certificates(f: &PartialFunction, alg: &RandomizedAlgorithm) -> bool {
    alg.support.iter().all(|(t, _)| {
        f.domain()
            .all(|x| super::certificate::verify_certificate(f, x, &t.path(f.arity(), x)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{catalog, maj3, nand2, pror, switch};
    use crate::ratlp::rat;

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (0..=3).map(|n| all_trees((1u64 << n) - 1).len()).collect();
        assert_eq!(counts, vec![2, 6, 74, 16430]);
    }

    #[test]
    fn zero_error_values() {
        let r = randomized_complexity(&nand2(), &Rational::zero(), Flavor::ZeroError).unwrap();
        assert_eq!(r.value, int(2));
        assert!(leaves_are_certificates(&nand2(), &r.algorithm));
        assert!(r.algorithm.is_distribution());
        let r = randomized_complexity(&switch(), &Rational::zero(), Flavor::ZeroError).unwrap();
        assert_eq!(r.value, int(1));
        let r = randomized_complexity(&switch(), &Rational::zero(), Flavor::Expected).unwrap();
        assert_eq!(r.value, int(1));
    }

    #[test]
    fn majority_zero_error() {
        // pick two bits, then the third only on disagreement: on a worst input
        // (one minority bit) the third is needed with probability 2/3
        let r = randomized_complexity(&maj3(), &Rational::zero(), Flavor::ZeroError).unwrap();
        assert_eq!(r.value, rat(8, 3));
        assert!(leaves_are_certificates(&maj3(), &r.algorithm));
        assert!(crate::ratlp::verify_dual(&r.program, &r.optimum.duals, &r.value));
    }

    #[test]
    fn promise_or_heights() {
        let f = pror(2);
        let r = randomized_complexity(&f, &rat(1, 3), Flavor::Height).unwrap();
        assert_eq!(r.value, int(1));
        assert!(r.algorithm.max_error(&f) <= rat(1, 3));
        assert!(r.algorithm.height() <= 1);
        let r = randomized_complexity(&f, &rat(1, 4), Flavor::Height).unwrap();
        assert_eq!(r.value, int(2));
    }

    #[test]
    fn expected_cost_with_error() {
        let f = nand2();
        let r = randomized_complexity(&f, &rat(1, 3), Flavor::Expected).unwrap();
        assert!(r.value <= int(2));
        assert_eq!(r.algorithm.max_cost(&f), r.value);
        assert!(r.algorithm.max_error(&f) <= rat(1, 3));
        let c = catalog("CONST0", Some(2)).unwrap();
        assert_eq!(randomized_complexity(&c, &rat(1, 3), Flavor::Expected).unwrap().value, int(0));
        assert!(randomized_complexity(&catalog("AND", Some(4)).unwrap(), &rat(1, 3), Flavor::Expected).is_err());
    }
}
