//! Exact worst-case expected cost of the special-purpose evaluators.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::EvaluatorKind;
use crate::boolfn::{self as catalog, bit, format_bits, PartialFunction};
use crate::error::{Error, Result};
use crate::ratlp::{format_rational, int, rat, Rational};

/// `W_v(ℓ)` for both values together with the child pattern attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct CostLevel {
    pub level: usize,
    pub cost: [Rational; 2],
    pub worst: [u64; 2],
}

impl CostLevel {
    pub fn to_json(&self, n: usize) -> Value {
        json!({
            "level": self.level,
            "w0": format_rational(&self.cost[0]),
            "w1": format_rational(&self.cost[1]),
            "worst0": format_bits(self.worst[0], n),
            "worst1": format_bits(self.worst[1], n),
        })
    }
}

/// Levels `1..=levels` of the worst-case expected-cost recursion. A leaf
/// costs one query, so level 1 is the expected number of leaf queries on the
/// worst one-level pattern.
pub fn exact_expected_cost(kind: EvaluatorKind, f: &PartialFunction, levels: usize) -> Result<Vec<CostLevel>> {
    let expected = match kind {
        EvaluatorKind::DirectionalNand => catalog::nand2(),
        EvaluatorKind::NaiveMaj3 => catalog::maj3(),
        EvaluatorKind::GenericAmplified => {
            return Err(Error::UnsupportedEvaluator("no exact cost model for the generic evaluator".into()))
        }
    };
    if *f != expected {
        return Err(Error::UnsupportedEvaluator(format!("{} does not apply to this function", kind.name())));
    }
    let mut w = [Rational::one(), Rational::one()];
    let mut out = Vec::with_capacity(levels);
    for level in 1..=levels {
        let mut next = [Rational::zero(), Rational::zero()];
        let mut worst = [0u64; 2];
        for v in [false, true] {
            let mut best: Option<(Rational, u64)> = None;
            for p in f.preimage(v) {
                let c = pattern_cost(kind, p, &w);
                if best.as_ref().is_none_or(|b| c > b.0) {
                    best = Some((c, p));
                }
            }
            let (c, p) = best.expect("both values are attainable");
            next[v as usize] = c;
            worst[v as usize] = p;
        }
        out.push(CostLevel {
            level,
            cost: next.clone(),
            worst,
        });
        w = next;
    }
    Ok(out)
}

/// Expected cost of one evaluator step on children with values `p`, when a
/// child of value `b` costs `w[b]`.
fn pattern_cost(kind: EvaluatorKind, p: u64, w: &[Rational; 2]) -> Rational {
    let c = |j: usize| &w[bit(p, j) as usize];
    match kind {
        EvaluatorKind::DirectionalNand => {
            let mut total = Rational::zero();
            for first in 0..2 {
                let mut t = c(first).clone();
                if bit(p, first) {
                    t += c(1 - first);
                }
                total += t;
            }
            total * rat(1, 2)
        }
        EvaluatorKind::NaiveMaj3 => {
            let mut total = Rational::zero();
            for skip in 0..3 {
                let (a, b) = ((skip + 1) % 3, (skip + 2) % 3);
                let mut t = c(a) + c(b);
                if bit(p, a) != bit(p, b) {
                    t += c(skip);
                }
                total += t;
            }
            total / int(3)
        }
        EvaluatorKind::GenericAmplified => unreachable!(),
    }
}

/// `W₁(ℓ)/W₁(ℓ−1)` at the last level.
pub fn last_ratio(levels: &[CostLevel]) -> Option<Rational> {
    match levels {
        [.., a, b] => Some(&b.cost[1] / &a.cost[1]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{maj3, nand2};
    use crate::lasvegas::{sample_input_with, Evaluator, Generator};
    use num_traits::ToPrimitive;

    #[test]
    fn first_level_by_enumeration() {
        // NAND₂ on 11 reads both bits; on 01 it reads one bit half the time.
        let t = exact_expected_cost(EvaluatorKind::DirectionalNand, &nand2(), 1).unwrap();
        assert_eq!(t[0].cost, [int(2), rat(3, 2)]);
        assert!(t[0].worst[1] == 0b01 || t[0].worst[1] == 0b10);
        // MAJ₃ on 110: pair {1,2} agrees, the other two pairs need a third read.
        let t = exact_expected_cost(EvaluatorKind::NaiveMaj3, &maj3(), 1).unwrap();
        assert_eq!(t[0].cost, [rat(8, 3), rat(8, 3)]);
    }

    #[test]
    fn nand_ratio_limit() {
        let t = exact_expected_cost(EvaluatorKind::DirectionalNand, &nand2(), 30).unwrap();
        let r = last_ratio(&t).unwrap().to_f64().unwrap();
        let target = (1.0 + 33f64.sqrt()) / 4.0;
        assert!((r - target).abs() < 1e-3, "{r}");
    }

    #[test]
    fn maj_ratio_limit() {
        let t = exact_expected_cost(EvaluatorKind::NaiveMaj3, &maj3(), 25).unwrap();
        let r = last_ratio(&t).unwrap();
        assert_eq!(r, rat(8, 3));
    }

    #[test]
    fn unsupported() {
        assert!(matches!(
            exact_expected_cost(EvaluatorKind::GenericAmplified, &nand2(), 3),
            Err(Error::UnsupportedEvaluator(_))
        ));
        assert!(matches!(
            exact_expected_cost(EvaluatorKind::NaiveMaj3, &nand2(), 3),
            Err(Error::UnsupportedEvaluator(_))
        ));
    }

    #[test]
    fn matches_simulation_on_hard_inputs() {
        for (f, kind) in [(nand2(), EvaluatorKind::DirectionalNand), (maj3(), EvaluatorKind::NaiveMaj3)] {
            let levels = 4;
            let table = exact_expected_cost(kind, &f, levels).unwrap();
            let e = Evaluator::new(kind, &f).unwrap();
            for v in [false, true] {
                let trials = 4000;
                let mut total = 0u64;
                for s in 0..trials {
                    let mut x = sample_input_with(&f, levels, v, s, Generator::Adversarial).unwrap();
                    let (out, q) = e.evaluate(&mut x, s + 7);
                    assert_eq!(out, v);
                    total += q;
                }
                let mean = total as f64 / trials as f64;
                let exact = table[levels - 1].cost[v as usize].to_f64().unwrap();
                assert!((mean - exact).abs() < 0.05 * exact, "{mean} vs {exact}");
            }
        }
    }
}
