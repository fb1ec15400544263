//! Exact complexity measures of explicit partial functions.

mod certificate;
mod degree;
mod deterministic;
mod randomized;
mod sensitivity;
mod tree;

pub use certificate::{certificate_complexity, certificate_value, min_certificate, verify_certificate, CertificateReport};
pub use degree::{
    approx_degree, approximate, degree, interpolate, Polynomial, MAX_DEGREE_ARITY, MAX_TOTAL_DEGREE_ARITY,
};
pub use deterministic::{decision_tree_depth, deterministic_complexity};
pub use randomized::{
    all_trees, leaves_are_certificates, randomized_complexity, Flavor, RandomizedAlgorithm, RandomizedResult,
    MAX_RANDOMIZED_ARITY,
};
pub use sensitivity::{
    block_sensitivity, block_sensitivity_at, block_sensitivity_with_cap, fractional_block_sensitivity,
    fractional_block_sensitivity_at, fractional_block_sensitivity_with_cap, minimal_sensitive_blocks,
    sensitive_bits, sensitivity, BlockWitness, FractionalWitness, SensitivityWitness, DEFAULT_BLOCK_CAP,
};
pub use tree::{verify_tree, DecisionTree};

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::boolfn::{format_bits, PartialAssignment, PartialFunction};
use crate::error::{Error, Result};
use crate::ratlp::{format_rational, int, rat, Rational};

/// The default error bound for bounded-error measures.
pub fn default_epsilon() -> Rational {
    rat(1, 3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    D,
    C,
    C0,
    C1,
    S,
    Bs,
    Fbs,
    Deg,
    Adeg,
    /// Height flavor `R_ε`.
    R,
    /// Expected-cost flavor `R̄_ε`.
    RBar,
    R0,
}

impl Measure {
    pub const ALL: [Measure; 12] = [
        Measure::D,
        Measure::C,
        Measure::C0,
        Measure::C1,
        Measure::S,
        Measure::Bs,
        Measure::Fbs,
        Measure::Deg,
        Measure::Adeg,
        Measure::R,
        Measure::RBar,
        Measure::R0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::D => "D",
            Measure::C => "C",
            Measure::C0 => "C0",
            Measure::C1 => "C1",
            Measure::S => "s",
            Measure::Bs => "bs",
            Measure::Fbs => "fbs",
            Measure::Deg => "deg",
            Measure::Adeg => "adeg",
            Measure::R => "R",
            Measure::RBar => "Rbar",
            Measure::R0 => "R0",
        }
    }

    pub fn uses_epsilon(self) -> bool {
        matches!(self, Measure::Adeg | Measure::R | Measure::RBar)
    }

    /// Whether the measure can be computed for `f` within the built-in arity
    /// limits (it may still fail on block caps).
    pub fn supports(self, f: &PartialFunction) -> bool {
        match self {
            Measure::R | Measure::RBar | Measure::R0 => f.is_constant() || f.arity() <= MAX_RANDOMIZED_ARITY,
            Measure::Deg => {
                f.is_constant() || f.arity() <= MAX_DEGREE_ARITY || (f.is_total() && f.arity() <= MAX_TOTAL_DEGREE_ARITY)
            }
            Measure::Adeg => f.is_constant() || f.arity() <= MAX_DEGREE_ARITY,
            _ => true,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.trim() {
            "D" | "d" => Measure::D,
            "C" | "c" => Measure::C,
            "C0" | "c0" => Measure::C0,
            "C1" | "c1" => Measure::C1,
            "s" | "S" | "sens" => Measure::S,
            "bs" | "BS" => Measure::Bs,
            "fbs" | "FBS" => Measure::Fbs,
            "deg" | "DEG" => Measure::Deg,
            "adeg" | "ADEG" => Measure::Adeg,
            "R" | "r" => Measure::R,
            "Rbar" | "RBAR" | "rbar" => Measure::RBar,
            "R0" | "r0" => Measure::R0,
            other => return Err(Error::invalid(format!("unknown measure `{other}`"))),
        };
        Ok(m)
    }
}

/// Evidence behind a reported value.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Tree(DecisionTree),
    Certificate { input: u64, assignment: PartialAssignment },
    Sensitive(SensitivityWitness),
    Blocks(BlockWitness),
    Fractional(FractionalWitness),
    Polynomial(Polynomial),
    Algorithm(RandomizedAlgorithm),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub measure: Measure,
    pub epsilon: Option<Rational>,
    pub value: Rational,
    pub witness: Option<Witness>,
}

/// Value of `measure` on `f`; `eps` is used by the bounded-error measures.
pub fn value(measure: Measure, f: &PartialFunction, eps: &Rational) -> Result<Rational> {
    Ok(match measure {
        Measure::D => int(decision_tree_depth(f) as i64),
        Measure::C => int(certificate_complexity(f).c as i64),
        Measure::C0 => int(certificate_complexity(f).c0 as i64),
        Measure::C1 => int(certificate_complexity(f).c1 as i64),
        Measure::S => int(sensitivity(f).0 as i64),
        Measure::Bs => int(block_sensitivity(f)?.0 as i64),
        Measure::Fbs => fractional_block_sensitivity(f)?.0,
        Measure::Deg => int(degree(f)?.0 as i64),
        _ => report(measure, f, eps)?.value,
    })
}

pub fn report(measure: Measure, f: &PartialFunction, eps: &Rational) -> Result<MeasureReport> {
    let epsilon = measure.uses_epsilon().then(|| eps.clone());
    let (value, witness) = match measure {
        Measure::D => {
            let (d, t) = deterministic_complexity(f);
            (int(d as i64), Some(Witness::Tree(t)))
        }
        Measure::C | Measure::C0 | Measure::C1 => {
            let r = certificate_complexity(f);
            let (v, which) = match measure {
                Measure::C => (r.c, None),
                Measure::C0 => (r.c0, Some(false)),
                _ => (r.c1, Some(true)),
            };
            let witness = r
                .witness(f, which)
                .map(|(input, assignment)| Witness::Certificate { input, assignment });
            (int(v as i64), witness)
        }
        Measure::S => {
            let (s, w) = sensitivity(f);
            (int(s as i64), Some(Witness::Sensitive(w)))
        }
        Measure::Bs => {
            let (b, w) = block_sensitivity(f)?;
            (int(b as i64), Some(Witness::Blocks(w)))
        }
        Measure::Fbs => {
            let (v, w) = fractional_block_sensitivity(f)?;
            (v, Some(Witness::Fractional(w)))
        }
        Measure::Deg => {
            let (d, p) = degree(f)?;
            (int(d as i64), Some(Witness::Polynomial(p)))
        }
        Measure::Adeg => {
            let (d, p) = approx_degree(f, eps)?;
            (int(d as i64), Some(Witness::Polynomial(p)))
        }
        Measure::R | Measure::RBar | Measure::R0 => {
            if f.is_constant() {
                let tree = DecisionTree::leaf(f.entries()[0].1);
                let alg = RandomizedAlgorithm {
                    support: vec![(tree, Rational::one())],
                };
                (Rational::zero(), Some(Witness::Algorithm(alg)))
            } else {
                let flavor = match measure {
                    Measure::R => Flavor::Height,
                    Measure::RBar => Flavor::Expected,
                    _ => Flavor::ZeroError,
                };
                let r = randomized_complexity(f, eps, flavor)?;
                (r.value, Some(Witness::Algorithm(r.algorithm)))
            }
        }
    };
    Ok(MeasureReport {
        measure,
        epsilon,
        value,
        witness,
    })
}

impl MeasureReport {
    /// Re-checks the witness against the definitions.
    pub fn verify(&self, f: &PartialFunction) -> bool {
        let Some(w) = &self.witness else {
            return true;
        };
        let n = f.arity();
        let eps = self.epsilon.clone().unwrap_or_else(Rational::zero);
        let count = |k: usize| int(k as i64) == self.value;
        match w {
            Witness::Tree(t) => verify_tree(f, t) && count(t.height()),
            Witness::Certificate { input, assignment } => {
                verify_certificate(f, *input, assignment) && count(assignment.size())
            }
            Witness::Sensitive(s) => {
                let v = f.get(s.input);
                v.is_some()
                    && s.bits.iter().all(|&i| i < n && f.get(s.input ^ (1 << i)) == v.map(|b| !b))
                    && count(s.bits.len())
            }
            Witness::Blocks(b) => {
                let v = f.get(b.input);
                let disjoint = b.blocks.iter().enumerate().all(|(i, p)| b.blocks[i + 1..].iter().all(|q| p & q == 0));
                v.is_some()
                    && disjoint
                    && b.blocks.iter().all(|&m| m != 0 && f.get(b.input ^ m) == v.map(|x| !x))
                    && count(b.blocks.len())
            }
            Witness::Fractional(w) => {
                let v = f.get(w.input);
                let sensitive = w
                    .weights
                    .iter()
                    .all(|(m, wt)| *m != 0 && !wt.is_zero() && *wt > Rational::zero() && f.get(w.input ^ m) == v.map(|x| !x));
                let packed = (0..n).all(|i| {
                    w.weights
                        .iter()
                        .filter(|(m, _)| (m >> i) & 1 == 1)
                        .map(|(_, wt)| wt.clone())
                        .sum::<Rational>()
                        <= Rational::one()
                });
                let total: Rational = w.weights.iter().map(|(_, wt)| wt.clone()).sum();
                v.is_some() && sensitive && packed && total == self.value
            }
            Witness::Polynomial(p) => {
                if int(p.degree() as i64) > self.value {
                    return false;
                }
                if self.measure == Measure::Deg {
                    f.entries().iter().all(|&(x, v)| p.evaluate(x) == int(v as i64))
                } else {
                    (0..1u64 << n).all(|x| {
                        let y = p.evaluate(x);
                        let in_range = y >= Rational::zero() && y <= Rational::one();
                        match f.get(x) {
                            Some(true) => in_range && y >= Rational::one() - &eps,
                            Some(false) => in_range && y <= eps,
                            None => in_range,
                        }
                    })
                }
            }
            Witness::Algorithm(a) => {
                if !a.is_distribution() || a.max_error(f) > eps {
                    return false;
                }
                match self.measure {
                    Measure::R => a
                        .support
                        .iter()
                        .all(|(t, _)| f.domain().all(|x| int(t.cost(x) as i64) <= self.value)),
                    Measure::R0 => a.max_error(f).is_zero() && a.max_cost(f) == self.value,
                    _ => a.max_cost(f) == self.value,
                }
            }
        }
    }

    pub fn to_json(&self, f: &PartialFunction) -> Value {
        let n = f.arity();
        let witness = self.witness.as_ref().map(|w| match w {
            Witness::Tree(t) => json!({ "tree": t.to_json() }),
            Witness::Certificate { input, assignment } => json!({
                "input": format_bits(*input, n),
                "certificate": assignment.to_string(),
            }),
            Witness::Sensitive(s) => json!({
                "input": format_bits(s.input, n),
                "bits": s.bits.iter().map(|i| i + 1).collect::<Vec<_>>(),
            }),
            Witness::Blocks(b) => json!({
                "input": format_bits(b.input, n),
                "blocks": b.blocks.iter().map(|m| mask_positions(*m, n)).collect::<Vec<_>>(),
            }),
            Witness::Fractional(w) => json!({
                "input": format_bits(w.input, n),
                "blocks": w.weights.iter().map(|(m, wt)| json!({
                    "block": mask_positions(*m, n),
                    "weight": format_rational(wt),
                })).collect::<Vec<_>>(),
            }),
            Witness::Polynomial(p) => json!({ "polynomial": p.to_text() }),
            Witness::Algorithm(a) => json!({
                "support": a.support.iter().map(|(t, p)| json!({
                    "probability": format_rational(p),
                    "tree": t.to_json(),
                })).collect::<Vec<_>>(),
            }),
        });
        let mut out = json!({
            "measure": self.measure.name(),
            "value": format_rational(&self.value),
            "witness": witness,
        });
        if let Some(e) = &self.epsilon {
            out["epsilon"] = Value::String(format_rational(e));
        }
        out
    }
}

/// 1-based positions of a mask.
pub fn mask_positions(m: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| (m >> i) & 1 == 1).map(|i| i + 1).collect()
}
