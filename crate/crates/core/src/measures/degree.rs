//! Exact and approximate polynomial degree.
//!
//! Outside the promise the approximating polynomial must stay in `[0, 1]`;
//! on the promise it must be within `ε` of the function value.

use num_traits::{One, Zero};

use crate::boolfn::{low_mask, PartialFunction};
use crate::error::{Error, Result};
use crate::ratlp::{self, int, Feasibility, LinearProgram, Rational, Relation};

/// Arity limit for the monomial-basis systems on partial functions.
pub const MAX_DEGREE_ARITY: usize = 10;
/// Arity limit for the Möbius transform on total functions.
pub const MAX_TOTAL_DEGREE_ARITY: usize = 20;

/// A multilinear polynomial as `(monomial mask, coefficient)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub n: usize,
    pub terms: Vec<(u64, Rational)>,
}

impl Polynomial {
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, _)| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn evaluate(&self, x: u64) -> Rational {
        self.terms
            .iter()
            .filter(|(m, _)| x & m == *m)
            .map(|(_, c)| c.clone())
            .sum()
    }

    /// Renders with 1-based variable names, e.g. `x1 + x2 - 2*x1*x2`.
    pub fn to_text(&self) -> String {
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().filter(|(_, c)| !c.is_zero()) {
            let vars: Vec<String> = (0..self.n).filter(|&i| (m >> i) & 1 == 1).map(|i| format!("x{}", i + 1)).collect();
            let coeff = ratlp::format_rational(c);
            parts.push(match (vars.is_empty(), c.is_one()) {
                (true, _) => coeff,
                (false, true) => vars.join("*"),
                (false, false) => format!("{coeff}*{}", vars.join("*")),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Monomials of degree at most `d`, ordered by degree and then mask.
fn monomials(n: usize, d: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (0..1u64 << n).filter(|m| m.count_ones() as usize <= d).collect();
    out.sort_unstable_by_key(|m| (m.count_ones(), *m));
    out
}

fn constant_polynomial(f: &PartialFunction) -> Option<Polynomial> {
    f.constant_value().map(|v| Polynomial {
        n: f.arity(),
        terms: if v { vec![(0, Rational::one())] } else { Vec::new() },
    })
}

/// `deg(f)` with an interpolating polynomial of that degree.
pub fn degree(f: &PartialFunction) -> Result<(usize, Polynomial)> {
    if let Some(p) = constant_polynomial(f) {
        return Ok((0, p));
    }
    let n = f.arity();
    if f.is_total() && n <= MAX_TOTAL_DEGREE_ARITY {
        let p = mobius(f);
        return Ok((p.degree(), p));
    }
    if n > MAX_DEGREE_ARITY {
        return Err(Error::ArityTooLarge {
            arity: n,
            max: MAX_DEGREE_ARITY,
        });
    }
    let (mut lo, mut hi) = (1, n);
    let mut witness = interpolate(f, n).expect("degree n always interpolates");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match interpolate(f, mid) {
            Some(p) => {
                witness = p;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    if witness.degree() != lo {
        witness = interpolate(f, lo).expect("feasible at the search result");
    }
    Ok((lo, witness))
}

fn mobius(f: &PartialFunction) -> Polynomial {
    let n = f.arity();
    let mut a: Vec<i64> = vec![0; 1 << n];
    for &(x, v) in f.entries() {
        a[x as usize] = v as i64;
    }
    for i in 0..n {
        for s in 0..a.len() {
            if (s >> i) & 1 == 1 {
                a[s] -= a[s ^ (1 << i)];
            }
        }
    }
    let mut terms: Vec<(u64, Rational)> = a
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0)
        .map(|(m, c)| (m as u64, int(c)))
        .collect();
    terms.sort_unstable_by_key(|(m, _)| (m.count_ones(), *m));
    Polynomial { n, terms }
}

/// Exact interpolation of `f` on its domain by a polynomial of degree ≤ `d`.
pub fn interpolate(f: &PartialFunction, d: usize) -> Option<Polynomial> {
    let n = f.arity();
    let monos = monomials(n, d);
    let mut lp = LinearProgram::feasibility(monos.len());
    for j in 0..monos.len() {
        lp.set_free(j);
    }
    for &(x, v) in f.entries() {
        let row: Vec<Rational> = monos
            .iter()
            .map(|&m| if x & m == m { Rational::one() } else { Rational::zero() })
            .collect();
        lp.add_constraint(row, Relation::Eq, int(v as i64));
    }
    match ratlp::feasible(&lp).expect("interpolation system is well formed") {
        Feasibility::Feasible(coeffs) => Some(Polynomial {
            n,
            terms: monos.into_iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).collect(),
        }),
        Feasibility::Infeasible => None,
    }
}

fn check_epsilon(eps: &Rational) -> Result<()> {
    if *eps < Rational::zero() || *eps >= ratlp::rat(1, 2) {
        return Err(Error::invalid(format!("error bound {} must lie in [0, 1/2)", ratlp::format_rational(eps))));
    }
    Ok(())
}

/// `adeg_ε(f)` with an approximating polynomial.
pub fn approx_degree(f: &PartialFunction, eps: &Rational) -> Result<(usize, Polynomial)> {
    check_epsilon(eps)?;
    if let Some(p) = constant_polynomial(f) {
        return Ok((0, p));
    }
    let n = f.arity();
    if n > MAX_DEGREE_ARITY {
        return Err(Error::ArityTooLarge {
            arity: n,
            max: MAX_DEGREE_ARITY,
        });
    }
    let (mut lo, mut hi) = (0, n);
    let mut witness = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match approximate(f, mid, eps)? {
            Some(p) => {
                witness = Some(p);
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let witness = match witness {
        Some(p) if p.degree() <= lo => p,
        _ => approximate(f, lo, eps)?.expect("degree n always approximates"),
    };
    Ok((lo, witness))
}

pub fn approximate(f: &PartialFunction, d: usize, eps: &Rational) -> Result<Option<Polynomial>> {
    let n = f.arity();
    let monos = monomials(n, d);
    let mut lp = LinearProgram::feasibility(monos.len());
    for j in 0..monos.len() {
        lp.set_free(j);
    }
    let one = Rational::one();
    for x in 0..=low_mask(n) {
        let terms: Vec<(usize, Rational)> = monos
            .iter()
            .enumerate()
            .filter(|(_, &m)| x & m == m)
            .map(|(j, _)| (j, one.clone()))
            .collect();
        let (lower, upper) = match f.get(x) {
            Some(true) => (&one - eps, one.clone()),
            Some(false) => (Rational::zero(), eps.clone()),
            None => (Rational::zero(), one.clone()),
        };
        lp.add_sparse(&terms, Relation::Ge, lower);
        lp.add_sparse(&terms, Relation::Le, upper);
    }
    Ok(match ratlp::feasible(&lp)? {
        Feasibility::Feasible(coeffs) => Some(Polynomial {
            n,
            terms: monos.into_iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).collect(),
        }),
        Feasibility::Infeasible => None,
    })
}
