//! Exact linear programming over arbitrary-precision rationals.
//!
//! A dense two-phase tableau simplex with Bland's rule. Every optimum is
//! checked before it is returned: the primal point is substituted back into
//! the original constraints and a dual certificate with the same objective
//! value is verified.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Renders `p/q` (or `p` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::invalid(format!("`{s}` is not a rational of the form p/q")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::invalid(format!("`{s}` has a zero denominator")));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    fn lhs(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }
}

/// Variables default to `x ≥ 0` with no upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub direction: Direction,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<Option<Rational>>,
    pub upper: Vec<Option<Rational>>,
}

impl LinearProgram {
    pub fn new(direction: Direction, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            direction,
            objective,
            constraints: Vec::new(),
            lower: vec![Some(Rational::zero()); n],
            upper: vec![None; n],
        }
    }

    /// A program with a zero objective, for feasibility questions.
    pub fn feasibility(num_vars: usize) -> Self {
        Self::new(Direction::Minimize, vec![Rational::zero(); num_vars])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Adds a row given by its non-zero entries.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![Rational::zero(); self.num_vars()];
        for (j, a) in terms {
            if *j < coeffs.len() {
                coeffs[*j] += a;
            } else {
                // keep the width wrong so validation reports it
                coeffs.resize(j + 1, Rational::zero());
                coeffs[*j] = a.clone();
            }
        }
        self.add_constraint(coeffs, relation, rhs);
    }

    pub fn set_bounds(&mut self, j: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn set_free(&mut self, j: usize) {
        self.set_bounds(j, None, None);
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::DimensionMismatch(format!("bounds for {} variables, objective has {n}", self.lower.len())));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
        }
        Ok(())
    }

    fn bounds_consistent(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| match (l, u) {
            (Some(l), Some(u)) => l <= u,
            _ => true,
        })
    }

    fn in_bounds(&self, x: &[Rational]) -> bool {
        x.iter().enumerate().all(|(j, v)| {
            self.lower[j].as_ref().is_none_or(|l| v >= l) && self.upper[j].as_ref().is_none_or(|u| v <= u)
        })
    }

    /// Checks `x` against every constraint and bound with exact arithmetic.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.in_bounds(x)
            && self.constraints.iter().all(|c| c.relation.holds(&c.lhs(x), &c.rhs))
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub value: Rational,
    pub assignment: Vec<Rational>,
    /// One multiplier per constraint, in the sign convention of the program's
    /// own direction (see [`verify_dual`]).
    pub duals: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Optimal(Optimum),
    Infeasible,
    Unbounded,
}

impl Solution {
    pub fn optimum(&self) -> Option<&Optimum> {
        match self {
            Solution::Optimal(o) => Some(o),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

pub fn solve(lp: &LinearProgram) -> Result<Solution> {
    solve_inner(lp, None)
}

/// Like [`solve`], writing every tableau to `out`.
pub fn solve_traced(lp: &LinearProgram, out: &mut String) -> Result<Solution> {
    solve_inner(lp, Some(out))
}

/// Exact feasibility. Systems of equalities over free variables are solved by
/// Gaussian elimination, everything else by phase one of the simplex method.
pub fn feasible(lp: &LinearProgram) -> Result<Feasibility> {
    lp.validate()?;
    let all_free = lp.lower.iter().chain(&lp.upper).all(Option::is_none);
    let all_eq = lp.constraints.iter().all(|c| c.relation == Relation::Eq);
    if all_free && all_eq {
        let rows: Vec<Vec<Rational>> = lp.constraints.iter().map(|c| c.coeffs.clone()).collect();
        let rhs: Vec<Rational> = lp.constraints.iter().map(|c| c.rhs.clone()).collect();
        return Ok(match solve_equalities(&rows, &rhs, lp.num_vars()) {
            Some(x) => {
                if !lp.is_feasible_point(&x) {
                    return Err(Error::Internal("elimination produced a point violating the system".into()));
                }
                Feasibility::Feasible(x)
            }
            None => Feasibility::Infeasible,
        });
    }
    let mut zero = lp.clone();
    zero.objective = vec![Rational::zero(); lp.num_vars()];
    Ok(match solve(&zero)? {
        Solution::Optimal(o) => Feasibility::Feasible(o.assignment),
        Solution::Infeasible => Feasibility::Infeasible,
        Solution::Unbounded => unreachable!("zero objective is bounded"),
    })
}

/// Reduced row echelon solve of `A x = b`; free columns are set to zero.
pub fn solve_equalities(rows: &[Vec<Rational>], rhs: &[Rational], n: usize) -> Option<Vec<Rational>> {
    let mut a: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &factor * p;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    if a[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][n].clone();
    }
    Some(x)
}

fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter()
        .zip(x)
        .filter(|(a, _)| !a.is_zero())
        .fold(Rational::zero(), |acc, (a, x)| acc + a * x)
}

/// How an original variable is expressed through non-negative columns.
#[derive(Debug, Clone)]
enum VarMap {
    /// `x = lower + s`
    Shift { col: usize, lower: Rational },
    /// `x = upper - s`
    Flip { col: usize, upper: Rational },
    /// `x = s⁺ - s⁻`
    Split { pos: usize, neg: usize },
}

/// `min cᵀs` subject to rows `A s (rel) b` with `b ≥ 0` and `s ≥ 0`.
struct StandardForm {
    vars: Vec<VarMap>,
    num_cols: usize,
    rows: Vec<Vec<Rational>>,
    relations: Vec<Relation>,
    rhs: Vec<Rational>,
    /// `-1` where the original row was negated to make its right side non-negative.
    signs: Vec<i8>,
    cost: Vec<Rational>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut vars = Vec::with_capacity(lp.num_vars());
        let mut num_cols = 0;
        for j in 0..lp.num_vars() {
            let map = match (&lp.lower[j], &lp.upper[j]) {
                (Some(l), _) => VarMap::Shift { col: num_cols, lower: l.clone() },
                (None, Some(u)) => VarMap::Flip { col: num_cols, upper: u.clone() },
                (None, None) => {
                    num_cols += 1;
                    VarMap::Split { pos: num_cols - 1, neg: num_cols }
                }
            };
            num_cols += 1;
            vars.push(map);
        }
        let min_cost: Vec<Rational> = match lp.direction {
            Direction::Minimize => lp.objective.clone(),
            Direction::Maximize => lp.objective.iter().map(|c| -c).collect(),
        };
        let mut cost = vec![Rational::zero(); num_cols];
        for (j, map) in vars.iter().enumerate() {
            match map {
                VarMap::Shift { col, .. } => cost[*col] = min_cost[j].clone(),
                VarMap::Flip { col, .. } => cost[*col] = -&min_cost[j],
                VarMap::Split { pos, neg } => {
                    cost[*pos] = min_cost[j].clone();
                    cost[*neg] = -&min_cost[j];
                }
            }
        }

        let mut form = StandardForm {
            vars,
            num_cols,
            rows: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
            signs: Vec::new(),
            cost,
        };
        for c in &lp.constraints {
            let (row, rhs) = form.translate(&c.coeffs, &c.rhs);
            form.push_row(row, c.relation, rhs);
        }
        for j in 0..lp.num_vars() {
            if let (VarMap::Shift { col, lower }, Some(u)) = (&form.vars[j], &lp.upper[j]) {
                let mut row = vec![Rational::zero(); num_cols];
                row[*col] = Rational::one();
                let rhs = u - lower;
                form.push_row(row, Relation::Le, rhs);
            }
        }
        form
    }

    fn translate(&self, coeffs: &[Rational], rhs: &Rational) -> (Vec<Rational>, Rational) {
        let mut row = vec![Rational::zero(); self.num_cols];
        let mut b = rhs.clone();
        for (a, map) in coeffs.iter().zip(&self.vars) {
            if a.is_zero() {
                continue;
            }
            match map {
                VarMap::Shift { col, lower } => {
                    row[*col] = a.clone();
                    b -= a * lower;
                }
                VarMap::Flip { col, upper } => {
                    row[*col] = -a;
                    b -= a * upper;
                }
                VarMap::Split { pos, neg } => {
                    row[*pos] = a.clone();
                    row[*neg] = -a;
                }
            }
        }
        (row, b)
    }

    fn push_row(&mut self, mut row: Vec<Rational>, mut relation: Relation, mut rhs: Rational) {
        let mut sign = 1;
        if rhs.is_negative() {
            row.iter_mut().for_each(|v| *v = -&*v);
            rhs = -rhs;
            relation = relation.flipped();
            sign = -1;
        }
        self.rows.push(row);
        self.relations.push(relation);
        self.rhs.push(rhs);
        self.signs.push(sign);
    }

    fn original_value(&self, s: &[Rational]) -> Vec<Rational> {
        self.vars
            .iter()
            .map(|map| match map {
                VarMap::Shift { col, lower } => lower + &s[*col],
                VarMap::Flip { col, upper } => upper - &s[*col],
                VarMap::Split { pos, neg } => &s[*pos] - &s[*neg],
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum Outcome {
    Optimal,
    Unbounded,
}

/// Columns are laid out as structural, then slack, then one artificial per row.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    reduced: Vec<Rational>,
    first_artificial: usize,
}

impl Tableau {
    fn new(form: &StandardForm) -> Self {
        let m = form.rows.len();
        let slacks = form.relations.iter().filter(|r| **r != Relation::Eq).count();
        let first_artificial = form.num_cols + slacks;
        let width = first_artificial + m;
        let mut rows = Vec::with_capacity(m);
        let mut slack = form.num_cols;
        for (i, src) in form.rows.iter().enumerate() {
            let mut row = src.clone();
            row.resize(width, Rational::zero());
            match form.relations[i] {
                Relation::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[first_artificial + i] = Rational::one();
            rows.push(row);
        }
        Tableau {
            rows,
            rhs: form.rhs.clone(),
            basis: (first_artificial..first_artificial + m).collect(),
            reduced: vec![Rational::zero(); width],
            first_artificial,
        }
    }

    fn width(&self) -> usize {
        self.reduced.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.first_artificial
    }

    fn set_costs(&mut self, cost: &[Rational]) {
        let mut d = cost.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (dj, a) in d.iter_mut().zip(row) {
                if !a.is_zero() {
                    *dj -= cb * a;
                }
            }
        }
        self.reduced = d;
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.rows[r][e].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i].is_empty() || self.rows[i][e].is_zero() {
                continue;
            }
            let factor = self.rows[i][e].clone();
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        if !self.reduced[e].is_zero() {
            let factor = self.reduced[e].clone();
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                self.reduced[j] -= delta;
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = e;
    }

    /// Bland's rule: lowest-index improving column, ties in the ratio test
    /// broken by the lowest basic index.
    fn optimize(&mut self, phase: Phase, mut trace: Option<&mut String>) -> Outcome {
        loop {
            if let Some(out) = trace.as_deref_mut() {
                self.dump(out, phase);
            }
            let limit = match phase {
                Phase::One => self.width(),
                Phase::Two => self.first_artificial,
            };
            let Some(e) = (0..limit).find(|&j| self.reduced[j].is_negative()) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, e),
                None => return Outcome::Unbounded,
            }
        }
    }

    /// Pivots zero-level artificials out of the basis where possible. Rows
    /// where no other column is available are redundant and stay inert.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if !self.is_artificial(self.basis[i]) {
                continue;
            }
            if let Some(j) = (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                self.pivot(i, j);
            }
        }
    }

    fn basic_values(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.width()];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        x
    }

    fn dump(&self, out: &mut String, phase: Phase) {
        let _ = writeln!(out, "phase {:?}, basis {:?}", phase, self.basis);
        let row_text = |row: &[Rational]| row.iter().map(format_rational).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "  d: {}", row_text(&self.reduced));
        for (row, b) in self.rows.iter().zip(&self.rhs) {
            let _ = writeln!(out, "  {} | {}", row_text(row), format_rational(b));
        }
    }
}

fn solve_inner(lp: &LinearProgram, mut trace: Option<&mut String>) -> Result<Solution> {
    lp.validate()?;
    if !lp.bounds_consistent() {
        return Ok(Solution::Infeasible);
    }
    let form = StandardForm::build(lp);
    let mut tableau = Tableau::new(&form);
    let width = tableau.width();

    let mut phase_one = vec![Rational::zero(); width];
    phase_one[tableau.first_artificial..].iter_mut().for_each(|c| *c = Rational::one());
    tableau.set_costs(&phase_one);
    tableau.optimize(Phase::One, trace.as_deref_mut());
    let values = tableau.basic_values();
    if values[tableau.first_artificial..].iter().any(|v| !v.is_zero()) {
        return Ok(Solution::Infeasible);
    }
    tableau.drive_out_artificials();

    let mut cost = form.cost.clone();
    cost.resize(width, Rational::zero());
    tableau.set_costs(&cost);
    if let Outcome::Unbounded = tableau.optimize(Phase::Two, trace) {
        return Ok(Solution::Unbounded);
    }

    let s = tableau.basic_values();
    let x = form.original_value(&s[..form.num_cols]);
    if !lp.is_feasible_point(&x) {
        return Err(Error::Internal("simplex point fails re-substitution".into()));
    }
    let m = lp.constraints.len();
    let flip = match lp.direction {
        Direction::Minimize => 1,
        Direction::Maximize => -1,
    };
    let duals: Vec<Rational> = (0..m)
        .map(|i| {
            let y = -&tableau.reduced[tableau.first_artificial + i];
            y * int(form.signs[i] as i64 * flip)
        })
        .collect();
    let value = lp.objective_value(&x);
    if !verify_dual(lp, &duals, &value) {
        return Err(Error::Internal("dual certificate does not match the primal optimum".into()));
    }
    Ok(Solution::Optimal(Optimum {
        value,
        assignment: x,
        duals,
    }))
}

/// Checks that `duals` certify `value` as a bound on the optimum.
///
/// For a minimization, multipliers of `≥` rows must be non-negative, of `≤`
/// rows non-positive, and the reduced costs `r = c - Aᵀy` must be paid for by
/// finite bounds; the certified bound `bᵀy + Σ min(r_j l_j, r_j u_j)` must
/// equal `value`. Maximizations are checked on the negated program.
pub fn verify_dual(lp: &LinearProgram, duals: &[Rational], value: &Rational) -> bool {
    if duals.len() != lp.constraints.len() {
        return false;
    }
    let sign = match lp.direction {
        Direction::Minimize => int(1),
        Direction::Maximize => int(-1),
    };
    let y: Vec<Rational> = duals.iter().map(|d| d * &sign).collect();
    let c: Vec<Rational> = lp.objective.iter().map(|c| c * &sign).collect();
    let target = value * &sign;

    let mut bound = Rational::zero();
    let mut reduced = c;
    for (con, yi) in lp.constraints.iter().zip(&y) {
        let ok = match con.relation {
            Relation::Ge => !yi.is_negative(),
            Relation::Le => !yi.is_positive(),
            Relation::Eq => true,
        };
        if !ok {
            return false;
        }
        if yi.is_zero() {
            continue;
        }
        bound += &con.rhs * yi;
        for (r, a) in reduced.iter_mut().zip(&con.coeffs) {
            if !a.is_zero() {
                *r -= a * yi;
            }
        }
    }
    for (j, r) in reduced.iter().enumerate() {
        if r.is_positive() {
            match &lp.lower[j] {
                Some(l) => bound += r * l,
                None => return false,
            }
        } else if r.is_negative() {
            match &lp.upper[j] {
                Some(u) => bound += r * u,
                None => return false,
            }
        }
    }
    bound == target
}
