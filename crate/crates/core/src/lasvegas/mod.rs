//! The recursive zero-error algorithm `A_k` on lazily sampled inputs of `f^k`.
//!
//! The tree for `f^k` has `n^d` nodes at depth `d`; node `(d, i)` has children
//! `(d + 1, n·i + j)` for `j < n`, and the leaves sit at depth `k`. Leaf `i`
//! is bit `i` of the composed input.

mod cost;
mod growth;

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde_json::{json, Value};

use crate::boolfn::{self as catalog, bit, PartialAssignment, PartialFunction};
use crate::error::{Error, Result};
use crate::measures::{certificate_complexity, randomized_complexity, CertificateReport, DecisionTree, Flavor};
use crate::ratlp::{rat, Rational};

pub use cost::{exact_expected_cost, last_ratio, CostLevel};
pub use growth::{growth_report, GrowthOptions, GrowthReport, GrowthRow};

/// Identifier of the generator behind every random choice.
pub const PRNG: &str = "ChaCha8";

/// A generator seeded from a base seed and a few stream labels.
pub(crate) fn derived_rng(seed: u64, labels: [u64; 3]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    for (i, l) in labels.iter().enumerate() {
        key[8 * (i + 1)..8 * (i + 2)].copy_from_slice(&l.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

const INPUT_STREAM: u64 = 0;
const ALGORITHM_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub depth: usize,
    pub index: u64,
}

impl Node {
    pub const ROOT: Node = Node { depth: 0, index: 0 };

    pub fn child(self, n: usize, j: usize) -> Node {
        Node {
            depth: self.depth + 1,
            index: self.index * n as u64 + j as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Generator {
    /// Each node draws its children uniformly from `f⁻¹(v)`.
    #[default]
    Uniform,
    /// Each node draws uniformly from the patterns in `f⁻¹(v)` with the fewest
    /// minimum-size certificates (for NAND₂: the one-zero-child patterns).
    Adversarial,
}

/// A composed input `x ∈ Dom(f^k)` that is sampled top-down on demand.
#[derive(Debug, Clone)]
pub struct LazyComposedInput {
    f: PartialFunction,
    k: usize,
    root: bool,
    seed: u64,
    patterns: [Vec<u64>; 2],
    memo: FxHashMap<Node, u64>,
}

pub fn sample_input(f: &PartialFunction, k: usize, root: bool, seed: u64) -> Result<LazyComposedInput> {
    sample_input_with(f, k, root, seed, Generator::Uniform)
}

pub fn sample_input_with(
    f: &PartialFunction,
    k: usize,
    root: bool,
    seed: u64,
    generator: Generator,
) -> Result<LazyComposedInput> {
    if f.preimage(root).is_empty() {
        return Err(Error::UnattainableValue(root as u8));
    }
    leaf_count(f.arity(), k)?;
    let patterns = match generator {
        Generator::Uniform => [f.preimage(false), f.preimage(true)],
        Generator::Adversarial => {
            let report = certificate_complexity(f);
            [hard_patterns(f, &report, false), hard_patterns(f, &report, true)]
        }
    };
    Ok(LazyComposedInput {
        f: f.clone(),
        k,
        root,
        seed,
        patterns,
        memo: FxHashMap::default(),
    })
}

fn leaf_count(n: usize, k: usize) -> Result<u64> {
    u32::try_from(k)
        .ok()
        .and_then(|k| (n as u64).checked_pow(k))
        .ok_or_else(|| Error::invalid(format!("{n}^{k} leaves do not fit in 64 bits")))
}

fn hard_patterns(f: &PartialFunction, report: &CertificateReport, v: bool) -> Vec<u64> {
    let scored: Vec<(u64, usize)> = f
        .preimage(v)
        .into_iter()
        .map(|x| (x, count_min_certificates(f, x, report.certificate(x).unwrap().size())))
        .collect();
    let best = scored.iter().map(|s| s.1).min().unwrap_or(0);
    scored.into_iter().filter(|s| s.1 == best).map(|s| s.0).collect()
}

fn count_min_certificates(f: &PartialFunction, x: u64, size: usize) -> usize {
    let n = f.arity();
    let v = f.get(x).unwrap();
    (0u64..1 << n)
        .filter(|m| m.count_ones() as usize == size)
        .filter(|&m| f.entries().iter().all(|&(y, w)| w == v || (y ^ x) & m != 0))
        .count()
}

impl LazyComposedInput {
    pub fn function(&self) -> &PartialFunction {
        &self.f
    }

    pub fn depth(&self) -> usize {
        self.k
    }

    pub fn root_value(&self) -> bool {
        self.root
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of nodes whose children have been drawn.
    pub fn materialized(&self) -> usize {
        self.memo.len()
    }

    /// The child-value string of an internal node.
    pub fn children(&mut self, node: Node) -> u64 {
        assert!(node.depth < self.k, "leaves have no children");
        if let Some(&s) = self.memo.get(&node) {
            return s;
        }
        let v = self.value(node);
        let choices = &self.patterns[v as usize];
        let mut rng = derived_rng(self.seed, [INPUT_STREAM, node.depth as u64, node.index]);
        let s = choices[rng.gen_range(0..choices.len())];
        self.memo.insert(node, s);
        s
    }

    pub fn value(&mut self, node: Node) -> bool {
        if node.depth == 0 {
            return self.root;
        }
        let n = self.f.arity() as u64;
        let parent = Node {
            depth: node.depth - 1,
            index: node.index / n,
        };
        bit(self.children(parent), (node.index % n) as usize)
    }

    pub fn leaf(&mut self, index: u64) -> bool {
        self.value(Node { depth: self.k, index })
    }

    /// Every drawn string is in `Dom(f)` with the node's value, and the
    /// drawn nodes evaluate bottom-up to the root value.
    pub fn is_consistent(&mut self) -> bool {
        let mut nodes: Vec<(Node, u64)> = self.memo.iter().map(|(a, b)| (*a, *b)).collect();
        nodes.sort();
        nodes.into_iter().all(|(node, s)| {
            let v = self.value(node);
            let n = self.f.arity();
            let bottom_up = (0..n).all(|j| {
                let c = node.child(n, j);
                c.depth == self.k || !self.memo.contains_key(&c) || self.f.get(self.memo[&c]) == Some(bit(s, j))
            });
            self.f.get(s) == Some(v) && bottom_up
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvaluatorKind {
    /// Recursive evaluation through an optimal bounded-error distribution
    /// for `f`, with majority-vote amplification of every child estimate.
    GenericAmplified,
    /// NAND₂ only: evaluate a random child; stop if it is 0.
    DirectionalNand,
    /// MAJ₃ only: evaluate two random children; on disagreement the third.
    NaiveMaj3,
}

impl EvaluatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EvaluatorKind::GenericAmplified => "generic",
            EvaluatorKind::DirectionalNand => "directional-nand",
            EvaluatorKind::NaiveMaj3 => "naive-maj3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "generic" | "generic-amplified" => Ok(EvaluatorKind::GenericAmplified),
            "directional-nand" | "nand" => Ok(EvaluatorKind::DirectionalNand),
            "naive-maj3" | "maj3" => Ok(EvaluatorKind::NaiveMaj3),
            _ => Err(Error::UnsupportedEvaluator(s.to_string())),
        }
    }
}

/// Error of one run of the generic base distribution at nodes right above
/// the leaves.
fn generic_base_error() -> Rational {
    rat(1, 6)
}

/// An estimator for the value of a subtree of `f^k`.
#[derive(Debug, Clone)]
pub struct Evaluator {
    kind: EvaluatorKind,
    f: PartialFunction,
    /// Base distribution of the generic evaluator with cumulative weights.
    base: Vec<(DecisionTree, f64)>,
}

impl Evaluator {
    pub fn new(kind: EvaluatorKind, f: &PartialFunction) -> Result<Self> {
        let unsupported = || Error::UnsupportedEvaluator(format!("{} does not apply to this function", kind.name()));
        let mut base = Vec::new();
        match kind {
            EvaluatorKind::DirectionalNand if *f != catalog::nand2() => return Err(unsupported()),
            EvaluatorKind::NaiveMaj3 if *f != catalog::maj3() => return Err(unsupported()),
            EvaluatorKind::GenericAmplified => {
                let res = randomized_complexity(f, &generic_base_error(), Flavor::Height)?;
                let mut acc = 0.0;
                for (t, p) in res.algorithm.support {
                    if p.is_zero() {
                        continue;
                    }
                    acc += p.to_f64().unwrap();
                    base.push((t, acc));
                }
            }
            _ => {}
        }
        Ok(Evaluator {
            kind,
            f: f.clone(),
            base,
        })
    }

    pub fn kind(&self) -> EvaluatorKind {
        self.kind
    }

    /// Worst-case error of one run on a subtree of the given height.
    pub fn single_run_error(&self, height: usize) -> Rational {
        match (self.kind, height) {
            (_, 0) | (EvaluatorKind::DirectionalNand | EvaluatorKind::NaiveMaj3, _) => Rational::zero(),
            (EvaluatorKind::GenericAmplified, 1) => generic_base_error(),
            // base error 1/6 plus at most n children each wrong w.p. ≤ 1/(6n)
            (EvaluatorKind::GenericAmplified, _) => rat(1, 3),
        }
    }

    /// Estimates the root of `input` once, returning the estimate and the
    /// number of leaf queries.
    pub fn evaluate(&self, input: &mut LazyComposedInput, seed: u64) -> (bool, u64) {
        let mut ctx = Ctx::new(input, seed, false);
        let k = ctx.input.k;
        let v = self.once(&mut ctx, Node::ROOT, k);
        (v, ctx.queries)
    }

    /// Majority of `repetitions(single_run_error(height), budget)` runs.
    fn estimate(&self, ctx: &mut Ctx, node: Node, height: usize, budget: &Rational) -> (bool, u32) {
        let r = repetitions(&self.single_run_error(height), budget);
        let ones = (0..r).filter(|_| self.once(ctx, node, height)).count() as u32;
        (2 * ones > r, r)
    }

    fn once(&self, ctx: &mut Ctx, node: Node, height: usize) -> bool {
        if height == 0 {
            return ctx.query(node.index);
        }
        let n = self.f.arity();
        match self.kind {
            EvaluatorKind::DirectionalNand => {
                let first = ctx.rng.gen_range(0..2);
                if !self.once(ctx, node.child(n, first), height - 1) {
                    return true;
                }
                !self.once(ctx, node.child(n, 1 - first), height - 1)
            }
            EvaluatorKind::NaiveMaj3 => {
                let skip = ctx.rng.gen_range(0..3);
                let (a, b) = ((skip + 1) % 3, (skip + 2) % 3);
                let va = self.once(ctx, node.child(n, a), height - 1);
                let vb = self.once(ctx, node.child(n, b), height - 1);
                if va == vb {
                    va
                } else {
                    self.once(ctx, node.child(n, skip), height - 1)
                }
            }
            EvaluatorKind::GenericAmplified => {
                let u: f64 = ctx.rng.gen();
                let i = self.base.iter().position(|e| u < e.1).unwrap_or(self.base.len() - 1);
                let budget = rat(1, 6 * n as i64);
                let mut t = &self.base[i].0;
                loop {
                    match t {
                        DecisionTree::Leaf(v) => return *v,
                        DecisionTree::Query { index, zero, one } => {
                            let (v, _) = self.estimate(ctx, node.child(n, *index), height - 1, &budget);
                            t = if v { one } else { zero };
                        }
                    }
                }
            }
        }
    }
}

/// Smallest odd `r` with `exp(−2r(1/2 − e)²) ≤ δ`, the Hoeffding bound on a
/// wrong majority of `r` independent runs with error at most `e`. An exact
/// estimator needs no repetition.
pub fn repetitions(error: &Rational, delta: &Rational) -> u32 {
    if error.is_zero() || error <= delta {
        return 1;
    }
    let e = error.to_f64().unwrap();
    let d = delta.to_f64().unwrap();
    assert!(e < 0.5 && d > 0.0, "amplification needs error < 1/2 and a positive target");
    let gap = 0.5 - e;
    let mut r = 1u32;
    while (-2.0 * r as f64 * gap * gap).exp() > d {
        r += 2;
    }
    r
}

struct Ctx<'a> {
    input: &'a mut LazyComposedInput,
    rng: ChaCha8Rng,
    queries: u64,
    log: Option<Vec<Value>>,
}

impl<'a> Ctx<'a> {
    fn new(input: &'a mut LazyComposedInput, seed: u64, record: bool) -> Self {
        Ctx {
            input,
            rng: derived_rng(seed, [ALGORITHM_STREAM, 0, 0]),
            queries: 0,
            log: record.then(Vec::new),
        }
    }

    fn query(&mut self, leaf: u64) -> bool {
        self.queries += 1;
        let b = self.input.leaf(leaf);
        self.event(|| json!({"event": "query", "leaf": leaf, "bit": b as u8}));
        b
    }

    fn event(&mut self, e: impl FnOnce() -> Value) {
        if let Some(log) = &mut self.log {
            log.push(e());
        }
    }
}

/// The certificate assembled by `A_k`: an outer certificate for `f` at one
/// node together with sub-certificates for the children it fixes. At height
/// one the outer certificate fixes leaves and there are no children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursiveCertificate {
    pub value: bool,
    pub outer: PartialAssignment,
    pub children: Vec<(usize, RecursiveCertificate)>,
}

impl RecursiveCertificate {
    /// The leaf assignment, keyed by leaf index.
    pub fn flatten(&self, n: usize) -> BTreeMap<u64, bool> {
        let mut out = BTreeMap::new();
        self.flatten_into(n, Node::ROOT, &mut out);
        out
    }

    fn flatten_into(&self, n: usize, node: Node, out: &mut BTreeMap<u64, bool>) {
        if self.children.is_empty() {
            for j in self.outer.positions() {
                out.insert(node.child(n, j).index, self.outer.get(j).unwrap());
            }
        }
        for (j, c) in &self.children {
            c.flatten_into(n, node.child(n, *j), out);
        }
    }

    pub fn size(&self, n: usize) -> usize {
        self.flatten(n).len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value as u8,
            "outer": self.outer.to_string(),
            "children": self.children.iter().map(|(j, c)| json!({"position": j + 1, "certificate": c.to_json()})).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Certificate(RecursiveCertificate),
    Bot,
}

#[derive(Debug, Clone)]
pub struct AkRun {
    pub outcome: Outcome,
    pub queries: u64,
    /// Leaf queries spent estimating the root's children.
    pub estimate_queries: u64,
    /// Repetitions per child estimate at the top level.
    pub repetitions: u32,
    pub transcript: Option<Vec<Value>>,
}

impl AkRun {
    pub fn certificate(&self) -> Option<&RecursiveCertificate> {
        match &self.outcome {
            Outcome::Certificate(c) => Some(c),
            Outcome::Bot => None,
        }
    }

    pub fn is_bot(&self) -> bool {
        self.outcome == Outcome::Bot
    }

    /// The transcript as JSON lines.
    pub fn transcript_lines(&self) -> String {
        let mut s = String::new();
        for e in self.transcript.iter().flatten() {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }
}

struct Plan<'e> {
    f: PartialFunction,
    certificates: CertificateReport,
    attempts: u32,
    evaluator: &'e Evaluator,
    budget: Rational,
}

/// Runs `A_k` on `input` with the given evaluator and algorithm seed.
pub fn run_ak(
    f: &PartialFunction,
    k: usize,
    input: &mut LazyComposedInput,
    evaluator: &Evaluator,
    seed: u64,
    record: bool,
) -> Result<AkRun> {
    if k == 0 {
        return Err(Error::invalid("A_k needs k ≥ 1"));
    }
    if input.f != *f || input.k != k {
        return Err(Error::invalid("the input was sampled for a different function or depth"));
    }
    if evaluator.f != *f {
        return Err(Error::UnsupportedEvaluator("the evaluator was built for a different function".into()));
    }
    let certificates = certificate_complexity(f);
    let c = certificates.c.max(1);
    let plan = Plan {
        f: f.clone(),
        attempts: 1 + ceil_log2(c),
        certificates,
        evaluator,
        budget: rat(1, 4 * f.arity() as i64),
    };
    let mut ctx = Ctx::new(input, seed, record);
    let mut top = (0, 1);
    let outcome = match ak(&plan, &mut ctx, Node::ROOT, k, Some(&mut top)) {
        Some(c) => Outcome::Certificate(c),
        None => Outcome::Bot,
    };
    let queries = ctx.queries;
    ctx.event(|| {
        let result = if outcome == Outcome::Bot { "bot" } else { "certificate" };
        json!({"event": "output", "result": result, "queries": queries, "prng": PRNG})
    });
    Ok(AkRun {
        outcome,
        queries,
        estimate_queries: top.0,
        repetitions: top.1,
        transcript: ctx.log,
    })
}

fn ceil_log2(c: usize) -> u32 {
    usize::BITS - (c - 1).leading_zeros()
}

fn ak(plan: &Plan, ctx: &mut Ctx, node: Node, height: usize, top: Option<&mut (u64, u32)>) -> Option<RecursiveCertificate> {
    let f = &plan.f;
    let n = f.arity();
    if height == 1 {
        let z = (0..n).fold(0u64, |z, j| z | (ctx.query(node.child(n, j).index) as u64) << j);
        let value = f.get(z).expect("a composed input restricts to domain strings");
        return Some(RecursiveCertificate {
            value,
            outer: *plan.certificates.certificate(z).unwrap(),
            children: Vec::new(),
        });
    }
    let before = ctx.queries;
    let mut z = 0u64;
    let mut reps = 1;
    for j in 0..n {
        let child = node.child(n, j);
        let (v, r) = plan.evaluator.estimate(ctx, child, height - 1, &plan.budget);
        reps = r;
        ctx.event(|| json!({"event": "estimate", "depth": child.depth, "node": child.index, "value": v as u8, "repetitions": r}));
        z |= (v as u64) << j;
    }
    if let Some(top) = top {
        *top = (ctx.queries - before, reps);
    }
    let value = f.get(z)?;
    let outer = *plan.certificates.certificate(z).unwrap();
    let mut children = Vec::new();
    for j in outer.positions() {
        let child = node.child(n, j);
        let mut found = None;
        for attempt in 1..=plan.attempts {
            if attempt > 1 {
                ctx.event(|| json!({"event": "retry", "depth": child.depth, "node": child.index, "attempt": attempt}));
            }
            found = ak(plan, ctx, child, height - 1, None);
            if found.is_some() {
                break;
            }
        }
        let sub = found?;
        if sub.value != outer.get(j).unwrap() {
            return None;
        }
        children.push((j, sub));
    }
    Some(RecursiveCertificate { value, outer, children })
}

/// Checks `cert` level by level against `f` and the input oracle.
pub fn verify_recursive(f: &PartialFunction, k: usize, cert: &RecursiveCertificate, input: &mut LazyComposedInput) -> bool {
    k >= 1 && input.f == *f && input.k == k && cert.value == input.root && verify_node(f, cert, input, Node::ROOT, k)
}

fn verify_node(f: &PartialFunction, cert: &RecursiveCertificate, input: &mut LazyComposedInput, node: Node, height: usize) -> bool {
    let n = f.arity();
    let c = &cert.outer;
    let consistent: Vec<bool> = f.entries().iter().filter(|e| c.is_contained_in(e.0)).map(|e| e.1).collect();
    if c.arity() != n || consistent.is_empty() || consistent.iter().any(|&v| v != cert.value) {
        return false;
    }
    if height == 1 {
        return cert.children.is_empty() && c.positions().all(|j| input.value(node.child(n, j)) == c.get(j).unwrap());
    }
    let fixed: Vec<usize> = c.positions().collect();
    let covered: Vec<usize> = cert.children.iter().map(|e| e.0).collect();
    fixed == covered
        && cert
            .children
            .iter()
            .all(|(j, sub)| sub.value == c.get(*j).unwrap() && verify_node(f, sub, input, node.child(n, *j), height - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{maj3, nand2, switch};

    #[test]
    fn nand_root_zero_depth_one() {
        let mut x = sample_input(&nand2(), 1, false, 3).unwrap();
        assert_eq!((x.leaf(0), x.leaf(1)), (true, true));
    }

    #[test]
    fn unattainable_root() {
        let f = catalog::constant(2, true).unwrap();
        assert!(matches!(sample_input(&f, 2, false, 0), Err(Error::UnattainableValue(0))));
    }

    #[test]
    fn memoized_leaves() {
        let mut x = sample_input(&nand2(), 20, true, 7).unwrap();
        let leaves = [0u64, 5, 1 << 19, (1 << 20) - 1, 12345];
        let first: Vec<bool> = leaves.iter().map(|&i| x.leaf(i)).collect();
        let mut y = sample_input(&nand2(), 20, true, 7).unwrap();
        let again: Vec<bool> = leaves.iter().rev().map(|&i| y.leaf(i)).collect();
        assert_eq!(first, again.into_iter().rev().collect::<Vec<_>>());
        assert_eq!(first, leaves.iter().map(|&i| x.leaf(i)).collect::<Vec<_>>());
        assert!(x.is_consistent());
    }

    #[test]
    fn switch_children() {
        let mut x = sample_input(&switch(), 5, false, 1).unwrap();
        for i in 0..32 {
            x.leaf(i);
        }
        for d in 0..5 {
            for i in 0..(1u64 << d) {
                let s = x.children(Node { depth: d, index: i });
                assert!(s == 0b01 || s == 0b10);
            }
        }
        assert!(x.is_consistent());
    }

    #[test]
    fn adversarial_patterns() {
        let mut x = sample_input_with(&nand2(), 6, true, 2, Generator::Adversarial).unwrap();
        for i in 0..64 {
            x.leaf(i);
        }
        for (node, s) in x.memo.clone() {
            let v = x.value(node);
            assert_eq!(s.count_ones(), if v { 1 } else { 2 });
        }
        let f = maj3();
        let report = certificate_complexity(&f);
        let mut hard = hard_patterns(&f, &report, true);
        hard.sort();
        assert_eq!(hard, vec![0b011, 0b101, 0b110]);
    }

    #[test]
    fn base_case() {
        let f = nand2();
        let e = Evaluator::new(EvaluatorKind::DirectionalNand, &f).unwrap();
        let mut x = sample_input(&f, 1, false, 0).unwrap();
        let run = run_ak(&f, 1, &mut x, &e, 0, false).unwrap();
        let cert = run.certificate().unwrap();
        assert_eq!(run.queries, 2);
        assert_eq!(cert.flatten(2), BTreeMap::from([(0, true), (1, true)]));
        assert!(verify_recursive(&f, 1, cert, &mut x));
    }

    #[test]
    fn zero_error_and_tamper() {
        for (f, kind) in [(nand2(), EvaluatorKind::DirectionalNand), (maj3(), EvaluatorKind::NaiveMaj3)] {
            let e = Evaluator::new(kind, &f).unwrap();
            for seed in 0..40 {
                let mut x = sample_input(&f, 4, seed % 2 == 0, seed).unwrap();
                let run = run_ak(&f, 4, &mut x, &e, seed, false).unwrap();
                let cert = run.certificate().expect("exact evaluators never fail").clone();
                assert!(verify_recursive(&f, 4, &cert, &mut x));
                let mut bad = cert.clone();
                let mut leaf = &mut bad;
                while !leaf.children.is_empty() {
                    leaf = &mut leaf.children[0].1;
                }
                let j = leaf.outer.positions().next().unwrap();
                leaf.outer = PartialAssignment::new(f.arity(), leaf.outer.mask(), leaf.outer.bits() ^ 1 << j);
                assert!(!verify_recursive(&f, 4, &bad, &mut x));
                let mut flipped = cert;
                flipped.value = !flipped.value;
                assert!(!verify_recursive(&f, 4, &flipped, &mut x));
            }
        }
    }

    #[test]
    fn generic_evaluator_small_depth() {
        let f = nand2();
        let e = Evaluator::new(EvaluatorKind::GenericAmplified, &f).unwrap();
        let mut bots = 0;
        for seed in 0..30 {
            let mut x = sample_input(&f, 3, seed % 2 == 1, 100 + seed).unwrap();
            let run = run_ak(&f, 3, &mut x, &e, seed, false).unwrap();
            match run.certificate() {
                Some(c) => assert!(verify_recursive(&f, 3, c, &mut x)),
                None => bots += 1,
            }
        }
        assert!(bots <= 15);
    }

    #[test]
    fn evaluator_kind_checks() {
        assert!(matches!(
            Evaluator::new(EvaluatorKind::DirectionalNand, &maj3()),
            Err(Error::UnsupportedEvaluator(_))
        ));
        assert!(matches!(EvaluatorKind::parse("quantum"), Err(Error::UnsupportedEvaluator(_))));
    }

    #[test]
    fn repetition_counts() {
        // exp(-2r/36) ≤ 1/8 first holds at r = 38; the next odd count is 39.
        assert_eq!(repetitions(&rat(1, 3), &rat(1, 8)), 39);
        assert_eq!(repetitions(&Rational::zero(), &rat(1, 8)), 1);
        // exp(-2r/9) ≤ 1/12 first holds at r = 12.
        assert_eq!(repetitions(&rat(1, 6), &rat(1, 12)), 13);
    }

    #[test]
    fn transcripts_are_deterministic() {
        let f = nand2();
        let e = Evaluator::new(EvaluatorKind::DirectionalNand, &f).unwrap();
        let go = || {
            let mut x = sample_input(&f, 5, true, 11).unwrap();
            run_ak(&f, 5, &mut x, &e, 99, true).unwrap().transcript_lines()
        };
        let a = go();
        assert_eq!(a, go());
        let last: Value = serde_json::from_str(a.lines().last().unwrap()).unwrap();
        assert_eq!(last["event"], "output");
        assert_eq!(last["prng"], PRNG);
        assert!(a.lines().any(|l| l.contains("\"estimate\"")));
    }
}
