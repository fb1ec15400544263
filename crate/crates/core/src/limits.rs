//! Finite-k data for composition limits `M*(f) = lim M(f^k)^{1/k}`.
//!
//! Values `M(f^k)` are exact; only the k-th roots are approximated, by
//! integer root extraction to within 10⁻⁹.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::boolfn::{compose_with_cap, power_with_cap, PartialFunction, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::measures::{self, Measure};
use crate::ratlp::{format_rational, int, Rational};

const DIGITS: u32 = 9;

fn scale() -> BigInt {
    BigInt::from(10u64.pow(DIGITS))
}

/// `v^{1/k}` bracketed as `lo ≤ v^{1/k} ≤ hi` with `hi - lo ≤ 10⁻⁹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    pub lo: Rational,
    pub hi: Rational,
}

impl Root {
    pub fn of(v: &Rational, k: u32) -> Root {
        assert!(k > 0 && !v.is_negative(), "root of a negative value or of order 0");
        let target = v.numer() * scale().pow(k);
        let n = &target / v.denom();
        let a = n.nth_root(k);
        let exact = a.pow(k) * v.denom() == target;
        let lo = Rational::new(a.clone(), scale());
        let hi = if exact {
            lo.clone()
        } else {
            Rational::new(a + 1, scale())
        };
        Root { lo, hi }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn to_f64(&self) -> f64 {
        let lo = self.lo.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
        lo / 10f64.powi(DIGITS as i32)
    }
}

impl std::fmt::Display for Root {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", decimal(&self.lo))?;
        if !self.is_exact() {
            f.write_str(" ±1e-9")?;
        }
        Ok(())
    }
}

/// Renders a rational whose denominator divides `10⁹` with nine decimals.
pub fn decimal(r: &Rational) -> String {
    let units = (r * Rational::from_integer(scale())).floor().to_integer();
    let sign = if units.is_negative() { "-" } else { "" };
    let units = units.abs();
    let whole = &units / scale();
    let frac = &units % scale();
    format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = DIGITS as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitEntry {
    pub k: usize,
    pub value: Rational,
    pub root: Root,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSequence {
    pub measure: Measure,
    pub function: String,
    pub epsilon: Option<Rational>,
    pub entries: Vec<LimitEntry>,
    /// The first `k` that could not be computed, and why.
    pub stopped: Option<(usize, Error)>,
}

#[derive(Debug, Clone, Copy)]
pub struct SequenceOptions<'a> {
    pub epsilon: &'a Rational,
    pub cap: u64,
}

/// `M(f^k)` for `k = 1..=k_max`, stopping at the first `k` whose power or
/// measure cannot be computed.
pub fn sequence(measure: Measure, f: &PartialFunction, label: &str, k_max: usize, opts: SequenceOptions) -> Result<LimitSequence> {
    let mut entries = Vec::new();
    let mut stopped = None;
    let mut power = f.clone();
    for k in 1..=k_max {
        if k > 1 {
            match compose_with_cap(f, &power, opts.cap) {
                Ok(p) => power = p,
                Err(e) => {
                    stopped = Some((k, e));
                    break;
                }
            }
        }
        match measures::value(measure, &power, opts.epsilon) {
            Ok(value) => {
                let root = Root::of(&value, k as u32);
                entries.push(LimitEntry { k, value, root });
            }
            Err(e) => {
                stopped = Some((k, e));
                break;
            }
        }
    }
    if entries.is_empty() {
        return Err(stopped.map(|(_, e)| e).unwrap_or_else(|| Error::invalid("k_max must be at least 1")));
    }
    Ok(LimitSequence {
        measure,
        function: label.to_string(),
        epsilon: measure.uses_epsilon().then(|| opts.epsilon.clone()),
        entries,
        stopped,
    })
}

/// What is known about `M(f∘g)` for a measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositionLaw {
    /// `M(f∘g) ≤ M(f)·M(g)`.
    pub submultiplicative: &'static str,
    /// `M(f∘g) ≥ M(f)`, and the condition on `g` it needs.
    pub floor: &'static str,
    pub floor_needs_positive_inner: bool,
    /// `M(f^k) = M(f)^k` for total `f`.
    pub multiplicative_on_total: Option<&'static str>,
}

pub fn composition_law(m: Measure) -> Option<CompositionLaw> {
    let floor = "strongly well-behaved measures satisfy M(f∘g) ≥ M(f) for non-constant g";
    match m {
        Measure::D => Some(CompositionLaw {
            submultiplicative: "run a tree for g at every query of a tree for f",
            floor,
            floor_needs_positive_inner: false,
            multiplicative_on_total: Some("D(f∘g) = D(f)·D(g) for total functions (Tal; Montanaro)"),
        }),
        Measure::C => Some(CompositionLaw {
            submultiplicative: "certify f, then certify g on each certified block",
            floor,
            floor_needs_positive_inner: false,
            multiplicative_on_total: None,
        }),
        Measure::Fbs => Some(CompositionLaw {
            submultiplicative: "compose fractional certificates",
            floor,
            floor_needs_positive_inner: false,
            multiplicative_on_total: None,
        }),
        Measure::Deg => Some(CompositionLaw {
            submultiplicative: "compose interpolating polynomials",
            floor,
            floor_needs_positive_inner: false,
            multiplicative_on_total: None,
        }),
        Measure::S => Some(CompositionLaw {
            submultiplicative: "a sensitive bit of f∘g is a sensitive bit of g inside a sensitive block of f",
            floor: "s(f∘g) ≥ s(f) when s(g) > 0",
            floor_needs_positive_inner: true,
            multiplicative_on_total: None,
        }),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitBounds {
    pub lower: Rational,
    pub upper: Rational,
    pub justification: Vec<String>,
}

/// Rigorous bounds on `M*(f)` from a computed sequence.
pub fn bounds(seq: &LimitSequence, f: &PartialFunction) -> Result<LimitBounds> {
    let law = composition_law(seq.measure).ok_or_else(|| Error::UnsupportedMeasure(seq.measure.to_string()))?;
    if f.is_constant() {
        return Ok(LimitBounds {
            lower: Rational::zero(),
            upper: Rational::zero(),
            justification: vec!["constant function: every power is constant and M = 0".into()],
        });
    }
    let mut justification = Vec::new();
    let best = seq
        .entries
        .iter()
        .min_by(|a, b| a.root.hi.cmp(&b.root.hi))
        .expect("sequence is non-empty");
    let mut upper = best.root.hi.clone();
    justification.push(format!(
        "upper: M(f^(i+j)) ≤ M(f^i)·M(f^j) ({}), so M* = inf_k M(f^k)^(1/k) ≤ M(f^{})^(1/{})",
        law.submultiplicative, best.k, best.k
    ));

    let first = &seq.entries[0].value;
    let mut lower = Rational::zero();
    if *first >= Rational::one() {
        lower = Rational::one();
        justification.push(format!(
            "lower: {}; M(f^k) ≥ M(f) ≥ 1 for every k, so M* ≥ 1",
            law.floor
        ));
    } else if law.floor_needs_positive_inner {
        justification.push("lower: M(f) = 0, so M(f^k) ≤ M(f)^k = 0 and M* = 0".into());
        upper = Rational::zero();
    }
    if let Some(cite) = law.multiplicative_on_total {
        if f.is_total() {
            lower = first.clone();
            justification.push(format!("lower: {cite}, so M* = M(f)"));
        }
    }
    if lower > upper {
        return Err(Error::Internal(format!(
            "lower bound {} exceeds upper bound {}",
            format_rational(&lower),
            format_rational(&upper)
        )));
    }
    Ok(LimitBounds {
        lower,
        upper,
        justification,
    })
}

/// Sequence and bounds in one call.
pub fn sandwich(measure: Measure, f: &PartialFunction, k_max: usize, opts: SequenceOptions) -> Result<(LimitSequence, LimitBounds)> {
    if composition_law(measure).is_none() {
        return Err(Error::UnsupportedMeasure(measure.to_string()));
    }
    let seq = sequence(measure, f, "f", k_max, opts)?;
    let b = bounds(&seq, f)?;
    Ok((seq, b))
}

impl LimitSequence {
    pub fn to_json(&self, bounds: Option<&LimitBounds>) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "k": e.k,
                    "value": format_rational(&e.value),
                    "root": decimal(&e.root.lo),
                    "root_error": if e.root.is_exact() { "0" } else { "1e-9" },
                })
            })
            .collect();
        let mut out = json!({
            "measure": self.measure.to_string(),
            "function": self.function,
            "entries": entries,
        });
        if let Some(eps) = &self.epsilon {
            out["epsilon"] = json!(format_rational(eps));
        }
        if let Some((k, e)) = &self.stopped {
            out["stopped"] = json!({"k": k, "reason": e.to_string()});
        }
        if let Some(b) = bounds {
            out["bounds"] = json!({
                "lower": decimal(&b.lower),
                "upper": decimal(&b.upper),
                "justification": b.justification,
            });
        }
        out
    }

    /// Plot-ready rows: `k,value,root,root_hi,lower,upper`.
    pub fn to_csv(&self, bounds: Option<&LimitBounds>) -> String {
        let mut out = String::from("k,value,root,root_hi,lower,upper\n");
        let (lo, hi) = match bounds {
            Some(b) => (decimal(&b.lower), decimal(&b.upper)),
            None => (String::new(), String::new()),
        };
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.k,
                format_rational(&e.value),
                decimal(&e.root.lo),
                decimal(&e.root.hi),
                lo,
                hi
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarReport {
    pub checks: Vec<StarCheck>,
}

impl StarReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.all_passed(),
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}

/// Finite-k instances of the star calculus for measures `m` and `n`:
/// power tables agree (`(f^j)^i = f^{ji}`), the sum sequence stays within a
/// factor 2 of the max sequence, scaling by `c` scales roots by `c^{1/k}`,
/// and submultiplicative measures satisfy `M(f^{2k}) ≤ M(f^k)²`.
pub fn star_calculus_check(
    f: &PartialFunction,
    k_max: usize,
    m: Measure,
    n: Measure,
    c: &Rational,
    opts: SequenceOptions,
) -> Result<StarReport> {
    let mut checks = Vec::new();
    let mut powers = vec![crate::boolfn::identity()];
    for k in 1..=k_max {
        powers.push(compose_with_cap(f, &powers[k - 1], opts.cap)?);
    }
    let mut mv = vec![Rational::zero()];
    let mut nv = vec![Rational::zero()];
    for p in &powers[1..] {
        mv.push(measures::value(m, p, opts.epsilon)?);
        nv.push(measures::value(n, p, opts.epsilon)?);
    }

    for j in 1..=k_max {
        for i in 2..=k_max / j {
            let nested = power_with_cap(&powers[j], i, opts.cap)?;
            let same = nested == powers[i * j];
            checks.push(StarCheck {
                name: "power table".into(),
                passed: same,
                detail: format!("(f^{j})^{i} = f^{}", i * j),
            });
        }
    }
    for k in 1..=k_max {
        let sum = &mv[k] + &nv[k];
        let max = mv[k].clone().max(nv[k].clone());
        checks.push(StarCheck {
            name: "sum within factor 2".into(),
            passed: max <= sum && sum <= &max * int(2),
            detail: format!(
                "k={k}: {m}+{n} = {}, max = {}",
                format_rational(&sum),
                format_rational(&max)
            ),
        });
        let scaled = Root::of(&(c * &mv[k]), k as u32);
        let rc = Root::of(c, k as u32);
        let rm = Root::of(&mv[k], k as u32);
        let (plo, phi) = (&rc.lo * &rm.lo, &rc.hi * &rm.hi);
        checks.push(StarCheck {
            name: "scaling".into(),
            passed: scaled.lo <= phi && plo <= scaled.hi,
            detail: format!("k={k}: (c·{m})^(1/k) = {} vs c^(1/k)·{m}^(1/k) in [{}, {}]", scaled, decimal(&plo), decimal(&phi)),
        });
    }
    for meas in [m, n] {
        if composition_law(meas).is_none() {
            continue;
        }
        let vals = if meas == m { &mv } else { &nv };
        for k in 1..=k_max / 2 {
            checks.push(StarCheck {
                name: "doubling".into(),
                passed: vals[2 * k] <= &vals[k] * &vals[k],
                detail: format!("{meas}(f^{}) = {} ≤ {meas}(f^{k})² = {}", 2 * k, format_rational(&vals[2 * k]), format_rational(&(&vals[k] * &vals[k]))),
            });
        }
    }
    Ok(StarReport { checks })
}

/// Default options: ε = 1/3 and the default materialization cap.
pub fn default_options(eps: &Rational) -> SequenceOptions<'_> {
    SequenceOptions {
        epsilon: eps,
        cap: DEFAULT_CAP,
    }
}
