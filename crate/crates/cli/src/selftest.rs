//! A fast invariant corpus over every module.

use qlimit_core::boolfn::{compose, identity, maj3, nand2, negate_output, power, pror, switch};
use qlimit_core::lasvegas::{
    exact_expected_cost, last_ratio, run_ak, sample_input, verify_recursive, Evaluator, EvaluatorKind,
};
use qlimit_core::limits::{default_options, sandwich};
use qlimit_core::measures::{self, default_epsilon, randomized_complexity, Flavor, Measure};
use qlimit_core::ratlp::{format_rational, int, verify_dual, Rational};
use qlimit_core::reductions::{self, bs_reduction_witness, decide, is_switchable, Budget, Decision, Mode, Switchability};
use qlimit_core::{PartialFunction, Result};

type Check = (String, bool, String);

fn check(name: &str, r: Result<(bool, String)>) -> Check {
    match r {
        Ok((ok, detail)) => (name.to_string(), ok, detail),
        Err(e) => (name.to_string(), false, format!("error: {e}")),
    }
}

fn nand_measures() -> Result<(bool, String)> {
    let f = nand2();
    let eps = default_epsilon();
    let mut detail = Vec::new();
    let mut ok = true;
    for m in [Measure::C, Measure::D, Measure::S, Measure::Bs, Measure::Fbs, Measure::Deg, Measure::R0] {
        let r = measures::report(m, &f, &eps)?;
        ok &= r.value == int(2) && r.verify(&f);
        detail.push(format!("{m}={}", r.value));
    }
    Ok((ok, detail.join(" ")))
}

fn nand_d_limit() -> Result<(bool, String)> {
    let eps = default_epsilon();
    let (seq, b) = sandwich(Measure::D, &nand2(), 3, default_options(&eps))?;
    let values: Vec<Rational> = seq.entries.iter().map(|e| e.value.clone()).collect();
    Ok((
        values == [int(2), int(4), int(8)] && b.lower == int(2) && b.upper == int(2),
        values.iter().map(format_rational).collect::<Vec<_>>().join(","),
    ))
}

fn reductions_basic() -> Result<(bool, String)> {
    let budget = Budget::default();
    let a = matches!(decide(&identity(), &pror(3), Mode::Weak, &budget)?, Decision::Reducible(ref w) if reductions::verify(w)?);
    let b = matches!(is_switchable(&maj3(), &budget)?, Switchability::Switchable(_));
    let c = matches!(
        is_switchable(&compose(&switch(), &nand2())?, &budget)?,
        Switchability::StronglySwitchable(_)
    );
    let w = bs_reduction_witness(&maj3())?;
    let d = reductions::verify(&w)?;
    Ok((a && b && c && d, format!("I≲PrOR3={a} MAJ3 switchable={b} S∘NAND2 strong={c} bs-witness={d}")))
}

fn randomized_lp() -> Result<(bool, String)> {
    let r = randomized_complexity(&nand2(), &int(0), Flavor::ZeroError)?;
    let opt = r.optimum.clone();
    let dual = verify_dual(&r.program, &opt.duals, &opt.value);
    let s = randomized_complexity(&switch(), &int(0), Flavor::Expected)?;
    Ok((
        r.value == int(2) && s.value == int(1) && dual,
        format!("R0(NAND2)={} R̄0(S)={} dual={dual}", r.value, s.value),
    ))
}

fn zero_error(f: &PartialFunction, kind: EvaluatorKind, k: usize, trials: u64) -> Result<(bool, String)> {
    let e = Evaluator::new(kind, f)?;
    let (mut bots, mut bad) = (0, 0);
    for t in 0..trials {
        let mut x = sample_input(f, k, t % 2 == 1, t)?;
        let run = run_ak(f, k, &mut x, &e, t.wrapping_mul(31) + 1, false)?;
        match run.certificate() {
            Some(c) if !verify_recursive(f, k, c, &mut x) => bad += 1,
            Some(_) => {}
            None => bots += 1,
        }
    }
    Ok((bad == 0 && 2 * bots <= trials, format!("{trials} trials, {bots} bot, {bad} invalid")))
}

fn exact_costs() -> Result<(bool, String)> {
    let t = exact_expected_cost(EvaluatorKind::DirectionalNand, &nand2(), 30)?;
    let r: f64 = ratio_f64(&last_ratio(&t).unwrap());
    let target = (1.0 + 33f64.sqrt()) / 4.0;
    Ok(((r - target).abs() < 1e-3, format!("ratio {r:.6}")))
}

fn ratio_f64(r: &Rational) -> f64 {
    r.numer().to_string().parse::<f64>().unwrap() / r.denom().to_string().parse::<f64>().unwrap()
}

fn negation_invariance() -> Result<(bool, String)> {
    let f = power(&nand2(), 2)?;
    let g = negate_output(&f);
    let eps = default_epsilon();
    let mut ok = true;
    for m in [Measure::D, Measure::C, Measure::S, Measure::Bs, Measure::Deg] {
        ok &= measures::value(m, &f, &eps)? == measures::value(m, &g, &eps)?;
    }
    Ok((ok, "D C s bs deg on NAND2^2".into()))
}

pub fn run() -> Vec<Check> {
    vec![
        check("nand2-measures", nand_measures()),
        check("nand2-decision-tree-limit", nand_d_limit()),
        check("reductions", reductions_basic()),
        check("randomized-lp", randomized_lp()),
        check("zero-error-nand2", zero_error(&nand2(), EvaluatorKind::DirectionalNand, 5, 300)),
        check("zero-error-maj3", zero_error(&maj3(), EvaluatorKind::NaiveMaj3, 4, 300)),
        check("nand2-exact-cost", exact_costs()),
        check("output-negation", negation_invariance()),
    ]
}
