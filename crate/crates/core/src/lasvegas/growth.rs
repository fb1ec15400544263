//! Monte-Carlo growth of the cost of `A_k` over sampled inputs.

use rand::RngCore;
use serde_json::{json, Value};

use super::{derived_rng, run_ak, sample_input_with, verify_recursive, Evaluator, Generator, PRNG};
use crate::boolfn::PartialFunction;
use crate::error::Result;
use crate::measures::certificate_value;

const TRIAL_STREAM: u64 = 2;

#[derive(Debug, Clone)]
pub struct GrowthOptions {
    pub k_min: usize,
    pub k_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub generator: Generator,
    pub threads: usize,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            k_min: 1,
            k_max: 4,
            trials: 100,
            seed: 0,
            generator: Generator::Uniform,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub k: usize,
    pub trials: usize,
    pub mean_queries: f64,
    /// Mean of queries plus the flattened certificate size.
    pub mean_cost: f64,
    pub bot_rate: f64,
    /// `q̂_k / q̂_{k−1}` when the previous row exists.
    pub ratio: Option<f64>,
    /// Certificates that failed `verify_recursive`; zero for a correct run.
    pub invalid: usize,
    pub mean_estimate_queries: f64,
    /// `ê_k + C(f)(2 + log₂ C(f)) q̂_{k−1}` with measured `ê_k` and `q̂_{k−1}`.
    pub bound: Option<f64>,
    pub max_repetitions: u32,
}

impl GrowthRow {
    pub fn within_bound(&self) -> Option<bool> {
        self.bound.map(|b| self.mean_queries <= b)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "trials": self.trials,
            "mean_q": self.mean_queries,
            "mean_cost": self.mean_cost,
            "bot_rate": self.bot_rate,
            "ratio": self.ratio,
            "invalid": self.invalid,
            "mean_estimate_q": self.mean_estimate_queries,
            "bound": self.bound,
            "within_bound": self.within_bound(),
            "repetitions": self.max_repetitions,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub evaluator: String,
    pub seed: u64,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,trials,mean_q,bot_rate,ratio\n");
        for r in &self.rows {
            let ratio = r.ratio.map(|x| format!("{x:.6}")).unwrap_or_default();
            s.push_str(&format!("{},{},{:.6},{:.6},{}\n", r.k, r.trials, r.mean_queries, r.bot_rate, ratio));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "evaluator": self.evaluator,
            "seed": self.seed,
            "prng": PRNG,
            "rows": self.rows.iter().map(GrowthRow::to_json).collect::<Vec<_>>(),
        })
    }
}

struct Trial {
    queries: u64,
    estimate: u64,
    size: usize,
    bot: bool,
    valid: bool,
    repetitions: u32,
}

fn trial(f: &PartialFunction, k: usize, evaluator: &Evaluator, opts: &GrowthOptions, t: usize) -> Result<Trial> {
    let mut rng = derived_rng(opts.seed, [TRIAL_STREAM, k as u64, t as u64]);
    let (input_seed, alg_seed) = (rng.next_u64(), rng.next_u64());
    let want = t % 2 == 1;
    let root = if f.preimage(want).is_empty() { !want } else { want };
    let mut x = sample_input_with(f, k, root, input_seed, opts.generator)?;
    let run = run_ak(f, k, &mut x, evaluator, alg_seed, false)?;
    let (size, valid) = match run.certificate() {
        Some(c) => (c.size(f.arity()), verify_recursive(f, k, c, &mut x)),
        None => (0, true),
    };
    Ok(Trial {
        queries: run.queries,
        estimate: run.estimate_queries,
        size,
        bot: run.is_bot(),
        valid,
        repetitions: run.repetitions,
    })
}

fn run_trials(f: &PartialFunction, k: usize, evaluator: &Evaluator, opts: &GrowthOptions) -> Result<Vec<Trial>> {
    let threads = opts.threads.clamp(1, opts.trials.max(1));
    if threads == 1 {
        return (0..opts.trials).map(|t| trial(f, k, evaluator, opts, t)).collect();
    }
    let chunk = opts.trials.div_ceil(threads);
    let parts: Vec<Result<Vec<Trial>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|i| {
                s.spawn(move || {
                    (i * chunk..((i + 1) * chunk).min(opts.trials))
                        .map(|t| trial(f, k, evaluator, opts, t))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial thread panicked")).collect()
    });
    let mut out = Vec::with_capacity(opts.trials);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// One row per `k` in `k_min..=k_max`; the root values alternate between
/// trials so both outputs are sampled equally often.
pub fn growth_report(f: &PartialFunction, evaluator: &Evaluator, opts: &GrowthOptions) -> Result<GrowthReport> {
    let mut report = GrowthReport {
        evaluator: evaluator.kind().name().to_string(),
        seed: opts.seed,
        rows: Vec::new(),
    };
    if opts.trials == 0 {
        return Ok(report);
    }
    let c = certificate_value(f).max(1) as f64;
    let factor = c * (2.0 + c.log2());
    let mut prev: Option<f64> = None;
    for k in opts.k_min.max(1)..=opts.k_max {
        let trials = run_trials(f, k, evaluator, opts)?;
        let n = trials.len() as f64;
        let mean = |g: &dyn Fn(&Trial) -> f64| trials.iter().map(g).sum::<f64>() / n;
        let mean_queries = mean(&|t| t.queries as f64);
        let mean_estimate_queries = mean(&|t| t.estimate as f64);
        report.rows.push(GrowthRow {
            k,
            trials: trials.len(),
            mean_queries,
            mean_cost: mean(&|t| (t.queries as usize + t.size) as f64),
            bot_rate: mean(&|t| t.bot as u8 as f64),
            ratio: prev.map(|p| mean_queries / p),
            invalid: trials.iter().filter(|t| !t.valid).count(),
            mean_estimate_queries,
            bound: prev.map(|p| mean_estimate_queries + factor * p),
            max_repetitions: trials.iter().map(|t| t.repetitions).max().unwrap_or(1),
        });
        prev = Some(mean_queries);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::nand2;
    use crate::lasvegas::EvaluatorKind;

    #[test]
    fn empty_when_no_trials() {
        let f = nand2();
        let e = Evaluator::new(EvaluatorKind::DirectionalNand, &f).unwrap();
        let opts = GrowthOptions {
            trials: 0,
            ..Default::default()
        };
        let r = growth_report(&f, &e, &opts).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.to_csv(), "k,trials,mean_q,bot_rate,ratio\n");
    }

    #[test]
    fn threads_do_not_change_results() {
        let f = nand2();
        let e = Evaluator::new(EvaluatorKind::DirectionalNand, &f).unwrap();
        let mut opts = GrowthOptions {
            k_max: 5,
            trials: 200,
            seed: 4,
            ..Default::default()
        };
        let a = growth_report(&f, &e, &opts).unwrap();
        opts.threads = 3;
        assert_eq!(a, growth_report(&f, &e, &opts).unwrap());
        for r in &a.rows {
            assert_eq!(r.invalid, 0);
            assert!(r.bot_rate <= 0.5);
            assert_eq!(r.within_bound(), if r.k == 1 { None } else { Some(true) });
        }
    }
}
