use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qlimit_core::boolfn::{compose_with_cap, power_with_cap, Catalog, DEFAULT_CAP};
use qlimit_core::lasvegas::{
    exact_expected_cost, growth_report, run_ak, sample_input_with, verify_recursive, Evaluator, EvaluatorKind,
    Generator, GrowthOptions, PRNG,
};
use qlimit_core::limits::{bounds, composition_law, sequence, SequenceOptions};
use qlimit_core::measures::{self, Measure};
use qlimit_core::ratlp::{format_rational, parse_rational, Rational};
use qlimit_core::reductions::{self, decide, is_switchable, Budget, Decision, Mode, ReductionWitness, Switchability};
use qlimit_core::{Error, PartialFunction};

mod selftest;

#[derive(Parser, Debug)]
#[command(name = "qlimit", version, about = "Query-complexity measures, reductions and composition limits")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest number of candidate strings materialized by a composition.
    #[arg(long, global = true, env = "QLIMIT_CAP")]
    cap: Option<u64>,
    /// Worker threads for Monte-Carlo trials.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute complexity measures of a function.
    Measure {
        #[arg(long = "fn")]
        function: String,
        #[arg(long = "measure")]
        measures: Vec<String>,
        /// Every measure that applies to the function.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value = "1/3")]
        epsilon: String,
    },
    /// Compose two functions, or raise one to the k-th power.
    Compose {
        #[arg(long = "fn", conflicts_with = "outer")]
        function: Option<String>,
        #[arg(long, requires = "function")]
        k: Option<usize>,
        #[arg(long, requires = "inner")]
        outer: Option<String>,
        #[arg(long)]
        inner: Option<String>,
    },
    /// Search for, or verify, a reduction `from ≲ to`.
    Reduce {
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        #[arg(long, default_value = "weak")]
        mode: String,
        /// Verify this witness file instead of searching.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Decide whether this function is switchable.
        #[arg(long)]
        switchable: Option<String>,
        #[arg(long, default_value_t = 64)]
        max_domain: usize,
        #[arg(long, default_value_t = 2)]
        max_pad: usize,
        #[arg(long, default_value_t = 5_000_000)]
        max_nodes: u64,
    },
    /// The sequence M(f^k) for k = 1..kmax with bounds on its limit.
    Limit {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value = "1/3")]
        epsilon: String,
    },
    /// Run the Las Vegas algorithm on sampled composed inputs.
    Simulate {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, default_value = "generic")]
        evaluator: String,
        #[arg(long, default_value_t = 1)]
        kmin: usize,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample the hardest child patterns instead of uniform ones.
        #[arg(long)]
        adversarial: bool,
        /// Emit the JSON-lines transcript of one run at depth k.
        #[arg(long)]
        k: Option<usize>,
        /// Root value of the transcript input.
        #[arg(long, default_value_t = 1)]
        root: u8,
        /// Print the exact expected-cost table up to this level.
        #[arg(long)]
        exact: Option<usize>,
    },
    /// Run the built-in invariant corpus.
    Selftest,
}

/// Parses `catalog:NAME[:size]`, `file:PATH` or a bare path or catalog name.
fn load(source: &str) -> Result<PartialFunction, Error> {
    if let Some(name) = source.strip_prefix("catalog:") {
        return name.parse::<Catalog>()?.build();
    }
    let path = source.strip_prefix("file:").unwrap_or(source);
    match fs::read_to_string(path) {
        Ok(text) => PartialFunction::parse_spec(&text),
        Err(_) if !source.starts_with("file:") => source.parse::<Catalog>()?.build(),
        Err(e) => Err(Error::invalid(format!("cannot read {path}: {e}"))),
    }
}

fn epsilon(s: &str) -> Result<Rational, Error> {
    parse_rational(s)
}

fn measure_list(names: &[String], all: bool, f: &PartialFunction) -> Result<Vec<Measure>, Error> {
    if all {
        return Ok(Measure::ALL.into_iter().filter(|m| m.supports(f)).collect());
    }
    if names.is_empty() {
        return Err(Error::invalid("give --measure or --all"));
    }
    names.iter().flat_map(|s| s.split(',')).map(str::parse).collect()
}

struct Report {
    json: Value,
    csv: Option<String>,
    text: String,
    /// Set when a search ran out of budget.
    exhausted: bool,
    violated: bool,
}

impl Report {
    fn new(json: Value, text: String) -> Self {
        Report {
            json,
            csv: None,
            text,
            exhausted: false,
            violated: false,
        }
    }
}

fn header(argv: &[String]) -> Value {
    json!({
        "tool": "qlimit",
        "version": env!("CARGO_PKG_VERSION"),
        "argv": argv,
        "prng": PRNG,
    })
}

fn cmd_measure(f: &PartialFunction, ms: &[Measure], eps: &Rational) -> Result<Report, Error> {
    let mut items = Vec::new();
    let mut text = String::new();
    let mut csv = String::from("measure,epsilon,value\n");
    for &m in ms {
        let r = measures::report(m, f, eps)?;
        let e = r.epsilon.as_ref().map(format_rational).unwrap_or_default();
        text.push_str(&format!("{} = {}\n", m, format_rational(&r.value)));
        csv.push_str(&format!("{},{},{}\n", m, e, format_rational(&r.value)));
        let mut j = r.to_json(f);
        j["verified"] = json!(r.verify(f));
        items.push(j);
    }
    let mut r = Report::new(json!({"function": f, "measures": items}), text);
    r.csv = Some(csv);
    Ok(r)
}

fn cmd_compose(f: &PartialFunction) -> Report {
    Report::new(serde_json::to_value(f).unwrap(), f.to_text())
}

fn decision_report(d: Decision) -> Result<Report, Error> {
    let (name, witness, reason) = match d {
        Decision::Reducible(w) => {
            let ok = reductions::verify(&w)?;
            if !ok {
                return Err(Error::Internal("search produced a witness that does not verify".into()));
            }
            ("Reducible", Some(w), None)
        }
        Decision::NotReducible(why) => ("NotReducible", None, Some(why)),
        Decision::Inconclusive(why) => ("Inconclusive", None, Some(why)),
    };
    let text = match (&witness, &reason) {
        (Some(w), _) => format!("{name} ({} steps)\n", w.steps.len()),
        (_, Some(r)) => format!("{name}: {r}\n"),
        _ => format!("{name}\n"),
    };
    let mut r = Report::new(
        json!({
            "decision": name,
            "witness": witness.as_ref().map(ReductionWitness::to_json),
            "reason": reason,
        }),
        text,
    );
    r.exhausted = name == "Inconclusive";
    Ok(r)
}

fn switch_report(s: Switchability) -> Result<Report, Error> {
    let (name, witness, reason) = match s {
        Switchability::StronglySwitchable(w) => ("StronglySwitchable", Some(w), None),
        Switchability::Switchable(w) => ("Switchable", Some(w), None),
        Switchability::No => ("No", None, None),
        Switchability::Inconclusive(why) => ("Inconclusive", None, Some(why)),
    };
    if let Some(w) = &witness {
        if !reductions::verify(w)? {
            return Err(Error::Internal("switch witness does not verify".into()));
        }
    }
    let mut r = Report::new(
        json!({
            "switchability": name,
            "witness": witness.as_ref().map(ReductionWitness::to_json),
            "reason": reason,
        }),
        format!("{name}\n"),
    );
    r.exhausted = name == "Inconclusive";
    Ok(r)
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let cap = cli.common.cap.unwrap_or(DEFAULT_CAP);
    match &cli.command {
        Command::Measure {
            function,
            measures,
            all,
            epsilon: e,
        } => {
            let f = load(function)?;
            let ms = measure_list(measures, *all, &f)?;
            cmd_measure(&f, &ms, &epsilon(e)?)
        }
        Command::Compose {
            function,
            k,
            outer,
            inner,
        } => {
            let f = match (function, outer, inner) {
                (Some(src), _, _) => power_with_cap(&load(src)?, k.unwrap_or(1), cap)?,
                (None, Some(o), Some(i)) => compose_with_cap(&load(o)?, &load(i)?, cap)?,
                _ => return Err(Error::invalid("give --fn with --k, or --outer with --inner")),
            };
            Ok(cmd_compose(&f))
        }
        Command::Reduce {
            from,
            to,
            mode,
            witness,
            switchable,
            max_domain,
            max_pad,
            max_nodes,
        } => {
            let budget = Budget {
                max_domain: *max_domain,
                max_pad_width: *max_pad,
                max_nodes: *max_nodes,
            };
            if let Some(path) = witness {
                let text = fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read witness: {e}")))?;
                // A full `reduce` report is accepted too.
                let w = match serde_json::from_str::<serde_json::Value>(&text) {
                    Ok(v) if v["result"]["witness"].is_object() => {
                        ReductionWitness::from_json(&v["result"]["witness"].to_string())?
                    }
                    _ => ReductionWitness::from_json(&text)?,
                };
                let ok = reductions::verify(&w)?;
                let mut r = Report::new(json!({"verified": ok, "mode": w.mode.to_string()}), format!("verified = {ok}\n"));
                r.violated = !ok;
                return Ok(r);
            }
            if let Some(src) = switchable {
                return switch_report(is_switchable(&load(src)?, &budget)?);
            }
            let (Some(from), Some(to)) = (from, to) else {
                return Err(Error::invalid("give --from and --to, --witness or --switchable"));
            };
            let mode: Mode = mode.parse()?;
            decision_report(decide(&load(from)?, &load(to)?, mode, &budget)?)
        }
        Command::Limit {
            function,
            measure,
            kmax,
            epsilon: e,
        } => {
            let f = load(function)?;
            let m: Measure = measure.parse()?;
            let eps = epsilon(e)?;
            let opts = SequenceOptions { epsilon: &eps, cap };
            let seq = sequence(m, &f, function, *kmax, opts)?;
            let b = if composition_law(m).is_some() && !seq.entries.is_empty() {
                Some(bounds(&seq, &f)?)
            } else {
                None
            };
            let text = seq
                .entries
                .iter()
                .map(|e| format!("k={} {}={} root={}\n", e.k, m, format_rational(&e.value), e.root))
                .collect::<String>();
            let mut r = Report::new(seq.to_json(b.as_ref()), text);
            r.csv = Some(seq.to_csv(b.as_ref()));
            r.exhausted = seq.entries.len() < *kmax
                && matches!(seq.stopped, Some((_, Error::SizeCapExceeded { .. } | Error::TooManyBlocks { .. })));
            Ok(r)
        }
        Command::Simulate {
            function,
            evaluator,
            kmin,
            kmax,
            trials,
            seed,
            adversarial,
            k,
            root,
            exact,
        } => {
            let f = load(function)?;
            let kind = EvaluatorKind::parse(evaluator)?;
            if let Some(levels) = exact {
                let table = exact_expected_cost(kind, &f, *levels)?;
                let mut csv = String::from("level,w0,w1\n");
                for l in &table {
                    csv.push_str(&format!("{},{},{}\n", l.level, format_rational(&l.cost[0]), format_rational(&l.cost[1])));
                }
                let mut r = Report::new(
                    json!({"evaluator": kind.name(), "levels": table.iter().map(|l| l.to_json(f.arity())).collect::<Vec<_>>()}),
                    csv.clone(),
                );
                r.csv = Some(csv);
                return Ok(r);
            }
            let generator = if *adversarial { Generator::Adversarial } else { Generator::Uniform };
            let ev = Evaluator::new(kind, &f)?;
            if let Some(k) = k {
                let mut x = sample_input_with(&f, *k, *root != 0, *seed, generator)?;
                let run = run_ak(&f, *k, &mut x, &ev, *seed, true)?;
                let valid = run.certificate().is_none_or(|c| verify_recursive(&f, *k, c, &mut x));
                let lines = run.transcript_lines();
                let mut r = Report::new(
                    json!({
                        "bot": run.is_bot(),
                        "queries": run.queries,
                        "certificate": run.certificate().map(|c| c.to_json()),
                        "verified": valid,
                        "transcript": run.transcript,
                    }),
                    lines.clone(),
                );
                r.csv = Some(lines);
                r.violated = !valid;
                return Ok(r);
            }
            let opts = GrowthOptions {
                k_min: *kmin,
                k_max: *kmax,
                trials: *trials,
                seed: *seed,
                generator,
                threads: cli.common.threads,
            };
            let g = growth_report(&f, &ev, &opts)?;
            let mut r = Report::new(g.to_json(), g.to_csv());
            r.csv = Some(g.to_csv());
            r.violated = g.rows.iter().any(|row| row.invalid > 0);
            Ok(r)
        }
        Command::Selftest => {
            let results = selftest::run();
            let text: String = results
                .iter()
                .map(|(name, ok, detail)| format!("{} {name}: {detail}\n", if *ok { "ok" } else { "FAIL" }))
                .collect();
            let mut r = Report::new(
                json!({"checks": results.iter().map(|(n, ok, d)| json!({"name": n, "passed": ok, "detail": d})).collect::<Vec<_>>()}),
                text,
            );
            r.violated = results.iter().any(|c| !c.1);
            Ok(r)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SizeCapExceeded { .. } | Error::ArityTooLarge { .. } | Error::TooManyBlocks { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let body = match cli.common.format {
        Format::Json if matches!(cli.command, Command::Compose { .. }) => {
            serde_json::to_string(&report.json).unwrap() + "\n"
        }
        Format::Json => {
            let mut doc = json!({"header": header(&argv)});
            doc["result"] = report.json;
            serde_json::to_string_pretty(&doc).unwrap() + "\n"
        }
        Format::Csv => report.csv.unwrap_or(report.text),
        Format::Text => report.text,
    };
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{body}"),
    }
    if report.violated {
        ExitCode::from(1)
    } else if report.exhausted {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
