//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! structured results as plain dicts and lists.

use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

use qlimit_core::boolfn::{self, format_bits, parse_bits, Catalog, DEFAULT_CAP};
use qlimit_core::lasvegas::{self, EvaluatorKind, GrowthOptions};
use qlimit_core::limits::{self, SequenceOptions};
use qlimit_core::measures::{self, Measure};
use qlimit_core::ratlp::{format_rational, parse_rational};
use qlimit_core::reductions::{self, Budget, Decision, Mode, ReductionWitness, Switchability};
use qlimit_core::{Error, PartialFunction};

fn err(e: Error) -> PyErr {
    match e {
        Error::SizeCapExceeded { .. } | Error::ArityTooLarge { .. } | Error::TooManyBlocks { .. } => {
            PyOverflowError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A possibly partial Boolean function.
#[pyclass(name = "Function", module = "qlimit", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFunction {
    inner: PartialFunction,
}

fn wrap(f: PartialFunction) -> PyFunction {
    PyFunction { inner: f }
}

#[pymethods]
impl PyFunction {
    /// Builds a function from `(bits, value)` pairs such as `("01", 1)`.
    #[new]
    fn new(n: usize, entries: Vec<(String, u8)>) -> PyResult<Self> {
        let table: Vec<(String, bool)> = entries.into_iter().map(|(s, v)| (s, v != 0)).collect();
        PartialFunction::from_strings(n, table).map(wrap).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (name, size=None))]
    fn catalog(name: &str, size: Option<usize>) -> PyResult<Self> {
        boolfn::catalog(name, size).map(wrap).map_err(err)
    }

    /// Parses a spec file in JSON or text form.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        PartialFunction::parse_spec(text).map(wrap).map_err(err)
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn entries(&self) -> Vec<(String, u8)> {
        let n = self.inner.arity();
        self.inner.entries().iter().map(|&(x, v)| (format_bits(x, n), v as u8)).collect()
    }

    fn __call__(&self, bits: &str) -> PyResult<Option<u8>> {
        let x = parse_bits(bits).map_err(err)?;
        Ok(self.inner.get(x).map(u8::from))
    }

    fn __len__(&self) -> usize {
        self.inner.domain_size()
    }

    fn __eq__(&self, other: &PyFunction) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Function(n={}, domain={})", self.inner.arity(), self.inner.domain_size())
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn is_total(&self) -> bool {
        self.inner.is_total()
    }

    fn is_constant(&self) -> bool {
        self.inner.is_constant()
    }

    /// `self ∘ inner`.
    #[pyo3(signature = (inner, cap=DEFAULT_CAP))]
    fn compose(&self, inner: &PyFunction, cap: u64) -> PyResult<Self> {
        boolfn::compose_with_cap(&self.inner, &inner.inner, cap).map(wrap).map_err(err)
    }

    #[pyo3(signature = (k, cap=DEFAULT_CAP))]
    fn power(&self, k: usize, cap: u64) -> PyResult<Self> {
        boolfn::power_with_cap(&self.inner, k, cap).map(wrap).map_err(err)
    }

    fn negate_output(&self) -> Self {
        wrap(boolfn::negate_output(&self.inner))
    }

    /// Keeps the listed inputs.
    fn restrict(&self, promise: Vec<String>) -> PyResult<Self> {
        let xs = promise.iter().map(|s| parse_bits(s)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        boolfn::restrict(&self.inner, &xs).map(wrap).map_err(err)
    }

    /// `perm[i]` is the new 1-based position of bit `i + 1`.
    fn rename(&self, perm: Vec<usize>) -> PyResult<Self> {
        let p: Vec<usize> = perm.iter().map(|&i| i.wrapping_sub(1)).collect();
        boolfn::rename_indices(&self.inner, &p).map(wrap).map_err(err)
    }

    /// The value of one measure as a `"p/q"` string.
    #[pyo3(signature = (name, epsilon="1/3"))]
    fn measure(&self, name: &str, epsilon: &str) -> PyResult<String> {
        let m: Measure = name.parse().map_err(err)?;
        let eps = parse_rational(epsilon).map_err(err)?;
        measures::value(m, &self.inner, &eps).map(|v| format_rational(&v)).map_err(err)
    }

    /// Full report of one measure including its witness.
    #[pyo3(signature = (name, epsilon="1/3"))]
    fn report<'py>(&self, py: Python<'py>, name: &str, epsilon: &str) -> PyResult<Bound<'py, PyAny>> {
        let m: Measure = name.parse().map_err(err)?;
        let eps = parse_rational(epsilon).map_err(err)?;
        let r = measures::report(m, &self.inner, &eps).map_err(err)?;
        let mut v = r.to_json(&self.inner);
        v["verified"] = serde_json::json!(r.verify(&self.inner));
        json_to_py(py, &v)
    }
}

fn mode(s: &str) -> PyResult<Mode> {
    s.parse().map_err(err)
}

fn witness_json(w: &ReductionWitness) -> String {
    w.to_json().to_string()
}

/// Searches for a witness of `f ≲ g`. Returns `(decision, witness_json_or_reason)`.
#[pyfunction]
#[pyo3(signature = (f, g, mode_name="weak"))]
fn decide(f: &PyFunction, g: &PyFunction, mode_name: &str) -> PyResult<(String, String)> {
    let d = reductions::decide(&f.inner, &g.inner, mode(mode_name)?, &Budget::default()).map_err(err)?;
    Ok(match d {
        Decision::Reducible(w) => ("Reducible".into(), witness_json(&w)),
        Decision::NotReducible(r) => ("NotReducible".into(), r),
        Decision::Inconclusive(r) => ("Inconclusive".into(), r),
    })
}

#[pyfunction]
fn verify_witness(json: &str) -> PyResult<bool> {
    let w = ReductionWitness::from_json(json).map_err(err)?;
    reductions::verify(&w).map_err(err)
}

#[pyfunction]
fn is_switchable(f: &PyFunction) -> PyResult<(String, Option<String>)> {
    Ok(match reductions::is_switchable(&f.inner, &Budget::default()).map_err(err)? {
        Switchability::StronglySwitchable(w) => ("StronglySwitchable".into(), Some(witness_json(&w))),
        Switchability::Switchable(w) => ("Switchable".into(), Some(witness_json(&w))),
        Switchability::No => ("No".into(), None),
        Switchability::Inconclusive(r) => ("Inconclusive".into(), Some(r)),
    })
}

#[pyfunction]
fn bs_reduction_witness(f: &PyFunction) -> PyResult<String> {
    reductions::bs_reduction_witness(&f.inner).map(|w| witness_json(&w)).map_err(err)
}

/// `M(f^k)` for `k = 1..=kmax` with bounds on the limit when available.
#[pyfunction]
#[pyo3(signature = (f, measure, kmax, epsilon="1/3", cap=DEFAULT_CAP))]
fn limit<'py>(
    py: Python<'py>,
    f: &PyFunction,
    measure: &str,
    kmax: usize,
    epsilon: &str,
    cap: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let m: Measure = measure.parse().map_err(err)?;
    let eps = parse_rational(epsilon).map_err(err)?;
    let opts = SequenceOptions { epsilon: &eps, cap };
    let seq = limits::sequence(m, &f.inner, "f", kmax, opts).map_err(err)?;
    let b = if limits::composition_law(m).is_some() && !seq.entries.is_empty() {
        Some(limits::bounds(&seq, &f.inner).map_err(err)?)
    } else {
        None
    };
    json_to_py(py, &seq.to_json(b.as_ref()))
}

/// `[(w0, w1), ...]` for levels `1..=levels`.
#[pyfunction]
fn exact_expected_cost(evaluator: &str, f: &PyFunction, levels: usize) -> PyResult<Vec<(String, String)>> {
    let kind = EvaluatorKind::parse(evaluator).map_err(err)?;
    let t = lasvegas::exact_expected_cost(kind, &f.inner, levels).map_err(err)?;
    Ok(t.iter().map(|l| (format_rational(&l.cost[0]), format_rational(&l.cost[1]))).collect())
}

/// One run of `A_k`; returns a dict with the outcome, query count, whether the
/// certificate verified, and the transcript events.
#[pyfunction]
#[pyo3(signature = (f, k, root, seed, evaluator="generic", input_seed=None))]
fn run_ak<'py>(
    py: Python<'py>,
    f: &PyFunction,
    k: usize,
    root: u8,
    seed: u64,
    evaluator: &str,
    input_seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = EvaluatorKind::parse(evaluator).map_err(err)?;
    let ev = lasvegas::Evaluator::new(kind, &f.inner).map_err(err)?;
    let mut x = lasvegas::sample_input(&f.inner, k, root != 0, input_seed.unwrap_or(seed)).map_err(err)?;
    let run = lasvegas::run_ak(&f.inner, k, &mut x, &ev, seed, true).map_err(err)?;
    let verified = run.certificate().is_none_or(|c| lasvegas::verify_recursive(&f.inner, k, c, &mut x));
    let v = serde_json::json!({
        "bot": run.is_bot(),
        "queries": run.queries,
        "certificate": run.certificate().map(|c| c.to_json()),
        "certificate_size": run.certificate().map(|c| c.size(f.inner.arity())),
        "verified": verified,
        "transcript": run.transcript,
    });
    json_to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (f, evaluator, kmin, kmax, trials, seed=0, threads=1))]
fn growth_report<'py>(
    py: Python<'py>,
    f: &PyFunction,
    evaluator: &str,
    kmin: usize,
    kmax: usize,
    trials: usize,
    seed: u64,
    threads: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = EvaluatorKind::parse(evaluator).map_err(err)?;
    let ev = lasvegas::Evaluator::new(kind, &f.inner).map_err(err)?;
    let opts = GrowthOptions {
        k_min: kmin,
        k_max: kmax,
        trials,
        seed,
        threads,
        ..Default::default()
    };
    let r = py.detach(|| lasvegas::growth_report(&f.inner, &ev, &opts)).map_err(err)?;
    json_to_py(py, &r.to_json())
}

#[pyfunction]
fn catalog_names() -> Vec<String> {
    [Catalog::Identity, Catalog::Switch, Catalog::Nand2, Catalog::Maj3]
        .iter()
        .map(ToString::to_string)
        .chain(["PrOR:n", "AND:n", "OR:n", "PARITY:n", "CONST0:n", "CONST1:n"].map(String::from))
        .collect()
}

#[pymodule]
fn qlimit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunction>()?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(verify_witness, m)?)?;
    m.add_function(wrap_pyfunction!(is_switchable, m)?)?;
    m.add_function(wrap_pyfunction!(bs_reduction_witness, m)?)?;
    m.add_function(wrap_pyfunction!(limit, m)?)?;
    m.add_function(wrap_pyfunction!(exact_expected_cost, m)?)?;
    m.add_function(wrap_pyfunction!(run_ak, m)?)?;
    m.add_function(wrap_pyfunction!(growth_report, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add("PRNG", lasvegas::PRNG)?;
    Ok(())
}
