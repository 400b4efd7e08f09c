//! Python bindings: `import psl2`.
//!
//! Argument errors raise `ValueError`; resource caps and non-converged
//! quadrature raise `RuntimeError`. Long computations release the GIL.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use psl2::bhc::{self, BhcError};
use psl2::heathbrown::{self, HbError};
use psl2::invariants::{self, GoldenError, InvariantError};
use psl2::oracle::{self, OracleError, OracleOptions, DEFAULT_SUBGROUP_CAP};
use psl2::search::{self, CaseId, ScanOptions, SearchError};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn inv_err(e: InvariantError) -> PyErr {
    match e {
        InvariantError::NotPrime(_) | InvariantError::TooSmall(_) => value_err(e),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn oracle_err(e: OracleError) -> PyErr {
    match e {
        OracleError::OutOfRange(_) | OracleError::NeedsOptIn(_) => value_err(e),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn bhc_err(e: BhcError) -> PyErr {
    match e {
        BhcError::NotConverged { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => value_err(e),
    }
}

fn search_err(e: SearchError) -> PyErr {
    match e {
        SearchError::ThreadPool(_) => PyRuntimeError::new_err(e.to_string()),
        _ => value_err(e),
    }
}

fn hb_err(e: HbError) -> PyErr {
    match e {
        HbError::Invariant(e) => inv_err(e),
        _ => value_err(e),
    }
}

/// Plain Python objects through the standard json module.
fn to_py(py: Python<'_>, v: &impl serde::Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(frozen, eq, hash, skip_from_py_object, module = "psl2")]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Counts {
    #[pyo3(get)]
    i: u64,
    #[pyo3(get)]
    c: u64,
    #[pyo3(get)]
    s: u64,
    #[pyo3(get)]
    n: u64,
}

impl From<invariants::Counts> for Counts {
    fn from(c: invariants::Counts) -> Self {
        Counts { i: c.i, c: c.c, s: c.s, n: c.n }
    }
}

#[pymethods]
impl Counts {
    fn astuple(&self) -> (u64, u64, u64, u64) {
        (self.i, self.c, self.s, self.n)
    }

    fn __repr__(&self) -> String {
        format!("Counts(i={}, c={}, s={}, n={})", self.i, self.c, self.s, self.n)
    }
}

#[pyclass(frozen, skip_from_py_object, module = "psl2")]
#[derive(Clone, Copy)]
struct InvariantProfile(invariants::InvariantProfile);

#[pymethods]
impl InvariantProfile {
    #[getter]
    fn p(&self) -> u64 {
        self.0.p
    }
    #[getter]
    fn delta(&self) -> u64 {
        self.0.delta
    }
    #[getter]
    fn epsilon(&self) -> u64 {
        self.0.epsilon
    }
    #[getter]
    fn k(&self) -> u32 {
        self.0.k
    }
    #[getter]
    fn l(&self) -> u32 {
        self.0.l
    }
    #[getter]
    fn sigma(&self) -> u8 {
        self.0.sigma
    }
    #[getter]
    fn alpha(&self) -> u8 {
        self.0.alpha
    }

    fn counts(&self) -> PyResult<Counts> {
        invariants::counts(&self.0).map(Counts::from).map_err(inv_err)
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "InvariantProfile(p={}, delta={}, epsilon={}, k={}, l={}, sigma={}, alpha={})",
            p.p, p.delta, p.epsilon, p.k, p.l, p.sigma, p.alpha
        )
    }
}

#[pyclass(frozen, skip_from_py_object, module = "psl2")]
#[derive(Clone)]
struct ClassCensus(invariants::ClassCensus);

#[pymethods]
impl ClassCensus {
    #[getter]
    fn p(&self) -> u64 {
        self.0.p
    }

    /// `(label, order, classes, self_normalising)` per isomorphism type.
    #[getter]
    fn entries(&self) -> Vec<(String, u64, u8, bool)> {
        self.0
            .entries
            .iter()
            .map(|e| (e.label(), e.order(), e.num_classes, e.self_normalising))
            .collect()
    }

    fn counts(&self) -> Counts {
        self.0.counts().into()
    }

    fn self_normalising_labels(&self) -> Vec<String> {
        self.0.self_normalising_labels()
    }

    /// `(only_in_self, only_in_other)` as lists of `(label, classes, self_normalising)`.
    #[allow(clippy::type_complexity)]
    fn diff(&self, other: &ClassCensus) -> (Vec<(String, u8, bool)>, Vec<(String, u8, bool)>) {
        let d = self.0.diff(&other.0);
        (d.only_left, d.only_right)
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        let c = self.0.counts();
        format!("ClassCensus(p={}, i={}, c={}, s={}, n={})", self.0.p, c.i, c.c, c.s, c.n)
    }
}

#[pyclass(frozen, skip_from_py_object, module = "psl2")]
#[derive(Clone)]
struct PolynomialFamily(bhc::PolynomialFamily);

#[derive(FromPyObject)]
enum FamilyArg<'py> {
    Family(PyRef<'py, PolynomialFamily>),
    Text(String),
    Coeffs(Vec<Vec<i64>>),
}

impl FamilyArg<'_> {
    /// A case letter, a family spec string, or ascending coefficient lists.
    fn resolve(&self) -> PyResult<bhc::PolynomialFamily> {
        match self {
            FamilyArg::Family(f) => Ok(f.0.clone()),
            FamilyArg::Text(s) => match s.parse::<CaseId>() {
                Ok(case) => Ok(search::case_spec(case).family),
                Err(_) => s.parse().map_err(bhc_err),
            },
            FamilyArg::Coeffs(c) => bhc::PolynomialFamily::from_coeffs(c.clone()).map_err(bhc_err),
        }
    }
}

#[pymethods]
impl PolynomialFamily {
    #[new]
    fn new(spec: FamilyArg<'_>) -> PyResult<Self> {
        spec.resolve().map(PolynomialFamily)
    }

    /// Ascending coefficients of each polynomial.
    fn coeffs(&self) -> Vec<Vec<i64>> {
        self.0.coeff_lists()
    }

    /// Number of roots of the product modulo a prime.
    fn omega(&self, p: u64) -> PyResult<u64> {
        if !psl2::arith::is_prime(p) {
            return Err(value_err(format!("{p} is not prime")));
        }
        bhc::omega_formula(&self.0, p).map_err(bhc_err)
    }

    fn check_sh(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let r = bhc::check_sh(&self.0).map_err(bhc_err)?;
        to_py(py, &r)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PolynomialFamily({:?})", self.0.coeff_lists())
    }
}

#[pyclass(frozen, skip_from_py_object, module = "psl2")]
#[derive(Clone)]
struct HlConstant(bhc::HlConstant);

#[pymethods]
impl HlConstant {
    #[getter]
    fn value(&self) -> f64 {
        self.0.value
    }
    #[getter]
    fn truncation_bound(&self) -> u64 {
        self.0.truncation_bound
    }
    #[getter]
    fn tail_bound_estimate(&self) -> f64 {
        self.0.tail_bound_estimate
    }

    fn __repr__(&self) -> String {
        format!("HlConstant(value={}, P={})", self.0.value, self.0.truncation_bound)
    }
}

#[pyclass(frozen, skip_from_py_object, module = "psl2")]
#[derive(Clone)]
struct BhcEstimate(bhc::BhcEstimate);

#[pymethods]
impl BhcEstimate {
    #[getter]
    fn family(&self) -> PolynomialFamily {
        PolynomialFamily(self.0.family.clone())
    }
    #[getter]
    fn x(&self) -> f64 {
        self.0.x
    }
    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }
    #[getter]
    fn constant(&self) -> HlConstant {
        HlConstant(self.0.constant)
    }
    #[getter]
    fn integral(&self) -> f64 {
        self.0.integral
    }
    #[getter]
    fn e(&self) -> f64 {
        self.0.e_value
    }
    #[getter]
    fn quadrature_error(&self) -> f64 {
        self.0.quadrature_error_estimate
    }

    /// (E − Q) / Q against an observed count.
    fn relative_error(&self, q: u64) -> PyResult<f64> {
        bhc::compare(q, self.0.e_value).map_err(bhc_err)
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        format!("BhcEstimate(family='{}', x={}, E={})", self.0.family, self.0.x, self.0.e_value)
    }
}

#[pyclass(frozen, skip_from_py_object, module = "psl2")]
#[derive(Clone)]
struct SearchSummary(search::SearchSummary);

#[pymethods]
impl SearchSummary {
    #[getter]
    fn case(&self) -> &'static str {
        self.0.case.as_str()
    }
    #[getter]
    fn t_max(&self) -> u64 {
        self.0.t_max
    }
    #[getter]
    fn q_count(&self) -> u64 {
        self.0.q_count
    }
    #[getter]
    fn hit_count(&self) -> u64 {
        self.0.hit_count
    }
    #[getter]
    fn sigma_alpha_zero(&self) -> u64 {
        self.0.sigma_alpha_zero_count
    }
    #[getter]
    fn attaining_count(&self) -> u64 {
        self.0.attaining_count
    }

    /// `(t, p, s, r, attains)` for the kept hits above the floor.
    #[getter]
    fn hits(&self) -> Vec<(u64, u64, u64, u64, [bool; 4])> {
        self.0.hits.iter().map(|h| (h.t, h.p, h.s, h.r, h.attains)).collect()
    }

    /// `(t, p, s, r)` for triples at or below the floor.
    #[getter]
    fn small_hits(&self) -> Vec<(u64, u64, u64, u64)> {
        self.0.small_hits.clone()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        format!(
            "SearchSummary(case='{}', t_max={}, q_count={}, hits={})",
            self.0.case.as_str(),
            self.0.t_max,
            self.0.q_count,
            self.0.hit_count
        )
    }
}

#[pyclass(frozen, skip_from_py_object, module = "psl2")]
#[derive(Clone, Copy)]
struct HbCandidate(heathbrown::HbCandidate);

#[pymethods]
impl HbCandidate {
    #[getter]
    fn p(&self) -> u64 {
        self.0.p
    }
    #[getter]
    fn omega_minus(&self) -> u32 {
        self.0.omega_minus
    }
    #[getter]
    fn omega_plus(&self) -> u32 {
        self.0.omega_plus
    }
    #[getter]
    fn qualifies(&self) -> bool {
        self.0.qualifies
    }

    fn counts(&self) -> Option<Counts> {
        self.0.counts().map(Counts::from)
    }

    fn __repr__(&self) -> String {
        format!(
            "HbCandidate(p={}, omega_minus={}, omega_plus={}, qualifies={})",
            self.0.p,
            self.0.omega_minus,
            self.0.omega_plus,
            if self.0.qualifies { "True" } else { "False" }
        )
    }
}

#[pyfunction]
fn profile(p: u64) -> PyResult<InvariantProfile> {
    invariants::profile(p).map(InvariantProfile).map_err(inv_err)
}

/// (i, c, s, n) for a prime p >= 5.
#[pyfunction]
fn counts(p: u64) -> PyResult<Counts> {
    let pr = invariants::profile(p).map_err(inv_err)?;
    invariants::counts(&pr).map(Counts::from).map_err(inv_err)
}

#[pyfunction]
fn census(p: u64) -> PyResult<ClassCensus> {
    invariants::census(p).map(ClassCensus).map_err(inv_err)
}

/// Census by brute-force subgroup enumeration, 3 <= p <= 19.
#[pyfunction]
#[pyo3(signature = (p, allow_large = false, subgroup_cap = DEFAULT_SUBGROUP_CAP))]
fn oracle_census(py: Python<'_>, p: u64, allow_large: bool, subgroup_cap: usize) -> PyResult<ClassCensus> {
    let opts = OracleOptions { allow_large, subgroup_cap };
    py.detach(|| oracle::oracle_census(p, &opts))
        .map(ClassCensus)
        .map_err(oracle_err)
}

/// The golden-table comparison as a dict of cell checks.
#[pyfunction]
#[pyo3(signature = (oracle_rows = None))]
fn verify_golden(py: Python<'_>, oracle_rows: Option<Vec<u64>>) -> PyResult<Py<PyAny>> {
    let report = py
        .detach(|| match &oracle_rows {
            Some(rows) => invariants::verify_golden_with(rows),
            None => invariants::verify_golden(),
        })
        .map_err(|e| match e {
            GoldenError::Invariant(e) => inv_err(e),
            GoldenError::Oracle(e) => oracle_err(e),
        })?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (case, t_max, hit_cap = 10_000, block_size = 1 << 16, threads = None))]
fn scan(
    py: Python<'_>,
    case: &str,
    t_max: u64,
    hit_cap: usize,
    block_size: u64,
    threads: Option<usize>,
) -> PyResult<SearchSummary> {
    let spec = search::case_spec(case.parse().map_err(search_err)?);
    let opts = ScanOptions {
        block_size,
        hit_cap,
        threads,
        ..ScanOptions::default()
    };
    py.detach(|| search::scan(&spec, t_max, &opts, None))
        .map(SearchSummary)
        .map_err(search_err)
}

#[pyfunction]
#[pyo3(signature = (family, truncation = bhc::DEFAULT_TRUNCATION))]
fn hl_constant(py: Python<'_>, family: FamilyArg<'_>, truncation: u64) -> PyResult<HlConstant> {
    let f = family.resolve()?;
    py.detach(|| bhc::hl_constant(&f, truncation))
        .map(HlConstant)
        .map_err(bhc_err)
}

/// E(x) for a case letter, a family spec or a PolynomialFamily.
#[pyfunction]
#[pyo3(signature = (family, x, truncation = bhc::DEFAULT_TRUNCATION))]
fn estimate(py: Python<'_>, family: FamilyArg<'_>, x: f64, truncation: u64) -> PyResult<BhcEstimate> {
    let f = family.resolve()?;
    py.detach(|| {
        let c = bhc::hl_constant(&f, truncation)?;
        bhc::estimate_e(&f, x, &c)
    })
    .map(BhcEstimate)
    .map_err(bhc_err)
}

#[pyfunction]
fn qualifies(p: u64) -> PyResult<HbCandidate> {
    heathbrown::qualifies(p).map(HbCandidate).map_err(hb_err)
}

#[pyfunction]
fn scan_hb(py: Python<'_>, limit: u64) -> PyResult<Vec<HbCandidate>> {
    py.detach(|| heathbrown::scan_hb(limit))
        .map(|v| v.into_iter().map(HbCandidate).collect())
        .map_err(hb_err)
}

#[pyfunction]
fn upper_bounds() -> Counts {
    heathbrown::derive_upper_bounds().into()
}

#[pymodule]
#[pyo3(name = "psl2")]
fn psl2_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Counts>()?;
    m.add_class::<InvariantProfile>()?;
    m.add_class::<ClassCensus>()?;
    m.add_class::<PolynomialFamily>()?;
    m.add_class::<HlConstant>()?;
    m.add_class::<BhcEstimate>()?;
    m.add_class::<SearchSummary>()?;
    m.add_class::<HbCandidate>()?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    m.add_function(wrap_pyfunction!(counts, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_census, m)?)?;
    m.add_function(wrap_pyfunction!(verify_golden, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(hl_constant, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(qualifies, m)?)?;
    m.add_function(wrap_pyfunction!(scan_hb, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bounds, m)?)?;
    m.add("LOWER_BOUNDS", Counts::from(invariants::LOWER_BOUNDS))?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
