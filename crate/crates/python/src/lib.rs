//! Python bindings. Exact integers come back as Python ints; exact rationals
//! and rendered reals come back as decimal strings.

use canonloop_core::enumerate::{classify_diagram, enumerate_structures, histograms, Diagram};
use canonloop_core::loopgf::{cross_derivation_check, loop_gf, shape_gf, GfRequest};
use canonloop_core::matchings::fk_counts;
use canonloop_core::numeric::to_decimal;
use canonloop_core::singularity::{self, DEFAULT_DIGITS};
use canonloop_core::{Error, ExactRational, LoopKind, UPoly};
use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_kind(kind: &str) -> PyResult<LoopKind> {
    kind.parse().map_err(|_| PyValueError::new_err(format!("unknown loop kind {kind:?}")))
}

fn integer_coeffs(p: &UPoly) -> Vec<BigInt> {
    p.coeffs().iter().map(|c| c.to_integer()).collect()
}

/// `f_k(2n, 0)` for `n = 0..=n_max`.
#[pyfunction]
#[pyo3(name = "fk_counts")]
fn fk_counts_py(k: usize, n_max: usize) -> PyResult<Vec<BigInt>> {
    Ok(fk_counts(k, n_max).map_err(to_py)?.values)
}

/// Coefficients of the loop generating function: entry `[n][m]` counts
/// structures of length `n` with `m` loops of the given kind.
#[pyfunction]
#[pyo3(name = "loop_gf", signature = (kind, k, tau, order, u_cap=None))]
fn loop_gf_py(kind: &str, k: usize, tau: usize, order: usize, u_cap: Option<usize>) -> PyResult<Vec<Vec<BigInt>>> {
    let mut req = GfRequest::new(parse_kind(kind)?, k, tau, order);
    if let Some(cap) = u_cap {
        req = req.with_u_cap(cap);
    }
    let series = loop_gf(&req).map_err(to_py)?;
    Ok(series.coeffs().iter().map(integer_coeffs).collect())
}

/// Whether the shape-sum derivation reproduces the closed form up to `order`.
#[pyfunction]
fn cross_check(kind: &str, k: usize, tau: usize, order: usize) -> PyResult<bool> {
    let req = GfRequest::new(parse_kind(kind)?, k, tau, order);
    Ok(cross_derivation_check(&req).map_err(to_py)?.matches)
}

/// Shape counts `[s][m]`.
#[pyfunction]
fn shape_counts(k: usize, s_max: usize) -> PyResult<Vec<Vec<BigInt>>> {
    Ok(shape_gf(k, s_max).map_err(to_py)?.entries)
}

/// Brute-force loop histograms at length `n`, keyed by kind.
#[pyfunction]
fn histogram<'py>(py: Python<'py>, k: usize, tau: usize, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let hist = histograms(k, tau, n).map_err(to_py)?;
    let d = PyDict::new(py);
    for (kind, p) in LoopKind::ALL.iter().zip(hist.iter()) {
        d.set_item(kind.name(), integer_coeffs(p))?;
    }
    Ok(d)
}

/// All structures of length `n`, each as a list of arcs `(i, j)`.
#[pyfunction]
fn structures(k: usize, tau: usize, n: usize) -> PyResult<Vec<Vec<(usize, usize)>>> {
    let all = enumerate_structures(k, tau, n).map_err(to_py)?;
    Ok(all.into_iter().map(|s| s.diagram.arcs).collect())
}

/// Loop profile of a diagram on `n` vertices.
#[pyfunction]
fn classify<'py>(py: Python<'py>, n: usize, arcs: Vec<(usize, usize)>) -> PyResult<Bound<'py, PyDict>> {
    let d = Diagram::new(n, arcs).map_err(to_py)?;
    let p = classify_diagram(&d);
    let out = PyDict::new(py);
    out.set_item("hairpins", p.hairpins)?;
    out.set_item("interiors", p.interiors)?;
    out.set_item("bulges", p.bulges)?;
    out.set_item("stacks", p.stacks)?;
    out.set_item("stems", p.stems)?;
    Ok(out)
}

/// Singularity analysis for one case.
#[pyclass(frozen)]
struct SingularityReport {
    inner: singularity::SingularityReport,
}

#[pymethods]
impl SingularityReport {
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.name()
    }
    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }
    #[getter]
    fn tau(&self) -> usize {
        self.inner.tau
    }
    #[getter]
    fn validated(&self) -> bool {
        self.inner.validated
    }
    #[getter]
    fn dominance(&self) -> bool {
        self.inner.dominance.passed
    }
    fn derivatives_agree(&self, digits: i32) -> bool {
        self.inner.derivatives_agree(digits)
    }
    #[pyo3(signature = (digits=DEFAULT_DIGITS))]
    fn gamma0(&self, digits: usize) -> String {
        to_decimal(&self.inner.gamma0, digits)
    }
    #[pyo3(signature = (digits=DEFAULT_DIGITS))]
    fn mu(&self, digits: usize) -> String {
        to_decimal(&self.inner.mu, digits)
    }
    #[pyo3(signature = (digits=DEFAULT_DIGITS))]
    fn sigma2(&self, digits: usize) -> String {
        to_decimal(&self.inner.sigma2, digits)
    }
    fn __repr__(&self) -> String {
        format!(
            "SingularityReport({}, k={}, tau={}, mu={}, sigma2={})",
            self.kind(),
            self.inner.k,
            self.inner.tau,
            self.mu(6),
            self.sigma2(6)
        )
    }
}

#[pyfunction]
fn mu_sigma(kind: &str, k: usize, tau: usize) -> PyResult<SingularityReport> {
    let inner = singularity::mu_sigma(parse_kind(kind)?, k, tau).map_err(to_py)?;
    Ok(SingularityReport { inner })
}

/// The `(mu, sigma2)` grid with published values, one dict per cell.
#[pyfunction]
#[pyo3(signature = (kind=None, digits=6))]
fn tables<'py>(py: Python<'py>, kind: Option<&str>, digits: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let kinds = match kind {
        Some(kind) => vec![parse_kind(kind)?],
        None => LoopKind::ALL.to_vec(),
    };
    let cells = singularity::tables(&kinds, digits).map_err(to_py)?;
    cells
        .into_iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("kind", c.kind.name())?;
            d.set_item("k", c.k)?;
            d.set_item("tau", c.tau)?;
            d.set_item("mu", &c.mu)?;
            d.set_item("sigma2", &c.sigma2)?;
            d.set_item("published_mu", &c.published_mu)?;
            d.set_item("published_sigma2", &c.published_sigma2)?;
            d.set_item("matches", c.matches)?;
            d.set_item("passed", c.passed())?;
            Ok(d)
        })
        .collect()
}

/// `rho_k^2` as an exact fraction string.
#[pyfunction]
fn rho_squared(k: usize) -> String {
    let r: ExactRational = canonloop_core::matchings::rho_squared(k);
    r.to_string()
}

#[pymodule]
fn canonloop(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fk_counts_py, m)?)?;
    m.add_function(wrap_pyfunction!(loop_gf_py, m)?)?;
    m.add_function(wrap_pyfunction!(cross_check, m)?)?;
    m.add_function(wrap_pyfunction!(shape_counts, m)?)?;
    m.add_function(wrap_pyfunction!(histogram, m)?)?;
    m.add_function(wrap_pyfunction!(structures, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(mu_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(tables, m)?)?;
    m.add_function(wrap_pyfunction!(rho_squared, m)?)?;
    m.add_class::<SingularityReport>()?;
    Ok(())
}
