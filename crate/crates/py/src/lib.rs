//! Python bindings: parameters and points as classes, reports as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use sqrex_core::cfrac::{self, IntervalParam};
use sqrex_core::fractal::{self, Family};
use sqrex_core::render::{self, Palette};
use sqrex_core::{lyapunov, pet, renorm, symbolic};

pyo3::create_exception!(sqrex, DomainError, PyRuntimeError);

fn domain(e: sqrex_core::Error) -> PyErr {
    DomainError::new_err(format!("{}: {e}", e.kind()))
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<PyObject> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_py(py),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_py(py),
            None => match n.as_u64() {
                Some(u) => u.into_py(py),
                None => n.as_f64().unwrap_or(f64::NAN).into_py(py),
            },
        },
        Value::String(s) => s.into_py(py),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new_bound(py, items).into_py(py)
        }
        Value::Object(m) => {
            let d = PyDict::new_bound(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_py(py)
        }
    })
}

fn report<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Parameter ω = (θ, ε), from `"theta,eps"` or `"x=value"`.
#[pyclass(frozen, module = "sqrex")]
#[derive(Clone)]
struct Param(sqrex_core::Param);

#[pymethods]
impl Param {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        spec.parse().map(Param).map_err(|e: sqrex_core::Error| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn theta(&self) -> String {
        self.0.theta().to_string()
    }

    #[getter]
    fn eps(&self) -> i64 {
        self.0.eps().sign()
    }

    /// Interval coordinate x = θ + (ε+1)/2.
    fn interval(&self) -> String {
        self.0.interval().to_string()
    }

    fn is_exact(&self) -> bool {
        self.0.is_exact()
    }

    /// One step of the renormalization map S.
    fn renorm(&self) -> PyResult<Param> {
        renorm::renorm_step(&self.0).map(Param).map_err(domain)
    }

    fn n_omega(&self) -> PyResult<u64> {
        renorm::n_omega(&self.0).map_err(domain)
    }

    fn __repr__(&self) -> String {
        format!("Param('{}')", self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __eq__(&self, other: &Param) -> bool {
        self.0 == other.0
    }
}

#[pyclass(frozen, module = "sqrex")]
#[derive(Clone)]
struct Point(sqrex_core::Point);

#[pymethods]
impl Point {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        spec.parse().map(Point).map_err(|e: sqrex_core::Error| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn x(&self) -> String {
        self.0.x.to_string()
    }

    #[getter]
    fn y(&self) -> String {
        self.0.y.to_string()
    }

    fn to_float(&self) -> (f64, f64) {
        self.0.to_f64()
    }

    fn __repr__(&self) -> String {
        format!("Point('{},{}')", self.0.x, self.0.y)
    }

    fn __eq__(&self, other: &Point) -> bool {
        self.0 == other.0
    }
}

/// T_ω(z).
#[pyfunction]
fn step(p: &Param, z: &Point) -> PyResult<Point> {
    pet::step(&p.0, &z.0).map(Point).map_err(domain)
}

#[pyfunction]
fn step_inverse(p: &Param, z: &Point) -> PyResult<Point> {
    pet::step_inverse(&p.0, &z.0).map(Point).map_err(domain)
}

/// Coding of the first `n` points of the orbit as a string over {a, b}.
#[pyfunction]
fn code_orbit(p: &Param, z: &Point, n: usize) -> PyResult<String> {
    pet::code_orbit(&p.0, &z.0, n).map(|w| w.to_string()).map_err(domain)
}

#[pyfunction]
#[pyo3(signature = (p, z, max_n=1000))]
fn detect_period(p: &Param, z: &Point, max_n: usize) -> PyResult<Option<usize>> {
    pet::detect_period(&p.0, &z.0, max_n).map_err(domain)
}

#[pyfunction]
fn islands(py: Python<'_>, p: &Param, max_period: u64) -> PyResult<PyObject> {
    report(py, &pet::islands(&p.0, Some(max_period)).map_err(domain)?)
}

#[pyfunction]
#[pyo3(signature = (p, depth=200))]
fn expand(py: Python<'_>, p: &Param, depth: usize) -> PyResult<PyObject> {
    report(py, &cfrac::expand(&IntervalParam::from_param(&p.0), depth))
}

#[pyfunction]
#[pyo3(signature = (p, samples=1000, tol=1e-9, seed=0x5EED))]
fn induction_verify(py: Python<'_>, p: &Param, samples: usize, tol: f64, seed: u64) -> PyResult<PyObject> {
    report(py, &renorm::induction_verify(&p.0, samples, tol, seed).map_err(domain)?)
}

/// Incidence matrix as `[[m11, m12], [m21, m22]]` of Python ints.
#[pyfunction]
fn incidence_matrix(py: Python<'_>, p: &Param) -> PyResult<PyObject> {
    let m = renorm::incidence_matrix(&p.0).map_err(domain)?;
    let int = py.import_bound("builtins")?.getattr("int")?;
    let [a, b, c, d] = m.entries().map(|x| int.call1((x.to_string(),)));
    Ok(PyList::new_bound(py, [PyList::new_bound(py, [a?, b?]), PyList::new_bound(py, [c?, d?])]).into_py(py))
}

#[pyfunction]
fn limit_word(p: &Param, length: usize) -> PyResult<String> {
    symbolic::limit_word(&p.0, length).map(|w| w.to_string()).map_err(domain)
}

/// Number of distinct factors of length `n` in a word over {a, b}.
#[pyfunction]
fn complexity(word: &str, n: usize) -> PyResult<usize> {
    let w: symbolic::Word = word.parse().map_err(|e: sqrex_core::Error| PyValueError::new_err(e.to_string()))?;
    symbolic::complexity(&w, n).map_err(domain)
}

#[pyfunction]
#[pyo3(signature = (p, l, prefix_len=100_000))]
fn tower_stats(py: Python<'_>, p: &Param, l: usize, prefix_len: usize) -> PyResult<PyObject> {
    report(py, &symbolic::tower_stats(&p.0, l, prefix_len).map_err(domain)?)
}

/// Monte-Carlo exponents; releases the GIL while sampling.
#[pyfunction]
#[pyo3(signature = (trials=1000, l=10_000, seed=0x5EED))]
fn birkhoff_estimate(py: Python<'_>, trials: usize, l: usize, seed: u64) -> PyResult<PyObject> {
    let e = py.allow_threads(|| lyapunov::birkhoff_estimate(seed, trials, l)).map_err(domain)?;
    report(py, &e)
}

#[pyfunction]
#[pyo3(signature = (terms=20_000))]
fn integrals(py: Python<'_>, terms: usize) -> PyResult<PyObject> {
    let d = PyDict::new_bound(py);
    d.set_item("ln_r", report(py, &lyapunov::integral_ln_r(terms).map_err(domain)?)?)?;
    d.set_item("ln_M", report(py, &lyapunov::integral_ln_m(terms).map_err(domain)?)?)?;
    d.set_item("lower_bound_f", report(py, &lyapunov::lower_bound_f(terms).map_err(domain)?)?)?;
    Ok(d.into_py(py))
}

#[pyfunction]
fn selfsimilar_dimension(py: Python<'_>, family: &str, n: u64) -> PyResult<PyObject> {
    let family: Family = family.parse().map_err(|e: sqrex_core::Error| PyValueError::new_err(e.to_string()))?;
    report(py, &fractal::selfsimilar_dimension(family, n).map_err(domain)?)
}

#[pyfunction]
fn dimension_estimate(py: Python<'_>, p: &Param, l: usize) -> PyResult<PyObject> {
    report(py, &fractal::dimension_estimate(&p.0, l).map_err(domain)?)
}

#[pyfunction]
#[pyo3(signature = (samples=100_000, seed=0x5EED))]
fn natural_extension_check(py: Python<'_>, samples: usize, seed: u64) -> PyResult<PyObject> {
    let r = py.allow_threads(|| cfrac::natural_extension_check(samples, seed));
    report(py, &r)
}

/// Binary PPM of a figure: `kind` is "discontinuities", "islands" or "cover".
#[pyfunction]
#[pyo3(signature = (kind, p, px=1000, depth=10, periods=vec![1, 5, 21], l=8, palette="color"))]
fn render_ppm<'py>(
    py: Python<'py>,
    kind: &str,
    p: &Param,
    px: usize,
    depth: usize,
    periods: Vec<u64>,
    l: usize,
    palette: &str,
) -> PyResult<Bound<'py, PyBytes>> {
    let pal: Palette = palette.parse().map_err(|e: sqrex_core::Error| PyValueError::new_err(e.to_string()))?;
    let img = match kind {
        "discontinuities" => render::render_discontinuities(&p.0, depth, px, pal),
        "islands" => render::render_islands(&p.0, &periods, px, pal),
        "cover" => render::render_cover(&p.0, l, px, pal),
        other => return Err(PyValueError::new_err(format!("unknown figure kind `{other}`"))),
    }
    .map_err(domain)?;
    Ok(PyBytes::new_bound(py, &img.to_ppm()))
}

#[pymodule]
fn sqrex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DomainError", m.py().get_type_bound::<DomainError>())?;
    m.add_class::<Param>()?;
    m.add_class::<Point>()?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(step_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(code_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(detect_period, m)?)?;
    m.add_function(wrap_pyfunction!(islands, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(induction_verify, m)?)?;
    m.add_function(wrap_pyfunction!(incidence_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(limit_word, m)?)?;
    m.add_function(wrap_pyfunction!(complexity, m)?)?;
    m.add_function(wrap_pyfunction!(tower_stats, m)?)?;
    m.add_function(wrap_pyfunction!(birkhoff_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(integrals, m)?)?;
    m.add_function(wrap_pyfunction!(selfsimilar_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(natural_extension_check, m)?)?;
    m.add_function(wrap_pyfunction!(render_ppm, m)?)?;
    Ok(())
}
