//! Python bindings: the extension module `seifert_skein`.
//!
//! The module exposes the library's main pipeline — Seifert data,
//! invariant reports, character tables, the skein basis, the rewriting
//! system, twisted cohomology, SU(2) constructions, the known-values
//! table, and the census harness.  Rich results cross the boundary as
//! plain dicts/lists obtained from the same canonical JSON encodings the
//! CLI emits, so both front ends agree byte-for-byte on content.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

use skein_core::characters::{basis, enumerate_characters, evaluation_matrix};
use skein_core::homology::DEFAULT_ENUMERATION_BOUND;
use skein_core::reduction::{
    generating_set, generating_set_count, reduce, GeneratorIndex, R5CoefficientTable,
};
use skein_core::report::{
    build_report, known_labels, lookup_known, parse_slope_list, run_census, QPolicy,
    ReportOptions,
};
use skein_core::reps::{
    build_rp2_rep, build_su2_s2base, cocycle_dims, construct_sl2_rep, rp2_trace_interval,
    su2_residual, Quaternion, RepSpec,
};
use skein_core::seifert::{BaseSurface, GeneralSeifertData};
use skein_core::{Error, SkeinElement};

fn err(e: Error) -> PyErr {
    match e {
        Error::DescentViolation { .. } | Error::IllConditioned(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Convert any serde-serializable value into plain Python objects.
fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let json = serde_json::to_value(value)
        .map_err(|e| PyRuntimeError::new_err(format!("serialization: {e}")))?;
    json_to_py(py, &json)
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    match v {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

/// A Seifert fibered space over the 2-sphere with three filling slopes.
#[pyclass(name = "SeifertData", module = "seifert_skein", skip_from_py_object)]
#[derive(Clone)]
struct PySeifertData {
    inner: skein_core::SeifertData,
}

#[pymethods]
impl PySeifertData {
    /// Build from three `(p, q)` pairs.
    #[new]
    fn new(slopes: [(i64, i64); 3]) -> PyResult<Self> {
        Ok(Self { inner: skein_core::SeifertData::new(slopes).map_err(err)? })
    }

    /// Build from the CLI slope syntax, e.g. ``"1/2,-1/3,-1/5"``.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let slopes = parse_slope_list(text).map_err(err)?;
        let arr: [(i64, i64); 3] = slopes[..].try_into().map_err(|_| {
            PyValueError::new_err(format!("expected exactly three slopes, got {}", slopes.len()))
        })?;
        Self::new(arr)
    }

    #[getter]
    fn slopes(&self) -> Vec<(i64, i64)> {
        self.inner.slopes.iter().map(|s| (s.p, s.q)).collect()
    }

    /// Euler number as a canonical `n/d` string.
    fn euler_number(&self) -> String {
        self.inner.euler_number().to_string()
    }

    fn is_normalized(&self) -> bool {
        self.inner.is_normalized()
    }

    /// Same manifold in normalized coordinates (positive Euler number,
    /// `q_1 > 0`, `q_2, q_3` in the standard window).
    fn normalize(&self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.normalize().map_err(err)? })
    }

    /// Full invariant report as nested dicts (same schema as the CLI).
    #[pyo3(signature = (basis=false, independence=false))]
    fn invariants(&self, py: Python<'_>, basis: bool, independence: bool) -> PyResult<Py<PyAny>> {
        let report = build_report(
            &self.inner,
            ReportOptions {
                basis,
                timings: false,
                independence_bound: independence.then_some(DEFAULT_ENUMERATION_BOUND),
            },
        )
        .map_err(err)?;
        to_py(py, &report)
    }

    /// Every SL(2,C) character by exact trace data.
    #[pyo3(signature = (bound=DEFAULT_ENUMERATION_BOUND))]
    fn character_table(&self, py: Python<'_>, bound: u128) -> PyResult<Py<PyAny>> {
        let table = enumerate_characters(&self.inner, bound).map_err(err)?;
        to_py(py, &table)
    }

    /// The candidate basis of trace functions, as descriptor strings.
    fn basis(&self) -> PyResult<Vec<String>> {
        Ok(basis(&self.inner).map_err(err)?.iter().map(|b| b.to_string()).collect())
    }

    /// `(dimension, exact)` of the skein module over `Q(A)`.
    fn skein_dimension(&self) -> PyResult<(u128, bool)> {
        let d = skein_core::characters::skein_dimension(&self.inner).map_err(err)?;
        Ok((d.value, d.exact))
    }

    /// Smallest and largest singular value of the basis evaluation matrix.
    fn independence_check(&self) -> PyResult<(f64, f64, bool)> {
        let e = evaluation_matrix(&self.inner, DEFAULT_ENUMERATION_BOUND).map_err(err)?;
        Ok((e.min_singular_value, e.max_singular_value, e.full_rank))
    }

    /// Rewrite the spanning-set element `L_v` to the terminal generating
    /// set.  Returns a dict with the terminal terms (index/coefficient
    /// pairs), the step count, and optionally the full rule trace.
    #[pyo3(signature = (index, trace=false))]
    fn reduce(&self, py: Python<'_>, index: [i64; 6], trace: bool) -> PyResult<Py<PyAny>> {
        let m = self.inner.normalize().map_err(err)?;
        let x = SkeinElement::generator(GeneratorIndex(index), &m);
        let (terminal, applied) = reduce(&x, &m, &R5CoefficientTable::default()).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("terminal", to_py(py, &terminal)?)?;
        out.set_item("terminal_terms", terminal.len())?;
        out.set_item("steps", applied.steps.len())?;
        out.set_item("framing_note", applied.framing_note())?;
        if trace {
            out.set_item("trace", to_py(py, &applied.steps)?)?;
        }
        out.into_py_any(py)
    }

    /// Indices of the terminal generating set (normalized coordinates).
    fn generating_set(&self) -> PyResult<Vec<[i64; 6]>> {
        let m = self.inner.normalize().map_err(err)?;
        Ok(generating_set(&m).map_err(err)?.iter().map(|v| v.0).collect())
    }

    fn generating_set_count(&self) -> PyResult<u128> {
        let m = self.inner.normalize().map_err(err)?;
        generating_set_count(&m).map_err(err)
    }

    /// Twisted cohomology dimensions at the representation named by
    /// ``spec`` (``central``, ``central:-``, ``diagonal:IDX``,
    /// ``exceptional:IDX``, ``irreducible:N``).
    fn cohomology(&self, py: Python<'_>, spec: &str) -> PyResult<Py<PyAny>> {
        let rep_spec = RepSpec::parse(&self.inner, spec).map_err(err)?;
        let rho = construct_sl2_rep(&self.inner, &rep_spec).map_err(err)?;
        let report = cocycle_dims(&rho, &self.inner).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("rep", spec)?;
        out.set_item("relation_residual", rho.relation_residual(&self.inner))?;
        out.set_item("dim_z1", report.dim_z1)?;
        out.set_item("dim_b1", report.dim_b1)?;
        out.set_item("dim_h1", report.dim_h1)?;
        out.set_item("singular_gap", report.singular_gap)?;
        out.into_py_any(py)
    }

    fn __repr__(&self) -> String {
        let s: Vec<String> =
            self.inner.slopes.iter().map(|s| format!("{}/{}", s.q, s.p)).collect();
        format!("SeifertData({})", s.join(", "))
    }
}

/// Known skein-module dimension of a classical manifold, with citation.
#[pyfunction]
fn known(py: Python<'_>, label: &str) -> PyResult<Py<PyAny>> {
    let entry = lookup_known(label).map_err(err)?;
    to_py(py, &entry)
}

/// Labels the known-values table covers.
#[pyfunction]
fn known_manifolds() -> Vec<&'static str> {
    known_labels()
}

/// Parse the CLI slope syntax into `(p, q)` pairs.
#[pyfunction]
fn parse_slopes(text: &str) -> PyResult<Vec<(i64, i64)>> {
    parse_slope_list(text).map_err(err)
}

/// Sweep all instances with `p_i <= pmax`, cross-check the closed-form
/// counts against enumeration oracles, optionally streaming one JSON
/// report line per instance to ``path``.  Returns the summary.
#[pyfunction]
#[pyo3(signature = (pmax, qpolicy="full", path=None))]
fn census(py: Python<'_>, pmax: i64, qpolicy: &str, path: Option<&str>) -> PyResult<Py<PyAny>> {
    let policy: QPolicy = qpolicy.parse().map_err(PyValueError::new_err)?;
    let summary = match path {
        Some(p) => {
            let file = std::fs::File::create(p)
                .map_err(|e| PyValueError::new_err(format!("cannot create {p}: {e}")))?;
            let mut w = std::io::BufWriter::new(file);
            run_census(pmax, policy, &mut w).map_err(err)?
        }
        None => run_census(pmax, policy, &mut std::io::sink()).map_err(err)?,
    };
    to_py(py, &summary)
}

/// Unitary representation over an `S^2` base with at least four fibers:
/// rotation angles of the first `n - 3` fibers are free parameters.
/// Returns the quaternion images and the largest relation residual.
#[pyfunction]
fn su2_s2_rep(
    py: Python<'_>,
    slopes: Vec<(i64, i64)>,
    partial_angles: Vec<f64>,
) -> PyResult<Py<PyAny>> {
    let m = GeneralSeifertData::new(BaseSurface::S2, &slopes).map_err(err)?;
    let images = build_su2_s2base(&m, &partial_angles).map_err(err)?;
    let out = PyDict::new(py);
    let quats: Vec<[f64; 4]> = images.iter().map(|q| [q.a, q.b, q.c, q.d]).collect();
    out.set_item("fibers", quats)?;
    out.set_item("residual", su2_residual(&m, &images))?;
    out.into_py_any(py)
}

/// Unitary representation over an `RP^2` base from a choice of rotation
/// axes (unit 3-vectors, one per fiber).  Returns the fiber images, the
/// cross-cap image, the largest relation residual, the trace of
/// `c_1 c_2`, and the predicted trace interval.
#[pyfunction]
fn su2_rp2_rep(py: Python<'_>, slopes: Vec<(i64, i64)>, axes: Vec<[f64; 3]>) -> PyResult<Py<PyAny>> {
    let m = GeneralSeifertData::new(BaseSurface::RP2, &slopes).map_err(err)?;
    let quat_axes: Vec<Quaternion> = axes
        .iter()
        .map(|&[x, y, z]| {
            let n = (x * x + y * y + z * z).sqrt();
            if n < 1e-12 {
                return Err(PyValueError::new_err("axis must be a nonzero 3-vector"));
            }
            Ok(Quaternion::new(0.0, x / n, y / n, z / n))
        })
        .collect::<PyResult<_>>()?;
    let rep = build_rp2_rep(&m, &quat_axes).map_err(err)?;
    let (center, radius) = rp2_trace_interval(&m);
    let out = PyDict::new(py);
    let quats: Vec<[f64; 4]> = rep.fibers.iter().map(|q| [q.a, q.b, q.c, q.d]).collect();
    out.set_item("fibers", quats)?;
    out.set_item(
        "crosscap",
        [rep.crosscap.a, rep.crosscap.b, rep.crosscap.c, rep.crosscap.d],
    )?;
    out.set_item("residual", rep.residual(&m))?;
    let prod = rep.fibers[0] * rep.fibers[1];
    out.set_item("trace_c1c2", 2.0 * prod.a)?;
    out.set_item("trace_interval", (center, radius))?;
    out.into_py_any(py)
}

#[pymodule]
fn seifert_skein(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeifertData>()?;
    m.add_function(wrap_pyfunction!(known, m)?)?;
    m.add_function(wrap_pyfunction!(known_manifolds, m)?)?;
    m.add_function(wrap_pyfunction!(parse_slopes, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(su2_s2_rep, m)?)?;
    m.add_function(wrap_pyfunction!(su2_rp2_rep, m)?)?;
    m.add("DEFAULT_ENUMERATION_BOUND", DEFAULT_ENUMERATION_BOUND)?;
    Ok(())
}
