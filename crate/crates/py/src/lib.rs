use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use hvb::bundle_file::{parse_bundle, serialize_bundle};
use hvb::bundles::{decompose_bundle, end_bundle, hom_bundle, verify_suite, HomogeneousBundle, Suite};
use hvb::catalog;
use hvb::field::Field;
use hvb::hom_algebra::{self, DEFAULT_SEED};
use hvb::linalg::Matrix;
use hvb::module_rep::{self, Isomorphism, UnipotentModule};

fn err(e: hvb::error::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(name: &str) -> PyResult<Field> {
    name.parse().map_err(err)
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialized<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(ToString::to_string).collect()).collect()
}

/// Commuting nilpotent operators on a finite dimensional space.
#[pyclass(name = "Module", module = "hvb", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyUnipotentModule {
    inner: UnipotentModule,
}

impl From<UnipotentModule> for PyUnipotentModule {
    fn from(inner: UnipotentModule) -> Self {
        PyUnipotentModule { inner }
    }
}

#[pymethods]
impl PyUnipotentModule {
    /// Build from a list of square matrices, entries given as ints or strings like "3/4".
    #[new]
    #[pyo3(signature = (operators, field = "q", g = None))]
    fn new(operators: Vec<Vec<Vec<Bound<'_, PyAny>>>>, field: &str, g: Option<usize>) -> PyResult<Self> {
        let f = self::field(field)?;
        let g = g.unwrap_or(operators.len());
        let mut mats = Vec::with_capacity(operators.len());
        for op in &operators {
            let cols = op.first().map_or(0, Vec::len);
            let mut rows = Vec::with_capacity(op.len());
            for row in op {
                let mut out = Vec::with_capacity(row.len());
                for entry in row {
                    out.push(f.parse(&entry.str()?.to_cow()?).map_err(err)?);
                }
                rows.push(out);
            }
            mats.push(Matrix::from_rows(f, rows, cols).map_err(err)?);
        }
        UnipotentModule::new(g, mats).map(Self::from).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (r, g = 1, field = "q"))]
    fn jordan(r: usize, g: usize, field: &str) -> PyResult<Self> {
        UnipotentModule::jordan_in(g, r, self::field(field)?).map(Self::from).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (g, dim, field = "q"))]
    fn trivial(g: usize, dim: usize, field: &str) -> PyResult<Self> {
        Ok(UnipotentModule::trivial(g, dim, self::field(field)?).into())
    }

    /// `k[x_1..x_g]/I` for the monomial ideal generated by the given exponent vectors.
    #[staticmethod]
    #[pyo3(signature = (g, generators, field = "q"))]
    fn monomial(g: usize, generators: Vec<Vec<u32>>, field: &str) -> PyResult<Self> {
        UnipotentModule::from_monomial_ideal(g, &generators, self::field(field)?).map(Self::from).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (g, dim, seed, field = "q"))]
    fn random(g: usize, dim: usize, seed: u64, field: &str) -> PyResult<Self> {
        catalog::random_module(g, dim, seed, self::field(field)?).map(Self::from).map_err(err)
    }

    #[getter]
    fn g(&self) -> usize {
        self.inner.g()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn field(&self) -> String {
        self.inner.field().to_string()
    }

    fn operators(&self) -> Vec<Vec<Vec<String>>> {
        self.inner.operators().iter().map(matrix_rows).collect()
    }

    /// Jordan type, only defined for a single operator.
    fn partition(&self) -> PyResult<Vec<usize>> {
        self.inner.partition().map(|p| p.parts().to_vec()).map_err(err)
    }

    fn is_trivial(&self) -> bool {
        self.inner.is_trivial()
    }

    fn global_sections_dim(&self) -> usize {
        self.inner.global_sections_dim()
    }

    fn cosections_dim(&self) -> usize {
        self.inner.cosections_dim()
    }

    fn radical_series(&self) -> Vec<usize> {
        self.inner.radical_series().dims()
    }

    fn socle_series(&self) -> Vec<usize> {
        self.inner.socle_series().dims()
    }

    fn dual(&self) -> Self {
        self.inner.dual().into()
    }

    fn direct_sum(&self, other: PyRef<'_, Self>) -> PyResult<Self> {
        self.inner.direct_sum(&other.inner).map(Self::from).map_err(err)
    }

    fn tensor(&self, other: PyRef<'_, Self>) -> PyResult<Self> {
        self.inner.tensor(&other.inner).map(Self::from).map_err(err)
    }

    fn hom_dim(&self, other: PyRef<'_, Self>) -> PyResult<usize> {
        hom_algebra::hom_space(&self.inner, &other.inner).map(|h| h.dim()).map_err(err)
    }

    fn end_dim(&self) -> PyResult<usize> {
        hom_algebra::end_algebra(&self.inner).map(|e| e.dim()).map_err(err)
    }

    fn fingerprint<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let end = hom_algebra::end_algebra(&self.inner).map_err(err)?;
        let fp = hom_algebra::algebra_fingerprint(&end).map_err(err)?;
        serialized(py, &fp)
    }

    fn is_indecomposable(&self) -> PyResult<bool> {
        hom_algebra::is_indecomposable(&self.inner).map_err(err)
    }

    /// Krull-Schmidt factors, largest first.
    #[pyo3(signature = (seed = DEFAULT_SEED))]
    fn decompose(&self, seed: u64) -> PyResult<Vec<Self>> {
        let d = hom_algebra::decompose_module(&self.inner, seed).map_err(err)?;
        if !d.complete {
            return Err(PyValueError::new_err("decomposition did not finish"));
        }
        Ok(d.factors.into_iter().map(Self::from).collect())
    }

    /// True, False, or None when the randomized search was inconclusive.
    #[pyo3(signature = (other, seed = DEFAULT_SEED))]
    fn is_isomorphic(&self, other: PyRef<'_, Self>, seed: u64) -> PyResult<Option<bool>> {
        Ok(match module_rep::modules_isomorphic(&self.inner, &other.inner, seed).map_err(err)? {
            Isomorphism::Undecided => None,
            iso => Some(iso.is_yes()),
        })
    }

    fn __eq__(&self, other: PyRef<'_, Self>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Module(g={}, dim={}, field={})", self.inner.g(), self.inner.dim(), self.inner.field())
    }
}

/// A homogeneous bundle: a finite sum of line bundle labels tensored with unipotent modules.
#[pyclass(name = "Bundle", module = "hvb", frozen)]
pub struct PyBundle {
    inner: HomogeneousBundle,
}

#[pymethods]
impl PyBundle {
    /// Parse the `.hb` text format.
    #[staticmethod]
    #[pyo3(signature = (text, field = "q"))]
    fn parse(text: &str, field: &str) -> PyResult<Self> {
        parse_bundle(text, self::field(field)?).map(|inner| PyBundle { inner }).map_err(err)
    }

    fn to_text(&self) -> String {
        serialize_bundle(&self.inner)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn summands(&self) -> Vec<(Vec<i64>, PyUnipotentModule)> {
        self.inner.summands().iter().map(|(l, m)| (l.coords().to_vec(), m.clone().into())).collect()
    }

    fn hom_rank(&self, other: PyRef<'_, Self>) -> PyResult<usize> {
        hom_bundle(&self.inner, &other.inner).map(|h| h.rank()).map_err(err)
    }

    fn end_rank(&self) -> PyResult<usize> {
        end_bundle(&self.inner).map(|e| e.rank()).map_err(err)
    }

    #[pyo3(signature = (seed = DEFAULT_SEED))]
    fn decompose(&self, seed: u64) -> PyResult<Vec<PyBundle>> {
        let d = decompose_bundle(&self.inner, seed).map_err(err)?;
        if !d.complete {
            return Err(PyValueError::new_err("decomposition did not finish"));
        }
        Ok(d.factors.into_iter().map(|inner| PyBundle { inner }).collect())
    }

    /// Run a check suite ("all", "ranks" or "algebras") and return the report as a dict.
    #[pyo3(signature = (suite = "all", seed = DEFAULT_SEED))]
    fn verify<'py>(&self, py: Python<'py>, suite: &str, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let suite: Suite = suite.parse().map_err(err)?;
        let report = verify_suite(&self.inner, suite, seed).map_err(err)?;
        let out = serialized(py, &report)?;
        out.set_item("all_pass", report.all_pass())?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Bundle(rank={}, summands={})", self.inner.rank(), self.inner.summands().len())
    }
}

#[pyfunction]
#[pyo3(signature = (max_rank, field = "q"))]
fn enumerate_g1<'py>(py: Python<'py>, max_rank: usize, field: &str) -> PyResult<Bound<'py, PyAny>> {
    let entries = catalog::enumerate_g1(max_rank, self::field(field)?).map_err(err)?;
    serialized(py, &entries)
}

#[pyfunction]
#[pyo3(signature = (g_max = 3, samples = 200, seed = DEFAULT_SEED, field = "q"))]
fn classify<'py>(py: Python<'py>, g_max: usize, samples: usize, seed: u64, field: &str) -> PyResult<Bound<'py, PyAny>> {
    let report = catalog::classify_small_rank(g_max, samples, seed, self::field(field)?).map_err(err)?;
    serialized(py, &report)
}

/// Run the command line tool in-process, returning `(exit_code, output)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    hvb::cli::run(args)
}

#[pymodule]
#[pyo3(name = "hvb")]
fn hvb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUnipotentModule>()?;
    m.add_class::<PyBundle>()?;
    m.add_function(wrap_pyfunction!(enumerate_g1, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    Ok(())
}
