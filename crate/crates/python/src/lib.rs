//! Python bindings: complexes, query indexes, generators and the oracle.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use cat0rect::boundary::boundary_walk;
use cat0rect::complex::{validate_cat0, PointSpec, RawComplex, RawEdge, RectComplex, ValidationConfig};
use cat0rect::engine::{Breakpoint, GeodesicPath, QueryIndex};
use cat0rect::generate::{generate as gen, Family, GeneratorSpec, Lengths};
use cat0rect::io::StructureFile;
use cat0rect::oracle::{oracle_distance as oracle, OracleConfig};
use cat0rect::structures::StructureKind;

create_exception!(cat0rect, Cat0Error, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    Cat0Error::new_err(e.to_string())
}

type PointTuple = (usize, f64, f64);

fn point(p: PointTuple) -> PointSpec {
    PointSpec::new(p.0, p.1, p.2)
}

/// A rectangular complex.
#[pyclass(name = "Complex", module = "cat0rect", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyComplex {
    inner: RectComplex,
}

#[pymethods]
impl PyComplex {
    /// `edges` holds `(u, v)` or `(u, v, length)` tuples, `faces` 4-cycles.
    #[new]
    fn new(vertices: usize, edges: Vec<Vec<f64>>, faces: Vec<[usize; 4]>) -> PyResult<Self> {
        let edges = edges
            .into_iter()
            .map(|e| match e.as_slice() {
                [u, v] => Ok(RawEdge::Unit(*u as usize, *v as usize)),
                [u, v, l] => Ok(RawEdge::Weighted(*u as usize, *v as usize, *l)),
                _ => Err(err("an edge is (u, v) or (u, v, length)")),
            })
            .collect::<PyResult<Vec<_>>>()?;
        let raw = RawComplex {
            vertices,
            edges,
            faces,
        };
        Ok(Self {
            inner: RectComplex::build(&raw).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: serde_json::from_str(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().iter().map(|e| (e.u, e.v, e.length)).collect()
    }

    #[getter]
    fn faces(&self) -> Vec<[usize; 4]> {
        self.inner.faces().to_vec()
    }

    /// Raises `Cat0Error` unless the complex is CAT(0); returns the report
    /// as JSON otherwise.
    fn validate(&self) -> PyResult<String> {
        let report = validate_cat0(&self.inner, &ValidationConfig::default()).map_err(err)?;
        serde_json::to_string(&report).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Complex(vertices={}, edges={}, faces={})",
            self.inner.vertex_count(),
            self.inner.edges().len(),
            self.inner.faces().len()
        )
    }
}

/// A shortest path: endpoints as `(face, alpha, beta)`, vertices as ints.
#[pyclass(name = "Path", module = "cat0rect", frozen)]
struct PyPath {
    inner: GeodesicPath,
}

#[pymethods]
impl PyPath {
    #[getter]
    fn length(&self) -> f64 {
        self.inner.length
    }

    #[getter]
    fn vertices(&self) -> Vec<usize> {
        self.inner.interior_vertices()
    }

    #[getter]
    fn gates(&self) -> (usize, usize) {
        self.inner.gates
    }

    #[getter]
    fn breakpoints<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner
            .breakpoints
            .iter()
            .map(|b| match b {
                Breakpoint::Point(p) => Ok((p.face, p.alpha, p.beta).into_pyobject(py)?.into_any()),
                Breakpoint::Vertex(v) => Ok(v.into_pyobject(py)?.into_any()),
            })
            .collect()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Path(length={}, vertices={:?})", self.inner.length, self.inner.interior_vertices())
    }
}

/// A complex with its query structure.
#[pyclass(name = "Index", module = "cat0rect", frozen)]
struct PyIndex {
    inner: QueryIndex,
}

#[pymethods]
impl PyIndex {
    /// `kind` is `"dense"`, `"treeproduct"` or `None` for automatic choice.
    #[new]
    #[pyo3(signature = (complex, kind = None))]
    fn new(complex: &PyComplex, kind: Option<&str>) -> PyResult<Self> {
        let kind = match kind {
            None => None,
            Some("dense") => Some(StructureKind::Dense),
            Some("treeproduct") => Some(StructureKind::TreeProduct),
            Some(other) => return Err(err(format!("unknown structure kind {other:?}"))),
        };
        validate_cat0(&complex.inner, &ValidationConfig::default()).map_err(err)?;
        Ok(Self {
            inner: QueryIndex::new(complex.inner.clone(), kind).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: StructureFile = serde_json::from_str(text).map_err(err)?;
        Ok(Self {
            inner: file.into_index().map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&StructureFile::new(&self.inner)).map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.structure.kind().name()
    }

    #[getter]
    fn complex(&self) -> PyComplex {
        PyComplex {
            inner: self.inner.complex.clone(),
        }
    }

    fn query(&self, x: PointTuple, y: PointTuple) -> PyResult<PyPath> {
        Ok(PyPath {
            inner: self.inner.query(&point(x), &point(y)).map_err(err)?,
        })
    }

    fn distance(&self, x: PointTuple, y: PointTuple) -> PyResult<f64> {
        self.inner.distance(&point(x), &point(y)).map_err(err)
    }

    /// Graph distance between two vertices.
    fn graph_distance(&self, p: usize, q: usize) -> PyResult<u32> {
        let n = self.inner.complex.vertex_count();
        if p >= n || q >= n {
            return Err(err(format!("vertex out of range (vertex count {n})")));
        }
        Ok(self.inner.structure.dist(p, q))
    }

    /// The two boundary paths of the interval between vertices `p` and `q`.
    fn boundary(&self, p: usize, q: usize) -> PyResult<(Vec<usize>, Vec<usize>)> {
        let b = boundary_walk(&self.inner.structure, p, q).map_err(err)?;
        Ok((b.pi1, b.pi2))
    }
}

#[pyfunction]
#[pyo3(signature = (family, n, seed = 0, lengths = None))]
fn generate(family: &str, n: usize, seed: u64, lengths: Option<(f64, f64)>) -> PyResult<PyComplex> {
    let family: Family = family.parse().map_err(err)?;
    let lengths = match lengths {
        None => Lengths::Unit,
        Some((a, b)) => Lengths::Uniform { a, b },
    };
    let spec = GeneratorSpec {
        family,
        n,
        seed,
        lengths,
    };
    Ok(PyComplex {
        inner: gen(&spec).map_err(err)?,
    })
}

#[pyfunction]
fn oracle_distance(complex: &PyComplex, x: PointTuple, y: PointTuple, h: f64) -> PyResult<f64> {
    oracle(&complex.inner, &point(x), &point(y), &OracleConfig::new(h)).map_err(err)
}

#[pymodule]
#[pyo3(name = "cat0rect")]
fn cat0rect_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyComplex>()?;
    m.add_class::<PyIndex>()?;
    m.add_class::<PyPath>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_distance, m)?)?;
    m.add("Cat0Error", m.py().get_type::<Cat0Error>())?;
    Ok(())
}
