use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use tc::cones::{minus_one_classes, Budget};
use tc::coxring::{self, CoxPresentation, MdsReport, MdsStatus};
use tc::fan::{self as fans, Fan as CoreFan};
use tc::io::{self, Input};
use tc::klyachko::{self, ToricVectorBundle};
use tc::lattice::{to_big, Field};
use tc::report::{self, Example, Options, Position};

fn err(e: tc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(characteristic: u64) -> PyResult<Field> {
    Field::from_characteristic(characteristic).map_err(err)
}

/// A complete simplicial fan with primitive integer rays.
#[pyclass(frozen, name = "Fan")]
struct PyFan {
    inner: CoreFan,
}

#[pymethods]
impl PyFan {
    #[new]
    fn new(dim: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> PyResult<Self> {
        let rays = rays.iter().map(|r| to_big(r)).collect();
        Ok(PyFan { inner: CoreFan::new(dim, rays, cones).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyFan { inner: io::parse_input(text, None).map_err(err)?.fan().clone() })
    }

    #[staticmethod]
    fn projective_space(d: usize) -> PyResult<Self> {
        Ok(PyFan { inner: fans::projective_space_fan(d).map_err(err)? })
    }

    #[staticmethod]
    fn example_1_5() -> PyResult<Self> {
        Ok(PyFan { inner: fans::example_1_5_fan().map_err(err)? })
    }

    #[staticmethod]
    fn example_4_2() -> PyResult<Self> {
        Ok(PyFan { inner: fans::example_4_2_fan().map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn n_rays(&self) -> usize {
        self.inner.n_rays()
    }

    /// Ray generators as decimal strings, so large coordinates survive.
    #[getter]
    fn rays(&self) -> Vec<Vec<String>> {
        self.inner.rays().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }

    #[getter]
    fn cones(&self) -> Vec<Vec<usize>> {
        self.inner.cones().iter().map(|c| c.rays().to_vec()).collect()
    }

    fn is_smooth(&self) -> bool {
        fans::is_smooth(&self.inner).smooth
    }

    fn is_complete(&self) -> PyResult<bool> {
        fans::is_complete(&self.inner).map_err(err)
    }

    fn is_projective(&self) -> PyResult<bool> {
        Ok(fans::is_projective(&self.inner).map_err(err)?.projective)
    }

    fn stellar_subdivide(&self, v: Vec<i64>) -> PyResult<PyFan> {
        Ok(PyFan { inner: fans::stellar_subdivide(&self.inner, &to_big(&v)).map_err(err)? })
    }

    fn extend(&self) -> PyResult<PyFan> {
        Ok(PyFan { inner: fans::extend_fan_theorem14(&self.inner).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::to_pretty(&io::fan_to_json(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("Fan(dim={}, rays={}, cones={})", self.inner.dim(), self.inner.n_rays(), self.inner.cones().len())
    }
}

/// A toric vector bundle given by one single-step filtration per ray.
#[pyclass(frozen, name = "Bundle")]
struct PyBundle {
    inner: ToricVectorBundle,
}

#[pymethods]
impl PyBundle {
    #[staticmethod]
    #[pyo3(signature = (text, characteristic=None))]
    fn from_json(text: &str, characteristic: Option<u64>) -> PyResult<Self> {
        match io::parse_input(text, characteristic).map_err(err)? {
            Input::Bundle(b) => Ok(PyBundle { inner: b }),
            Input::Fan(_) => Err(PyValueError::new_err("input describes a fan without filtrations")),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (fan, characteristic=0))]
    fn cotangent(fan: &PyFan, characteristic: u64) -> PyResult<Self> {
        Ok(PyBundle { inner: klyachko::cotangent_bundle(&fan.inner, field(characteristic)?).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (fan, characteristic=0))]
    fn tangent(fan: &PyFan, characteristic: u64) -> PyResult<Self> {
        Ok(PyBundle { inner: klyachko::tangent_bundle(&fan.inner, field(characteristic)?).map_err(err)? })
    }

    /// Nine sampled general planes on the 11-ray surface, two zero rays.
    #[staticmethod]
    #[pyo3(signature = (seed=1, characteristic=0))]
    fn example_1_5(seed: u64, characteristic: u64) -> PyResult<Self> {
        let (b, _) = tc::arrangement::example_1_5_bundle(field(characteristic)?, seed).map_err(err)?;
        Ok(PyBundle { inner: b })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn characteristic(&self) -> u64 {
        self.inner.field().characteristic()
    }

    #[getter]
    fn fan(&self) -> PyFan {
        PyFan { inner: self.inner.fan().clone() }
    }

    fn zero_rays(&self) -> Vec<usize> {
        self.inner.zero_rays()
    }

    fn coincidences(&self) -> Vec<Vec<usize>> {
        self.inner.coincidences()
    }

    fn normalize(&self) -> PyBundle {
        PyBundle { inner: self.inner.normalize() }
    }

    fn is_compatible(&self) -> PyResult<bool> {
        Ok(klyachko::check_compatibility(&self.inner).map_err(err)?.is_compatible())
    }

    fn cox_presentation(&self) -> PyResult<PyCoxPresentation> {
        Ok(PyCoxPresentation { inner: coxring::cox_presentation(&self.inner.normalize()).map_err(err)? })
    }

    fn mds_report(&self) -> PyResult<PyMdsReport> {
        Ok(PyMdsReport { inner: coxring::bundle_mds_report(&self.inner.normalize()).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::to_pretty(&io::bundle_to_json(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("Bundle(rank={}, rays={}, char={})", self.inner.rank(), self.inner.fan().n_rays(), self.characteristic())
    }
}

/// Generators, relations and grading of the Cox ring of P(E) over the blowup base.
#[pyclass(frozen, name = "CoxPresentation")]
struct PyCoxPresentation {
    inner: CoxPresentation,
}

#[pymethods]
impl PyCoxPresentation {
    #[getter]
    fn base(&self) -> String {
        self.inner.base.name.clone()
    }

    #[getter]
    fn class_group_rank(&self) -> usize {
        self.inner.class_group.rank()
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.inner.generators().iter().map(|a| a.name.clone()).collect()
    }

    #[getter]
    fn free_variables(&self) -> Vec<String> {
        self.inner.free_variables.iter().map(|&i| self.inner.atoms[i].name.clone()).collect()
    }

    #[getter]
    fn relations(&self) -> Vec<String> {
        self.inner.relations.iter().map(|r| self.inner.format_relation(r)).collect()
    }

    #[getter]
    fn annotations(&self) -> Vec<String> {
        self.inner.annotations.clone()
    }

    /// Degree of a named generator as a vector in the class group basis.
    fn degree(&self, name: &str) -> PyResult<Vec<i64>> {
        self.inner
            .atoms
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.degree.0.clone())
            .ok_or_else(|| PyValueError::new_err(format!("no generator named {name:?}")))
    }

    fn is_homogeneous(&self) -> bool {
        self.inner.is_homogeneous()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Mori dream space verdict with its evidence.
#[pyclass(frozen, name = "MdsReport")]
struct PyMdsReport {
    inner: MdsReport,
}

#[pymethods]
impl PyMdsReport {
    /// One of "MDS", "Not MDS" or "Unknown".
    #[getter]
    fn status(&self) -> String {
        self.inner.verdict.status.to_string()
    }

    #[getter]
    fn is_mds(&self) -> Option<bool> {
        match self.inner.verdict.status {
            MdsStatus::Mds => Some(true),
            MdsStatus::NotMds => Some(false),
            MdsStatus::Unknown => None,
        }
    }

    #[getter]
    fn conditional(&self) -> bool {
        self.inner.verdict.conditional
    }

    #[getter]
    fn citations(&self) -> Vec<String> {
        self.inner.verdict.citations.clone()
    }

    #[getter]
    fn reasons(&self) -> Vec<String> {
        self.inner.verdict.reasons.clone()
    }

    #[getter]
    fn totaro_rays(&self) -> Option<Vec<usize>> {
        self.inner.totaro_rays.clone()
    }

    #[getter]
    fn reductions(&self) -> Vec<String> {
        self.inner.reductions.iter().map(|r| r.describe()).collect()
    }

    #[getter]
    fn annotations(&self) -> Vec<String> {
        self.inner.annotations.clone()
    }

    fn summary(&self) -> String {
        self.inner.verdict.summary()
    }

    fn __repr__(&self) -> String {
        format!("MdsReport({})", self.summary())
    }
}

/// Verdict for the blowup of `P^(r-1)` at `s` points in the given position.
#[pyfunction]
#[pyo3(signature = (r, s, position="very-general"))]
fn classify_points(r: usize, s: usize, position: &str) -> PyResult<(String, bool)> {
    let pos: Position = position.parse().map_err(err)?;
    let v = coxring::mds_classify(r, s, pos.flags());
    Ok((v.status.to_string(), v.conditional))
}

/// Whether `1/r + 1/(s-r) <= 1/2`.
#[pyfunction]
fn threshold_fails(r: usize, s: usize) -> bool {
    coxring::threshold_fails(r, s)
}

/// Canonical `(-1)`-classes `(d, [m_1..m_s])` reached within `depth` Cremona levels.
#[pyfunction]
#[pyo3(signature = (s=9, depth=3))]
fn minus_one_curves(s: usize, depth: usize) -> PyResult<Vec<(i64, Vec<i64>)>> {
    let e = minus_one_classes(s, Budget::depth(depth)).map_err(err)?;
    Ok(e.classes().into_iter().map(|c| (c.degree, c.mults.clone())).collect())
}

/// Full report on a built-in example, rendered as text or JSON.
#[pyfunction]
#[pyo3(signature = (name, format="text", characteristic=0, seed=1, budget=5, dim=None, rank=None))]
fn example_report(
    name: &str,
    format: &str,
    characteristic: u64,
    seed: u64,
    budget: usize,
    dim: Option<usize>,
    rank: Option<usize>,
) -> PyResult<String> {
    let need = |v: Option<usize>, what: &str| v.ok_or_else(|| PyValueError::new_err(format!("{name} needs {what}")));
    let ex = match name {
        "p2-cotangent" => Example::P2Cotangent,
        "example-1.5" => Example::Example15,
        "example-4.2" => Example::Example42,
        "theorem-1.4" => Example::Theorem14 { dim: need(dim, "dim")? },
        "kapranov" => Example::Kapranov { rank: need(rank, "rank")? },
        "losev-manin" => Example::LosevManin { dim: need(dim, "dim")? },
        other => return Err(PyValueError::new_err(format!("unknown example {other:?}"))),
    };
    if budget == 0 || budget > report::MAX_BUDGET {
        return Err(PyValueError::new_err(format!("budget must be between 1 and {}", report::MAX_BUDGET)));
    }
    let opts = Options { field: field(characteristic)?, seed, budget };
    let rep = report::example_report(&ex, &opts).map_err(err)?;
    match format {
        "text" => Ok(rep.to_text()),
        "json" => Ok(rep.to_json()),
        other => Err(PyValueError::new_err(format!("unknown format {other:?}"))),
    }
}

#[pymodule]
fn toric_cox(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFan>()?;
    m.add_class::<PyBundle>()?;
    m.add_class::<PyCoxPresentation>()?;
    m.add_class::<PyMdsReport>()?;
    m.add_function(wrap_pyfunction!(classify_points, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_fails, m)?)?;
    m.add_function(wrap_pyfunction!(minus_one_curves, m)?)?;
    m.add_function(wrap_pyfunction!(example_report, m)?)?;
    Ok(())
}
