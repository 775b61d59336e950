//! Python bindings for the orthoflow core crate.

use ::orthoflow as core;
use core::action_engine::{self, BasicConstruction, ProductSpherePoint};
use core::circleflow::{self, CircleFlow, FlowFunctionPair, FlowKind, VectorField};
use core::ledger::{self, ParabolicKind};
use core::numkit::Tolerances;
use core::orbit_lab;
use core::report::Check;
use core::sopq;
use core::verify::{self as verify_mod, Suite, SuiteConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn signature(p: usize, q: usize) -> PyResult<sopq::Signature> {
    sopq::Signature::new(p, q).map_err(err)
}

fn check_dict<'py>(py: Python<'py>, c: &Check) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("name", &c.name)?;
    d.set_item("value", c.value)?;
    d.set_item("threshold", c.threshold)?;
    d.set_item("pass", c.pass)?;
    Ok(d)
}

/// Element of SO°(p,q) as a (p+q)×(p+q) matrix.
#[pyclass(name = "GroupElement", module = "orthoflow", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGroupElement {
    inner: sopq::GroupElement,
}

#[pymethods]
impl PyGroupElement {
    /// exp(Σ c_i B_i) over the algebra basis (rotations, then boosts).
    #[staticmethod]
    fn from_coeffs(p: usize, q: usize, coeffs: Vec<f64>) -> PyResult<Self> {
        let sig = signature(p, q)?;
        if coeffs.len() != sig.algebra_dim() {
            return Err(PyValueError::new_err(format!(
                "expected {} coefficients, got {}",
                sig.algebra_dim(),
                coeffs.len()
            )));
        }
        let inner = sopq::algebra_element(sig, &coeffs).try_exp().map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_matrix(p: usize, q: usize, rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let sig = signature(p, q)?;
        let n = rows.len();
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        let m = core::DenseMatrix::new(n, entries.len() / n.max(1), entries).map_err(err)?;
        let inner = sopq::is_in_group(&m, sig, &Tolerances::default()).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn identity(p: usize, q: usize) -> PyResult<Self> {
        Ok(Self { inner: sopq::GroupElement::identity(signature(p, q)?) })
    }

    /// The boost m(θ) in the (e1, ε1) plane.
    #[staticmethod]
    fn boost(p: usize, q: usize, theta: f64) -> PyResult<Self> {
        Ok(Self { inner: sopq::boost(signature(p, q)?, theta).map_err(err)? })
    }

    #[staticmethod]
    fn random(p: usize, q: usize, seed: u64, max_norm: f64) -> PyResult<Self> {
        let sig = signature(p, q)?;
        Ok(Self { inner: core::sampling::random_group(sig, &mut core::sampling::rng(seed), max_norm) })
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.sig().p()
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.sig().q()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        self.inner.matrix().to_rows()
    }

    fn compose(&self, other: &PyGroupElement) -> Self {
        Self { inner: self.inner.compose(&other.inner) }
    }

    fn inverse(&self) -> Self {
        Self { inner: self.inner.inverse() }
    }

    fn apply(&self, v: Vec<f64>) -> PyResult<Vec<f64>> {
        if v.len() != self.inner.sig().n() {
            return Err(PyValueError::new_err(format!("expected {} coordinates", self.inner.sig().n())));
        }
        Ok(self.inner.apply(&v))
    }

    fn __matmul__(&self, other: &PyGroupElement) -> Self {
        self.compose(other)
    }

    fn __repr__(&self) -> String {
        format!("GroupElement(p={}, q={})", self.p(), self.q())
    }
}

/// Basic circle flow: "basicJ1" (two fixed points) or "basicJ1J2" (four).
#[pyclass(name = "CircleFlow", module = "orthoflow", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCircleFlow {
    inner: CircleFlow,
}

#[pymethods]
impl PyCircleFlow {
    #[new]
    #[pyo3(signature = (kind = "basicJ1", n = 1, a = 0.0))]
    fn new(kind: &str, n: u32, a: f64) -> PyResult<Self> {
        let kind: FlowKind = kind.parse().map_err(err)?;
        Ok(Self { inner: circleflow::make_flow(kind, n, a).map_err(err)? })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().name()
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    fn field(&self, phi: f64) -> f64 {
        self.inner.value(phi)
    }

    fn zeros(&self) -> Vec<f64> {
        self.inner.zeros()
    }

    fn jacobians(&self) -> Vec<f64> {
        self.inner.jacobians()
    }

    fn flow_map(&self, theta: f64, phi: f64) -> PyResult<f64> {
        self.inner.flow_map(theta, phi).map_err(err)
    }

    fn f(&self, phi: f64) -> PyResult<f64> {
        circleflow::f_of(&self.inner, phi).map_err(err)
    }

    /// f̃ as a normalized pair (a, b).
    fn f_tilde(&self, phi: f64) -> PyResult<(f64, f64)> {
        let t = circleflow::f_tilde_of(&self.inner, phi).map_err(err)?;
        Ok((t.a(), t.b()))
    }

    fn mu_pv(&self) -> PyResult<f64> {
        self.inner.pv_global_invariant().map_err(err)
    }

    /// (conjugate, detail): detail is the sampled defect or the failure certificate.
    fn conjugate_to(&self, other: &PyCircleFlow) -> PyResult<(bool, String)> {
        match circleflow::conjugacy_map(self.inner, other.inner).map_err(err)? {
            circleflow::ConjugacyOutcome::Conjugate(m) => Ok((true, format!("defect {:e}", m.defect))),
            circleflow::ConjugacyOutcome::NotConjugate(f) => Ok((false, format!("{}: {}", f.invariant, f.detail))),
        }
    }

    fn __repr__(&self) -> String {
        format!("CircleFlow(kind='{}', n={}, a={})", self.kind(), self.n(), self.a())
    }
}

fn product_point(v: Vec<f64>, w: Vec<f64>) -> PyResult<ProductSpherePoint> {
    ProductSpherePoint::new(v, w).map_err(err)
}

/// g ⋆ (v, w) on S^p × S^{q−1} for the basic construction of `flow`.
#[pyfunction]
fn act_product(g: &PyGroupElement, v: Vec<f64>, w: Vec<f64>, flow: &PyCircleFlow) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let x = product_point(v, w)?;
    let pair = FlowFunctionPair::new(flow.inner);
    let y = action_engine::act_product(&g.inner, &x, &pair, &Tolerances::default()).map_err(err)?;
    Ok((y.v().to_vec(), y.w().to_vec()))
}

/// (cos φ e1 + sin φ N, ε1).
#[pyfunction]
fn slice_point(p: usize, q: usize, phi: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let x = ProductSpherePoint::slice(signature(p, q)?, phi);
    Ok((x.v().to_vec(), x.w().to_vec()))
}

/// g = k m(θ) u against f e1 + ε1; returns {k, theta, u, gap, margin}.
#[pyfunction]
fn decompose<'py>(py: Python<'py>, g: &PyGroupElement, f: f64) -> PyResult<Bound<'py, PyDict>> {
    let d = action_engine::decompose(&g.inner, f, &Tolerances::default()).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("k", PyGroupElement { inner: d.k.clone() })?;
    out.set_item("theta", d.theta)?;
    out.set_item("u", PyGroupElement { inner: d.u.clone() })?;
    out.set_item("gap", d.gap)?;
    out.set_item("margin", d.margin())?;
    out.set_item("residual", d.reconstruction_residual(&g.inner))?;
    Ok(out)
}

/// Orbit data at a product-sphere point for the basic construction.
#[pyfunction]
#[pyo3(signature = (v, w, n = 1, a = 0.0))]
fn classify_orbit<'py>(py: Python<'py>, v: Vec<f64>, w: Vec<f64>, n: u32, a: f64) -> PyResult<Bound<'py, PyDict>> {
    let x = product_point(v, w)?;
    let sig = signature(x.v().len() - 1, x.w().len())?;
    let tol = Tolerances::default();
    let flow = circleflow::make_flow(FlowKind::BasicJ1, n, a).map_err(err)?;
    let action = BasicConstruction::new(sig, FlowFunctionPair::new(flow), tol).map_err(err)?;
    let r = orbit_lab::classify_orbit(&action, &x, &tol).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("dimension", r.dimension)?;
    out.set_item("isotropy_dim", r.isotropy_dim)?;
    out.set_item("orbit_type", format!("{:?}", r.orbit_type))?;
    out.set_item("stabilizer", r.stabilizer.map(|s| format!("{s:?}")))?;
    out.set_item("f_tilde", r.f_tilde.map(|t| (t.a(), t.b())))?;
    out.set_item("gap", r.gap)?;
    Ok(out)
}

/// Parabolic dimension counts for kind "NullLine" or "MaxIsotropic".
#[pyfunction]
fn parabolic_dims<'py>(py: Python<'py>, kind: &str, p: u32, q: u32) -> PyResult<Bound<'py, PyDict>> {
    let kind: ParabolicKind = kind.parse().map_err(err)?;
    let d = ledger::parabolic_dims(kind, p, q).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("p", d.p)?;
    out.set_item("q", d.q)?;
    out.set_item("dim_m", d.dim_m)?;
    out.set_item("dim_a", d.dim_a)?;
    out.set_item("dim_p_theta", d.dim_p_theta)?;
    out.set_item("codim", d.codim)?;
    out.set_item("closed_form", d.closed_form)?;
    out.set_item("agrees", d.agrees())?;
    Ok(out)
}

/// SO(p) subgroup table evaluated for p in [lo, hi]: (p, subgroup, orbit dim, q range).
#[pyfunction]
#[pyo3(signature = (lo = 3, hi = 9))]
fn table1(lo: u32, hi: u32) -> Vec<(u32, String, i64, (i64, i64))> {
    ledger::table1_evaluated(lo..=hi).into_iter().map(|r| (r.p, r.subgroup_name, r.dim_orbit, r.q_range)).collect()
}

/// Runs a verification suite and returns its checks as dicts.
#[pyfunction]
#[pyo3(signature = (suite = "all", p = 3, q = 3, n = 1, a = 0.0, seed = 42, samples = 100))]
#[allow(clippy::too_many_arguments)]
fn verify<'py>(
    py: Python<'py>,
    suite: &str,
    p: usize,
    q: usize,
    n: u32,
    a: f64,
    seed: u64,
    samples: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let suite: Suite = suite.parse().map_err(err)?;
    let cfg = SuiteConfig::new(signature(p, q)?, n, a, seed, samples);
    let checks = verify_mod::run_suite(suite, &cfg).map_err(err)?;
    checks.iter().map(|c| check_dict(py, c)).collect()
}

/// Runs the command line (without the program name); returns (exit code, stdout, stderr).
#[pyfunction]
#[pyo3(signature = (args, seed_env = None))]
fn cli(args: Vec<String>, seed_env: Option<String>) -> (i32, String, String) {
    let argv = std::iter::once("orthoflow".to_string()).chain(args);
    let out = core::cli::dispatch(argv, seed_env.as_deref());
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn orthoflow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroupElement>()?;
    m.add_class::<PyCircleFlow>()?;
    m.add_function(wrap_pyfunction!(act_product, m)?)?;
    m.add_function(wrap_pyfunction!(slice_point, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(classify_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(parabolic_dims, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    Ok(())
}
