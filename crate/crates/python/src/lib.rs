//! Python bindings: laws, their transforms, order tests, tail bounds,
//! family diagnostics, binary experiments and Chacon–Walsh embeddings.
//!
//! Tolerance arguments default to `$IQCALC_TOL` or 1e-9. Invalid input
//! raises `ValueError`; solver failures raise `ArithmeticError`.

use iqcalc::experiments as ex;
use iqcalc::pwl::default_tol;
use iqcalc::{limits, orders, skorokhod};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyType;
use serde::Serialize;

fn err(e: iqcalc::Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializes through JSON into plain Python dicts and lists.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(json_err)?;
    py.import("json")?.call_method1("loads", (s,))
}

fn tol_or_default(tol: Option<f64>) -> f64 {
    tol.unwrap_or_else(default_tol)
}

/// A finitely supported probability law.
#[pyclass(name = "Distribution", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct Distribution(iqcalc::AtomicDistribution);

#[pymethods]
impl Distribution {
    /// From `(location, mass)` pairs; masses must sum to 1.
    #[new]
    fn new(atoms: Vec<(f64, f64)>) -> PyResult<Self> {
        iqcalc::AtomicDistribution::new(atoms).map(Self).map_err(err)
    }

    /// Empirical law of `values`, optionally weighted.
    #[classmethod]
    #[pyo3(signature = (values, weights=None))]
    fn from_samples(_cls: &Bound<'_, PyType>, values: Vec<f64>, weights: Option<Vec<f64>>) -> PyResult<Self> {
        iqcalc::AtomicDistribution::from_samples(&values, weights.as_deref())
            .map(Self)
            .map_err(err)
    }

    #[classmethod]
    fn dirac(_cls: &Bound<'_, PyType>, c: f64) -> PyResult<Self> {
        iqcalc::AtomicDistribution::dirac(c).map(Self).map_err(err)
    }

    #[classmethod]
    fn from_json(_cls: &Bound<'_, PyType>, text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    /// The law whose integrated distribution function is `f`.
    #[classmethod]
    fn from_idf(_cls: &Bound<'_, PyType>, f: &ConvexPwl) -> PyResult<Self> {
        iqcalc::AtomicDistribution::from_idf(&f.0).map(Self).map_err(err)
    }

    /// The law whose integrated quantile function is `f`.
    #[classmethod]
    fn from_iqf(_cls: &Bound<'_, PyType>, f: &ConvexPwl) -> PyResult<Self> {
        iqcalc::AtomicDistribution::from_iqf(&f.0).map(Self).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn atoms(&self) -> Vec<(f64, f64)> {
        self.0.atoms().collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        let atoms: Vec<String> = self.0.atoms().map(|(x, p)| format!("({x}, {p})")).collect();
        format!("Distribution([{}])", atoms.join(", "))
    }

    fn cdf(&self, x: f64) -> f64 {
        self.0.cdf(x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.0.cdf_left(x)
    }

    fn quantile_left(&self, u: f64) -> PyResult<f64> {
        self.0.quantile_left(u).map_err(err)
    }

    fn quantile_right(&self, u: f64) -> PyResult<f64> {
        self.0.quantile_right(u).map_err(err)
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn variance(&self) -> f64 {
        self.0.variance()
    }

    fn second_moment(&self) -> f64 {
        self.0.second_moment()
    }

    fn negate(&self) -> Self {
        Self(self.0.negate())
    }

    fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    fn idf(&self) -> ConvexPwl {
        ConvexPwl(self.0.idf())
    }

    fn iqf(&self) -> ConvexPwl {
        ConvexPwl(self.0.iqf())
    }

    /// `Q - Q(0)`, the absolute Lorenz curve.
    fn iqf_shift0(&self) -> ConvexPwl {
        ConvexPwl(self.0.iqf_shift0())
    }

    /// `Q - Q(1)`.
    fn iqf_shift1(&self) -> ConvexPwl {
        ConvexPwl(self.0.iqf_shift1())
    }

    /// `E[(x - X)+]`.
    fn psi(&self, x: f64) -> f64 {
        self.0.psi(x)
    }

    /// `E[(X - x)+]`.
    fn stop_loss(&self, x: f64) -> f64 {
        self.0.stop_loss(x)
    }

    /// `-E|x - X|`.
    fn potential(&self, x: f64) -> f64 {
        self.0.potential(x)
    }

    fn lorenz(&self, u: f64) -> PyResult<f64> {
        self.0.lorenz(u).map_err(err)
    }

    fn cvar(&self, u: f64) -> PyResult<f64> {
        self.0.cvar(u).map_err(err)
    }

    fn hardy_littlewood(&self, u: f64) -> PyResult<f64> {
        self.0.hardy_littlewood(u).map_err(err)
    }
}

/// Convex piecewise-linear function; callable.
#[pyclass(name = "ConvexPwl", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct ConvexPwl(iqcalc::ConvexPwl);

#[pymethods]
impl ConvexPwl {
    #[classmethod]
    fn from_json(_cls: &Bound<'_, PyType>, text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn __call__(&self, x: f64) -> f64 {
        self.0.evaluate(x)
    }

    fn vertices(&self) -> Vec<(f64, f64)> {
        self.0.vertices().collect()
    }

    /// Slopes to the left of the first and right of the last breakpoint;
    /// `None` where the function is `+inf` beyond.
    fn tail_slopes(&self) -> (Option<f64>, Option<f64>) {
        (self.0.left_slope(), self.0.right_slope())
    }

    /// `[lo, hi]` subdifferential at `x`.
    fn subdifferential(&self, x: f64) -> PyResult<(f64, f64)> {
        self.0.subdifferential(x).map(|i| (i.lo, i.hi)).map_err(err)
    }

    /// Legendre–Fenchel conjugate.
    fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    fn __repr__(&self) -> String {
        format!("ConvexPwl({:?})", self.vertices())
    }
}

/// `(verdict, witness_u)`; the witness is a level where dominance fails.
#[pyfunction]
#[pyo3(signature = (kind, x, y, tol=None))]
fn order(kind: &str, x: &Distribution, y: &Distribution, tol: Option<f64>) -> PyResult<(bool, Option<f64>)> {
    let t = tol_or_default(tol);
    let v = match kind {
        "icx" => orders::icx(&x.0, &y.0, t),
        "decx" => orders::decx(&x.0, &y.0, t),
        "cx" => orders::cx(&x.0, &y.0, t),
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown order {kind:?}; use icx, decx or cx"
            )))
        }
    };
    Ok((v.verdict, v.witness_u))
}

#[pyfunction]
#[pyo3(signature = (x, y, tol=None))]
fn leq_icx(x: &Distribution, y: &Distribution, tol: Option<f64>) -> bool {
    orders::leq_icx(&x.0, &y.0, tol_or_default(tol))
}

#[pyfunction]
#[pyo3(signature = (x, y, tol=None))]
fn leq_decx(x: &Distribution, y: &Distribution, tol: Option<f64>) -> bool {
    orders::leq_decx(&x.0, &y.0, tol_or_default(tol))
}

#[pyfunction]
#[pyo3(signature = (x, y, tol=None))]
fn leq_cx(x: &Distribution, y: &Distribution, tol: Option<f64>) -> bool {
    orders::leq_cx(&x.0, &y.0, tol_or_default(tol))
}

/// Cantelli bound for mean-zero `X` with standard deviation `sigma`, and
/// the two-point law attaining it.
#[pyfunction]
fn cantelli_extremal(sigma: f64, t: f64) -> PyResult<(f64, Distribution)> {
    orders::cantelli_extremal(sigma, t)
        .map(|(p, d)| (p, Distribution(d)))
        .map_err(err)
}

/// Lower bound on `P(X > a)` for positive `X` with `E[X] = 1`,
/// `E[X^2] = b`, and the two-point law attaining it.
#[pyfunction]
fn positive_tail_extremal(a: f64, b: f64) -> PyResult<(f64, Distribution)> {
    orders::positive_tail_extremal(a, b)
        .map(|(p, d)| (p, Distribution(d)))
        .map_err(err)
}

fn unwrap_family(family: Vec<PyRef<'_, Distribution>>) -> Vec<iqcalc::AtomicDistribution> {
    family.iter().map(|d| d.0.clone()).collect()
}

/// Dict with `oscillation`, `modulus` and `sup_abs_mean`.
#[pyfunction]
fn family_diagnostics<'py>(
    py: Python<'py>,
    family: Vec<PyRef<'py, Distribution>>,
    u: f64,
    v: f64,
    delta: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let d = limits::family_diagnostics(&unwrap_family(family), u, v, delta).map_err(err)?;
    to_py(py, &d)
}

/// The smallest law dominating every `|X|` in the increasing convex order.
#[pyfunction]
fn dominating_variable(family: Vec<PyRef<'_, Distribution>>) -> PyResult<Distribution> {
    limits::dominating_variable(&unwrap_family(family))
        .map(Distribution)
        .map_err(err)
}

/// Binary experiment, given by the law of its likelihood ratio.
#[pyclass(name = "Experiment", frozen)]
struct Experiment(ex::BinaryExperiment);

#[pymethods]
impl Experiment {
    #[new]
    fn new(mu: &Distribution) -> PyResult<Self> {
        ex::BinaryExperiment::new(mu.0.clone()).map(Self).map_err(err)
    }

    /// From the two probability vectors on a finite sample space.
    #[classmethod]
    fn from_measures(_cls: &Bound<'_, PyType>, p: Vec<f64>, p_prime: Vec<f64>) -> PyResult<Self> {
        ex::BinaryExperiment::from_measures(&p, &p_prime)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn mu(&self) -> Distribution {
        Distribution(self.0.mu().clone())
    }

    /// Smallest type II error as a function of the type I error.
    fn risk_function(&self) -> ConvexPwl {
        ConvexPwl(self.0.risk_function())
    }

    /// Vertices of the minimum Bayes risk curve on `[0, 1]`.
    fn bayes_risk_curve(&self) -> Vec<(f64, f64)> {
        self.0.bayes_risk_curve().vertices().collect()
    }

    fn bayes_risk(&self, pi: f64) -> PyResult<f64> {
        self.0.bayes_risk(pi).map_err(err)
    }

    fn canonical<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.canonical())
    }
}

#[pyfunction]
#[pyo3(signature = (e, e_tilde, tol=None))]
fn more_informative(e: &Experiment, e_tilde: &Experiment, tol: Option<f64>) -> bool {
    ex::more_informative(&e.0, &e_tilde.0, tol_or_default(tol))
}

/// `(delta2, Delta2)`: one-sided and symmetric deficiency.
#[pyfunction]
fn deficiency(e: &Experiment, e_tilde: &Experiment) -> (f64, f64) {
    let d = ex::deficiency(&e.0, &e_tilde.0);
    (d.delta2, d.big_delta2)
}

/// The symmetric deficiency computed from the Lévy distance.
#[pyfunction]
fn levy_deficiency(e: &Experiment, e_tilde: &Experiment) -> f64 {
    ex::levy_deficiency(&e.0, &e_tilde.0)
}

/// A Chacon–Walsh embedding plan.
#[pyclass(name = "EmbeddingPlan", frozen)]
struct EmbeddingPlan(skorokhod::EmbeddingPlan);

#[pymethods]
impl EmbeddingPlan {
    #[getter]
    fn intervals(&self) -> Vec<(f64, f64)> {
        self.0.intervals.iter().map(|i| (i.lo, i.hi)).collect()
    }

    #[getter]
    fn laws(&self) -> Vec<Distribution> {
        self.0.laws.iter().cloned().map(Distribution).collect()
    }

    #[getter]
    fn exact(&self) -> bool {
        self.0.exact
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }
}

#[pyfunction]
#[pyo3(signature = (mu0, mu, tol=None))]
fn plan_embedding(mu0: &Distribution, mu: &Distribution, tol: Option<f64>) -> PyResult<EmbeddingPlan> {
    skorokhod::plan_embedding(&mu0.0, &mu.0, tol_or_default(tol))
        .map(EmbeddingPlan)
        .map_err(err)
}

/// Simulates the exit chain; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (mu0, mu, n, seed, workers=4, tol=None))]
fn monte_carlo_verify<'py>(
    py: Python<'py>,
    mu0: &Distribution,
    mu: &Distribution,
    n: u64,
    seed: u64,
    workers: usize,
    tol: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let (a, b, t) = (mu0.0.clone(), mu.0.clone(), tol_or_default(tol));
    let report = py
        .detach(move || skorokhod::monte_carlo_verify(&a, &b, n, seed, workers, t))
        .map_err(err)?;
    to_py(py, &report)
}

#[pymodule(name = "iqcalc")]
fn iqcalc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Distribution>()?;
    m.add_class::<ConvexPwl>()?;
    m.add_class::<Experiment>()?;
    m.add_class::<EmbeddingPlan>()?;
    m.add_function(wrap_pyfunction!(order, m)?)?;
    m.add_function(wrap_pyfunction!(leq_icx, m)?)?;
    m.add_function(wrap_pyfunction!(leq_decx, m)?)?;
    m.add_function(wrap_pyfunction!(leq_cx, m)?)?;
    m.add_function(wrap_pyfunction!(cantelli_extremal, m)?)?;
    m.add_function(wrap_pyfunction!(positive_tail_extremal, m)?)?;
    m.add_function(wrap_pyfunction!(family_diagnostics, m)?)?;
    m.add_function(wrap_pyfunction!(dominating_variable, m)?)?;
    m.add_function(wrap_pyfunction!(more_informative, m)?)?;
    m.add_function(wrap_pyfunction!(deficiency, m)?)?;
    m.add_function(wrap_pyfunction!(levy_deficiency, m)?)?;
    m.add_function(wrap_pyfunction!(plan_embedding, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_verify, m)?)?;
    Ok(())
}
