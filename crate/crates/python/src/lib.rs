//! Python bindings: payoff matrices, the two learners, preset rates and
//! bounds, match simulation with regret metrics, and the rate optimizer.

use std::collections::HashMap;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use engine::optimizer::{Objective, OptimizeOptions};
use engine::{BoundInputs, Dynamics, Preset};

create_exception!(opthedge, OptHedgeError, PyValueError);

fn py_err(e: engine::Error) -> PyErr {
    OptHedgeError::new_err(e.to_string())
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for engine::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn strategy(probs: Vec<f64>) -> PyResult<engine::Strategy> {
    engine::Strategy::new(probs).py()
}

#[pyclass(
    name = "PayoffMatrix",
    module = "opthedge",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyPayoffMatrix {
    inner: engine::PayoffMatrix,
}

#[pymethods]
impl PyPayoffMatrix {
    /// Build from a list of rows; entries must lie in [-1, 1].
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(OptHedgeError::new_err("rows have different lengths"));
        }
        let inner = engine::PayoffMatrix::new(m, n, rows.concat()).py()?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn adversarial(m: usize, n: usize, delta: f64) -> PyResult<Self> {
        let inner = engine::PayoffMatrix::adversarial(m, n, delta).py()?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn matching_pennies() -> Self {
        Self {
            inner: engine::PayoffMatrix::matching_pennies(),
        }
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let inner = engine::PayoffMatrix::load(&path).py()?;
        Ok(Self { inner })
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows(), self.inner.cols())
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        (0..self.inner.rows())
            .map(|i| self.inner.row(i).to_vec())
            .collect()
    }

    /// Gain vector `A y` of the x-player.
    fn gain(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.gain(&y).py()
    }

    /// Loss vector `A^T x` of the y-player.
    fn loss(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.loss(&x).py()
    }

    fn value(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        self.inner.value(&strategy(x)?, &strategy(y)?).py()
    }

    fn __repr__(&self) -> String {
        format!("PayoffMatrix({}x{})", self.inner.rows(), self.inner.cols())
    }
}

/// Optimistic Hedge learner; feed it utilities (the y-player feeds `-loss`).
#[pyclass(name = "Hedge", module = "opthedge")]
struct PyHedge {
    inner: engine::HedgeState,
}

#[pymethods]
impl PyHedge {
    #[new]
    fn new(dim: usize, eta: f64) -> PyResult<Self> {
        let inner = engine::HedgeState::new(dim, eta).py()?;
        Ok(Self { inner })
    }

    fn next(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.next().py()?.into_inner())
    }

    fn observe(&mut self, utility: Vec<f64>) -> PyResult<()> {
        self.inner.observe(&utility).py()
    }

    #[getter]
    fn round(&self) -> usize {
        self.inner.round()
    }
}

/// Averaged-iterate learner: plays the running mean of an inner optimistic
/// Hedge learner.
#[pyclass(name = "Averaged", module = "opthedge")]
struct PyAveraged {
    inner: engine::AveragedState,
}

#[pymethods]
impl PyAveraged {
    #[new]
    fn new(dim: usize, eta: f64) -> PyResult<Self> {
        let inner = engine::AveragedState::new(dim, eta).py()?;
        Ok(Self { inner })
    }

    fn next(&mut self) -> PyResult<Vec<f64>> {
        Ok(self.inner.next().py()?.into_inner())
    }

    /// Inner iterate of the current round, once `next` has been called.
    fn inner_strategy(&self) -> Option<Vec<f64>> {
        self.inner.current_inner().map(|s| s.probs().to_vec())
    }

    fn observe(&mut self, utility: Vec<f64>) -> PyResult<()> {
        self.inner.observe(&utility).py()
    }

    /// Utility fed to the inner learner in the last completed round.
    fn last_reconstructed(&self) -> Option<Vec<f64>> {
        self.inner.last_reconstructed().map(<[f64]>::to_vec)
    }
}

#[pyclass(
    name = "RateParams",
    module = "opthedge",
    frozen,
    get_all,
    skip_from_py_object
)]
#[derive(Clone, Copy)]
struct PyRateParams {
    eta: f64,
    eta_prime: f64,
    c: f64,
    c_prime: f64,
}

impl From<engine::RateParams> for PyRateParams {
    fn from(r: engine::RateParams) -> Self {
        Self {
            eta: r.eta,
            eta_prime: r.eta_prime,
            c: r.c,
            c_prime: r.c_prime,
        }
    }
}

impl PyRateParams {
    fn engine(&self) -> PyResult<engine::RateParams> {
        engine::RateParams::new(self.eta, self.eta_prime, self.c, self.c_prime).py()
    }
}

#[pymethods]
impl PyRateParams {
    #[new]
    fn new(eta: f64, eta_prime: f64, c: f64, c_prime: f64) -> PyResult<Self> {
        Ok(engine::RateParams::new(eta, eta_prime, c, c_prime)
            .py()?
            .into())
    }

    fn is_feasible(&self) -> PyResult<bool> {
        Ok(self.engine()?.is_feasible())
    }

    /// Individual bounds `(f, g)` for an `m x n` game; `inf` on the boundary.
    fn bound_fg(&self, m: usize, n: usize) -> PyResult<(f64, f64)> {
        let b = BoundInputs::new(m, n).py()?;
        let (f, g) = engine::bound_fg(&self.engine()?, &b).py()?;
        Ok((f.value(), g.value()))
    }

    fn __repr__(&self) -> String {
        format!(
            "RateParams(eta={}, eta_prime={}, c={}, c_prime={})",
            self.eta, self.eta_prime, self.c, self.c_prime
        )
    }
}

fn parse<T: std::str::FromStr<Err = engine::Error>>(s: &str) -> PyResult<T> {
    s.parse().py()
}

#[pyfunction]
fn presets() -> Vec<&'static str> {
    Preset::ALL.iter().map(|p| p.name()).collect()
}

#[pyfunction]
fn preset_rates(preset: &str, m: usize, n: usize) -> PyResult<PyRateParams> {
    Ok(engine::preset_rates(parse(preset)?, m, n).py()?.into())
}

/// Upper bound on the preset's target regret; `algo="averaged"` needs `T`.
#[pyfunction]
#[pyo3(signature = (preset, m, n, algo="hedge", T=None))]
#[allow(non_snake_case)]
fn theoretical_upper(
    preset: &str,
    m: usize,
    n: usize,
    algo: &str,
    T: Option<usize>,
) -> PyResult<f64> {
    engine::theoretical_upper(parse(preset)?, m, n, parse(algo)?, T).py()
}

#[pyclass(name = "LowerBound", module = "opthedge", frozen, get_all)]
struct PyLowerBound {
    delta_star: f64,
    value: f64,
    branch: &'static str,
}

impl From<engine::LowerBoundValue> for PyLowerBound {
    fn from(v: engine::LowerBoundValue) -> Self {
        Self {
            delta_star: v.delta_star,
            value: v.value,
            branch: v.branch.name(),
        }
    }
}

#[pymethods]
impl PyLowerBound {
    fn __repr__(&self) -> String {
        format!(
            "LowerBound(delta_star={}, value={}, branch={:?})",
            self.delta_star, self.value, self.branch
        )
    }
}

/// External-regret lower bound at its maximizing gap.
#[pyfunction]
#[allow(non_snake_case)]
fn lb_external(m: usize, eta: f64, T: usize) -> PyResult<PyLowerBound> {
    Ok(engine::lb_external(m, eta, T).py()?.into())
}

/// Dynamic-regret lower bound for the averaged dynamic.
#[pyfunction]
#[allow(non_snake_case)]
fn lb_dynamic(m: usize, eta: f64, T: usize) -> PyResult<PyLowerBound> {
    Ok(engine::lb_dynamic(m, eta, T).py()?.into())
}

#[pyfunction]
fn oracle_x1(m: usize, eta: f64, delta: f64, t: usize) -> PyResult<f64> {
    engine::oracle_x1(m, eta, delta, t).py()
}

#[pyfunction]
fn nash_gap(a: &PyPayoffMatrix, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    engine::nash_gap(&a.inner, &strategy(x)?, &strategy(y)?).py()
}

/// Play `T` rounds and return per-round metrics keyed by column name.
/// Rates come from `preset`, or from explicit `eta` and `eta_prime`.
#[pyfunction]
#[pyo3(signature = (a, T, preset=None, eta=None, eta_prime=None, algo="hedge"))]
#[allow(non_snake_case)]
fn simulate(
    py: Python<'_>,
    a: &PyPayoffMatrix,
    T: usize,
    preset: Option<&str>,
    eta: Option<f64>,
    eta_prime: Option<f64>,
    algo: &str,
) -> PyResult<HashMap<&'static str, Vec<f64>>> {
    let dynamics: Dynamics = parse(algo)?;
    let (m, n) = (a.inner.rows(), a.inner.cols());
    let (eta, eta_prime) = match (preset, eta, eta_prime) {
        (Some(p), None, None) => {
            let r = engine::preset_rates(parse(p)?, m, n).py()?;
            (r.eta, r.eta_prime)
        }
        (None, Some(e), Some(ep)) => (e, ep),
        _ => {
            return Err(OptHedgeError::new_err(
                "give either preset or both eta and eta_prime",
            ))
        }
    };
    let matrix = a.inner.clone();
    let trace = py
        .detach(move || {
            let mut x = engine::build_learner(dynamics, m, eta)?;
            let mut y = engine::build_learner(dynamics, n, eta_prime)?;
            engine::play_match(
                &matrix,
                x.as_mut(),
                y.as_mut(),
                T,
                engine::TraceMode::Metrics,
            )
        })
        .py()?;
    let metrics = trace.metrics();
    let mut out: HashMap<&'static str, Vec<f64>> = HashMap::new();
    out.insert("t", metrics.iter().map(|r| r.t as f64).collect());
    for (k, name) in engine::RoundMetrics::COLUMNS[1..].iter().enumerate() {
        out.insert(name, metrics.iter().map(|r| r.values()[k]).collect());
    }
    Ok(out)
}

#[pyclass(name = "OptimizeResult", module = "opthedge", frozen, get_all)]
struct PyOptimizeResult {
    rates: PyRateParams,
    f: f64,
    g: f64,
    objective: f64,
    iterations: usize,
    converged: bool,
}

/// Minimize `"social"`, `"max_fg"` or `"J"` (with `gamma`) for an
/// `m x n` game.
#[pyfunction]
#[pyo3(signature = (objective, m, n, gamma=None))]
fn minimize(objective: &str, m: usize, n: usize, gamma: Option<f64>) -> PyResult<PyOptimizeResult> {
    let objective = match (objective, gamma) {
        ("social", None) => Objective::SocialOmega,
        ("max_fg", None) => Objective::MaxFg,
        ("J", Some(g)) => Objective::JGamma(g),
        _ => {
            return Err(OptHedgeError::new_err(format!(
                "unknown objective {objective:?} (gamma only goes with \"J\")"
            )))
        }
    };
    let b = BoundInputs::new(m, n).py()?;
    let r = engine::minimize(objective, &b, &OptimizeOptions::default()).py()?;
    Ok(PyOptimizeResult {
        rates: r.rates.into(),
        f: r.f_value.value(),
        g: r.g_value.value(),
        objective: r.objective_value,
        iterations: r.iterations,
        converged: r.converged(),
    })
}

/// Cardinality-unaware coefficient optimum: `((a, a', s, s'), kappa)`.
#[pyfunction]
fn coeff_unaware() -> PyResult<((f64, f64, f64, f64), f64)> {
    let (tp, kappa) = engine::coeff_unaware(&OptimizeOptions::default()).py()?;
    Ok(((tp.a, tp.a_prime, tp.s, tp.s_prime), kappa))
}

#[pymodule]
fn opthedge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("OptHedgeError", m.py().get_type::<OptHedgeError>())?;
    m.add_class::<PyPayoffMatrix>()?;
    m.add_class::<PyHedge>()?;
    m.add_class::<PyAveraged>()?;
    m.add_class::<PyRateParams>()?;
    m.add_class::<PyLowerBound>()?;
    m.add_class::<PyOptimizeResult>()?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(preset_rates, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_upper, m)?)?;
    m.add_function(wrap_pyfunction!(lb_external, m)?)?;
    m.add_function(wrap_pyfunction!(lb_dynamic, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_x1, m)?)?;
    m.add_function(wrap_pyfunction!(nash_gap, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(coeff_unaware, m)?)?;
    Ok(())
}
