//! Python bindings. Fields cross the boundary as lists: a flat list in 1D
//! and a list of rows `q[j][i]` in 2D.

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

use fct_advect::analysis::{max_stable_sigma as sigma_limit, phase_dissipation_curve};
use fct_advect::config::{ConfigSource, RunConfig};
use fct_advect::error::Error;
use fct_advect::grid::CellField;
use fct_advect::problems::{exact_solution, max_norm_error, ProblemSpec};
use fct_advect::schemes::{scheme_coefficients, SchemeName};
use fct_advect::solver::{convergence_study as study, solve_problem, RunSettings};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonFinite { .. } => PyArithmeticError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn field_to_lists(q: &CellField) -> Vec<Vec<f64>> {
    let g = q.grid();
    let rows = if g.dim() == 1 { 1 } else { g.n() };
    (0..rows as isize)
        .map(|j| (0..g.n() as isize).map(|i| q.at([i, j])).collect())
        .collect()
}

fn field_to_py(py: Python<'_>, q: &CellField) -> PyResult<Py<PyAny>> {
    let mut rows = field_to_lists(q);
    let obj = if q.grid().dim() == 1 {
        rows.remove(0).into_pyobject(py)?.into_any()
    } else {
        rows.into_pyobject(py)?.into_any()
    };
    Ok(obj.unbind())
}

#[allow(clippy::too_many_arguments)]
fn build_config(
    ic: &str,
    velocity: &str,
    scheme: &str,
    n: usize,
    sigma: f64,
    t_final: f64,
    limiter: &str,
    dim: Option<usize>,
    cosine_radius: Option<f64>,
) -> PyResult<RunConfig> {
    let mut src = ConfigSource::new();
    let mut entries = vec![
        ("ic", ic.to_string()),
        ("velocity", velocity.to_string()),
        ("scheme", scheme.to_string()),
        ("n", n.to_string()),
        ("sigma", sigma.to_string()),
        ("t_final", t_final.to_string()),
        ("limiter", limiter.to_string()),
    ];
    if let Some(d) = dim {
        entries.push(("dim", d.to_string()));
    }
    if let Some(r) = cosine_radius {
        entries.push(("cosine_radius", r.to_string()));
    }
    for (k, v) in entries {
        src.set(k, v).map_err(to_py)?;
    }
    src.build().map_err(to_py)
}

/// Final state and diagnostics of a run.
#[pyclass(get_all, frozen)]
pub struct RunResult {
    pub steps: usize,
    pub time: f64,
    pub dt: f64,
    pub min: f64,
    pub max: f64,
    /// Relative change of the conserved total.
    pub drift: f64,
    /// Max-norm distance to the exact solution.
    pub error: f64,
    pub initial: Py<PyAny>,
    pub solution: Py<PyAny>,
}

/// Runs a problem to `t_final` and returns a `RunResult`.
#[pyfunction]
#[pyo3(signature = (ic, velocity, scheme, n, sigma=0.8, t_final=1.0, limiter="on", dim=None, cosine_radius=None))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    ic: &str,
    velocity: &str,
    scheme: &str,
    n: usize,
    sigma: f64,
    t_final: f64,
    limiter: &str,
    dim: Option<usize>,
    cosine_radius: Option<f64>,
) -> PyResult<RunResult> {
    let config = build_config(
        ic,
        velocity,
        scheme,
        n,
        sigma,
        t_final,
        limiter,
        dim,
        cosine_radius,
    )?;
    let spec = config.problem().map_err(to_py)?;
    let settings = config.settings();
    let out = py
        .detach(|| solve_problem(&spec, config.n, &settings, config.t_final, |_, _| {}))
        .map_err(to_py)?;
    let exact = exact_solution(&spec, out.solution.grid(), out.time).map_err(to_py)?;
    Ok(RunResult {
        steps: out.steps,
        time: out.time,
        dt: out.dt,
        min: out.solution.interior_min(),
        max: out.solution.interior_max(),
        drift: out.conservation_drift(),
        error: max_norm_error(&out.solution, &exact).map_err(to_py)?,
        initial: field_to_py(py, &out.initial)?,
        solution: field_to_py(py, &out.solution)?,
    })
}

/// `[(N, error, order or None), ...]` at `t_final`.
#[pyfunction]
#[pyo3(signature = (ic, velocity, scheme, ns, sigma=0.8, t_final=1.0, limiter="on", dim=None, cosine_radius=None))]
#[allow(clippy::too_many_arguments)]
fn convergence_study(
    py: Python<'_>,
    ic: &str,
    velocity: &str,
    scheme: &str,
    ns: Vec<usize>,
    sigma: f64,
    t_final: f64,
    limiter: &str,
    dim: Option<usize>,
    cosine_radius: Option<f64>,
) -> PyResult<Vec<(usize, f64, Option<f64>)>> {
    let first = *ns
        .first()
        .ok_or_else(|| PyValueError::new_err("ns is empty"))?;
    let config = build_config(
        ic,
        velocity,
        scheme,
        first,
        sigma,
        t_final,
        limiter,
        dim,
        cosine_radius,
    )?;
    let spec = config.problem().map_err(to_py)?;
    let settings = config.settings();
    let report = py
        .detach(|| study(&spec, &settings, &ns, config.t_final))
        .map_err(to_py)?;
    Ok(report
        .into_iter()
        .map(|r| (r.n, r.error, r.order))
        .collect())
}

fn scheme_name(s: &str) -> PyResult<SchemeName> {
    s.parse().map_err(to_py)
}

/// Largest stable CFL number of a scheme under RK4 in `dim` dimensions.
#[pyfunction]
#[pyo3(signature = (scheme, dim=1))]
fn max_stable_sigma(scheme: &str, dim: usize) -> PyResult<f64> {
    if dim != 1 && dim != 2 {
        return Err(PyValueError::new_err("dim must be 1 or 2"));
    }
    Ok(sigma_limit(&scheme_coefficients(scheme_name(scheme)?), dim))
}

/// `[(beta, dissipation, phase_error or None), ...]` for `beta` in `(0, pi]`.
#[pyfunction]
#[pyo3(signature = (scheme, sigma=0.8, samples=1024))]
fn phase_dissipation(
    scheme: &str,
    sigma: f64,
    samples: usize,
) -> PyResult<Vec<(f64, f64, Option<f64>)>> {
    let s = scheme_coefficients(scheme_name(scheme)?);
    Ok(phase_dissipation_curve(&s, sigma, samples)
        .into_iter()
        .map(|m| (m.beta, m.dissipation, m.phase_error()))
        .collect())
}

/// `[(offset, coefficient), ...]` of a face stencil for positive velocity.
#[pyfunction]
fn stencil(scheme: &str) -> PyResult<Vec<(isize, f64)>> {
    Ok(scheme_coefficients(scheme_name(scheme)?).coefficients())
}

/// Step-by-step access to a problem run.
#[pyclass(name = "Solver")]
pub struct PySolver {
    inner: fct_advect::solver::Solver,
    spec: ProblemSpec,
}

#[pymethods]
impl PySolver {
    #[new]
    #[pyo3(signature = (ic, velocity, scheme, n, sigma=0.8, limiter="on", dim=None, cosine_radius=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        ic: &str,
        velocity: &str,
        scheme: &str,
        n: usize,
        sigma: f64,
        limiter: &str,
        dim: Option<usize>,
        cosine_radius: Option<f64>,
    ) -> PyResult<Self> {
        let config = build_config(
            ic,
            velocity,
            scheme,
            n,
            sigma,
            0.0,
            limiter,
            dim,
            cosine_radius,
        )?;
        let spec = config.problem().map_err(to_py)?;
        let grid = spec.grid(config.n).map_err(to_py)?;
        let q0 = fct_advect::problems::initial_condition(&spec, &grid).map_err(to_py)?;
        let v = spec.velocity_field(&grid).map_err(to_py)?;
        let s: RunSettings = config.settings();
        let inner = fct_advect::solver::Solver::new(q0, &v, s.scheme, s.order, s.sigma, s.mode)
            .map_err(to_py)?
            .with_options(s.options);
        Ok(Self { inner, spec })
    }

    /// One full time step; returns the new time.
    fn step(&mut self) -> PyResult<f64> {
        let dt = self.inner.dt();
        self.inner.step_by(dt).map_err(to_py).map(|i| i.time)
    }

    /// Steps to `t_final`, shortening the last step.
    fn advance_to(&mut self, py: Python<'_>, t_final: f64) -> PyResult<()> {
        let inner = &mut self.inner;
        py.detach(|| inner.advance_to(t_final, |_, _| {}))
            .map_err(to_py)
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time()
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt()
    }

    fn state(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        field_to_py(py, self.inner.state())
    }

    fn conserved_sum(&self) -> f64 {
        self.inner.state().conserved_sum()
    }

    /// Max-norm distance to the exact solution at the current time.
    fn error(&self) -> PyResult<f64> {
        let q = self.inner.state();
        let exact = exact_solution(&self.spec, q.grid(), self.inner.time()).map_err(to_py)?;
        max_norm_error(q, &exact).map_err(to_py)
    }
}

#[pymodule]
pub fn fct_advect_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RunResult>()?;
    m.add_class::<PySolver>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_study, m)?)?;
    m.add_function(wrap_pyfunction!(max_stable_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(phase_dissipation, m)?)?;
    m.add_function(wrap_pyfunction!(stencil, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_follow_rows() {
        let spec = ProblemSpec::new(
            fct_advect::problems::IcKind::Square,
            fct_advect::velocity::VelocityKind::ConstantDiagonal,
            2,
        )
        .unwrap();
        let g = spec.grid(16).unwrap();
        let q = CellField::from_fn(g, |c| (c[0] + 100 * c[1]) as f64);
        let rows = field_to_lists(&q);
        assert_eq!(rows.len(), 16);
        assert_eq!(rows[3][5], 305.0);
    }

    #[test]
    fn config_errors_become_value_errors() {
        let e =
            build_config("square", "constant", "u5", 8, 0.8, 1.0, "on", None, None).unwrap_err();
        Python::initialize();
        Python::attach(|py| assert!(e.is_instance_of::<PyValueError>(py)));
    }
}
