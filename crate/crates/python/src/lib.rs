//! Python bindings: `import fracstab_py`.
//!
//! Invalid input raises `ValueError`; numerical failures (root on the
//! imaginary axis, unreliable winding, overflow) raise `RuntimeError`.

use fracstab::{CharFnError, ClassifyError, FdeError, FhnError, LinearSystem2, StabilityVerdict};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn charfn_err(e: CharFnError) -> PyErr {
    match e {
        CharFnError::InvalidInput(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn classify_err(e: ClassifyError) -> PyErr {
    match e {
        ClassifyError::Oracle(inner) => charfn_err(inner),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fhn_err(e: FhnError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fde_err(e: FdeError) -> PyErr {
    match e {
        FdeError::InvalidProblem(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn verdict_dict<'py>(py: Python<'py>, v: &StabilityVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("kind", format!("{:?}", v.kind))?;
    d.set_item("rule", v.rule.tag())?;
    d.set_item("decay_order", v.decay_order)?;
    d.set_item("margin", v.margin)?;
    Ok(d)
}

/// Stability verdict for Δ(s) = s^(q1+q2) + a s^q2 + b s^q1 + c.
#[pyfunction]
fn classify_coeffs<'py>(py: Python<'py>, a: f64, b: f64, c: f64, q1: f64, q2: f64) -> PyResult<Bound<'py, PyDict>> {
    let v = fracstab::classify_coeffs(a, b, c, q1, q2).map_err(classify_err)?;
    verdict_dict(py, &v)
}

/// Stability verdict for D^q x = A x with A = [[a11, a12], [a21, a22]].
#[pyfunction]
fn classify_matrix<'py>(py: Python<'py>, matrix: [[f64; 2]; 2], q1: f64, q2: f64) -> PyResult<Bound<'py, PyDict>> {
    let v = fracstab::classify_matrix(&LinearSystem2::new(matrix, q1, q2)).map_err(classify_err)?;
    verdict_dict(py, &v)
}

/// Critical value a*(b) for c > 0 and q1 <= q2.
#[pyfunction]
fn critical_a(b: f64, c: f64, q1: f64, q2: f64) -> PyResult<f64> {
    fracstab::critical_a(b, c, q1, q2).map_err(classify_err)
}

/// "stable-all", "unstable-all", "order-dependent" or "degenerate".
#[pyfunction]
fn order_independent_region(a: f64, b: f64, c: f64) -> &'static str {
    fracstab::order_independent_region(a, b, c).label()
}

/// Number of roots of Δ in Re s > 0, by the argument principle.
#[pyfunction]
fn count_rhp_roots(a: f64, b: f64, c: f64, q1: f64, q2: f64) -> PyResult<usize> {
    let f = fracstab::CharFunction::new(a, b, c, q1, q2).map_err(charfn_err)?;
    Ok(f.count_rhp_roots().map_err(charfn_err)?.count)
}

#[pyclass(name = "CharFunction", frozen)]
struct PyCharFunction(fracstab::CharFunction);

#[pymethods]
impl PyCharFunction {
    #[new]
    fn new(a: f64, b: f64, c: f64, q1: f64, q2: f64) -> PyResult<Self> {
        fracstab::CharFunction::new(a, b, c, q1, q2).map(Self).map_err(charfn_err)
    }

    /// Coefficients and orders after normalisation to q1 <= q2.
    #[getter]
    fn coefficients(&self) -> (f64, f64, f64, f64, f64) {
        let f = &self.0;
        (f.a(), f.b(), f.c(), f.q1(), f.q2())
    }

    fn __call__(&self, s: Complex64) -> Complex64 {
        self.0.eval_delta(s)
    }

    fn derivative(&self, s: Complex64) -> PyResult<Complex64> {
        self.0.eval_delta_ds(s).map_err(charfn_err)
    }

    fn count_rhp_roots<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let n = self.0.count_rhp_roots().map_err(charfn_err)?;
        let d = PyDict::new(py);
        d.set_item("count", n.count)?;
        d.set_item("contour_radius", n.contour_radius)?;
        d.set_item("winding_residual", n.winding_residual)?;
        Ok(d)
    }

    /// Newton polish of a root starting from `s0`.
    fn track_root(&self, s0: Complex64) -> PyResult<Complex64> {
        self.0.track_root(s0).map_err(charfn_err)
    }

    /// ds/da at a root `s`.
    fn root_sensitivity(&self, s: Complex64) -> PyResult<Complex64> {
        fracstab::root_sensitivity(&self.0, s).map_err(charfn_err)
    }

    fn __repr__(&self) -> String {
        let (a, b, c, q1, q2) = self.coefficients();
        format!("CharFunction(a={a}, b={b}, c={c}, q1={q1}, q2={q2})")
    }
}

#[pyclass(name = "CriticalCurve", frozen)]
struct PyCriticalCurve(fracstab::CriticalCurve);

#[pymethods]
impl PyCriticalCurve {
    #[new]
    fn new(c: f64, q1: f64, q2: f64) -> PyResult<Self> {
        fracstab::CriticalCurve::new(c, q1, q2).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// (b, a) on the curve at frequency omega.
    fn gamma_point(&self, omega: f64) -> PyResult<(f64, f64)> {
        let p = self.0.gamma_point(omega).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok((p.b, p.a))
    }

    fn a_star(&self, b: f64) -> f64 {
        self.0.a_star(b)
    }

    fn crossing_frequency(&self, b: f64) -> f64 {
        self.0.crossing_frequency(b)
    }

    #[getter]
    fn rho1(&self) -> f64 {
        self.0.rho1()
    }

    #[getter]
    fn rho2(&self) -> f64 {
        self.0.rho2()
    }

    #[getter]
    fn omega_a(&self) -> f64 {
        self.0.omega_a()
    }

    #[getter]
    fn omega_b(&self) -> f64 {
        self.0.omega_b()
    }
}

#[pyclass(name = "FhnParams", frozen)]
struct PyFhnParams(fracstab::FhnParams);

#[pymethods]
impl PyFhnParams {
    #[new]
    #[pyo3(signature = (r, c, d, current))]
    fn new(r: f64, c: f64, d: f64, current: f64) -> PyResult<Self> {
        fracstab::FhnParams::new(r, c, d, current).map(Self).map_err(fhn_err)
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.0.phi()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn robust_threshold(&self) -> f64 {
        self.0.robust_threshold()
    }

    fn equilibrium<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let eq = fracstab::equilibrium(&self.0);
        let d = PyDict::new(py);
        d.set_item("v_star", eq.v_star)?;
        d.set_item("w_star", eq.w_star)?;
        d.set_item("a", eq.coeff_a)?;
        d.set_item("b", eq.coeff_b)?;
        d.set_item("c", eq.coeff_c)?;
        Ok(d)
    }

    fn classify<'py>(&self, py: Python<'py>, q1: f64, q2: f64) -> PyResult<Bound<'py, PyDict>> {
        let v = fracstab::classify_equilibrium(&self.0, q1, q2).map_err(classify_err)?;
        verdict_dict(py, &v)
    }

    fn hopf_q1(&self, q2: f64) -> PyResult<Option<f64>> {
        fracstab::hopf_q1(&self.0, q2).map_err(classify_err)
    }

    fn hopf_curve(&self, py: Python<'_>, grid_n: usize) -> PyResult<Vec<(f64, f64)>> {
        let p = self.0;
        py.detach(|| fracstab::hopf_curve(&p, grid_n)).map_err(classify_err)
    }

    /// List of (I, v_star, order_robust).
    fn branch_diagram(&self, i_min: f64, i_max: f64, n: usize) -> PyResult<Vec<(f64, f64, bool)>> {
        let points = fracstab::branch_diagram(&self.0, i_min, i_max, n).map_err(fhn_err)?;
        Ok(points.into_iter().map(|p| (p.current, p.v_star, p.order_robust)).collect())
    }

    /// Integrates from (v0, w0), by default the equilibrium shifted by 0.01 in v.
    /// Returns (times, v, w).
    #[pyo3(signature = (q1, q2, t_end, step = 0.01, v0 = None, w0 = None))]
    #[allow(clippy::too_many_arguments)]
    fn simulate(
        &self,
        py: Python<'_>,
        q1: f64,
        q2: f64,
        t_end: f64,
        step: f64,
        v0: Option<f64>,
        w0: Option<f64>,
    ) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let eq = fracstab::equilibrium(&self.0);
        let problem = fracstab::make_fhn_problem(
            &self.0,
            q1,
            q2,
            v0.unwrap_or(eq.v_star + 0.01),
            w0.unwrap_or(eq.w_star),
            t_end,
            step,
        )
        .map_err(fde_err)?;
        let traj = py.detach(|| fracstab::solve(&problem)).map_err(fde_err)?;
        let v = traj.component(0);
        let w = traj.component(1);
        Ok((traj.times, v, w))
    }
}

/// Integrates D^q x = A x from x0 on [0, t_end]. Returns (times, states).
#[pyfunction]
#[pyo3(signature = (matrix, q1, q2, x0, t_end, step = 0.01))]
fn simulate_linear(
    py: Python<'_>,
    matrix: [[f64; 2]; 2],
    q1: f64,
    q2: f64,
    x0: [f64; 2],
    t_end: f64,
    step: f64,
) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let problem = fracstab::FdeProblem::new(vec![q1, q2], x0.to_vec(), t_end, step, move |_, x, dx| {
        dx[0] = matrix[0][0] * x[0] + matrix[0][1] * x[1];
        dx[1] = matrix[1][0] * x[0] + matrix[1][1] * x[1];
    })
    .map_err(fde_err)?;
    let traj = py.detach(|| fracstab::solve(&problem)).map_err(fde_err)?;
    Ok((traj.times, traj.states))
}

/// Least-squares t^(-q) rate of the trajectory tail.
#[pyfunction]
#[pyo3(signature = (times, states, tail_fraction = 0.5))]
fn estimate_decay_exponent(times: Vec<f64>, states: Vec<Vec<f64>>, tail_fraction: f64) -> PyResult<f64> {
    if times.len() != states.len() {
        return Err(PyValueError::new_err("times and states differ in length"));
    }
    let dim = states.first().map_or(0, Vec::len);
    let step = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    let traj = fracstab::Trajectory { times, states, orders: vec![f64::NAN; dim], step };
    fracstab::estimate_decay_exponent(&traj, tail_fraction).map_err(fde_err)
}

#[pymodule]
fn fracstab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(classify_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(classify_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(critical_a, m)?)?;
    m.add_function(wrap_pyfunction!(order_independent_region, m)?)?;
    m.add_function(wrap_pyfunction!(count_rhp_roots, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_linear, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_decay_exponent, m)?)?;
    m.add_class::<PyCharFunction>()?;
    m.add_class::<PyCriticalCurve>()?;
    m.add_class::<PyFhnParams>()?;
    Ok(())
}
