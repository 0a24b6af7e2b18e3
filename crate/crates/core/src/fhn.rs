//! Fractional FitzHugh-Nagumo neuron
//!
//! ```text
//! D^q1 v = v − v³/3 − w + I
//! D^q2 w = r (v + c − d w)
//! ```
//!
//! With `φ = r d`, `α = 1/d`, `β = c/d` the recovery equation reads
//! `D^q2 w = φ (α v + β − w)`, and equilibria solve `I∞(v) = I` with
//! `I∞(v) = (α − 1) v + v³/3 + β`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify_coeffs, critical_a, ClassifyError, StabilityVerdict};
use crate::fde::{FdeError, FdeProblem};

const HOPF_GRID: usize = 64;
const HOPF_TOL: f64 = 1e-6;
const NEWTON_MAX_ITER: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FhnError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FhnParams {
    r: f64,
    c: f64,
    d: f64,
    current: f64,
}

impl FhnParams {
    /// Requires `r, d > 0`, `φ = r d < 1` and `α = 1/d > 1`.
    pub fn new(r: f64, c: f64, d: f64, current: f64) -> Result<Self, FhnError> {
        if ![r, c, d, current].iter().all(|x| x.is_finite()) {
            return Err(FhnError::InvalidParameters("parameters must be finite".into()));
        }
        if !(r > 0.0 && d > 0.0) {
            return Err(FhnError::InvalidParameters(format!("r and d must be positive (r={r}, d={d})")));
        }
        if d >= 1.0 {
            return Err(FhnError::InvalidParameters(format!("alpha = 1/d must exceed 1, got d={d}")));
        }
        if r * d >= 1.0 {
            return Err(FhnError::InvalidParameters(format!("phi = r*d must lie in (0, 1), got {}", r * d)));
        }
        Ok(Self { r, c, d, current })
    }

    /// Same `r, c, d` with a different current.
    pub fn with_current(&self, current: f64) -> Result<Self, FhnError> {
        Self::new(self.r, self.c, self.d, current)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn current(&self) -> f64 {
        self.current
    }

    pub fn phi(&self) -> f64 {
        self.r * self.d
    }

    pub fn alpha(&self) -> f64 {
        1.0 / self.d
    }

    pub fn beta(&self) -> f64 {
        self.c / self.d
    }

    pub fn i_inf(&self, v: f64) -> f64 {
        (self.alpha() - 1.0) * v + v * v * v / 3.0 + self.beta()
    }

    pub fn i_inf_prime(&self, v: f64) -> f64 {
        v * v + self.alpha() - 1.0
    }

    /// `|v*|` above this value is stable for every pair of orders.
    pub fn robust_threshold(&self) -> f64 {
        (1.0 - self.phi()).sqrt()
    }

    /// Right-hand side in the original `(r, c, d)` form.
    pub fn rhs(&self, v: f64, w: f64) -> (f64, f64) {
        (v - v * v * v / 3.0 - w + self.current, self.r * (v + self.c - self.d * w))
    }

    /// Right-hand side in the `(φ, α, β)` form.
    pub fn rhs_reduced(&self, v: f64, w: f64) -> (f64, f64) {
        (v - v * v * v / 3.0 - w + self.current, self.phi() * (self.alpha() * v + self.beta() - w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FhnEquilibrium {
    pub v_star: f64,
    pub w_star: f64,
    /// Coefficient of `s^q2`: `v*² − 1`.
    pub coeff_a: f64,
    /// Coefficient of `s^q1`: `φ`.
    pub coeff_b: f64,
    /// `det J = φ · I∞'(v*)`, always positive.
    pub coeff_c: f64,
}

impl FhnEquilibrium {
    /// Jacobian of the vector field at the equilibrium.
    pub fn jacobian(&self, params: &FhnParams) -> [[f64; 2]; 2] {
        let phi = params.phi();
        [[1.0 - self.v_star * self.v_star, -1.0], [phi * params.alpha(), -phi]]
    }
}

/// The unique root of `I∞(v) = I`, by Newton safeguarded with bisection.
pub fn equilibrium(params: &FhnParams) -> FhnEquilibrium {
    let target = params.current;
    let half_width = 3.0f64.max((3.0 * (target - params.beta()).abs()).cbrt() + 2.0);
    let (mut lo, mut hi) = (-half_width, half_width);
    let tol = 1e-12 * (1.0 + target.abs());
    let mut v = 0.0;
    for _ in 0..NEWTON_MAX_ITER {
        let g = params.i_inf(v) - target;
        if g.abs() <= tol {
            break;
        }
        if g > 0.0 {
            hi = v;
        } else {
            lo = v;
        }
        let newton = v - g / params.i_inf_prime(v);
        v = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= f64::EPSILON * v.abs().max(1.0) {
            break;
        }
    }
    let phi = params.phi();
    FhnEquilibrium {
        v_star: v,
        w_star: params.alpha() * v + params.beta(),
        coeff_a: v * v - 1.0,
        coeff_b: phi,
        coeff_c: phi * params.i_inf_prime(v),
    }
}

pub fn classify_equilibrium(params: &FhnParams, q1: f64, q2: f64) -> Result<StabilityVerdict, ClassifyError> {
    let eq = equilibrium(params);
    classify_coeffs(eq.coeff_a, eq.coeff_b, eq.coeff_c, q1, q2)
}

pub fn is_order_robust(params: &FhnParams) -> bool {
    equilibrium(params).v_star.abs() > params.robust_threshold()
}

/// Every `q1 ∈ (0, q2)` where `a(v*) = a*(b, c, q1, q2)`, in increasing order.
///
/// Sign changes of `a(v*) − a*` are located on a 64-point grid and bisected
/// to 1e−6. Empty when the equilibrium is order-robust.
pub fn hopf_q1_all(params: &FhnParams, q2: f64) -> Result<Vec<f64>, ClassifyError> {
    if !(q2 > 0.0 && q2 <= 1.0) {
        return Err(ClassifyError::InvalidInput(format!("q2 must lie in (0, 1], got {q2}")));
    }
    let eq = equilibrium(params);
    if eq.v_star.abs() > params.robust_threshold() {
        return Ok(Vec::new());
    }
    let g = |q1: f64| critical_a(eq.coeff_b, eq.coeff_c, q1, q2).map(|a_star| eq.coeff_a - a_star);

    let grid: Vec<f64> = (1..=HOPF_GRID).map(|k| q2 * k as f64 / (HOPF_GRID + 1) as f64).collect();
    let values = grid.iter().map(|&q| g(q)).collect::<Result<Vec<_>, _>>()?;
    let mut roots = Vec::new();
    for k in 0..HOPF_GRID - 1 {
        let (mut lo, mut hi) = (grid[k], grid[k + 1]);
        let (g_lo, g_hi) = (values[k], values[k + 1]);
        if g_lo == 0.0 {
            roots.push(lo);
            continue;
        }
        if g_lo.signum() == g_hi.signum() {
            continue;
        }
        while hi - lo > HOPF_TOL {
            let mid = 0.5 * (lo + hi);
            if g(mid)?.signum() == g_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    Ok(roots)
}

/// Smallest Hopf value of `q1` below `q2`, if any.
pub fn hopf_q1(params: &FhnParams, q2: f64) -> Result<Option<f64>, ClassifyError> {
    Ok(hopf_q1_all(params, q2)?.into_iter().next())
}

/// `(q1*, q2)` pairs with `q1* < q2` for `q2 = k / grid_n`, `k = 1..=grid_n`.
pub fn hopf_curve(params: &FhnParams, grid_n: usize) -> Result<Vec<(f64, f64)>, ClassifyError> {
    if grid_n == 0 {
        return Err(ClassifyError::InvalidInput("grid_n must be positive".into()));
    }
    let points = (1..=grid_n)
        .into_par_iter()
        .map(|k| {
            let q2 = k as f64 / grid_n as f64;
            hopf_q1(params, q2).map(|q1| q1.filter(|&q1| q1 < q2).map(|q1| (q1, q2)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(points.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub current: f64,
    pub v_star: f64,
    pub order_robust: bool,
}

/// Equilibria for `n` equally spaced currents on `[i_min, i_max]`.
pub fn branch_diagram(params: &FhnParams, i_min: f64, i_max: f64, n: usize) -> Result<Vec<BranchPoint>, FhnError> {
    if !(i_min < i_max) || n < 2 {
        return Err(FhnError::InvalidParameters(format!("need i_min < i_max and n >= 2 (got {i_min}, {i_max}, {n})")));
    }
    let threshold = params.robust_threshold();
    (0..n)
        .into_par_iter()
        .map(|k| {
            let current = i_min + (i_max - i_min) * k as f64 / (n - 1) as f64;
            let v_star = equilibrium(&params.with_current(current)?).v_star;
            Ok(BranchPoint { current, v_star, order_robust: v_star.abs() > threshold })
        })
        .collect()
}

/// Caputo problem for `(v, w)` with orders `(q1, q2)`.
pub fn make_fhn_problem(
    params: &FhnParams,
    q1: f64,
    q2: f64,
    v0: f64,
    w0: f64,
    t_end: f64,
    step: f64,
) -> Result<FdeProblem, FdeError> {
    let p = *params;
    FdeProblem::new(vec![q1, q2], vec![v0, w0], t_end, step, move |_, x, dx| {
        let (dv, dw) = p.rhs(x[0], x[1]);
        dx[0] = dv;
        dx[1] = dw;
    })
}
