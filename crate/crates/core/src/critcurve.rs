//! The critical curve in the `(b, a)` coefficient plane.
//!
//! For `c > 0` and `0 < q1 < q2 ≤ 1`, Δ has a pure imaginary pair `±iω`
//! exactly on the parametric curve
//!
//! ```text
//! b(ω) = ρ₁ω^q2 − cρ₂ω^(−q1)
//! a(ω) = cρ₁ω^(−q2) − ρ₂ω^q1          ω > 0
//! ρ₁ = sin(q1π/2) / sin((q2−q1)π/2)
//! ρ₂ = sin(q2π/2) / sin((q2−q1)π/2)
//! ```
//!
//! `b(ω)` is strictly increasing and `a(ω)` strictly decreasing, so the curve
//! is the graph of a decreasing convex function `a*(b)`. All roots of Δ lie in
//! the open left half-plane iff `a > a*(b)`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;
use thiserror::Error;

use crate::charfn::COMMENSURATE_TOL;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("invalid critical curve parameters: {0}")]
    InvalidParameters(String),
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub omega: f64,
    pub b: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCurve {
    c: f64,
    q1: f64,
    q2: f64,
    rho1: f64,
    rho2: f64,
}

impl CriticalCurve {
    pub fn new(c: f64, q1: f64, q2: f64) -> Result<Self, CurveError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(CurveError::InvalidParameters(format!("c must be positive, got {c}")));
        }
        if !(q1 > 0.0 && q1 < q2 && q2 <= 1.0) {
            return Err(CurveError::InvalidParameters(format!(
                "orders must satisfy 0 < q1 < q2 <= 1, got q1={q1}, q2={q2}"
            )));
        }
        if q2 - q1 < COMMENSURATE_TOL {
            return Err(CurveError::InvalidParameters(format!(
                "orders too close (q2 - q1 = {:e}); use the commensurate threshold",
                q2 - q1
            )));
        }
        let denom = ((q2 - q1) * FRAC_PI_2).sin();
        Ok(Self { c, q1, q2, rho1: (q1 * FRAC_PI_2).sin() / denom, rho2: (q2 * FRAC_PI_2).sin() / denom })
    }

    /// Builds a curve with arbitrary `ρ₁, ρ₂`. Only meant for negative-control
    /// fixtures of the self-test suite.
    #[doc(hidden)]
    pub fn with_rhos_unchecked(c: f64, q1: f64, q2: f64, rho1: f64, rho2: f64) -> Self {
        Self { c, q1, q2, rho1, rho2 }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn q2(&self) -> f64 {
        self.q2
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    /// `ρ = ρ₁/ρ₂ ∈ (0, 1)`.
    pub fn rho(&self) -> f64 {
        self.rho1 / self.rho2
    }

    fn b_at_ln(&self, t: f64) -> f64 {
        self.rho1 * (self.q2 * t).exp() - self.c * self.rho2 * (-self.q1 * t).exp()
    }

    fn a_at_ln(&self, t: f64) -> f64 {
        self.c * self.rho1 * (-self.q2 * t).exp() - self.rho2 * (self.q1 * t).exp()
    }

    pub fn gamma_point(&self, omega: f64) -> Result<CurveSample, CurveError> {
        if !(omega > 0.0) {
            return Err(CurveError::NonPositiveFrequency(omega));
        }
        let t = omega.ln();
        Ok(CurveSample { omega, b: self.b_at_ln(t), a: self.a_at_ln(t) })
    }

    /// Root of `a(ω) = 0`: `(cρ)^(1/(q1+q2))`.
    pub fn omega_a(&self) -> f64 {
        (self.c * self.rho()).powf(1.0 / (self.q1 + self.q2))
    }

    /// Root of `b(ω) = 0`: `(c/ρ)^(1/(q1+q2))`.
    pub fn omega_b(&self) -> f64 {
        (self.c / self.rho()).powf(1.0 / (self.q1 + self.q2))
    }

    /// The unique `ω > 0` with `b(ω) = b`.
    ///
    /// Bisection in `ln ω`, bracketed from `ω_b` by doubling/halving. Non-finite
    /// `b` yields NaN.
    pub fn crossing_frequency(&self, b: f64) -> f64 {
        self.crossing_ln_frequency(b).exp()
    }

    fn crossing_ln_frequency(&self, b: f64) -> f64 {
        if !b.is_finite() {
            return f64::NAN;
        }
        let t_b = self.omega_b().ln();
        if b == 0.0 {
            return t_b;
        }
        let f = |t: f64| self.b_at_ln(t) - b;
        let (mut lo, mut hi) = (t_b, t_b);
        let ln2 = std::f64::consts::LN_2;
        // 2200 doublings span the whole f64 range of ω.
        if b > 0.0 {
            let mut n = 0;
            while f(hi) < 0.0 {
                lo = hi;
                hi += ln2;
                n += 1;
                if n > 2200 {
                    return f64::NAN;
                }
            }
        } else {
            let mut n = 0;
            while f(lo) > 0.0 {
                hi = lo;
                lo -= ln2;
                n += 1;
                if n > 2200 {
                    return f64::NAN;
                }
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `a*(b) = a(b⁻¹(b))`.
    pub fn a_star(&self, b: f64) -> f64 {
        self.a_at_ln(self.crossing_ln_frequency(b))
    }
}
