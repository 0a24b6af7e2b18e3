//! Stability analysis for two-component linear Caputo systems with
//! incommensurate orders, and a fractional FitzHugh-Nagumo neuron.
//!
//! The characteristic function of `D^q1 x = a11 x + a12 y`,
//! `D^q2 y = a21 x + a22 y` is
//!
//! ```text
//! Δ(s) = s^(q1+q2) + a·s^q2 + b·s^q1 + c,   a = −a11, b = −a22, c = det A.
//! ```
//!
//! [`classify`] decides stability in closed form from the critical curve
//! ([`critcurve`]); [`charfn`] counts right half-plane roots independently by
//! the argument principle; [`fde`] integrates the nonlinear or linear systems
//! in time.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charfn;
pub mod classify;
pub mod cli;
pub mod critcurve;
pub mod fde;
pub mod fhn;
pub mod selftest;

pub use charfn::{principal_pow, CharFnError, CharFunction, RhpCount};
pub use classify::{
    classify_coeffs, classify_matrix, critical_a, order_independent_region, root_sensitivity, verify_with_oracle,
    ClassifyError, LinearSystem2, Region, Rule, StabilityVerdict, VerdictKind,
};
pub use critcurve::{CriticalCurve, CurveError, CurveSample};
pub use fde::{estimate_decay_exponent, solve, FdeError, FdeProblem, Trajectory};
pub use fhn::{
    branch_diagram, classify_equilibrium, equilibrium, hopf_curve, hopf_q1, make_fhn_problem, BranchPoint,
    FhnEquilibrium, FhnError, FhnParams,
};
