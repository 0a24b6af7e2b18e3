//! Stability verdicts for two-component linear systems
//!
//! ```text
//! D^q1 x = a11·x + a12·y
//! D^q2 y = a21·x + a22·y
//! ```
//!
//! with Caputo derivatives. With `a = −a11`, `b = −a22`, `c = det A` the
//! characteristic function is `Δ(s) = s^(q1+q2) + a·s^q2 + b·s^q1 + c` and
//! the verdict follows from the sign of `c`, two order-independent tests and,
//! failing those, the comparison of `a` with the critical value `a*(b)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::charfn::{CharFnError, CharFunction, COMMENSURATE_TOL};
use crate::critcurve::{CriticalCurve, CurveError};

/// Relative tolerance of the `a = a*` tie.
pub const HOPF_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("argument-principle oracle failed: {0}")]
    Oracle(#[from] CharFnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VerdictKind {
    StableAllOrders,
    UnstableAllOrders,
    StableAtOrders,
    UnstableAtOrders,
    MarginalHopf,
    DegenerateZeroRoot,
}

impl VerdictKind {
    pub fn is_stable(self) -> bool {
        matches!(self, Self::StableAllOrders | Self::StableAtOrders)
    }

    pub fn is_unstable(self) -> bool {
        matches!(self, Self::UnstableAllOrders | Self::UnstableAtOrders)
    }
}

/// Which clause decided the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "&'static str")]
pub enum Rule {
    /// `c < 0`: a positive real root exists.
    NegativeDeterminant,
    /// `c = 0`: Δ(0) = 0.
    ZeroDeterminant,
    /// `a > a*(b)`.
    AboveThreshold,
    /// `a < a*(b)`.
    BelowThreshold,
    /// `a = a*(b)` within [`HOPF_TOL`].
    OnThreshold,
    /// `a + 1 > 0`, `a + b > 0`, `b + c > 0`.
    RobustStable,
    /// `a + b + c + 1 ≤ 0`.
    RobustUnstable,
    /// Equal orders: threshold `a* = −b − 2√c·cos(qπ/2)`.
    CommensurateAbove,
    CommensurateBelow,
    CommensurateOn,
    /// `a12·a21 = 0`: the two scalar equations are classified separately.
    Decoupled,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::NegativeDeterminant => "Cor-1",
            Rule::ZeroDeterminant => "Prop-2",
            Rule::AboveThreshold => "Cor-2a",
            Rule::BelowThreshold => "Cor-2b",
            Rule::OnThreshold => "Cor-2-hopf",
            Rule::RobustStable => "Cor-3a",
            Rule::RobustUnstable => "Cor-3b",
            Rule::CommensurateAbove => "Comm-2a",
            Rule::CommensurateBelow => "Comm-2b",
            Rule::CommensurateOn => "Comm-2-hopf",
            Rule::Decoupled => "Decoupled",
        }
    }
}

impl From<Rule> for &'static str {
    fn from(r: Rule) -> Self {
        r.tag()
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub kind: VerdictKind,
    pub rule: Rule,
    /// `min(q1, q2)` for stable verdicts: solutions decay like `t^(−q)`.
    pub decay_order: Option<f64>,
    /// `a − a*(b)`, whenever the threshold was evaluated.
    pub margin: Option<f64>,
}

impl StabilityVerdict {
    fn new(kind: VerdictKind, rule: Rule, q1: f64, q2: f64, margin: Option<f64>) -> Self {
        let decay_order = kind.is_stable().then(|| q1.min(q2));
        Self { kind, rule, decay_order, margin }
    }
}

/// Order-independent region of the `(b, a)` plane for a fixed `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    StableAll,
    UnstableAll,
    OrderDependent,
    Degenerate,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::StableAll => "stable-all",
            Region::UnstableAll => "unstable-all",
            Region::OrderDependent => "order-dependent",
            Region::Degenerate => "degenerate",
        }
    }
}

pub fn order_independent_region(a: f64, b: f64, c: f64) -> Region {
    if c < 0.0 {
        Region::UnstableAll
    } else if c == 0.0 {
        Region::Degenerate
    } else if a + 1.0 > 0.0 && a + b > 0.0 && b + c > 0.0 {
        Region::StableAll
    } else if a + b + c + 1.0 <= 0.0 {
        Region::UnstableAll
    } else {
        Region::OrderDependent
    }
}

fn check_order(q: f64) -> Result<(), ClassifyError> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(ClassifyError::InvalidInput(format!("orders must lie in (0, 1], got {q}")))
    }
}

/// Critical value `a*(b, c, q1, q2)` for `c > 0`, with `a` the coefficient of
/// `s^q2` and `q1 ≤ q2`. Equal orders use the commensurate limit.
pub fn critical_a(b: f64, c: f64, q1: f64, q2: f64) -> Result<f64, ClassifyError> {
    check_order(q1)?;
    check_order(q2)?;
    if !(c > 0.0) {
        return Err(ClassifyError::InvalidInput(format!("threshold needs c > 0, got {c}")));
    }
    if (q2 - q1).abs() < COMMENSURATE_TOL {
        let q = 0.5 * (q1 + q2);
        return Ok(-b - 2.0 * c.sqrt() * (q * FRAC_PI_2).cos());
    }
    if q1 > q2 {
        return Err(ClassifyError::InvalidInput(format!("critical_a expects q1 <= q2, got q1={q1}, q2={q2}")));
    }
    Ok(CriticalCurve::new(c, q1, q2)?.a_star(b))
}

/// Classifies `Δ(s) = s^(q1+q2) + a·s^q2 + b·s^q1 + c`.
pub fn classify_coeffs(a: f64, b: f64, c: f64, q1: f64, q2: f64) -> Result<StabilityVerdict, ClassifyError> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(ClassifyError::InvalidInput(format!("coefficients must be finite (a={a}, b={b}, c={c})")));
    }
    check_order(q1)?;
    check_order(q2)?;
    // Swapping (a, b) with (q1, q2) leaves Δ unchanged.
    let (a, b, q1, q2) = if q1 <= q2 { (a, b, q1, q2) } else { (b, a, q2, q1) };

    if c < 0.0 {
        return Ok(StabilityVerdict::new(VerdictKind::UnstableAllOrders, Rule::NegativeDeterminant, q1, q2, None));
    }
    if c == 0.0 {
        return Ok(StabilityVerdict::new(VerdictKind::DegenerateZeroRoot, Rule::ZeroDeterminant, q1, q2, None));
    }

    let commensurate = q2 - q1 < COMMENSURATE_TOL;
    let a_star = critical_a(b, c, q1, q2)?;
    let margin = a - a_star;
    if margin.abs() <= HOPF_TOL * (1.0 + a_star.abs()) {
        let rule = if commensurate { Rule::CommensurateOn } else { Rule::OnThreshold };
        return Ok(StabilityVerdict::new(VerdictKind::MarginalHopf, rule, q1, q2, Some(margin)));
    }

    let verdict = match order_independent_region(a, b, c) {
        Region::StableAll => {
            StabilityVerdict::new(VerdictKind::StableAllOrders, Rule::RobustStable, q1, q2, Some(margin))
        }
        Region::UnstableAll => {
            StabilityVerdict::new(VerdictKind::UnstableAllOrders, Rule::RobustUnstable, q1, q2, Some(margin))
        }
        _ => {
            let (kind, rule) = match (margin > 0.0, commensurate) {
                (true, false) => (VerdictKind::StableAtOrders, Rule::AboveThreshold),
                (false, false) => (VerdictKind::UnstableAtOrders, Rule::BelowThreshold),
                (true, true) => (VerdictKind::StableAtOrders, Rule::CommensurateAbove),
                (false, true) => (VerdictKind::UnstableAtOrders, Rule::CommensurateBelow),
            };
            StabilityVerdict::new(kind, rule, q1, q2, Some(margin))
        }
    };
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearSystem2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    pub q1: f64,
    pub q2: f64,
}

impl LinearSystem2 {
    pub fn new(matrix: [[f64; 2]; 2], q1: f64, q2: f64) -> Self {
        Self { a11: matrix[0][0], a12: matrix[0][1], a21: matrix[1][0], a22: matrix[1][1], q1, q2 }
    }

    /// `(a, b, c) = (−a11, −a22, det A)`.
    pub fn coefficients(&self) -> (f64, f64, f64) {
        (-self.a11, -self.a22, self.a11 * self.a22 - self.a12 * self.a21)
    }

    pub fn is_decoupled(&self) -> bool {
        self.a12 * self.a21 == 0.0
    }

    pub fn char_function(&self) -> Result<CharFunction, CharFnError> {
        let (a, b, c) = self.coefficients();
        CharFunction::new(a, b, c, self.q1, self.q2)
    }

    /// The system with `x` and `y` relabelled.
    pub fn relabelled(&self) -> Self {
        Self { a11: self.a22, a12: self.a21, a21: self.a12, a22: self.a11, q1: self.q2, q2: self.q1 }
    }
}

pub fn classify_matrix(sys: &LinearSystem2) -> Result<StabilityVerdict, ClassifyError> {
    if sys.is_decoupled() {
        return classify_decoupled(sys);
    }
    let (a, b, c) = sys.coefficients();
    classify_coeffs(a, b, c, sys.q1, sys.q2)
}

// Scalar Caputo equations D^q x = λx are stable iff λ < 0, for every order.
// A triangular system is stable iff both diagonal entries are negative.
fn classify_decoupled(sys: &LinearSystem2) -> Result<StabilityVerdict, ClassifyError> {
    check_order(sys.q1)?;
    check_order(sys.q2)?;
    if !(sys.a11.is_finite() && sys.a22.is_finite()) {
        return Err(ClassifyError::InvalidInput("matrix entries must be finite".into()));
    }
    let kind = if sys.a11 > 0.0 || sys.a22 > 0.0 {
        VerdictKind::UnstableAllOrders
    } else if sys.a11 == 0.0 || sys.a22 == 0.0 {
        VerdictKind::DegenerateZeroRoot
    } else {
        VerdictKind::StableAllOrders
    };
    Ok(StabilityVerdict::new(kind, Rule::Decoupled, sys.q1, sys.q2, None))
}

/// Checks the closed-form verdict against the argument-principle count.
///
/// Stable verdicts must see no right half-plane root, unstable ones at least
/// one, and `MarginalHopf` a root on the imaginary axis.
pub fn verify_with_oracle(sys: &LinearSystem2) -> Result<bool, ClassifyError> {
    let verdict = classify_matrix(sys)?;
    let f = sys.char_function()?;
    if f.c() == 0.0 {
        return Err(ClassifyError::InvalidInput("oracle requires det A != 0".into()));
    }
    match (verdict.kind, f.count_rhp_roots()) {
        (VerdictKind::MarginalHopf, Err(CharFnError::BoundaryRoot { .. })) => Ok(true),
        (VerdictKind::MarginalHopf, Ok(_)) => Ok(false),
        (_, Err(e)) => Err(e.into()),
        (kind, Ok(count)) => Ok(if kind.is_stable() {
            count.count == 0
        } else if kind.is_unstable() {
            count.count >= 1
        } else {
            false
        }),
    }
}

/// `∂s/∂a = −s^q2 / Δ'(s)` at a root `s`.
pub fn root_sensitivity(f: &CharFunction, s: Complex64) -> Result<Complex64, CharFnError> {
    Ok(-crate::charfn::principal_pow(s, f.q2()) / f.eval_delta_ds(s)?)
}
