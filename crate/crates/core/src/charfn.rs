//! The characteristic quasi-polynomial of a two-component fractional system
//!
//! ```text
//! Δ(s) = s^(q1+q2) + a·s^q2 + b·s^q1 + c
//! ```
//!
//! All complex powers are taken on the principal branch, `arg s ∈ (−π, π]`,
//! with the convention `0^q = 0` for `q > 0`. Root counting in the open
//! right half-plane is done with the argument principle and is used as the
//! independent check for every closed-form stability verdict.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Orders closer than this are handled as a single (commensurate) order.
pub const COMMENSURATE_TOL: f64 = 1e-9;

/// `|Δ(iω)| / (1 + ω^(q1+q2))` below this value is reported as a root on the
/// imaginary axis.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// A winding integral further than this from an integer is rejected.
pub const MAX_WINDING_RESIDUAL: f64 = 0.1;

// Largest phase increment accepted between neighbouring contour samples.
const MAX_PHASE_STEP: f64 = PI / 4.0;
const MAX_REFINE_DEPTH: u32 = 48;
// Initial sampling of the imaginary axis, uniform in ln ω.
const AXIS_LOG_STEP: f64 = 0.05;
const ARC_SAMPLES: usize = 256;
// Commensurate path: |arg λ| this close to qπ/2 is a boundary root.
const ANGLE_TOL: f64 = 1e-9;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharFnError {
    #[error("invalid characteristic function: {0}")]
    InvalidInput(String),
    #[error("derivative of Δ is undefined at s = 0")]
    AtOrigin,
    #[error("Δ has a root on the imaginary axis near ω = {omega:.6e} (scaled |Δ| = {scaled_modulus:.3e})")]
    BoundaryRoot { omega: f64, scaled_modulus: f64 },
    #[error("winding number is unreliable (residual {residual:.3e})")]
    UnreliableWinding { residual: f64 },
    #[error("Newton iteration did not converge (last iterate {last}, |Δ| = {residual:.3e})")]
    NoConvergence { last: Complex64, residual: f64 },
}

/// Principal-branch power `s^q` with `0^q = 0` for `q > 0`.
pub fn principal_pow(s: Complex64, q: f64) -> Complex64 {
    if s.re == 0.0 && s.im == 0.0 {
        return if q > 0.0 {
            Complex64::new(0.0, 0.0)
        } else if q == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    let (ln_r, theta) = log_polar(s);
    Complex64::from_polar((q * ln_r).exp(), q * theta)
}

// ln|s| and arg s in (−π, π]; atan2 returns −π for a negative real with −0.0
// imaginary part, which belongs to the upper edge of the cut.
fn log_polar(s: Complex64) -> (f64, f64) {
    let mut theta = s.im.atan2(s.re);
    if theta == -PI {
        theta = PI;
    }
    (s.norm().ln(), theta)
}

fn wrap_angle(mut d: f64) -> f64 {
    while d > PI {
        d -= 2.0 * PI;
    }
    while d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Number of zeros of Δ in the open right half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhpCount {
    pub count: usize,
    pub contour_radius: f64,
    pub winding_residual: f64,
}

/// `Δ(s) = s^(q1+q2) + a·s^q2 + b·s^q1 + c` with `0 < q1 ≤ q2 ≤ 1`.
///
/// Construction normalizes the order pair: if `q1 > q2` the orders are
/// swapped together with `a ↔ b`, which leaves Δ unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFunction {
    a: f64,
    b: f64,
    c: f64,
    q1: f64,
    q2: f64,
}

impl CharFunction {
    pub fn new(a: f64, b: f64, c: f64, q1: f64, q2: f64) -> Result<Self, CharFnError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(CharFnError::InvalidInput(format!("coefficients must be finite (a={a}, b={b}, c={c})")));
        }
        for q in [q1, q2] {
            if !(q > 0.0 && q <= 1.0) {
                return Err(CharFnError::InvalidInput(format!("orders must lie in (0, 1], got {q}")));
            }
        }
        Ok(if q1 <= q2 { Self { a, b, c, q1, q2 } } else { Self { a: b, b: a, c, q1: q2, q2: q1 } })
    }

    /// Coefficient of `s^q2`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Coefficient of `s^q1`.
    pub fn b(&self) -> f64 {
        self.b
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

    /// `min(q1, q2)`, the algebraic decay rate of a stable system.
    pub fn decay_order(&self) -> f64 {
        self.q1
    }

    pub fn is_commensurate(&self) -> bool {
        self.q2 - self.q1 < COMMENSURATE_TOL
    }

    pub fn eval_delta(&self, s: Complex64) -> Complex64 {
        if s.re == 0.0 && s.im == 0.0 {
            return Complex64::new(self.c, 0.0);
        }
        let (ln_r, theta) = log_polar(s);
        self.eval_polar(ln_r, theta)
    }

    // Δ at s = exp(ln_r)·e^{iθ}; avoids forming |s| when it would overflow.
    fn eval_polar(&self, ln_r: f64, theta: f64) -> Complex64 {
        let p = |q: f64| Complex64::from_polar((q * ln_r).exp(), q * theta);
        p(self.q1 + self.q2) + self.a * p(self.q2) + self.b * p(self.q1) + self.c
    }

    /// `dΔ/ds = (q1+q2)s^(q1+q2−1) + a·q2·s^(q2−1) + b·q1·s^(q1−1)`.
    pub fn eval_delta_ds(&self, s: Complex64) -> Result<Complex64, CharFnError> {
        if s.re == 0.0 && s.im == 0.0 {
            return Err(CharFnError::AtOrigin);
        }
        let (ln_r, theta) = log_polar(s);
        let p = |q: f64| Complex64::from_polar((q * ln_r).exp(), q * theta);
        let (q1, q2) = (self.q1, self.q2);
        Ok((q1 + q2) * p(q1 + q2 - 1.0) + self.a * q2 * p(q2 - 1.0) + self.b * q1 * p(q1 - 1.0))
    }

    /// `R = max(2, (3(|a|+|b|+|c|))^(1/q1))`, returned as `ln R`.
    ///
    /// For `|s| = R > 1` the leading term dominates the rest, so every root
    /// lies strictly inside the contour.
    fn ln_contour_radius(&self) -> f64 {
        let sum = self.a.abs() + self.b.abs() + self.c.abs();
        (2.0f64).ln().max((3.0 * sum).ln() / self.q1)
    }

    /// Below this frequency `|Δ(iω) − c| ≤ 1e−3·|c|`, so the remaining phase
    /// change down to ω = 0 is a single small increment.
    fn ln_axis_floor(&self, ln_radius: f64) -> f64 {
        let t = ((1e-3 * self.c.abs()).ln() - (self.a.abs() + self.b.abs() + 1.0).ln()) / self.q1;
        t.clamp((1e-300f64).ln(), ln_radius - 1.0)
    }

    fn scaled_axis_modulus(&self, ln_omega: f64, value: Complex64) -> f64 {
        value.norm() / (1.0 + ((self.q1 + self.q2) * ln_omega).exp())
    }

    /// Count zeros in `Re s > 0` (with multiplicity) by the argument principle.
    ///
    /// The contour is the boundary of the right half-disk of radius `R`. Δ is
    /// continuous at the origin with `Δ(0) = c ≠ 0`, so the contour runs
    /// straight through it. Real coefficients give `Δ(s̄) = conj Δ(s)` off the
    /// cut, so only the upper half is traversed and its phase change doubled.
    pub fn count_rhp_roots(&self) -> Result<RhpCount, CharFnError> {
        if self.c == 0.0 {
            return Err(CharFnError::BoundaryRoot { omega: 0.0, scaled_modulus: 0.0 });
        }
        if self.is_commensurate() {
            return self.count_commensurate();
        }

        let ln_radius = self.ln_contour_radius();
        let contour_radius = ln_radius.exp();

        let arc = |theta: f64| self.eval_polar(ln_radius, theta);
        let arc_params: Vec<f64> = (0..=ARC_SAMPLES).map(|k| FRAC_PI_2 * k as f64 / ARC_SAMPLES as f64).collect();
        let arc_path = unwrap_phase(&arc, &arc_params);

        // Imaginary axis, from iR down towards the origin, in t = ln ω.
        let axis = |t: f64| self.eval_polar(t, FRAC_PI_2);
        let t_lo = self.ln_axis_floor(ln_radius);
        let n = (((ln_radius - t_lo) / AXIS_LOG_STEP).ceil() as usize).max(16);
        let axis_params: Vec<f64> = (0..=n).map(|k| ln_radius - (ln_radius - t_lo) * k as f64 / n as f64).collect();
        let axis_path = unwrap_phase(&axis, &axis_params);

        self.check_axis(&axis_path.samples)?;

        let last = axis_path.samples.last().map(|s| s.1).unwrap_or(Complex64::new(self.c, 0.0));
        let to_origin = wrap_angle(Complex64::new(self.c, 0.0).arg() - last.arg());

        let upper = arc_path.total + axis_path.total + to_origin;
        if !upper.is_finite() {
            return Err(CharFnError::UnreliableWinding { residual: f64::NAN });
        }
        let winding = upper / PI;
        let nearest = winding.round();
        let residual = (winding - nearest).abs();
        if residual >= MAX_WINDING_RESIDUAL || nearest < 0.0 {
            return Err(CharFnError::UnreliableWinding { residual });
        }
        Ok(RhpCount { count: nearest as usize, contour_radius, winding_residual: residual })
    }

    // Every local minimum of the scaled modulus along the sampled axis is
    // polished by golden-section search before comparing to BOUNDARY_TOL.
    fn check_axis(&self, samples: &[(f64, Complex64)]) -> Result<(), CharFnError> {
        let m: Vec<f64> = samples.iter().map(|&(t, z)| self.scaled_axis_modulus(t, z)).collect();
        let scaled_c = self.c.abs();
        if scaled_c < BOUNDARY_TOL {
            return Err(CharFnError::BoundaryRoot { omega: 0.0, scaled_modulus: scaled_c });
        }
        for k in 0..m.len() {
            let left = if k > 0 { m[k - 1] } else { f64::INFINITY };
            let right = if k + 1 < m.len() { m[k + 1] } else { f64::INFINITY };
            if !(m[k] <= left && m[k] <= right) {
                continue;
            }
            let lo = samples[(k + 1).min(m.len() - 1)].0;
            let hi = samples[k.saturating_sub(1)].0;
            let f = |t: f64| self.scaled_axis_modulus(t, self.eval_polar(t, FRAC_PI_2));
            let (t_min, m_min) = golden_min(f, lo.min(hi), lo.max(hi), samples[k].0, m[k]);
            if m_min < BOUNDARY_TOL {
                return Err(CharFnError::BoundaryRoot { omega: t_min.exp(), scaled_modulus: m_min });
            }
        }
        Ok(())
    }

    // q1 ≈ q2 = q: Δ = λ² + (a+b)λ + c with λ = s^q. A root λ maps to a
    // right half-plane s exactly when |arg λ| < qπ/2.
    fn count_commensurate(&self) -> Result<RhpCount, CharFnError> {
        let q = 0.5 * (self.q1 + self.q2);
        let p = self.a + self.b;
        let disc = Complex64::new(p * p - 4.0 * self.c, 0.0).sqrt();
        let half_sector = q * FRAC_PI_2;
        let mut count = 0;
        let mut radius = 2.0f64;
        for lambda in [(-p + disc) / 2.0, (-p - disc) / 2.0] {
            let theta = lambda.arg().abs();
            let modulus = lambda.norm().powf(1.0 / q);
            radius = radius.max(2.0 * modulus);
            if (theta - half_sector).abs() < ANGLE_TOL {
                return Err(CharFnError::BoundaryRoot { omega: modulus, scaled_modulus: 0.0 });
            }
            if theta < half_sector {
                count += 1;
            }
        }
        Ok(RhpCount { count, contour_radius: radius, winding_residual: 0.0 })
    }

    /// Newton refinement of a root of Δ starting from `s0`.
    ///
    /// Steps are halved while they fail to decrease `|Δ|`. Converged when
    /// `|Δ(s)| ≤ 1e−12·(1 + |s|^(q1+q2))`.
    pub fn track_root(&self, s0: Complex64) -> Result<Complex64, CharFnError> {
        let tol = |s: Complex64| 1e-12 * (1.0 + s.norm().powf(self.q1 + self.q2));
        let mut s = s0;
        let mut f = self.eval_delta(s);
        for _ in 0..NEWTON_MAX_ITER {
            if f.norm() <= tol(s) {
                // one polishing step, kept only if it helps
                if let Ok(df) = self.eval_delta_ds(s) {
                    let cand = s - f / df;
                    let fc = self.eval_delta(cand);
                    if fc.norm() < f.norm() {
                        return Ok(cand);
                    }
                }
                return Ok(s);
            }
            let df = match self.eval_delta_ds(s) {
                Ok(df) if df.norm() > 0.0 && df.is_finite() => df,
                _ => break,
            };
            let step = f / df;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let cand = s - lambda * step;
                let fc = self.eval_delta(cand);
                if fc.is_finite() && fc.norm() < f.norm() {
                    s = cand;
                    f = fc;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if f.norm() <= tol(s) {
            return Ok(s);
        }
        Err(CharFnError::NoConvergence { last: s, residual: f.norm() })
    }
}

struct PhasePath {
    total: f64,
    samples: Vec<(f64, Complex64)>,
}

/// Accumulates the continuous change of `arg f` along `params`, bisecting any
/// interval whose phase increment exceeds `MAX_PHASE_STEP`.
fn unwrap_phase<F: Fn(f64) -> Complex64>(f: &F, params: &[f64]) -> PhasePath {
    let mut samples = Vec::with_capacity(params.len() + 64);
    let mut total = 0.0;
    let mut prev = (params[0], f(params[0]));
    samples.push(prev);
    for &t in &params[1..] {
        let next = (t, f(t));
        refine(f, prev, next, 0, &mut total, &mut samples);
        prev = next;
    }
    PhasePath { total, samples }
}

fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    (t0, z0): (f64, Complex64),
    (t1, z1): (f64, Complex64),
    depth: u32,
    total: &mut f64,
    samples: &mut Vec<(f64, Complex64)>,
) {
    let d = wrap_angle(z1.arg() - z0.arg());
    if d.abs() > MAX_PHASE_STEP && depth < MAX_REFINE_DEPTH {
        let tm = 0.5 * (t0 + t1);
        let mid = (tm, f(tm));
        refine(f, (t0, z0), mid, depth + 1, total, samples);
        refine(f, mid, (t1, z1), depth + 1, total, samples);
    } else {
        *total += d;
        samples.push((t1, z1));
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, t0: f64, m0: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = (t0, m0);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..90 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    for cand in [(x1, f1), (x2, f2)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cf(a: f64, b: f64, c: f64, q1: f64, q2: f64) -> CharFunction {
        CharFunction::new(a, b, c, q1, q2).unwrap()
    }

    // Direct transcription of the definition, without the shared log/arg path.
    fn delta_raw(a: f64, b: f64, c: f64, q1: f64, q2: f64, s: Complex64) -> Complex64 {
        let p = |q: f64| {
            if s == Complex64::new(0.0, 0.0) {
                Complex64::new(0.0, 0.0)
            } else {
                (q * s.ln()).exp()
            }
        };
        p(q1 + q2) + a * p(q2) + b * p(q1) + c
    }

    #[test]
    fn delta_at_origin_is_c() {
        let f = cf(0.0, 0.0, 1.0, 0.4, 0.8);
        assert_eq!(f.eval_delta(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn delta_vanishes_where_s_pow_sum_is_minus_one() {
        let f = cf(0.0, 0.0, 1.0, 0.4, 0.8);
        let s = Complex64::from_polar(1.0, 5.0 * PI / 6.0);
        assert!(f.eval_delta(s).norm() < 1e-12);
    }

    #[test]
    fn delta_at_one_is_coefficient_sum() {
        let f = cf(2.0, 3.0, 4.0, 0.4, 0.8);
        let v = f.eval_delta(Complex64::new(1.0, 0.0));
        assert!((v - Complex64::new(10.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn derivative_examples() {
        let f = cf(0.0, 0.0, 1.0, 0.5, 1.0);
        let d = f.eval_delta_ds(Complex64::new(1.0, 0.0)).unwrap();
        assert!((d - Complex64::new(1.5, 0.0)).norm() < 1e-14);

        let f = cf(1.0, 0.0, 0.0, 0.4, 0.8);
        let d = f.eval_delta_ds(Complex64::new(1.0, 0.0)).unwrap();
        assert!((d - Complex64::new(2.0, 0.0)).norm() < 1e-14);

        assert_eq!(f.eval_delta_ds(Complex64::new(0.0, 0.0)), Err(CharFnError::AtOrigin));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let f = cf(0.7, -1.3, 2.1, 0.35, 0.9);
        let s = Complex64::new(1.0, 1.0);
        let h = 1e-6;
        let fd = (f.eval_delta(s + h) - f.eval_delta(s - h)) / (2.0 * h);
        let d = f.eval_delta_ds(s).unwrap();
        assert!((fd - d).norm() / d.norm() < 1e-6, "fd={fd} d={d}");
    }

    #[test]
    fn branch_cut_uses_upper_edge() {
        let s = Complex64::new(-1.0, -0.0);
        let p = principal_pow(s, 0.5);
        assert!((p - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(CharFunction::new(0.0, 0.0, 1.0, 0.0, 0.5).is_err());
        assert!(CharFunction::new(0.0, 0.0, 1.0, 0.5, 1.2).is_err());
        assert!(CharFunction::new(f64::NAN, 0.0, 1.0, 0.5, 0.6).is_err());
    }

    #[test]
    fn normalization_swaps_orders_and_coefficients() {
        let f = cf(1.0, 2.0, 3.0, 0.9, 0.3);
        assert_eq!((f.a(), f.b(), f.q1(), f.q2()), (2.0, 1.0, 0.3, 0.9));
        assert_eq!(f.decay_order(), 0.3);
    }

    #[test]
    fn count_examples() {
        assert_eq!(cf(0.0, 0.0, 1.0, 0.4, 0.8).count_rhp_roots().unwrap().count, 0);
        assert_eq!(cf(0.0, 0.0, -1.0, 0.4, 0.8).count_rhp_roots().unwrap().count, 1);
        assert_eq!(cf(5.0, 0.0, 4.0, 0.4, 0.8).count_rhp_roots().unwrap().count, 0);
    }

    #[test]
    fn count_reports_residual_and_radius() {
        let r = cf(-2.0, 0.5, 1.0, 0.3, 0.7).count_rhp_roots().unwrap();
        assert!(r.winding_residual < 1e-6);
        assert!(r.contour_radius >= 2.0);
    }

    #[test]
    fn zero_constant_term_is_a_boundary_root() {
        let err = cf(1.0, 1.0, 0.0, 0.4, 0.8).count_rhp_roots().unwrap_err();
        assert!(matches!(err, CharFnError::BoundaryRoot { omega, .. } if omega == 0.0));
    }

    #[test]
    fn root_on_axis_is_reported() {
        // Critical pair for c = 4, q = (0.4, 0.8) at ω = 1 (ρ₁ = 1):
        // b = 1 − 4ρ₂, a = 4 − ρ₂.
        let rho2 = 2.0 * (0.2 * PI).cos();
        let f = cf(4.0 - rho2, 1.0 - 4.0 * rho2, 4.0, 0.4, 0.8);
        assert!(f.eval_delta(Complex64::new(0.0, 1.0)).norm() < 1e-12);
        match f.count_rhp_roots() {
            Err(CharFnError::BoundaryRoot { omega, .. }) => assert!((omega - 1.0).abs() < 1e-6),
            other => panic!("expected boundary root, got {other:?}"),
        }
    }

    #[test]
    fn commensurate_path() {
        // λ² + 2λ + 2 = 0 → λ = −1 ± i, |arg λ| = 3π/4.
        // Stable iff 3π/4 > qπ/2, i.e. for every q ≤ 1.
        assert_eq!(cf(1.0, 1.0, 2.0, 0.7, 0.7).count_rhp_roots().unwrap().count, 0);
        // λ² − λ + 1: |arg λ| = π/3; unstable iff π/3 < qπ/2, q > 2/3.
        assert_eq!(cf(-0.5, -0.5, 1.0, 0.9, 0.9).count_rhp_roots().unwrap().count, 2);
        assert_eq!(cf(-0.5, -0.5, 1.0, 0.5, 0.5).count_rhp_roots().unwrap().count, 0);
        // λ² − 1: one λ = 1 in the sector.
        assert_eq!(cf(0.0, 0.0, -1.0, 0.5, 0.5).count_rhp_roots().unwrap().count, 1);
        assert!(matches!(
            cf(-0.5, -0.5, 1.0, 2.0 / 3.0, 2.0 / 3.0).count_rhp_roots(),
            Err(CharFnError::BoundaryRoot { .. })
        ));
    }

    #[test]
    fn commensurate_agrees_with_contour_just_off_the_diagonal() {
        for &(a, b, c) in &[(1.0, 1.0, 2.0), (-0.5, -0.5, 1.0), (-3.0, 0.5, 1.0), (0.2, -0.1, 3.0)] {
            let comm = cf(a, b, c, 0.8, 0.8).count_rhp_roots().unwrap().count;
            let near = cf(a, b, c, 0.8, 0.8 + 1e-4).count_rhp_roots().unwrap().count;
            assert_eq!(comm, near, "a={a} b={b} c={c}");
        }
    }

    #[test]
    fn track_root_examples() {
        let f = cf(0.0, 0.0, 1.0, 0.4, 0.8);
        let s = f.track_root(Complex64::new(-0.5, 0.9)).unwrap();
        assert!((s - Complex64::from_polar(1.0, 5.0 * PI / 6.0)).norm() < 1e-10);

        let f = cf(0.0, 0.0, -1.0, 0.4, 0.8);
        let s = f.track_root(Complex64::new(1.2, 0.0)).unwrap();
        assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn positive_coefficients_have_no_rhp_roots() {
        for &(a, b, c, q1, q2) in &[
            (0.0, 0.0, 0.5, 0.1, 0.95),
            (3.0, 0.0, 1.0, 0.5, 0.6),
            (0.0, 7.0, 2.0, 0.05, 1.0),
            (1e-3, 1e-3, 10.0, 0.9, 1.0),
        ] {
            assert_eq!(cf(a, b, c, q1, q2).count_rhp_roots().unwrap().count, 0);
        }
    }

    // Test-only oracle: does Δ have a root on (0, ∞)? Δ is real there.
    fn has_positive_real_root(f: &CharFunction) -> bool {
        let mut prev = f.c();
        for k in 0..=4000 {
            let x = (-20.0 + 60.0 * k as f64 / 4000.0f64).exp();
            let v = f.eval_delta(Complex64::new(x, 0.0)).re;
            if v.signum() != prev.signum() || v.abs() < 1e-6 {
                return true;
            }
            prev = v;
        }
        false
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn swap_symmetry(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64,
                         q1 in 0.05..1.0f64, q2 in 0.05..1.0f64,
                         re in -3.0..3.0f64, im in -3.0..3.0f64) {
            let s = Complex64::new(re, im);
            let f = cf(a, b, c, q1, q2);
            let g = cf(b, a, c, q2, q1);
            prop_assert_eq!(f, g);
            let raw = delta_raw(a, b, c, q1, q2, s);
            let raw_swapped = delta_raw(b, a, c, q2, q1, s);
            prop_assert!((f.eval_delta(s) - raw).norm() <= 1e-10 * (1.0 + raw.norm()));
            prop_assert!((raw - raw_swapped).norm() <= 1e-10 * (1.0 + raw.norm()));
        }

        #[test]
        fn conjugate_symmetry(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64,
                              q1 in 0.05..1.0f64, q2 in 0.05..1.0f64,
                              re in -3.0..3.0f64, im in 1e-3..3.0f64) {
            let f = cf(a, b, c, q1, q2);
            let s = Complex64::new(re, im);
            let lhs = f.eval_delta(s.conj());
            let rhs = f.eval_delta(s).conj();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        }

        #[test]
        fn negative_constant_forces_rhp_root(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..-1e-3f64,
                                             q1 in 0.05..1.0f64, q2 in 0.05..1.0f64) {
            let f = cf(a, b, c, q1, q2);
            match f.count_rhp_roots() {
                Ok(r) => prop_assert!(r.count >= 1),
                Err(CharFnError::BoundaryRoot { .. }) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn nonnegative_coefficients_are_stable(a in 0.0..5.0f64, b in 0.0..5.0f64, c in 1e-3..5.0f64,
                                               q1 in 0.05..1.0f64, q2 in 0.05..1.0f64) {
            prop_assert_eq!(cf(a, b, c, q1, q2).count_rhp_roots().unwrap().count, 0);
        }

        #[test]
        fn count_even_without_positive_real_root(a in -3.0..3.0f64, b in -3.0..3.0f64, c in 0.05..3.0f64,
                                                 q1 in 0.1..1.0f64, q2 in 0.1..1.0f64) {
            let f = cf(a, b, c, q1, q2);
            prop_assume!(!has_positive_real_root(&f));
            if let Ok(r) = f.count_rhp_roots() {
                prop_assert_eq!(r.count % 2, 0);
            }
        }

        #[test]
        fn tracked_root_meets_tolerance(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64,
                                        q1 in 0.1..1.0f64, q2 in 0.1..1.0f64,
                                        re in -2.0..2.0f64, im in -2.0..2.0f64) {
            let f = cf(a, b, c, q1, q2);
            match f.track_root(Complex64::new(re, im)) {
                Ok(s) => prop_assert!(f.eval_delta(s).norm() <= 1e-12 * (1.0 + s.norm().powf(q1 + q2))),
                Err(CharFnError::NoConvergence { .. }) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
