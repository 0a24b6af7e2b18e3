//! Cross-validation suite behind `fracstab selftest`.
//!
//! Every check is driven by one seeded generator, so a report is a pure
//! function of `(seed, systems)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::CharFunction;
use crate::classify::{classify_matrix, verify_with_oracle, LinearSystem2, VerdictKind};
use crate::critcurve::{CriticalCurve, CurveError};
use crate::fhn::{classify_equilibrium, equilibrium, hopf_q1, FhnParams};

const MAX_NOTES: usize = 5;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub notes: Vec<String>,
}

impl CheckResult {
    fn new(name: &'static str) -> Self {
        Self { name, passed: 0, failed: 0, notes: Vec::new() }
    }

    fn record(&mut self, ok: bool, note: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.notes.len() < MAX_NOTES {
                self.notes.push(note());
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.checks.iter().map(|c| c.passed).sum()
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().map(|c| c.failed).sum()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }
}

pub type CurveFactory = dyn Fn(f64, f64, f64) -> Result<CriticalCurve, CurveError> + Sync;

/// Runs the suite with `systems` random matrices in the oracle check.
pub fn run(seed: u64, systems: usize) -> Report {
    run_with_curve(seed, systems, &CriticalCurve::new)
}

/// Same as [`run`] with the critical curve supplied by `make_curve`.
#[doc(hidden)]
pub fn run_with_curve(seed: u64, systems: usize, make_curve: &CurveFactory) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = vec![
        oracle_agreement(&mut rng, systems),
        curve_boundary(&mut rng, make_curve),
        curve_shape(&mut rng, make_curve),
        fhn_anchors(),
    ];
    Report { seed, checks }
}

/// Random system with entries U[−3, 3] and orders U[0.05, 1], away from the
/// critical curve and from `det A = 0`.
pub fn random_system(rng: &mut impl Rng) -> LinearSystem2 {
    loop {
        let mut m = [[0.0; 2]; 2];
        for row in &mut m {
            for x in row.iter_mut() {
                *x = rng.random_range(-3.0..=3.0);
            }
        }
        let sys = LinearSystem2::new(m, rng.random_range(0.05..=1.0), rng.random_range(0.05..=1.0));
        let (_, _, c) = sys.coefficients();
        if c.abs() < 1e-6 {
            continue;
        }
        match classify_matrix(&sys) {
            Ok(v) if v.margin.is_none_or(|m| m.abs() >= 1e-6) => return sys,
            _ => continue,
        }
    }
}

fn oracle_agreement(rng: &mut ChaCha8Rng, systems: usize) -> CheckResult {
    let sample: Vec<LinearSystem2> = (0..systems).map(|_| random_system(rng)).collect();
    let outcomes: Vec<Result<bool, String>> =
        sample.par_iter().map(|sys| verify_with_oracle(sys).map_err(|e| e.to_string())).collect();
    let mut check = CheckResult::new("oracle-agreement");
    for (sys, outcome) in sample.iter().zip(outcomes) {
        check.record(outcome == Ok(true), || format!("{sys:?}: {outcome:?}"));
    }
    check
}

fn random_curve_config(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let c = 10f64.powf(rng.random_range(-1.0..1.0));
    loop {
        let (x, y): (f64, f64) = (rng.random_range(0.05..=1.0), rng.random_range(0.05..=1.0));
        if (x - y).abs() > 1e-3 {
            return (c, x.min(y), x.max(y));
        }
    }
}

fn curve_boundary(rng: &mut ChaCha8Rng, make_curve: &CurveFactory) -> CheckResult {
    let mut check = CheckResult::new("curve-boundary");
    for _ in 0..200 {
        let (c, q1, q2) = random_curve_config(rng);
        let omega = 10f64.powf(rng.random_range(-2.0..2.0));
        let residual =
            make_curve(c, q1, q2).and_then(|g| g.gamma_point(omega)).map_err(|e| e.to_string()).and_then(|p| {
                let f = CharFunction::new(p.a, p.b, c, q1, q2).map_err(|e| e.to_string())?;
                Ok(f.eval_delta(Complex64::new(0.0, omega)).norm() / (1.0 + omega.powf(q1 + q2)))
            });
        check.record(matches!(residual, Ok(r) if r < 1e-9), || {
            format!("c={c}, q=({q1}, {q2}), omega={omega}: {residual:?}")
        });
    }
    check
}

fn curve_shape(rng: &mut ChaCha8Rng, make_curve: &CurveFactory) -> CheckResult {
    let mut check = CheckResult::new("curve-shape");
    for _ in 0..20 {
        let (c, q1, q2) = random_curve_config(rng);
        let curve = match make_curve(c, q1, q2) {
            Ok(g) => g,
            Err(e) => {
                check.record(false, || e.to_string());
                continue;
            }
        };
        let bs: Vec<f64> = (0..=100).map(|k| -10.0 + 0.2 * k as f64).collect();
        let a: Vec<f64> = bs.iter().map(|&b| curve.a_star(b)).collect();
        let decreasing = a.windows(2).all(|w| w[1] < w[0]);
        let convex = a.windows(3).all(|w| w[1] <= 0.5 * (w[0] + w[2]) + 1e-9);
        let bounded = bs.iter().zip(&a).all(|(&b, &a)| {
            let bound = if b < 0.0 { (-b).powf(q2 / q1) * c.powf(1.0 - q2 / q1) } else { -b.powf(q1 / q2) };
            a <= bound + 1e-12 * (1.0 + bound.abs())
        });
        check.record(decreasing && convex && bounded, || {
            format!("c={c}, q=({q1}, {q2}): decreasing={decreasing}, convex={convex}, bounds={bounded}")
        });
    }
    check
}

fn fhn_anchors() -> CheckResult {
    let mut check = CheckResult::new("fhn-anchors");
    let p = FhnParams::new(0.08, 0.7, 0.8, 1.24567).expect("reference parameters are valid");

    let eq = equilibrium(&p);
    let residual = (p.i_inf(eq.v_star) - p.current()).abs();
    check.record(residual <= 1e-12 * (1.0 + p.current().abs()) && (eq.v_star - 0.8).abs() < 1e-5, || {
        format!("equilibrium v*={} (residual {residual:e})", eq.v_star)
    });

    let low = classify_equilibrium(&p, 0.58, 0.8).map(|v| v.kind);
    let high = classify_equilibrium(&p, 0.63, 0.8).map(|v| v.kind);
    check.record(low == Ok(VerdictKind::StableAtOrders) && high == Ok(VerdictKind::UnstableAtOrders), || {
        format!("verdicts at q1=0.58/0.63: {low:?}/{high:?}")
    });

    let q1 = hopf_q1(&p, 0.8);
    check.record(matches!(q1, Ok(Some(q)) if (q - 0.599).abs() < 0.005), || format!("hopf q1* = {q1:?}"));

    let robust = p.with_current(p.i_inf(1.5)).map(|h| classify_equilibrium(&h, 0.3, 0.9).map(|v| v.kind));
    check.record(robust == Ok(Ok(VerdictKind::StableAllOrders)), || format!("v*=1.5 verdict: {robust:?}"));
    check
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passes_on_default_build() {
        let report = run(7, 200);
        for c in &report.checks {
            assert_eq!(c.failed, 0, "{}: {:?}", c.name, c.notes);
        }
        assert_eq!(report.checks[0].passed, 200);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = serde_json::to_string(&run(3, 50)).unwrap();
        let b = serde_json::to_string(&run(3, 50)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corrupted_rho2_is_caught() {
        let corrupt = |c: f64, q1: f64, q2: f64| {
            let g = CriticalCurve::new(c, q1, q2)?;
            Ok(CriticalCurve::with_rhos_unchecked(c, q1, q2, g.rho1(), -g.rho2()))
        };
        let report = run_with_curve(1, 20, &corrupt);
        assert!(!report.all_passed());
        let boundary = report.checks.iter().find(|c| c.name == "curve-boundary").unwrap();
        assert_eq!(boundary.passed, 0);
        assert!(!boundary.notes.is_empty());
    }
}
