//! Trajectories of linear systems behave as their verdicts say.

use fracstab::{classify_matrix, solve, FdeError, FdeProblem, LinearSystem2, StabilityVerdict, VerdictKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const T_END: f64 = 500.0;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn problem(sys: &LinearSystem2, x0: Vec<f64>) -> FdeProblem {
    let m = [[sys.a11, sys.a12], [sys.a21, sys.a22]];
    FdeProblem::new(vec![sys.q1, sys.q2], x0, T_END, 0.05, move |_, x, dx| {
        dx[0] = m[0][0] * x[0] + m[0][1] * x[1];
        dx[1] = m[1][0] * x[0] + m[1][1] * x[1];
    })
    .unwrap()
}

// Random systems with the given verdict, at least 0.25 from the threshold.
fn sample(
    rng: &mut ChaCha8Rng,
    n: usize,
    keep: impl Fn(&LinearSystem2, &StabilityVerdict) -> bool,
) -> Vec<(LinearSystem2, Vec<f64>)> {
    let mut out = Vec::new();
    while out.len() < n {
        let mut m = [[0.0; 2]; 2];
        for x in m.iter_mut().flatten() {
            *x = rng.random_range(-3.0..=3.0);
        }
        let sys = LinearSystem2::new(m, rng.random_range(0.2..=1.0), rng.random_range(0.2..=1.0));
        let far = |v: &StabilityVerdict| v.margin.is_some_and(|m| m.abs() >= 0.25);
        if matches!(classify_matrix(&sys), Ok(v) if far(&v) && keep(&sys, &v)) {
            out.push((sys, vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]));
        }
    }
    out
}

#[test]
fn stable_verdicts_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cases = sample(&mut rng, 6, |_, v| v.kind == VerdictKind::StableAtOrders);
    cases.par_iter().for_each(|(sys, x0)| {
        let traj = solve(&problem(sys, x0.clone())).unwrap();
        let end = norm(traj.states.last().unwrap());
        assert!(end < norm(x0), "{sys:?}: {end} vs {}", norm(x0));
    });
}

#[test]
fn unstable_verdicts_grow() {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let cases = sample(&mut rng, 6, |sys, v| v.kind == VerdictKind::UnstableAtOrders && sys.coefficients().2 > 0.0);
    cases.par_iter().for_each(|(sys, x0)| match solve(&problem(sys, x0.clone())) {
        Err(FdeError::NonFinite { .. }) => {}
        Ok(traj) => {
            let peak = traj.states.iter().map(|x| norm(x)).fold(0.0, f64::max);
            assert!(peak > 10.0 * norm(x0), "{sys:?}: peak {peak}");
        }
        Err(e) => panic!("{e}"),
    });
}
