//! Caputo systems with one fractional order per component
//!
//! ```text
//! D^qi x_i(t) = f_i(t, x(t)),   0 < qi ≤ 1,   x(0) = x0
//! ```
//!
//! integrated with the fractional Adams-Bashforth-Moulton predictor-corrector
//! (one corrector pass per step, full memory). Each component uses the
//! convolution weights of its own order.

use std::collections::HashMap;
use std::fmt;

use statrs::function::gamma::gamma;
use thiserror::Error;

/// Any component above this magnitude stops the integration.
pub const OVERFLOW_THRESHOLD: f64 = 1e12;

/// Tail oscillation (relative to the fitted power law) above which a decay
/// fit is refused.
const MAX_TAIL_OSCILLATION: f64 = 0.5;

pub type Rhs = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;

#[derive(Debug, Error)]
pub enum FdeError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("solution left the finite range after t = {time}")]
    NonFinite { time: f64, trajectory: Box<Trajectory> },
    #[error("decay exponent cannot be fitted: {0}")]
    DegenerateTail(String),
}

pub struct FdeProblem {
    orders: Vec<f64>,
    initial_state: Vec<f64>,
    t_end: f64,
    step: f64,
    n_steps: usize,
    rhs: Box<Rhs>,
}

impl fmt::Debug for FdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FdeProblem")
            .field("orders", &self.orders)
            .field("initial_state", &self.initial_state)
            .field("t_end", &self.t_end)
            .field("step", &self.step)
            .finish_non_exhaustive()
    }
}

impl FdeProblem {
    /// `rhs(t, x, dx)` writes `f(t, x)` into `dx`.
    ///
    /// `t_end` must be an integer multiple of `step` (to 1e−9 relative).
    pub fn new<F>(orders: Vec<f64>, initial_state: Vec<f64>, t_end: f64, step: f64, rhs: F) -> Result<Self, FdeError>
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        if orders.is_empty() || orders.len() != initial_state.len() {
            return Err(FdeError::InvalidProblem(format!(
                "{} orders for {} state components",
                orders.len(),
                initial_state.len()
            )));
        }
        if let Some(q) = orders.iter().find(|&&q| !(q > 0.0 && q <= 1.0)) {
            return Err(FdeError::InvalidProblem(format!("orders must lie in (0, 1], got {q}")));
        }
        if initial_state.iter().any(|x| !x.is_finite()) {
            return Err(FdeError::InvalidProblem("initial state must be finite".into()));
        }
        if !(step > 0.0 && t_end > 0.0 && step.is_finite() && t_end.is_finite()) {
            return Err(FdeError::InvalidProblem(format!(
                "t_end and step must be positive (t_end={t_end}, step={step})"
            )));
        }
        let k = (t_end / step).round();
        if k < 1.0 || (k * step - t_end).abs() > 1e-9 * t_end {
            return Err(FdeError::InvalidProblem(format!("t_end={t_end} is not an integer multiple of step={step}")));
        }
        Ok(Self { orders, initial_state, t_end, step, n_steps: k as usize, rhs: Box::new(rhs) })
    }

    pub fn dimension(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.initial_state
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn eval_rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.rhs)(t, x, dx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub orders: Vec<f64>,
    pub step: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Values of one state component over the grid.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|x| x[i]).collect()
    }
}

/// Product-rectangle (predictor) and product-trapezoid (corrector) weights of
/// one order, indexed by the lag `k = n − j`.
struct Weights {
    predictor: Vec<f64>,
    corrector: Vec<f64>,
    first: Vec<f64>,
    predictor_scale: f64,
    corrector_scale: f64,
}

impl Weights {
    fn new(q: f64, h: f64, n_steps: usize) -> Self {
        let pow = |k: usize, p: f64| (k as f64).powf(p);
        let predictor = (0..=n_steps).map(|k| pow(k + 1, q) - pow(k, q)).collect();
        let corrector =
            (0..=n_steps).map(|k| pow(k + 2, q + 1.0) + pow(k, q + 1.0) - 2.0 * pow(k + 1, q + 1.0)).collect();
        // weight of f_0 in the corrector at step n -> n+1
        let first = (0..=n_steps).map(|n| pow(n, q + 1.0) - (n as f64 - q) * pow(n + 1, q)).collect();
        Self {
            predictor,
            corrector,
            first,
            predictor_scale: h.powf(q) / gamma(q + 1.0),
            corrector_scale: h.powf(q) / gamma(q + 2.0),
        }
    }
}

/// `Σ_j history[j] · weights[len − 1 − j]`, with four partial sums.
fn dot_reversed(history: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(history.len(), weights.len());
    let mut acc = [0.0f64; 4];
    let n = history.len();
    let mut chunks = history.chunks_exact(4);
    let mut j = 0;
    for h in chunks.by_ref() {
        acc[0] += h[0] * weights[n - 1 - j];
        acc[1] += h[1] * weights[n - 2 - j];
        acc[2] += h[2] * weights[n - 3 - j];
        acc[3] += h[3] * weights[n - 4 - j];
        j += 4;
    }
    for (k, &h) in chunks.remainder().iter().enumerate() {
        acc[k] += h * weights[n - 1 - (j + k)];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// Integrates the problem on its uniform grid.
///
/// On overflow (any component beyond [`OVERFLOW_THRESHOLD`] or non-finite)
/// the trajectory up to the last finite step is returned inside
/// [`FdeError::NonFinite`].
pub fn solve(problem: &FdeProblem) -> Result<Trajectory, FdeError> {
    let dim = problem.dimension();
    let h = problem.step;
    let n_steps = problem.n_steps;
    let x0 = &problem.initial_state;

    let mut tables: HashMap<u64, usize> = HashMap::new();
    let mut weights: Vec<Weights> = Vec::new();
    let table_of: Vec<usize> = problem
        .orders
        .iter()
        .map(|&q| {
            *tables.entry(q.to_bits()).or_insert_with(|| {
                weights.push(Weights::new(q, h, n_steps));
                weights.len() - 1
            })
        })
        .collect();

    // f history stored per component so the convolutions are contiguous.
    let mut f_hist: Vec<Vec<f64>> = (0..dim).map(|_| Vec::with_capacity(n_steps + 1)).collect();
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);

    let mut f = vec![0.0; dim];
    problem.eval_rhs(0.0, x0, &mut f);
    for i in 0..dim {
        f_hist[i].push(f[i]);
    }
    times.push(0.0);
    states.push(x0.clone());

    let mut predicted = vec![0.0; dim];
    let mut f_pred = vec![0.0; dim];
    let mut next = vec![0.0; dim];

    for n in 0..n_steps {
        let t_next = (n + 1) as f64 * h;
        for i in 0..dim {
            let w = &weights[table_of[i]];
            let hist = &f_hist[i][..=n];
            predicted[i] = x0[i] + w.predictor_scale * dot_reversed(hist, &w.predictor[..=n]);
        }
        problem.eval_rhs(t_next, &predicted, &mut f_pred);
        for i in 0..dim {
            let w = &weights[table_of[i]];
            let hist = &f_hist[i];
            let memory = w.first[n] * hist[0] + if n > 0 { dot_reversed(&hist[1..=n], &w.corrector[..n]) } else { 0.0 };
            next[i] = x0[i] + w.corrector_scale * (f_pred[i] + memory);
        }

        if next.iter().any(|x| !x.is_finite() || x.abs() > OVERFLOW_THRESHOLD) {
            let time = times[times.len() - 1];
            return Err(FdeError::NonFinite {
                time,
                trajectory: Box::new(Trajectory { times, states, orders: problem.orders.clone(), step: h }),
            });
        }

        problem.eval_rhs(t_next, &next, &mut f);
        for i in 0..dim {
            f_hist[i].push(f[i]);
        }
        times.push(t_next);
        states.push(next.clone());
    }

    Ok(Trajectory { times, states, orders: problem.orders.clone(), step: h })
}

/// Algebraic decay rate of the tail: the negated least-squares slope of
/// `ln‖x‖` against `ln t` over the last `tail_fraction` of the grid, so a
/// `t^(−q)` tail returns `q`.
pub fn estimate_decay_exponent(traj: &Trajectory, tail_fraction: f64) -> Result<f64, FdeError> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(FdeError::InvalidProblem(format!("tail_fraction must lie in (0, 1), got {tail_fraction}")));
    }
    let n = traj.len();
    let start = ((1.0 - tail_fraction) * (n.saturating_sub(1)) as f64).floor() as usize;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut norms = Vec::new();
    for k in start..n {
        let t = traj.times[k];
        if t <= 0.0 {
            continue;
        }
        let norm = traj.states[k].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > f64::MIN_POSITIVE) || !norm.is_finite() {
            return Err(FdeError::DegenerateTail(format!("state norm {norm} at t = {t}")));
        }
        xs.push(t.ln());
        ys.push(norm.ln());
        norms.push(norm);
    }
    if xs.len() < 3 {
        return Err(FdeError::DegenerateTail("fewer than three tail samples".into()));
    }

    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(FdeError::DegenerateTail("tail spans a single time".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    let monotone = norms.windows(2).all(|w| w[1] <= w[0]) || norms.windows(2).all(|w| w[1] >= w[0]);
    if !monotone {
        let (lo, hi) = xs.iter().zip(&norms).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (x, n)| {
            let ratio = n / (intercept + slope * x).exp();
            (lo.min(ratio), hi.max(ratio))
        });
        if hi - lo > MAX_TAIL_OSCILLATION {
            return Err(FdeError::DegenerateTail(format!(
                "oscillating tail (relative spread {:.3} about the power-law fit)",
                hi - lo
            )));
        }
    }
    Ok(-slope)
}
