use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::config::merge;
use super::output::{to_json_line, Cell, Table};
use super::{CliError, Command, Format, Outcome, Settings};
use crate::charfn::CharFunction;
use crate::classify::{
    classify_coeffs, classify_matrix, critical_a, order_independent_region, LinearSystem2, StabilityVerdict,
};
use crate::critcurve::CriticalCurve;
use crate::fde::{solve, FdeError, Trajectory};
use crate::fhn::{branch_diagram, equilibrium, hopf_curve, make_fhn_problem, FhnParams};
use crate::selftest;

fn req<T: Copy>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Validation(format!("missing required parameter --{flag}")))
}

fn render(table: &Table, settings: &Settings) -> String {
    match settings.format {
        Format::Csv => table.to_csv(settings.precision),
        Format::Json => table.to_json(settings.precision),
    }
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
#[command(allow_negative_numbers = true)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub a11: Option<f64>,
    #[arg(long)]
    pub a12: Option<f64>,
    #[arg(long)]
    pub a21: Option<f64>,
    #[arg(long)]
    pub a22: Option<f64>,
    /// Coefficient of s^q2 (instead of a matrix)
    #[arg(long)]
    pub a: Option<f64>,
    /// Coefficient of s^q1
    #[arg(long)]
    pub b: Option<f64>,
    /// Constant term
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub q1: Option<f64>,
    #[arg(long)]
    pub q2: Option<f64>,
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
#[command(allow_negative_numbers = true)]
pub struct AstarArgs {
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub q1: Option<f64>,
    #[arg(long)]
    pub q2: Option<f64>,
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
#[command(allow_negative_numbers = true)]
pub struct CurveArgs {
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub q1: Option<f64>,
    #[arg(long)]
    pub q2: Option<f64>,
    /// Smallest frequency [default: 0.01]
    #[arg(long)]
    pub omega_min: Option<f64>,
    /// Largest frequency [default: 100]
    #[arg(long)]
    pub omega_max: Option<f64>,
    /// Number of geometrically spaced samples [default: 400]
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
#[command(allow_negative_numbers = true)]
pub struct RegionsArgs {
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub b_min: Option<f64>,
    #[arg(long)]
    pub b_max: Option<f64>,
    #[arg(long)]
    pub a_min: Option<f64>,
    #[arg(long)]
    pub a_max: Option<f64>,
    /// Grid points per axis [default: 101]
    #[arg(long)]
    pub n: Option<usize>,
    /// With --q2, adds a verdict column at these orders
    #[arg(long)]
    pub q1: Option<f64>,
    #[arg(long)]
    pub q2: Option<f64>,
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
#[command(allow_negative_numbers = true)]
pub struct HopfArgs {
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    /// External current
    #[arg(long = "I")]
    #[serde(rename = "I")]
    pub current: Option<f64>,
    /// Number of q2 grid points on (0, 1] [default: 50]
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
#[command(allow_negative_numbers = true)]
pub struct BranchArgs {
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long = "I-min")]
    #[serde(rename = "I-min")]
    pub i_min: Option<f64>,
    #[arg(long = "I-max")]
    #[serde(rename = "I-max")]
    pub i_max: Option<f64>,
    /// Number of currents [default: 401]
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long = "I")]
    #[serde(rename = "I")]
    pub current: Option<f64>,
    #[arg(long)]
    pub q1: Option<f64>,
    #[arg(long)]
    pub q2: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Time step [default: 0.01]
    #[arg(long)]
    pub step: Option<f64>,
    /// Initial v [default: v* + 0.01]
    #[arg(long)]
    pub v0: Option<f64>,
    /// Initial w [default: w*]
    #[arg(long)]
    pub w0: Option<f64>,
    /// Emit every k-th grid point [default: 1]
    #[arg(long)]
    pub every: Option<usize>,
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
#[command(allow_negative_numbers = true)]
pub struct RhpCountArgs {
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub q1: Option<f64>,
    #[arg(long)]
    pub q2: Option<f64>,
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SelftestArgs {
    /// Random systems in the oracle check [default: 1000]
    #[arg(long)]
    pub systems: Option<usize>,
}

pub(super) fn merge_params(command: Command, params: Map<String, Value>) -> Result<Command, CliError> {
    Ok(match command {
        Command::Classify(a) => Command::Classify(merge(&a, params)?),
        Command::Astar(a) => Command::Astar(merge(&a, params)?),
        Command::Curve(a) => Command::Curve(merge(&a, params)?),
        Command::Regions(a) => Command::Regions(merge(&a, params)?),
        Command::Hopf(a) => Command::Hopf(merge(&a, params)?),
        Command::Branch(a) => Command::Branch(merge(&a, params)?),
        Command::Simulate(a) => Command::Simulate(merge(&a, params)?),
        Command::RhpCount(a) => Command::RhpCount(merge(&a, params)?),
        Command::Selftest(a) => Command::Selftest(merge(&a, params)?),
    })
}

pub(super) fn execute(command: &Command, settings: &Settings) -> Result<Outcome, CliError> {
    match command {
        Command::Classify(a) => classify(a, settings).map(Into::into),
        Command::Astar(a) => astar(a, settings).map(Into::into),
        Command::Curve(a) => curve(a, settings).map(Into::into),
        Command::Regions(a) => regions(a, settings).map(Into::into),
        Command::Hopf(a) => hopf(a, settings).map(Into::into),
        Command::Branch(a) => branch(a, settings).map(Into::into),
        Command::Simulate(a) => simulate(a, settings),
        Command::RhpCount(a) => rhp_count(a, settings).map(Into::into),
        Command::Selftest(a) => run_selftest(a, settings),
    }
}

fn verdict_artifact(v: &StabilityVerdict, settings: &Settings) -> String {
    match settings.format {
        Format::Json => to_json_line(v, settings.precision),
        Format::Csv => {
            let mut t = Table::new(&["kind", "rule", "decay_order", "margin"]);
            let opt = |x: Option<f64>| x.map_or(Cell::Text(String::new()), Cell::Float);
            t.push(vec![format!("{:?}", v.kind).into(), v.rule.tag().into(), opt(v.decay_order), opt(v.margin)]);
            t.to_csv(settings.precision)
        }
    }
}

fn classify(args: &ClassifyArgs, settings: &Settings) -> Result<String, CliError> {
    let matrix = [args.a11, args.a12, args.a21, args.a22];
    let coeffs = [args.a, args.b, args.c];
    let q1 = req(args.q1, "q1")?;
    let q2 = req(args.q2, "q2")?;
    let verdict = match (matrix.iter().any(Option::is_some), coeffs.iter().any(Option::is_some)) {
        (true, false) => {
            let m = [[req(args.a11, "a11")?, req(args.a12, "a12")?], [req(args.a21, "a21")?, req(args.a22, "a22")?]];
            classify_matrix(&LinearSystem2::new(m, q1, q2))?
        }
        (false, true) => classify_coeffs(req(args.a, "a")?, req(args.b, "b")?, req(args.c, "c")?, q1, q2)?,
        _ => {
            return Err(CliError::Validation(
                "give either the matrix (--a11 --a12 --a21 --a22) or the coefficients (--a --b --c)".into(),
            ))
        }
    };
    Ok(verdict_artifact(&verdict, settings))
}

fn astar(args: &AstarArgs, settings: &Settings) -> Result<String, CliError> {
    let (b, c, q1, q2) = (req(args.b, "b")?, req(args.c, "c")?, req(args.q1, "q1")?, req(args.q2, "q2")?);
    let a_star = critical_a(b, c, q1, q2)?;
    Ok(match settings.format {
        Format::Json => {
            to_json_line(&json!({"b": b, "c": c, "q1": q1, "q2": q2, "a_star": a_star}), settings.precision)
        }
        Format::Csv => {
            let mut t = Table::new(&["b", "c", "q1", "q2", "a_star"]);
            t.push(vec![b.into(), c.into(), q1.into(), q2.into(), a_star.into()]);
            t.to_csv(settings.precision)
        }
    })
}

fn curve(args: &CurveArgs, settings: &Settings) -> Result<String, CliError> {
    let (c, q1, q2) = (req(args.c, "c")?, req(args.q1, "q1")?, req(args.q2, "q2")?);
    let omega_min = args.omega_min.unwrap_or(0.01);
    let omega_max = args.omega_max.unwrap_or(100.0);
    let n = args.n.unwrap_or(400);
    if !(omega_min > 0.0 && omega_min < omega_max && omega_max.is_finite()) || n < 2 {
        return Err(CliError::Validation(format!(
            "need 0 < omega-min < omega-max and n >= 2 (got {omega_min}, {omega_max}, {n})"
        )));
    }
    let g = CriticalCurve::new(c, q1, q2)?;
    let ratio = (omega_max / omega_min).ln();
    let mut t = Table::new(&["omega", "b", "a"]);
    for k in 0..n {
        let omega = omega_min * (ratio * k as f64 / (n - 1) as f64).exp();
        let p = g.gamma_point(omega)?;
        t.push(vec![p.omega.into(), p.b.into(), p.a.into()]);
    }
    Ok(render(&t, settings))
}

fn regions(args: &RegionsArgs, settings: &Settings) -> Result<String, CliError> {
    let c = req(args.c, "c")?;
    let (b_min, b_max) = (req(args.b_min, "b-min")?, req(args.b_max, "b-max")?);
    let (a_min, a_max) = (req(args.a_min, "a-min")?, req(args.a_max, "a-max")?);
    let n = args.n.unwrap_or(101);
    if !(b_min < b_max && a_min < a_max) || n < 2 {
        return Err(CliError::Validation("need b-min < b-max, a-min < a-max and n >= 2".into()));
    }
    let orders = match (args.q1, args.q2) {
        (Some(q1), Some(q2)) => Some((q1, q2)),
        (None, None) => None,
        _ => return Err(CliError::Validation("give both --q1 and --q2 or neither".into())),
    };
    let at = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / (n - 1) as f64;
    let rows = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (b, a) = (at(b_min, b_max, idx / n), at(a_min, a_max, idx % n));
            let label = order_independent_region(a, b, c).label();
            let verdict = match orders {
                Some((q1, q2)) => Some(format!("{:?}", classify_coeffs(a, b, c, q1, q2)?.kind)),
                None => None,
            };
            Ok::<_, CliError>((b, a, label, verdict))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let header: &[&str] = if orders.is_some() { &["b", "a", "label", "verdict"] } else { &["b", "a", "label"] };
    let mut t = Table::new(header);
    for (b, a, label, verdict) in rows {
        let mut row = vec![b.into(), a.into(), label.into()];
        row.extend(verdict.map(Cell::Text));
        t.push(row);
    }
    Ok(render(&t, settings))
}

fn fhn_params(r: Option<f64>, c: Option<f64>, d: Option<f64>, current: f64) -> Result<FhnParams, CliError> {
    Ok(FhnParams::new(req(r, "r")?, req(c, "c")?, req(d, "d")?, current)?)
}

fn hopf(args: &HopfArgs, settings: &Settings) -> Result<String, CliError> {
    let params = fhn_params(args.r, args.c, args.d, req(args.current, "I")?)?;
    let grid = args.grid.unwrap_or(50);
    let mut t = Table::new(&["q1", "q2"]);
    for (q1, q2) in hopf_curve(&params, grid)? {
        t.push(vec![q1.into(), q2.into()]);
    }
    Ok(render(&t, settings))
}

fn branch(args: &BranchArgs, settings: &Settings) -> Result<String, CliError> {
    let (i_min, i_max) = (req(args.i_min, "I-min")?, req(args.i_max, "I-max")?);
    let params = fhn_params(args.r, args.c, args.d, i_min)?;
    let mut t = Table::new(&["I", "v_star", "order_robust"]);
    for p in branch_diagram(&params, i_min, i_max, args.n.unwrap_or(401))? {
        t.push(vec![p.current.into(), p.v_star.into(), p.order_robust.into()]);
    }
    Ok(render(&t, settings))
}

fn trajectory_table(traj: &Trajectory, every: usize) -> Table {
    let mut t = Table::new(&["t", "v", "w"]);
    for (time, x) in traj.times.iter().zip(&traj.states).step_by(every) {
        t.push(vec![(*time).into(), x[0].into(), x[1].into()]);
    }
    t
}

fn simulate(args: &SimulateArgs, settings: &Settings) -> Result<Outcome, CliError> {
    let params = fhn_params(args.r, args.c, args.d, req(args.current, "I")?)?;
    let (q1, q2, t_end) = (req(args.q1, "q1")?, req(args.q2, "q2")?, req(args.t_end, "t-end")?);
    let every = args.every.unwrap_or(1);
    if every == 0 {
        return Err(CliError::Validation("every must be positive".into()));
    }
    let eq = equilibrium(&params);
    let v0 = args.v0.unwrap_or(eq.v_star + 0.01);
    let w0 = args.w0.unwrap_or(eq.w_star);
    let problem = make_fhn_problem(&params, q1, q2, v0, w0, t_end, args.step.unwrap_or(0.01))?;
    match solve(&problem) {
        Ok(traj) => Ok(render(&trajectory_table(&traj, every), settings).into()),
        Err(FdeError::NonFinite { time, trajectory }) => Ok(Outcome {
            artifact: render(&trajectory_table(&trajectory, every), settings),
            error: Some(CliError::Numerical(format!("state overflow after t = {time}; trajectory truncated"))),
        }),
        Err(e) => Err(e.into()),
    }
}

fn rhp_count(args: &RhpCountArgs, settings: &Settings) -> Result<String, CliError> {
    let f = CharFunction::new(
        req(args.a, "a")?,
        req(args.b, "b")?,
        req(args.c, "c")?,
        req(args.q1, "q1")?,
        req(args.q2, "q2")?,
    )?;
    let count = f.count_rhp_roots()?;
    Ok(match settings.format {
        Format::Json => to_json_line(&count, settings.precision),
        Format::Csv => {
            let mut t = Table::new(&["count", "contour_radius", "winding_residual"]);
            t.push(vec![count.count.into(), count.contour_radius.into(), count.winding_residual.into()]);
            t.to_csv(settings.precision)
        }
    })
}

fn run_selftest(args: &SelftestArgs, settings: &Settings) -> Result<Outcome, CliError> {
    let systems = args.systems.unwrap_or(1000);
    let report = selftest::run(settings.seed, systems);
    let artifact = match settings.format {
        Format::Json => to_json_line(
            &json!({
                "seed": report.seed,
                "passed": report.passed(),
                "failed": report.failed(),
                "checks": report.checks,
            }),
            settings.precision,
        ),
        Format::Csv => {
            let mut t = Table::new(&["check", "passed", "failed"]);
            for c in &report.checks {
                t.push(vec![c.name.into(), c.passed.into(), c.failed.into()]);
            }
            t.to_csv(settings.precision)
        }
    };
    for c in &report.checks {
        eprintln!("selftest {}: {} passed, {} failed", c.name, c.passed, c.failed);
        for note in &c.notes {
            eprintln!("  {note}");
        }
    }
    let error = (!report.all_passed()).then(|| CliError::SelftestFailed(format!("{} checks failed", report.failed())));
    Ok(Outcome { artifact, error })
}
