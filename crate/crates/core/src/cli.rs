//! Batch front end: run a built-in problem and write one CSV.
//!
//! CSV schemas (header row, numbers with 17 significant digits):
//!
//! ```text
//! trajectory.csv   x, w_1..w_n, wprime_1..wprime_n
//! errors.csv       x, h, err_local_est, err_global_est, err_true, quench
//! convergence.csv  h, err_global_true, observed_order
//! ```
//!
//! Fields with no value for the chosen method are left empty.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};

use crate::controller::{integrate_local, NormRule, Pair, ToleranceSpec};
use crate::diagnostics::{halving_sequence, observed_order};
use crate::error::{Error, Result};
use crate::problem::builtin::{self, BuiltinProblem};
use crate::quench::{integrate_quenched, summarize, summarize_local, Summary, Triple};
use crate::stepper::{integrate_fixed, StepState};
use crate::tableau::Method;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_CONVERGENCE_H: f64 = 0.2;
pub const CONVERGENCE_HALVINGS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Rkn4,
    Rkn5,
    Rkn10,
    Rkn45,
    Rkn45q10,
}

impl MethodChoice {
    fn single(self) -> Option<Method> {
        match self {
            MethodChoice::Rkn4 => Some(Method::Rkn4),
            MethodChoice::Rkn5 => Some(Method::Rkn5),
            MethodChoice::Rkn10 => Some(Method::Rkn10),
            MethodChoice::Rkn45 | MethodChoice::Rkn45q10 => None,
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Trajectory,
    Errors,
    Convergence,
}

impl Emit {
    fn default_file(self) -> &'static str {
        match self {
            Emit::Trajectory => "trajectory.csv",
            Emit::Errors => "errors.csv",
            Emit::Convergence => "convergence.csv",
        }
    }
}

/// Integrate a built-in problem with explicit Nyström methods and write CSV.
#[derive(Debug, Clone, Parser)]
#[command(name = "rknq", version)]
pub struct RunConfig {
    /// Built-in problem: exp1000 or sho.
    #[arg(long)]
    pub problem: String,

    #[arg(long, value_enum, default_value_t = MethodChoice::Rkn45q10)]
    pub method: MethodChoice,

    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol_local: f64,

    /// Defaults to the local tolerance. Only used by rkn45q10.
    #[arg(long)]
    pub tol_global: Option<f64>,

    /// Defaults to 100 for exp1000 and 200 for sho.
    #[arg(long)]
    pub x_end: Option<f64>,

    /// Initial stepsize for adaptive runs.
    #[arg(long)]
    pub h0: Option<f64>,

    /// Fixed stepsize for single-method runs; the first stepsize of a
    /// convergence study.
    #[arg(long)]
    pub fixed_h: Option<f64>,

    /// Error norm; defaults to absolute for exp1000 and mixed for sho.
    #[arg(long, value_parser = NormRule::from_str)]
    pub norm: Option<NormRule>,

    #[arg(long, value_enum, default_value_t = Emit::Errors)]
    pub emit: Emit,

    /// Output file; defaults to <emit>.csv in the working directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output: PathBuf,
    pub summary: Summary,
    /// Observed orders of a convergence study.
    pub orders: Vec<Option<f64>>,
}

impl RunOutcome {
    pub fn summary_line(&self) -> String {
        let s = &self.summary;
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3e}"));
        format!(
            "max_est_global_err={} max_true_err={} quenches={} steps={} rejected={} f_evals={}",
            opt(s.max_global_err_est),
            opt(s.max_true_err),
            s.quench_count,
            s.steps.accepted,
            s.steps.rejected,
            s.evals.total(),
        )
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidConfig(format!(
            "--{name} must be positive and finite"
        )))
    }
}

struct Plan {
    problem: BuiltinProblem,
    x_end: f64,
    tol: ToleranceSpec,
}

fn plan(cfg: &RunConfig) -> Result<Plan> {
    let problem = builtin::by_name(&cfg.problem)?;
    let x_end = cfg.x_end.unwrap_or(problem.default_x_end);
    if !(x_end > problem.second_order.x0()) || !x_end.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "--x-end must exceed {}",
            problem.second_order.x0()
        )));
    }
    let local = positive("tol-local", cfg.tol_local)?;
    let global = match cfg.tol_global {
        Some(g) if g > 0.0 => g,
        Some(_) => return Err(Error::InvalidConfig("--tol-global must be positive".into())),
        None => local,
    };
    if let Some(h0) = cfg.h0 {
        positive("h0", h0)?;
    }
    if let Some(h) = cfg.fixed_h {
        positive("fixed-h", h)?;
    }
    let single = cfg.method.single();
    match (single, cfg.fixed_h, cfg.emit) {
        (None, Some(_), _) => {
            return Err(Error::InvalidConfig(format!(
                "--fixed-h needs a single method, not {}",
                cfg.method
            )))
        }
        (None, _, Emit::Convergence) => {
            return Err(Error::InvalidConfig(
                "convergence studies need a single method (rkn4, rkn5, rkn10)".into(),
            ))
        }
        (Some(_), None, Emit::Trajectory | Emit::Errors) => {
            return Err(Error::InvalidConfig(format!(
                "{} runs with a fixed step: pass --fixed-h",
                cfg.method
            )))
        }
        _ => {}
    }
    let norm = cfg.norm.unwrap_or(problem.default_norm);
    let tol = ToleranceSpec::new(local, global, norm)?;
    Ok(Plan {
        problem,
        x_end,
        tol,
    })
}

/// A uniform row type for the trajectory and error writers.
struct Row<'a> {
    state: &'a StepState,
    h: f64,
    err_local: Option<f64>,
    err_global: Option<f64>,
    quench: bool,
}

fn write_trajectory<W: Write>(out: W, n: usize, rows: &[Row<'_>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x".to_string()];
    header.extend((1..=n).map(|j| format!("w_{j}")));
    header.extend((1..=n).map(|j| format!("wprime_{j}")));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![num(r.state.x)];
        rec.extend(r.state.w.iter().copied().map(num));
        rec.extend(r.state.wprime.iter().copied().map(num));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_errors<W: Write>(out: W, rows: &[Row<'_>], truth: Option<&[f64]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "x",
        "h",
        "err_local_est",
        "err_global_est",
        "err_true",
        "quench",
    ])?;
    for (i, r) in rows.iter().enumerate() {
        w.write_record([
            num(r.state.x),
            num(r.h),
            opt_num(r.err_local),
            opt_num(r.err_global),
            opt_num(truth.map(|t| t[i])),
            if r.quench { "1" } else { "0" }.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Executes one configured run and writes its CSV.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let Plan {
        problem,
        x_end,
        tol,
    } = plan(cfg)?;
    let p = &problem.second_order;
    let output = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(cfg.emit.default_file()));

    let mut buf: Vec<u8> = Vec::new();
    let mut orders = Vec::new();

    let summary = match (cfg.method.single(), cfg.emit) {
        (Some(method), Emit::Convergence) => {
            let hs = halving_sequence(
                cfg.fixed_h.unwrap_or(DEFAULT_CONVERGENCE_H),
                CONVERGENCE_HALVINGS,
            );
            let rows = observed_order(method.tableau(), p, &hs, x_end)?;
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["h", "err_global_true", "observed_order"])?;
            for r in &rows {
                w.write_record([num(r.h), num(r.error), opt_num(r.order)])?;
            }
            w.flush()?;
            drop(w);
            orders = rows.iter().map(|r| r.order).collect();
            let steps: usize = rows
                .iter()
                .map(|r| ((x_end - p.x0()) / r.h).round() as usize)
                .sum();
            Summary {
                max_global_err_est: None,
                max_true_err: rows.last().map(|r| r.error),
                quench_count: 0,
                nodes: rows.len(),
                steps: crate::controller::StepStats {
                    accepted: steps,
                    ..Default::default()
                },
                evals: crate::quench::EvalCounts {
                    high: steps * method.tableau().stages(),
                    ..Default::default()
                },
            }
        }
        (Some(method), emit) => {
            let h = cfg.fixed_h.expect("checked by plan");
            let nodes = integrate_fixed(method.tableau(), p, h, x_end)?;
            let truth: Option<Vec<f64>> = p.reference().map(|reference| {
                nodes
                    .iter()
                    .map(|s| {
                        let (y, _) = reference(s.x);
                        tol.norm.difference(&s.w, &y, &y)
                    })
                    .collect()
            });
            let rows: Vec<Row<'_>> = nodes
                .iter()
                .enumerate()
                .map(|(i, s)| Row {
                    state: s,
                    h: if i == 0 { 0.0 } else { s.x - nodes[i - 1].x },
                    err_local: None,
                    err_global: None,
                    quench: false,
                })
                .collect();
            match emit {
                Emit::Trajectory => write_trajectory(&mut buf, p.dim(), &rows)?,
                _ => write_errors(&mut buf, &rows, truth.as_deref())?,
            }
            let steps = nodes.len() - 1;
            Summary {
                max_global_err_est: None,
                max_true_err: truth.map(|t| t.into_iter().fold(0.0, f64::max)),
                quench_count: 0,
                nodes: nodes.len(),
                steps: crate::controller::StepStats {
                    accepted: steps,
                    ..Default::default()
                },
                evals: crate::quench::EvalCounts {
                    high: steps * method.tableau().stages(),
                    ..Default::default()
                },
            }
        }
        (None, emit) => {
            let (trajectory, records, summary) = if cfg.method == MethodChoice::Rkn45q10 {
                let q = integrate_quenched(&Triple::rkn45q10(), p, &tol, x_end, cfg.h0)?;
                let summary = summarize(&q, p);
                (q.trajectory, Some(q.records), summary)
            } else {
                let t = integrate_local(&Pair::rkn45(), p, &tol, x_end, cfg.h0)?;
                let summary = summarize_local(&t, p);
                (t, None, summary)
            };
            let truth = trajectory.true_errors(p);
            let rows: Vec<Row<'_>> = trajectory
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| {
                    let rec = records.as_ref().map(|r| &r[i]);
                    Row {
                        state: &n.state,
                        h: n.h,
                        err_local: Some(n.err_local),
                        err_global: rec.map(|r| r.global_err_est),
                        quench: rec.is_some_and(|r| r.quenched),
                    }
                })
                .collect();
            match emit {
                Emit::Trajectory => write_trajectory(&mut buf, p.dim(), &rows)?,
                _ => write_errors(&mut buf, &rows, truth.as_deref())?,
            }
            summary
        }
    };

    std::fs::write(&output, &buf)?;
    Ok(RunOutcome {
        output,
        summary,
        orders,
    })
}
