//! Browser front end for `rknq`. Each operation runs natively as a plain
//! function returning a serializable record; the `#[wasm_bindgen]` wrappers
//! hand the same records to JavaScript as JSON strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rknq::controller::{integrate_local, Pair, ToleranceSpec};
use rknq::diagnostics::{halving_sequence, observed_order, verify_recurrence};
use rknq::problem::builtin;
use rknq::quench::{integrate_quenched, Triple};
use rknq::tableau::Method;
use rknq::Result;

/// Longest interval the page will integrate, to keep the tab responsive.
pub const MAX_SPAN: f64 = 2000.0;

/// One error curve sampled at the nodes of a run.
#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub x: Vec<f64>,
    pub err_true: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorCurves {
    pub problem: String,
    pub norm: String,
    pub tol_local: f64,
    pub tol_global: f64,
    pub local: Curve,
    pub quenched: Curve,
    /// Global error estimate of the quenched run at its nodes.
    pub quenched_est: Vec<f64>,
    pub quench_x: Vec<f64>,
    pub local_steps: usize,
    pub quenched_steps: usize,
}

fn span_ok(x0: f64, x_end: f64) -> Result<()> {
    if x_end - x0 > MAX_SPAN {
        return Err(rknq::Error::InvalidConfig(format!(
            "interval longer than {MAX_SPAN} is not supported in the demo"
        )));
    }
    Ok(())
}

/// True global error of RKN45 and RKN45Q10 on a built-in problem.
pub fn error_curves(
    problem: &str,
    tol_local: f64,
    tol_global: f64,
    x_end: Option<f64>,
) -> Result<ErrorCurves> {
    let b = builtin::by_name(problem)?;
    let p = &b.second_order;
    let x_end = x_end.unwrap_or(b.default_x_end);
    span_ok(p.x0(), x_end)?;
    let tol = ToleranceSpec::new(tol_local, tol_global, b.default_norm)?;

    let local = integrate_local(&Pair::rkn45(), p, &tol, x_end, None)?;
    let quenched = integrate_quenched(&Triple::rkn45q10(), p, &tol, x_end, None)?;
    let curve = |t: &rknq::controller::Trajectory| Curve {
        x: t.nodes.iter().map(|n| n.x()).collect(),
        err_true: t.true_errors(p).expect("built-ins have references"),
    };

    Ok(ErrorCurves {
        problem: b.name.to_string(),
        norm: tol.norm.to_string(),
        tol_local,
        tol_global,
        local: curve(&local),
        quenched: curve(&quenched.trajectory),
        quenched_est: quenched.records.iter().map(|r| r.global_err_est).collect(),
        quench_x: quenched.events.iter().map(|e| e.x).collect(),
        local_steps: local.stats.accepted,
        quenched_steps: quenched.trajectory.stats.accepted,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergencePoint {
    pub h: f64,
    pub error: f64,
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub problem: String,
    pub method: String,
    pub x_end: f64,
    pub rows: Vec<ConvergencePoint>,
}

/// Fixed-step global error at `x_end` over a halving sequence.
pub fn convergence(
    problem: &str,
    method: &str,
    h0: f64,
    halvings: usize,
    x_end: f64,
) -> Result<ConvergenceStudy> {
    let b = builtin::by_name(problem)?;
    let m: Method = method.parse()?;
    span_ok(b.second_order.x0(), x_end)?;
    if halvings > 8 {
        return Err(rknq::Error::InvalidConfig("at most 8 halvings".into()));
    }
    let rows = observed_order(
        m.tableau(),
        &b.second_order,
        &halving_sequence(h0, halvings),
        x_end,
    )?;
    Ok(ConvergenceStudy {
        problem: b.name.to_string(),
        method: m.name().to_string(),
        x_end,
        rows: rows
            .iter()
            .map(|r| ConvergencePoint {
                h: r.h,
                error: r.error,
                order: r.order,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceTrace {
    pub method: String,
    pub h: f64,
    pub x: Vec<f64>,
    pub delta: Vec<f64>,
    pub eps: Vec<f64>,
    pub residual: Vec<f64>,
}

/// Terms of the global error recurrence for a fixed-step run on `exp1000`.
pub fn recurrence(method: &str, h: f64, x_end: f64) -> Result<RecurrenceTrace> {
    let m: Method = method.parse()?;
    let p = builtin::exp1000();
    span_ok(p.x0(), x_end)?;
    let records = verify_recurrence(m.tableau(), &p, h, x_end)?;
    Ok(RecurrenceTrace {
        method: m.name().to_string(),
        h,
        x: records.iter().map(|r| r.x).collect(),
        delta: records.iter().map(|r| r.delta_norm()).collect(),
        eps: records.iter().map(|r| r.eps_local[0].abs()).collect(),
        residual: records.iter().map(|r| r.residual_norm()).collect(),
    })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// `x_end <= 0` selects the problem's default interval.
#[wasm_bindgen(js_name = errorCurves)]
pub fn error_curves_js(
    problem: &str,
    tol_local: f64,
    tol_global: f64,
    x_end: f64,
) -> std::result::Result<String, JsError> {
    let x_end = (x_end > 0.0).then_some(x_end);
    to_js(error_curves(problem, tol_local, tol_global, x_end))
}

#[wasm_bindgen(js_name = convergence)]
pub fn convergence_js(
    problem: &str,
    method: &str,
    h0: f64,
    halvings: usize,
    x_end: f64,
) -> std::result::Result<String, JsError> {
    to_js(convergence(problem, method, h0, halvings, x_end))
}

#[wasm_bindgen(js_name = recurrence)]
pub fn recurrence_js(method: &str, h: f64, x_end: f64) -> std::result::Result<String, JsError> {
    to_js(recurrence(method, h, x_end))
}
