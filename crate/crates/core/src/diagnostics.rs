//! Error-propagation instrumentation and empirical convergence orders.
//!
//! For a one-step method `w_{i+1} = w_i + h F(w_i)`, the global error obeys
//! `D_{i+1} = e_{i+1} + a_i D_i` with `a_i = I + h dF/dw`. The velocity is
//! treated as an internal parameter of `F`: derivatives are taken with
//! respect to position only and the local error `e_{i+1}` is the error of a
//! step started from the exact position with the working velocity.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::problem::SecondOrderIvp;
use crate::stepper::{eval_increment, step, StepState};
use crate::tableau::NystromTableau;

/// Errors below this are treated as rounding noise by [`observed_order`].
pub const ROUNDING_FLOOR: f64 = 1e-13;

/// `I + h J`, with `J` the central-difference Jacobian of the increment with
/// respect to position (velocity held fixed).
pub fn propagation_matrix(
    t: &NystromTableau,
    p: &SecondOrderIvp,
    s: &StepState,
    h: f64,
) -> Result<DMatrix<f64>> {
    let n = p.dim();
    let mut jac = DMatrix::zeros(n, n);
    let mut probe = s.clone();
    for i in 0..n {
        let delta = f64::EPSILON.cbrt() * s.w[i].abs().max(1.0);
        probe.w[i] = s.w[i] + delta;
        let up = probe.w[i];
        let plus = eval_increment(t, p, &probe, h)?;
        probe.w[i] = s.w[i] - delta;
        let down = probe.w[i];
        let minus = eval_increment(t, p, &probe, h)?;
        probe.w[i] = s.w[i];
        for j in 0..n {
            jac[(j, i)] = (plus[j] - minus[j]) / (up - down);
        }
    }
    Ok(DMatrix::identity(n, n) + jac * h)
}

/// One fixed-step node of [`verify_recurrence`].
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationRecord {
    pub x: f64,
    /// Propagation matrix of the step leaving the previous node.
    pub alpha: DMatrix<f64>,
    pub eps_local: Vec<f64>,
    pub delta_global: Vec<f64>,
    /// `D_{i+1} - e_{i+1} - a_i D_i`.
    pub residual: Vec<f64>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

impl PropagationRecord {
    pub fn residual_norm(&self) -> f64 {
        max_abs(&self.residual)
    }

    pub fn delta_norm(&self) -> f64 {
        max_abs(&self.delta_global)
    }
}

fn fixed_steps(x0: f64, x_end: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidStepsize(h));
    }
    if !(x_end > x0) {
        return Err(Error::InvalidInterval { x0, x_end });
    }
    Ok(((x_end - x0) / h - 1e-9).ceil().max(1.0) as usize)
}

/// Runs `t` with fixed step `h` (shortening only the last step to land on
/// `x_end`) and records every term of the global error recurrence.
pub fn verify_recurrence(
    t: &NystromTableau,
    p: &SecondOrderIvp,
    h: f64,
    x_end: f64,
) -> Result<Vec<PropagationRecord>> {
    let reference = p.reference().ok_or(Error::MissingReference)?.clone();
    let steps = fixed_steps(p.x0(), x_end, h)?;
    let mut w = StepState::initial(p);
    let mut delta = DVector::zeros(p.dim());
    let mut records = Vec::with_capacity(steps);

    for i in 0..steps {
        let x = w.x;
        let h_i = if i + 1 == steps { x_end - x } else { h };
        let (y, _) = reference(x);
        let exact_start = StepState::new(x, y, w.wprime.clone());
        let alpha = propagation_matrix(t, p, &exact_start, h_i)?;

        let from_exact = step(t, p, &exact_start, h_i)?;
        let next = step(t, p, &w, h_i)?;
        let x_next = if i + 1 == steps { x_end } else { next.x };
        let (y_next, _) = reference(x_next);

        let eps: Vec<f64> = from_exact
            .w
            .iter()
            .zip(&y_next)
            .map(|(a, b)| a - b)
            .collect();
        let delta_next: Vec<f64> = next.w.iter().zip(&y_next).map(|(a, b)| a - b).collect();
        let propagated = &alpha * &delta;
        let residual = (0..p.dim())
            .map(|j| delta_next[j] - eps[j] - propagated[j])
            .collect();

        records.push(PropagationRecord {
            x: x_next,
            alpha,
            eps_local: eps,
            delta_global: delta_next.clone(),
            residual,
        });
        delta = DVector::from_vec(delta_next);
        w = StepState { x: x_next, ..next };
    }
    Ok(records)
}

/// `max_j |delta_j| / max(1, max_j |y_j|)`.
///
/// Convergence studies use this normwise measure rather than the
/// componentwise mixed norm: a component passing through zero at `x_end`
/// would otherwise dominate with its own (possibly cancelling) error terms
/// and a rounding floor magnified by the other components' magnitude.
pub fn normwise_relative(delta: &[f64], y: &[f64]) -> f64 {
    max_abs(delta) / max_abs(y).max(1.0)
}

/// Global error of a fixed-step run at `x_end`, measured by
/// [`normwise_relative`]. Returns the step actually used and the error.
pub fn fixed_step_error(
    t: &NystromTableau,
    p: &SecondOrderIvp,
    h: f64,
    x_end: f64,
) -> Result<(f64, f64)> {
    let reference = p.reference().ok_or(Error::MissingReference)?;
    let steps = fixed_steps(p.x0(), x_end, h)?;
    let h_eff = (x_end - p.x0()) / steps as f64;
    let mut s = StepState::initial(p);
    for _ in 0..steps {
        s = step(t, p, &s, h_eff)?;
    }
    let (y, _) = reference(x_end);
    let delta: Vec<f64> = s.w.iter().zip(&y).map(|(a, b)| a - b).collect();
    Ok((h_eff, normwise_relative(&delta, &y)))
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    /// Step actually used: the interval divided into a whole number of steps.
    pub h: f64,
    pub error: f64,
    /// Slope against the previous row; `None` on the first row or when
    /// either error is at the rounding floor.
    pub order: Option<f64>,
    /// Error is below [`ROUNDING_FLOOR`].
    pub at_floor: bool,
}

/// Fixed-step global errors at `x_end` for each `h` and the observed order
/// between neighbours, `ln(e_prev / e) / ln(h_prev / h)` (equal to
/// `log2(e(2h)/e(h))` for exact halving).
pub fn observed_order(
    t: &NystromTableau,
    p: &SecondOrderIvp,
    h_list: &[f64],
    x_end: f64,
) -> Result<Vec<ConvergenceRow>> {
    if h_list.len() < 3 {
        return Err(Error::InvalidConfig(
            "a convergence study needs at least three stepsizes".into(),
        ));
    }
    if h_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidConfig("stepsizes must be descending".into()));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let (h_eff, error) = fixed_step_error(t, p, h, x_end)?;
        let at_floor = error < ROUNDING_FLOOR;
        let order = rows.last().and_then(|prev| {
            (!prev.at_floor && !at_floor).then(|| (prev.error / error).ln() / (prev.h / h_eff).ln())
        });
        rows.push(ConvergenceRow {
            h: h_eff,
            error,
            order,
            at_floor,
        });
    }
    Ok(rows)
}

/// `h0, h0/2, ..., h0/2^halvings`.
pub fn halving_sequence(h0: f64, halvings: usize) -> Vec<f64> {
    (0..=halvings).map(|k| h0 / 2f64.powi(k as i32)).collect()
}
