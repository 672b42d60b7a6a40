//! Adaptive integration with an embedded pair of orders `r` and `r + 1`.
//!
//! Each attempt steps both methods from the same state, estimates the local
//! error from the difference of the positions and carries the higher-order
//! result forward (local extrapolation).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::problem::SecondOrderIvp;
use crate::stepper::{step, StepState};
use crate::tableau::{rkn4, rkn5, NystromTableau};

pub const SAFETY: f64 = 0.9;
pub const GROW_MIN: f64 = 0.2;
pub const GROW_MAX: f64 = 5.0;
/// The estimate is the local error of the order-4 member, `O(h^5)`.
pub const ERROR_EXPONENT: f64 = 1.0 / 5.0;
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 30;
/// Steps shorter than this fraction of the interval are an underflow.
pub const UNDERFLOW_FRACTION: f64 = 1e-14;
/// Default initial step as a fraction of the interval.
pub const DEFAULT_H0_FRACTION: f64 = 1e-3;

/// Mixed absolute/relative error measure: `max_j |delta_j| / max(1, |w_j|)`.
pub fn scaled_norm(delta: &[f64], w_ref: &[f64]) -> f64 {
    debug_assert_eq!(delta.len(), w_ref.len());
    delta
        .iter()
        .zip(w_ref)
        .fold(0.0_f64, |acc, (d, w)| acc.max(d.abs() / w.abs().max(1.0)))
}

/// How error vectors are reduced to a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormRule {
    /// Max-norm of the raw difference.
    Absolute,
    /// [`scaled_norm`]: absolute below unit magnitude, relative above.
    #[default]
    Mixed,
}

impl NormRule {
    pub fn measure(self, delta: &[f64], w_ref: &[f64]) -> f64 {
        match self {
            NormRule::Absolute => delta.iter().fold(0.0_f64, |acc, d| acc.max(d.abs())),
            NormRule::Mixed => scaled_norm(delta, w_ref),
        }
    }

    /// Norm of `a - b`, scaled componentwise by `scale`.
    pub fn difference(self, a: &[f64], b: &[f64], scale: &[f64]) -> f64 {
        let delta: Vec<f64> = a.iter().zip(b).map(|(u, v)| u - v).collect();
        self.measure(&delta, scale)
    }
}

impl fmt::Display for NormRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormRule::Absolute => "absolute",
            NormRule::Mixed => "mixed",
        })
    }
}

impl FromStr for NormRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(NormRule::Absolute),
            "mixed" => Ok(NormRule::Mixed),
            other => Err(Error::InvalidConfig(format!("unknown norm rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSpec {
    pub local: f64,
    pub global: f64,
    pub norm: NormRule,
}

impl ToleranceSpec {
    pub fn new(local: f64, global: f64, norm: NormRule) -> Result<Self> {
        // global = +inf is allowed and disables quenching
        if !(local > 0.0 && local.is_finite()) || !(global > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be positive, got local {local:e}, global {global:e}"
            )));
        }
        Ok(ToleranceSpec {
            local,
            global,
            norm,
        })
    }

    /// Same value for local and global control.
    pub fn uniform(tol: f64, norm: NormRule) -> Result<Self> {
        Self::new(tol, tol, norm)
    }
}

/// `h * clamp(0.9 (tol/err)^(1/5), 0.2, 5)`, or `5h` when `err = 0`.
pub fn propose_stepsize(h: f64, err_local: f64, tol_local: f64) -> f64 {
    if err_local == 0.0 {
        return h * GROW_MAX;
    }
    let factor = SAFETY * (tol_local / err_local).powf(ERROR_EXPONENT);
    // NaN (non-finite estimate) falls to the floor
    h * if factor.is_nan() {
        GROW_MIN
    } else {
        factor.clamp(GROW_MIN, GROW_MAX)
    }
}

/// An embedded pair: `low` of order `r`, `high` of order `r + 1`.
#[derive(Debug, Clone, Copy)]
pub struct Pair<'a> {
    pub low: &'a NystromTableau,
    pub high: &'a NystromTableau,
}

impl<'a> Pair<'a> {
    pub fn new(low: &'a NystromTableau, high: &'a NystromTableau) -> Result<Self> {
        if high.order() != low.order() + 1 {
            return Err(Error::InvalidMethods(format!(
                "pair orders must be r and r+1, got {} and {}",
                low.order(),
                high.order()
            )));
        }
        Ok(Pair { low, high })
    }
}

impl Pair<'static> {
    /// RKN4 with RKN5.
    pub fn rkn45() -> Self {
        Pair {
            low: rkn4(),
            high: rkn5(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepAttempt {
    pub h: f64,
    pub err_local: f64,
    pub accepted: bool,
    pub h_next: f64,
}

/// Result of one attempt: the estimate plus both candidate states.
/// The candidates are `None` only for a recoverable non-finite evaluation.
#[derive(Debug, Clone)]
pub struct AttemptOutcome {
    pub attempt: StepAttempt,
    pub high: Option<StepState>,
    pub low: Option<StepState>,
}

/// Steps both members of `pair` from `s` and decides acceptance.
pub fn attempt_step(
    pair: &Pair<'_>,
    p: &SecondOrderIvp,
    s: &StepState,
    h: f64,
    tol: &ToleranceSpec,
) -> Result<AttemptOutcome> {
    let both = step(pair.low, p, s, h).and_then(|low| Ok((low, step(pair.high, p, s, h)?)));
    let (low, high) = match both {
        Ok(states) => states,
        Err(Error::Evaluation { .. }) if p.recoverable_nonfinite() => {
            return Ok(AttemptOutcome {
                attempt: StepAttempt {
                    h,
                    err_local: f64::INFINITY,
                    accepted: false,
                    h_next: h * GROW_MIN,
                },
                high: None,
                low: None,
            });
        }
        Err(e) => return Err(e),
    };
    let err_local = tol.norm.difference(&high.w, &low.w, &high.w);
    let err_local = if err_local.is_nan() {
        f64::INFINITY
    } else {
        err_local
    };
    let accepted = err_local <= tol.local;
    Ok(AttemptOutcome {
        attempt: StepAttempt {
            h,
            err_local,
            accepted,
            h_next: propose_stepsize(h, err_local, tol.local),
        },
        high: Some(high),
        low: Some(low),
    })
}

/// An accepted node. Node 0 is the initial state with `h = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// The carried (higher-order) solution.
    pub state: StepState,
    /// The lower-order member's result for the step ending here.
    pub low: Option<StepState>,
    pub err_local: f64,
    /// Step that produced this node.
    pub h: f64,
}

impl Node {
    pub fn x(&self) -> f64 {
        self.state.x
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals_low: usize,
    pub evals_high: usize,
}

impl StepStats {
    pub fn attempts(&self) -> usize {
        self.accepted + self.rejected
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub nodes: Vec<Node>,
    pub stats: StepStats,
    pub norm: NormRule,
}

impl Trajectory {
    pub fn last(&self) -> &Node {
        self.nodes
            .last()
            .expect("a trajectory holds at least the initial node")
    }

    /// Error of each node's position against the analytic solution, in the
    /// trajectory's norm. `None` without a reference.
    pub fn true_errors(&self, p: &SecondOrderIvp) -> Option<Vec<f64>> {
        let reference = p.reference()?;
        Some(
            self.nodes
                .iter()
                .map(|n| {
                    let (y, _) = reference(n.x());
                    self.norm.difference(&n.state.w, &y, &y)
                })
                .collect(),
        )
    }
}

/// Adaptive loop shared by [`integrate_local`] and the quenched driver.
/// `on_accept(index, previous, h, candidate)` runs for each accepted step and
/// may modify the candidate before it becomes the working state.
pub(crate) fn drive<F>(
    pair: &Pair<'_>,
    p: &SecondOrderIvp,
    tol: &ToleranceSpec,
    x_end: f64,
    h0: Option<f64>,
    mut on_accept: F,
) -> Result<Trajectory>
where
    F: FnMut(usize, &StepState, f64, &mut StepState) -> Result<()>,
{
    let x0 = p.x0();
    if !(x_end > x0) || !x_end.is_finite() {
        return Err(Error::InvalidInterval { x0, x_end });
    }
    let span = x_end - x0;
    let mut h = h0.unwrap_or(span * DEFAULT_H0_FRACTION);
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidStepsize(h));
    }

    let mut state = StepState::initial(p);
    let mut nodes = vec![Node {
        state: state.clone(),
        low: None,
        err_local: 0.0,
        h: 0.0,
    }];
    let mut stats = StepStats::default();
    let mut rejections = 0usize;

    while state.x < x_end {
        if h < UNDERFLOW_FRACTION * span {
            return Err(Error::StepsizeUnderflow { x: state.x, h });
        }
        let remaining = x_end - state.x;
        let last = h >= remaining;
        let h_try = if last { remaining } else { h };

        let outcome = attempt_step(pair, p, &state, h_try, tol)?;
        stats.evals_low += pair.low.stages();
        stats.evals_high += pair.high.stages();

        if !outcome.attempt.accepted {
            stats.rejected += 1;
            rejections += 1;
            if rejections >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(Error::RejectionStorm {
                    x: state.x,
                    count: rejections,
                });
            }
            h = outcome.attempt.h_next;
            continue;
        }

        rejections = 0;
        stats.accepted += 1;
        let mut next = outcome.high.expect("accepted attempts carry a state");
        let mut low = outcome.low.expect("accepted attempts carry a state");
        if last {
            next.x = x_end;
            low.x = x_end;
        }
        on_accept(nodes.len(), &state, h_try, &mut next)?;
        nodes.push(Node {
            state: next.clone(),
            low: Some(low),
            err_local: outcome.attempt.err_local,
            h: h_try,
        });
        state = next;
        h = outcome.attempt.h_next;
    }

    Ok(Trajectory {
        nodes,
        stats,
        norm: tol.norm,
    })
}

/// Integrates from `p.x0()` to `x_end` under local error control, carrying
/// the higher-order solution.
pub fn integrate_local(
    pair: &Pair<'_>,
    p: &SecondOrderIvp,
    tol: &ToleranceSpec,
    x_end: f64,
    h0: Option<f64>,
) -> Result<Trajectory> {
    drive(pair, p, tol, x_end, h0, |_, _, _, _| Ok(()))
}
