//! Stepwise global error control by quenching.
//!
//! Alongside the adaptive pair, a high-order method is stepped over the same
//! nodes from its own state. Its solution stands in for the exact one: the
//! distance between the carried solution and the high-order chain estimates
//! the global error. Whenever that estimate exceeds the global tolerance, the
//! carried position and velocity at the new node are overwritten by the
//! high-order values. The step is not recomputed and the high-order chain is
//! never touched.

use crate::controller::{drive, Pair, StepStats, ToleranceSpec, Trajectory};
use crate::error::{Error, Result};
use crate::problem::SecondOrderIvp;
use crate::stepper::{step, StepState};
use crate::tableau::{rkn10, NystromTableau};

/// Quenching at this many consecutive nodes means the global tolerance
/// cannot be met with the given local tolerance.
pub const MAX_CONSECUTIVE_QUENCHES: usize = 50;

/// Methods of orders `r < v < z`.
#[derive(Debug, Clone, Copy)]
pub struct Triple<'a> {
    pub pair: Pair<'a>,
    pub high: &'a NystromTableau,
}

impl<'a> Triple<'a> {
    pub fn new(pair: Pair<'a>, high: &'a NystromTableau) -> Result<Self> {
        if high.order() <= pair.high.order() {
            return Err(Error::InvalidMethods(format!(
                "global-error method must exceed order {}, got {}",
                pair.high.order(),
                high.order()
            )));
        }
        Ok(Triple { pair, high })
    }
}

impl Triple<'static> {
    /// RKN4/RKN5 with RKN10.
    pub fn rkn45q10() -> Self {
        Triple {
            pair: Pair::rkn45(),
            high: rkn10(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchEvent {
    pub node_index: usize,
    pub x: f64,
    pub err_before: f64,
    pub err_after: f64,
}

/// Per-node global error bookkeeping, parallel to the trajectory's nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchRecord {
    /// State of the high-order chain at this node.
    pub z_state: StepState,
    /// Estimated global error after quench processing.
    pub global_err_est: f64,
    pub quenched: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchedTrajectory {
    pub trajectory: Trajectory,
    pub records: Vec<QuenchRecord>,
    pub events: Vec<QuenchEvent>,
    pub evals_z: usize,
}

impl QuenchedTrajectory {
    pub fn quench_count(&self) -> usize {
        self.events.len()
    }

    pub fn max_global_err_est(&self) -> f64 {
        self.records
            .iter()
            .fold(0.0_f64, |acc, r| acc.max(r.global_err_est))
    }
}

/// Integrates with local control from the pair and global control from the
/// high-order chain.
pub fn integrate_quenched(
    triple: &Triple<'_>,
    p: &SecondOrderIvp,
    tol: &ToleranceSpec,
    x_end: f64,
    h0: Option<f64>,
) -> Result<QuenchedTrajectory> {
    let initial = StepState::initial(p);
    let mut records = vec![QuenchRecord {
        z_state: initial.clone(),
        global_err_est: 0.0,
        quenched: false,
    }];
    let mut events = Vec::new();
    let mut evals_z = 0usize;
    let mut run = 0usize;

    let trajectory = drive(&triple.pair, p, tol, x_end, h0, |index, _, h, candidate| {
        let previous = &records.last().expect("initial record").z_state;
        let mut z = step(triple.high, p, previous, h)?;
        evals_z += triple.high.stages();
        z.x = candidate.x;

        let estimate = tol.norm.difference(&candidate.w, &z.w, &z.w);
        let quenched = !(estimate <= tol.global);
        let global_err_est = if quenched {
            candidate.w.clone_from(&z.w);
            candidate.wprime.clone_from(&z.wprime);
            let after = tol.norm.difference(&candidate.w, &z.w, &z.w);
            events.push(QuenchEvent {
                node_index: index,
                x: candidate.x,
                err_before: estimate,
                err_after: after,
            });
            run += 1;
            if run >= MAX_CONSECUTIVE_QUENCHES {
                return Err(Error::ToleranceInfeasible {
                    x: candidate.x,
                    count: run,
                });
            }
            after
        } else {
            run = 0;
            estimate
        };
        records.push(QuenchRecord {
            z_state: z,
            global_err_est,
            quenched,
        });
        Ok(())
    })?;

    Ok(QuenchedTrajectory {
        trajectory,
        records,
        events,
        evals_z,
    })
}

/// Steps `high` alone over the node sequence of `t`, from the initial
/// state. With quenching never feeding back, this reproduces the recorded
/// high-order chain exactly.
pub fn replay_z_chain(
    high: &NystromTableau,
    p: &SecondOrderIvp,
    t: &Trajectory,
) -> Result<Vec<StepState>> {
    let mut chain = vec![StepState::initial(p)];
    for node in &t.nodes[1..] {
        let mut z = step(high, p, chain.last().expect("initial state"), node.h)?;
        z.x = node.x();
        chain.push(z);
    }
    Ok(chain)
}

/// f-evaluations per chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalCounts {
    pub low: usize,
    pub high: usize,
    pub z: usize,
}

impl EvalCounts {
    pub fn total(&self) -> usize {
        self.low + self.high + self.z
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// `None` for runs without a global-error chain.
    pub max_global_err_est: Option<f64>,
    /// `None` when the problem has no analytic solution.
    pub max_true_err: Option<f64>,
    pub quench_count: usize,
    pub nodes: usize,
    pub steps: StepStats,
    pub evals: EvalCounts,
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, e| acc.max(*e))
}

pub fn summarize(t: &QuenchedTrajectory, p: &SecondOrderIvp) -> Summary {
    let mut s = summarize_local(&t.trajectory, p);
    s.max_global_err_est = Some(t.max_global_err_est());
    s.quench_count = t.quench_count();
    s.evals.z = t.evals_z;
    s
}

/// Summary of a run with local control only.
pub fn summarize_local(t: &Trajectory, p: &SecondOrderIvp) -> Summary {
    Summary {
        max_global_err_est: None,
        max_true_err: t.true_errors(p).map(|e| max_of(&e)),
        quench_count: 0,
        nodes: t.nodes.len(),
        steps: t.stats,
        evals: EvalCounts {
            low: t.stats.evals_low,
            high: t.stats.evals_high,
            z: 0,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::{integrate_local, NormRule};
    use crate::problem::builtin;
    use crate::tableau::{rkn4, rkn5};

    #[test]
    fn infinite_global_tolerance_matches_local_run() {
        let p = builtin::sho();
        let tol = ToleranceSpec::new(1e-8, f64::INFINITY, NormRule::Mixed).unwrap();
        let q = integrate_quenched(&Triple::rkn45q10(), &p, &tol, 50.0, None).unwrap();
        let l = integrate_local(&Pair::rkn45(), &p, &tol, 50.0, None).unwrap();
        assert_eq!(q.quench_count(), 0);
        assert_eq!(q.trajectory, l);
        assert!(q.records.iter().all(|r| !r.quenched));
    }

    #[test]
    fn z_chain_ignores_quenching() {
        let p = builtin::sho();
        let tol = ToleranceSpec::uniform(1e-8, NormRule::Mixed).unwrap();
        let q = integrate_quenched(&Triple::rkn45q10(), &p, &tol, 100.0, None).unwrap();
        assert!(q.quench_count() > 0);
        let replay = replay_z_chain(rkn10(), &p, &q.trajectory).unwrap();
        let recorded: Vec<_> = q.records.iter().map(|r| r.z_state.clone()).collect();
        assert_eq!(replay, recorded);
    }

    #[test]
    fn quenched_nodes_sit_on_the_z_chain() {
        let p = builtin::sho();
        let tol = ToleranceSpec::uniform(1e-8, NormRule::Mixed).unwrap();
        let q = integrate_quenched(&Triple::rkn45q10(), &p, &tol, 200.0, None).unwrap();
        assert_eq!(q.records.len(), q.trajectory.nodes.len());
        assert_eq!(
            q.records.iter().filter(|r| r.quenched).count(),
            q.quench_count()
        );
        for (node, rec) in q.trajectory.nodes.iter().zip(&q.records) {
            assert_eq!(node.x(), rec.z_state.x);
            assert!(rec.global_err_est <= 1e-8);
            if rec.quenched {
                assert_eq!(node.state, rec.z_state);
                assert_eq!(rec.global_err_est, 0.0);
            }
        }
        for e in &q.events {
            assert!(e.err_before > 1e-8);
            assert!(e.err_after <= e.err_before);
            assert!(q.records[e.node_index].quenched);
        }
    }

    #[test]
    fn evaluation_counts_per_chain() {
        let p = builtin::sho();
        let tol = ToleranceSpec::uniform(1e-8, NormRule::Mixed).unwrap();
        let q = integrate_quenched(&Triple::rkn45q10(), &p, &tol, 60.0, None).unwrap();
        let s = summarize(&q, &p);
        let st = s.steps;
        assert_eq!(s.evals.low, 3 * st.attempts());
        assert_eq!(s.evals.high, 4 * st.attempts());
        assert_eq!(s.evals.z, 26 * st.accepted);
        assert_eq!(s.nodes, st.accepted + 1);
    }

    #[test]
    fn summary_without_quenches() {
        let p = builtin::sho();
        let tol = ToleranceSpec::new(1e-8, f64::INFINITY, NormRule::Mixed).unwrap();
        let q = integrate_quenched(&Triple::rkn45q10(), &p, &tol, 10.0, None).unwrap();
        let s = summarize(&q, &p);
        assert_eq!(s.quench_count, 0);
        assert!(s.max_true_err.is_some());
    }

    #[test]
    fn unreachable_global_tolerance_is_infeasible() {
        let p = builtin::sho();
        let tol = ToleranceSpec::new(1e-6, 1e-18, NormRule::Mixed).unwrap();
        let err = integrate_quenched(&Triple::rkn45q10(), &p, &tol, 200.0, None).unwrap_err();
        assert!(
            matches!(err, Error::ToleranceInfeasible { count: 50, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn triple_orders_are_checked() {
        let pair = Pair::new(rkn4(), rkn5()).unwrap();
        assert!(Triple::new(pair, rkn5()).is_err());
        assert!(Triple::new(pair, rkn10()).is_ok());
    }
}
