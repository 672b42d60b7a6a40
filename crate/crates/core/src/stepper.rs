//! One explicit Nyström step: stage cascade, position and velocity update.

use crate::error::{Error, Result};
use crate::problem::SecondOrderIvp;
use crate::tableau::NystromTableau;

/// Position `w` and velocity `wprime` at abscissa `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepState {
    pub x: f64,
    pub w: Vec<f64>,
    pub wprime: Vec<f64>,
}

impl StepState {
    pub fn new(x: f64, w: Vec<f64>, wprime: Vec<f64>) -> Self {
        StepState { x, w, wprime }
    }

    /// Initial state of a problem.
    pub fn initial(p: &SecondOrderIvp) -> Self {
        StepState {
            x: p.x0(),
            w: p.y0().to_vec(),
            wprime: p.y0prime().to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.w.iter().all(|v| v.is_finite())
            && self.wprime.iter().all(|v| v.is_finite())
    }
}

/// Stage accelerations `k[p]`, one row per stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSet {
    pub k: Vec<Vec<f64>>,
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidStepsize(h))
    }
}

/// Evaluates the `m` stages in order; calls `f` exactly `m` times.
pub fn compute_stages(
    t: &NystromTableau,
    p: &SecondOrderIvp,
    s: &StepState,
    h: f64,
) -> Result<StageSet> {
    check_step(h)?;
    let n = p.dim();
    if s.w.len() != n || s.wprime.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.w.len().min(s.wprime.len()),
        });
    }
    let h2 = h * h;
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(t.stages());
    let mut arg = vec![0.0; n];
    for (stage, (&c, row)) in t.c().iter().zip(t.a()).enumerate() {
        for j in 0..n {
            let coupling: f64 = k.iter().zip(row).map(|(kq, a)| a * kq[j]).sum();
            arg[j] = s.w[j] + c * h * s.wprime[j] + h2 * coupling;
        }
        let mut out = vec![0.0; n];
        p.eval(s.x + c * h, &arg, &mut out).map_err(|e| match e {
            Error::Evaluation { x, y, .. } => Error::Evaluation {
                x,
                y,
                stage: Some(stage + 1),
            },
            other => other,
        })?;
        k.push(out);
    }
    Ok(StageSet { k })
}

fn weighted(weights: &[f64], stages: &StageSet, j: usize) -> f64 {
    weights.iter().zip(&stages.k).map(|(b, k)| b * k[j]).sum()
}

fn increment_from(t: &NystromTableau, s: &StepState, stages: &StageSet, h: f64) -> Vec<f64> {
    (0..s.w.len())
        .map(|j| s.wprime[j] + h * weighted(t.b(), stages, j))
        .collect()
}

/// Advances `s` by `h` given precomputed stages.
pub fn advance(t: &NystromTableau, s: &StepState, stages: &StageSet, h: f64) -> StepState {
    let inc = increment_from(t, s, stages, h);
    let w = s.w.iter().zip(&inc).map(|(w, f)| w + h * f).collect();
    let wprime = (0..s.w.len())
        .map(|j| s.wprime[j] + h * weighted(t.bhat(), stages, j))
        .collect();
    StepState {
        x: s.x + h,
        w,
        wprime,
    }
}

/// One step of size `h`.
pub fn step(t: &NystromTableau, p: &SecondOrderIvp, s: &StepState, h: f64) -> Result<StepState> {
    let stages = compute_stages(t, p, s, h)?;
    Ok(advance(t, s, &stages, h))
}

/// Increment `F = w' + h sum_p b_p k_p`, so that the new position is `w + h F`.
pub fn eval_increment(
    t: &NystromTableau,
    p: &SecondOrderIvp,
    s: &StepState,
    h: f64,
) -> Result<Vec<f64>> {
    let stages = compute_stages(t, p, s, h)?;
    Ok(increment_from(t, s, &stages, h))
}

/// Fixed-step integration to `x_end`; only the final step is shortened.
/// Returns every node including the initial state.
pub fn integrate_fixed(
    t: &NystromTableau,
    p: &SecondOrderIvp,
    h: f64,
    x_end: f64,
) -> Result<Vec<StepState>> {
    check_step(h)?;
    let x0 = p.x0();
    if !(x_end > x0) || !x_end.is_finite() {
        return Err(Error::InvalidInterval { x0, x_end });
    }
    let steps = ((x_end - x0) / h - 1e-9).ceil().max(1.0) as usize;
    let mut nodes = Vec::with_capacity(steps + 1);
    nodes.push(StepState::initial(p));
    for i in 0..steps {
        let s = nodes.last().expect("initial node");
        let last = i + 1 == steps;
        let h_i = if last { x_end - s.x } else { h };
        let mut next = step(t, p, s, h_i)?;
        if last {
            next.x = x_end;
        }
        nodes.push(next);
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::builtin;
    use crate::tableau::{rkn4, rkn5, Method, NystromTableau};
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    fn free(n: usize) -> SecondOrderIvp {
        SecondOrderIvp::new(
            |_, _, out| out.iter_mut().for_each(|v| *v = 0.0),
            0.0,
            vec![1.0; n],
            vec![0.5; n],
        )
        .unwrap()
    }

    #[test]
    fn zero_field_gives_zero_stages_and_straight_lines() {
        let p = free(2);
        let s = StepState::new(0.0, vec![1.5, -2.0], vec![0.25, 3.0]);
        for m in Method::ALL {
            let t = m.tableau();
            let k = compute_stages(t, &p, &s, 0.7).unwrap();
            assert!(k.k.iter().flatten().all(|v| *v == 0.0));
            let next = step(t, &p, &s, 0.7).unwrap();
            assert_eq!(next.x, 0.7);
            assert_eq!(next.w, vec![1.5 + 0.7 * 0.25, -2.0 + 0.7 * 3.0]);
            assert_eq!(next.wprime, s.wprime);
            assert_eq!(eval_increment(t, &p, &s, 0.7).unwrap(), s.wprime);
        }
    }

    #[test]
    fn first_stage_is_step_start() {
        let p = SecondOrderIvp::new(|_, y, out| out[0] = y[0], 0.0, vec![1.0], vec![0.0]).unwrap();
        let s = StepState::initial(&p);
        for m in Method::ALL {
            let k = compute_stages(m.tableau(), &p, &s, 0.3).unwrap();
            assert_eq!(k.k[0], vec![1.0]);
        }
    }

    /// Stage cascade written out by hand for the three-stage method.
    fn rkn4_stages_by_hand(h: f64, w: [f64; 2], v: [f64; 2]) -> [[f64; 2]; 3] {
        let f = |y: [f64; 2]| [-y[0], -y[1]];
        let k1 = f(w);
        let k2 = f([
            w[0] + 0.5 * h * v[0] + h * h * k1[0] / 8.0,
            w[1] + 0.5 * h * v[1] + h * h * k1[1] / 8.0,
        ]);
        let k3 = f([
            w[0] + h * v[0] + h * h * k2[0] / 2.0,
            w[1] + h * v[1] + h * h * k2[1] / 2.0,
        ]);
        [k1, k2, k3]
    }

    #[test]
    fn sho_rkn4_stages_match_hand_cascade() {
        let p = builtin::sho();
        let s = StepState::initial(&p);
        let k = compute_stages(rkn4(), &p, &s, 0.1).unwrap();
        assert_eq!(k.k[0], vec![0.0, -1000.0]);
        let expected = rkn4_stages_by_hand(0.1, [0.0, 1000.0], [1000.0, 0.0]);
        for (got, want) in k.k.iter().zip(expected) {
            for j in 0..2 {
                assert!((got[j] - want[j]).abs() <= 1e-12 * want[j].abs().max(1.0));
            }
        }
    }

    /// For y'' = l^2 y from (1, l) the three-stage step reproduces the
    /// exponential series through l^4, so the error is sum_{k>=5} l^k / k!.
    #[test]
    fn exp1000_rkn4_unit_step() {
        let p = builtin::exp1000();
        let lambda = builtin::exp_rate();
        let next = step(rkn4(), &p, &StepState::initial(&p), 1.0).unwrap();
        let tail: f64 = (5..12)
            .map(|k| lambda.powi(k) / (1..=k).map(f64::from).product::<f64>())
            .sum();
        let err = lambda.exp() - next.w[0];
        assert!((err - tail).abs() < 1e-15, "{err:e} vs {tail:e}");
        assert!(err.abs() < 1.4e-8);
    }

    #[test]
    fn sho_rkn5_half_step() {
        let p = builtin::sho();
        let h = 0.5;
        let next = step(rkn5(), &p, &StepState::initial(&p), h).unwrap();
        assert!((next.w[0] - 1000.0 * h.sin()).abs() < 1000.0 * h.powi(6));
        assert!((next.w[1] - 1000.0 * h.cos()).abs() < 1000.0 * h.powi(6));
    }

    #[test]
    fn increment_is_consistent_with_step() {
        let p = builtin::sho();
        let s = StepState::new(0.3, vec![12.0, -900.0], vec![850.0, 20.0]);
        for m in Method::ALL {
            let t = m.tableau();
            let h = 0.137;
            let inc = eval_increment(t, &p, &s, h).unwrap();
            let next = step(t, &p, &s, h).unwrap();
            for ((w, f), n) in s.w.iter().zip(&inc).zip(&next.w) {
                assert_eq!(w + h * f, *n);
            }
        }
    }

    /// For f = mu y the three-stage cascade collapses to
    /// F = w' + h mu [ (1/6 + 1/3) w + (1/3)(h/2) w' + (1/3)(h^2 mu / 8) w ].
    #[test]
    fn linear_increment_closed_form() {
        let mu = 0.3;
        let p = SecondOrderIvp::new(
            move |_, y, out| out[0] = mu * y[0],
            0.0,
            vec![1.0],
            vec![0.0],
        )
        .unwrap();
        let (w, v, h) = (2.0, -0.7, 0.4);
        let s = StepState::new(0.0, vec![w], vec![v]);
        let got = eval_increment(rkn4(), &p, &s, h).unwrap()[0];
        let z = h * h * mu;
        let expected = v + h * mu * (w / 2.0 + h * v / 6.0 + z * w / 24.0);
        assert!((got - expected).abs() < 1e-15, "{got} vs {expected}");
    }

    #[test]
    fn calls_f_once_per_stage() {
        let calls = Arc::new(AtomicUsize::new(0));
        let counter = calls.clone();
        let p = SecondOrderIvp::new(
            move |_, y, out| {
                counter.fetch_add(1, Ordering::Relaxed);
                out[0] = -y[0];
            },
            0.0,
            vec![1.0],
            vec![0.0],
        )
        .unwrap();
        let s = StepState::initial(&p);
        for m in Method::ALL {
            let before = calls.load(Ordering::Relaxed);
            step(m.tableau(), &p, &s, 0.1).unwrap();
            assert_eq!(calls.load(Ordering::Relaxed) - before, m.tableau().stages());
        }
    }

    #[test]
    fn zero_and_negative_steps_are_rejected() {
        let p = free(1);
        let s = StepState::initial(&p);
        for h in [0.0, -0.1, f64::NAN] {
            assert!(matches!(
                step(rkn4(), &p, &s, h),
                Err(Error::InvalidStepsize(_))
            ));
        }
    }

    #[test]
    fn stage_index_is_reported() {
        // blows up once the position leaves [0, 1]
        let p = SecondOrderIvp::new(
            |_, y, out| out[0] = if y[0] > 1.0 { f64::INFINITY } else { 0.0 },
            0.0,
            vec![1.0],
            vec![1.0],
        )
        .unwrap();
        let err = step(rkn4(), &p, &StepState::initial(&p), 0.5).unwrap_err();
        assert!(
            matches!(err, Error::Evaluation { stage: Some(2), .. }),
            "{err:?}"
        );
    }

    #[test]
    fn local_order_by_halving() {
        let p = builtin::sho();
        let reference = p.reference().unwrap().clone();
        for (t, hs) in [(rkn4(), [0.2, 0.1, 0.05]), (rkn5(), [0.2, 0.1, 0.05])] {
            let err = |h: f64| {
                let next = step(t, &p, &StepState::initial(&p), h).unwrap();
                let (y, _) = reference(h);
                (next.w[0] - y[0]).abs().max((next.w[1] - y[1]).abs())
            };
            let target = 2f64.powi(t.order() as i32 + 1);
            for pair in hs.windows(2) {
                let ratio = err(pair[0]) / err(pair[1]);
                assert!(
                    ratio >= target / 1.5 && ratio <= target * 1.5,
                    "{}: ratio {ratio} vs {target}",
                    t.name()
                );
            }
        }
    }

    #[test]
    fn fixed_driver_lands_on_endpoint() {
        let p = builtin::sho();
        let nodes = integrate_fixed(rkn5(), &p, 0.3, 1.0).unwrap();
        assert_eq!(nodes.len(), 5);
        assert_eq!(nodes.last().unwrap().x, 1.0);
        assert!((nodes[3].x - 0.9).abs() < 1e-15);
        assert!(integrate_fixed(rkn5(), &p, 0.3, 0.0).is_err());
    }

    #[test]
    fn explicit_rows_ignore_upper_triangle() {
        // stepper reads only q < p
        let base = rkn4();
        let mut a = base.a().to_vec();
        a[0][2] = 9.0;
        let skewed = NystromTableau::new(
            "skewed",
            4,
            base.c().to_vec(),
            a,
            base.b().to_vec(),
            base.bhat().to_vec(),
        )
        .unwrap();
        let p = builtin::sho();
        let s = StepState::initial(&p);
        let k = compute_stages(&skewed, &p, &s, 0.1).unwrap();
        assert_eq!(k.k[0], vec![0.0, -1000.0]);
    }
}
