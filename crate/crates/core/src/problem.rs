//! Initial-value problems and the first-order to second-order transformation.
//!
//! A first-order problem `y' = g(x, y)` becomes `y'' = f(x, y)` with
//! `f_j = sum_i (dg_j/dy_i) g_i` and `y'(x0) = g(x0, y0)`. Evaluators are
//! expected to be pure functions.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `(x, y, out)`: writes a vector field evaluated at `(x, y)` into `out`.
pub type VectorField = Arc<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;

/// `(x, y) -> J` with `J[(j, i)] = dg_j / dy_i`.
pub type JacobianFn = Arc<dyn Fn(f64, &[f64]) -> DMatrix<f64> + Send + Sync>;

/// Analytic position and velocity of a second-order problem.
pub type SecondOrderReference = Arc<dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// Analytic solution of a first-order problem.
pub type FirstOrderReference = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

const REFERENCE_TOL: f64 = 1e-12;
const JACOBIAN_AGREEMENT_TOL: f64 = 1e-6;

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

fn eval_checked(field: &VectorField, x: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
    field(x, y, out);
    if all_finite(out) {
        Ok(())
    } else {
        Err(Error::Evaluation {
            x,
            y: y.to_vec(),
            stage: None,
        })
    }
}

/// `y'' = f(x, y)`, `y(x0) = y0`, `y'(x0) = y0prime`.
#[derive(Clone)]
pub struct SecondOrderIvp {
    f: VectorField,
    x0: f64,
    y0: Vec<f64>,
    y0prime: Vec<f64>,
    reference: Option<SecondOrderReference>,
    recoverable: bool,
}

impl fmt::Debug for SecondOrderIvp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SecondOrderIvp")
            .field("dim", &self.dim())
            .field("x0", &self.x0)
            .field("y0", &self.y0)
            .field("y0prime", &self.y0prime)
            .field("reference", &self.reference.is_some())
            .finish()
    }
}

impl SecondOrderIvp {
    pub fn new(
        f: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
        x0: f64,
        y0: Vec<f64>,
        y0prime: Vec<f64>,
    ) -> Result<Self> {
        Self::from_field(Arc::new(f), x0, y0, y0prime)
    }

    pub fn from_field(f: VectorField, x0: f64, y0: Vec<f64>, y0prime: Vec<f64>) -> Result<Self> {
        if y0.is_empty() {
            return Err(Error::InvalidProblem("dimension must be positive".into()));
        }
        check_dim(y0.len(), y0prime.len())?;
        if !x0.is_finite() || !all_finite(&y0) || !all_finite(&y0prime) {
            return Err(Error::InvalidProblem("non-finite initial data".into()));
        }
        let mut out = vec![0.0; y0.len()];
        eval_checked(&f, x0, &y0, &mut out)?;
        Ok(SecondOrderIvp {
            f,
            x0,
            y0,
            y0prime,
            reference: None,
            recoverable: false,
        })
    }

    /// Attaches an analytic solution; it must reproduce the initial data to
    /// within `1e-12` componentwise relative tolerance.
    pub fn with_reference(
        self,
        reference: impl Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    ) -> Result<Self> {
        self.with_reference_arc(Arc::new(reference))
    }

    pub fn with_reference_arc(mut self, reference: SecondOrderReference) -> Result<Self> {
        let (y, yp) = reference(self.x0);
        check_dim(self.dim(), y.len())?;
        check_dim(self.dim(), yp.len())?;
        let close = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .all(|(u, v)| (u - v).abs() <= REFERENCE_TOL * u.abs().max(v.abs()).max(1.0))
        };
        if !close(&y, &self.y0) || !close(&yp, &self.y0prime) {
            return Err(Error::InvalidProblem(
                "reference solution disagrees with the initial data".into(),
            ));
        }
        self.reference = Some(reference);
        Ok(self)
    }

    /// Non-finite stage values reject the step attempt instead of aborting.
    pub fn with_recoverable_nonfinite(mut self, recoverable: bool) -> Self {
        self.recoverable = recoverable;
        self
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> &[f64] {
        &self.y0
    }

    pub fn y0prime(&self) -> &[f64] {
        &self.y0prime
    }

    pub fn field(&self) -> &VectorField {
        &self.f
    }

    pub fn reference(&self) -> Option<&SecondOrderReference> {
        self.reference.as_ref()
    }

    pub fn recoverable_nonfinite(&self) -> bool {
        self.recoverable
    }

    /// Evaluates `f(x, y)` into `out`, failing on any non-finite component.
    pub fn eval(&self, x: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
        eval_checked(&self.f, x, y, out)
    }
}

/// `y' = g(x, y)`, `y(x0) = y0`, with optional analytic Jacobian.
#[derive(Clone)]
pub struct FirstOrderIvp {
    g: VectorField,
    jacobian: Option<JacobianFn>,
    x0: f64,
    y0: Vec<f64>,
    reference: Option<FirstOrderReference>,
    autonomous: bool,
}

impl fmt::Debug for FirstOrderIvp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FirstOrderIvp")
            .field("dim", &self.dim())
            .field("x0", &self.x0)
            .field("y0", &self.y0)
            .field("jacobian", &self.jacobian.is_some())
            .field("reference", &self.reference.is_some())
            .field("autonomous", &self.autonomous)
            .finish()
    }
}

impl FirstOrderIvp {
    pub fn new(
        g: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
        x0: f64,
        y0: Vec<f64>,
    ) -> Result<Self> {
        let g: VectorField = Arc::new(g);
        if y0.is_empty() {
            return Err(Error::InvalidProblem("dimension must be positive".into()));
        }
        if !x0.is_finite() || !all_finite(&y0) {
            return Err(Error::InvalidProblem("non-finite initial data".into()));
        }
        let mut out = vec![0.0; y0.len()];
        eval_checked(&g, x0, &y0, &mut out)?;
        Ok(FirstOrderIvp {
            g,
            jacobian: None,
            x0,
            y0,
            reference: None,
            autonomous: true,
        })
    }

    /// Attaches an analytic Jacobian, checked against [`fd_jacobian`] at the
    /// initial point (max-norm agreement within `1e-6`).
    pub fn with_jacobian(
        mut self,
        jacobian: impl Fn(f64, &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let jacobian: JacobianFn = Arc::new(jacobian);
        let n = self.dim();
        let analytic = jacobian(self.x0, &self.y0);
        if analytic.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: analytic.len(),
            });
        }
        let numeric = fd_jacobian(&self.g, self.x0, &self.y0)?;
        let gap = (&analytic - &numeric).amax();
        if !(gap <= JACOBIAN_AGREEMENT_TOL) {
            return Err(Error::InvalidProblem(format!(
                "analytic Jacobian differs from finite differences by {gap:e}"
            )));
        }
        self.jacobian = Some(jacobian);
        Ok(self)
    }

    pub fn with_reference(
        mut self,
        reference: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let y = reference(self.x0);
        check_dim(self.dim(), y.len())?;
        let ok = y
            .iter()
            .zip(&self.y0)
            .all(|(u, v)| (u - v).abs() <= REFERENCE_TOL * u.abs().max(v.abs()).max(1.0));
        if !ok {
            return Err(Error::InvalidProblem(
                "reference solution disagrees with the initial data".into(),
            ));
        }
        self.reference = Some(Arc::new(reference));
        Ok(self)
    }

    /// Declares explicit `x`-dependence of `g`; the transformation then adds
    /// a finite-difference `dg/dx` term.
    pub fn non_autonomous(mut self) -> Self {
        self.autonomous = false;
        self
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> &[f64] {
        &self.y0
    }

    pub fn field(&self) -> &VectorField {
        &self.g
    }

    pub fn jacobian(&self) -> Option<&JacobianFn> {
        self.jacobian.as_ref()
    }

    pub fn reference(&self) -> Option<&FirstOrderReference> {
        self.reference.as_ref()
    }

    pub fn is_autonomous(&self) -> bool {
        self.autonomous
    }
}

fn fd_step(v: f64) -> f64 {
    f64::EPSILON.cbrt() * v.abs().max(1.0)
}

/// Central-difference Jacobian `J[(j, i)] = dg_j/dy_i`, perturbing `y_i` by
/// `eps^(1/3) max(1, |y_i|)`.
pub fn fd_jacobian(g: &VectorField, x: f64, y: &[f64]) -> Result<DMatrix<f64>> {
    let n = y.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut probe = y.to_vec();
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    for i in 0..n {
        let delta = fd_step(y[i]);
        probe[i] = y[i] + delta;
        let up = probe[i];
        eval_checked(g, x, &probe, &mut plus)?;
        probe[i] = y[i] - delta;
        let down = probe[i];
        eval_checked(g, x, &probe, &mut minus)?;
        probe[i] = y[i];
        let width = up - down;
        for j in 0..n {
            jac[(j, i)] = (plus[j] - minus[j]) / width;
        }
    }
    Ok(jac)
}

/// Central-difference `dg/dx` at `(x, y)`.
fn fd_x_derivative(g: &VectorField, x: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
    let n = y.len();
    let delta = fd_step(x);
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    eval_checked(g, x + delta, y, &mut plus)?;
    eval_checked(g, x - delta, y, &mut minus)?;
    let width = (x + delta) - (x - delta);
    for j in 0..n {
        out[j] = (plus[j] - minus[j]) / width;
    }
    Ok(())
}

/// Rewrites `y' = g(x, y)` as `y'' = f(x, y)`.
///
/// `f` uses the analytic Jacobian when present, otherwise [`fd_jacobian`].
/// Non-finite values inside `f` surface as evaluation errors from
/// [`SecondOrderIvp::eval`].
pub fn transform(p: &FirstOrderIvp) -> Result<SecondOrderIvp> {
    let n = p.dim();
    let g = p.g.clone();
    let jacobian = p.jacobian.clone();
    let autonomous = p.autonomous;

    let mut y0prime = vec![0.0; n];
    eval_checked(&g, p.x0, &p.y0, &mut y0prime)?;

    let field_g = g.clone();
    let f = move |x: f64, y: &[f64], out: &mut [f64]| {
        let poison = |out: &mut [f64]| out.iter_mut().for_each(|v| *v = f64::NAN);
        let mut gv = vec![0.0; y.len()];
        if eval_checked(&field_g, x, y, &mut gv).is_err() {
            return poison(out);
        }
        let jac = match &jacobian {
            Some(j) => j(x, y),
            None => match fd_jacobian(&field_g, x, y) {
                Ok(j) => j,
                Err(_) => return poison(out),
            },
        };
        let prod = jac * DVector::from_column_slice(&gv);
        out.copy_from_slice(prod.as_slice());
        if !autonomous {
            let mut gx = vec![0.0; y.len()];
            if fd_x_derivative(&field_g, x, y, &mut gx).is_err() {
                return poison(out);
            }
            for (o, d) in out.iter_mut().zip(&gx) {
                *o += d;
            }
        }
    };

    let mut second = SecondOrderIvp::new(f, p.x0, p.y0.clone(), y0prime)?;
    if let Some(reference) = &p.reference {
        let reference = reference.clone();
        let g = g.clone();
        second = second.with_reference(move |x| {
            let y = reference(x);
            let mut yp = vec![0.0; y.len()];
            g(x, &y, &mut yp);
            (y, yp)
        })?;
    }
    Ok(second)
}

/// The two named problems shipped with the library and CLI.
pub mod builtin {
    use super::*;
    use crate::controller::NormRule;

    /// Growth rate of `exp1000`: `y(100) = 1000`.
    pub fn exp_rate() -> f64 {
        1000f64.ln() / 100.0
    }

    /// `y' = lambda y`, `y(0) = 1`.
    pub fn exp1000_first_order() -> FirstOrderIvp {
        let lambda = exp_rate();
        FirstOrderIvp::new(move |_, y, out| out[0] = lambda * y[0], 0.0, vec![1.0])
            .and_then(|p| p.with_jacobian(move |_, _| DMatrix::from_element(1, 1, lambda)))
            .and_then(|p| p.with_reference(move |x| vec![(lambda * x).exp()]))
            .expect("exp1000 is well formed")
    }

    /// `y'' = lambda^2 y`, `y(0) = 1`, `y'(0) = lambda`.
    pub fn exp1000() -> SecondOrderIvp {
        let lambda = exp_rate();
        let lambda2 = lambda * lambda;
        SecondOrderIvp::new(
            move |_, y, out| out[0] = lambda2 * y[0],
            0.0,
            vec![1.0],
            vec![lambda],
        )
        .and_then(|p| {
            p.with_reference(move |x| {
                let e = (lambda * x).exp();
                (vec![e], vec![lambda * e])
            })
        })
        .expect("exp1000 is well formed")
    }

    /// `y1' = y2`, `y2' = -y1`, `y(0) = (0, 1000)`.
    pub fn sho_first_order() -> FirstOrderIvp {
        FirstOrderIvp::new(
            |_, y, out| {
                out[0] = y[1];
                out[1] = -y[0];
            },
            0.0,
            vec![0.0, 1000.0],
        )
        .and_then(|p| p.with_jacobian(|_, _| DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])))
        .and_then(|p| p.with_reference(|x| vec![1000.0 * x.sin(), 1000.0 * x.cos()]))
        .expect("sho is well formed")
    }

    /// `y'' = -y`, `y(0) = (0, 1000)`, `y'(0) = (1000, 0)`.
    pub fn sho() -> SecondOrderIvp {
        SecondOrderIvp::new(
            |_, y, out| {
                out[0] = -y[0];
                out[1] = -y[1];
            },
            0.0,
            vec![0.0, 1000.0],
            vec![1000.0, 0.0],
        )
        .and_then(|p| {
            p.with_reference(|x| {
                let (s, c) = x.sin_cos();
                (vec![1000.0 * s, 1000.0 * c], vec![1000.0 * c, -1000.0 * s])
            })
        })
        .expect("sho is well formed")
    }

    /// A named problem with its CLI defaults.
    #[derive(Debug, Clone)]
    pub struct BuiltinProblem {
        pub name: &'static str,
        pub first_order: FirstOrderIvp,
        pub second_order: SecondOrderIvp,
        pub default_x_end: f64,
        pub default_norm: NormRule,
    }

    pub const NAMES: [&str; 2] = ["exp1000", "sho"];

    pub fn by_name(name: &str) -> Result<BuiltinProblem> {
        match name {
            "exp1000" => Ok(BuiltinProblem {
                name: "exp1000",
                first_order: exp1000_first_order(),
                second_order: exp1000(),
                default_x_end: 100.0,
                default_norm: NormRule::Absolute,
            }),
            "sho" => Ok(BuiltinProblem {
                name: "sho",
                first_order: sho_first_order(),
                second_order: sho(),
                default_x_end: 200.0,
                default_norm: NormRule::Mixed,
            }),
            other => Err(Error::UnknownProblem(other.to_string())),
        }
    }
}
