//! Explicit Runge-Kutta-Nyström integration for `y'' = f(x, y)` with
//! stepwise global error control.
//!
//! An embedded RKN4/RKN5 pair controls the local error and carries the
//! fifth-order solution forward. An RKN10 chain stepped over the same nodes
//! estimates the global error; when the estimate exceeds the global
//! tolerance the working solution is replaced ("quenched") by the RKN10
//! values. First-order problems `y' = g(x, y)` are rewritten into
//! second-order form by [`problem::transform`].
//!
//! ```
//! use rknq::prelude::*;
//!
//! let p = rknq::problem::builtin::sho();
//! let tol = ToleranceSpec::uniform(1e-8, NormRule::Mixed).unwrap();
//! let run = integrate_quenched(&Triple::rkn45q10(), &p, &tol, 20.0, None).unwrap();
//! assert!(run.max_global_err_est() <= 1e-8);
//! ```

// `!(a > b)` is used on purpose so that NaN fails validation checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod controller;
pub mod diagnostics;
pub mod error;
pub mod problem;
pub mod quench;
pub mod stepper;
pub mod tableau;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::controller::{
        integrate_local, scaled_norm, NormRule, Pair, ToleranceSpec, Trajectory,
    };
    pub use crate::error::{Error, Result};
    pub use crate::problem::{transform, FirstOrderIvp, SecondOrderIvp};
    pub use crate::quench::{integrate_quenched, summarize, QuenchedTrajectory, Triple};
    pub use crate::stepper::{step, StepState};
    pub use crate::tableau::{builtin, validate, Method, NystromTableau};
}
