//! Explicit Nyström coefficient sets.
//!
//! A tableau `(c, a, b, bhat)` with `m` stages advances `y'' = f(x, y)` by
//!
//! ```text
//! k_p    = f(x + c_p h, w + c_p h w' + h^2 sum_q a_pq k_q)
//! w_new  = w + h w' + h^2 sum_p b_p k_p
//! w'_new = w' + h sum_p bhat_p k_p
//! ```
//!
//! Three methods are compiled in: [`rkn4`] (3 stages), [`rkn5`] (4 stages)
//! and [`rkn10`] (26 stages).

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use crate::error::{Error, Result};

mod rkn10;

/// Tolerance on the consistency sums and on the simplifying relation.
pub const CONSISTENCY_TOL: f64 = 1e-13;

/// The built-in methods, by CLI-visible identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Rkn4,
    Rkn5,
    Rkn10,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Rkn4, Method::Rkn5, Method::Rkn10];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rkn4 => "RKN4",
            Method::Rkn5 => "RKN5",
            Method::Rkn10 => "RKN10",
        }
    }

    pub fn tableau(self) -> &'static NystromTableau {
        match self {
            Method::Rkn4 => rkn4(),
            Method::Rkn5 => rkn5(),
            Method::Rkn10 => rkn10(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RKN4" => Ok(Method::Rkn4),
            "RKN5" => Ok(Method::Rkn5),
            "RKN10" => Ok(Method::Rkn10),
            _ => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

/// Coefficients of one explicit Runge-Kutta-Nyström method.
///
/// `a` is stored dense (`m x m`) so that malformed, non-explicit sets can be
/// represented and reported by [`validate`]; the stepper only reads the
/// strictly lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct NystromTableau {
    name: String,
    order: usize,
    c: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    bhat: Vec<f64>,
}

impl NystromTableau {
    /// Builds a tableau, checking only the shapes. Coefficient conditions are
    /// left to [`validate`].
    pub fn new(
        name: impl Into<String>,
        order: usize,
        c: Vec<f64>,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        bhat: Vec<f64>,
    ) -> Result<Self> {
        let name = name.into();
        let m = c.len();
        let malformed = |reason: String| Error::MalformedTableau {
            name: name.clone(),
            reason,
        };
        if m == 0 {
            return Err(malformed("no stages".into()));
        }
        if order == 0 {
            return Err(malformed("order must be positive".into()));
        }
        if a.len() != m || a.iter().any(|row| row.len() != m) {
            return Err(malformed(format!("coupling matrix is not {m}x{m}")));
        }
        if b.len() != m || bhat.len() != m {
            return Err(malformed(format!(
                "weight vectors have lengths {} and {}, expected {m}",
                b.len(),
                bhat.len()
            )));
        }
        let all = c
            .iter()
            .chain(a.iter().flatten())
            .chain(b.iter())
            .chain(bhat.iter());
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(malformed("non-finite coefficient".into()));
        }
        Ok(NystromTableau {
            name,
            order,
            c,
            a,
            b,
            bhat,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Declared order of the method.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stages, i.e. `f` evaluations per step.
    pub fn stages(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    /// Position-update weights.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Velocity-update weights.
    pub fn bhat(&self) -> &[f64] {
        &self.bhat
    }

    pub fn is_explicit(&self) -> bool {
        explicitness_residual(&self.a) == 0.0
    }
}

/// Looks up a built-in tableau by identifier (case-insensitive).
pub fn builtin(name: &str) -> Result<&'static NystromTableau> {
    name.parse::<Method>().map(Method::tableau)
}

static RKN4: LazyLock<NystromTableau> = LazyLock::new(|| {
    NystromTableau::new(
        "RKN4",
        4,
        vec![0.0, 0.5, 1.0],
        vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0 / 8.0, 0.0, 0.0],
            vec![0.0, 1.0 / 2.0, 0.0],
        ],
        vec![1.0 / 6.0, 1.0 / 3.0, 0.0],
        vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    )
    .expect("RKN4 coefficients are well formed")
});

static RKN5: LazyLock<NystromTableau> = LazyLock::new(|| {
    NystromTableau::new(
        "RKN5",
        5,
        vec![0.0, 1.0 / 5.0, 2.0 / 3.0, 1.0],
        vec![
            vec![0.0, 0.0, 0.0, 0.0],
            vec![1.0 / 50.0, 0.0, 0.0, 0.0],
            vec![-1.0 / 27.0, 7.0 / 27.0, 0.0, 0.0],
            vec![3.0 / 10.0, -2.0 / 35.0, 9.0 / 35.0, 0.0],
        ],
        vec![14.0 / 336.0, 100.0 / 336.0, 54.0 / 336.0, 0.0],
        vec![14.0 / 336.0, 125.0 / 336.0, 162.0 / 336.0, 35.0 / 336.0],
    )
    .expect("RKN5 coefficients are well formed")
});

static RKN10: LazyLock<NystromTableau> = LazyLock::new(|| {
    let m = rkn10::STAGES;
    let mut a = vec![vec![0.0; m]; m];
    let mut lower = rkn10::A_LOWER.iter();
    for (p, row) in a.iter_mut().enumerate() {
        for entry in row.iter_mut().take(p) {
            *entry = *lower.next().expect("lower triangle has m(m-1)/2 entries");
        }
    }
    debug_assert!(lower.next().is_none());
    NystromTableau::new(
        "RKN10",
        10,
        rkn10::C.to_vec(),
        a,
        rkn10::B.to_vec(),
        rkn10::BHAT.to_vec(),
    )
    .expect("RKN10 coefficients are well formed")
});

/// Three-stage fourth-order method.
pub fn rkn4() -> &'static NystromTableau {
    &RKN4
}

/// Four-stage fifth-order method.
pub fn rkn5() -> &'static NystromTableau {
    &RKN5
}

/// 26-stage tenth-order method: the explicit midpoint rule extrapolated in
/// `h^2` over substep counts 2, 4, 6, 8, 10, rewritten in Nyström form.
/// Coefficients are generated by `scripts/gen_rkn10.py` from exact rationals.
pub fn rkn10() -> &'static NystromTableau {
    &RKN10
}

/// Outcome of one structural check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tableau: String,
    pub checks: Vec<Check>,
    /// Whether `b[p] = bhat[p] (1 - c[p])` holds for all stages. Informational.
    pub simplifying_relation: bool,
    pub simplifying_residual: f64,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}:", self.tableau)?;
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "  {:<14} {status}  residual {:.3e}", c.name, c.residual)?;
        }
        write!(
            f,
            "  b = bhat(1-c)  {}  residual {:.3e}",
            if self.simplifying_relation {
                "yes"
            } else {
                "no"
            },
            self.simplifying_residual
        )
    }
}

fn explicitness_residual(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .enumerate()
        .flat_map(|(p, row)| row.iter().skip(p))
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Reports every structural invariant of `t` with its measured residual.
/// Never fails; failures are entries in the report.
pub fn validate(t: &NystromTableau) -> ValidationReport {
    let m = t.stages();
    let shape_ok = t.a.len() == m
        && t.a.iter().all(|row| row.len() == m)
        && t.b.len() == m
        && t.bhat.len() == m;

    let explicit = explicitness_residual(&t.a);
    let bhat_sum = (t.bhat.iter().sum::<f64>() - 1.0).abs();
    let b_sum = (t.b.iter().sum::<f64>() - 0.5).abs();

    let simplifying_residual =
        t.b.iter()
            .zip(&t.bhat)
            .zip(&t.c)
            .fold(0.0_f64, |acc, ((b, bh), c)| {
                acc.max((b - bh * (1.0 - c)).abs())
            });

    ValidationReport {
        tableau: t.name.clone(),
        checks: vec![
            Check {
                name: "shape",
                passed: shape_ok,
                residual: if shape_ok { 0.0 } else { 1.0 },
            },
            Check {
                name: "explicit",
                passed: explicit == 0.0,
                residual: explicit,
            },
            Check {
                name: "sum(bhat) = 1",
                passed: bhat_sum <= CONSISTENCY_TOL,
                residual: bhat_sum,
            },
            Check {
                name: "sum(b) = 1/2",
                passed: b_sum <= CONSISTENCY_TOL,
                residual: b_sum,
            },
        ],
        simplifying_relation: simplifying_residual <= CONSISTENCY_TOL,
        simplifying_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_stage_counts() {
        assert_eq!(builtin("RKN4").unwrap().stages(), 3);
        assert_eq!(builtin("RKN5").unwrap().stages(), 4);
        assert_eq!(builtin("rkn10").unwrap().stages(), 26);
    }

    #[test]
    fn unknown_method() {
        assert_eq!(
            builtin("RKN7").unwrap_err(),
            Error::UnknownMethod("RKN7".into())
        );
    }

    #[test]
    fn builtins_validate() {
        for m in Method::ALL {
            let report = validate(m.tableau());
            assert!(report.all_passed(), "{report}");
            assert!(m.tableau().is_explicit());
        }
    }

    #[test]
    fn rkn4_and_rkn5_satisfy_simplifying_relation() {
        assert!(validate(rkn4()).simplifying_relation);
        assert!(validate(rkn5()).simplifying_relation);
    }

    #[test]
    fn single_stage_tableau_passes() {
        let t = NystromTableau::new("euler", 1, vec![0.0], vec![vec![0.0]], vec![0.5], vec![1.0])
            .unwrap();
        let r = validate(&t);
        assert!(r.all_passed());
        assert_eq!(r.check("sum(b) = 1/2").unwrap().residual, 0.0);
    }

    #[test]
    fn upper_entry_breaks_explicitness() {
        let mut a = rkn4().a().to_vec();
        a[0][1] = 0.3;
        let t = NystromTableau::new(
            "bad",
            4,
            rkn4().c().to_vec(),
            a,
            rkn4().b().to_vec(),
            rkn4().bhat().to_vec(),
        )
        .unwrap();
        let r = validate(&t);
        let check = r.check("explicit").unwrap();
        assert!(!check.passed);
        assert_eq!(check.residual, 0.3);
        assert!(!r.all_passed());
    }

    #[test]
    fn diagonal_entry_breaks_explicitness() {
        let t = NystromTableau::new("diag", 1, vec![0.0], vec![vec![0.25]], vec![0.5], vec![1.0])
            .unwrap();
        assert!(!validate(&t).check("explicit").unwrap().passed);
    }

    #[test]
    fn inconsistent_weights_are_reported() {
        let t = NystromTableau::new("skew", 1, vec![0.0], vec![vec![0.0]], vec![0.4], vec![1.1])
            .unwrap();
        let r = validate(&t);
        assert!(!r.check("sum(b) = 1/2").unwrap().passed);
        assert!(!r.check("sum(bhat) = 1").unwrap().passed);
    }

    #[test]
    fn shape_errors() {
        assert!(NystromTableau::new("e", 1, vec![], vec![], vec![], vec![]).is_err());
        assert!(NystromTableau::new(
            "e",
            1,
            vec![0.0, 1.0],
            vec![vec![0.0; 2]; 2],
            vec![0.5],
            vec![1.0]
        )
        .is_err());
    }
}
