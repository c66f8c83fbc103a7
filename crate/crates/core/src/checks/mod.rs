//! Named residual checks over a seeded sample set.
//!
//! Every check evaluates one identity at all sample points (and at rotated
//! tuples of the random tangent vectors drawn there). Conditional identities
//! carry their hypotheses as predicates; an unmet hypothesis yields
//! [`Verdict::Skipped`] and no residual.

mod basic;
mod curvature;
mod engine;
mod flags;
mod foliation;
mod nullity;

pub use flags::flags;
pub use foliation::NONFLAT_BOUND;
pub use nullity::{nullity_fit, NullityFit};

use crate::error::{Error, Result};
use crate::examples::ExampleConfig;
use crate::sampling::SampleSet;
use crate::structure::{self, LocalSamples, LocalStructure, Predicate, WeakFStructure};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::cell::OnceCell;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
    /// The statement has no instances at this dimension.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    /// The identity being checked, in plain notation.
    pub statement: String,
    pub hypotheses: Vec<Predicate>,
    pub samples: usize,
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// A structural finding attached to a report: a value the suite computed
/// next to the value a printed formula would give.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub name: String,
    pub detail: String,
    pub values: BTreeMap<String, f64>,
}

/// Named tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tolerances(pub BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        let pairs = [
            ("axiom", 1e-9),
            ("consistency", 1e-9),
            ("eigen", 1e-6),
            ("example", 1e-10),
            ("fd_curv", 1e-5),
            ("fd_grad", 1e-6),
            ("fd_hess", 1e-4),
            ("foliation", 1e-7),
            ("hypothesis", 1e-9),
            ("identity", 1e-8),
            ("nullity", 1e-6),
        ];
        Tolerances(pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or_else(|| panic!("unknown tolerance '{name}'"))
    }

    /// Overrides known names; unknown names and nonpositive values are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.0.contains_key(name) {
            let known: Vec<&str> = self.0.keys().map(String::as_str).collect();
            return Err(Error::Config(format!("unknown tolerance '{name}' (known: {})", known.join(", "))));
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Config(format!("tolerance '{name}' must be positive, got {value}")));
        }
        self.0.insert(name.into(), value);
        Ok(())
    }

    pub fn merged(overrides: &BTreeMap<String, f64>) -> Result<Self> {
        let mut t = Tolerances::default();
        for (k, v) in overrides {
            t.set(k, *v)?;
        }
        Ok(t)
    }
}

/// Shared state for one run: the structure, its local data at every sample
/// point and the lazily evaluated hypothesis predicates.
pub struct Ctx<'a> {
    pub st: &'a WeakFStructure,
    pub example: Option<&'a ExampleConfig>,
    pub samples: &'a SampleSet,
    pub locals: LocalSamples,
    pub tol: Tolerances,
    pub seed: u64,
    was: OnceCell<Predicate>,
    cond_a: OnceCell<Predicate>,
    cond_b: OnceCell<Predicate>,
    reeb_flat: OnceCell<Predicate>,
    fit: OnceCell<std::result::Result<NullityFit, String>>,
}

impl<'a> Ctx<'a> {
    pub fn new(
        st: &'a WeakFStructure,
        example: Option<&'a ExampleConfig>,
        samples: &'a SampleSet,
        tol: Tolerances,
        seed: u64,
    ) -> Result<Self> {
        Ok(Ctx {
            st,
            example,
            samples,
            locals: LocalSamples::new(st, samples)?,
            tol,
            seed,
            was: OnceCell::new(),
            cond_a: OnceCell::new(),
            cond_b: OnceCell::new(),
            reeb_flat: OnceCell::new(),
            fit: OnceCell::new(),
        })
    }

    fn retol(&self, p: Predicate) -> Predicate {
        Predicate::new(&p.name, p.max_residual, self.tol.get("hypothesis"))
    }

    pub fn weak_almost_s(&self) -> Predicate {
        self.was.get_or_init(|| self.retol(structure::weak_almost_s(&self.locals))).clone()
    }

    pub fn condition_a(&self) -> Predicate {
        self.cond_a.get_or_init(|| self.retol(structure::condition_a(&self.locals))).clone()
    }

    pub fn condition_b(&self) -> Predicate {
        self.cond_b.get_or_init(|| self.retol(structure::condition_b(&self.locals))).clone()
    }

    pub fn reeb_flat(&self) -> Predicate {
        self.reeb_flat.get_or_init(|| self.retol(structure::reeb_flat(&self.locals))).clone()
    }

    pub fn nullity(&self) -> std::result::Result<NullityFit, String> {
        self.fit.get_or_init(|| nullity_fit(&self.locals).map_err(|e| e.to_string())).clone()
    }

    /// `nullity residual ≤ tol`, as a predicate.
    pub fn nullity_holds(&self) -> Predicate {
        let r = self.nullity().map_or(f64::INFINITY, |f| f.residual);
        Predicate::new("(kappa, mu)-nullity fit residual", r, self.tol.get("nullity"))
    }

    /// A predicate that holds exactly when `ok`.
    pub fn flag(name: &str, ok: bool) -> Predicate {
        Predicate::new(name, if ok { 0.0 } else { 1.0 }, 0.5)
    }

    /// One report per statement, accumulating residuals returned per point.
    ///
    /// `per_point` yields `(index, residual)` pairs where `index` selects one
    /// of `statements`.
    pub fn multi(
        &self,
        statements: &[(&str, &str)],
        tol_name: &str,
        hypotheses: &[Predicate],
        mut per_point: impl FnMut(&LocalStructure, &[DVector<f64>]) -> Result<Vec<(usize, f64)>>,
    ) -> Vec<CheckReport> {
        let tol = self.tol.get(tol_name);
        let n = self.locals.len();
        if hypotheses.iter().any(|h| !h.holds) {
            return statements.iter().map(|(name, st)| skipped(name, st, hypotheses, n, tol)).collect();
        }
        let mut acc = vec![Acc::default(); statements.len()];
        for (ls, vs) in self.locals.iter() {
            match per_point(ls, vs) {
                Ok(rs) => rs.into_iter().for_each(|(k, r)| acc[k].push(r)),
                Err(e) => {
                    return statements
                        .iter()
                        .map(|(name, st)| errored(name, st, hypotheses, n, tol, &e))
                        .collect();
                }
            }
        }
        statements.iter().zip(acc).map(|((name, st), a)| a.report(name, st, hypotheses, n, tol)).collect()
    }

    pub fn single(
        &self,
        name: &str,
        statement: &str,
        tol_name: &str,
        hypotheses: &[Predicate],
        mut per_point: impl FnMut(&LocalStructure, &[DVector<f64>]) -> Result<Vec<f64>>,
    ) -> CheckReport {
        self.multi(&[(name, statement)], tol_name, hypotheses, |ls, vs| {
            Ok(per_point(ls, vs)?.into_iter().map(|r| (0, r)).collect())
        })
        .remove(0)
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Acc {
    max: f64,
    sum: f64,
    count: usize,
}

impl Acc {
    pub(crate) fn push(&mut self, r: f64) {
        self.max = structure::nan_max(self.max, r);
        self.sum += r;
        self.count += 1;
    }

    pub(crate) fn report(&self, name: &str, statement: &str, hyps: &[Predicate], samples: usize, tol: f64) -> CheckReport {
        let mean = if self.count > 0 { self.sum / self.count as f64 } else { 0.0 };
        let pass = self.max <= tol && hyps.iter().all(|h| h.holds);
        CheckReport {
            name: name.into(),
            statement: statement.into(),
            hypotheses: hyps.to_vec(),
            samples,
            max_residual: Some(self.max),
            mean_residual: Some(mean),
            tolerance: tol,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            note: if self.max.is_nan() { Some("NaN residual".into()) } else { None },
        }
    }
}

pub(crate) fn skipped(name: &str, statement: &str, hyps: &[Predicate], samples: usize, tol: f64) -> CheckReport {
    let unmet: Vec<&str> = hyps.iter().filter(|h| !h.holds).map(|h| h.name.as_str()).collect();
    CheckReport {
        name: name.into(),
        statement: statement.into(),
        hypotheses: hyps.to_vec(),
        samples,
        max_residual: None,
        mean_residual: None,
        tolerance: tol,
        verdict: Verdict::Skipped,
        note: Some(format!("hypothesis unmet: {}", unmet.join("; "))),
    }
}

pub(crate) fn vacuous(name: &str, statement: &str, hyps: &[Predicate], samples: usize, tol: f64, why: &str) -> CheckReport {
    CheckReport {
        name: name.into(),
        statement: statement.into(),
        hypotheses: hyps.to_vec(),
        samples,
        max_residual: None,
        mean_residual: None,
        tolerance: tol,
        verdict: Verdict::Vacuous,
        note: Some(why.into()),
    }
}

fn errored(name: &str, statement: &str, hyps: &[Predicate], samples: usize, tol: f64, e: &Error) -> CheckReport {
    CheckReport {
        name: name.into(),
        statement: statement.into(),
        hypotheses: hyps.to_vec(),
        samples,
        max_residual: None,
        mean_residual: None,
        tolerance: tol,
        verdict: Verdict::Fail,
        note: Some(e.to_string()),
    }
}

/// The `j`-th vector after `k` in the cyclic list `vs`.
pub(crate) fn rot(vs: &[DVector<f64>], k: usize, j: usize) -> &DVector<f64> {
    &vs[(k + j) % vs.len()]
}

type Group = fn(&Ctx) -> Vec<CheckReport>;

/// Check groups in execution order.
pub const GROUPS: &[(&str, Group)] = &[
    ("axioms", basic::axioms),
    ("example", basic::example),
    ("reeb_geometry", basic::reeb_geometry),
    ("nabla_f_formula", basic::nabla_f_formula),
    ("h_tensor", basic::h_tensor),
    ("splitting", basic::splitting),
    ("reeb_curvature", curvature::reeb_curvature),
    ("q_parallel", curvature::q_parallel),
    ("nabla_f_full", curvature::nabla_f_full),
    ("reeb_curvature_formula", curvature::reeb_curvature_formula),
    ("reeb_curvature_long", curvature::reeb_curvature_long),
    ("eigen_distributions", foliation::eigen_distributions),
    ("foliation", foliation::foliation),
    ("three_dim_frame", foliation::three_dim_frame),
    ("nullity", nullity::kmu_theory),
    ("kappa_one", nullity::kappa_one),
    ("engine", engine::engine),
];

pub fn group_names() -> Vec<&'static str> {
    GROUPS.iter().map(|(n, _)| *n).collect()
}

/// Runs the named groups (or every group for `["all"]`) in registry order.
pub fn run_groups(ctx: &Ctx, names: &[String]) -> Result<Vec<CheckReport>> {
    if names.is_empty() {
        return Err(Error::Config("check list is empty".into()));
    }
    let all = names.iter().any(|n| n == "all");
    for n in names {
        if n != "all" && !GROUPS.iter().any(|(g, _)| g == n) {
            return Err(Error::Config(format!("unknown check '{n}' (known: all, {})", group_names().join(", "))));
        }
    }
    Ok(GROUPS
        .iter()
        .filter(|(g, _)| all || names.iter().any(|n| n == g))
        .flat_map(|(_, run)| run(ctx))
        .collect())
}
