//! The weak metric f-structure `(f, Q, ξᵢ, η^i, g)` and its structure tensors.

mod eigen;
mod local;

pub use eigen::{eigen_split, EigenSplit};
pub use local::LocalStructure;

use crate::connection::op_norm_tensor;
use crate::error::{Error, Result};
use crate::fields::{const_field, d2, MetricField, OneForm, Tensor11, TwoForm, VectorField};
use crate::jet::{ChartSpec, MatJet1, Point, ScalarField};
use crate::sampling::{mat_residual, scalar_residual, vec_residual, SampleSet};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Tolerance for the structure axioms.
pub const AXIOM_TOL: f64 = 1e-9;
/// Tolerance for the predicates that gate conditional checks.
pub const HYPOTHESIS_TOL: f64 = 1e-9;
/// Singular values of `f` above this count towards its rank.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct WeakFStructure {
    pub n: usize,
    pub s: usize,
    pub chart: ChartSpec,
    pub f: Tensor11,
    pub q: Tensor11,
    pub xi: Vec<VectorField>,
    pub eta: Vec<OneForm>,
    pub g: MetricField,
}

/// Outcome of a boolean predicate evaluated over samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub name: String,
    pub holds: bool,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl Predicate {
    pub fn new(name: &str, max_residual: f64, tolerance: f64) -> Self {
        Predicate { name: name.into(), holds: max_residual <= tolerance, max_residual, tolerance }
    }
}

/// Per-axiom maximum residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub entries: Vec<Predicate>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.max_residual).fold(0.0, nan_max)
    }
}

/// Taxonomy flags: weak almost K/C/S, ξ-Killing per Reeb field, normality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub weak_almost_k: Predicate,
    pub weak_almost_c: Predicate,
    pub weak_almost_s: Predicate,
    pub xi_killing: Vec<Predicate>,
    pub normal: Predicate,
}

impl Classification {
    pub fn flags(&self) -> Vec<&Predicate> {
        let mut v = vec![&self.weak_almost_k, &self.weak_almost_c, &self.weak_almost_s];
        v.extend(self.xi_killing.iter());
        v.push(&self.normal);
        v
    }
}

/// Which of the tensors `N⁽¹⁾..N⁽⁵⁾` to evaluate, with its arguments.
#[derive(Debug, Clone, PartialEq)]
pub enum NTensor {
    N1(DVector<f64>, DVector<f64>),
    N2(usize, DVector<f64>, DVector<f64>),
    N3(usize, DVector<f64>),
    N4(usize, usize, DVector<f64>),
    N5(DVector<f64>, DVector<f64>, DVector<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NValue {
    Vector(DVector<f64>),
    Scalar(f64),
}

/// A sample set with the local structure already evaluated at every point.
#[derive(Debug, Clone)]
pub struct LocalSamples {
    pub locals: Vec<LocalStructure>,
    pub vectors: Vec<Vec<DVector<f64>>>,
}

impl LocalSamples {
    pub fn new(st: &WeakFStructure, samples: &SampleSet) -> Result<Self> {
        let locals = samples.points.iter().map(|p| LocalStructure::new(st, p)).collect::<Result<_>>()?;
        Ok(LocalSamples { locals, vectors: samples.vectors.clone() })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LocalStructure, &Vec<DVector<f64>>)> {
        self.locals.iter().zip(&self.vectors)
    }

    pub fn len(&self) -> usize {
        self.locals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locals.is_empty()
    }
}

/// `max` that lets NaN win so a NaN residual can never pass.
pub fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

impl WeakFStructure {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        s: usize,
        chart: ChartSpec,
        f: Tensor11,
        q: Tensor11,
        xi: Vec<VectorField>,
        eta: Vec<OneForm>,
        g: MetricField,
    ) -> Result<Self> {
        if n == 0 || s == 0 {
            return Err(Error::Config("n and s must be positive".into()));
        }
        let dim = 2 * n + s;
        let ok = chart.dim == dim
            && f.dim() == dim
            && q.dim() == dim
            && g.dim() == dim
            && xi.len() == s
            && eta.len() == s
            && xi.iter().all(|v| v.dim() == dim)
            && eta.iter().all(|e| e.dim() == dim);
        if !ok {
            return Err(Error::Shape(format!("structure components do not match dim 2n+s = {dim} with s = {s}")));
        }
        Ok(WeakFStructure { n, s, chart, f, q, xi, eta, g })
    }

    pub fn dim(&self) -> usize {
        2 * self.n + self.s
    }

    pub fn local(&self, p: &Point) -> Result<LocalStructure> {
        LocalStructure::new(self, p)
    }

    /// Pointwise residuals of every structure axiom.
    pub fn validate(&self, samples: &SampleSet) -> Result<AxiomReport> {
        validate_local(&LocalSamples::new(self, samples)?)
    }

    /// `Φ(X,Y) = g(X, fY)` as a symbolic 2-form.
    pub fn fundamental_form(&self) -> TwoForm {
        let d = self.dim();
        TwoForm::from_upper(d, |a, b| ScalarField::sum((0..d).map(|c| self.g.get(a, c) * self.f.get(c, b))))
    }

    pub fn n_tensor(&self, which: &NTensor, p: &Point) -> Result<NValue> {
        let ls = self.local(p)?;
        Ok(match which {
            NTensor::N1(x, y) => NValue::Vector(ls.n1(x, y)),
            NTensor::N2(i, x, y) => NValue::Scalar(ls.n2(self.reeb(*i)?, x, y)),
            NTensor::N3(i, x) => NValue::Vector(ls.n3(self.reeb(*i)?, x)),
            NTensor::N4(i, j, x) => NValue::Scalar(ls.n4(self.reeb(*i)?, self.reeb(*j)?, x)),
            NTensor::N5(x, y, z) => NValue::Scalar(ls.n5(x, y, z)),
        })
    }

    /// `hᵢ X = ½ (£_{ξᵢ} f) X`.
    pub fn h_tensor(&self, i: usize, x: &DVector<f64>, p: &Point) -> Result<DVector<f64>> {
        let ls = self.local(p)?;
        Ok(&ls.h[self.reeb(i)?].val * x)
    }

    /// `C_{ξᵢ}(X) = −(∇_X ξᵢ)^⊤`.
    pub fn splitting_tensor(&self, i: usize, x: &DVector<f64>, p: &Point) -> Result<DVector<f64>> {
        self.local(p)?.splitting(self.reeb(i)?, x, AXIOM_TOL)
    }

    pub fn condition_a(&self, samples: &SampleSet) -> Result<Predicate> {
        Ok(condition_a(&LocalSamples::new(self, samples)?))
    }

    pub fn condition_b(&self, samples: &SampleSet) -> Result<Predicate> {
        Ok(condition_b(&LocalSamples::new(self, samples)?))
    }

    pub fn classify(&self, samples: &SampleSet) -> Result<Classification> {
        Ok(classify(&LocalSamples::new(self, samples)?))
    }

    pub fn eigen_split(&self, i: usize, p: &Point) -> Result<EigenSplit> {
        eigen_split(&self.local(p)?, self.reeb(i)?, eigen::CLUSTER_TOL)
    }

    fn reeb(&self, i: usize) -> Result<usize> {
        if i < self.s {
            Ok(i)
        } else {
            Err(Error::Shape(format!("Reeb index {i} out of range for s = {}", self.s)))
        }
    }
}

/// `[S,S](X,Y)` by the bracket formula.
pub fn nijenhuis(s: &Tensor11, x: &VectorField, y: &VectorField, p: &Point) -> Result<DVector<f64>> {
    Ok(LocalStructure::nijenhuis_bracket(&s.jet(p)?.to_jet1(), &x.jet(p)?.to_jet1(), &y.jet(p)?.to_jet1()))
}

fn sum_outer(ls: &LocalStructure) -> DMatrix<f64> {
    (0..ls.s).fold(DMatrix::zeros(ls.dim, ls.dim), |acc, i| acc + &ls.xi[i].val * &ls.eta[i].val)
}

fn sum_eta_eta(ls: &LocalStructure) -> DMatrix<f64> {
    (0..ls.s).fold(DMatrix::zeros(ls.dim, ls.dim), |acc, i| acc + ls.eta[i].val.transpose() * &ls.eta[i].val)
}

pub fn validate_local(samples: &LocalSamples) -> Result<AxiomReport> {
    let names = [
        "f^2 = -Q + sum eta^i (x) xi_i",
        "eta^i(xi_j) = delta_ij",
        "Q xi_i = xi_i",
        "g(fX,fY) = g(X,QY) - sum eta^i(X) eta^i(Y)",
        "f xi_i = 0",
        "eta^i o f = 0",
        "eta^i o Q = eta^i",
        "[Q,f] = 0",
        "f skew-adjoint",
        "Q self-adjoint",
        "Q positive definite",
        "rank f = 2n",
    ];
    let mut worst = [0.0f64; 12];
    for ls in &samples.locals {
        let (f, q, g) = (&ls.f.val, &ls.q.val, &ls.conn.g);
        let d = ls.dim;
        let mut r = [0.0f64; 12];
        r[0] = mat_residual(&(f * f), &(-q + sum_outer(ls)));
        let mut delta: f64 = 0.0;
        let mut qxi: f64 = 0.0;
        let mut fxi: f64 = 0.0;
        let mut ef: f64 = 0.0;
        let mut eq: f64 = 0.0;
        for i in 0..ls.s {
            let xi = ls.xi_v(i);
            for j in 0..ls.s {
                let e = ls.eta_at(i, &ls.xi_v(j)) - if i == j { 1.0 } else { 0.0 };
                delta = nan_max(delta, e.abs());
            }
            qxi = nan_max(qxi, vec_residual(&(q * &xi), &xi));
            fxi = nan_max(fxi, vec_residual(&(f * &xi), &DVector::zeros(d)));
            ef = nan_max(ef, mat_residual(&(&ls.eta[i].val * f), &DMatrix::zeros(1, d)));
            eq = nan_max(eq, mat_residual(&(&ls.eta[i].val * q), &ls.eta[i].val));
        }
        r[1] = delta;
        r[2] = qxi;
        r[3] = mat_residual(&(f.transpose() * g * f), &(g * q - sum_eta_eta(ls)));
        r[4] = fxi;
        r[5] = ef;
        r[6] = eq;
        r[7] = mat_residual(&(q * f), &(f * q));
        let gf = g * f;
        r[8] = mat_residual(&gf, &(-gf.transpose()));
        let gq = g * q;
        r[9] = mat_residual(&gq, &gq.transpose());
        // positive definite: smallest eigenvalue of the symmetric part of GQ relative to G
        let l = ls.conn.g.clone().cholesky().ok_or_else(|| Error::SingularMetric(ls.point.coords.clone()))?;
        let linv = l.l().try_inverse().ok_or_else(|| Error::SingularMetric(ls.point.coords.clone()))?;
        let sym = &linv * ((&gq + gq.transpose()) * 0.5) * linv.transpose();
        let min_ev = sym.symmetric_eigenvalues().min();
        r[10] = if min_ev > 0.0 { 0.0 } else { 1.0 - min_ev };
        let rank = (l.l().transpose() * f * linv.transpose()).singular_values().iter().filter(|&&sv| sv > RANK_TOL).count();
        r[11] = if rank == 2 * ls.n { 0.0 } else { 1.0 };
        for k in 0..12 {
            worst[k] = nan_max(worst[k], r[k]);
        }
    }
    Ok(AxiomReport { entries: names.iter().zip(worst).map(|(n, w)| Predicate::new(n, w, AXIOM_TOL)).collect() })
}

/// `£_{ξᵢ} Q = 0` for all i.
pub fn condition_a(samples: &LocalSamples) -> Predicate {
    let mut worst = 0.0;
    for ls in &samples.locals {
        for l in &ls.lie_q {
            worst = nan_max(worst, mat_residual(&l.val, &DMatrix::zeros(ls.dim, ls.dim)));
        }
    }
    Predicate::new("condition A: Lie_xi Q = 0", worst, HYPOTHESIS_TOL)
}

/// `(∇_X Q) Y = 0` for `X, Y ∈ 𝒟`.
pub fn condition_b(samples: &LocalSamples) -> Predicate {
    let mut worst = 0.0;
    for (ls, vs) in samples.iter() {
        let d: Vec<_> = vs.iter().map(|v| ls.proj_d(v)).collect();
        for (k, x) in d.iter().enumerate() {
            let y = &d[(k + 1) % d.len()];
            worst = nan_max(worst, vec_residual(&(ls.nabla_q(x) * y), &DVector::zeros(ls.dim)));
        }
    }
    Predicate::new("condition B: (nabla_X Q)Y = 0 on D", worst, HYPOTHESIS_TOL)
}

/// `R_{X,Y} ξᵢ = 0` for all X, Y and i.
pub fn reeb_flat(samples: &LocalSamples) -> Predicate {
    let mut worst = 0.0;
    for (ls, vs) in samples.iter() {
        for i in 0..ls.s {
            for k in 0..vs.len() {
                let r = ls.r(&vs[k], &vs[(k + 1) % vs.len()], &ls.xi_v(i));
                worst = nan_max(worst, vec_residual(&r, &DVector::zeros(ls.dim)));
            }
        }
    }
    Predicate::new("R(X,Y)xi_i = 0", worst, HYPOTHESIS_TOL)
}

/// `Φ = dη^i` for all i.
pub fn weak_almost_s(samples: &LocalSamples) -> Predicate {
    let mut worst = 0.0;
    for ls in &samples.locals {
        for de in &ls.d_eta {
            worst = nan_max(worst, mat_residual(&ls.phi.val, de));
        }
    }
    Predicate::new("weak almost S: Phi = d eta^i", worst, HYPOTHESIS_TOL)
}

pub fn classify(samples: &LocalSamples) -> Classification {
    const TOL: f64 = 1e-8;
    let mut dphi = 0.0;
    let mut deta = 0.0;
    let mut normal = 0.0;
    let s = samples.locals.first().map_or(0, |l| l.s);
    let mut killing = vec![0.0; s];
    for (ls, vs) in samples.iter() {
        for k in 0..vs.len() {
            let (x, y, z) = (&vs[k], &vs[(k + 1) % vs.len()], &vs[(k + 2) % vs.len()]);
            let v = d2(&ls.phi, &const_field(x), &const_field(y), &const_field(z));
            dphi = nan_max(dphi, scalar_residual(v, 0.0));
            normal = nan_max(normal, vec_residual(&ls.n1(x, y), &DVector::zeros(ls.dim)));
        }
        for i in 0..ls.s {
            deta = nan_max(deta, mat_residual(&ls.d_eta[i], &DMatrix::zeros(ls.dim, ls.dim)));
            let gn = &ls.conn.g * &ls.nabla_xi[i].val;
            killing[i] = nan_max(killing[i], mat_residual(&gn, &(-gn.transpose())));
        }
    }
    let was = weak_almost_s(samples);
    Classification {
        weak_almost_k: Predicate::new("weak almost K: d Phi = 0", dphi, TOL),
        weak_almost_c: Predicate::new("weak almost C: d Phi = 0, d eta^i = 0", nan_max(dphi, deta), TOL),
        weak_almost_s: Predicate::new(&was.name, was.max_residual, TOL),
        xi_killing: killing.iter().enumerate().map(|(i, &k)| Predicate::new(&format!("xi_{} Killing", i + 1), k, TOL)).collect(),
        normal: Predicate::new("normal: N1 = 0", normal, TOL),
    }
}

/// `‖T‖` for a (1,1)-tensor jet value at a local structure.
pub fn op_norm(ls: &LocalStructure, t: &MatJet1) -> f64 {
    op_norm_tensor(&ls.conn.g, &t.val)
}
