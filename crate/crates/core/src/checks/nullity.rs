//! `(κ, μ)`-nullity fit and the consequences of the nullity condition.

use super::basic::{zero_mat, zero_res};
use super::{rot, CheckReport, Ctx};
use crate::error::{Error, Result};
use crate::fields::const_field;
use crate::jet::MatJet1;
use crate::sampling::{mat_residual, scalar_residual, vec_residual};
use crate::structure::{self, LocalSamples, LocalStructure, HYPOTHESIS_TOL};
use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

/// Below this total `Σ‖hᵢ‖` the `μ` coefficient has no data.
pub const MU_IDENTIFIABLE_MIN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReebFit {
    pub kappa: f64,
    pub mu: Option<f64>,
    pub residual: f64,
}

/// Least-squares `(κ, μ)` for `R_{X,Y}ξᵢ = κA + μB`,
/// `A = η̄(X)f²Y − η̄(Y)f²X`, `B = η̄(Y)hᵢX − η̄(X)hᵢY`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullityFit {
    pub kappa: f64,
    /// `None` when `μ` is unidentifiable.
    pub mu: Option<f64>,
    /// Largest vector residual of the fitted identity.
    pub residual: f64,
    pub mu_identifiable: bool,
    /// Separate fits for each Reeb field.
    pub per_reeb: Vec<ReebFit>,
}

struct Row {
    r: DVector<f64>,
    a: DVector<f64>,
    b: DVector<f64>,
}

fn rows(ls: &LocalStructure, vs: &[DVector<f64>], i: usize) -> Vec<Row> {
    let f2 = &ls.f.val * &ls.f.val;
    let h = &ls.h[i].val;
    (0..vs.len())
        .map(|k| {
            let (x, y) = (rot(vs, k, 0), rot(vs, k, 1));
            let (ex, ey) = (ls.eta_bar(x), ls.eta_bar(y));
            Row {
                r: ls.r(x, y, &ls.xi_v(i)),
                a: &f2 * y * ex - &f2 * x * ey,
                b: h * x * ey - h * y * ex,
            }
        })
        .collect()
}

fn solve(rows: &[&Row], with_mu: bool) -> (f64, Option<f64>, f64) {
    let (mut aa, mut ab, mut bb, mut ar, mut br) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in rows {
        aa += r.a.dot(&r.a);
        ab += r.a.dot(&r.b);
        bb += r.b.dot(&r.b);
        ar += r.a.dot(&r.r);
        br += r.b.dot(&r.r);
    }
    let (kappa, mu) = if with_mu {
        let m = Matrix2::new(aa, ab, ab, bb);
        match m.try_inverse() {
            Some(inv) => {
                let s = inv * Vector2::new(ar, br);
                (s[0], Some(s[1]))
            }
            None => (if aa > 0.0 { ar / aa } else { 0.0 }, None),
        }
    } else {
        (if aa > 0.0 { ar / aa } else { 0.0 }, None)
    };
    let residual = rows
        .iter()
        .map(|r| vec_residual(&r.r, &(&r.a * kappa + &r.b * mu.unwrap_or(0.0))))
        .fold(0.0, structure::nan_max);
    (kappa, mu, residual)
}

pub fn nullity_fit(samples: &LocalSamples) -> Result<NullityFit> {
    if samples.is_empty() {
        return Err(Error::Config("nullity fit needs at least one sample".into()));
    }
    let ca = structure::condition_a(samples);
    if ca.max_residual > HYPOTHESIS_TOL {
        return Err(Error::HypothesisUnmet(format!("condition A residual {:e}", ca.max_residual)));
    }
    let s = samples.locals[0].s;
    let mut per: Vec<Vec<Row>> = (0..s).map(|_| Vec::new()).collect();
    let mut hsum = 0.0;
    for (ls, vs) in samples.iter() {
        for (i, p) in per.iter_mut().enumerate() {
            p.extend(rows(ls, vs, i));
            hsum += ls.h[i].val.norm();
        }
    }
    let ident = hsum >= MU_IDENTIFIABLE_MIN;
    let all: Vec<&Row> = per.iter().flatten().collect();
    let (kappa, mu, residual) = solve(&all, ident);
    let per_reeb = per
        .iter()
        .map(|p| {
            let (kappa, mu, residual) = solve(&p.iter().collect::<Vec<_>>(), ident);
            ReebFit { kappa, mu, residual }
        })
        .collect();
    Ok(NullityFit { kappa, mu, residual, mu_identifiable: ident && mu.is_some(), per_reeb })
}

/// Eigenvalues of the g-self-adjoint part of `t`.
fn sym_eigenvalues(ls: &LocalStructure, t: &DMatrix<f64>) -> Result<Vec<f64>> {
    let l = crate::fields::metric_cholesky(&ls.conn.g, &ls.point)?.l();
    let s = l.transpose() * t * l.clone().try_inverse().ok_or(Error::SingularMetric(vec![]))?.transpose();
    let s = (&s + s.transpose()) * 0.5;
    Ok(s.symmetric_eigen().eigenvalues.iter().copied().collect())
}

/// `P±λ = (h̃² ± λh̃)/(2λ²)`.
fn lambda_projector(ls: &LocalStructure, lambda: f64, sign: f64) -> MatJet1 {
    let ht = &ls.h_tilde[0];
    (&(ht * ht) + &ht.scale(sign * lambda)).scale(0.5 / (lambda * lambda))
}

pub fn kmu_theory(ctx: &Ctx) -> Vec<CheckReport> {
    let hyps = [ctx.nullity_holds(), ctx.condition_a()];
    let fit = ctx.nullity();
    let kappa = fit.as_ref().map_or(f64::NAN, |f| f.kappa);
    let lambda = (1.0 - kappa).max(0.0).sqrt();
    let eig_tol = ctx.tol.get("eigen");
    let mut out = vec![ctx.single("kappa at most one", "kappa <= 1", "identity", &hyps, |_, _| {
        Ok(vec![(kappa - 1.0).max(0.0)])
    })];
    out.push(ctx.single(
        "h~ spectrum from kappa",
        "eigenvalues of h~_i lie in {0, sqrt(1-kappa), -sqrt(1-kappa)} with +-lambda paired",
        "eigen",
        &hyps,
        |ls, _| {
            let mut out = Vec::new();
            for i in 0..ls.s {
                let ev = sym_eigenvalues(ls, &ls.h_tilde[i].val)?;
                for e in &ev {
                    out.push([0.0, lambda, -lambda].iter().map(|c| (e - c).abs()).fold(f64::INFINITY, f64::min));
                }
                if lambda > eig_tol {
                    let plus = ev.iter().filter(|e| (*e - lambda).abs() <= eig_tol).count();
                    let minus = ev.iter().filter(|e| (*e + lambda).abs() <= eig_tol).count();
                    out.push(if plus == minus { 0.0 } else { 1.0 });
                }
            }
            Ok(out)
        },
    ));
    out.extend(ctx.multi(
        &[
            ("h~ is the same for every Reeb field under nullity", "h~_i = h~_j"),
            ("h products from kappa", "h_j h_i = (kappa - 1) Q f^2"),
            ("Reeb curvature from kappa", "Q R_{xi_i,X} xi_j - f R_{xi_i,fX} xi_j = 2 kappa Q f^2 X"),
        ],
        "identity",
        &hyps,
        |ls, vs| {
            let mut out = Vec::new();
            let (f, q) = (&ls.f.val, &ls.q.val);
            let qf2 = q * f * f;
            for i in 0..ls.s {
                let xi_i = ls.xi_v(i);
                for j in 0..ls.s {
                    out.push((0, mat_residual(&ls.h_tilde[i].val, &ls.h_tilde[j].val)));
                    out.push((1, mat_residual(&(&ls.h[j].val * &ls.h[i].val), &(&qf2 * (kappa - 1.0)))));
                    let xi_j = ls.xi_v(j);
                    for x in vs {
                        let lhs = q * ls.r(&xi_i, x, &xi_j) - f * ls.r(&xi_i, &(f * x), &xi_j);
                        out.push((2, vec_residual(&lhs, &(&qf2 * x * (2.0 * kappa)))));
                    }
                }
            }
            Ok(out)
        },
    ));
    let mut with_b = hyps.to_vec();
    with_b.push(ctx.condition_b());
    with_b.push(super::Ctx::flag("lambda = sqrt(1 - kappa) > 0", lambda > eig_tol));
    out.extend(ctx.multi(
        &[
            (
                "eigen-distributions of h~ are involutive",
                "brackets of fields in D(lambda) (resp. D(-lambda)) have no D(-+lambda) or Reeb component",
            ),
            (
                "nabla Phi on eigen-distributions",
                "-(1 +- lambda)(nabla_Z Phi)(X,Y) -+ 2 lambda g(f[X,Y], Z) = 0 for X,Y,Z in D(+-lambda)",
            ),
        ],
        "foliation",
        &with_b,
        |ls, vs| {
            let mut out = Vec::new();
            for sign in [1.0, -1.0] {
                let p = lambda_projector(ls, lambda, sign);
                let po = lambda_projector(ls, lambda, -sign);
                for k in 0..vs.len() {
                    let x = &p * &const_field(rot(vs, k, 0));
                    let y = &p * &const_field(rot(vs, k, 1));
                    let z = &p.val * rot(vs, k, 2);
                    let br = crate::fields::bracket(&x, &y);
                    out.push((0, zero_res(&(&po.val * &br))));
                    for i in 0..ls.s {
                        out.push((0, scalar_residual(ls.eta_at(i, &br), 0.0)));
                    }
                    let (xv, yv) = (crate::fields::as_dvec(&x.val), crate::fields::as_dvec(&y.val));
                    let v = -(1.0 + sign * lambda) * ls.nabla_phi(&z, &xv, &yv)
                        - sign * 2.0 * lambda * ls.gv(&ls.fv(&br), &z);
                    out.push((1, scalar_residual(v, 0.0)));
                }
            }
            Ok(out)
        },
    ));
    out
}

pub fn kappa_one(ctx: &Ctx) -> Vec<CheckReport> {
    let kappa = ctx.nullity().map_or(f64::NAN, |f| f.kappa);
    let ntol = ctx.tol.get("nullity");
    let hyps = [
        ctx.nullity_holds(),
        super::Ctx::flag("fitted kappa = 1", (kappa - 1.0).abs() <= ntol),
        ctx.condition_a(),
        ctx.condition_b(),
    ];
    ctx.multi(
        &[
            ("h vanishes when kappa = 1", "h_i = 0"),
            ("Reeb fields are Killing when kappa = 1", "g(nabla_Y xi_i, X) + g(nabla_X xi_i, Y) = 0"),
            ("curvature on xi through nabla f", "(nabla_X f)Y - (nabla_Y f)X = -R_{X,Y} xi_i"),
            ("normality when kappa = 1", "N1 = 0"),
            ("torsion of f when kappa = 1", "[f,f](X,Y) = -2 Phi(X,Y) xi_bar"),
            (
                "torsion of f through nabla f^2",
                "[f,f](X,Y) = (nabla_Y f^2)X - (nabla_X f^2)Y + eta_bar(Y) f^3 X - eta_bar(X) f^3 Y",
            ),
            ("second derivative of a Killing Reeb field", "nabla_X nabla_Y xi_i - nabla_{nabla_X Y} xi_i = R_{X,xi_i} Y"),
            ("S-manifold", "h = 0, xi Killing, curvature on xi through nabla f and N1 = 0 together"),
        ],
        "identity",
        &hyps,
        |ls, vs| {
            let mut out = Vec::new();
            let mut worst = 0.0f64;
            let f2 = &ls.f * &ls.f;
            let f3 = &f2.val * &ls.f.val;
            for i in 0..ls.s {
                let r = zero_mat(&ls.h[i].val);
                out.push((0, r));
                worst = worst.max(r);
                let gn = &ls.conn.g * &ls.nabla_xi[i].val;
                let r = zero_mat(&(&gn + gn.transpose()));
                out.push((1, r));
                worst = worst.max(r);
            }
            for k in 0..vs.len() {
                let (x, y) = (rot(vs, k, 0), rot(vs, k, 1));
                let d = ls.nabla_f(x) * y - ls.nabla_f(y) * x;
                for i in 0..ls.s {
                    let r = vec_residual(&d, &-ls.r(x, y, &ls.xi_v(i)));
                    out.push((2, r));
                    worst = worst.max(r);
                    out.push((6, vec_residual(&ls.second_nabla_xi(i, x, y), &ls.r(x, &ls.xi_v(i), y))));
                }
                let r = zero_res(&ls.n1(x, y));
                out.push((3, r));
                worst = worst.max(r);
                let ff = ls.ff(x, y);
                out.push((4, vec_residual(&ff, &(ls.xi_bar() * (-2.0 * ls.phi_at(x, y))))));
                let rhs = ls.conn.nabla11(&f2, y) * x - ls.conn.nabla11(&f2, x) * y + &f3 * x * ls.eta_bar(y)
                    - &f3 * y * ls.eta_bar(x);
                out.push((5, vec_residual(&ff, &rhs)));
            }
            out.push((7, worst));
            Ok(out)
        },
    )
}
