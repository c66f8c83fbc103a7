//! Eigen-distributions of `h̃` when `R_{X,Y}ξᵢ = 0`, the foliation they
//! induce and the frame calculus in dimension `2 + s`.

use super::basic::{zero_mat, zero_res};
use super::{rot, vacuous, CheckReport, Ctx};
use crate::error::Result;
use crate::fields::{bracket, const_field};
use crate::jet::{Jet1, MatJet1, Point};
use crate::sampling::{scalar_residual, vec_residual};
use crate::structure::{eigen_split, EigenSplit, LocalStructure, Predicate};
use nalgebra::DVector;

/// Lower bound on the curvature norm estimate used for the non-flatness check.
pub const NONFLAT_BOUND: f64 = 3.0;
/// Random orthonormal frames added to the coordinate frame in norm estimates.
const EXTRA_FRAMES: usize = 8;
/// Central-difference step for derivatives of the frame function `u`.
const U_STEP: f64 = 1e-5;

/// `P± = (h̃² ± h̃)/2` as jets, built from the first Reeb field.
fn eigen_projectors(ls: &LocalStructure) -> (MatJet1, MatJet1) {
    let ht = &ls.h_tilde[0];
    let sq = ht * ht;
    ((&sq + ht).scale(0.5), (&sq - ht).scale(0.5))
}

/// Projector jet onto `𝒟⁻ ⊕ ker f`.
fn minus_ker_projector(ls: &LocalStructure) -> MatJet1 {
    let (_, pm) = eigen_projectors(ls);
    (0..ls.s).fold(pm, |acc, i| &acc + &(&ls.xi[i] * &ls.eta[i]))
}

fn unit(ls: &LocalStructure, v: DVector<f64>) -> DVector<f64> {
    let n = ls.conn.norm(&v);
    if n > 1e-12 {
        v / n
    } else {
        v
    }
}

pub fn qtilde_vanishes(ctx: &Ctx) -> Predicate {
    let r = ctx.locals.iter().map(|(ls, _)| ls.conn.op_norm(&ls.q_tilde.val)).fold(0.0, f64::max);
    Predicate::new("Q~ = 0", r, ctx.tol.get("hypothesis"))
}

fn split(ctx: &Ctx, ls: &LocalStructure) -> Result<EigenSplit> {
    eigen_split(ls, 0, ctx.tol.get("eigen"))
}

pub fn eigen_distributions(ctx: &Ctx) -> Vec<CheckReport> {
    let base = [ctx.weak_almost_s(), ctx.reeb_flat(), ctx.condition_a()];
    let mut out = ctx.multi(
        &[
            ("h~ is the same for every Reeb field", "h~_1 = ... = h~_s"),
            ("h~ has spectrum {0, 1, -1}", "eigenvalues of h~ lie in {0, 1, -1}, with 0 exactly on ker f"),
            ("f exchanges D+ and D-", "f D+ = D-, f D- = D+"),
        ],
        "foliation",
        &base,
        |ls, _| {
            let mut out = Vec::new();
            for i in 1..ls.s {
                out.push((0, zero_mat(&(&ls.h_tilde[i].val - &ls.h_tilde[0].val))));
            }
            let es = split(ctx, ls)?;
            for e in &es.eigenvalues {
                let d = [0.0, 1.0, -1.0].iter().map(|c| (e - c).abs()).fold(f64::INFINITY, f64::min);
                out.push((1, d));
            }
            out.push((1, if es.ker.len() == ls.s && es.null.is_empty() { 0.0 } else { 1.0 }));
            let pp = EigenSplit::projector(&ls.conn.g, &es.plus);
            let pm = EigenSplit::projector(&ls.conn.g, &es.minus);
            for v in &es.plus {
                let fv = ls.fv(v);
                out.push((2, vec_residual(&(&pm * &fv), &fv)));
            }
            for v in &es.minus {
                let fv = ls.fv(v);
                out.push((2, vec_residual(&(&pp * &fv), &fv)));
            }
            Ok(out)
        },
    );
    let mut with_b = base.to_vec();
    with_b.push(ctx.condition_b());
    out.extend(ctx.multi(
        &[
            (
                "nabla Phi along h~ on D",
                "4 (nabla_{h~X} Phi)(Y,Z) = (nabla_{Q~Y} Phi)(Z,h~X) + (nabla_{Q~Y} Phi)(h~Z,X) \
                 + (nabla_{Q~Z} Phi)(h~X,Y) + (nabla_{Q~Z} Phi)(X,h~Y) - 3 (nabla_{Q~h~X} Phi)(Y,Z) \
                 - (nabla_Y Phi)(h~Z,Q~X) - (nabla_Z Phi)(Q~X,h~Y) for X,Y,Z in D",
            ),
            ("nabla Phi vanishes on (D-, D+, D-)", "(nabla_X Phi)(Y,Z) = 0 for X,Z in D-, Y in D+"),
            ("nabla Phi vanishes on (D+, D+, D)", "(nabla_X Phi)(Y,Z) = 0 for X,Y in D+, Z in D"),
        ],
        "foliation",
        &with_b,
        |ls, vs| {
            let mut out = Vec::new();
            let ht = &ls.h_tilde[0].val;
            let qt = &ls.q_tilde.val;
            let np = |a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>| ls.nabla_phi(a, b, c);
            let (pp, pm) = eigen_projectors(ls);
            for k in 0..vs.len() {
                let (x, y, z) = (ls.proj_d(rot(vs, k, 0)), ls.proj_d(rot(vs, k, 1)), ls.proj_d(rot(vs, k, 2)));
                let hx = ht * &x;
                let lhs = 4.0 * np(&hx, &y, &z);
                let rhs = np(&(qt * &y), &z, &hx) + np(&(qt * &y), &(ht * &z), &x) + np(&(qt * &z), &hx, &y)
                    + np(&(qt * &z), &x, &(ht * &y))
                    - 3.0 * np(&(qt * &hx), &y, &z)
                    - np(&y, &(ht * &z), &(qt * &x))
                    - np(&z, &(qt * &x), &(ht * &y));
                out.push((0, scalar_residual(lhs, rhs)));
                let (xm, yp, zm) = (&pm.val * &x, &pp.val * &y, &pm.val * &z);
                out.push((1, scalar_residual(np(&xm, &yp, &zm), 0.0)));
                let xp = &pp.val * &x;
                out.push((2, scalar_residual(np(&xp, &yp, &z), 0.0)));
            }
            Ok(out)
        },
    ));
    out
}

pub fn foliation(ctx: &Ctx) -> Vec<CheckReport> {
    let base = [ctx.weak_almost_s(), ctx.reeb_flat(), ctx.condition_a()];
    let mut out = ctx.multi(
        &[
            (
                "D- + ker f is involutive",
                "brackets of fields in D- (+) ker f have no D+ component; brackets of D- fields have no Reeb component",
            ),
            ("D- + ker f is totally geodesic", "g(nabla_X Y + nabla_Y X, D+) = 0 for X,Y in D- (+) ker f"),
            ("D- + ker f has flat leaves", "g(R_{X,Y}Z, W) = 0 for X,Y,Z,W in D- (+) ker f"),
            ("nabla xi on the eigen-distributions", "nabla_X xi_i = -2 fX on D+, nabla_X xi_i = 0 on D-"),
        ],
        "foliation",
        &base,
        |ls, vs| {
            let mut out = Vec::new();
            let (pp, pm) = eigen_projectors(ls);
            let pmk = minus_ker_projector(ls);
            for k in 0..vs.len() {
                let (v, w) = (rot(vs, k, 0), rot(vs, k, 1));
                let x = &pmk * &const_field(v);
                let y = &pmk * &const_field(w);
                let br = bracket(&x, &y);
                out.push((0, zero_res(&(&pp.val * &br))));
                let xm = &pm * &const_field(v);
                let ym = &pm * &const_field(w);
                let brm = bracket(&xm, &ym);
                for i in 0..ls.s {
                    out.push((0, scalar_residual(ls.eta_at(i, &brm), 0.0)));
                }
                let sym = ls.nabla_vec(&y, &crate::fields::as_dvec(&x.val))
                    + ls.nabla_vec(&x, &crate::fields::as_dvec(&y.val));
                out.push((1, zero_res(&(&pp.val * sym))));
                let ms: Vec<DVector<f64>> = (0..4).map(|j| &pmk.val * rot(vs, k, j)).collect();
                out.push((2, scalar_residual(ls.r4(&ms[0], &ms[1], &ms[2], &ms[3]), 0.0)));
                let (xp, xmv) = (&pp.val * v, &pm.val * v);
                for i in 0..ls.s {
                    out.push((3, vec_residual(&ls.nabla_xi_at(i, &xp), &(ls.fv(&xp) * -2.0))));
                    out.push((3, zero_res(&ls.nabla_xi_at(i, &xmv))));
                }
            }
            Ok(out)
        },
    );

    let mut with_b = base.to_vec();
    with_b.push(ctx.condition_b());
    let s = ctx.st.s as f64;
    out.extend(ctx.multi(
        &[
            ("nabla f on D+", "(nabla_X f) Y = 2 g(QX, Y) xi_bar for X,Y in D+"),
            (
                "curvature of D+",
                "g(R_{X,Y}Z,W) = 4s {g(QY,Z) g(QX,W) - g(QY,W) g(QX,Z)} - g(R_{X,Y}Z, Q~W) for X,Y,Z,W in D+",
            ),
        ],
        "foliation",
        &with_b,
        |ls, vs| {
            let mut out = Vec::new();
            let (pp, _) = eigen_projectors(ls);
            let q = &ls.q.val;
            for k in 0..vs.len() {
                let p: Vec<DVector<f64>> = (0..4).map(|j| &pp.val * rot(vs, k, j)).collect();
                let (x, y, z, w) = (&p[0], &p[1], &p[2], &p[3]);
                out.push((0, vec_residual(&(ls.nabla_f(x) * y), &(ls.xi_bar() * (2.0 * ls.gv(&(q * x), y))))));
                let lhs = ls.r4(x, y, z, w);
                let rhs = 4.0 * s * (ls.gv(&(q * y), z) * ls.gv(&(q * x), w) - ls.gv(&(q * y), w) * ls.gv(&(q * x), z))
                    - ls.r4(x, y, z, &(&ls.q_tilde.val * w));
                out.push((1, scalar_residual(lhs, rhs)));
            }
            Ok(out)
        },
    ));

    let tol = ctx.tol.get("foliation");
    let samples = ctx.locals.len();
    let bound_name = "curvature of D+ is close to 4s";
    let bound_stmt = "|g(R_{X,Y}Z,W) - 4s {g(Y,Z) g(X,W) - g(X,Z) g(Y,W)}| <= |Q~| (8s |Q~| + |R|) for unit X,Y,Z,W in D+";
    let sect_name = "sectional curvature of D+ is 4s";
    let sect_stmt = "K(X,Y) = 4s for X,Y in D+ when Q~ = 0";
    let nonflat_name = "not flat for n > 1";
    let nonflat_stmt = "n > 1 excludes R = 0; curvature norm estimate >= 3";
    if ctx.st.n == 1 {
        let why = "D+ is one-dimensional, so no pair of independent D+ vectors exists";
        out.push(vacuous(bound_name, bound_stmt, &with_b, samples, tol, why));
        out.push(vacuous(sect_name, sect_stmt, &with_b, samples, tol, why));
        out.push(vacuous(nonflat_name, nonflat_stmt, &with_b, samples, tol, "the statement concerns n > 1"));
        return out;
    }
    let seed = ctx.seed;
    out.push(ctx.single(bound_name, bound_stmt, "foliation", &with_b, |ls, vs| {
        let (pp, _) = eigen_projectors(ls);
        let qn = ls.conn.op_norm(&ls.q_tilde.val);
        let rn = ls.conn.curvature_norm_estimate(EXTRA_FRAMES, seed);
        let bound = qn * (8.0 * s * qn + rn);
        let mut out = Vec::new();
        for k in 0..vs.len() {
            let p: Vec<DVector<f64>> = (0..4).map(|j| unit(ls, &pp.val * rot(vs, k, j))).collect();
            let (x, y, z, w) = (&p[0], &p[1], &p[2], &p[3]);
            let model = 4.0 * s * (ls.gv(y, z) * ls.gv(x, w) - ls.gv(x, z) * ls.gv(y, w));
            out.push(((ls.r4(x, y, z, w) - model).abs() - bound).max(0.0));
        }
        Ok(out)
    }));
    let mut with_q = with_b.clone();
    with_q.push(qtilde_vanishes(ctx));
    out.push(ctx.single(sect_name, sect_stmt, "foliation", &with_q, |ls, vs| {
        let (pp, _) = eigen_projectors(ls);
        let mut out = Vec::new();
        for k in 0..vs.len() {
            let (x, y) = (&pp.val * rot(vs, k, 0), &pp.val * rot(vs, k, 1));
            let area = ls.gv(&x, &x) * ls.gv(&y, &y) - ls.gv(&x, &y).powi(2);
            if area < 1e-6 {
                continue;
            }
            out.push(scalar_residual(ls.r4(&x, &y, &y, &x) / area, 4.0 * s));
        }
        Ok(out)
    }));
    let mut rep = ctx.single(nonflat_name, nonflat_stmt, "foliation", &with_b, |ls, _| {
        Ok(vec![(NONFLAT_BOUND - ls.conn.curvature_norm_estimate(EXTRA_FRAMES, seed)).max(0.0)])
    });
    if rep.max_residual.is_some() {
        let min = ctx
            .locals
            .iter()
            .map(|(ls, _)| ls.conn.curvature_norm_estimate(EXTRA_FRAMES, seed))
            .fold(f64::INFINITY, f64::min);
        rep.note = Some(format!("smallest curvature norm estimate {min:.6}"));
    }
    out.push(rep);
    out
}

/// The adapted frame `e₁ ∈ 𝒟⁺`, `e₂ = f e₁ / β` as jets, together with `β`.
pub(crate) struct Frame3 {
    pub e1: MatJet1,
    pub e2: MatJet1,
    pub beta: Jet1,
}

impl Frame3 {
    pub fn e1v(&self) -> DVector<f64> {
        crate::fields::as_dvec(&self.e1.val)
    }
    pub fn e2v(&self) -> DVector<f64> {
        crate::fields::as_dvec(&self.e2.val)
    }
    /// `u = β⁻¹ e₂(β)`.
    pub fn u(&self) -> f64 {
        self.beta.along(self.e2v().as_slice()) / self.beta.val
    }
}

/// The coordinate axis with the largest `𝒟⁺` component.
fn seed_axis(ls: &LocalStructure) -> DVector<f64> {
    let (pp, _) = eigen_projectors(ls);
    let k = (0..ls.dim)
        .max_by(|&a, &b| {
            let na = ls.conn.norm(&pp.val.column(a).into_owned());
            let nb = ls.conn.norm(&pp.val.column(b).into_owned());
            na.total_cmp(&nb)
        })
        .unwrap_or(0);
    DVector::from_fn(ls.dim, |r, _| if r == k { 1.0 } else { 0.0 })
}

pub(crate) fn frame3(ls: &LocalStructure, v: &DVector<f64>) -> Result<Frame3> {
    let (pp, _) = eigen_projectors(ls);
    let w = &pp * &const_field(v);
    let nrm2 = (&(&w.transpose() * &ls.g) * &w).entry(0, 0);
    let e1 = w.scale_jet(&nrm2.sqrt()?.recip()?);
    let tr = ls.q.trace();
    let beta = (&tr - &Jet1::constant(ls.s as f64, ls.dim)).scale(0.5).sqrt()?;
    let e2 = (&ls.f * &e1).scale_jet(&beta.recip()?);
    Ok(Frame3 { e1, e2, beta })
}

/// `u` at the point shifted by `t·dir`, with the frame seeded by `v`.
fn u_at(ctx: &Ctx, ls: &LocalStructure, v: &DVector<f64>, dir: &DVector<f64>, t: f64) -> Result<f64> {
    let coords: Vec<f64> = ls.point.coords.iter().zip(dir.iter()).map(|(c, d)| c + t * d).collect();
    let q = ctx.st.local(&Point::new(coords)?)?;
    Ok(frame3(&q, v)?.u())
}

fn deriv_u(ctx: &Ctx, ls: &LocalStructure, v: &DVector<f64>, dir: &DVector<f64>) -> Result<f64> {
    Ok((u_at(ctx, ls, v, dir, U_STEP)? - u_at(ctx, ls, v, dir, -U_STEP)?) / (2.0 * U_STEP))
}

pub fn three_dim_frame(ctx: &Ctx) -> Vec<CheckReport> {
    let mut hyps = vec![ctx.weak_almost_s(), ctx.reeb_flat(), ctx.condition_a()];
    hyps.push(Ctx::flag("n = 1", ctx.st.n == 1));
    let flat_tol = ctx.tol.get("foliation");
    let seed = ctx.seed;
    let mut out = ctx.multi(
        &[
            ("geodesic function of D+", "u = beta^-1 e2(beta) = -g(nabla_{e1} e2, e1) = g(nabla_{e1} e1, e2)"),
            (
                "covariant derivatives of the adapted frame",
                "nabla_{e1} e1 = u e2, nabla_{e1} e2 = 2 beta xi_bar - u e1, nabla_{e1} xi_i = -2 beta e2, \
                 nabla_{e2} and nabla_{xi_i} vanish on e1, e2, xi_j",
            ),
            (
                "brackets of the adapted frame",
                "[xi_i, xi_j] = [e2, xi_i] = 0, [e1, e2] = 2 beta xi_bar - u e1, [e1, xi_i] = -2 beta e2",
            ),
            (
                "curvature of the adapted frame",
                "R(e1,e2)e1 = (u^2 - e2(u)) e2, R(e1,e2)e2 = e2(u) e1 + u (2 beta xi_bar - u e1), \
                 R(xi_i,xi_j) = 0, R(xi_i,e1)e1 = xi_i(u) e2, R(xi_i,e1)e2 = -xi_i(u) e1, R(xi_i,e2) = 0",
            ),
            ("flat iff beta is constant along e2 and xi", "R = 0 <=> e2(beta) = 0 and xi_i(beta) = 0"),
        ],
        "foliation",
        &hyps,
        |ls, _| {
            let v = seed_axis(ls);
            let fr = frame3(ls, &v)?;
            let (e1, e2) = (fr.e1v(), fr.e2v());
            let b = fr.beta.val;
            let u = fr.u();
            let xib = ls.xi_bar();
            let mut out = Vec::new();
            let n11 = ls.nabla_vec(&fr.e1, &e1);
            let n12 = ls.nabla_vec(&fr.e2, &e1);
            out.push((0, scalar_residual(u, -ls.gv(&n12, &e1))));
            out.push((0, scalar_residual(u, ls.gv(&n11, &e2))));
            out.push((1, vec_residual(&n11, &(&e2 * u))));
            out.push((1, vec_residual(&n12, &(&xib * (2.0 * b) - &e1 * u))));
            out.push((1, zero_res(&ls.nabla_vec(&fr.e1, &e2))));
            out.push((1, zero_res(&ls.nabla_vec(&fr.e2, &e2))));
            for i in 0..ls.s {
                let xi = ls.xi_v(i);
                out.push((1, vec_residual(&ls.nabla_xi_at(i, &e1), &(&e2 * (-2.0 * b)))));
                out.push((1, zero_res(&ls.nabla_xi_at(i, &e2))));
                out.push((1, zero_res(&ls.nabla_vec(&fr.e1, &xi))));
                out.push((1, zero_res(&ls.nabla_vec(&fr.e2, &xi))));
                for j in 0..ls.s {
                    out.push((1, zero_res(&ls.nabla_xi_at(j, &xi))));
                    out.push((2, zero_res(&bracket(&ls.xi[i], &ls.xi[j]))));
                }
                out.push((2, zero_res(&bracket(&fr.e2, &ls.xi[i]))));
                out.push((2, vec_residual(&bracket(&fr.e1, &ls.xi[i]), &(&e2 * (-2.0 * b)))));
            }
            out.push((2, vec_residual(&bracket(&fr.e1, &fr.e2), &(&xib * (2.0 * b) - &e1 * u))));

            let e2u = deriv_u(ctx, ls, &v, &e2)?;
            out.push((3, vec_residual(&ls.r(&e1, &e2, &e1), &(&e2 * (u * u - e2u)))));
            out.push((3, vec_residual(&ls.r(&e1, &e2, &e2), &(&e1 * e2u + (&xib * (2.0 * b) - &e1 * u) * u))));
            let mut beta_const = fr.beta.along(e2.as_slice()).abs();
            for i in 0..ls.s {
                let xi = ls.xi_v(i);
                let xu = deriv_u(ctx, ls, &v, &xi)?;
                for j in 0..ls.s {
                    let xj = ls.xi_v(j);
                    for e in [&e1, &e2, &xi] {
                        out.push((3, zero_res(&ls.r(&xi, &xj, e))));
                    }
                }
                out.push((3, vec_residual(&ls.r(&xi, &e1, &e1), &(&e2 * xu))));
                out.push((3, vec_residual(&ls.r(&xi, &e1, &e2), &(&e1 * -xu))));
                for e in [&e1, &e2, &xi] {
                    out.push((3, zero_res(&ls.r(&xi, &e2, e))));
                }
                beta_const = beta_const.max(fr.beta.along(xi.as_slice()).abs());
            }
            let flat = ls.conn.curvature_norm_estimate(EXTRA_FRAMES, seed) <= flat_tol;
            out.push((4, if flat == (beta_const <= flat_tol) { 0.0 } else { 1.0 }));
            Ok(out)
        },
    );
    let mut with_b = hyps.clone();
    with_b.push(ctx.condition_b());
    out.push(ctx.single(
        "condition B forces Q = I",
        "condition B with n = 1 forces beta = 1, so Q~ = 0",
        "foliation",
        &with_b,
        |ls, _| Ok(vec![ls.conn.op_norm(&ls.q_tilde.val)]),
    ));
    out
}
