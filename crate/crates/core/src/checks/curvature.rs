//! Curvature along the Reeb fields and the full `∇f` formula.

use super::{rot, Ctx, CheckReport};
use super::basic::zero_mat;
use crate::sampling::{scalar_residual, vec_residual};
use crate::structure::LocalStructure;
use nalgebra::{DMatrix, DVector};

/// `∇_{ξᵢ} hⱼ` and `Q R_{ξᵢ,X} ξⱼ − f R_{ξᵢ,fX} ξⱼ`.
pub fn reeb_curvature(ctx: &Ctx) -> Vec<CheckReport> {
    let hyps = [ctx.weak_almost_s(), ctx.condition_a()];
    ctx.multi(
        &[
            (
                "nabla_xi h, mixed indices",
                "(nabla_{xi_i} h_j) X = f R_{xi_i,X} xi_j + h_i X - h_j X + Q f X - f Q^-1 h_j h_i X",
            ),
            ("nabla_xi h", "(nabla_{xi_i} h_i) X = f R_{xi_i,X} xi_i + Q f X - f Q^-1 h_i^2 X"),
            (
                "Reeb curvature against h, mixed indices",
                "Q R_{xi_i,X} xi_j - f R_{xi_i,fX} xi_j = 2 (h_j h_i X + Q f^2 X)",
            ),
            ("Reeb curvature against h", "Q R_{xi_i,X} xi_i - f R_{xi_i,fX} xi_i = 2 (h_i^2 X + Q f^2 X)"),
        ],
        "identity",
        &hyps,
        |ls, vs| {
            let mut out = Vec::new();
            let (f, q) = (&ls.f.val, &ls.q.val);
            for x in vs {
                for i in 0..ls.s {
                    let xi_i = ls.xi_v(i);
                    for j in 0..ls.s {
                        let xi_j = ls.xi_v(j);
                        let (hi, hj) = (&ls.h[i].val, &ls.h[j].val);
                        let lhs = ls.nabla_h(j, &xi_i) * x;
                        let rhs = f * ls.r(&xi_i, x, &xi_j) + hi * x - hj * x + q * f * x
                            - f * &ls.q_inv.val * hj * hi * x;
                        let k = if i == j { 1 } else { 0 };
                        out.push((k, vec_residual(&lhs, &rhs)));
                        let lhs = q * ls.r(&xi_i, x, &xi_j) - f * ls.r(&xi_i, &(f * x), &xi_j);
                        let rhs = (hj * hi * x + q * f * f * x) * 2.0;
                        out.push((k + 2, vec_residual(&lhs, &rhs)));
                    }
                }
            }
            Ok(out)
        },
    )
}

/// `∇Q` and `∇Q⁻¹` when `Q` is parallel on the contact distribution.
pub fn q_parallel(ctx: &Ctx) -> Vec<CheckReport> {
    let mut out = vec![ctx.single(
        "nabla Q~ equals nabla Q",
        "nabla_X Q~ = nabla_X Q",
        "identity",
        &[],
        |ls, vs| Ok(vs.iter().map(|x| zero_mat(&(ls.nabla_q_tilde(x) - ls.nabla_q(x)))).collect()),
    )];
    let hyps = [ctx.weak_almost_s(), ctx.condition_a(), ctx.condition_b()];
    out.extend(ctx.multi(
        &[
            ("nabla Q on Reeb directions", "(nabla_X Q) Y = sum_i eta^i(Y) Q~ (f + f h~_i) X"),
            ("Q^-1 is parallel on D", "(nabla_X Q^-1) Y = 0 for Y in D"),
        ],
        "identity",
        &hyps,
        |ls, vs| {
            let mut out = Vec::new();
            for k in 0..vs.len() {
                let (x, y) = (rot(vs, k, 0), rot(vs, k, 1));
                let rhs = (0..ls.s).fold(DVector::zeros(ls.dim), |acc, i| {
                    acc + &ls.q_tilde.val * (&ls.f.val + &ls.f_h_tilde[i].val) * x * ls.eta_at(i, y)
                });
                out.push((0, vec_residual(&(ls.nabla_q(x) * y), &rhs)));
                out.push((1, vec_residual(&(ls.nabla_q_inv(x) * ls.proj_d(y)), &DVector::zeros(ls.dim))));
            }
            Ok(out)
        },
    ));
    out
}

/// `Tⱼ = Q̃ Q (I − h̃ⱼ)`.
fn t_op(ls: &LocalStructure, j: usize) -> DMatrix<f64> {
    &ls.q_tilde.val * &ls.q.val * (DMatrix::identity(ls.dim, ls.dim) - &ls.h_tilde[j].val)
}

/// Right side of the `∇f + (∇_{f·}f)f` formula. `printed` flips the sign of
/// the `η̄(Y)f²X − Σηʲ(Y)hⱼX` pair.
pub(crate) fn nabla_f_full_rhs(ls: &LocalStructure, x: &DVector<f64>, y: &DVector<f64>, printed: bool) -> DVector<f64> {
    let f = &ls.f.val;
    let (fx, fy) = (ls.fv(x), ls.fv(y));
    let qt = &ls.q_tilde.val;
    let mut pair = f * f * x * ls.eta_bar(y);
    for j in 0..ls.s {
        pair -= &ls.h[j].val * x * ls.eta_at(j, y);
    }
    if printed {
        pair = -pair;
    }
    let p = (ls.nabla_f(x) * qt * y + ls.nabla_f(&(qt * x)) * y) * 0.5;
    let mut rhs = ls.xi_bar() * (2.0 * ls.gv(&fx, &fy)) + pair - p;
    for j in 0..ls.s {
        let t = t_op(ls, j);
        let v = &t * (y * ls.eta_at(j, x) - x * ls.eta_at(j, y)) + ls.xi_v(j) * ls.gv(&(&t * y), x);
        rhs += v * 0.5;
    }
    rhs
}

pub(crate) fn nabla_f_full_lhs(ls: &LocalStructure, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    let fx = ls.fv(x);
    ls.nabla_f(x) * y + ls.nabla_f(&fx) * ls.fv(y)
}

pub fn nabla_f_full(ctx: &Ctx) -> Vec<CheckReport> {
    let hyps = [ctx.weak_almost_s(), ctx.condition_a(), ctx.condition_b()];
    vec![ctx.single(
        "nabla f with its f-twisted companion",
        "(nabla_X f)Y + (nabla_{fX} f) fY = 2 g(fX,fY) xi_bar + eta_bar(Y) f^2 X - sum_j eta^j(Y) h_j X - P \
         + (1/2) sum_j [T_j(eta^j(X) Y - eta^j(Y) X) + g(T_j Y, X) xi_j], \
         T_j = Q~ Q (I - h~_j), P = (1/2)[(nabla_X f) Q~ Y + (nabla_{Q~X} f) Y]",
        "identity",
        &hyps,
        |ls, vs| {
            let mut out = Vec::new();
            for k in 0..vs.len() {
                let (x, y) = (rot(vs, k, 0), rot(vs, k, 1));
                out.push(vec_residual(&nabla_f_full_lhs(ls, x, y), &nabla_f_full_rhs(ls, x, y, false)));
            }
            Ok(out)
        },
    )]
}

/// `g(R_{ξᵢ,X}Y, Z)` through `∇Φ` and `∇(f h̃ᵢ)`.
pub fn reeb_curvature_formula(ctx: &Ctx) -> Vec<CheckReport> {
    let hyps = [ctx.weak_almost_s(), ctx.condition_a()];
    vec![ctx.single(
        "Reeb curvature through nabla Phi",
        "g(R_{xi_i,X} Y, Z) = -(nabla_X Phi)(Y,Z) - g(X, (nabla_Y f h~_i) Z) + g(X, (nabla_Z f h~_i) Y)",
        "identity",
        &hyps,
        |ls, vs| {
            let mut out = Vec::new();
            for k in 0..vs.len() {
                let (x, y, z) = (rot(vs, k, 0), rot(vs, k, 1), rot(vs, k, 2));
                for i in 0..ls.s {
                    let lhs = ls.r4(&ls.xi_v(i), x, y, z);
                    let rhs = -ls.nabla_phi(x, y, z) - ls.gv(x, &(ls.nabla_f_h_tilde(i, y) * z))
                        + ls.gv(x, &(ls.nabla_f_h_tilde(i, z) * y));
                    out.push(scalar_residual(lhs, rhs));
                }
            }
            Ok(out)
        },
    )]
}

/// Both sides of the long Reeb-curvature identity for the Reeb field `i`.
/// `printed` uses `−` on the last left-hand term.
pub(crate) fn reeb_curvature_long_sides(
    ls: &LocalStructure,
    i: usize,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    printed: bool,
) -> (f64, f64) {
    let xi = ls.xi_v(i);
    let qt = &ls.q_tilde.val;
    let hm = &ls.h_tilde[i].val;
    let (fx, fy, fz) = (ls.fv(x), ls.fv(y), ls.fv(z));
    let last = ls.r4(&xi, &fx, &fy, z);
    let lhs = ls.r4(&xi, x, y, z) + ls.r4(&xi, &(qt * x), y, z) - ls.r4(&xi, x, &fy, &fz)
        + ls.r4(&xi, &fx, y, &fz)
        + if printed { -last } else { last };

    let np = |a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>| ls.nabla_phi(a, b, c);
    let (hx, hy, hz) = (hm * x, hm * y, hm * z);
    let (qx, qy, qz) = (qt * x, qt * y, qt * z);
    let qfull = &ls.q.val;
    let eb = |v: &DVector<f64>| ls.eta_bar(v);
    let xhx = x + &hx;
    let mut rhs = 2.0 * np(&hx, y, z) + 2.0 * eb(z) * ls.gv(&xhx, &(qfull * y))
        - 2.0 * eb(y) * ls.gv(&xhx, &(qfull * z));
    let mut half = 0.0;
    for j in 0..ls.s {
        let (ejx, ejy, ejz) = (ls.eta_at(j, x), ls.eta_at(j, y), ls.eta_at(j, z));
        rhs -= 2.0 * ejx * (ejy * eb(z) - eb(y) * ejz);
        let t = t_op(ls, j);
        half += 2.0 * ejx * ls.gv(&(&t * z), y) - 5.0 * ejy * ls.gv(&(&t * z), &(&hx + x * 0.4))
            + 5.0 * ejz * ls.gv(&(&t * y), &hx);
    }
    half += -np(&qy, z, &hx) + np(y, &hz, &qx) + 3.0 * np(&(qt * &hx), y, z) - np(&qy, &hz, x) - np(&qz, &hx, y)
        + np(z, &qx, &hy)
        - np(&qz, x, &hy);
    (lhs, rhs + 0.5 * half)
}

pub fn reeb_curvature_long(ctx: &Ctx) -> Vec<CheckReport> {
    let hyps = [ctx.weak_almost_s(), ctx.condition_a(), ctx.condition_b()];
    vec![ctx.single(
        "Reeb curvature with f-twisted terms",
        "g(R_{xi,X}Y,Z) + g(R_{xi,Q~X}Y,Z) - g(R_{xi,X}fY,fZ) + g(R_{xi,fX}Y,fZ) + g(R_{xi,fX}fY,Z) \
         = 2 (nabla_{HX} Phi)(Y,Z) + 2 eta_bar(Z) g(X+HX, QY) - 2 eta_bar(Y) g(X+HX, QZ) \
         - 2 sum_j eta^j(X)[eta^j(Y) eta_bar(Z) - eta_bar(Y) eta^j(Z)] + (1/2)[...], H = h~_i",
        "identity",
        &hyps,
        |ls, vs| {
            let mut out = Vec::new();
            for k in 0..vs.len() {
                let (x, y, z) = (rot(vs, k, 0), rot(vs, k, 1), rot(vs, k, 2));
                for i in 0..ls.s {
                    let (l, r) = reeb_curvature_long_sides(ls, i, x, y, z, false);
                    out.push(scalar_residual(l, r));
                }
            }
            Ok(out)
        },
    )]
}
