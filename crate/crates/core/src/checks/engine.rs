//! Self-checks of the differentiation and curvature engine.

use super::{rot, CheckReport, Ctx};
use crate::connection::christoffel;
use crate::fields::{as_dvec, bracket, const_field};
use crate::jet::fd_oracle;
use crate::jet::{MatJet1, Point};
use crate::sampling::{scalar_residual, vec_residual};
use crate::structure::LocalStructure;
use nalgebra::DMatrix;

/// Points used by the finite-difference oracles.
pub const FD_POINTS: usize = 20;
/// Step for derivatives of metric components.
pub const FD_STEP: f64 = 1e-4;
/// Step for derivatives of Christoffel symbols.
pub const FD_CHRISTOFFEL_STEP: f64 = 1e-5;

fn fd_derivative_residuals(ctx: &Ctx, ls: &LocalStructure) -> crate::Result<Vec<(usize, f64)>> {
    let d = ls.dim;
    let p = &ls.point;
    let mut out = Vec::new();
    for a in 0..d {
        for b in a..d {
            let field = ctx.st.g.get(a, b);
            let jet = field.eval_jet2(p)?;
            let (grad, hess) = fd_oracle(field, p, FD_STEP)?;
            for k in 0..d {
                out.push((0, scalar_residual(jet.grad[k], grad[k])));
                for l in 0..d {
                    out.push((1, scalar_residual(jet.hess(k, l), hess[k][l])));
                }
            }
        }
    }
    let h = FD_CHRISTOFFEL_STEP;
    let gam = |k: usize, s: f64| {
        let mut c = p.coords.clone();
        c[k] += s;
        christoffel(&ctx.st.g, &Point::new(c)?)
    };
    let mut dgam: Vec<Vec<DMatrix<f64>>> = Vec::with_capacity(d);
    for m in 0..d {
        let (gp, gm) = (gam(m, h)?, gam(m, -h)?);
        dgam.push((0..d).map(|k| (&gp.gamma[k] - &gm.gamma[k]) / (2.0 * h)).collect());
    }
    let gm = &ls.conn.christoffel.gamma;
    for l in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut v = dgam[i][l][(j, k)] - dgam[j][l][(i, k)];
                    for m in 0..d {
                        v += gm[l][(i, m)] * gm[m][(j, k)] - gm[l][(j, m)] * gm[m][(i, k)];
                    }
                    out.push((2, scalar_residual(v, ls.conn.riemann_component(l, k, i, j))));
                }
            }
        }
    }
    Ok(out)
}

pub fn engine(ctx: &Ctx) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for (k, (name, statement, tol)) in [
        ("metric gradient against finite differences", "forward-mode gradient of g_ab = central difference", "fd_grad"),
        ("metric Hessian against finite differences", "second-order jet Hessian of g_ab = central difference", "fd_hess"),
        (
            "curvature against finite differences of Christoffel symbols",
            "R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma Gamma terms, derivatives by central difference",
            "fd_curv",
        ),
    ]
    .into_iter()
    .enumerate()
    {
        let mut seen = 0;
        let mut rep = ctx.single(name, statement, tol, &[], |ls, _| {
            seen += 1;
            if seen > FD_POINTS {
                return Ok(Vec::new());
            }
            Ok(fd_derivative_residuals(ctx, ls)?.into_iter().filter(|(i, _)| *i == k).map(|(_, r)| r).collect())
        });
        rep.samples = rep.samples.min(FD_POINTS);
        out.push(rep);
    }
    out.extend(ctx.multi(
        &[
            ("curvature symmetries", "R(X,Y,Z,W) = -R(Y,X,Z,W) = -R(X,Y,W,Z) = R(Z,W,X,Y)"),
            ("first Bianchi identity", "R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0"),
            ("connection is torsion free", "nabla_X Y - nabla_Y X = [X,Y] for non-constant fields"),
            ("connection is metric", "X g(Y,Z) = g(nabla_X Y, Z) + g(Y, nabla_X Z) for non-constant fields"),
            ("Nijenhuis torsion two ways", "[S,S] from brackets = [S,S] from nabla S, for S = f, Q, h_1"),
            ("nabla Phi two ways", "g(Y, (nabla_X f) Z) = (nabla_X Phi)(Y,Z) from the jet of Phi"),
            ("N2 two ways", "2 d eta^i(fX,Y) - 2 d eta^i(fY,X) = (Lie_{fX} eta^i)(Y) - (Lie_{fY} eta^i)(X)"),
        ],
        "identity",
        &[],
        |ls, vs| {
            let mut out = Vec::new();
            for k in 0..vs.len() {
                let (x, y, z, w) = (rot(vs, k, 0), rot(vs, k, 1), rot(vs, k, 2), rot(vs, k, 3));
                let r = ls.r4(x, y, z, w);
                out.push((0, scalar_residual(r, -ls.r4(y, x, z, w))));
                out.push((0, scalar_residual(r, -ls.r4(x, y, w, z))));
                out.push((0, scalar_residual(r, ls.r4(z, w, x, y))));
                let b = ls.r(x, y, z) + ls.r(y, z, x) + ls.r(z, x, y);
                out.push((1, vec_residual(&b, &(&b * 0.0))));

                let xj: MatJet1 = &(&ls.f * &const_field(x)) + &const_field(y);
                let yj: MatJet1 = &ls.q * &const_field(z);
                let zj: MatJet1 = &ls.g * &const_field(w);
                let (xv, yv, zv) = (as_dvec(&xj.val), as_dvec(&yj.val), as_dvec(&zj.val));
                let t = ls.nabla_vec(&yj, &xv) - ls.nabla_vec(&xj, &yv);
                out.push((2, vec_residual(&t, &bracket(&xj, &yj))));
                let gyz = &(&yj.transpose() * &ls.g) * &zj;
                let lhs = gyz.along(xv.as_slice())[(0, 0)];
                let rhs = ls.gv(&ls.nabla_vec(&yj, &xv), &zv) + ls.gv(&yv, &ls.nabla_vec(&zj, &xv));
                out.push((3, scalar_residual(lhs, rhs)));

                for s in [&ls.f, &ls.q, &ls.h[0]] {
                    let a = LocalStructure::nijenhuis_bracket(s, &const_field(x), &const_field(y));
                    out.push((4, vec_residual(&a, &ls.nijenhuis_nabla(s, x, y))));
                }
                out.push((5, scalar_residual(ls.nabla_phi(x, y, z), ls.nabla_phi_direct(x, y, z))));
                for i in 0..ls.s {
                    out.push((6, scalar_residual(ls.n2(i, x, y), ls.n2_lie(i, x, y))));
                }
            }
            Ok(out)
        },
    ));
    out
}
