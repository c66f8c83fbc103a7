//! Structural findings: computed coefficients next to the printed ones, and
//! residuals of printed formulas next to the adopted forms.

use super::curvature::{nabla_f_full_lhs, nabla_f_full_rhs, reeb_curvature_long_sides};
use super::{rot, Ctx, Finding};
use crate::connection::{cov_deriv_tensor11, cov_deriv_vector};
use crate::examples::{paper_frame, Family};
use crate::fields::{const_field, lie_bracket};
use crate::jet::Jet1;
use crate::sampling::{scalar_residual, vec_residual};
use crate::structure::nan_max;
use std::collections::BTreeMap;

fn finding(name: &str, detail: &str, values: &[(&str, f64)]) -> Finding {
    Finding {
        name: name.into(),
        detail: detail.into(),
        values: values.iter().map(|&(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
    }
}

fn paper_findings(ctx: &Ctx, beta: f64, n: usize, s: usize) -> crate::Result<Vec<Finding>> {
    let st = ctx.st;
    let (es, fs) = paper_frame(n, s);
    let ls = &ctx.locals.locals[0];
    let p = &ls.point;
    let br = ls.eta_at(0, &lie_bracket(&es[0], &fs[0], p)?);
    let nab = ls.eta_at(0, &cov_deriv_vector(&st.g, &es[0], &fs[0], p)?);
    let wit = ls.eta_at(0, &cov_deriv_tensor11(&st.g, &st.q, &es[0], &fs[0], p)?);
    Ok(vec![
        finding(
            "bracket coefficient",
            "xi_bar coefficient of [E_1, F_1]; the printed value is 4 beta, the computed value is 2 beta",
            &[("beta", beta), ("computed", br), ("printed", 4.0 * beta)],
        ),
        finding(
            "nabla_E1 F1 coefficient",
            "xi_bar coefficient of nabla_{E_1} F_1; the printed value is 2 beta, the computed value is beta",
            &[("beta", beta), ("computed", nab), ("printed", 2.0 * beta)],
        ),
        finding(
            "condition B witness coefficient",
            "xi_bar coefficient of (nabla_{E_1} Q) F_1; the printed value is 2 beta (beta^2 - 1)",
            &[("beta", beta), ("computed", wit), ("printed", 2.0 * beta * (beta * beta - 1.0))],
        ),
    ])
}

/// Findings for the structure in `ctx`. Paper-family coefficient findings
/// come first; sign findings follow for every structure.
pub fn flags(ctx: &Ctx) -> Vec<Finding> {
    let mut out = Vec::new();
    if ctx.locals.is_empty() {
        return out;
    }
    if let Some(cfg) = ctx.example.filter(|c| c.family == Family::PaperR2ns) {
        match paper_findings(ctx, cfg.beta, cfg.n, cfg.s) {
            Ok(f) => out.extend(f),
            Err(e) => out.push(finding("paper coefficients", &format!("not evaluated: {e}"), &[])),
        }
    }

    let tol = ctx.tol.get("axiom");
    let (mut adopted, mut printed) = (0.0f64, 0.0f64);
    for (ls, vs) in ctx.locals.iter() {
        for v in vs {
            let x = ls.proj_d(v);
            for i in 0..ls.s {
                let Ok(c) = ls.splitting(i, &x, tol) else { continue };
                let fx = ls.fv(&x);
                let ours = &fx + &ls.f.val * &ls.q_inv.val * ls.h_star(i) * &x;
                let theirs = -&fx - &ls.q_inv.val * &ls.f.val * &ls.h[i].val * &x;
                adopted = nan_max(adopted, vec_residual(&c, &ours));
                printed = nan_max(printed, vec_residual(&c, &theirs));
            }
        }
    }
    out.push(finding(
        "splitting tensor sign",
        "C_xi X = -(nabla_X xi)^T against the adopted (f + f Q^-1 h*) X and the printed -fX - Q^-1 f h X",
        &[("adopted_residual", adopted), ("printed_residual", printed)],
    ));

    let a = ctx.condition_a();
    let b = ctx.condition_b();
    if a.holds && b.holds {
        let (mut c04, mut p04, mut c05, mut p05) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (ls, vs) in ctx.locals.iter() {
            for k in 0..vs.len() {
                let (x, y, z) = (rot(vs, k, 0), rot(vs, k, 1), rot(vs, k, 2));
                let lhs = nabla_f_full_lhs(ls, x, y);
                c04 = nan_max(c04, vec_residual(&lhs, &nabla_f_full_rhs(ls, x, y, false)));
                p04 = nan_max(p04, vec_residual(&lhs, &nabla_f_full_rhs(ls, x, y, true)));
                for i in 0..ls.s {
                    let (l, r) = reeb_curvature_long_sides(ls, i, x, y, z, false);
                    c05 = nan_max(c05, scalar_residual(l, r));
                    let (l, r) = reeb_curvature_long_sides(ls, i, x, y, z, true);
                    p05 = nan_max(p05, scalar_residual(l, r));
                }
            }
        }
        out.push(finding(
            "nabla f formula sign",
            "residual with +eta_bar(Y) f^2 X - sum eta^j(Y) h_j X (adopted) and with the opposite sign (printed)",
            &[("adopted_residual", c04), ("printed_residual", p04)],
        ));
        out.push(finding(
            "long Reeb curvature sign",
            "residual with +g(R_{xi,fX} fY, Z) on the left (adopted) and with -g(R_{xi,fX} fY, Z) (printed)",
            &[("adopted_residual", c05), ("printed_residual", p05)],
        ));
    } else {
        let why = "not evaluated: conditions A and B do not both hold";
        out.push(finding("nabla f formula sign", why, &[]));
        out.push(finding("long Reeb curvature sign", why, &[]));
    }

    let (mut defect, mut completed) = (0.0f64, 0.0f64);
    for (ls, vs) in ctx.locals.iter() {
        let phi = Jet1 { val: 1.0 + ls.point.coords[0], grad: (0..ls.dim).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect() };
        for k in 0..vs.len() {
            let (x, y, z) = (rot(vs, k, 0), rot(vs, k, 1), rot(vs, k, 2));
            let (xj, zj) = (const_field(x), const_field(z));
            let yj = const_field(y);
            let ys = yj.scale_jet(&phi);
            let d = ls.n5_printed_jets(&xj, &ys, &zj) - phi.val * ls.n5_printed_jets(&xj, &yj, &zj);
            let c = ls.n5_jets(&xj, &ys, &zj) - phi.val * ls.n5_jets(&xj, &yj, &zj);
            defect = nan_max(defect, d.abs());
            completed = nan_max(completed, c.abs());
        }
    }
    out.push(finding(
        "N5 tensoriality",
        "N5(X, phi Y, Z) - phi N5(X, Y, Z) with phi = 1 + x_0, for the printed expression and for the completion \
         with X(g(fY, Q~Z))",
        &[("printed_defect", defect), ("completed_defect", completed)],
    ));
    out
}
