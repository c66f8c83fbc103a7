//! Structure axioms, the paper-family ground truth and the identities that
//! hold for every weak almost S-structure.

use super::{rot, skipped, Acc, CheckReport, Ctx};
use crate::connection::{cov_deriv_tensor11, cov_deriv_vector};
use crate::examples::{paper_frame, Family};
use crate::jet::MatJet1;
use crate::fields::{bracket, const_field, d2, d_oneform, exterior_derivative, lie_bracket};
use crate::sampling::{mat_residual, scalar_residual, vec_residual};
use crate::structure::{validate_local, LocalSamples, LocalStructure};
use nalgebra::{DMatrix, DVector};

pub(crate) fn zero_res(v: &DVector<f64>) -> f64 {
    vec_residual(v, &DVector::zeros(v.len()))
}

pub(crate) fn zero_mat(m: &DMatrix<f64>) -> f64 {
    mat_residual(m, &DMatrix::zeros(m.nrows(), m.ncols()))
}

pub fn axioms(ctx: &Ctx) -> Vec<CheckReport> {
    let tol = ctx.tol.get("axiom");
    let n = ctx.locals.len();
    let mut names: Vec<String> = Vec::new();
    let mut acc: Vec<Acc> = Vec::new();
    for (ls, vs) in ctx.locals.iter() {
        let one = LocalSamples { locals: vec![ls.clone()], vectors: vec![vs.clone()] };
        match validate_local(&one) {
            Ok(rep) => {
                if names.is_empty() {
                    names = rep.entries.iter().map(|e| e.name.clone()).collect();
                    acc = vec![Acc::default(); names.len()];
                }
                for (a, e) in acc.iter_mut().zip(&rep.entries) {
                    a.push(e.max_residual);
                }
            }
            Err(e) => {
                return vec![CheckReport {
                    name: "axioms".into(),
                    statement: "structure axioms".into(),
                    hypotheses: vec![],
                    samples: n,
                    max_residual: None,
                    mean_residual: None,
                    tolerance: tol,
                    verdict: super::Verdict::Fail,
                    note: Some(e.to_string()),
                }];
            }
        }
    }
    names.iter().zip(acc).map(|(name, a)| a.report(&format!("axiom: {name}"), name, &[], n, tol)).collect()
}

/// Ground truth of the built-in `paper_R2ns` family in its frame `E_γ, F_γ, ξ_i`.
pub fn example(ctx: &Ctx) -> Vec<CheckReport> {
    let statements: &[(&str, &str)] = &[
        ("example: frame is orthonormal", "g(E_a,E_b) = g(F_a,F_b) = g(xi_i,xi_j) = delta, all cross terms 0"),
        ("example: f and Q on the frame", "f E = beta F, f F = -beta E, f xi = 0, Q = beta^2 on D, Q xi = xi"),
        ("example: d eta^i(E,F) = -beta", "d eta^i(E_g, F_g) = -beta with d w(X,Y) = (X w(Y) - Y w(X) - w([X,Y]))/2"),
        ("example: Phi(E,F) = -beta", "g(E_g, f F_g) = -beta"),
        ("example: bracket consistency", "2 d eta^i(E_g, F_g) = -eta^i([E_g, F_g])"),
        ("example: [E,F] = 2 beta xi_bar", "[E_g, F_g] = 2 beta xi_bar"),
        ("example: Reeb brackets vanish", "[xi_i, E_g] = [xi_i, F_g] = [xi_i, xi_j] = 0"),
        ("example: nabla_E1 F1 = beta xi_bar", "nabla_{E_1} F_1 = beta xi_bar"),
        ("example: (nabla_E1 Q) F1 = beta(beta^2-1) xi_bar", "(nabla_{E_1} Q) F_1 = beta (beta^2 - 1) xi_bar"),
        ("example: nabla_E1 xi_i = -beta F1", "nabla_{E_1} xi_i = -f E_1 = -beta F_1"),
        ("example: h_i = 0", "h_i = (1/2) Lie_{xi_i} f = 0"),
        ("example: condition B holds iff beta = 1", "(nabla_X Q) Y = 0 on D exactly when beta = 1"),
    ];
    let cfg = match ctx.example {
        Some(c) if c.family == Family::PaperR2ns => c,
        _ => {
            let h = [Ctx::flag("structure is the built-in paper_R2ns family", false)];
            let tol = ctx.tol.get("example");
            return statements.iter().map(|(n, s)| skipped(n, s, &h, ctx.locals.len(), tol)).collect();
        }
    };
    let st = ctx.st;
    let (beta, n, s) = (cfg.beta, cfg.n, cfg.s);
    let (es, fs) = paper_frame(n, s);
    let cond_b = ctx.condition_b();
    let mut reports = ctx.multi(statements, "example", &[], |ls, _| {
        let p = &ls.point;
        let d = ls.dim;
        let xib = ls.xi_bar();
        let mut frame: Vec<DVector<f64>> = Vec::new();
        for k in 0..n {
            frame.push(es[k].value(p)?);
        }
        for k in 0..n {
            frame.push(fs[k].value(p)?);
        }
        for i in 0..s {
            frame.push(ls.xi_v(i));
        }
        let fm = DMatrix::from_columns(&frame);
        let mut out = vec![(0, mat_residual(&(fm.transpose() * &ls.conn.g * &fm), &DMatrix::identity(d, d)))];
        for k in 0..n {
            let (e, f) = (&frame[k], &frame[n + k]);
            out.push((1, vec_residual(&ls.fv(e), &(f * beta))));
            out.push((1, vec_residual(&ls.fv(f), &(e * -beta))));
            out.push((1, vec_residual(&(&ls.q.val * e), &(e * beta * beta))));
            out.push((1, vec_residual(&(&ls.q.val * f), &(f * beta * beta))));
            let br = lie_bracket(&es[k], &fs[k], p)?;
            for i in 0..s {
                let de = d_oneform(&st.eta[i], &es[k], &fs[k], p)?;
                out.push((2, scalar_residual(de, -beta)));
                out.push((4, scalar_residual(2.0 * de, -ls.eta_at(i, &br))));
                out.push((6, zero_res(&lie_bracket(&st.xi[i], &es[k], p)?)));
                out.push((6, zero_res(&lie_bracket(&st.xi[i], &fs[k], p)?)));
            }
            out.push((3, scalar_residual(ls.phi_at(e, f), -beta)));
            out.push((5, vec_residual(&br, &(&xib * (2.0 * beta)))));
        }
        for i in 0..s {
            let xi = ls.xi_v(i);
            out.push((1, zero_res(&ls.fv(&xi))));
            out.push((1, vec_residual(&(&ls.q.val * &xi), &xi)));
            for j in 0..s {
                out.push((6, zero_res(&lie_bracket(&st.xi[i], &st.xi[j], p)?)));
            }
            out.push((9, vec_residual(&ls.nabla_xi_at(i, &frame[0]), &(&frame[n] * -beta))));
            out.push((10, zero_mat(&ls.h[i].val)));
        }
        out.push((7, vec_residual(&cov_deriv_vector(&st.g, &es[0], &fs[0], p)?, &(&xib * beta))));
        let w = cov_deriv_tensor11(&st.g, &st.q, &es[0], &fs[0], p)?;
        out.push((8, vec_residual(&w, &(&xib * (beta * (beta * beta - 1.0))))));
        out.push((11, if cond_b.holds == (beta == 1.0) { 0.0 } else { 1.0 }));
        Ok(out)
    });
    reports[11].note = Some(format!("condition B residual {:e}, beta {beta}", cond_b.max_residual));
    reports
}

/// Facts about the Reeb fields that hold for every weak almost S-structure.
pub fn reeb_geometry(ctx: &Ctx) -> Vec<CheckReport> {
    let statements: &[(&str, &str)] = &[
        ("Reeb fields are geodesic and parallel along each other", "nabla_{xi_i} xi_j = 0"),
        ("N2 vanishes", "N2_i(X,Y) = 2 d eta^i(fX,Y) - 2 d eta^i(fY,X) = 0, also via Lie derivatives"),
        ("N4 vanishes", "N4_ij(X) = (Lie_{xi_i} eta^j)(X) = 0"),
        ("ker f leaves are flat", "R(xi_i, xi_j) xi_k = 0"),
        ("N3 vanishes iff xi is Killing", "N3_i = 0 <=> g(nabla_Y xi_i, X) + g(nabla_X xi_i, Y) = 0"),
        ("d Phi = 0", "3 d Phi(X,Y,Z) = cyclic sum of X Phi(Y,Z) - Phi([X,Y],Z) = 0"),
        ("d d eta = 0", "d(d eta^i) = 0"),
        ("cyclic identity for nabla Phi", "(nabla_Y Phi)(X,Z) - (nabla_Z Phi)(X,Y) = (nabla_X Phi)(Y,Z)"),
        ("contact distribution is not involutive", "g([X, fX], xi_i) = 2 d eta^i(fX, X) = 2 g(fX, fX) for sections X of D"),
    ];
    let ddeta: Vec<_> = ctx.st.eta.iter().map(exterior_derivative).collect();
    let was = ctx.weak_almost_s();
    let tol = ctx.tol.get("identity");
    ctx.multi(statements, "identity", &[was], |ls, vs| {
        let mut out = Vec::new();
        let s = ls.s;
        for i in 0..s {
            for j in 0..s {
                out.push((0, zero_res(&ls.nabla_xi_at(j, &ls.xi_v(i)))));
                for k in 0..s {
                    out.push((3, zero_res(&ls.r(&ls.xi_v(i), &ls.xi_v(j), &ls.xi_v(k)))));
                }
            }
            let gn = &ls.conn.g * &ls.nabla_xi[i].val;
            let killing = mat_residual(&gn, &(-gn.transpose())) <= tol;
            let n3_zero = zero_mat(&ls.lie_f[i].val) <= tol;
            out.push((4, if killing == n3_zero { 0.0 } else { 1.0 }));
        }
        for k in 0..vs.len() {
            let (x, y, z) = (rot(vs, k, 0), rot(vs, k, 1), rot(vs, k, 2));
            for i in 0..s {
                out.push((1, scalar_residual(ls.n2(i, x, y), 0.0)));
                out.push((1, scalar_residual(ls.n2_lie(i, x, y), 0.0)));
                for j in 0..s {
                    out.push((2, scalar_residual(ls.n4(i, j, x), 0.0)));
                }
                let dd = ddeta[i].jet(&ls.point)?.to_jet1();
                out.push((6, scalar_residual(d2(&dd, &const_field(x), &const_field(y), &const_field(z)), 0.0)));
                let xj = &proj_d_jet(ls) * &const_field(x);
                let fxj = &ls.f * &xj;
                let lhs = ls.gv(&bracket(&xj, &fxj), &ls.xi_v(i));
                let xd = ls.proj_d(x);
                let fxv = ls.fv(&xd);
                out.push((8, scalar_residual(lhs, 2.0 * ls.d_eta_at(i, &fxv, &xd))));
                out.push((8, scalar_residual(lhs, 2.0 * ls.gv(&fxv, &fxv))));
            }
            out.push((5, scalar_residual(d2(&ls.phi, &const_field(x), &const_field(y), &const_field(z)), 0.0)));
            out.push((7, scalar_residual(ls.nabla_phi(y, x, z) - ls.nabla_phi(z, x, y), ls.nabla_phi(x, y, z))));
        }
        Ok(out)
    })
}

/// `∇f` in terms of `N⁽¹⁾` and `N⁽⁵⁾`, and the particular values of `N⁽⁵⁾`.
pub fn nabla_f_formula(ctx: &Ctx) -> Vec<CheckReport> {
    let was = ctx.weak_almost_s();
    let mut out = ctx.multi(
        &[
            (
                "nabla f through N1 and N5",
                "2 g((nabla_X f)Y, Z) = g(N1(Y,Z), fX) + 2 g(fX,fY) eta_bar(Z) - 2 g(fX,fZ) eta_bar(Y) + N5(X,Y,Z)",
            ),
            ("nabla_xi f through N5", "2 g((nabla_{xi_i} f)Y, Z) = N5(xi_i, Y, Z)"),
        ],
        "identity",
        &[was],
        |ls, vs| {
            let mut out = Vec::new();
            for k in 0..vs.len() {
                let (x, y, z) = (rot(vs, k, 0), rot(vs, k, 1), rot(vs, k, 2));
                let lhs = 2.0 * ls.gv(&(ls.nabla_f(x) * y), z);
                let (fx, fy, fz) = (ls.fv(x), ls.fv(y), ls.fv(z));
                let rhs = ls.gv(&ls.n1(y, z), &fx) + 2.0 * ls.gv(&fx, &fy) * ls.eta_bar(z)
                    - 2.0 * ls.gv(&fx, &fz) * ls.eta_bar(y)
                    + ls.n5(x, y, z);
                out.push((0, scalar_residual(lhs, rhs)));
                for i in 0..ls.s {
                    let xi = ls.xi_v(i);
                    out.push((1, scalar_residual(2.0 * ls.gv(&(ls.nabla_f(&xi) * y), z), ls.n5(&xi, y, z))));
                }
            }
            Ok(out)
        },
    );
    out.extend(ctx.multi(
        &[
            ("N5 with a Reeb field in the middle slot", "N5(X, xi_i, Z) = g(N3_i(Z), Q~X)"),
            ("N5 with a Reeb field in the last slot", "N5(X, Z, xi_i) = -g(N3_i(Z), Q~X)"),
            ("N5 with two Reeb fields", "N5(xi_i, xi_j, Y) = N5(xi_i, Y, xi_j) = 0"),
        ],
        "identity",
        &[],
        |ls, vs| {
            let mut out = Vec::new();
            for k in 0..vs.len() {
                let (x, z) = (rot(vs, k, 0), rot(vs, k, 1));
                for i in 0..ls.s {
                    let xi = ls.xi_v(i);
                    let v = ls.gv(&ls.n3(i, z), &(&ls.q_tilde.val * x));
                    out.push((0, scalar_residual(ls.n5(x, &xi, z), v)));
                    out.push((1, scalar_residual(ls.n5(x, z, &xi), -v)));
                    for j in 0..ls.s {
                        let xj = ls.xi_v(j);
                        out.push((2, scalar_residual(ls.n5(&xi, &xj, x), 0.0)));
                        out.push((2, scalar_residual(ls.n5(&xi, x, &xj), 0.0)));
                    }
                }
            }
            Ok(out)
        },
    ));
    out
}

fn comm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Properties of `hᵢ = ½ £_{ξᵢ} f`.
pub fn h_tensor(ctx: &Ctx) -> Vec<CheckReport> {
    let was = ctx.weak_almost_s();
    let ca = ctx.condition_a();
    let mut out = ctx.multi(
        &[
            ("h kills the Reeb fields", "h_i xi_j = 0"),
            ("h takes values in D", "eta^j o h_i = 0"),
            ("h minus its adjoint through N5", "g((h_i - h_i*)X, Y) = (1/2) N5(xi_i, X, Y)"),
            ("h anticommutes with f up to Lie_xi Q", "h_i f + f h_i = -(1/2) Lie_{xi_i} Q"),
            ("h commutes with Q up to [f, Lie_xi Q]", "h_i Q - Q h_i = (1/2) [f, Lie_{xi_i} Q]"),
        ],
        "identity",
        &[was.clone()],
        |ls, vs| {
            let mut out = Vec::new();
            for i in 0..ls.s {
                let h = &ls.h[i].val;
                let lq = &ls.lie_q[i].val;
                for j in 0..ls.s {
                    out.push((0, zero_res(&(h * ls.xi_v(j)))));
                    out.push((1, zero_mat(&(&ls.eta[j].val * h))));
                }
                let hs = ls.h_star(i);
                for k in 0..vs.len() {
                    let (x, y) = (rot(vs, k, 0), rot(vs, k, 1));
                    let lhs = ls.gv(&((h - &hs) * x), y);
                    out.push((2, scalar_residual(lhs, 0.5 * ls.n5(&ls.xi_v(i), x, y))));
                }
                let f = &ls.f.val;
                out.push((3, mat_residual(&(h * f + f * h), &(lq * -0.5))));
                out.push((4, mat_residual(&comm(h, &ls.q.val), &(comm(f, lq) * 0.5))));
            }
            Ok(out)
        },
    );
    out.extend(ctx.multi(
        &[
            ("h anticommutes with f", "h_i f + f h_i = 0"),
            ("h commutes with Q", "h_i Q - Q h_i = 0"),
            ("Q is parallel along the Reeb fields", "nabla_{xi_i} Q = 0"),
            ("f is parallel along the Reeb fields", "nabla_{xi_i} f = 0"),
            ("h is self-adjoint", "h_i = h_i*"),
            ("h is trace free", "tr h_i = 0"),
            ("h minus its adjoint against I + Q", "g((h_i - h_i*)Y, X + QX) = 0"),
        ],
        "identity",
        &[was, ca],
        |ls, vs| {
            let mut out = Vec::new();
            let (f, q) = (&ls.f.val, &ls.q.val);
            for i in 0..ls.s {
                let h = &ls.h[i].val;
                let xi = ls.xi_v(i);
                out.push((0, zero_mat(&(h * f + f * h))));
                out.push((1, zero_mat(&comm(h, q))));
                out.push((2, zero_mat(&ls.nabla_q(&xi))));
                out.push((3, zero_mat(&ls.nabla_f(&xi))));
                let hs = ls.h_star(i);
                out.push((4, mat_residual(h, &hs)));
                out.push((5, scalar_residual(h.trace(), 0.0)));
                for k in 0..vs.len() {
                    let (x, y) = (rot(vs, k, 0), rot(vs, k, 1));
                    out.push((6, scalar_residual(ls.gv(&((h - &hs) * y), &(x + q * x)), 0.0)));
                }
            }
            Ok(out)
        },
    ));
    out
}

/// `C_{ξᵢ}(X) = −(∇_X ξᵢ)^⊤` against `f + fQ⁻¹hᵢ*`.
pub fn splitting(ctx: &Ctx) -> Vec<CheckReport> {
    let was = ctx.weak_almost_s();
    let ca = ctx.condition_a();
    let tol = ctx.tol.get("axiom");
    let mut out = vec![ctx.single(
        "splitting tensor",
        "C_{xi_i}(X) = -(nabla_X xi_i)^T = (f + f Q^-1 h_i*) X for X in D",
        "identity",
        &[was.clone()],
        |ls, vs| {
            let mut out = Vec::new();
            for v in vs {
                let x = ls.proj_d(v);
                for i in 0..ls.s {
                    let c = ls.splitting(i, &x, tol)?;
                    out.push(vec_residual(&c, &(splitting_formula(ls, i) * &x)));
                }
            }
            Ok(out)
        },
    )];
    out.push(ctx.single(
        "nabla xi",
        "nabla_X xi_i = -(f + f h~_i) X for all X",
        "identity",
        &[was, ca],
        |ls, vs| {
            let mut out = Vec::new();
            for x in vs {
                for i in 0..ls.s {
                    let rhs = -((&ls.f.val + &ls.f_h_tilde[i].val) * x);
                    out.push(vec_residual(&ls.nabla_xi_at(i, x), &rhs));
                }
            }
            Ok(out)
        },
    ));
    out
}

/// Projector jet `I − Σ ξᵢ ⊗ ηⁱ` onto the contact distribution.
pub(crate) fn proj_d_jet(ls: &LocalStructure) -> MatJet1 {
    (0..ls.s).fold(MatJet1::identity(ls.dim, ls.dim), |acc, i| &acc - &(&ls.xi[i] * &ls.eta[i]))
}

/// `f + fQ⁻¹hᵢ*`.
pub(crate) fn splitting_formula(ls: &LocalStructure, i: usize) -> DMatrix<f64> {
    &ls.f.val + &ls.f.val * &ls.q_inv.val * ls.h_star(i)
}
