//! Levi-Civita connection and curvature from metric jets.
//!
//! Curvature convention: `R_{X,Y} = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}`, i.e.
//! `R^l_{kij} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}`
//! and `(R_{X,Y}Z)^l = X^i Y^j Z^k R^l_{kij}`.

use crate::error::Result;
use crate::fields::{as_dvec, form2, metric_cholesky, pair, MetricField, Tensor11, TwoForm, VectorField};
use crate::jet::{MatJet1, MatJet2, Point};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Christoffel symbols `Γ^k_{ij}` at a point, stored as `gamma[k][(i, j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelValue {
    pub gamma: Vec<DMatrix<f64>>,
}

impl ChristoffelValue {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[k][(i, j)]
    }
}

/// Everything about the Levi-Civita connection at one point.
#[derive(Debug, Clone)]
pub struct ConnectionAt {
    pub dim: usize,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// First partials of the metric, `dg[m] = ∂_m g`.
    pub dg: Vec<DMatrix<f64>>,
    pub christoffel: ChristoffelValue,
    /// `dgamma[m][k][(i, j)] = ∂_m Γ^k_{ij}`.
    pub dgamma: Vec<Vec<DMatrix<f64>>>,
    /// `R^l_{kij}` flattened as `((l*d + k)*d + i)*d + j`.
    riem: Vec<f64>,
}

impl ConnectionAt {
    pub fn new(g: &MatJet2, p: &Point) -> Result<Self> {
        let d = g.dim();
        let ch = metric_cholesky(&g.val, p)?;
        let g_inv = ch.inverse();
        let dg = g.d.clone();
        let dg_inv: Vec<DMatrix<f64>> = dg.iter().map(|m| -(&g_inv * m * &g_inv)).collect();

        // first kind: L[l][(i,j)] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
        let first = |l: usize, i: usize, j: usize| 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
        let dfirst =
            |m: usize, l: usize, i: usize, j: usize| 0.5 * (g.dd(m, i)[(j, l)] + g.dd(m, j)[(i, l)] - g.dd(m, l)[(i, j)]);

        let lmat: Vec<DMatrix<f64>> = (0..d).map(|l| DMatrix::from_fn(d, d, |i, j| first(l, i, j))).collect();
        let combine = |ginv: &DMatrix<f64>, ls: &[DMatrix<f64>], k: usize| {
            let mut out = DMatrix::zeros(d, d);
            for (l, lm) in ls.iter().enumerate() {
                let c = ginv[(k, l)];
                if c != 0.0 {
                    out += lm * c;
                }
            }
            out
        };
        let gamma: Vec<DMatrix<f64>> = (0..d).map(|k| combine(&g_inv, &lmat, k)).collect();
        let mut dgamma = Vec::with_capacity(d);
        for m in 0..d {
            let dl: Vec<DMatrix<f64>> = (0..d).map(|l| DMatrix::from_fn(d, d, |i, j| dfirst(m, l, i, j))).collect();
            dgamma.push((0..d).map(|k| combine(&dg_inv[m], &lmat, k) + combine(&g_inv, &dl, k)).collect::<Vec<_>>());
        }

        let mut riem = vec![0.0; d * d * d * d];
        for l in 0..d {
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let mut v = dgamma[i][l][(j, k)] - dgamma[j][l][(i, k)];
                        for m in 0..d {
                            v += gamma[l][(i, m)] * gamma[m][(j, k)] - gamma[l][(j, m)] * gamma[m][(i, k)];
                        }
                        riem[((l * d + k) * d + i) * d + j] = v;
                    }
                }
            }
        }
        Ok(ConnectionAt { dim: d, g: g.val.clone(), g_inv, dg, christoffel: ChristoffelValue { gamma }, dgamma, riem })
    }

    pub fn riemann_component(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let d = self.dim;
        self.riem[((l * d + k) * d + i) * d + j]
    }

    /// Connection matrix along `X`: `A^k_j = X^i Γ^k_{ij}`.
    pub fn gamma_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |k, j| (0..d).map(|i| x[i] * self.christoffel.gamma[k][(i, j)]).sum())
    }

    /// Directional derivative of the connection matrix: `(∂_X A_Y)^k_j = X^m Y^i ∂_m Γ^k_{ij}`.
    fn dgamma_along(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |k, j| {
            let mut s = 0.0;
            for m in 0..d {
                for i in 0..d {
                    s += x[m] * y[i] * self.dgamma[m][k][(i, j)];
                }
            }
            s
        })
    }

    pub fn pair(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        pair(&self.g, x, y)
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.pair(x, x).max(0.0).sqrt()
    }

    /// `∇_X Y` for a vector jet `Y`.
    pub fn nabla_vec(&self, y: &MatJet1, x: &DVector<f64>) -> DVector<f64> {
        as_dvec(&y.along(x.as_slice())) + self.gamma_along(x) * as_dvec(&y.val)
    }

    /// `∇_X T` for a (1,1)-tensor jet `T`.
    pub fn nabla11(&self, t: &MatJet1, x: &DVector<f64>) -> DMatrix<f64> {
        let a = self.gamma_along(x);
        t.along(x.as_slice()) + &a * &t.val - &t.val * &a
    }

    /// `∇_X ω` for a 1-form jet (`1 x d`).
    pub fn nabla_form(&self, w: &MatJet1, x: &DVector<f64>) -> DMatrix<f64> {
        w.along(x.as_slice()) - &w.val * self.gamma_along(x)
    }

    /// `(∇_X Φ)(Y, Z)` for a 2-form jet, as `X Φ(Y,Z) − Φ(∇_X Y, Z) − Φ(Y, ∇_X Z)` with constant-coefficient Y, Z.
    pub fn nabla_twoform(&self, phi: &MatJet1, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        let a = self.gamma_along(x);
        form2(&phi.along(x.as_slice()), y, z) - form2(&phi.val, &(&a * y), z) - form2(&phi.val, y, &(&a * z))
    }

    /// The tensor `T^k_b = ∇_b V^k` of a vector jet with second partials, as a jet.
    pub fn nabla_field_jet(&self, v: &MatJet2) -> MatJet1 {
        let d = self.dim;
        let jac = v.jacobian();
        let gv = DMatrix::from_fn(d, d, |k, b| (0..d).map(|j| self.christoffel.gamma[k][(b, j)] * v.val[(j, 0)]).sum());
        let dgv: Vec<DMatrix<f64>> = (0..d)
            .map(|a| {
                DMatrix::from_fn(d, d, |k, b| {
                    (0..d)
                        .map(|j| self.dgamma[a][k][(b, j)] * v.val[(j, 0)] + self.christoffel.gamma[k][(b, j)] * v.d[a][(j, 0)])
                        .sum()
                })
            })
            .collect();
        &jac + &MatJet1 { val: gv, d: dgv }
    }

    /// `∇_X(∇_Y V)` with `X`, `Y` constant coordinate fields, from second partials of `V`.
    pub fn nabla_nabla_const(&self, v: &MatJet2, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        // W = ∇_Y V = ∂_Y V + A_Y V as a jet; then ∇_X W = ∂_X W + A_X W.
        let d = self.dim;
        let ay = self.gamma_along(y);
        let vy = v.to_jet1().along(y.as_slice());
        let w = as_dvec(&vy) + &ay * as_dvec(&v.val);
        let dxv_y = DVector::from_fn(d, |k, _| {
            let mut s = 0.0;
            for m in 0..d {
                for i in 0..d {
                    s += x[m] * y[i] * v.dd(m, i)[(k, 0)];
                }
            }
            s
        });
        let dxw = dxv_y + self.dgamma_along(x, y) * as_dvec(&v.val) + &ay * as_dvec(&v.to_jet1().along(x.as_slice()));
        dxw + self.gamma_along(x) * w
    }

    /// `R_{X,Y} Z`.
    pub fn riemann(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        let mut out = DVector::zeros(d);
        for l in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                if z[k] == 0.0 {
                    continue;
                }
                for i in 0..d {
                    if x[i] == 0.0 {
                        continue;
                    }
                    for j in 0..d {
                        s += x[i] * y[j] * z[k] * self.riem[((l * d + k) * d + i) * d + j];
                    }
                }
            }
            out[l] = s;
        }
        out
    }

    /// `g(R_{X,Y} Z, W)`.
    pub fn riemann4(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        self.pair(&self.riemann(x, y, z), w)
    }

    /// Fully lowered `R_{abcd} = g(R_{e_a,e_b} e_c, e_d)` in a frame given by the columns of `e`.
    pub fn lowered_in_frame(&self, e: &DMatrix<f64>) -> Vec<f64> {
        let cols: Vec<DVector<f64>> = (0..e.ncols()).map(|c| e.column(c).into_owned()).collect();
        let n = cols.len();
        let mut out = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let r = self.riemann(&cols[a], &cols[b], &cols[c]);
                    let gr = &self.g * r;
                    for dd in 0..n {
                        out[((a * n + b) * n + c) * n + dd] = gr.dot(&cols[dd]);
                    }
                }
            }
        }
        out
    }

    /// A g-orthonormal frame (columns) from Gram-Schmidt on the coordinate basis.
    pub fn coordinate_orthonormal_frame(&self) -> DMatrix<f64> {
        gram_schmidt(&self.g, &DMatrix::identity(self.dim, self.dim))
    }

    /// Operator norm of a (1,1)-tensor value with respect to `g`.
    pub fn op_norm(&self, t: &DMatrix<f64>) -> f64 {
        op_norm_tensor(&self.g, t)
    }

    /// Lower-bound estimate of `max |g(R_{e_a,e_b} e_c, e_d)|` over orthonormal frames:
    /// the Gram-Schmidt coordinate frame plus `extra_frames` random ones.
    pub fn curvature_norm_estimate(&self, extra_frames: usize, seed: u64) -> f64 {
        let mut best = self.lowered_in_frame(&self.coordinate_orthonormal_frame()).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..extra_frames {
            let m = DMatrix::from_fn(self.dim, self.dim, |_, _| rng.random_range(-1.0..1.0));
            let e = gram_schmidt(&self.g, &m);
            if e.ncols() < self.dim {
                continue;
            }
            best = self.lowered_in_frame(&e).iter().fold(best, |m, v| m.max(v.abs()));
        }
        best
    }
}

/// Gram-Schmidt of the columns of `m` with respect to `g`, dropping near-dependent columns.
pub fn gram_schmidt(g: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for c in 0..m.ncols() {
        let mut v = m.column(c).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let coef = pair(g, b, &v);
                v -= b * coef;
            }
        }
        let n = pair(g, &v, &v).max(0.0).sqrt();
        if n > 1e-10 {
            basis.push(v / n);
        }
    }
    let rows = m.nrows();
    DMatrix::from_fn(rows, basis.len(), |i, j| basis[j][i])
}

/// Largest singular value of `T` in a g-orthonormal frame.
pub fn op_norm_tensor(g: &DMatrix<f64>, t: &DMatrix<f64>) -> f64 {
    match g.clone().cholesky() {
        Some(ch) => {
            let l = ch.l();
            let lt_inv = match l.transpose().try_inverse() {
                Some(m) => m,
                None => return f64::NAN,
            };
            let m = l.transpose() * t * lt_inv;
            m.singular_values().max()
        }
        None => f64::NAN,
    }
}

// ---- field-level operations ----

pub fn christoffel(g: &MetricField, p: &Point) -> Result<ChristoffelValue> {
    Ok(ConnectionAt::new(&g.jet(p)?, p)?.christoffel)
}

/// `∇_X Y`.
pub fn cov_deriv_vector(g: &MetricField, x: &VectorField, y: &VectorField, p: &Point) -> Result<DVector<f64>> {
    let c = ConnectionAt::new(&g.jet(p)?, p)?;
    Ok(c.nabla_vec(&y.jet(p)?.to_jet1(), &x.value(p)?))
}

/// `(∇_X T)Y = ∇_X(TY) − T ∇_X Y`.
pub fn cov_deriv_tensor11(g: &MetricField, t: &Tensor11, x: &VectorField, y: &VectorField, p: &Point) -> Result<DVector<f64>> {
    let c = ConnectionAt::new(&g.jet(p)?, p)?;
    let xv = x.value(p)?;
    let tj = t.jet(p)?.to_jet1();
    let yj = y.jet(p)?.to_jet1();
    let ty = &tj * &yj;
    Ok(c.nabla_vec(&ty, &xv) - &tj.val * c.nabla_vec(&yj, &xv))
}

/// `(∇_X Φ)(Y, Z) = X(Φ(Y,Z)) − Φ(∇_X Y, Z) − Φ(Y, ∇_X Z)`.
pub fn cov_deriv_twoform(
    g: &MetricField,
    phi: &TwoForm,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    p: &Point,
) -> Result<f64> {
    let c = ConnectionAt::new(&g.jet(p)?, p)?;
    let xv = x.value(p)?;
    let ph = phi.jet(p)?.to_jet1();
    let yj = y.jet(p)?.to_jet1();
    let zj = z.jet(p)?.to_jet1();
    let val = &(&yj.transpose() * &ph) * &zj;
    let x_of = val.along(xv.as_slice())[(0, 0)];
    Ok(x_of - form2(&ph.val, &c.nabla_vec(&yj, &xv), &as_dvec(&zj.val)) - form2(&ph.val, &as_dvec(&yj.val), &c.nabla_vec(&zj, &xv)))
}

/// `R_{X,Y} Z`.
pub fn riemann(g: &MetricField, x: &VectorField, y: &VectorField, z: &VectorField, p: &Point) -> Result<DVector<f64>> {
    let c = ConnectionAt::new(&g.jet(p)?, p)?;
    Ok(c.riemann(&x.value(p)?, &y.value(p)?, &z.value(p)?))
}

/// Operator-norm estimate of a (1,1)-tensor at `p`.
pub fn op_norm_estimate(g: &MetricField, t: &Tensor11, p: &Point) -> Result<f64> {
    Ok(op_norm_tensor(&g.value(p)?, &t.value(p)?))
}

/// Sampled estimate of the curvature norm at `p`.
pub fn curvature_norm_estimate(g: &MetricField, p: &Point, frames: usize, seed: u64) -> Result<f64> {
    Ok(ConnectionAt::new(&g.jet(p)?, p)?.curvature_norm_estimate(frames, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{lie_bracket, metric_pair};
    use crate::jet::ScalarField;

    fn x(k: usize) -> ScalarField {
        ScalarField::coord(k)
    }

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    /// A generic non-flat metric on R^3.
    fn bumpy() -> MetricField {
        MetricField::from_upper(3, |i, j| match (i, j) {
            (0, 0) => 1.0 + x(1) * x(1) + 0.2 * x(2).sin(),
            (1, 1) => 2.0 + x(0) * x(2),
            (2, 2) => (x(0) * 0.3).exp(),
            (0, 1) => 0.3 * x(2) * x(0),
            (0, 2) => 0.1 * x(1),
            _ => 0.2 * x(0) * x(0),
        })
    }

    fn field(seed: f64) -> VectorField {
        VectorField::new((0..3).map(|k| (seed + k as f64) * 0.3 + x(k) * seed + x((k + 1) % 3) * x(k) * 0.5).collect())
    }

    #[test]
    fn euclidean_is_flat() {
        let g = MetricField::euclidean(3);
        let p = pt(&[0.1, 0.2, 0.3]);
        let c = christoffel(&g, &p).unwrap();
        assert!(c.gamma.iter().all(|m| m.amax() == 0.0));
        let r = riemann(&g, &field(1.0), &field(2.0), &field(3.0), &p).unwrap();
        assert_eq!(r.amax(), 0.0);
        let e = VectorField::coordinate(1, 3);
        assert_eq!(cov_deriv_vector(&g, &e, &e, &p).unwrap().amax(), 0.0);
    }

    #[test]
    fn christoffel_symmetric_and_metric_compatible() {
        let g = bumpy();
        for s in 0..10 {
            let q = [0.1 * s as f64 - 0.4, 0.3 - 0.05 * s as f64, 0.07 * s as f64];
            let p = pt(&q);
            let c = ConnectionAt::new(&g.jet(&p).unwrap(), &p).unwrap();
            for k in 0..3 {
                assert_eq!(c.christoffel.gamma[k], c.christoffel.gamma[k].transpose());
            }
            // ∂_k g_ij = Γ^l_{ki} g_lj + Γ^l_{kj} g_il
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut rhs = 0.0;
                        for l in 0..3 {
                            rhs += c.christoffel.get(l, k, i) * c.g[(l, j)] + c.christoffel.get(l, k, j) * c.g[(i, l)];
                        }
                        assert!((c.dg[k][(i, j)] - rhs).abs() < 1e-12);
                    }
                }
            }
        }
    }

    /// Koszul formula evaluated with field-level pairings and brackets.
    fn koszul(g: &MetricField, a: &VectorField, b: &VectorField, c: &VectorField, p: &Point) -> f64 {
        let gs = |u: &VectorField, v: &VectorField| -> ScalarField {
            let mut s = ScalarField::zero();
            for i in 0..3 {
                for j in 0..3 {
                    s = s + u.comps[i].clone() * g.get(i, j).clone() * v.comps[j].clone();
                }
            }
            s
        };
        let dir = |s: ScalarField, u: &VectorField| -> f64 {
            let gr = s.eval_jet2(p).unwrap().grad;
            u.value(p).unwrap().iter().zip(&gr).map(|(x, y)| x * y).sum()
        };
        let gv = g.value(p).unwrap();
        let gp = |u: DVector<f64>, v: &VectorField| pair(&gv, &u, &v.value(p).unwrap());
        0.5 * (dir(gs(b, c), a) + dir(gs(a, c), b) - dir(gs(a, b), c) + gp(lie_bracket(a, b, p).unwrap(), c)
            - gp(lie_bracket(a, c, p).unwrap(), b)
            - gp(lie_bracket(b, c, p).unwrap(), a))
    }

    #[test]
    fn covariant_derivative_matches_koszul_and_is_torsion_free() {
        let g = bumpy();
        let p = pt(&[0.2, -0.3, 0.5]);
        let (a, b) = (field(0.7), field(-1.1));
        let nab = cov_deriv_vector(&g, &a, &b, &p).unwrap();
        let gv = g.value(&p).unwrap();
        for k in 0..3 {
            let e = VectorField::coordinate(k, 3);
            let lhs = pair(&gv, &nab, &e.value(&p).unwrap());
            assert!((lhs - koszul(&g, &a, &b, &e, &p)).abs() < 1e-12);
        }
        let tors = nab - cov_deriv_vector(&g, &b, &a, &p).unwrap() - lie_bracket(&a, &b, &p).unwrap();
        assert!(tors.amax() < 1e-12);
    }

    #[test]
    fn curvature_matches_finite_difference_of_christoffels() {
        let g = bumpy();
        let q = [0.2, -0.3, 0.5];
        let p = pt(&q);
        let c = ConnectionAt::new(&g.jet(&p).unwrap(), &p).unwrap();
        let h = 1e-5;
        let gam = |k: usize, s: f64| {
            let mut qq = q;
            qq[k] += s;
            christoffel(&g, &pt(&qq)).unwrap()
        };
        let dgam: Vec<Vec<DMatrix<f64>>> = (0..3)
            .map(|m| {
                let (gp, gm) = (gam(m, h), gam(m, -h));
                (0..3).map(|k| (&gp.gamma[k] - &gm.gamma[k]) / (2.0 * h)).collect()
            })
            .collect();
        let gm = &c.christoffel.gamma;
        for l in 0..3 {
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut v = dgam[i][l][(j, k)] - dgam[j][l][(i, k)];
                        for m in 0..3 {
                            v += gm[l][(i, m)] * gm[m][(j, k)] - gm[l][(j, m)] * gm[m][(i, k)];
                        }
                        assert!((v - c.riemann_component(l, k, i, j)).abs() < 1e-5);
                    }
                }
            }
        }
    }

    #[test]
    fn curvature_symmetries() {
        let g = bumpy();
        let p = pt(&[-0.3, 0.4, 0.1]);
        let c = ConnectionAt::new(&g.jet(&p).unwrap(), &p).unwrap();
        let v: Vec<DVector<f64>> = (0..4).map(|s| DVector::from_fn(3, |i, _| ((s * 3 + i) as f64 * 0.77).sin())).collect();
        let r = |a: usize, b: usize, cc: usize, d: usize| c.riemann4(&v[a], &v[b], &v[cc], &v[d]);
        assert!((r(0, 1, 2, 3) + r(1, 0, 2, 3)).abs() < 1e-12);
        assert!((r(0, 1, 2, 3) + r(0, 1, 3, 2)).abs() < 1e-12);
        assert!((r(0, 1, 2, 3) - r(2, 3, 0, 1)).abs() < 1e-12);
        assert!((r(0, 1, 2, 3) + r(1, 2, 0, 3) + r(2, 0, 1, 3)).abs() < 1e-12);
    }

    #[test]
    fn round_sphere_has_unit_sectional_curvature() {
        // stereographic metric 4/(1+|u|²)² δ
        let conf = 4.0 / (1.0 + x(0) * x(0) + x(1) * x(1)).powi(2);
        let g = MetricField::from_upper(2, |i, j| if i == j { conf.clone() } else { ScalarField::zero() });
        let p = pt(&[0.3, -0.5]);
        let c = ConnectionAt::new(&g.jet(&p).unwrap(), &p).unwrap();
        let e = c.coordinate_orthonormal_frame();
        let (e1, e2) = (e.column(0).into_owned(), e.column(1).into_owned());
        assert!((c.riemann4(&e1, &e2, &e2, &e1) - 1.0).abs() < 1e-12);
        assert!((c.curvature_norm_estimate(4, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_derivative_is_tensorial_in_y() {
        let g = bumpy();
        let p = pt(&[0.25, 0.1, -0.35]);
        let t = Tensor11::from_fn(3, |a, b| x(a) * x(b) + (a as f64 - b as f64) * x(2).cos());
        let (xf, yf) = (field(0.4), field(-0.9));
        let phi = 1.5 + x(0) * x(1) + x(2).sin();
        let phi_p = phi.eval(&p).unwrap();
        let scaled = yf.scale(&phi);
        let base = cov_deriv_tensor11(&g, &t, &xf, &yf, &p).unwrap();
        let other = cov_deriv_tensor11(&g, &t, &xf, &scaled, &p).unwrap() / phi_p;
        assert!((base.clone() - other).amax() < 1e-12);
        let id = cov_deriv_tensor11(&g, &Tensor11::identity(3), &xf, &yf, &p).unwrap();
        assert!(id.amax() < 1e-12);
        // jet-level kernel agrees
        let c = ConnectionAt::new(&g.jet(&p).unwrap(), &p).unwrap();
        let k = c.nabla11(&t.jet(&p).unwrap().to_jet1(), &xf.value(&p).unwrap()) * yf.value(&p).unwrap();
        assert!((base - k).amax() < 1e-12);
    }

    #[test]
    fn twoform_derivative_matches_tensor_derivative() {
        // Φ(Y,Z) = Yᵀ A Z = g(Y, fZ) with f = G⁻¹A
        let g = bumpy();
        let p = pt(&[0.25, 0.1, -0.35]);
        let phi = TwoForm::from_upper(3, |a, b| x(a) * (b as f64 + 1.0) - x(b) + x(2) * x(0));
        let (xf, yf, zf) = (field(0.4), field(-0.9), field(1.3));
        let lhs = cov_deriv_twoform(&g, &phi, &xf, &yf, &zf, &p).unwrap();
        let c = ConnectionAt::new(&g.jet(&p).unwrap(), &p).unwrap();
        let f = &g.jet(&p).unwrap().to_jet1().try_inverse().unwrap() * &phi.jet(&p).unwrap().to_jet1();
        let (xv, yv, zv) = (xf.value(&p).unwrap(), yf.value(&p).unwrap(), zf.value(&p).unwrap());
        let rhs = c.pair(&yv, &(c.nabla11(&f, &xv) * &zv));
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
        assert!((c.nabla_twoform(&phi.jet(&p).unwrap().to_jet1(), &xv, &yv, &zv) - rhs).abs() < 1e-12);
        let flat = MetricField::euclidean(3);
        let konst = TwoForm::from_upper(3, |a, b| ScalarField::constant((a + b) as f64));
        assert!(cov_deriv_twoform(&flat, &konst, &xf, &yf, &zf, &p).unwrap().abs() < 1e-14);
        let _ = metric_pair(&g, &yf, &zf, &p).unwrap();
    }

    #[test]
    fn second_covariant_derivative_commutator_is_curvature() {
        let g = bumpy();
        let p = pt(&[0.15, -0.2, 0.3]);
        let v = field(0.6);
        let c = ConnectionAt::new(&g.jet(&p).unwrap(), &p).unwrap();
        let vj = v.jet(&p).unwrap();
        let a = DVector::from_vec(vec![0.3, -0.7, 0.2]);
        let b = DVector::from_vec(vec![-0.5, 0.1, 0.9]);
        let comm = c.nabla_nabla_const(&vj, &a, &b) - c.nabla_nabla_const(&vj, &b, &a);
        let r = c.riemann(&a, &b, &as_dvec(&vj.val));
        assert!((comm - r).amax() < 1e-12);
        // tensor form of the first derivative agrees with nabla_vec
        let t = c.nabla_field_jet(&vj);
        assert!((&t.val * &a - c.nabla_vec(&vj.to_jet1(), &a)).amax() < 1e-13);
        // and its covariant derivative reproduces the second derivative for constant fields
        let second = c.nabla11(&t, &a) * &b;
        let direct = c.nabla_nabla_const(&vj, &a, &b) - c.nabla_vec(&vj.to_jet1(), &(c.gamma_along(&a) * &b));
        assert!((second - direct).amax() < 1e-12);
    }

    #[test]
    fn norm_estimates() {
        let g = bumpy();
        let p = pt(&[0.1, 0.1, 0.1]);
        let gv = g.value(&p).unwrap();
        assert!((op_norm_tensor(&gv, &DMatrix::identity(3, 3)) - 1.0).abs() < 1e-12);
        let flat = MetricField::euclidean(3);
        assert_eq!(curvature_norm_estimate(&flat, &p, 3, 0).unwrap(), 0.0);
        let e = gram_schmidt(&gv, &DMatrix::identity(3, 3));
        assert!((e.transpose() * &gv * &e - DMatrix::identity(3, 3)).amax() < 1e-12);
    }
}
