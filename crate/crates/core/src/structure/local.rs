use super::WeakFStructure;
use crate::connection::ConnectionAt;
use crate::error::{Error, Result};
use crate::fields::{as_dvec, bracket, const_field, lie11, lie_oneform, pair};
use crate::jet::{MatJet1, MatJet2, Point};
use nalgebra::{DMatrix, DVector};

/// All structure tensors of a [`WeakFStructure`] at one point, as jets where
/// a covariant derivative is needed.
///
/// Vector arguments of the methods are constant-coefficient fields in the
/// chart; every quantity computed from them is tensorial.
#[derive(Debug, Clone)]
pub struct LocalStructure {
    pub n: usize,
    pub s: usize,
    pub dim: usize,
    pub point: Point,
    pub conn: ConnectionAt,
    pub g: MatJet1,
    pub f: MatJet1,
    pub q: MatJet1,
    pub q_inv: MatJet1,
    /// `Q̃ = Q − I`.
    pub q_tilde: MatJet1,
    pub xi: Vec<MatJet1>,
    pub eta: Vec<MatJet1>,
    /// `£_{ξᵢ} f`, which is `N⁽³⁾ᵢ`.
    pub lie_f: Vec<MatJet1>,
    /// `£_{ξᵢ} Q`.
    pub lie_q: Vec<MatJet1>,
    pub h: Vec<MatJet1>,
    /// `h̃ᵢ = Q⁻¹hᵢ`.
    pub h_tilde: Vec<MatJet1>,
    /// `f h̃ᵢ`.
    pub f_h_tilde: Vec<MatJet1>,
    /// `Φ_ab = g_ac f^c_b`.
    pub phi: MatJet1,
    /// `(∇ξᵢ)^k_b = ∇_b ξᵢ^k`.
    pub nabla_xi: Vec<MatJet1>,
    /// `dη^i` values with the ½ convention.
    pub d_eta: Vec<DMatrix<f64>>,
    xi2: Vec<MatJet2>,
}

impl LocalStructure {
    pub fn new(st: &WeakFStructure, p: &Point) -> Result<Self> {
        if p.dim() != st.dim() {
            return Err(Error::Shape(format!("point has {} coordinates, chart has {}", p.dim(), st.dim())));
        }
        let dim = st.dim();
        let g2 = st.g.jet(p)?;
        let f2 = st.f.jet(p)?;
        let q2 = st.q.jet(p)?;
        let xi2: Vec<MatJet2> = st.xi.iter().map(|x| x.jet(p)).collect::<Result<_>>()?;
        let eta2: Vec<MatJet2> = st.eta.iter().map(|e| e.jet(p)).collect::<Result<_>>()?;
        let conn = ConnectionAt::new(&g2, p)?;

        let g = g2.to_jet1();
        let f = f2.to_jet1();
        let q = q2.to_jet1();
        let q_inv = q.try_inverse()?;
        let q_tilde = &q - &MatJet1::identity(dim, dim);
        let xi: Vec<MatJet1> = xi2.iter().map(MatJet2::to_jet1).collect();
        let eta: Vec<MatJet1> = eta2.iter().map(MatJet2::to_jet1).collect();
        let lie_f: Vec<MatJet1> = xi2.iter().map(|x| lie11(x, &f2)).collect();
        let lie_q: Vec<MatJet1> = xi2.iter().map(|x| lie11(x, &q2)).collect();
        let h: Vec<MatJet1> = lie_f.iter().map(|l| l.scale(0.5)).collect();
        let h_tilde: Vec<MatJet1> = h.iter().map(|hi| &q_inv * hi).collect();
        let f_h_tilde = h_tilde.iter().map(|ht| &f * ht).collect();
        let phi = &g * &f;
        let nabla_xi = xi2.iter().map(|x| conn.nabla_field_jet(x)).collect();
        let d_eta = eta2
            .iter()
            .map(|e| DMatrix::from_fn(dim, dim, |a, b| 0.5 * (e.d[a][(0, b)] - e.d[b][(0, a)])))
            .collect();
        Ok(LocalStructure {
            n: st.n,
            s: st.s,
            dim,
            point: p.clone(),
            conn,
            g,
            f,
            q,
            q_inv,
            q_tilde,
            xi,
            eta,
            lie_f,
            lie_q,
            h,
            h_tilde,
            f_h_tilde,
            phi,
            nabla_xi,
            d_eta,
            xi2,
        })
    }

    // ---- values ----

    pub fn gv(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        pair(&self.conn.g, x, y)
    }

    pub fn fv(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.f.val * x
    }

    pub fn xi_v(&self, i: usize) -> DVector<f64> {
        as_dvec(&self.xi[i].val)
    }

    pub fn xi_bar(&self) -> DVector<f64> {
        (0..self.s).fold(DVector::zeros(self.dim), |acc, i| acc + self.xi_v(i))
    }

    pub fn eta_at(&self, i: usize, x: &DVector<f64>) -> f64 {
        (&self.eta[i].val * x)[(0, 0)]
    }

    pub fn eta_bar(&self, x: &DVector<f64>) -> f64 {
        (0..self.s).map(|i| self.eta_at(i, x)).sum()
    }

    /// Projection onto the contact distribution `𝒟 = ∩ ker η^i`.
    pub fn proj_d(&self, x: &DVector<f64>) -> DVector<f64> {
        (0..self.s).fold(x.clone(), |acc, i| acc - self.xi_v(i) * self.eta_at(i, x))
    }

    /// `hᵢ*`, the g-adjoint of `hᵢ`.
    pub fn h_star(&self, i: usize) -> DMatrix<f64> {
        &self.conn.g_inv * self.h[i].val.transpose() * &self.conn.g
    }

    pub fn d_eta_at(&self, i: usize, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.d_eta[i] * y))
    }

    pub fn phi_at(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.gv(x, &self.fv(y))
    }

    // ---- covariant derivatives ----

    pub fn nabla_f(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.conn.nabla11(&self.f, x)
    }

    pub fn nabla_q(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.conn.nabla11(&self.q, x)
    }

    pub fn nabla_q_tilde(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.conn.nabla11(&self.q_tilde, x)
    }

    pub fn nabla_q_inv(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.conn.nabla11(&self.q_inv, x)
    }

    pub fn nabla_h(&self, i: usize, x: &DVector<f64>) -> DMatrix<f64> {
        self.conn.nabla11(&self.h[i], x)
    }

    pub fn nabla_f_h_tilde(&self, i: usize, x: &DVector<f64>) -> DMatrix<f64> {
        self.conn.nabla11(&self.f_h_tilde[i], x)
    }

    /// `(∇_X Φ)(Y, Z) = g(Y, (∇_X f) Z)`.
    pub fn nabla_phi(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        self.gv(y, &(self.nabla_f(x) * z))
    }

    /// `(∇_X Φ)(Y, Z)` straight from the jet of Φ, a second path for [`Self::nabla_phi`].
    pub fn nabla_phi_direct(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        self.conn.nabla_twoform(&self.phi, x, y, z)
    }

    /// `∇_X ξᵢ`.
    pub fn nabla_xi_at(&self, i: usize, x: &DVector<f64>) -> DVector<f64> {
        &self.nabla_xi[i].val * x
    }

    /// `∇_X ∇_Y ξᵢ − ∇_{∇_X Y} ξᵢ`, the second covariant derivative of ξᵢ.
    pub fn second_nabla_xi(&self, i: usize, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let nxy = self.conn.gamma_along(x) * y;
        self.conn.nabla_nabla_const(&self.xi2[i], x, y) - self.nabla_xi_at(i, &nxy)
    }

    pub fn nabla_vec(&self, y: &MatJet1, x: &DVector<f64>) -> DVector<f64> {
        self.conn.nabla_vec(y, x)
    }

    pub fn r(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.conn.riemann(x, y, z)
    }

    pub fn r4(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        self.conn.riemann4(x, y, z, w)
    }

    // ---- torsion tensors ----

    /// `[S,S](X,Y) = S²[X,Y] + [SX,SY] − S[SX,Y] − S[X,SY]` for vector jets.
    pub fn nijenhuis_bracket(s: &MatJet1, x: &MatJet1, y: &MatJet1) -> DVector<f64> {
        let sx = s * x;
        let sy = s * y;
        let sv = &s.val;
        sv * sv * bracket(x, y) + bracket(&sx, &sy) - sv * bracket(&sx, y) - sv * bracket(x, &sy)
    }

    /// `[S,S](X,Y) = (S∇_Y S − ∇_{SY} S)X − (S∇_X S − ∇_{SX} S)Y`.
    pub fn nijenhuis_nabla(&self, s: &MatJet1, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let sv = &s.val;
        let nab = |v: &DVector<f64>| self.conn.nabla11(s, v);
        (sv * nab(y) - nab(&(sv * y))) * x - (sv * nab(x) - nab(&(sv * x))) * y
    }

    pub fn ff(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        Self::nijenhuis_bracket(&self.f, &const_field(x), &const_field(y))
    }

    /// `N⁽¹⁾ = [f,f] + 2Σ dη^i ⊗ ξᵢ`.
    pub fn n1(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        (0..self.s).fold(self.ff(x, y), |acc, i| acc + self.xi_v(i) * (2.0 * self.d_eta_at(i, x, y)))
    }

    /// `N⁽²⁾ᵢ(X,Y) = 2dη^i(fX,Y) − 2dη^i(fY,X)`.
    pub fn n2(&self, i: usize, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        2.0 * self.d_eta_at(i, &self.fv(x), y) - 2.0 * self.d_eta_at(i, &self.fv(y), x)
    }

    /// `N⁽²⁾ᵢ(X,Y) = (£_{fX}η^i)(Y) − (£_{fY}η^i)(X)`, computed with Lie derivatives.
    pub fn n2_lie(&self, i: usize, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let fx = &self.f * &const_field(x);
        let fy = &self.f * &const_field(y);
        (lie_oneform(&fx, &self.eta[i]) * y)[(0, 0)] - (lie_oneform(&fy, &self.eta[i]) * x)[(0, 0)]
    }

    /// `N⁽³⁾ᵢ X = (£_{ξᵢ} f) X`.
    pub fn n3(&self, i: usize, x: &DVector<f64>) -> DVector<f64> {
        &self.lie_f[i].val * x
    }

    /// `N⁽⁴⁾ᵢⱼ X = (£_{ξᵢ} η^j)(X)`.
    pub fn n4(&self, i: usize, j: usize, x: &DVector<f64>) -> f64 {
        (lie_oneform(&self.xi[i], &self.eta[j]) * x)[(0, 0)]
    }

    /// The printed `N⁽⁵⁾` expression for vector jets. It is not
    /// tensorial: scaling `Y` by a function φ adds `−X(φ) g(fY, Q̃Z)`.
    pub fn n5_printed_jets(&self, x: &MatJet1, y: &MatJet1, z: &MatJet1) -> f64 {
        let gq = &self.g * &self.q_tilde;
        let u = |a: &MatJet1, b: &MatJet1| &(&a.transpose() * &gq) * b;
        let along = |m: &MatJet1, v: &MatJet1| m.along(v.val.as_slice())[(0, 0)];
        let fy = &self.f * y;
        let fz = &self.f * z;
        let qt = |v: &DVector<f64>| &self.q_tilde.val * v;
        let (xv, yv, zv) = (as_dvec(&x.val), as_dvec(&y.val), as_dvec(&z.val));
        let last = bracket(y, &fz) - bracket(z, &fy) - &self.f.val * bracket(y, z);
        along(&u(x, y), &fz) - along(&u(x, z), &fy) + self.gv(&bracket(x, &fz), &qt(&yv))
            - self.gv(&bracket(x, &fy), &qt(&zv))
            + self.gv(&last, &qt(&xv))
    }

    /// Tensorial `N⁽⁵⁾`: the printed expression plus `X(g(fY, Q̃Z))`.
    /// The extra term vanishes on coordinate fields of the built-in charts
    /// and whenever `X = ξᵢ` under `£_{ξᵢ}Q = 0`.
    pub fn n5_jets(&self, x: &MatJet1, y: &MatJet1, z: &MatJet1) -> f64 {
        let gfq = &(&self.g * &self.f).transpose() * &self.q_tilde;
        let w = &(&y.transpose() * &gfq) * z;
        self.n5_printed_jets(x, y, z) + w.along(x.val.as_slice())[(0, 0)]
    }

    pub fn n5(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        self.n5_jets(&const_field(x), &const_field(y), &const_field(z))
    }

    /// `C_{ξᵢ}(X) = −(∇_X ξᵢ)^⊤` for `X ∈ 𝒟`.
    pub fn splitting(&self, i: usize, x: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
        let off = (0..self.s).map(|j| self.eta_at(j, x).abs()).fold(0.0, f64::max);
        if !(off <= tol * 1f64.max(x.amax())) {
            return Err(Error::NotInContactDistribution(off));
        }
        Ok(-self.proj_d(&self.nabla_xi_at(i, x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{paper_example, unit_tangent_flat};
    use crate::jet::Jet1;
    use crate::sampling::{vec_residual, SampleSet};

    fn scaled(v: &DVector<f64>, s: &Jet1) -> MatJet1 {
        const_field(v).scale_jet(s)
    }

    /// `f = a·J` on `𝒟` with a non-constant amplitude, flat metric, `Q = a²` on `𝒟`.
    /// A valid weak structure with `Q̃ ≠ 0` that is not weak almost S.
    fn scaled_complex() -> WeakFStructure {
        use crate::fields::{MetricField, OneForm, Tensor11, VectorField};
        use crate::jet::{ChartSpec, ScalarField};
        let x = ScalarField::coord(0);
        let z = ScalarField::coord(2);
        let a = (x.clone() * 0.3 + 1.2) + z.clone() * z * 0.2 + x.sin() * 0.1;
        let a2 = &a * &a;
        let zero = ScalarField::zero;
        let c = ScalarField::constant;
        let f = Tensor11::new(3, vec![zero(), -&a, zero(), a.clone(), zero(), zero(), zero(), zero(), zero()]).unwrap();
        let q = Tensor11::new(3, vec![a2.clone(), zero(), zero(), zero(), a2, zero(), zero(), zero(), c(1.0)]).unwrap();
        let xi = VectorField::new(vec![zero(), zero(), c(1.0)]);
        let eta = OneForm::new(vec![zero(), zero(), c(1.0)]);
        let chart = ChartSpec::unit_box(vec!["x".into(), "y".into(), "z".into()]).unwrap();
        WeakFStructure::new(1, 1, chart, f, q, vec![xi], vec![eta], MetricField::euclidean(3)).unwrap()
    }

    #[test]
    fn n5_completion_is_tensorial_and_printed_form_is_not() {
        let st = scaled_complex();
        let smp = SampleSet::generate(&st.chart, 4, 11).unwrap();
        assert!(st.validate(&smp).unwrap().passed());
        let mut saw_defect = false;
        for (p, vs) in smp.points.iter().zip(&smp.vectors) {
            let ls = LocalStructure::new(&st, p).unwrap();
            let phi = Jet1 { val: 1.3, grad: (0..ls.dim).map(|k| 0.4 * k as f64 - 0.5).collect() };
            let base = ls.n5(&vs[0], &vs[1], &vs[2]);
            assert!(base.abs() > 1e-6);
            for slot in 0..3 {
                let mut args: Vec<MatJet1> = vs[..3].iter().map(const_field).collect();
                args[slot] = scaled(&vs[slot], &phi);
                let v = ls.n5_jets(&args[0], &args[1], &args[2]);
                assert!((v - 1.3 * base).abs() < 1e-10 * (1.0 + base.abs()), "slot {slot}: {v} vs {}", 1.3 * base);
                let printed_c = ls.n5_printed_jets(&const_field(&vs[0]), &const_field(&vs[1]), &const_field(&vs[2]));
                let printed_s = ls.n5_printed_jets(&args[0], &args[1], &args[2]);
                saw_defect |= (printed_s - 1.3 * printed_c).abs() > 1e-6;
            }
        }
        assert!(saw_defect);
    }

    #[test]
    fn n5_forms_agree_on_paper_coordinate_fields() {
        let st = paper_example(2, 2, 2.0).unwrap();
        let smp = SampleSet::generate(&st.chart, 3, 11).unwrap();
        for (p, vs) in smp.points.iter().zip(&smp.vectors) {
            let ls = LocalStructure::new(&st, p).unwrap();
            let c: Vec<MatJet1> = vs[..3].iter().map(const_field).collect();
            assert!((ls.n5_jets(&c[0], &c[1], &c[2]) - ls.n5_printed_jets(&c[0], &c[1], &c[2])).abs() < 1e-12);
        }
    }

    #[test]
    fn nijenhuis_paths_agree_and_tensorial() {
        for st in [paper_example(1, 2, 2.0).unwrap(), unit_tangent_flat(2).unwrap()] {
            let smp = SampleSet::generate(&st.chart, 4, 3).unwrap();
            for (p, vs) in smp.points.iter().zip(&smp.vectors) {
                let ls = LocalStructure::new(&st, p).unwrap();
                for s in [&ls.f, &ls.q, &ls.h[0]] {
                    let a = LocalStructure::nijenhuis_bracket(s, &const_field(&vs[0]), &const_field(&vs[1]));
                    let b = ls.nijenhuis_nabla(s, &vs[0], &vs[1]);
                    assert!(vec_residual(&a, &b) < 1e-10, "{a} {b}");
                    let phi = Jet1 { val: 0.7, grad: (0..ls.dim).map(|k| 0.3 - 0.1 * k as f64).collect() };
                    let c = LocalStructure::nijenhuis_bracket(s, &scaled(&vs[0], &phi), &const_field(&vs[1]));
                    assert!(vec_residual(&c, &(&a * 0.7)) < 1e-10);
                }
                let id = MatJet1::identity(ls.dim, ls.dim);
                assert!(LocalStructure::nijenhuis_bracket(&id, &const_field(&vs[0]), &const_field(&vs[1])).amax() < 1e-15);
            }
        }
    }

    #[test]
    fn n2_paths_agree() {
        let st = paper_example(2, 1, 0.5).unwrap();
        let smp = SampleSet::generate(&st.chart, 4, 5).unwrap();
        for (p, vs) in smp.points.iter().zip(&smp.vectors) {
            let ls = LocalStructure::new(&st, p).unwrap();
            let a = ls.n2(0, &vs[0], &vs[1]);
            let b = ls.n2_lie(0, &vs[0], &vs[1]);
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn nabla_phi_two_paths() {
        let st = unit_tangent_flat(2).unwrap();
        let smp = SampleSet::generate(&st.chart, 4, 9).unwrap();
        for (p, vs) in smp.points.iter().zip(&smp.vectors) {
            let ls = LocalStructure::new(&st, p).unwrap();
            let a = ls.nabla_phi(&vs[0], &vs[1], &vs[2]);
            let b = ls.nabla_phi_direct(&vs[0], &vs[1], &vs[2]);
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn splitting_rejects_vectors_off_d() {
        let st = paper_example(1, 1, 1.0).unwrap();
        let p = Point::new(vec![0.1, 0.2, 0.3]).unwrap();
        let ls = LocalStructure::new(&st, &p).unwrap();
        let e = ls.xi_v(0);
        assert!(matches!(ls.splitting(0, &e, 1e-9), Err(Error::NotInContactDistribution(_))));
        let x = ls.proj_d(&DVector::from_vec(vec![1.0, 0.5, -0.2]));
        assert!(ls.splitting(0, &x, 1e-9).is_ok());
    }
}
