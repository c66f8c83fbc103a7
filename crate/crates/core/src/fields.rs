//! Tensor fields on a chart as arrays of scalar fields, plus the pointwise
//! kernels (brackets, exterior derivatives, Lie derivatives) acting on jets.

use crate::error::{Error, Result};
use crate::jet::{MatJet1, MatJet2, Point, ScalarField};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

/// Normalizations of the exterior derivative.
pub mod conventions {
    /// `dω(X,Y) = ½{X ω(Y) − Y ω(X) − ω([X,Y])}`.
    pub const ONE_FORM_D: f64 = 0.5;
    /// `dΦ(X,Y,Z) = ⅓{X Φ(Y,Z) + Y Φ(Z,X) + Z Φ(X,Y) − Φ([X,Y],Z) − Φ([Z,X],Y) − Φ([Y,Z],X)}`.
    pub const TWO_FORM_D: f64 = 1.0 / 3.0;
}

fn eval_all(comps: &[ScalarField], rows: usize, cols: usize, p: &Point) -> Result<MatJet2> {
    let jets = comps.iter().map(|c| c.eval_jet2(p)).collect::<Result<Vec<_>>>()?;
    Ok(MatJet2::from_jets(rows, cols, &jets, p.dim()))
}

fn eval_vals(comps: &[ScalarField], rows: usize, cols: usize, p: &Point) -> Result<DMatrix<f64>> {
    let v = comps.iter().map(|c| c.eval(p)).collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_row_slice(rows, cols, &v))
}

fn check_dim(p: &Point, dim: usize) -> Result<()> {
    if p.dim() != dim {
        return Err(Error::Shape(format!("point has dim {} but field has dim {dim}", p.dim())));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct VectorField {
    pub comps: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(comps: Vec<ScalarField>) -> Self {
        VectorField { comps }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn coordinate(k: usize, dim: usize) -> Self {
        Self::constant(&DVector::from_fn(dim, |i, _| if i == k { 1.0 } else { 0.0 }))
    }

    pub fn constant(v: &DVector<f64>) -> Self {
        VectorField { comps: v.iter().map(|&x| ScalarField::constant(x)).collect() }
    }

    pub fn scale(&self, c: &ScalarField) -> Self {
        VectorField { comps: self.comps.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, o: &VectorField) -> Self {
        VectorField { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn value(&self, p: &Point) -> Result<DVector<f64>> {
        check_dim(p, self.dim())?;
        Ok(DVector::from_column_slice(eval_vals(&self.comps, self.dim(), 1, p)?.as_slice()))
    }

    pub fn jet(&self, p: &Point) -> Result<MatJet2> {
        check_dim(p, self.dim())?;
        eval_all(&self.comps, self.dim(), 1, p)
    }
}

#[derive(Debug, Clone)]
pub struct OneForm {
    pub comps: Vec<ScalarField>,
}

impl OneForm {
    pub fn new(comps: Vec<ScalarField>) -> Self {
        OneForm { comps }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn value(&self, p: &Point) -> Result<DMatrix<f64>> {
        check_dim(p, self.dim())?;
        eval_vals(&self.comps, 1, self.dim(), p)
    }

    pub fn jet(&self, p: &Point) -> Result<MatJet2> {
        check_dim(p, self.dim())?;
        eval_all(&self.comps, 1, self.dim(), p)
    }
}

/// Mixed tensor `T^a_b`, stored row-major.
#[derive(Debug, Clone)]
pub struct Tensor11 {
    dim: usize,
    comps: Vec<ScalarField>,
}

impl Tensor11 {
    pub fn new(dim: usize, comps: Vec<ScalarField>) -> Result<Self> {
        if comps.len() != dim * dim {
            return Err(Error::Shape(format!("(1,1)-tensor needs {} components, got {}", dim * dim, comps.len())));
        }
        Ok(Tensor11 { dim, comps })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> ScalarField) -> Self {
        let comps = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Tensor11 { dim, comps }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |a, b| ScalarField::constant(if a == b { 1.0 } else { 0.0 }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> &ScalarField {
        &self.comps[a * self.dim + b]
    }

    pub fn value(&self, p: &Point) -> Result<DMatrix<f64>> {
        check_dim(p, self.dim)?;
        eval_vals(&self.comps, self.dim, self.dim, p)
    }

    pub fn jet(&self, p: &Point) -> Result<MatJet2> {
        check_dim(p, self.dim)?;
        eval_all(&self.comps, self.dim, self.dim, p)
    }
}

/// Symmetric metric `g_ab`; the lower triangle shares the upper-triangle fields.
#[derive(Debug, Clone)]
pub struct MetricField {
    dim: usize,
    comps: Vec<ScalarField>,
}

impl MetricField {
    /// Build from `upper(i, j)` for `i <= j`.
    pub fn from_upper(dim: usize, mut upper: impl FnMut(usize, usize) -> ScalarField) -> Self {
        let mut comps = vec![ScalarField::zero(); dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let c = upper(i, j);
                comps[j * dim + i] = c.clone();
                comps[i * dim + j] = c;
            }
        }
        MetricField { dim, comps }
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::from_upper(dim, |i, j| ScalarField::constant(if i == j { 1.0 } else { 0.0 }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> &ScalarField {
        &self.comps[a * self.dim + b]
    }

    pub fn value(&self, p: &Point) -> Result<DMatrix<f64>> {
        check_dim(p, self.dim)?;
        eval_vals(&self.comps, self.dim, self.dim, p)
    }

    pub fn jet(&self, p: &Point) -> Result<MatJet2> {
        check_dim(p, self.dim)?;
        eval_all(&self.comps, self.dim, self.dim, p)
    }
}

/// Antisymmetric 2-form `Φ_ab`; the lower triangle is the negated upper triangle.
#[derive(Debug, Clone)]
pub struct TwoForm {
    dim: usize,
    comps: Vec<ScalarField>,
}

impl TwoForm {
    /// Build from `upper(i, j)` for `i < j`.
    pub fn from_upper(dim: usize, mut upper: impl FnMut(usize, usize) -> ScalarField) -> Self {
        let mut comps = vec![ScalarField::zero(); dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let c = upper(i, j);
                comps[j * dim + i] = -&c;
                comps[i * dim + j] = c;
            }
        }
        TwoForm { dim, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> &ScalarField {
        &self.comps[a * self.dim + b]
    }

    pub fn value(&self, p: &Point) -> Result<DMatrix<f64>> {
        check_dim(p, self.dim)?;
        eval_vals(&self.comps, self.dim, self.dim, p)
    }

    pub fn jet(&self, p: &Point) -> Result<MatJet2> {
        check_dim(p, self.dim)?;
        eval_all(&self.comps, self.dim, self.dim, p)
    }
}

/// Symbolic `dω` in the ½ convention: `(dω)_ab = ½(∂_a ω_b − ∂_b ω_a)`.
pub fn exterior_derivative(omega: &OneForm) -> TwoForm {
    let c = ScalarField::constant(conventions::ONE_FORM_D);
    TwoForm::from_upper(omega.dim(), |a, b| &c * &(&omega.comps[b].partial(a) - &omega.comps[a].partial(b)))
}

/// Cholesky factor of a metric value, failing when it is not positive definite.
pub fn metric_cholesky(g: &DMatrix<f64>, p: &Point) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(g.clone()).ok_or_else(|| Error::SingularMetric(p.coords.clone()))
}

pub fn apply11(t: &Tensor11, x: &VectorField, p: &Point) -> Result<DVector<f64>> {
    Ok(t.value(p)? * x.value(p)?)
}

pub fn metric_pair(g: &MetricField, x: &VectorField, y: &VectorField, p: &Point) -> Result<f64> {
    Ok(pair(&g.value(p)?, &x.value(p)?, &y.value(p)?))
}

/// `T*` with `g(T*X, Y) = g(X, TY)`, computed as `G⁻¹ Tᵀ G`.
pub fn adjoint11(g: &MetricField, t: &Tensor11, p: &Point) -> Result<DMatrix<f64>> {
    let gv = g.value(p)?;
    let ch = metric_cholesky(&gv, p)?;
    Ok(ch.solve(&(t.value(p)?.transpose() * &gv)))
}

pub fn lie_bracket(x: &VectorField, y: &VectorField, p: &Point) -> Result<DVector<f64>> {
    Ok(bracket(&x.jet(p)?.to_jet1(), &y.jet(p)?.to_jet1()))
}

pub fn d_oneform(omega: &OneForm, x: &VectorField, y: &VectorField, p: &Point) -> Result<f64> {
    Ok(d1(&omega.jet(p)?.to_jet1(), &x.jet(p)?.to_jet1(), &y.jet(p)?.to_jet1()))
}

pub fn d_twoform(phi: &TwoForm, x: &VectorField, y: &VectorField, z: &VectorField, p: &Point) -> Result<f64> {
    Ok(d2(&phi.jet(p)?.to_jet1(), &x.jet(p)?.to_jet1(), &y.jet(p)?.to_jet1(), &z.jet(p)?.to_jet1()))
}

/// `(£_V T)X = [V, TX] − T[V, X]`.
pub fn lie_derivative_tensor11(v: &VectorField, t: &Tensor11, x: &VectorField, p: &Point) -> Result<DVector<f64>> {
    let tj = t.jet(p)?.to_jet1();
    let vj = v.jet(p)?.to_jet1();
    let xj = x.jet(p)?.to_jet1();
    let tx = &tj * &xj;
    Ok(bracket(&vj, &tx) - &tj.val * bracket(&vj, &xj))
}

// ---- pointwise kernels ----

/// `g(X, Y)` for a metric value.
pub fn pair(g: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    x.dot(&(g * y))
}

pub fn as_dvec(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// A constant coordinate-component vector field as a jet.
pub fn const_field(v: &DVector<f64>) -> MatJet1 {
    MatJet1::constant(DMatrix::from_column_slice(v.len(), 1, v.as_slice()), v.len())
}

/// `[X,Y]^k = X^j ∂_j Y^k − Y^j ∂_j X^k`.
pub fn bracket(x: &MatJet1, y: &MatJet1) -> DVector<f64> {
    as_dvec(&(y.along(x.val.as_slice()) - x.along(y.val.as_slice())))
}

/// Directional derivative of a scalar jet `u` (a `1 x 1` matrix jet) along `X`.
fn deriv(u: &MatJet1, x: &DMatrix<f64>) -> f64 {
    u.along(x.as_slice())[(0, 0)]
}

/// `dω(X,Y)` for jets of ω (`1 x d`) and X, Y (`d x 1`).
pub fn d1(omega: &MatJet1, x: &MatJet1, y: &MatJet1) -> f64 {
    let wy = omega * y;
    let wx = omega * x;
    let br = bracket(x, y);
    let w_br = (&omega.val * &br)[(0, 0)];
    conventions::ONE_FORM_D * (deriv(&wy, &x.val) - deriv(&wx, &y.val) - w_br)
}

/// `Φ(X, Y)` for a 2-form value.
pub fn form2(phi: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    x.dot(&(phi * y))
}

/// `dΦ(X,Y,Z)` by the coboundary formula.
pub fn d2(phi: &MatJet1, x: &MatJet1, y: &MatJet1, z: &MatJet1) -> f64 {
    let v = |a: &MatJet1, b: &MatJet1| &(&a.transpose() * phi) * b;
    let (xv, yv, zv) = (as_dvec(&x.val), as_dvec(&y.val), as_dvec(&z.val));
    let terms = deriv(&v(y, z), &x.val) + deriv(&v(z, x), &y.val) + deriv(&v(x, y), &z.val)
        - form2(&phi.val, &bracket(x, y), &zv)
        - form2(&phi.val, &bracket(z, x), &yv)
        - form2(&phi.val, &bracket(y, z), &xv);
    conventions::TWO_FORM_D * terms
}

/// The full tensor `£_V T` with first partials:
/// `(£_V T)^a_b = V^c ∂_c T^a_b − T^c_b ∂_c V^a + T^a_c ∂_b V^c`.
pub fn lie11(v: &MatJet2, t: &MatJet2) -> MatJet1 {
    let dim = v.dim();
    let n = t.val.nrows();
    let mut acc = MatJet1::zeros(n, n, dim);
    for c in 0..dim {
        let vc = v.to_jet1().entry(c, 0);
        acc = &acc + &t.partial(c).scale_jet(&vc);
    }
    let dv = v.jacobian();
    let tj = t.to_jet1();
    &(&acc - &(&dv * &tj)) + &(&tj * &dv)
}

/// `(£_V ω)` for a 1-form `ω`: `(£_V ω)_b = V^c ∂_c ω_b + ω_c ∂_b V^c`, value only.
pub fn lie_oneform(v: &MatJet1, omega: &MatJet1) -> DMatrix<f64> {
    let dim = v.dim();
    let dv = DMatrix::from_fn(dim, dim, |a, c| v.d[c][(a, 0)]);
    omega.along(v.val.as_slice()) + &omega.val * dv
}
