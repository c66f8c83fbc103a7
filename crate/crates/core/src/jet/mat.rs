use super::{tri, Jet1, Jet2};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use std::ops::{Add, Mul, Neg, Sub};

/// A matrix-valued quantity with its first partials at a point.
///
/// Vectors are `d x 1` and covectors `1 x d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatJet1 {
    pub val: DMatrix<f64>,
    pub d: Vec<DMatrix<f64>>,
}

/// A matrix-valued quantity with first and second partials at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MatJet2 {
    pub val: DMatrix<f64>,
    pub d: Vec<DMatrix<f64>>,
    dd: Vec<DMatrix<f64>>,
}

impl MatJet2 {
    /// Assemble from row-major entry jets.
    pub fn from_jets(rows: usize, cols: usize, jets: &[Jet2], dim: usize) -> Self {
        assert_eq!(jets.len(), rows * cols);
        let val = DMatrix::from_fn(rows, cols, |i, j| jets[i * cols + j].val);
        let d = (0..dim).map(|k| DMatrix::from_fn(rows, cols, |i, j| jets[i * cols + j].grad[k])).collect();
        let mut dd = vec![DMatrix::zeros(rows, cols); dim * (dim + 1) / 2];
        for l in 0..dim {
            for k in 0..=l {
                dd[tri(k, l)] = DMatrix::from_fn(rows, cols, |i, j| jets[i * cols + j].hess(k, l));
            }
        }
        MatJet2 { val, d, dd }
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn dd(&self, k: usize, l: usize) -> &DMatrix<f64> {
        &self.dd[tri(k, l)]
    }

    pub fn to_jet1(&self) -> MatJet1 {
        MatJet1 { val: self.val.clone(), d: self.d.clone() }
    }

    /// The partial along coordinate `k`, with its own first partials.
    pub fn partial(&self, k: usize) -> MatJet1 {
        MatJet1 { val: self.d[k].clone(), d: (0..self.dim()).map(|l| self.dd(k, l).clone()).collect() }
    }

    /// For a column vector `V`, the matrix `(dV)^a_c = ∂_c V^a` with its first partials.
    pub fn jacobian(&self) -> MatJet1 {
        assert_eq!(self.val.ncols(), 1, "jacobian needs a column vector");
        let n = self.dim();
        let rows = self.val.nrows();
        let val = DMatrix::from_fn(rows, n, |a, c| self.d[c][(a, 0)]);
        let d = (0..n).map(|m| DMatrix::from_fn(rows, n, |a, c| self.dd(c, m)[(a, 0)])).collect();
        MatJet1 { val, d }
    }
}

impl MatJet1 {
    pub fn constant(val: DMatrix<f64>, dim: usize) -> Self {
        let (r, c) = val.shape();
        MatJet1 { val, d: vec![DMatrix::zeros(r, c); dim] }
    }

    pub fn identity(n: usize, dim: usize) -> Self {
        Self::constant(DMatrix::identity(n, n), dim)
    }

    pub fn zeros(r: usize, c: usize, dim: usize) -> Self {
        Self::constant(DMatrix::zeros(r, c), dim)
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.val.shape()
    }

    pub fn entry(&self, i: usize, j: usize) -> Jet1 {
        Jet1 { val: self.val[(i, j)], grad: self.d.iter().map(|m| m[(i, j)]).collect() }
    }

    pub fn from_scalar(s: &Jet1) -> Self {
        MatJet1 {
            val: DMatrix::from_element(1, 1, s.val),
            d: s.grad.iter().map(|&g| DMatrix::from_element(1, 1, g)).collect(),
        }
    }

    /// Directional derivative `X(M)` as a matrix.
    pub fn along(&self, x: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.val.nrows(), self.val.ncols());
        for (k, &xk) in x.iter().enumerate() {
            if xk != 0.0 {
                out += &self.d[k] * xk;
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        MatJet1 { val: &self.val * c, d: self.d.iter().map(|m| m * c).collect() }
    }

    pub fn scale_jet(&self, s: &Jet1) -> Self {
        MatJet1 {
            val: &self.val * s.val,
            d: self.d.iter().zip(&s.grad).map(|(m, &g)| m * s.val + &self.val * g).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        MatJet1 { val: self.val.transpose(), d: self.d.iter().map(|m| m.transpose()).collect() }
    }

    pub fn trace(&self) -> Jet1 {
        Jet1 { val: self.val.trace(), grad: self.d.iter().map(|m| m.trace()).collect() }
    }

    /// Inverse, with `∂(A⁻¹) = -A⁻¹ (∂A) A⁻¹`.
    pub fn try_inverse(&self) -> Result<Self> {
        let inv = self
            .val
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Domain("singular matrix in jet inverse".into()))?;
        let d = self.d.iter().map(|m| -(&inv * m * &inv)).collect();
        Ok(MatJet1 { val: inv, d })
    }

    pub fn column(&self, j: usize) -> Self {
        let col = |m: &DMatrix<f64>| DMatrix::from_column_slice(m.nrows(), 1, m.column(j).as_slice());
        MatJet1 { val: col(&self.val), d: self.d.iter().map(col).collect() }
    }

    /// Max absolute entry over value and partials.
    pub fn max_abs(&self) -> f64 {
        self.d.iter().chain(std::iter::once(&self.val)).map(|m| m.amax()).fold(0.0, f64::max)
    }
}

impl Add for &MatJet1 {
    type Output = MatJet1;
    fn add(self, o: &MatJet1) -> MatJet1 {
        MatJet1 { val: &self.val + &o.val, d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &MatJet1 {
    type Output = MatJet1;
    fn sub(self, o: &MatJet1) -> MatJet1 {
        MatJet1 { val: &self.val - &o.val, d: self.d.iter().zip(&o.d).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &MatJet1 {
    type Output = MatJet1;
    fn mul(self, o: &MatJet1) -> MatJet1 {
        MatJet1 {
            val: &self.val * &o.val,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a * &o.val + &self.val * b).collect(),
        }
    }
}

impl Neg for &MatJet1 {
    type Output = MatJet1;
    fn neg(self) -> MatJet1 {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Point, ScalarField};

    fn sample() -> (MatJet2, Vec<ScalarField>, Point) {
        let x = ScalarField::coord(0);
        let y = ScalarField::coord(1);
        let comps = vec![
            x.clone() * y.clone() + 2.0,
            y.clone().sin(),
            x.clone().powi(2),
            y.clone() * y.clone() + x.clone() + 3.0,
        ];
        let p = Point::new(vec![0.3, -0.2]).unwrap();
        let jets: Vec<_> = comps.iter().map(|c| c.eval_jet2(&p).unwrap()).collect();
        (MatJet2::from_jets(2, 2, &jets, 2), comps, p)
    }

    #[test]
    fn inverse_derivative_matches_symbolic() {
        let (m, comps, p) = sample();
        let inv = m.to_jet1().try_inverse().unwrap();
        let det = comps[0].clone() * comps[3].clone() - comps[1].clone() * comps[2].clone();
        let inv00 = comps[3].clone() / det;
        let j = inv00.eval_jet2(&p).unwrap();
        assert!((inv.val[(0, 0)] - j.val).abs() < 1e-14);
        for k in 0..2 {
            assert!((inv.d[k][(0, 0)] - j.grad[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn partial_and_jacobian() {
        let (m, comps, p) = sample();
        let p1 = m.partial(1);
        let j = comps[0].partial(1).eval_jet2(&p).unwrap();
        assert!((p1.val[(0, 0)] - j.val).abs() < 1e-15);
        assert!((p1.d[0][(0, 0)] - j.grad[0]).abs() < 1e-15);
        let col: Vec<_> = comps[..2].iter().map(|c| c.eval_jet2(&p).unwrap()).collect();
        let v = MatJet2::from_jets(2, 1, &col, 2);
        let jac = v.jacobian();
        assert!((jac.val[(1, 1)] - (-0.2f64).cos()).abs() < 1e-15);
        assert!((jac.d[1][(1, 1)] + (-0.2f64).sin()).abs() < 1e-15);
    }

    #[test]
    fn product_rule() {
        let (m, _, _) = sample();
        let a = m.to_jet1();
        let sq = &a * &a;
        for k in 0..2 {
            let expect = &a.d[k] * &a.val + &a.val * &a.d[k];
            assert!((&sq.d[k] - expect).amax() < 1e-15);
        }
    }
}
