//! Second-order forward-mode jets, scalar fields on a chart, and matrix-valued jets.

mod fd;
mod field;
mod mat;

pub use fd::fd_oracle;
pub use field::ScalarField;
pub use mat::{MatJet1, MatJet2};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A coordinate chart with a sampling box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub dim: usize,
    pub coord_names: Vec<String>,
    pub bounds: Vec<(f64, f64)>,
}

impl ChartSpec {
    pub fn new(coord_names: Vec<String>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if coord_names.is_empty() {
            return Err(Error::Config("chart must have at least one coordinate".into()));
        }
        if coord_names.len() != bounds.len() {
            return Err(Error::Config(format!(
                "chart has {} coordinate names but {} intervals",
                coord_names.len(),
                bounds.len()
            )));
        }
        for (name, &(lo, hi)) in coord_names.iter().zip(&bounds) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!("empty or invalid interval for {name}: [{lo}, {hi}]")));
            }
        }
        Ok(ChartSpec { dim: coord_names.len(), coord_names, bounds })
    }

    /// Chart with every coordinate sampled from `[-1, 1]`.
    pub fn unit_box(coord_names: Vec<String>) -> Result<Self> {
        let b = vec![(-1.0, 1.0); coord_names.len()];
        Self::new(coord_names, b)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coord_names.iter().position(|c| c == name)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim && p.coords.iter().zip(&self.bounds).all(|(x, &(lo, hi))| *x >= lo && *x <= hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(x) = coords.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate {x}")));
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

/// Value, gradient and Hessian of a scalar at a point.
///
/// The Hessian is stored as a packed triangle, so it is symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub val: f64,
    pub grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(c: f64, dim: usize) -> Self {
        Jet2 { val: c, grad: vec![0.0; dim], hess: vec![0.0; dim * (dim + 1) / 2] }
    }

    /// The coordinate function `x_k` evaluated at `x`.
    pub fn variable(k: usize, x: f64, dim: usize) -> Self {
        let mut j = Self::constant(x, dim);
        j.grad[k] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[tri(i, j)]
    }

    pub fn hess_matrix(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.hess(i, j)).collect()).collect()
    }

    /// First-order jet of the partial derivative along coordinate `k`.
    pub fn partial(&self, k: usize) -> Jet1 {
        Jet1 { val: self.grad[k], grad: (0..self.dim()).map(|j| self.hess(k, j)).collect() }
    }

    pub fn to_jet1(&self) -> Jet1 {
        Jet1 { val: self.val, grad: self.grad.clone() }
    }

    pub fn is_finite(&self) -> bool {
        self.val.is_finite() && self.grad.iter().all(|x| x.is_finite()) && self.hess.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, c: f64) -> Self {
        Jet2 {
            val: self.val * c,
            grad: self.grad.iter().map(|x| x * c).collect(),
            hess: self.hess.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add_const(&self, c: f64) -> Self {
        let mut r = self.clone();
        r.val += c;
        r
    }

    /// Chain rule for a unary function with value `f0`, first derivative `f1`, second `f2`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let d = self.dim();
        let grad = self.grad.iter().map(|g| f1 * g).collect();
        let mut hess = vec![0.0; self.hess.len()];
        for j in 0..d {
            for i in 0..=j {
                hess[tri(i, j)] = f2 * self.grad[i] * self.grad[j] + f1 * self.hess[tri(i, j)];
            }
        }
        Jet2 { val: f0, grad, hess }
    }

    pub fn recip(&self) -> Result<Self> {
        let u = self.val;
        if u == 0.0 || !u.is_finite() {
            return Err(Error::Domain(format!("division by {u}")));
        }
        let r = 1.0 / u;
        Ok(self.chain(r, -r * r, 2.0 * r * r * r))
    }

    pub fn div(&self, other: &Jet2) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn powi(&self, n: i32) -> Result<Self> {
        let u = self.val;
        if n < 0 && u == 0.0 {
            return Err(Error::Domain(format!("0 raised to negative power {n}")));
        }
        let f0 = u.powi(n);
        let f1 = if n == 0 { 0.0 } else { n as f64 * u.powi(n - 1) };
        let f2 = if n == 0 || n == 1 { 0.0 } else { (n * (n - 1)) as f64 * u.powi(n - 2) };
        Ok(self.chain(f0, f1, f2))
    }

    pub fn powf(&self, a: f64) -> Result<Self> {
        let u = self.val;
        if u <= 0.0 {
            return Err(Error::Domain(format!("non-integer power {a} of nonpositive {u}")));
        }
        Ok(self.chain(u.powf(a), a * u.powf(a - 1.0), a * (a - 1.0) * u.powf(a - 2.0)))
    }

    pub fn sqrt(&self) -> Result<Self> {
        let u = self.val;
        if u <= 0.0 {
            return Err(Error::Domain(format!("square root of nonpositive {u}")));
        }
        let r = u.sqrt();
        Ok(self.chain(r, 0.5 / r, -0.25 / (r * u)))
    }

    pub fn exp(&self) -> Self {
        let e = self.val.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Result<Self> {
        let u = self.val;
        if u <= 0.0 {
            return Err(Error::Domain(format!("logarithm of nonpositive {u}")));
        }
        Ok(self.chain(u.ln(), 1.0 / u, -1.0 / (u * u)))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, o: &Jet2) -> Jet2 {
        Jet2 {
            val: self.val + o.val,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, o: &Jet2) -> Jet2 {
        Jet2 {
            val: self.val - o.val,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a - b).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, o: &Jet2) -> Jet2 {
        let d = self.dim();
        let grad = (0..d).map(|k| self.val * o.grad[k] + o.val * self.grad[k]).collect();
        let mut hess = vec![0.0; self.hess.len()];
        for j in 0..d {
            for i in 0..=j {
                let t = tri(i, j);
                hess[t] = self.val * o.hess[t]
                    + o.val * self.hess[t]
                    + self.grad[i] * o.grad[j]
                    + self.grad[j] * o.grad[i];
            }
        }
        Jet2 { val: self.val * o.val, grad, hess }
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

/// Value and gradient of a scalar at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet1 {
    pub val: f64,
    pub grad: Vec<f64>,
}

impl Jet1 {
    pub fn constant(c: f64, dim: usize) -> Self {
        Jet1 { val: c, grad: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn scale(&self, c: f64) -> Self {
        Jet1 { val: self.val * c, grad: self.grad.iter().map(|x| x * c).collect() }
    }

    fn chain(&self, f0: f64, f1: f64) -> Self {
        Jet1 { val: f0, grad: self.grad.iter().map(|g| f1 * g).collect() }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.val == 0.0 {
            return Err(Error::Domain("division by 0".into()));
        }
        let r = 1.0 / self.val;
        Ok(self.chain(r, -r * r))
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.val <= 0.0 {
            return Err(Error::Domain(format!("square root of nonpositive {}", self.val)));
        }
        let r = self.val.sqrt();
        Ok(self.chain(r, 0.5 / r))
    }

    /// Directional derivative `X(u)`.
    pub fn along(&self, x: &[f64]) -> f64 {
        self.grad.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

impl Add for &Jet1 {
    type Output = Jet1;
    fn add(self, o: &Jet1) -> Jet1 {
        Jet1 { val: self.val + o.val, grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Jet1 {
    type Output = Jet1;
    fn sub(self, o: &Jet1) -> Jet1 {
        Jet1 { val: self.val - o.val, grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Jet1 {
    type Output = Jet1;
    fn mul(self, o: &Jet1) -> Jet1 {
        Jet1 {
            val: self.val * o.val,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| self.val * b + o.val * a).collect(),
        }
    }
}
