use super::{Jet2, Point};
use crate::error::{Error, Result};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

#[derive(Debug)]
enum Node {
    Const(f64),
    Coord(usize),
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Div(ScalarField, ScalarField),
    Neg(ScalarField),
    Powi(ScalarField, i32),
    Powf(ScalarField, f64),
    Sqrt(ScalarField),
    Exp(ScalarField),
    Ln(ScalarField),
    Sin(ScalarField),
    Cos(ScalarField),
}

/// A scalar function on a chart, built from coordinates and constants.
///
/// Cloning is cheap (shared expression tree). Trivial constant arithmetic is
/// folded on construction so that symbolic partials stay small.
#[derive(Clone)]
pub struct ScalarField(Arc<Node>);

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}"),
            Node::Coord(k) => write!(f, "x{k}"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "{a}*{b}"),
            Node::Div(a, b) => write!(f, "{a}/({b})"),
            Node::Neg(a) => write!(f, "-{a}"),
            Node::Powi(a, n) => write!(f, "{a}^{n}"),
            Node::Powf(a, p) => write!(f, "{a}^{p}"),
            Node::Sqrt(a) => write!(f, "sqrt({a})"),
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Ln(a) => write!(f, "ln({a})"),
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
        }
    }
}

impl ScalarField {
    fn node(n: Node) -> Self {
        ScalarField(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn coord(k: usize) -> Self {
        Self::node(Node::Coord(k))
    }

    pub fn as_const(&self) -> Option<f64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn powi(&self, n: i32) -> Self {
        match (self.as_const(), n) {
            (_, 0) => Self::one(),
            (_, 1) => self.clone(),
            (Some(c), _) if n > 0 || c != 0.0 => Self::constant(c.powi(n)),
            _ => Self::node(Node::Powi(self.clone(), n)),
        }
    }

    pub fn powf(&self, p: f64) -> Self {
        Self::node(Node::Powf(self.clone(), p))
    }

    pub fn sqrt(&self) -> Self {
        Self::node(Node::Sqrt(self.clone()))
    }

    pub fn exp(&self) -> Self {
        Self::node(Node::Exp(self.clone()))
    }

    pub fn ln(&self) -> Self {
        Self::node(Node::Ln(self.clone()))
    }

    pub fn sin(&self) -> Self {
        Self::node(Node::Sin(self.clone()))
    }

    pub fn cos(&self) -> Self {
        Self::node(Node::Cos(self.clone()))
    }

    /// Sum of a sequence of fields (zero when empty).
    pub fn sum<I: IntoIterator<Item = ScalarField>>(it: I) -> Self {
        it.into_iter().fold(Self::zero(), |acc, x| &acc + &x)
    }

    /// Plain value at `p`.
    pub fn eval(&self, p: &Point) -> Result<f64> {
        self.eval_coords(&p.coords)
    }

    fn eval_coords(&self, x: &[f64]) -> Result<f64> {
        let v = match &*self.0 {
            Node::Const(c) => *c,
            Node::Coord(k) => *x.get(*k).ok_or_else(|| Error::Shape(format!("coordinate {k} outside point")))?,
            Node::Add(a, b) => a.eval_coords(x)? + b.eval_coords(x)?,
            Node::Sub(a, b) => a.eval_coords(x)? - b.eval_coords(x)?,
            Node::Mul(a, b) => a.eval_coords(x)? * b.eval_coords(x)?,
            Node::Div(a, b) => {
                let d = b.eval_coords(x)?;
                if d == 0.0 {
                    return Err(Error::Domain("division by 0".into()));
                }
                a.eval_coords(x)? / d
            }
            Node::Neg(a) => -a.eval_coords(x)?,
            Node::Powi(a, n) => {
                let u = a.eval_coords(x)?;
                if *n < 0 && u == 0.0 {
                    return Err(Error::Domain(format!("0 raised to negative power {n}")));
                }
                u.powi(*n)
            }
            Node::Powf(a, q) => {
                let u = a.eval_coords(x)?;
                if u <= 0.0 {
                    return Err(Error::Domain(format!("non-integer power of nonpositive {u}")));
                }
                u.powf(*q)
            }
            Node::Sqrt(a) => {
                let u = a.eval_coords(x)?;
                if u <= 0.0 {
                    return Err(Error::Domain(format!("square root of nonpositive {u}")));
                }
                u.sqrt()
            }
            Node::Exp(a) => a.eval_coords(x)?.exp(),
            Node::Ln(a) => {
                let u = a.eval_coords(x)?;
                if u <= 0.0 {
                    return Err(Error::Domain(format!("logarithm of nonpositive {u}")));
                }
                u.ln()
            }
            Node::Sin(a) => a.eval_coords(x)?.sin(),
            Node::Cos(a) => a.eval_coords(x)?.cos(),
        };
        Ok(v)
    }

    /// Value with exact first and second partials at `p`.
    pub fn eval_jet2(&self, p: &Point) -> Result<Jet2> {
        let j = self.jet(&p.coords)?;
        if !j.is_finite() {
            return Err(Error::Domain(format!("non-finite jet of {self} at {:?}", p.coords)));
        }
        Ok(j)
    }

    fn jet(&self, x: &[f64]) -> Result<Jet2> {
        let d = x.len();
        Ok(match &*self.0 {
            Node::Const(c) => Jet2::constant(*c, d),
            Node::Coord(k) => {
                if *k >= d {
                    return Err(Error::Shape(format!("coordinate {k} outside point of dim {d}")));
                }
                Jet2::variable(*k, x[*k], d)
            }
            Node::Add(a, b) => &a.jet(x)? + &b.jet(x)?,
            Node::Sub(a, b) => &a.jet(x)? - &b.jet(x)?,
            Node::Mul(a, b) => match (a.as_const(), b.as_const()) {
                (Some(c), _) => b.jet(x)?.scale(c),
                (_, Some(c)) => a.jet(x)?.scale(c),
                _ => &a.jet(x)? * &b.jet(x)?,
            },
            Node::Div(a, b) => match b.as_const() {
                Some(c) if c != 0.0 => a.jet(x)?.scale(1.0 / c),
                _ => a.jet(x)?.div(&b.jet(x)?)?,
            },
            Node::Neg(a) => -&a.jet(x)?,
            Node::Powi(a, n) => a.jet(x)?.powi(*n)?,
            Node::Powf(a, q) => a.jet(x)?.powf(*q)?,
            Node::Sqrt(a) => a.jet(x)?.sqrt()?,
            Node::Exp(a) => a.jet(x)?.exp(),
            Node::Ln(a) => a.jet(x)?.ln()?,
            Node::Sin(a) => a.jet(x)?.sin(),
            Node::Cos(a) => a.jet(x)?.cos(),
        })
    }

    /// Symbolic partial derivative along coordinate `k`.
    pub fn partial(&self, k: usize) -> ScalarField {
        match &*self.0 {
            Node::Const(_) => Self::zero(),
            Node::Coord(j) => Self::constant(if *j == k { 1.0 } else { 0.0 }),
            Node::Add(a, b) => &a.partial(k) + &b.partial(k),
            Node::Sub(a, b) => &a.partial(k) - &b.partial(k),
            Node::Mul(a, b) => &(&a.partial(k) * b) + &(a * &b.partial(k)),
            Node::Div(a, b) => {
                let num = &(&a.partial(k) * b) - &(a * &b.partial(k));
                &num / &b.powi(2)
            }
            Node::Neg(a) => -&a.partial(k),
            Node::Powi(a, n) => &(&Self::constant(*n as f64) * &a.powi(n - 1)) * &a.partial(k),
            Node::Powf(a, q) => &(&Self::constant(*q) * &a.powf(q - 1.0)) * &a.partial(k),
            Node::Sqrt(a) => &a.partial(k) / &(&Self::constant(2.0) * self),
            Node::Exp(a) => self * &a.partial(k),
            Node::Ln(a) => &a.partial(k) / a,
            Node::Sin(a) => &a.cos() * &a.partial(k),
            Node::Cos(a) => -&(&a.sin() * &a.partial(k)),
        }
    }
}

impl From<f64> for ScalarField {
    fn from(c: f64) -> Self {
        ScalarField::constant(c)
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, o: &ScalarField) -> ScalarField {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => ScalarField::constant(a + b),
            (Some(a), _) if a == 0.0 => o.clone(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => ScalarField::node(Node::Add(self.clone(), o.clone())),
        }
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, o: &ScalarField) -> ScalarField {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => ScalarField::constant(a - b),
            (Some(a), _) if a == 0.0 => -o,
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => ScalarField::node(Node::Sub(self.clone(), o.clone())),
        }
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, o: &ScalarField) -> ScalarField {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => ScalarField::constant(a * b),
            (Some(a), _) if a == 0.0 => ScalarField::zero(),
            (_, Some(b)) if b == 0.0 => ScalarField::zero(),
            (Some(a), _) if a == 1.0 => o.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => ScalarField::node(Node::Mul(self.clone(), o.clone())),
        }
    }
}

impl Div for &ScalarField {
    type Output = ScalarField;
    fn div(self, o: &ScalarField) -> ScalarField {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => ScalarField::constant(a / b),
            (Some(a), _) if a == 0.0 => ScalarField::zero(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => ScalarField::node(Node::Div(self.clone(), o.clone())),
        }
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        match &*self.0 {
            Node::Const(c) => ScalarField::constant(-c),
            Node::Neg(a) => a.clone(),
            _ => ScalarField::node(Node::Neg(self.clone())),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ScalarField {
            type Output = ScalarField;
            fn $m(self, o: ScalarField) -> ScalarField { (&self).$m(&o) }
        }
        impl $tr<f64> for ScalarField {
            type Output = ScalarField;
            fn $m(self, o: f64) -> ScalarField { (&self).$m(&ScalarField::constant(o)) }
        }
        impl $tr<ScalarField> for f64 {
            type Output = ScalarField;
            fn $m(self, o: ScalarField) -> ScalarField { (&ScalarField::constant(self)).$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        -&self
    }
}
