//! Built-in structures.
//!
//! * `paper_R2ns`: the left-invariant-style structure on `R^{2n+s}` with
//!   `η^i = (β/2)(dz_i − Σ y_γ dx_γ)`, `ξ_i = (2/β)∂_{z_i}`, `Q = β²` on `𝒟`.
//! * `unit_tangent_flat`: the unit tangent bundle of flat `E^{n+1}` with the
//!   rescaled Sasaki metric, on a stereographic fibre chart.

use crate::error::{Error, Result};
use crate::fields::{MetricField, OneForm, Tensor11, VectorField};
use crate::jet::{ChartSpec, ScalarField};
use crate::structure::WeakFStructure;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "paper_R2ns")]
    PaperR2ns,
    #[serde(rename = "unit_tangent_flat")]
    UnitTangentFlat,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "paper_R2ns" | "paper" => Ok(Family::PaperR2ns),
            "unit_tangent_flat" | "unit_tangent" => Ok(Family::UnitTangentFlat),
            other => Err(Error::Config(format!("unknown example family '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::PaperR2ns => "paper_R2ns",
            Family::UnitTangentFlat => "unit_tangent_flat",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleConfig {
    pub family: Family,
    pub n: usize,
    pub s: usize,
    /// Only used by `paper_R2ns`.
    #[serde(default = "unit_beta")]
    pub beta: f64,
    /// Sampling box per coordinate; the family default when absent.
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<(f64, f64)>>,
}

fn unit_beta() -> f64 {
    1.0
}

impl ExampleConfig {
    pub fn paper(n: usize, s: usize, beta: f64) -> Self {
        ExampleConfig { family: Family::PaperR2ns, n, s, beta, bounds: None }
    }

    pub fn unit_tangent(n: usize) -> Self {
        ExampleConfig { family: Family::UnitTangentFlat, n, s: 1, beta: 1.0, bounds: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.s == 0 {
            return Err(Error::Config("n and s must be at least 1".into()));
        }
        match self.family {
            Family::PaperR2ns => {
                if !(self.beta > 0.0 && self.beta.is_finite()) {
                    return Err(Error::Config(format!("beta must be a positive real, got {}", self.beta)));
                }
            }
            Family::UnitTangentFlat => {
                if self.s != 1 {
                    return Err(Error::Config("unit_tangent_flat requires s = 1".into()));
                }
                if self.n > 2 {
                    return Err(Error::Config("unit_tangent_flat supports n = 1 or n = 2".into()));
                }
            }
        }
        if let Some(b) = &self.bounds {
            if b.len() != 2 * self.n + self.s {
                return Err(Error::Config(format!("box has {} intervals, expected {}", b.len(), 2 * self.n + self.s)));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<WeakFStructure> {
        match self.family {
            Family::PaperR2ns => build_paper_example(self),
            Family::UnitTangentFlat => build_unit_tangent_flat(self),
        }
    }
}

fn c(v: f64) -> ScalarField {
    ScalarField::constant(v)
}

fn names(prefixes: &[(&str, usize)]) -> Vec<String> {
    prefixes.iter().flat_map(|&(p, k)| (1..=k).map(move |i| format!("{p}{i}"))).collect()
}

fn chart_for(cfg: &ExampleConfig, coord_names: Vec<String>, default: Vec<(f64, f64)>) -> Result<ChartSpec> {
    ChartSpec::new(coord_names, cfg.bounds.clone().unwrap_or(default))
}

pub fn build_paper_example(cfg: &ExampleConfig) -> Result<WeakFStructure> {
    if cfg.family != Family::PaperR2ns {
        return Err(Error::Config("build_paper_example needs family paper_R2ns".into()));
    }
    cfg.validate()?;
    let (n, s, beta) = (cfg.n, cfg.s, cfg.beta);
    let dim = 2 * n + s;
    let chart = chart_for(cfg, names(&[("x", n), ("y", n), ("z", s)]), vec![(-1.0, 1.0); dim])?;
    let (xs, ys, zs) = (0..n, n..2 * n, 2 * n..dim);
    let y = |gamma: usize| ScalarField::coord(n + gamma);
    let b2 = beta * beta;

    let g = MetricField::from_upper(dim, |a, b| {
        if xs.contains(&a) && xs.contains(&b) {
            let delta = if a == b { 0.25 } else { 0.0 };
            c(delta) + y(a) * y(b) * (b2 * s as f64 / 4.0)
        } else if xs.contains(&a) && zs.contains(&b) {
            y(a) * (-b2 / 4.0)
        } else if a == b && ys.contains(&a) {
            c(0.25)
        } else if a == b && zs.contains(&a) {
            c(b2 / 4.0)
        } else {
            ScalarField::zero()
        }
    });

    // f ∂x_γ = −β ∂y_γ,  f ∂y_γ = β(∂x_γ + y_γ Σ ∂z_i),  f ∂z_i = 0
    let f = Tensor11::from_fn(dim, |a, b| {
        if xs.contains(&a) && b == a + n {
            c(beta)
        } else if ys.contains(&a) && b + n == a {
            c(-beta)
        } else if zs.contains(&a) && ys.contains(&b) {
            y(b - n) * beta
        } else {
            ScalarField::zero()
        }
    });

    // Q = β² on x and y, Q ∂x_γ picks up (β² − 1) y_γ Σ ∂z_i, Q ∂z_i = ∂z_i
    let q = Tensor11::from_fn(dim, |a, b| {
        if a == b {
            c(if zs.contains(&a) { 1.0 } else { b2 })
        } else if zs.contains(&a) && xs.contains(&b) {
            y(b) * (b2 - 1.0)
        } else {
            ScalarField::zero()
        }
    });

    let xi = zs.clone().map(|zi| VectorField::new((0..dim).map(|k| c(if k == zi { 2.0 / beta } else { 0.0 })).collect())).collect();
    let eta = zs
        .clone()
        .map(|zi| {
            OneForm::new(
                (0..dim)
                    .map(|k| {
                        if xs.contains(&k) {
                            y(k) * (-beta / 2.0)
                        } else if k == zi {
                            c(beta / 2.0)
                        } else {
                            ScalarField::zero()
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    WeakFStructure::new(n, s, chart, f, q, xi, eta, g)
}

/// The frame `E_γ = 2∂y_γ`, `F_γ = 2(∂x_γ + y_γ Σ ∂z_i)` of the paper family.
pub fn paper_frame(n: usize, s: usize) -> (Vec<VectorField>, Vec<VectorField>) {
    let dim = 2 * n + s;
    let e = (0..n).map(|g| VectorField::new((0..dim).map(|k| c(if k == n + g { 2.0 } else { 0.0 })).collect())).collect();
    let f = (0..n)
        .map(|g| {
            VectorField::new(
                (0..dim)
                    .map(|k| {
                        if k == g {
                            c(2.0)
                        } else if k >= 2 * n {
                            ScalarField::coord(n + g) * 2.0
                        } else {
                            ScalarField::zero()
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    (e, f)
}

pub fn build_unit_tangent_flat(cfg: &ExampleConfig) -> Result<WeakFStructure> {
    if cfg.family != Family::UnitTangentFlat {
        return Err(Error::Config("build_unit_tangent_flat needs family unit_tangent_flat".into()));
    }
    cfg.validate()?;
    let n = cfg.n;
    let m = n + 1;
    let dim = 2 * n + 1;
    let mut default = vec![(-1.0, 1.0); m];
    default.extend(vec![(-0.9, 0.9); n]);
    let chart = chart_for(cfg, names(&[("x", m), ("u", n)]), default)?;

    // inverse stereographic map u ↦ v ∈ S^n from the south pole chart
    let u: Vec<ScalarField> = (0..n).map(|k| ScalarField::coord(m + k)).collect();
    let r2 = ScalarField::sum(u.iter().map(|uk| uk * uk));
    let den = r2.clone() + 1.0;
    let v: Vec<ScalarField> = (0..m)
        .map(|a| if a < n { u[a].clone() * 2.0 / den.clone() } else { (1.0 - r2.clone()) / den.clone() })
        .collect();
    // dv_a/du_k, and the fibre metric factor λ² = 4/den²
    let dv = |a: usize, k: usize| v[a].partial(m + k);
    let inv_lambda2 = (&den * &den) * 0.25;

    let g = MetricField::from_upper(dim, |a, b| {
        if a != b {
            ScalarField::zero()
        } else if a < m {
            c(0.25)
        } else {
            1.0 / (&den * &den)
        }
    });
    let f = Tensor11::from_fn(dim, |a, b| {
        if a >= m && b < m {
            &dv(b, a - m) * &inv_lambda2
        } else if a < m && b >= m {
            -dv(a, b - m)
        } else {
            ScalarField::zero()
        }
    });
    let q = Tensor11::identity(dim);
    let xi = VectorField::new((0..dim).map(|k| if k < m { v[k].clone() * 2.0 } else { ScalarField::zero() }).collect());
    let eta = OneForm::new((0..dim).map(|k| if k < m { v[k].clone() * 0.5 } else { ScalarField::zero() }).collect());
    WeakFStructure::new(n, 1, chart, f, q, vec![xi], vec![eta], g)
}

pub fn paper_example(n: usize, s: usize, beta: f64) -> Result<WeakFStructure> {
    build_paper_example(&ExampleConfig::paper(n, s, beta))
}

pub fn unit_tangent_flat(n: usize) -> Result<WeakFStructure> {
    build_unit_tangent_flat(&ExampleConfig::unit_tangent(n))
}

/// Flat `R^{2n} × R^s` with the standard complex structure and closed `η^i = dz_i`.
pub fn flat_cosymplectic(n: usize, s: usize) -> Result<WeakFStructure> {
    let dim = 2 * n + s;
    let chart = ChartSpec::unit_box(names(&[("x", n), ("y", n), ("z", s)]))?;
    let f = Tensor11::from_fn(dim, |a, b| {
        if a < n && b == a + n {
            c(-1.0)
        } else if (n..2 * n).contains(&a) && b + n == a {
            c(1.0)
        } else {
            ScalarField::zero()
        }
    });
    let unit = |k: usize| (0..dim).map(move |j| c(if j == k { 1.0 } else { 0.0 }));
    let xi = (2 * n..dim).map(|k| VectorField::new(unit(k).collect())).collect();
    let eta = (2 * n..dim).map(|k| OneForm::new(unit(k).collect())).collect();
    WeakFStructure::new(n, s, chart, f, Tensor11::identity(dim), xi, eta, MetricField::euclidean(dim))
}
