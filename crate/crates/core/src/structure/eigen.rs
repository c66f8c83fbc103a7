use super::LocalStructure;
use crate::connection::gram_schmidt;
use crate::error::{Error, Result};
use crate::sampling::mat_residual;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigenvalues closer than this (relative to `max(1, λ)`) share a cluster.
pub const CLUSTER_TOL: f64 = 1e-6;

/// g-orthonormal eigenbases of `h̃ᵢ` on the contact distribution, grouped
/// into the clusters `{λ, −λ, 0}`, together with a basis of `ker f`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSplit {
    pub lambda: f64,
    /// Eigenvalues of `h̃ᵢ` restricted to `𝒟`, ascending.
    pub eigenvalues: Vec<f64>,
    pub ker: Vec<DVector<f64>>,
    pub plus: Vec<DVector<f64>>,
    pub minus: Vec<DVector<f64>>,
    /// Eigenvalue-0 vectors inside `𝒟` (all of `𝒟` when `λ = 0`).
    pub null: Vec<DVector<f64>>,
    /// Departure of `h̃ᵢ|𝒟` from g-self-adjointness.
    pub asymmetry: f64,
}

fn columns(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    (0..m.ncols()).map(|c| m.column(c).into_owned()).collect()
}

pub fn eigen_split(ls: &LocalStructure, i: usize, tol: f64) -> Result<EigenSplit> {
    let d = ls.dim;
    let g = &ls.conn.g;
    let proj = DMatrix::from_columns(&(0..d).map(|k| ls.proj_d(&DVector::from_fn(d, |r, _| if r == k { 1.0 } else { 0.0 }))).collect::<Vec<_>>());
    let b = gram_schmidt(g, &proj);
    if b.ncols() != 2 * ls.n {
        return Err(Error::DegenerateSpectrum(format!("contact distribution has rank {} instead of {}", b.ncols(), 2 * ls.n)));
    }
    let ker = columns(&gram_schmidt(g, &DMatrix::from_columns(&(0..ls.s).map(|j| ls.xi_v(j)).collect::<Vec<_>>())));

    let m = b.transpose() * g * &ls.h_tilde[i].val * &b;
    let asymmetry = mat_residual(&m, &m.transpose());
    let eig = SymmetricEigen::new((&m + m.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[c]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::DegenerateSpectrum("non-finite eigenvalue".into()));
    }
    let vec_of = |k: usize| &b * eig.eigenvectors.column(k);

    let lambda_raw = eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let radius = tol * lambda_raw.max(1.0);
    let (mut plus, mut minus, mut null) = (Vec::new(), Vec::new(), Vec::new());
    let lambda = if lambda_raw <= radius {
        null = order.iter().map(|&k| vec_of(k)).collect();
        0.0
    } else {
        let pos: Vec<f64> = eigenvalues.iter().copied().filter(|&e| e > radius).collect();
        let lam = pos.iter().sum::<f64>() / pos.len().max(1) as f64;
        for &k in &order {
            let e = eig.eigenvalues[k];
            if (e - lam).abs() <= radius {
                plus.push(vec_of(k));
            } else if (e + lam).abs() <= radius {
                minus.push(vec_of(k));
            } else if e.abs() <= radius {
                null.push(vec_of(k));
            } else {
                return Err(Error::DegenerateSpectrum(format!(
                    "eigenvalue {e} is not within {radius:e} of 0 or ±{lam} (spectrum {eigenvalues:?})"
                )));
            }
        }
        if plus.len() != minus.len() {
            return Err(Error::DegenerateSpectrum(format!(
                "unpaired spectrum: {} eigenvalues at +{lam}, {} at -{lam}",
                plus.len(),
                minus.len()
            )));
        }
        lam
    };
    Ok(EigenSplit { lambda, eigenvalues, ker, plus, minus, null, asymmetry })
}

impl EigenSplit {
    /// All basis vectors, as columns `[ker | plus | minus | null]`.
    pub fn frame(&self) -> DMatrix<f64> {
        let all: Vec<DVector<f64>> = self.ker.iter().chain(&self.plus).chain(&self.minus).chain(&self.null).cloned().collect();
        DMatrix::from_columns(&all)
    }

    /// g-projector onto the span of `basis` (assumed g-orthonormal).
    pub fn projector(g: &DMatrix<f64>, basis: &[DVector<f64>]) -> DMatrix<f64> {
        let d = g.nrows();
        basis.iter().fold(DMatrix::zeros(d, d), |acc, v| acc + v * (v.transpose() * g))
    }
}
