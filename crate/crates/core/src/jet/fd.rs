use super::{Point, ScalarField};
use crate::error::Result;

/// Central-difference gradient and Hessian of `field` at `p` with step `h`.
///
/// Independent of the jet arithmetic; only plain evaluation is used.
pub fn fd_oracle(field: &ScalarField, p: &Point, h: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let d = p.dim();
    let at = |shifts: &[(usize, f64)]| -> Result<f64> {
        let mut q = p.clone();
        for &(k, s) in shifts {
            q.coords[k] += s;
        }
        field.eval(&q)
    };
    let f0 = field.eval(p)?;
    let mut grad = vec![0.0; d];
    let mut hess = vec![vec![0.0; d]; d];
    for k in 0..d {
        let fp = at(&[(k, h)])?;
        let fm = at(&[(k, -h)])?;
        grad[k] = (fp - fm) / (2.0 * h);
        hess[k][k] = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for k in 0..d {
        for l in (k + 1)..d {
            let v = (at(&[(k, h), (l, h)])? - at(&[(k, h), (l, -h)])? - at(&[(k, -h), (l, h)])?
                + at(&[(k, -h), (l, -h)])?)
                / (4.0 * h * h);
            hess[k][l] = v;
            hess[l][k] = v;
        }
    }
    Ok((grad, hess))
}
