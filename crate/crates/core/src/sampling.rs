//! Seeded sample points and tangent vectors.

use crate::error::{Error, Result};
use crate::jet::{ChartSpec, Point};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of random tangent vectors drawn at every sample point.
pub const VECTORS_PER_POINT: usize = 6;

/// Points drawn uniformly from the chart box, each with tangent vectors
/// drawn componentwise from `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<Point>,
    pub vectors: Vec<Vec<DVector<f64>>>,
}

impl SampleSet {
    pub fn generate(chart: &ChartSpec, samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(samples);
        let mut vectors = Vec::with_capacity(samples);
        for _ in 0..samples {
            let coords = chart
                .bounds
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo })
                .collect();
            points.push(Point::new(coords)?);
            vectors.push(
                (0..VECTORS_PER_POINT)
                    .map(|_| DVector::from_fn(chart.dim, |_, _| rng.random_range(-1.0..=1.0)))
                    .collect(),
            );
        }
        Ok(SampleSet { points, vectors })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Scale-aware residual between two vectors:
/// `‖a − b‖∞ / max(1, ‖a‖∞, ‖b‖∞)`.
pub fn vec_residual(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let diff = (a - b).amax();
    diff / 1f64.max(a.amax()).max(b.amax())
}

/// Matrix version of [`vec_residual`].
pub fn mat_residual(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let diff = (a - b).amax();
    diff / 1f64.max(a.amax()).max(b.amax())
}

/// Scalar version of [`vec_residual`].
pub fn scalar_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}
