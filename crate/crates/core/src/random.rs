//! Random instances for property checks and experiments.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::Result;
use crate::measures::{factorial, DiscreteMeasure, RationalMeasure};
use crate::transport::GaussianMeasure;

/// Weights drawn uniformly from `(0.05, 1)` and normalized.
pub fn simplex_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// A measure with `1..=max_atoms` atoms at uniform points of `[0, 1]^dim`.
pub fn discrete_measure<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_atoms: usize) -> Result<DiscreteMeasure> {
    let n = rng.random_range(1..=max_atoms);
    let points = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
    DiscreteMeasure::new(points, simplex_weights(rng, n))
}

/// A measure with `1..=max_atoms` atoms on the grid `{0, 1/g, ..., 1}^dim`.
pub fn grid_measure<R: Rng + ?Sized>(rng: &mut R, dim: usize, g: u32, max_atoms: usize) -> Result<DiscreteMeasure> {
    let n = rng.random_range(1..=max_atoms);
    let points = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(0..=g) as f64 / g as f64).collect())
        .collect();
    DiscreteMeasure::new(points, simplex_weights(rng, n))
}

/// `A A^T + eps I` with `A` uniform in `[-1, 1]^{d x d}`.
pub fn spd<R: Rng + ?Sized>(rng: &mut R, d: usize, eps: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let s = &a * a.transpose() + DMatrix::identity(d, d) * eps;
    (&s + s.transpose()) * 0.5
}

/// A Gaussian with mean uniform in `[-1, 1]^d` and covariance from [`spd`].
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<GaussianMeasure> {
    let mean = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
    GaussianMeasure::new(mean, spd(rng, d, 0.05))
}

/// A measure with `1..=max_atoms` atoms on the given level-`level` grid points
/// (numerator vectors), masses from uniform cuts of `{0, ..., level!}`.
pub fn rational_measure<R: Rng + ?Sized>(
    rng: &mut R,
    level: u32,
    points: &[Vec<i64>],
    max_atoms: usize,
) -> Result<RationalMeasure> {
    if points.is_empty() || max_atoms == 0 {
        return Err(crate::Error::Parameter("need grid points and at least one atom".into()));
    }
    let total = factorial(level)?;
    let atoms = rng.random_range(1..=max_atoms);
    let mut cuts: Vec<u64> = (0..atoms - 1).map(|_| rng.random_range(0..=total)).collect();
    cuts.push(0);
    cuts.push(total);
    cuts.sort_unstable();
    let parts = cuts
        .windows(2)
        .map(|w| (points[rng.random_range(0..points.len())].clone(), w[1] - w[0]))
        .collect();
    RationalMeasure::new(level, parts)
}
