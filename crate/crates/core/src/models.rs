//! Two generative models with known Bayes risk, used for consistency curves.

use crate::error::Result;
use crate::knn::{Atom, GenerativeModel};
use crate::measures::DiscreteMeasure;
use crate::rng::substream;
use crate::transport::{euclidean, w2_gaussian, wp_discrete, GaussianMeasure};
use crate::wavelet::{random_density, WaveletBasis, WaveletDensity, DEFAULT_BASE_LEVEL, DEFAULT_TOP_LEVEL};

/// Five measures on the three-point space `{0, 1, 3}` with
/// `eta = (0.1, 0.3, 0.6, 0.8, 0.95)`; Bayes risk `0.22`.
pub fn finite_support_model() -> Result<GenerativeModel<DiscreteMeasure>> {
    let atom = |xs: &[f64], ws: &[f64], prob, eta| -> Result<Atom<DiscreteMeasure>> {
        Ok(Atom { item: DiscreteMeasure::on_line(xs, ws)?, prob, eta })
    };
    GenerativeModel::atomic(vec![
        atom(&[0.0], &[1.0], 0.3, 0.1)?,
        atom(&[0.0, 1.0], &[0.5, 0.5], 0.25, 0.3)?,
        atom(&[1.0], &[1.0], 0.2, 0.6)?,
        atom(&[1.0, 3.0], &[0.5, 0.5], 0.15, 0.8)?,
        atom(&[3.0], &[1.0], 0.1, 0.95)?,
    ])
}

/// `W_1` on the finite-support model.
pub fn finite_support_distance(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<f64> {
    Ok(wp_discrete(a, b, 1.0, euclidean)?.distance)
}

/// Six equally likely one-dimensional Gaussians `N(m, s^2)` in two groups:
/// `(m, s)` in `{(0, 1), (0.5, 1.5), (1, 0.8)}` with `eta = 0.85` and
/// `{(2, 1), (2.5, 0.5), (3, 2)}` with `eta = 0.2`; Bayes risk `0.175`.
pub fn gaussian_model() -> Result<GenerativeModel<GaussianMeasure>> {
    let groups = [
        (0.0, 1.0, 0.85),
        (0.5, 1.5, 0.85),
        (1.0, 0.8, 0.85),
        (2.0, 1.0, 0.2),
        (2.5, 0.5, 0.2),
        (3.0, 2.0, 0.2),
    ];
    let atoms = groups
        .iter()
        .map(|&(m, s, eta)| Ok(Atom { item: GaussianMeasure::univariate(m, s * s)?, prob: 1.0 / 6.0, eta }))
        .collect::<Result<Vec<_>>>()?;
    GenerativeModel::atomic(atoms)
}

/// `W_2` on the Gaussian model.
pub fn gaussian_distance(a: &GaussianMeasure, b: &GaussianMeasure) -> Result<f64> {
    w2_gaussian(a, b)
}

/// Six equally likely random series densities (levels 3 to 5), density `i`
/// drawn from substream `i` of `seed`, with
/// `eta = (0.1, 0.2, 0.35, 0.65, 0.8, 0.9)`; Bayes risk `1.3 / 6`.
pub fn wavelet_model(basis: &WaveletBasis, seed: u64) -> Result<GenerativeModel<WaveletDensity>> {
    let etas = [0.1, 0.2, 0.35, 0.65, 0.8, 0.9];
    let atoms = etas
        .iter()
        .enumerate()
        .map(|(i, &eta)| {
            let item = random_density(basis, DEFAULT_BASE_LEVEL, DEFAULT_TOP_LEVEL, &mut substream(seed, i as u64))?;
            Ok(Atom { item, prob: 1.0 / 6.0, eta })
        })
        .collect::<Result<Vec<_>>>()?;
    GenerativeModel::atomic(atoms)
}
