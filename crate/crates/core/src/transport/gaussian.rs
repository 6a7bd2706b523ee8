use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues down to this value are treated as roundoff and clamped to zero.
pub const EIGEN_CLAMP: f64 = -1e-10;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// A Gaussian measure `N(mean, cov)` on `R^d` with positive semidefinite covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasure {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

fn check_symmetric(s: &DMatrix<f64>) -> Result<()> {
    if !s.is_square() {
        return Err(Error::Parameter(format!("matrix is {}x{}, not square", s.nrows(), s.ncols())));
    }
    let scale = 1.0 + s.amax();
    let asym = (s - s.transpose()).amax();
    if asym > SYMMETRY_TOLERANCE * scale {
        return Err(Error::Parameter(format!("matrix not symmetric (deviation {asym:e})")));
    }
    Ok(())
}

fn symmetrize(s: &DMatrix<f64>) -> DMatrix<f64> {
    (s + s.transpose()) * 0.5
}

impl GaussianMeasure {
    /// Checks symmetry and positive semidefiniteness; eigenvalues in
    /// `[EIGEN_CLAMP, 0)` are clamped to zero.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != mean.len() {
            return Err(Error::Parameter(format!(
                "mean has dimension {} but covariance is {}x{}",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Parameter("non-finite Gaussian parameter".into()));
        }
        check_symmetric(&cov)?;
        let cov = symmetrize(&cov);
        let eig = SymmetricEigen::new(cov.clone());
        let min = eig.eigenvalues.min();
        if min < EIGEN_CLAMP {
            return Err(Error::Parameter(format!("covariance has eigenvalue {min:e} < 0")));
        }
        let cov = if min < 0.0 {
            let clamped = eig.eigenvalues.map(|l| l.max(0.0));
            symmetrize(&(&eig.eigenvectors * DMatrix::from_diagonal(&clamped) * eig.eigenvectors.transpose()))
        } else {
            cov
        };
        Ok(Self { mean, cov })
    }

    pub fn from_slices(mean: &[f64], cov_row_major: &[f64]) -> Result<Self> {
        let d = mean.len();
        if cov_row_major.len() != d * d {
            return Err(Error::Parameter("covariance size does not match mean".into()));
        }
        Self::new(DVector::from_column_slice(mean), DMatrix::from_row_slice(d, d, cov_row_major))
    }

    /// One-dimensional `N(mean, variance)`.
    pub fn univariate(mean: f64, variance: f64) -> Result<Self> {
        Self::from_slices(&[mean], &[variance])
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }
}

/// Principal square root of a symmetric positive semidefinite matrix.
///
/// Uses a symmetric eigendecomposition; negative eigenvalues are clamped to zero.
pub fn psd_sqrt(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(s)?;
    let eig = SymmetricEigen::new(symmetrize(s));
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Ok(symmetrize(&(&eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose())))
}

/// Inverse square root of a positive definite matrix.
pub(crate) fn pd_inv_sqrt(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(symmetrize(s));
    if eig.eigenvalues.min() <= 0.0 {
        return Err(Error::Numerical("matrix is not positive definite".into()));
    }
    let roots = eig.eigenvalues.map(|l| 1.0 / l.sqrt());
    Ok(symmetrize(&(&eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose())))
}

/// Closed-form `W_2` between Gaussians:
///
/// ```text
/// W_2^2 = |m1 - m2|^2 + Tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2})
/// ```
pub fn w2_gaussian(g1: &GaussianMeasure, g2: &GaussianMeasure) -> Result<f64> {
    if g1.dim() != g2.dim() {
        return Err(Error::Parameter(format!("dimension mismatch {} vs {}", g1.dim(), g2.dim())));
    }
    let mean_sq = (&g1.mean - &g2.mean).norm_squared();
    let r1 = psd_sqrt(&g1.cov)?;
    let cross = psd_sqrt(&symmetrize(&(&r1 * &g2.cov * &r1)))?;
    let bures = g1.cov.trace() + g2.cov.trace() - 2.0 * cross.trace();
    let scale = 1.0 + g1.cov.trace() + g2.cov.trace();
    let bures = if bures < 0.0 {
        if bures < -1e-9 * scale {
            return Err(Error::Numerical(format!("negative Bures term {bures:e}")));
        }
        0.0
    } else {
        bures
    };
    Ok((mean_sq + bures).sqrt())
}

/// `|Tr(S1)^{1/2} - Tr(S2)^{1/2}|`, a lower bound on [`w2_gaussian`] for equal means.
pub fn gaussian_trace_gap(g1: &GaussianMeasure, g2: &GaussianMeasure) -> f64 {
    (g1.cov.trace().sqrt() - g2.cov.trace().sqrt()).abs()
}
