//! Constant-speed geodesics in Wasserstein space and the curvature gaps built on them.
//!
//! Three geodesic constructions are provided:
//!
//! * [`mixture_geodesic`]: `(1 - t) m1 + t m2`, a constant-speed geodesic for `W_1`;
//! * [`displacement_geodesic`]: the push-forward of an optimal `W_2` plan under
//!   `(x, y) -> (1 - t) x + t y`;
//! * [`gaussian_geodesic`]: the Bures interpolation between Gaussian measures.
//!
//! [`comparison_gap`] and [`pc_gap`] evaluate the two curvature inequalities on
//! triples; a nonnegative gap means the inequality holds at that `t`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::measures::{validate, DiscreteMeasure};
use crate::transport::{euclidean, pd_inv_sqrt, psd_sqrt, wp_discrete, GaussianMeasure};

/// Covariances with smallest eigenvalue below this are shifted by `SINGULAR_SHIFT * I`
/// before the Bures map is formed.
pub const SINGULAR_SHIFT: f64 = 1e-10;

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("geodesic parameter {t} outside [0, 1]")))
    }
}

/// A point `gamma(t)` on a geodesic between two indexed endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSample<M> {
    pub from: usize,
    pub to: usize,
    pub t: f64,
    pub measure: M,
}

impl<M> GeodesicSample<M> {
    pub fn new(from: usize, to: usize, t: f64, measure: M) -> Result<Self> {
        check_t(t)?;
        Ok(Self { from, to, t, measure })
    }
}

/// `(1 - t) m1 + t m2` on the union of the supports.
pub fn mixture_geodesic(m1: &DiscreteMeasure, m2: &DiscreteMeasure, t: f64) -> Result<DiscreteMeasure> {
    check_t(t)?;
    if m1.dim() != m2.dim() {
        return Err(Error::Parameter("endpoints live in different dimensions".into()));
    }
    let points = m1.points().iter().chain(m2.points()).cloned().collect();
    let weights = m1
        .weights()
        .iter()
        .map(|w| (1.0 - t) * w)
        .chain(m2.weights().iter().map(|w| t * w))
        .collect();
    validate(points, weights)
}

/// McCann interpolation of an optimal `W_p` plan (Euclidean ground metric, default `p = 2`).
pub fn displacement_geodesic(m1: &DiscreteMeasure, m2: &DiscreteMeasure, t: f64) -> Result<DiscreteMeasure> {
    displacement_geodesic_p(m1, m2, t, 2.0)
}

pub fn displacement_geodesic_p(m1: &DiscreteMeasure, m2: &DiscreteMeasure, t: f64, p: f64) -> Result<DiscreteMeasure> {
    check_t(t)?;
    if m1.dim() != m2.dim() {
        return Err(Error::Parameter("endpoints live in different dimensions".into()));
    }
    let plan = wp_discrete(m1, m2, p, euclidean)?.plan;
    let (points, weights): (Vec<_>, Vec<_>) = plan
        .support()
        .map(|(i, j, w)| {
            let x = &m1.points()[i];
            let y = &m2.points()[j];
            let z = x.iter().zip(y).map(|(a, b)| (1.0 - t) * a + t * b).collect::<Vec<_>>();
            (z, w)
        })
        .unzip();
    validate(points, weights)
}

/// Bures interpolation between Gaussians.
///
/// Mean `(1 - t) m1 + t m2`, covariance `A S1 A` with `A = (1 - t) I + t T` and
/// `T = S1^{-1/2} (S1^{1/2} S2 S1^{1/2})^{1/2} S1^{-1/2}`. A singular `S1` is
/// shifted by [`SINGULAR_SHIFT`] before inversion.
pub fn gaussian_geodesic(g1: &GaussianMeasure, g2: &GaussianMeasure, t: f64) -> Result<GaussianMeasure> {
    check_t(t)?;
    if g1.dim() != g2.dim() {
        return Err(Error::Parameter("endpoints live in different dimensions".into()));
    }
    let d = g1.dim();
    let id = DMatrix::<f64>::identity(d, d);
    let min_eig = g1.cov().clone().symmetric_eigenvalues().min();
    let s1 = if min_eig < SINGULAR_SHIFT { g1.cov() + &id * SINGULAR_SHIFT } else { g1.cov().clone() };
    let r1 = psd_sqrt(&s1)?;
    let r1_inv = pd_inv_sqrt(&s1)?;
    let inner = &r1 * g2.cov() * &r1;
    let inner = (&inner + inner.transpose()) * 0.5;
    let transport = &r1_inv * psd_sqrt(&inner)? * &r1_inv;
    let transport = (&transport + transport.transpose()) * 0.5;
    let a = &id * (1.0 - t) + transport * t;
    let cov = &a * &s1 * &a;
    let cov = (&cov + cov.transpose()) * 0.5;
    let mean = g1.mean() * (1.0 - t) + g2.mean() * t;
    GaussianMeasure::new(mean, cov).map_err(|e| Error::Numerical(format!("Bures interpolant: {e}")))
}

/// `d(x^t_{12}, x^t_{13}) - t d(x2, x3)`; the comparison inequality holds iff this is `>= 0`.
pub fn comparison_gap<M, D, G>(dist: D, x1: &M, x2: &M, x3: &M, geodesic: G, t: f64) -> Result<f64>
where
    D: Fn(&M, &M) -> Result<f64>,
    G: Fn(&M, &M, f64) -> Result<M>,
{
    let a = geodesic(x1, x2, t)?;
    let b = geodesic(x1, x3, t)?;
    Ok(dist(&a, &b)? - t * dist(x2, x3)?)
}

/// `d^2(g(t), m3) - [(1 - t) d^2(m1, m3) + t d^2(m2, m3) - t (1 - t) d^2(m1, m2)]`
/// with `g` the geodesic from `m1` to `m2`; the positive-curvature inequality
/// holds iff this is `>= 0`.
pub fn pc_gap<M, D, G>(dist: D, m1: &M, m2: &M, m3: &M, geodesic: G, t: f64) -> Result<f64>
where
    D: Fn(&M, &M) -> Result<f64>,
    G: Fn(&M, &M, f64) -> Result<M>,
{
    let mid = geodesic(m1, m2, t)?;
    let sq = |a: &M, b: &M| dist(a, b).map(|d| d * d);
    Ok(sq(&mid, m3)? - ((1.0 - t) * sq(m1, m3)? + t * sq(m2, m3)? - t * (1.0 - t) * sq(m1, m2)?))
}
