//! Wasserstein distances.
//!
//! * [`wp_one_dim`]: measures on the line, through quantile functions;
//! * [`wp_discrete`]: finitely supported measures under any ground metric, by an exact
//!   transportation simplex;
//! * [`w2_gaussian`]: the closed form between Gaussian measures;
//! * [`finite_support_embed`]: the weight-vector chart of measures on a fixed finite set.

mod gaussian;
mod one_dim;
mod simplex;

pub use gaussian::{gaussian_trace_gap, psd_sqrt, w2_gaussian, GaussianMeasure, EIGEN_CLAMP};
pub(crate) use gaussian::pd_inv_sqrt;
pub(crate) use one_dim::{pow_abs, root};
pub use one_dim::{wp_one_dim, LineMeasure};
pub use simplex::{solve_transport, Coupling, TransportSolution};

use crate::error::{check_p, Error, Result};
use crate::measures::DiscreteMeasure;

/// Euclidean distance between two points.
pub fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Result of [`wp_discrete`].
#[derive(Debug, Clone)]
pub struct Transport {
    pub distance: f64,
    /// Rows index the atoms of the first measure, columns those of the second.
    pub plan: Coupling,
    pub relative_gap: f64,
}

/// Exact `W_p` between finitely supported measures.
///
/// `ground` is the metric on the support points. The optimal plan is a vertex
/// of the transportation polytope.
pub fn wp_discrete<F>(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64, ground: F) -> Result<Transport>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    check_p(p)?;
    if mu.is_empty() || nu.is_empty() {
        return Err(Error::Parameter("empty support".into()));
    }
    let mut cost = Vec::with_capacity(mu.len() * nu.len());
    for x in mu.points() {
        for y in nu.points() {
            let d = ground(x, y);
            if !(d >= 0.0) {
                return Err(Error::Parameter(format!("ground metric returned {d}")));
            }
            cost.push(pow_abs(d, p));
        }
    }
    let sol = solve_transport(mu.weights(), nu.weights(), &cost)?;
    Ok(Transport { distance: root(sol.cost.max(0.0), p), plan: sol.plan, relative_gap: sol.relative_gap })
}

/// Convenience: `W_p` under the Euclidean ground metric.
pub fn wp_euclidean(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::Parameter(format!("dimension mismatch {} vs {}", mu.dim(), nu.dim())));
    }
    Ok(wp_discrete(mu, nu, p, euclidean)?.distance)
}

/// Weight vector `(v_1, ..., v_d)` of `mu = sum v_i delta_{x_i}` over the point list `xs`.
///
/// Atoms are matched to `xs` by exact coordinate equality.
pub fn finite_support_embed(mu: &DiscreteMeasure, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; xs.len()];
    for (point, w) in mu.atoms() {
        let slot = xs
            .iter()
            .position(|x| x.len() == point.len() && x.iter().zip(point).all(|(a, b)| a == b))
            .ok_or_else(|| Error::Parameter(format!("atom {point:?} is not in the point list")))?;
        out[slot] += w;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diracs_use_ground_distance() {
        let a = DiscreteMeasure::dirac(vec![0.0, 0.0]).unwrap();
        let b = DiscreteMeasure::dirac(vec![3.0, 4.0]).unwrap();
        let t = wp_discrete(&a, &b, 2.0, euclidean).unwrap();
        assert!((t.distance - 5.0).abs() < 1e-15);
        assert_eq!(t.plan.get(0, 0), 1.0);
        let manhattan = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum::<f64>();
        assert_eq!(wp_discrete(&a, &b, 1.0, manhattan).unwrap().distance, 7.0);
    }

    #[test]
    fn one_parameter_coupling_family() {
        // mu = (1/2, 1/2), nu = (1/4, 3/4) on {0, 1}. Couplings are
        // [[x, 1/2 - x], [1/4 - x, 1/4 + x]] for x in [0, 1/4]; the cost
        // 3/4 - 2x is minimised at x = 1/4.
        let family_min = (0..=1000)
            .map(|k| 0.25 * k as f64 / 1000.0)
            .map(|x| (0.5 - x) + (0.25 - x))
            .fold(f64::INFINITY, f64::min);
        let mu = DiscreteMeasure::on_line(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
        let nu = DiscreteMeasure::on_line(&[0.0, 1.0], &[0.25, 0.75]).unwrap();
        let t = wp_discrete(&mu, &nu, 1.0, euclidean).unwrap();
        assert!((t.distance - family_min).abs() < 1e-15);
        assert!((t.distance - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        let a = DiscreteMeasure::dirac(vec![0.0]).unwrap();
        assert!(matches!(wp_discrete(&a, &a, 0.9, euclidean), Err(Error::Parameter(_))));
        assert!(matches!(wp_discrete(&a, &a, 1.0, |_, _| f64::NAN), Err(Error::Parameter(_))));
    }

    #[test]
    fn embedding_examples() {
        let xs = vec![vec![0.0], vec![1.0], vec![5.0]];
        let d1 = DiscreteMeasure::dirac(vec![0.0]).unwrap();
        assert_eq!(finite_support_embed(&d1, &xs).unwrap(), vec![1.0, 0.0, 0.0]);
        let m = DiscreteMeasure::on_line(&[0.0, 5.0], &[0.5, 0.5]).unwrap();
        assert_eq!(finite_support_embed(&m, &xs).unwrap(), vec![0.5, 0.0, 0.5]);
        let a = finite_support_embed(&DiscreteMeasure::on_line(&[0.0, 1.0], &[0.5, 0.5]).unwrap(), &xs).unwrap();
        let b = finite_support_embed(&DiscreteMeasure::on_line(&[1.0, 5.0], &[0.5, 0.5]).unwrap(), &xs).unwrap();
        let norm = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!((norm - 2f64.sqrt() / 2.0).abs() < 1e-15);
        let outside = DiscreteMeasure::dirac(vec![2.0]).unwrap();
        assert!(matches!(finite_support_embed(&outside, &xs), Err(Error::Parameter(_))));
    }
}
