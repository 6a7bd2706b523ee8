//! Finitely supported probability measures and one-dimensional quantile functions.
//!
//! A [`DiscreteMeasure`] is a list of distinct atoms in `R^d` with positive
//! weights summing to one. A [`StaircaseQuantile`] is a non-decreasing step
//! function on the dyadic partition of `[0, 1)`
//!
//! ```text
//! I_i = [1 - 2^(1-i), 1 - 2^(-i)),   i = 1, 2, ...
//! ```
//!
//! read as the generalized quantile function of a measure on the line. A
//! [`RationalMeasure`] has integer masses over `n!` on a factorial grid.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Tolerance on the total mass accepted by [`validate`] before renormalizing.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Default truncation level of staircase quantile functions.
pub const DEFAULT_STAIRCASE_LEVELS: usize = 60;

/// Largest truncation level a staircase accepts; the tail weight `2^(1-L)` must stay a normal float.
pub const MAX_STAIRCASE_LEVELS: usize = 1000;

/// A finitely supported probability measure on `R^d`.
///
/// Built only through [`validate`] (or the helpers calling it), so the atoms
/// are pairwise distinct, all weights are positive and they sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Same as [`validate`].
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        validate(points, weights)
    }

    /// The Dirac mass at `point`.
    pub fn dirac(point: Vec<f64>) -> Result<Self> {
        validate(vec![point], vec![1.0])
    }

    /// A measure on the real line.
    pub fn on_line(xs: &[f64], weights: &[f64]) -> Result<Self> {
        validate(xs.iter().map(|&x| vec![x]).collect(), weights.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterate over `(point, weight)` atoms in storage order.
    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    /// Weight of the atom located exactly at `point`, zero if absent.
    pub fn mass_at(&self, point: &[f64]) -> f64 {
        let key = point_key(point);
        self.points
            .iter()
            .position(|p| point_key(p) == key)
            .map_or(0.0, |i| self.weights[i])
    }
}

/// Bitwise key of a point; `-0.0` and `0.0` are identified.
fn point_key(point: &[f64]) -> Vec<u64> {
    point.iter().map(|&x| if x == 0.0 { 0 } else { x.to_bits() }).collect()
}

/// Check raw atoms and turn them into a [`DiscreteMeasure`].
///
/// Points equal coordinate-for-coordinate are merged by adding their weights,
/// zero-weight atoms are dropped and the weights are renormalized when their
/// total is within [`MASS_TOLERANCE`] of one. First-occurrence order is kept.
pub fn validate(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<DiscreteMeasure> {
    if points.len() != weights.len() {
        return Err(Error::Validation(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    let dim = match points.first() {
        Some(p) => p.len(),
        None => return Err(Error::Validation("empty support".into())),
    };
    if dim == 0 {
        return Err(Error::Validation("points must have at least one coordinate".into()));
    }
    let mut merged_points: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    let mut merged_weights: Vec<f64> = Vec::with_capacity(points.len());
    let mut index: HashMap<Vec<u64>, usize> = HashMap::with_capacity(points.len());
    for (point, w) in points.into_iter().zip(weights) {
        if point.len() != dim {
            return Err(Error::Validation(format!(
                "mixed dimensions {} and {}",
                dim,
                point.len()
            )));
        }
        if point.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("non-finite coordinate".into()));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Validation(format!("invalid weight {w}")));
        }
        if w == 0.0 {
            continue;
        }
        match index.entry(point_key(&point)) {
            std::collections::hash_map::Entry::Occupied(e) => merged_weights[*e.get()] += w,
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(merged_points.len());
                merged_points.push(point);
                merged_weights.push(w);
            }
        }
    }
    if merged_points.is_empty() {
        return Err(Error::Validation("all weights are zero".into()));
    }
    let total: f64 = merged_weights.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::Validation(format!("weights sum to {total}, expected 1")));
    }
    if total != 1.0 {
        merged_weights.iter_mut().for_each(|w| *w /= total);
    }
    Ok(DiscreteMeasure { dim, points: merged_points, weights: merged_weights })
}

/// A non-decreasing step function on the dyadic intervals `I_1, ..., I_L`,
/// constant on `[1 - 2^(1-L), 1)`.
///
/// `values[i - 1]` is the value on `I_i`. The induced measure has an atom at
/// `values[i - 1]` of weight `2^(-i)` for `i < L` and the tail weight `2^(1-L)`
/// at `values[L - 1]`; these dyadic weights sum to one exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseQuantile {
    values: Vec<f64>,
}

impl StaircaseQuantile {
    /// Values must be non-decreasing and lie in the open interval `(0, 1)`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation("staircase needs at least one level".into()));
        }
        if values.len() > MAX_STAIRCASE_LEVELS {
            return Err(Error::Validation(format!(
                "truncation level {} exceeds {}",
                values.len(),
                MAX_STAIRCASE_LEVELS
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
            return Err(Error::Validation(format!("staircase value {v} outside (0, 1)")));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Validation("staircase values must be non-decreasing".into()));
        }
        Ok(Self { values })
    }

    /// Truncation level `L`.
    pub fn levels(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mass of the level-`i` step (1-based).
    pub fn step_weight(&self, i: usize) -> f64 {
        let l = self.levels();
        debug_assert!((1..=l).contains(&i));
        if i < l {
            0.5f64.powi(i as i32)
        } else {
            0.5f64.powi(l as i32 - 1)
        }
    }

    /// The unmerged `(value, weight)` steps in increasing order of `q`.
    pub fn steps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (v, self.step_weight(i + 1)))
    }

    /// The measure whose quantile function this is.
    pub fn to_measure(&self) -> DiscreteMeasure {
        let (xs, ws): (Vec<_>, Vec<_>) = self.steps().map(|(v, w)| (vec![v], w)).unzip();
        validate(xs, ws).expect("dyadic steps form a probability measure")
    }
}

/// Index `i` (1-based) of the dyadic interval `I_i` containing `q`.
fn dyadic_interval(q: f64) -> usize {
    let mut i = 1usize;
    // 1 - 2^-i is exact while it is below one; the loop stops once it rounds to 1.
    while i < 1100 && q >= 1.0 - 0.5f64.powi(i as i32) {
        i += 1;
    }
    i
}

/// Evaluate a staircase quantile function at `q` in `[0, 1)`.
pub fn gqf_eval(m: &StaircaseQuantile, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Domain(format!("quantile level {q} outside [0, 1)")));
    }
    let i = dyadic_interval(q).min(m.levels());
    Ok(m.values[i - 1])
}

/// `n!` as an integer; defined for `n <= 20`.
pub fn factorial(n: u32) -> Result<u64> {
    if n > 20 {
        return Err(Error::Resource(format!("{n}! does not fit in 64 bits")));
    }
    Ok((1..=n as u64).product())
}

/// A measure on the level-`n` factorial grid with masses `a_i / n!`.
///
/// Grid points are integer numerator vectors over `n!`; the mass numerators
/// sum to `n!` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMeasure {
    level: u32,
    atoms: Vec<(Vec<i64>, u64)>,
}

impl RationalMeasure {
    /// Duplicate grid points are merged, zero numerators dropped and atoms
    /// sorted by grid point, so `==` is equality of measures.
    pub fn new(level: u32, atoms: Vec<(Vec<i64>, u64)>) -> Result<Self> {
        if level == 0 {
            return Err(Error::Validation("level must be positive".into()));
        }
        let denom = factorial(level)?;
        let dim = match atoms.first() {
            Some((p, _)) => p.len(),
            None => return Err(Error::Validation("empty support".into())),
        };
        let mut merged: Vec<(Vec<i64>, u64)> = Vec::new();
        let mut total: u64 = 0;
        for (p, a) in atoms {
            if p.len() != dim || dim == 0 {
                return Err(Error::Validation("inconsistent grid dimension".into()));
            }
            if a > denom {
                return Err(Error::Validation(format!("numerator {a} exceeds {denom}")));
            }
            total = total
                .checked_add(a)
                .ok_or_else(|| Error::Validation("numerator overflow".into()))?;
            if a == 0 {
                continue;
            }
            match merged.iter_mut().find(|(q, _)| *q == p) {
                Some((_, b)) => *b += a,
                None => merged.push((p, a)),
            }
        }
        if total != denom {
            return Err(Error::Validation(format!("numerators sum to {total}, expected {denom}")));
        }
        merged.sort();
        Ok(Self { level, atoms: merged })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn atoms(&self) -> &[(Vec<i64>, u64)] {
        &self.atoms
    }

    /// Floating-point copy with coordinates and masses divided by `n!`.
    pub fn to_discrete(&self) -> DiscreteMeasure {
        let denom = factorial(self.level).expect("validated level") as f64;
        let (xs, ws): (Vec<_>, Vec<_>) = self
            .atoms
            .iter()
            .map(|(p, a)| (p.iter().map(|&c| c as f64 / denom).collect(), *a as f64 / denom))
            .unzip();
        validate(xs, ws).expect("rational masses sum to one")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gqf_eval_picks_dyadic_step() {
        let s = StaircaseQuantile::new(vec![0.5, 0.75, 0.875, 0.9375]).unwrap();
        assert_eq!(gqf_eval(&s, 0.0).unwrap(), 0.5);
        assert_eq!(gqf_eval(&s, 0.6).unwrap(), 0.75);
        assert_eq!(gqf_eval(&s, 0.5).unwrap(), 0.75);
        assert_eq!(gqf_eval(&s, 0.4999).unwrap(), 0.5);
        // beyond the truncation level the last value persists
        assert_eq!(gqf_eval(&s, 0.999).unwrap(), 0.9375);
        assert!(matches!(gqf_eval(&s, 1.0), Err(Error::Domain(_))));
        assert!(matches!(gqf_eval(&s, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn validate_merges_and_checks() {
        let m = validate(vec![vec![0.3], vec![0.3]], vec![0.5, 0.5]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.weights(), &[1.0]);

        let m = DiscreteMeasure::on_line(&[0.0, 1.0], &[0.3, 0.7]).unwrap();
        assert_eq!(m.weights(), &[0.3, 0.7]);

        assert!(matches!(
            DiscreteMeasure::on_line(&[0.0, 1.0], &[-0.1, 1.1]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            DiscreteMeasure::on_line(&[0.0, 1.0], &[0.3, 0.6]),
            Err(Error::Validation(_))
        ));
        let m = DiscreteMeasure::on_line(&[0.0, 1.0, 2.0], &[0.5, 0.0, 0.5]).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.mass_at(&[1.0]), 0.0);
        // -0.0 and 0.0 are the same point
        let m = DiscreteMeasure::on_line(&[0.0, -0.0], &[0.5, 0.5]).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn staircase_rejects_invalid_values() {
        assert!(StaircaseQuantile::new(vec![0.5, 0.4]).is_err());
        assert!(StaircaseQuantile::new(vec![0.0, 0.4]).is_err());
        assert!(StaircaseQuantile::new(vec![0.5, 1.0]).is_err());
        assert!(StaircaseQuantile::new(vec![]).is_err());
    }

    #[test]
    fn staircase_measure_has_dyadic_weights() {
        for levels in [1usize, 2, 7, 50, DEFAULT_STAIRCASE_LEVELS] {
            let values: Vec<f64> = (1..=levels).map(|i| i as f64 / (levels as f64 + 1.0)).collect();
            let s = StaircaseQuantile::new(values).unwrap();
            let total: f64 = s.steps().map(|(_, w)| w).sum();
            assert_eq!(total, 1.0, "L = {levels}");
            let m = s.to_measure();
            assert_eq!(m.len(), levels);
            if levels > 1 {
                assert_eq!(m.weights()[0], 0.5);
                assert_eq!(m.weights()[levels - 1], 0.5f64.powi(levels as i32 - 1));
            }
        }
    }

    #[test]
    fn rational_measure_exact_sum() {
        let m = RationalMeasure::new(3, vec![(vec![0], 2), (vec![1], 4)]).unwrap();
        let d = m.to_discrete();
        assert_eq!(d.points(), &[vec![0.0], vec![1.0 / 6.0]]);
        assert!(RationalMeasure::new(3, vec![(vec![0], 5)]).is_err());
        assert!(RationalMeasure::new(2, vec![(vec![0], 3)]).is_err());
        assert_eq!(factorial(4).unwrap(), 24);
        assert!(factorial(21).is_err());
    }

    proptest! {
        #[test]
        fn gqf_is_monotone(
            mut values in proptest::collection::vec(0.001f64..0.999, 1..40),
            q1 in 0.0f64..1.0,
            q2 in 0.0f64..1.0,
        ) {
            values.sort_by(f64::total_cmp);
            let s = StaircaseQuantile::new(values).unwrap();
            let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            prop_assert!(gqf_eval(&s, lo).unwrap() <= gqf_eval(&s, hi).unwrap());
        }
    }
}
