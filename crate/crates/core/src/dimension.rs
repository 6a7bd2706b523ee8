//! Metric-dimension tooling.
//!
//! A [`BallFamily`] is a list of closed balls over a finite set of point ids with
//! a distance callback. The family is *disconnected at scale `s`* when every
//! radius lies in `(0, s)` and no center lies in another member's ball; its
//! *multiplicity* is the largest number of members sharing a point.
//!
//! The module also builds factorial grids `A_n = (Z / n!)^d ∩ box`, checks the
//! separation of rational measures on them, runs the greedy covering
//! construction ([`BallFamily::weak_cover`]) and the Nagata condition
//! ([`nagata_check`]), and searches for large disconnected families through a
//! common point in `R^d` ([`packing_search`]).

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{factorial, RationalMeasure};
use crate::rng::substream;
use crate::transport::{euclidean, wp_discrete};

/// Largest number of points [`factorial_grid`] will enumerate.
pub const MAX_GRID_POINTS: u64 = 10_000_000;

/// Values a ball family can measure distances with.
///
/// Any type ordered consistently with the metric works, e.g. a monotone
/// transform of the distance held in exact arithmetic.
pub trait Distance: Copy + PartialOrd + std::fmt::Debug {
    /// Finite and strictly positive.
    fn is_positive(&self) -> bool;
}

impl Distance for f64 {
    fn is_positive(&self) -> bool {
        self.is_finite() && *self > 0.0
    }
}

/// A closed ball `B(center, radius)` around a point id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball<D = f64> {
    pub center: usize,
    pub radius: D,
}

/// Closed balls over point ids, with a distance callback and a scale.
#[derive(Clone)]
pub struct BallFamily<M, D = f64> {
    metric: M,
    balls: Vec<Ball<D>>,
    scale: D,
}

impl<M: Fn(usize, usize) -> D, D: Distance> BallFamily<M, D> {
    pub fn new(metric: M, balls: Vec<Ball<D>>, scale: D) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::Parameter(format!("scale must be positive, got {scale:?}")));
        }
        if let Some(b) = balls.iter().find(|b| !b.radius.is_positive()) {
            return Err(Error::Parameter(format!("ball around {} has radius {:?}", b.center, b.radius)));
        }
        Ok(Self { metric, balls, scale })
    }

    pub fn balls(&self) -> &[Ball<D>] {
        &self.balls
    }

    pub fn scale(&self) -> D {
        self.scale
    }

    pub fn distance(&self, x: usize, y: usize) -> D {
        (self.metric)(x, y)
    }

    /// Closed-ball membership `d(center, x) <= radius`.
    pub fn contains(&self, ball: usize, x: usize) -> bool {
        let b = self.balls[ball];
        self.distance(b.center, x) <= b.radius
    }

    /// Radii in `(0, s)` and `d(x_i, x_j) > r_j` for every ordered pair `i != j`.
    pub fn is_disconnected(&self) -> bool {
        if self.balls.iter().any(|b| b.radius >= self.scale) {
            return false;
        }
        for (i, bi) in self.balls.iter().enumerate() {
            for (j, bj) in self.balls.iter().enumerate() {
                if i != j && self.distance(bi.center, bj.center) <= bj.radius {
                    return false;
                }
            }
        }
        true
    }

    /// Largest number of balls containing a single probe point.
    pub fn multiplicity(&self, probes: &[usize]) -> Result<usize> {
        if probes.is_empty() {
            return Err(Error::Parameter("multiplicity needs at least one probe".into()));
        }
        Ok(probes
            .iter()
            .map(|&x| (0..self.balls.len()).filter(|&b| self.contains(b, x)).count())
            .max()
            .unwrap_or(0))
    }

    /// Greedy covering subfamily, one radius level at a time.
    ///
    /// Radii are grouped into levels `a_1 > a_2 > ...`. At level `a_k` the
    /// candidates are the balls of radius `a_k` whose center is not covered by a
    /// ball chosen at an earlier level; they are scanned by ascending center id
    /// and kept when their center is farther than `a_k` from every center kept
    /// at this level. Returns indices into [`balls`](Self::balls); every center
    /// of the family lies in some returned ball.
    pub fn weak_cover(&self) -> Result<Vec<usize>> {
        if let Some(b) = self.balls.iter().find(|b| b.radius >= self.scale) {
            return Err(Error::Parameter(format!("radius {:?} is not below the scale {:?}", b.radius, self.scale)));
        }
        let mut levels: Vec<D> = self.balls.iter().map(|b| b.radius).collect();
        levels.sort_by(|a, b| b.partial_cmp(a).expect("radii are ordered"));
        levels.dedup();

        let mut chosen: Vec<usize> = Vec::new();
        for a in levels {
            let mut candidates: Vec<usize> = (0..self.balls.len())
                .filter(|&i| self.balls[i].radius == a)
                .filter(|&i| !chosen.iter().any(|&c| self.contains(c, self.balls[i].center)))
                .collect();
            candidates.sort_by_key(|&i| (self.balls[i].center, i));
            let mut level: Vec<usize> = Vec::new();
            for i in candidates {
                let c = self.balls[i].center;
                if level.iter().all(|&j| self.distance(c, self.balls[j].center) > a) {
                    level.push(i);
                }
            }
            chosen.extend(level);
        }
        Ok(chosen)
    }
}

/// The factorial grid `{ (a_1, ..., a_d) / n! } ∩ box`, stored as integer numerators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorialGrid {
    level: u32,
    dim: usize,
    /// Inclusive numerator range per axis.
    ranges: Vec<(i64, i64)>,
}

/// Grid of level `n` inside `box` (one `(low, high)` pair per axis).
pub fn factorial_grid(n: u32, d: usize, bounds: &[(f64, f64)]) -> Result<FactorialGrid> {
    if n == 0 || d == 0 {
        return Err(Error::Parameter("level and dimension must be positive".into()));
    }
    if bounds.len() != d {
        return Err(Error::Parameter(format!("{} bounds for dimension {d}", bounds.len())));
    }
    let denom = factorial(n)? as f64;
    let mut ranges = Vec::with_capacity(d);
    let mut count: u64 = 1;
    for &(lo, hi) in bounds {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::Parameter(format!("bad box side [{lo}, {hi}]")));
        }
        let a = (lo * denom).ceil();
        let b = (hi * denom).floor();
        if a.abs() > 9e15 || b.abs() > 9e15 {
            return Err(Error::Resource("grid numerators exceed exact integer range".into()));
        }
        let (a, b) = (a as i64, b as i64);
        let side = if b >= a { (b - a + 1) as u64 } else { 0 };
        count = count.saturating_mul(side);
        ranges.push((a, b));
    }
    if count > MAX_GRID_POINTS {
        return Err(Error::Resource(format!("grid has {count} points, limit {MAX_GRID_POINTS}")));
    }
    Ok(FactorialGrid { level: n, dim: d, ranges })
}

impl FactorialGrid {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Δ_n = 1 / n!`.
    pub fn spacing(&self) -> f64 {
        1.0 / factorial(self.level).expect("validated level") as f64
    }

    pub fn len(&self) -> usize {
        self.ranges.iter().map(|(a, b)| if b >= a { (b - a + 1) as usize } else { 0 }).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Numerator vectors in lexicographic order.
    pub fn numerators(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = vec![Vec::new()];
        for &(a, b) in &self.ranges {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (a..=b).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        if self.is_empty() {
            out.clear();
        }
        out
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let denom = factorial(self.level).expect("validated level") as f64;
        self.numerators()
            .into_iter()
            .map(|v| v.into_iter().map(|a| a as f64 / denom).collect())
            .collect()
    }

    /// Whether the rational point `numerators / level!` belongs to this grid.
    pub fn contains(&self, numerators: &[i64], level: u32) -> bool {
        if numerators.len() != self.dim {
            return false;
        }
        let (Ok(own), Ok(other)) = (factorial(self.level), factorial(level)) else {
            return false;
        };
        numerators.iter().zip(&self.ranges).all(|(&x, &(a, b))| {
            let scaled = x as i128 * own as i128;
            scaled % other as i128 == 0 && {
                let y = scaled / other as i128;
                a as i128 <= y && y <= b as i128
            }
        })
    }
}

/// Exact `W_p` between two rational measures and the separation bound `Δ_n / n!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub wp: f64,
    pub bound: f64,
}

impl Separation {
    /// `wp >= bound` up to a relative `1e-12` rounding allowance.
    pub fn holds(&self) -> bool {
        self.wp >= self.bound * (1.0 - 1e-12)
    }
}

pub fn rational_separation(mu: &RationalMeasure, nu: &RationalMeasure, p: f64) -> Result<Separation> {
    if mu.level() != nu.level() {
        return Err(Error::Parameter(format!("levels differ: {} vs {}", mu.level(), nu.level())));
    }
    let a = mu.to_discrete();
    let b = nu.to_discrete();
    if a.dim() != b.dim() {
        return Err(Error::Parameter("measures live on grids of different dimension".into()));
    }
    let f = factorial(mu.level())? as f64;
    let wp = wp_discrete(&a, &b, p, euclidean)?.distance;
    Ok(Separation { wp, bound: 1.0 / (f * f) })
}

/// Nagata condition at `a` with constant `m`.
///
/// True iff every `m + 1` points of `points` contain a pair with
/// `d(y_i, y_j) <= max(d(a, y_i), d(a, y_j))`. Equivalently, the largest set of
/// points that pairwise violate it has at most `m` elements; that set is found
/// exactly as a maximum clique.
pub fn nagata_check<T, D>(points: &[T], a: &T, dist: D, m: usize) -> bool
where
    D: Fn(&T, &T) -> f64,
{
    let n = points.len();
    if n <= m {
        return true;
    }
    let to_a: Vec<f64> = points.iter().map(|y| dist(a, y)).collect();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let far = dist(&points[i], &points[j]) > to_a[i].max(to_a[j]);
            adj[i][j] = far;
            adj[j][i] = far;
        }
    }
    max_clique(&adj) <= m
}

fn max_clique(adj: &[Vec<bool>]) -> usize {
    fn expand(adj: &[Vec<bool>], size: usize, mut cand: Vec<usize>, mut excl: Vec<usize>, best: &mut usize) {
        if cand.is_empty() {
            if excl.is_empty() {
                *best = (*best).max(size);
            }
            return;
        }
        if size + cand.len() <= *best {
            return;
        }
        let pivot = *cand
            .iter()
            .chain(&excl)
            .max_by_key(|&&u| cand.iter().filter(|&&v| adj[u][v]).count())
            .expect("nonempty");
        let order: Vec<usize> = cand.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in order {
            let nc = cand.iter().copied().filter(|&u| adj[v][u]).collect();
            let nx = excl.iter().copied().filter(|&u| adj[v][u]).collect();
            expand(adj, size + 1, nc, nx, best);
            cand.retain(|&u| u != v);
            excl.push(v);
        }
    }
    let mut best = 0;
    expand(adj, 0, (0..adj.len()).collect(), Vec::new(), &mut best);
    best
}

/// Result of [`packing_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackingReport {
    pub dim: usize,
    pub trials: usize,
    /// Largest disconnected family through the origin found in any trial.
    pub largest: usize,
    /// `3^d - 1`.
    pub bound: usize,
}

impl PackingReport {
    pub fn holds(&self) -> bool {
        self.largest <= self.bound
    }
}

/// Random greedy search for disconnected families of Euclidean balls in `R^d`
/// that all contain the origin.
///
/// Each trial proposes `proposals` balls: a center drawn in the ball of radius
/// `scale` and a radius just above the center's norm (so the origin is inside)
/// and below `scale`; a proposal is kept when the family stays disconnected.
/// Trial `t` draws from substream `t` of `seed`.
pub fn packing_search(d: usize, trials: usize, proposals: usize, seed: u64) -> Result<PackingReport> {
    if d == 0 || trials == 0 {
        return Err(Error::Parameter("dimension and trials must be positive".into()));
    }
    let scale = 1.0;
    let largest = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, t as u64);
            let mut centers: Vec<Vec<f64>> = Vec::new();
            let mut radii: Vec<f64> = Vec::new();
            for _ in 0..proposals {
                let c: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                let norm = euclidean(&c, &vec![0.0; d]);
                if norm == 0.0 || norm >= scale {
                    continue;
                }
                let r = norm + (scale - norm) * rng.random::<f64>().powi(4);
                if r >= scale {
                    continue;
                }
                let ok = centers
                    .iter()
                    .zip(&radii)
                    .all(|(cj, &rj)| {
                        let dij = euclidean(&c, cj);
                        dij > rj && dij > r
                    });
                if ok {
                    centers.push(c);
                    radii.push(r);
                }
            }
            centers.len()
        })
        .max()
        .unwrap_or(0);
    Ok(PackingReport { dim: d, trials, largest, bound: 3usize.pow(d as u32) - 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_family(xs: Vec<f64>, balls: Vec<Ball>, s: f64) -> BallFamily<impl Fn(usize, usize) -> f64> {
        BallFamily::new(move |i, j| (xs[i] - xs[j]).abs(), balls, s).unwrap()
    }

    #[test]
    fn disconnected_examples() {
        let f = line_family(vec![0.0, 1.0], vec![Ball { center: 0, radius: 0.4 }, Ball { center: 1, radius: 0.4 }], 0.5);
        assert!(f.is_disconnected());
        assert!(f.multiplicity(&[0, 1]).unwrap() <= 1);
        let g = line_family(vec![0.0, 1.0], vec![Ball { center: 0, radius: 0.4 }, Ball { center: 1, radius: 1.0 }], 0.5);
        assert!(!g.is_disconnected());
        assert!(g.multiplicity(&[]).is_err());
        assert!(BallFamily::new(|_, _| 0.0, vec![Ball { center: 0, radius: 0.0 }], 1.0).is_err());
    }

    #[test]
    fn weak_cover_examples() {
        let same = line_family(vec![0.5], vec![Ball { center: 0, radius: 0.3 }; 4], 1.0);
        assert_eq!(same.weak_cover().unwrap().len(), 1);

        let f = line_family(
            vec![0.0, 0.3, 0.6],
            (0..3).map(|c| Ball { center: c, radius: 0.4 }).collect(),
            0.5,
        );
        assert_eq!(f.weak_cover().unwrap(), vec![0, 2]);
    }

    #[test]
    fn grid_examples() {
        let g2 = factorial_grid(2, 1, &[(0.0, 1.0)]).unwrap();
        assert_eq!(g2.points(), vec![vec![0.0], vec![0.5], vec![1.0]]);
        let g3 = factorial_grid(3, 1, &[(0.0, 1.0)]).unwrap();
        assert_eq!(g3.len(), 7);
        assert!(g2.numerators().iter().all(|v| g3.contains(v, 2)));
        assert!(!g2.contains(&[1], 3));
        assert_eq!(g3.spacing(), 1.0 / 6.0);
        assert!(matches!(factorial_grid(10, 2, &[(0.0, 1.0), (0.0, 1.0)]), Err(Error::Resource(_))));
    }

    #[test]
    fn separation_tight_case() {
        let mu = RationalMeasure::new(2, vec![(vec![0], 2)]).unwrap();
        let nu = RationalMeasure::new(2, vec![(vec![0], 1), (vec![1], 1)]).unwrap();
        let s = rational_separation(&mu, &nu, 1.0).unwrap();
        assert_eq!(s.wp, 0.25);
        assert_eq!(s.bound, 0.25);
        assert!(s.holds());
        assert_eq!(rational_separation(&mu, &mu, 2.0).unwrap().wp, 0.0);
        let other = RationalMeasure::new(3, vec![(vec![0], 6)]).unwrap();
        assert!(matches!(rational_separation(&mu, &other, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn nagata_examples() {
        let d = |x: &Vec<f64>, y: &Vec<f64>| euclidean(x, y);
        let origin = vec![0.0, 0.0];
        assert!(nagata_check(&[vec![1.0, 0.0], vec![2.0, 0.0]], &origin, d, 1));
        let tri: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        assert!(!nagata_check(&tri, &origin, d, 1));
        assert!(nagata_check(&tri, &origin, d, 3));
    }

    #[test]
    fn packing_search_small() {
        let r = packing_search(1, 200, 50, 1).unwrap();
        assert!(r.holds());
        assert_eq!(r.bound, 2);
        assert!(r.largest >= 1);
    }
}
