//! The `k`-nearest-neighbour rule over an arbitrary metric, risk estimation and
//! the Bayes risk.
//!
//! Neighbours are ordered by distance and then by position in the training
//! sequence, so among equidistant points the earlier one wins. The vote returns
//! label `1` when at least half of the neighbours carry it, the same convention
//! as the Bayes rule `1{eta >= 1/2}`.

use std::collections::HashMap;

use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::substream;

/// Binary class label, `0` or `1`.
pub type Label = u8;

/// Training data `(x_i, y_i)`; the order of insertion is the tie-break priority.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T> {
    items: Vec<T>,
    labels: Vec<Label>,
}

impl<T> Default for LabeledDataset<T> {
    fn default() -> Self {
        Self { items: Vec::new(), labels: Vec::new() }
    }
}

fn check_label(y: Label) -> Result<()> {
    if y > 1 {
        return Err(Error::Validation(format!("label {y} is not binary")));
    }
    Ok(())
}

impl<T> LabeledDataset<T> {
    pub fn new(items: Vec<T>, labels: Vec<Label>) -> Result<Self> {
        if items.len() != labels.len() {
            return Err(Error::Validation(format!("{} items but {} labels", items.len(), labels.len())));
        }
        labels.iter().try_for_each(|&y| check_label(y))?;
        Ok(Self { items, labels })
    }

    pub fn push(&mut self, item: T, label: Label) -> Result<()> {
        check_label(label)?;
        self.items.push(item);
        self.labels.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }
}

/// Indices of the `k` nearest training points, sorted by `(distance, index)`.
pub fn neighbors<T, Q, D>(train: &LabeledDataset<T>, query: &Q, k: usize, dist: D) -> Result<Vec<usize>>
where
    D: Fn(&T, &Q) -> Result<f64>,
{
    if k == 0 || k > train.len() {
        return Err(Error::Parameter(format!("k = {k} with {} training points", train.len())));
    }
    let mut keyed = Vec::with_capacity(train.len());
    for (i, x) in train.items.iter().enumerate() {
        let d = dist(x, query)?;
        if d.is_nan() {
            return Err(Error::Numerical(format!("distance to training point {i} is NaN")));
        }
        keyed.push((d, i));
    }
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < keyed.len() {
        keyed.select_nth_unstable_by(k - 1, cmp);
        keyed.truncate(k);
    }
    keyed.sort_unstable_by(cmp);
    Ok(keyed.into_iter().map(|(_, i)| i).collect())
}

/// Majority vote; ties go to `1`.
pub fn vote(labels: &[Label]) -> Result<Label> {
    if labels.is_empty() {
        return Err(Error::Parameter("vote over no labels".into()));
    }
    let ones = labels.iter().filter(|&&y| y == 1).count();
    Ok((2 * ones >= labels.len()) as Label)
}

/// The `k`-NN prediction for `query`.
pub fn classify<T, Q, D>(train: &LabeledDataset<T>, query: &Q, k: usize, dist: D) -> Result<Label>
where
    D: Fn(&T, &Q) -> Result<f64>,
{
    let idx = neighbors(train, query, k, dist)?;
    let labels: Vec<Label> = idx.iter().map(|&i| train.labels[i]).collect();
    vote(&labels)
}

/// Growth rule for the number of neighbours `k_n`, clamped to `[1, n]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSchedule {
    /// `ceil(sqrt(n))`
    Sqrt,
    /// `ceil(n^alpha)`, `0 < alpha < 1`
    Pow(f64),
    /// `ceil((ln n)^2)`
    LogSq,
    /// A constant `k`.
    Fixed(usize),
}

impl KSchedule {
    /// Parses `sqrt`, `logsq`, `pow:<alpha>` (decimal or `a/b`) and `fixed:<k>`.
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "sqrt" => return Ok(Self::Sqrt),
            "logsq" => return Ok(Self::LogSq),
            _ => {}
        }
        if let Some(arg) = name.strip_prefix("pow:").or_else(|| name.strip_prefix("pow(").and_then(|s| s.strip_suffix(')'))) {
            let alpha = match arg.split_once('/') {
                Some((a, b)) => {
                    let a: f64 = a.trim().parse().map_err(|_| Error::Parameter(format!("bad exponent {arg}")))?;
                    let b: f64 = b.trim().parse().map_err(|_| Error::Parameter(format!("bad exponent {arg}")))?;
                    a / b
                }
                None => arg.trim().parse().map_err(|_| Error::Parameter(format!("bad exponent {arg}")))?,
            };
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::Parameter(format!("exponent {alpha} outside (0, 1)")));
            }
            return Ok(Self::Pow(alpha));
        }
        if let Some(arg) = name.strip_prefix("fixed:") {
            let k: usize = arg.trim().parse().map_err(|_| Error::Parameter(format!("bad k {arg}")))?;
            if k == 0 {
                return Err(Error::Parameter("fixed k must be positive".into()));
            }
            return Ok(Self::Fixed(k));
        }
        Err(Error::Parameter(format!("unknown k schedule {name:?}")))
    }

    pub fn k(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::Parameter("k schedule needs n >= 1".into()));
        }
        let k = match *self {
            Self::Sqrt => {
                let r = n.isqrt();
                if r * r == n {
                    r
                } else {
                    r + 1
                }
            }
            Self::Pow(alpha) => {
                let x = (n as f64).powf(alpha);
                // snap values within rounding of an integer, so 1000^(1/3) is 10
                let near = x.round();
                if (x - near).abs() <= 1e-9 * near.max(1.0) {
                    near as usize
                } else {
                    x.ceil() as usize
                }
            }
            Self::LogSq => (n as f64).ln().powi(2).ceil() as usize,
            Self::Fixed(k) => k,
        };
        Ok(k.clamp(1, n))
    }
}

/// `k_n` for a named schedule (see [`KSchedule::parse`]).
pub fn k_schedule(name: &str, n: usize) -> Result<usize> {
    KSchedule::parse(name)?.k(n)
}

/// A point mass of a generative model with `eta = P(Y = 1 | item)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub item: T,
    pub prob: f64,
    pub eta: f64,
}

type SamplerFn<T> = Box<dyn Fn(&mut dyn RngCore) -> (T, f64) + Send + Sync>;

/// Joint law of `(item, label)`.
pub enum GenerativeModel<T> {
    /// Finitely many atoms with probabilities summing to one.
    Atomic(Vec<Atom<T>>),
    /// A sampler returning an item and its `eta`.
    Sampler(SamplerFn<T>),
}

impl<T> GenerativeModel<T> {
    pub fn atomic(atoms: Vec<Atom<T>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Validation("model has no atoms".into()));
        }
        let mut total = 0.0;
        for a in &atoms {
            if !(a.prob >= 0.0) || !(0.0..=1.0).contains(&a.eta) {
                return Err(Error::Validation(format!("atom with prob {} and eta {}", a.prob, a.eta)));
            }
            total += a.prob;
        }
        if (total - 1.0).abs() > crate::measures::MASS_TOLERANCE {
            return Err(Error::Validation(format!("atom probabilities sum to {total}")));
        }
        Ok(Self::Atomic(atoms))
    }

    pub fn sampler<F>(f: F) -> Self
    where
        F: Fn(&mut dyn RngCore) -> (T, f64) + Send + Sync + 'static,
    {
        Self::Sampler(Box::new(f))
    }
}

fn draw_atom<T>(atoms: &[Atom<T>], rng: &mut dyn RngCore) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, a) in atoms.iter().enumerate() {
        acc += a.prob;
        if u < acc {
            return i;
        }
    }
    atoms.iter().rposition(|a| a.prob > 0.0).unwrap_or(atoms.len() - 1)
}

fn draw_label(eta: f64, rng: &mut dyn RngCore) -> Label {
    (rng.random::<f64>() < eta) as Label
}

/// Mean and standard error of a risk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub mean: f64,
    pub std_error: f64,
}

impl RiskEstimate {
    /// Sample mean and standard error; a single sample has standard error zero.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std_error = if xs.len() < 2 {
            0.0
        } else {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        Self { mean, std_error }
    }
}

/// `E[min(eta, 1 - eta)]`: exact for atomic models, a Monte Carlo mean over
/// `samples` draws for samplers.
pub fn bayes_risk<T>(model: &GenerativeModel<T>, rng: &mut dyn RngCore, samples: usize) -> Result<RiskEstimate> {
    match model {
        GenerativeModel::Atomic(atoms) => Ok(RiskEstimate {
            mean: atoms.iter().map(|a| a.prob * a.eta.min(1.0 - a.eta)).sum(),
            std_error: 0.0,
        }),
        GenerativeModel::Sampler(f) => {
            if samples == 0 {
                return Err(Error::Parameter("Monte Carlo Bayes risk needs samples".into()));
            }
            let xs: Vec<f64> = (0..samples).map(|_| f(rng).1).map(|e| e.min(1.0 - e)).collect();
            Ok(RiskEstimate::from_samples(&xs))
        }
    }
}

/// Risk of the `k_n`-NN rule: mean and standard error of [`risk_trials`].
pub fn estimate_risk<T, D>(
    model: &GenerativeModel<T>,
    n: usize,
    schedule: KSchedule,
    trials: usize,
    test_size: usize,
    dist: D,
    seed: u64,
) -> Result<RiskEstimate>
where
    T: Sync,
    D: Fn(&T, &T) -> Result<f64> + Sync,
{
    let risks = risk_trials(model, n, schedule, trials, test_size, dist, seed)?;
    Ok(RiskEstimate::from_samples(&risks))
}

/// Test error rate of the `k_n`-NN rule in each of `trials` trials.
///
/// Trial `t` draws `n` training pairs and `test_size` test pairs from substream
/// `t` of `seed`. Atomic models compute the atom distance table once and
/// classify each distinct test atom once per trial.
pub fn risk_trials<T, D>(
    model: &GenerativeModel<T>,
    n: usize,
    schedule: KSchedule,
    trials: usize,
    test_size: usize,
    dist: D,
    seed: u64,
) -> Result<Vec<f64>>
where
    T: Sync,
    D: Fn(&T, &T) -> Result<f64> + Sync,
{
    if trials == 0 || test_size == 0 || n == 0 {
        return Err(Error::Parameter("trials, test size and n must be positive".into()));
    }
    let k = schedule.k(n)?;
    let risks: Vec<f64> = match model {
        GenerativeModel::Atomic(atoms) => {
            let m = atoms.len();
            let mut table = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..m {
                    table[i * m + j] = if i == j { 0.0 } else { dist(&atoms[i].item, &atoms[j].item)? };
                }
            }
            (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = substream(seed, t as u64);
                    let mut train = LabeledDataset::default();
                    for _ in 0..n {
                        let i = draw_atom(atoms, &mut rng);
                        train.push(i, draw_label(atoms[i].eta, &mut rng))?;
                    }
                    let mut memo: HashMap<usize, Label> = HashMap::new();
                    let mut errors = 0usize;
                    for _ in 0..test_size {
                        let q = draw_atom(atoms, &mut rng);
                        let y = draw_label(atoms[q].eta, &mut rng);
                        let pred = match memo.get(&q) {
                            Some(&p) => p,
                            None => {
                                let p = classify(&train, &q, k, |&a: &usize, &b: &usize| Ok(table[a * m + b]))?;
                                memo.insert(q, p);
                                p
                            }
                        };
                        errors += (pred != y) as usize;
                    }
                    Ok(errors as f64 / test_size as f64)
                })
                .collect::<Result<_>>()?
        }
        GenerativeModel::Sampler(f) => (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = substream(seed, t as u64);
                let mut train = LabeledDataset::default();
                for _ in 0..n {
                    let (x, eta) = f(&mut rng);
                    let y = draw_label(eta, &mut rng);
                    train.push(x, y)?;
                }
                let mut errors = 0usize;
                for _ in 0..test_size {
                    let (x, eta) = f(&mut rng);
                    let y = draw_label(eta, &mut rng);
                    errors += (classify(&train, &x, k, &dist)? != y) as usize;
                }
                Ok(errors as f64 / test_size as f64)
            })
            .collect::<Result<_>>()?,
    };
    Ok(risks)
}
