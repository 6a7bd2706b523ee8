//! The staircase family on which the `k_n`-NN rule fails to be consistent.
//!
//! Fix a strictly increasing sequence `0 < a_1 < a_2 < ... < 1`. The base
//! measure `mu_0` has the staircase quantile function `f_0 = sum_i a_i 1{I_i}`;
//! `mu_m` (`m >= 1`) has the same steps except that `I_m` is raised to
//! `a_{m+1}`. Two family members differ on at most two steps, so
//!
//! ```text
//! W_p^p(mu_0, mu_m) = (a_{m+1} - a_m)^p 2^-m
//! W_p^p(mu_j, mu_m) = (a_{j+1} - a_j)^p 2^-j + (a_{m+1} - a_m)^p 2^-m      (j != m)
//! ```
//!
//! The sampling law puts mass `1/2` on `mu_0` (label 1) and `2^-(m+1)` on
//! `mu_m` (label 0). Every `mu_m` is closer to `mu_0` than to any other member,
//! so once the sample holds many copies of `mu_0` they outvote the others.
//!
//! With the literal `k`-NN rule a query `mu_m` sees its own copies first (at
//! distance zero), then the copies of `mu_0`, then the other members. The
//! prediction therefore depends only on these counts, which
//! [`counting_oracle`] uses as an independent check of [`simulate`].

use std::collections::HashMap;

use rand::RngCore;

use crate::error::{check_p, Error, Result};
use crate::knn::{classify, Label, LabeledDataset};
use crate::measures::{StaircaseQuantile, DEFAULT_STAIRCASE_LEVELS};
use crate::transport::{pow_abs, root};

/// Default truncation of the family: `P(m > 64) < 2^-64`.
pub const DEFAULT_MAX_INDEX: usize = 64;

/// Default number of test queries per simulated trial.
pub const DEFAULT_TEST_QUERIES: usize = 1000;

/// The sequence `(a_i)`, the order `p` and the truncation `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseFamilyConfig {
    /// `a_1, ..., a_L`: the values used by [`staircase`].
    values: Vec<f64>,
    /// `a_{i+1} - a_i` for `i = 1..=M`.
    increments: Vec<f64>,
    p: f64,
    max_index: usize,
}

impl StaircaseFamilyConfig {
    /// `a_i = 1 - 2^-i`.
    ///
    /// The increments `2^-(i+1)` are stored exactly, so the closed forms stay
    /// exact for every `m <= max_index`. Only `a_1, ..., a_53` are below one in
    /// double precision; [`staircase`] is therefore available for `m <= 52`.
    pub fn dyadic(p: f64, max_index: usize) -> Result<Self> {
        check_p(p)?;
        if max_index == 0 || max_index > 1000 {
            return Err(Error::Parameter(format!("max index {max_index} outside 1..=1000")));
        }
        let levels = DEFAULT_STAIRCASE_LEVELS.min(53);
        let values = (1..=levels).map(|i| 1.0 - 0.5f64.powi(i as i32)).collect();
        let increments = (1..=max_index).map(|i| 0.5f64.powi(i as i32 + 1)).collect();
        Ok(Self { values, increments, p, max_index })
    }

    /// A custom sequence `a_1, ..., a_L` with `L >= max_index + 1`.
    pub fn from_sequence(values: Vec<f64>, p: f64, max_index: usize) -> Result<Self> {
        check_p(p)?;
        if max_index == 0 || values.len() < max_index + 1 {
            return Err(Error::Parameter(format!(
                "{} sequence terms cannot support max index {max_index}",
                values.len()
            )));
        }
        if values.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::Parameter("sequence terms must lie in (0, 1)".into()));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter("sequence must be strictly increasing".into()));
        }
        let increments = (0..max_index).map(|i| values[i + 1] - values[i]).collect();
        Ok(Self { values, increments, p, max_index })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// `a_i` for `1 <= i <= L`.
    pub fn a(&self, i: usize) -> Option<f64> {
        i.checked_sub(1).and_then(|j| self.values.get(j)).copied()
    }

    /// `a_{m+1} - a_m` for `1 <= m <= M`.
    pub fn increment(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|j| self.increments.get(j)).copied()
    }

    /// Same configuration with another order `p`.
    pub fn with_p(&self, p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self { p, ..self.clone() })
    }

    fn check_index(&self, m: usize) -> Result<()> {
        if m > self.max_index {
            return Err(Error::Parameter(format!("index {m} exceeds max index {}", self.max_index)));
        }
        Ok(())
    }

    /// `W_p^p(mu_0, mu_m) = (a_{m+1} - a_m)^p 2^-m`, zero for `m = 0`.
    fn contribution(&self, m: usize) -> f64 {
        if m == 0 {
            0.0
        } else {
            pow_abs(self.increments[m - 1], self.p) * 0.5f64.powi(m as i32)
        }
    }
}

/// The quantile function of `mu_m`, truncated at the stored sequence length.
pub fn staircase(cfg: &StaircaseFamilyConfig, m: usize) -> Result<StaircaseQuantile> {
    cfg.check_index(m)?;
    if m + 1 > cfg.values.len() {
        return Err(Error::Parameter(format!(
            "staircase {m} needs a_{} but only {} terms are representable",
            m + 1,
            cfg.values.len()
        )));
    }
    let mut values = cfg.values.clone();
    if m >= 1 {
        values[m - 1] = values[m];
    }
    StaircaseQuantile::new(values)
}

/// Closed-form `W_p(mu_j, mu_m)`.
pub fn wp_closed(cfg: &StaircaseFamilyConfig, j: usize, m: usize) -> Result<f64> {
    cfg.check_index(j)?;
    cfg.check_index(m)?;
    if j == m {
        return Ok(0.0);
    }
    Ok(root(cfg.contribution(j) + cfg.contribution(m), cfg.p))
}

/// `W_p^p` held exactly as an unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
///
/// Ordering is lexicographic on `(hi, lo)`, which matches the order of the
/// exact sums, so comparisons between family distances never tie through
/// rounding. `W_p` is monotone in `W_p^p`, so the order is also that of `W_p`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerSum {
    hi: f64,
    lo: f64,
}

impl PowerSum {
    fn two_sum(a: f64, b: f64) -> Self {
        let hi = a + b;
        let bb = hi - a;
        let lo = (a - (hi - bb)) + (b - bb);
        Self { hi, lo }
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    /// `W_p` rounded to double precision.
    pub fn distance(&self, p: f64) -> f64 {
        root(self.hi, p)
    }
}

impl crate::dimension::Distance for PowerSum {
    fn is_positive(&self) -> bool {
        self.hi.is_finite() && self.hi > 0.0
    }
}

/// Exact `W_p^p(mu_j, mu_m)` as the sum of the two step contributions.
pub fn wp_pow_exact(cfg: &StaircaseFamilyConfig, j: usize, m: usize) -> Result<PowerSum> {
    cfg.check_index(j)?;
    cfg.check_index(m)?;
    if j == m {
        return Ok(PowerSum { hi: 0.0, lo: 0.0 });
    }
    Ok(PowerSum::two_sum(cfg.contribution(j), cfg.contribution(m)))
}

/// Table `W_p(mu_j, mu_m)` for `0 <= j, m <= M`, row-major.
pub fn distance_table(cfg: &StaircaseFamilyConfig) -> Vec<f64> {
    let n = cfg.max_index + 1;
    let mut t = vec![0.0; n * n];
    for j in 0..n {
        for m in 0..n {
            t[j * n + m] = wp_closed(cfg, j, m).expect("indices in range");
        }
    }
    t
}

/// Draws `m` with `P(0) = 1/2` and `P(m) = 2^-(m+1)`: the number of leading
/// one bits of a fair bit stream. Values above `max_index` are reported as
/// `max_index`.
pub fn sample_index(rng: &mut dyn RngCore, max_index: usize) -> usize {
    let mut m = 0usize;
    loop {
        let run = rng.next_u64().trailing_ones() as usize;
        m += run;
        if run < 64 || m >= max_index {
            return m.min(max_index);
        }
    }
}

/// Deterministic labels: `mu_0` is class 1, every other member class 0.
pub fn label(m: usize) -> Label {
    (m == 0) as Label
}

/// Hoeffding lower bound `1 - exp(-2 (sqrt(n)/2 - 1)^2)` on `P(X_n > sqrt(n))`
/// for `X_n ~ Binomial(n, 1/2)`.
///
/// `P(X_n <= sqrt n) = P(X_n - n/2 <= -(n/2 - sqrt n))`, and Hoeffding gives
/// `exp(-2 (n/2 - sqrt n)^2 / n) = exp(-2 (sqrt(n)/2 - 1)^2)`.
pub fn hoeffding_bound(n: u64) -> Result<f64> {
    if n < 4 {
        return Err(Error::Parameter(format!("Hoeffding bound needs n >= 4, got {n}")));
    }
    let t = (n as f64).sqrt() / 2.0 - 1.0;
    Ok(1.0 - (-2.0 * t * t).exp())
}

/// `P(X_n > sqrt(n))` for `X_n ~ Binomial(n, 1/2)`, summed in the log domain.
pub fn exact_tail(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let t = n.isqrt();
    // ln(C(n, x) 2^-n) for x = 0..=t
    let mut terms = Vec::with_capacity(t as usize + 1);
    let mut log_c = 0.0f64;
    let log_half_n = -(n as f64) * std::f64::consts::LN_2;
    for x in 0..=t.min(n) {
        if x > 0 {
            log_c += ((n - x + 1) as f64).ln() - (x as f64).ln();
        }
        terms.push(log_c + log_half_n);
    }
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lower = (top + terms.iter().map(|l| (l - top).exp()).sum::<f64>().ln()).exp();
    (1.0 - lower).max(0.0)
}

/// One simulated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub n: usize,
    pub k: usize,
    pub trial: u64,
    /// Copies of `mu_0` in the training sample.
    pub x_n: usize,
    pub emp_risk: f64,
    pub exact_tail: f64,
    pub hoeffding_bound: f64,
    /// Test queries whose `k`-NN prediction differs from [`counting_oracle`].
    pub mismatches: usize,
}

impl SimRecord {
    /// `P(X_n > sqrt n) * P(mu != mu_0)`, the lower bound on the expected risk
    /// claimed for this construction.
    pub fn claimed_bound(&self) -> f64 {
        0.5 * self.exact_tail
    }
}

/// Predicted label of query `m` from copy counts alone.
///
/// `own` is the number of copies of `mu_m` and `x_n` the number of copies of
/// `mu_0` in a training sample of size at least `k`.
pub fn counting_oracle(m: usize, own: usize, x_n: usize, k: usize) -> Label {
    let ones = if m == 0 {
        x_n.min(k)
    } else {
        let zeros = own.min(k);
        x_n.min(k - zeros)
    };
    (2 * ones >= k) as Label
}

/// Draws a sample of size `n` and `test_queries` queries from the sampling law,
/// classifies each query with the `k`-NN rule under [`wp_closed`] and compares
/// every prediction with [`counting_oracle`].
pub fn simulate(
    cfg: &StaircaseFamilyConfig,
    n: usize,
    k: usize,
    test_queries: usize,
    trial: u64,
    rng: &mut dyn RngCore,
) -> Result<SimRecord> {
    simulate_with_table(cfg, &distance_table(cfg), n, k, test_queries, trial, rng)
}

/// [`simulate`] with a precomputed [`distance_table`].
pub fn simulate_with_table(
    cfg: &StaircaseFamilyConfig,
    table: &[f64],
    n: usize,
    k: usize,
    test_queries: usize,
    trial: u64,
    rng: &mut dyn RngCore,
) -> Result<SimRecord> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if test_queries == 0 {
        return Err(Error::Parameter("no test queries".into()));
    }
    let size = cfg.max_index + 1;
    if table.len() != size * size {
        return Err(Error::Parameter("distance table does not match the configuration".into()));
    }
    let mut train = LabeledDataset::default();
    let mut counts = vec![0usize; size];
    for _ in 0..n {
        let m = sample_index(rng, cfg.max_index);
        counts[m] += 1;
        train.push(m, label(m))?;
    }
    let mut memo: HashMap<usize, (Label, Label)> = HashMap::new();
    let mut errors = 0usize;
    let mut mismatches = 0usize;
    for _ in 0..test_queries {
        let q = sample_index(rng, cfg.max_index);
        let (pred, oracle) = match memo.get(&q) {
            Some(&v) => v,
            None => {
                let pred = classify(&train, &q, k, |&a: &usize, &b: &usize| Ok(table[a * size + b]))?;
                let v = (pred, counting_oracle(q, counts[q], counts[0], k));
                memo.insert(q, v);
                v
            }
        };
        errors += (pred != label(q)) as usize;
        mismatches += (pred != oracle) as usize;
    }
    Ok(SimRecord {
        n,
        k,
        trial,
        x_n: counts[0],
        emp_risk: errors as f64 / test_queries as f64,
        exact_tail: exact_tail(n as u64),
        hoeffding_bound: if n >= 4 { hoeffding_bound(n as u64)? } else { 0.0 },
        mismatches,
    })
}
