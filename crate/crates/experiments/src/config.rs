//! Experiment configuration.
//!
//! A configuration file is flat `key=value` text; blank lines and lines starting
//! with `#` are ignored. Later assignments override earlier ones, and
//! command-line overrides are applied last. Recognized keys:
//!
//! | key          | meaning                                   | default            |
//! |--------------|-------------------------------------------|--------------------|
//! | `suite`      | suite name                                | required           |
//! | `seed`       | master seed                               | required           |
//! | `n`          | comma-separated, strictly increasing grid | per suite          |
//! | `trials`     | trials per grid point                     | per suite          |
//! | `schedule`   | `k_n` schedule (`sqrt`, `logsq`, ...)     | `sqrt`             |
//! | `test`       | test queries per trial                    | `1000`             |
//! | `p`          | Wasserstein order                         | `1`                |
//! | `max_index`  | staircase family truncation               | `64`               |
//! | `instances`  | random instances (geometry etc.)          | per suite          |
//! | `resolution` | wavelet render resolution `R`             | `10`               |
//! | `out`        | output path (stdout when absent)          | none               |

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use wassknn::knn::KSchedule;

use crate::error::{Error, Result};

/// The experiment suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Counterexample,
    FiniteSupport,
    Gaussian,
    RationalGrid,
    Wavelet,
    Geometry,
    Dimension,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Counterexample,
        Suite::FiniteSupport,
        Suite::Gaussian,
        Suite::RationalGrid,
        Suite::Wavelet,
        Suite::Geometry,
        Suite::Dimension,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Counterexample => "counterexample",
            Suite::FiniteSupport => "finite-support",
            Suite::Gaussian => "gaussian",
            Suite::RationalGrid => "rational-grid",
            Suite::Wavelet => "wavelet",
            Suite::Geometry => "geometry",
            Suite::Dimension => "dimension",
        }
    }

    fn default_grid(&self) -> Vec<usize> {
        match self {
            Suite::Counterexample => vec![64, 256, 1024, 4096],
            Suite::FiniteSupport | Suite::Gaussian => vec![100, 400, 1600, 6400],
            Suite::Wavelet => vec![100, 400, 1600],
            Suite::RationalGrid => vec![1, 2, 3, 4],
            Suite::Geometry | Suite::Dimension => vec![],
        }
    }

    fn default_trials(&self) -> usize {
        match self {
            Suite::Counterexample => 100,
            Suite::FiniteSupport | Suite::Gaussian => 50,
            Suite::Wavelet => 20,
            _ => 1,
        }
    }

    fn default_instances(&self) -> usize {
        match self {
            Suite::Geometry => 500,
            Suite::RationalGrid => 50,
            _ => 100,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                Error::Usage(format!("unknown suite `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub n_grid: Vec<usize>,
    pub schedule: String,
    pub trials: usize,
    pub test_queries: usize,
    pub seed: u64,
    pub p: f64,
    pub max_index: usize,
    pub instances: usize,
    pub resolution: u32,
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 11] =
    ["suite", "seed", "n", "trials", "schedule", "test", "p", "max_index", "instances", "resolution", "out"];

/// `key=value` pairs of a configuration file, in file order.
pub fn parse_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("config line {}: expected key=value", no + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn number<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Usage(format!("`{key}` has invalid value `{v}`")))
}

impl ExperimentConfig {
    /// Builds a configuration from assignments; the last assignment of a key wins.
    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> Result<Self> {
        let mut raw: Vec<(&str, &str)> = Vec::new();
        for (k, v) in pairs {
            let (k, v) = (k.as_ref(), v.as_ref());
            if !KEYS.contains(&k) {
                return Err(Error::Usage(format!("unknown config key `{k}`")));
            }
            raw.retain(|(x, _)| *x != k);
            raw.push((k, v));
        }
        let get = |key: &str| raw.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);

        let suite: Suite = get("suite").ok_or_else(|| Error::Usage("no suite given".into()))?.parse()?;
        let seed = number(
            "seed",
            get("seed").ok_or_else(|| Error::Usage("no seed given; runs never draw ambient entropy".into()))?,
        )?;
        let n_grid = match get("n") {
            Some(v) => v.split(',').map(|x| number("n", x.trim())).collect::<Result<Vec<usize>>>()?,
            None => suite.default_grid(),
        };
        let cfg = ExperimentConfig {
            suite,
            n_grid,
            schedule: get("schedule").unwrap_or("sqrt").to_string(),
            trials: get("trials").map(|v| number("trials", v)).transpose()?.unwrap_or(suite.default_trials()),
            test_queries: get("test").map(|v| number("test", v)).transpose()?.unwrap_or(1000),
            seed,
            p: get("p").map(|v| number("p", v)).transpose()?.unwrap_or(1.0),
            max_index: get("max_index").map(|v| number("max_index", v)).transpose()?.unwrap_or(64),
            instances: get("instances")
                .map(|v| number("instances", v))
                .transpose()?
                .unwrap_or(suite.default_instances()),
            resolution: get("resolution").map(|v| number("resolution", v)).transpose()?.unwrap_or(10),
            out: get("out").map(PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Usage("n grid must be strictly increasing".into()));
        }
        if self.n_grid.contains(&0) {
            return Err(Error::Usage("n grid entries must be positive".into()));
        }
        if self.n_grid.iter().any(|&n| n as u64 >= 1 << 32) {
            return Err(Error::Usage("n grid entries must be below 2^32".into()));
        }
        let needs_grid = !matches!(self.suite, Suite::Geometry | Suite::Dimension);
        if needs_grid && self.n_grid.is_empty() {
            return Err(Error::Usage(format!("suite {} needs an n grid", self.suite)));
        }
        if self.trials == 0 || self.test_queries == 0 || self.instances == 0 {
            return Err(Error::Usage("trials, test and instances must be at least 1".into()));
        }
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::Usage(format!("p must be a finite real >= 1, got {}", self.p)));
        }
        KSchedule::parse(&self.schedule).map_err(|e| Error::Usage(e.to_string()))?;
        Ok(())
    }

    pub fn k_schedule(&self) -> KSchedule {
        KSchedule::parse(&self.schedule).expect("validated schedule")
    }

    /// Canonical `key=value` lines of every field except `out`.
    pub fn canonical(&self) -> String {
        let grid: Vec<String> = self.n_grid.iter().map(|n| n.to_string()).collect();
        format!(
            "suite={}\nseed={}\nn={}\ntrials={}\nschedule={}\ntest={}\np={:?}\nmax_index={}\ninstances={}\nresolution={}\n",
            self.suite,
            self.seed,
            grid.join(","),
            self.trials,
            self.schedule,
            self.test_queries,
            self.p,
            self.max_index,
            self.instances,
            self.resolution
        )
    }

    /// First 16 hex digits of the SHA-256 of [`canonical`](Self::canonical).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
