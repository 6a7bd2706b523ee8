//! The experiment suites and their CSV schemas.
//!
//! | suite            | columns (before `config_hash,seed`)                                  |
//! |------------------|----------------------------------------------------------------------|
//! | `counterexample` | `n,k,trial,x_n,emp_risk,exact_tail,hoeffding_bound`                  |
//! | `finite-support` | `n,k,trial,risk,bayes_risk`                                          |
//! | `gaussian`       | `n,k,trial,risk,bayes_risk`                                          |
//! | `wavelet`        | `n,k,trial,risk,bayes_risk`                                          |
//! | `rational-grid`  | `n,d,pair,wp,bound,holds`                                            |
//! | `geometry`       | `family,triples,wpc_pass,pc_pass,failures,worst_wpc_gap,worst_pc_gap`|
//! | `dimension`      | `check,dim,instances,worst,bound,failures`                           |
//!
//! Every random unit (trial, pair, triple, family) reads its own substream of
//! the master seed, so the output does not depend on the number of workers.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use wassknn::counterexample::{distance_table, simulate_with_table, SimRecord, StaircaseFamilyConfig};
use wassknn::dimension::{factorial_grid, nagata_check, packing_search, rational_separation, Ball, BallFamily};
use wassknn::geometry::{comparison_gap, displacement_geodesic, gaussian_geodesic, mixture_geodesic, pc_gap};
use wassknn::knn::{bayes_risk, risk_trials, GenerativeModel};
use wassknn::measures::DiscreteMeasure;
use wassknn::models::{finite_support_distance, finite_support_model, gaussian_distance, gaussian_model, wavelet_model};
use wassknn::random;
use wassknn::rng::substream;
use wassknn::transport::{euclidean, w2_gaussian, wp_euclidean};
use wassknn::wavelet::{w1_density, WaveletBasis, DEFAULT_ORDER};

use crate::config::{ExperimentConfig, Suite};
use crate::error::{Error, Result};
use crate::table::{float, missing, to_csv, Table};

/// Tolerance for the mixture comparison gap, which vanishes identically.
pub const MIXTURE_TOLERANCE: f64 = 1e-9;
/// Tolerance for the quadruple (PC) inequality.
pub const PC_TOLERANCE: f64 = 1e-9;
/// Tolerance for the comparison (WPC) inequality.
pub const WPC_TOLERANCE: f64 = 1e-8;

/// A seed for sub-experiment `tag`, drawn from substream `tag` of `seed`.
pub fn derived_seed(seed: u64, tag: u64) -> u64 {
    substream(seed, tag).next_u64()
}

fn unit(n: usize, t: usize) -> u64 {
    (n as u64) << 32 | t as u64
}

/// CSV bytes for `cfg`.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<u8>> {
    to_csv(&run_table(cfg)?, cfg)
}

pub fn run_table(cfg: &ExperimentConfig) -> Result<Table> {
    match cfg.suite {
        Suite::Counterexample => counterexample(cfg),
        Suite::FiniteSupport => {
            let model = finite_support_model()?;
            risk_curve(cfg, &model, finite_support_distance)
        }
        Suite::Gaussian => {
            let model = gaussian_model()?;
            risk_curve(cfg, &model, gaussian_distance)
        }
        Suite::Wavelet => {
            let basis = WaveletBasis::new(DEFAULT_ORDER, cfg.resolution)?;
            let model = wavelet_model(&basis, derived_seed(cfg.seed, u64::MAX))?;
            risk_curve(cfg, &model, |a, b| w1_density(a, b, &basis))
        }
        Suite::RationalGrid => rational_grid(cfg),
        Suite::Geometry => geometry(cfg),
        Suite::Dimension => dimension(cfg),
    }
}

/// Simulated trials of the staircase construction, ordered by `(n, trial)`.
///
/// Trial `t` at sample size `n` reads substream `n * 2^32 + t` of the seed.
pub fn counterexample_records(cfg: &ExperimentConfig) -> Result<Vec<SimRecord>> {
    let family = StaircaseFamilyConfig::dyadic(cfg.p, cfg.max_index)?;
    let table = distance_table(&family);
    let schedule = cfg.k_schedule();
    let units: Vec<(usize, usize, usize)> = cfg
        .n_grid
        .iter()
        .map(|&n| Ok((n, schedule.k(n)?)))
        .collect::<wassknn::Result<Vec<_>>>()?
        .into_iter()
        .flat_map(|(n, k)| (0..cfg.trials).map(move |t| (n, k, t)))
        .collect();
    Ok(units
        .into_par_iter()
        .map(|(n, k, t)| {
            let mut rng = substream(cfg.seed, unit(n, t));
            simulate_with_table(&family, &table, n, k, cfg.test_queries, t as u64, &mut rng)
        })
        .collect::<wassknn::Result<Vec<_>>>()?)
}

fn counterexample(cfg: &ExperimentConfig) -> Result<Table> {
    let records = counterexample_records(cfg)?;
    let bad: usize = records.iter().map(|r| r.mismatches).sum();
    if bad > 0 {
        return Err(Error::Integrity(format!("{bad} predictions differ from the counting oracle")));
    }
    let mut t = Table::new(&["n", "k", "trial", "x_n", "emp_risk", "exact_tail", "hoeffding_bound"]);
    for r in records {
        t.push(vec![
            r.n.to_string(),
            r.k.to_string(),
            r.trial.to_string(),
            r.x_n.to_string(),
            float(r.emp_risk),
            float(r.exact_tail),
            float(r.hoeffding_bound),
        ]);
    }
    Ok(t)
}

/// Per-trial test risks at every `n`; the trials at `n` use seed `derived_seed(seed, n)`.
fn risk_curve<T, D>(cfg: &ExperimentConfig, model: &GenerativeModel<T>, dist: D) -> Result<Table>
where
    T: Sync,
    D: Fn(&T, &T) -> wassknn::Result<f64> + Sync,
{
    let schedule = cfg.k_schedule();
    let bayes = bayes_risk(model, &mut substream(cfg.seed, 0), 0)?.mean;
    let mut t = Table::new(&["n", "k", "trial", "risk", "bayes_risk"]);
    for &n in &cfg.n_grid {
        let k = schedule.k(n)?;
        let risks = risk_trials(model, n, schedule, cfg.trials, cfg.test_queries, &dist, derived_seed(cfg.seed, n as u64))?;
        for (trial, r) in risks.into_iter().enumerate() {
            t.push(vec![n.to_string(), k.to_string(), trial.to_string(), float(r), float(bayes)]);
        }
    }
    Ok(t)
}

fn rational_grid(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&["n", "d", "pair", "wp", "bound", "holds"]);
    for &n in &cfg.n_grid {
        let level = u32::try_from(n).map_err(|_| Error::Usage(format!("grid level {n} too large")))?;
        for d in 1..=2usize {
            let grid = factorial_grid(level, d, &vec![(0.0, 1.0); d])?;
            let pts = grid.numerators();
            let rows = (0..cfg.instances)
                .into_par_iter()
                .map(|i| {
                    let mut rng = substream(cfg.seed, unit(n, i) | (d as u64) << 60);
                    let mu = random::rational_measure(&mut rng, level, &pts, 4)?;
                    let nu = loop {
                        let nu = random::rational_measure(&mut rng, level, &pts, 4)?;
                        if nu != mu {
                            break nu;
                        }
                    };
                    let s = rational_separation(&mu, &nu, cfg.p)?;
                    Ok(vec![
                        n.to_string(),
                        d.to_string(),
                        i.to_string(),
                        float(s.wp),
                        float(s.bound),
                        (s.holds() as u8).to_string(),
                    ])
                })
                .collect::<wassknn::Result<Vec<_>>>()?;
            rows.into_iter().for_each(|r| t.push(r));
        }
    }
    Ok(t)
}

/// Gaps for one random triple: `(comparison gap, quadruple gap)`.
fn triple_gaps(family: usize, rng: &mut impl Rng) -> wassknn::Result<(f64, f64)> {
    let t: f64 = rng.random();
    match family {
        0 => {
            let ms: Vec<DiscreteMeasure> =
                (0..3).map(|_| random::grid_measure(rng, 2, 8, 4)).collect::<wassknn::Result<_>>()?;
            let w1 = |a: &DiscreteMeasure, b: &DiscreteMeasure| wp_euclidean(a, b, 1.0);
            Ok((comparison_gap(w1, &ms[0], &ms[1], &ms[2], mixture_geodesic, t)?, f64::NAN))
        }
        1 => {
            let ms: Vec<DiscreteMeasure> =
                (0..3).map(|_| random::discrete_measure(rng, 2, 4)).collect::<wassknn::Result<_>>()?;
            let w2 = |a: &DiscreteMeasure, b: &DiscreteMeasure| wp_euclidean(a, b, 2.0);
            Ok((
                comparison_gap(w2, &ms[0], &ms[1], &ms[2], displacement_geodesic, t)?,
                pc_gap(w2, &ms[0], &ms[1], &ms[2], displacement_geodesic, t)?,
            ))
        }
        _ => {
            let d = rng.random_range(1..=4);
            let gs = (0..3).map(|_| random::gaussian(rng, d)).collect::<wassknn::Result<Vec<_>>>()?;
            Ok((
                comparison_gap(w2_gaussian, &gs[0], &gs[1], &gs[2], gaussian_geodesic, t)?,
                pc_gap(w2_gaussian, &gs[0], &gs[1], &gs[2], gaussian_geodesic, t)?,
            ))
        }
    }
}

/// Random triples per geodesic family; triple `i` of family `f` reads substream `f * 2^32 + i`.
pub fn geometry_gaps(cfg: &ExperimentConfig, family: usize) -> Result<Vec<(f64, f64)>> {
    Ok((0..cfg.instances)
        .into_par_iter()
        .map(|i| triple_gaps(family, &mut substream(cfg.seed, unit(family, i))))
        .collect::<wassknn::Result<Vec<_>>>()?)
}

fn geometry(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&["family", "triples", "wpc_pass", "pc_pass", "failures", "worst_wpc_gap", "worst_pc_gap"]);
    for (f, name) in ["mixture-w1", "displacement-w2", "bures-w2"].into_iter().enumerate() {
        let gaps = geometry_gaps(cfg, f)?;
        let n = gaps.len();
        if f == 0 {
            let pass = gaps.iter().filter(|g| g.0.abs() <= MIXTURE_TOLERANCE).count();
            let worst = gaps.iter().map(|g| g.0).fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
            t.push(vec![
                name.into(),
                n.to_string(),
                pass.to_string(),
                missing(),
                (n - pass).to_string(),
                float(worst),
                missing(),
            ]);
        } else {
            let wpc = gaps.iter().filter(|g| g.0 >= -WPC_TOLERANCE).count();
            let pc = gaps.iter().filter(|g| g.1 >= -PC_TOLERANCE).count();
            let min = |sel: fn(&(f64, f64)) -> f64| gaps.iter().map(sel).fold(f64::INFINITY, f64::min);
            t.push(vec![
                name.into(),
                n.to_string(),
                wpc.to_string(),
                pc.to_string(),
                (2 * n - wpc - pc).to_string(),
                float(min(|g| g.0)),
                float(min(|g| g.1)),
            ]);
        }
    }
    Ok(t)
}

/// Up to 40 balls in the unit square with radii `2^-1, ..., 2^-5`.
pub fn random_ball_family(rng: &mut impl Rng) -> (Vec<Vec<f64>>, Vec<Ball>) {
    let n = rng.random_range(2..40);
    let centers: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
    let balls = (0..n).map(|c| Ball { center: c, radius: 0.5f64.powi(rng.random_range(1..=5)) }).collect();
    (centers, balls)
}

/// Scale used for [`random_ball_family`]: above every radius.
pub const COVER_SCALE: f64 = 0.75;

/// Random probes added to the centers when estimating multiplicity.
pub const COVER_PROBES: usize = 2000;

/// `(all centers covered, multiplicity over probes)` of the greedy cover of one random family.
fn cover_trial(rng: &mut impl Rng) -> wassknn::Result<(bool, usize)> {
    let (centers, balls) = random_ball_family(rng);
    let cs = centers.clone();
    let family = BallFamily::new(move |i, j| euclidean(&cs[i], &cs[j]), balls.clone(), COVER_SCALE)?;
    let chosen = family.weak_cover()?;
    let covered = (0..centers.len()).all(|c| chosen.iter().any(|&b| family.contains(b, c)));
    let mut probes = centers.clone();
    probes.extend((0..COVER_PROBES).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]));
    let mult = probes
        .iter()
        .map(|x| chosen.iter().filter(|&&b| euclidean(&centers[balls[b].center], x) <= balls[b].radius).count())
        .max()
        .unwrap_or(0);
    Ok((covered, mult))
}

fn dimension(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&["check", "dim", "instances", "worst", "bound", "failures"]);
    for d in 1..=3usize {
        let trials = cfg.instances * 100;
        let r = packing_search(d, trials, 60, derived_seed(cfg.seed, d as u64))?;
        t.push(vec![
            "packing".into(),
            d.to_string(),
            trials.to_string(),
            r.largest.to_string(),
            r.bound.to_string(),
            (!r.holds() as u8).to_string(),
        ]);
    }
    let covers = (0..cfg.instances)
        .into_par_iter()
        .map(|i| cover_trial(&mut substream(cfg.seed, unit(4, i))))
        .collect::<wassknn::Result<Vec<_>>>()?;
    let worst = covers.iter().map(|c| c.1).max().unwrap_or(0);
    let failures = covers.iter().filter(|c| !c.0 || c.1 > 8).count();
    t.push(vec![
        "covering".into(),
        "2".into(),
        cfg.instances.to_string(),
        worst.to_string(),
        "8".into(),
        failures.to_string(),
    ]);
    let nagata = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(cfg.seed, unit(5, i));
            let pts: Vec<Vec<f64>> =
                (0..9).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
            nagata_check(&pts, &vec![0.0, 0.0], |x: &Vec<f64>, y: &Vec<f64>| euclidean(x, y), 8)
        })
        .collect::<Vec<bool>>();
    t.push(vec![
        "nagata".into(),
        "2".into(),
        cfg.instances.to_string(),
        missing(),
        "8".into(),
        nagata.iter().filter(|ok| !**ok).count().to_string(),
    ]);
    Ok(t)
}
