//! Acceptance run: one PASS/FAIL line per criterion, with its runtime budget.
//!
//! Exits with status 1 when any criterion fails.

use std::time::{Duration, Instant};

use rand::Rng;
use wassknn::counterexample::{exact_tail, hoeffding_bound, sample_index, wp_pow_exact, StaircaseFamilyConfig};
use wassknn::dimension::{factorial_grid, BallFamily};
use wassknn::geometry::gaussian_geodesic;
use wassknn::knn::{bayes_risk, estimate_risk, GenerativeModel, KSchedule, RiskEstimate};
use wassknn::measures::{factorial, DiscreteMeasure};
use wassknn::models::{finite_support_distance, finite_support_model, gaussian_distance, gaussian_model};
use wassknn::random;
use wassknn::rng::substream;
use wassknn::transport::{euclidean, w2_gaussian, wp_discrete, wp_euclidean, wp_one_dim, GaussianMeasure};
use wassknn::wavelet::{
    bound_ratios, psi_l1, random_density, render, w1_density, WaveletBasis, DEFAULT_BASE_LEVEL, DEFAULT_ORDER,
    DEFAULT_TOP_LEVEL,
};
use wassknn_experiments::suites::{counterexample_records, geometry_gaps, random_ball_family, COVER_SCALE};
use wassknn_experiments::{run, ExperimentConfig, Suite};

type Outcome = (bool, String);

fn c1_solver_oracle() -> Outcome {
    let mut rng = substream(1001, 0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let a = random::discrete_measure(&mut rng, 1, 8).unwrap();
        let b = random::discrete_measure(&mut rng, 1, 8).unwrap();
        for p in [1.0, 2.0] {
            let lp = wp_discrete(&a, &b, p, euclidean).unwrap().distance;
            let q = wp_one_dim(&a, &b, p).unwrap();
            worst = worst.max((lp - q).abs());
        }
    }
    (worst <= 1e-8, format!("max |simplex - quantile| = {worst:.2e} over 200 pairs x 2 orders (tol 1e-8)"))
}

/// `W_p^p(mu_0, mu_m) * 2^100` as an integer: `2^-(p (m + 1) + m)` for the dyadic sequence.
fn dyadic_contribution(m: usize, p: u32) -> u128 {
    if m == 0 {
        0
    } else {
        1u128 << (100 - (p as usize * (m + 1) + m))
    }
}

fn c2_staircase_geometry() -> Outcome {
    let big = 20;
    let mut strict = 0usize;
    let mut pairs = 0usize;
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [1u32, 2] {
        let cfg = StaircaseFamilyConfig::dyadic(p as f64, big).unwrap();
        let w = |a: usize, b: usize| wp_pow_exact(&cfg, a, b).unwrap();
        let exact = |a: usize, b: usize| if a == b { 0 } else { dyadic_contribution(a, p) + dyadic_contribution(b, p) };
        for j in 1..=big {
            for m in j + 1..=big {
                pairs += 1;
                let lib = w(j, m) > w(j, 0) && w(j, m) > w(m, 0);
                let oracle = exact(j, m) > exact(j, 0).max(exact(m, 0));
                strict += (lib && oracle) as usize;
                ok &= lib && oracle;
            }
        }
        // the library order agrees with exact integers on every pair used below
        for a in 0..=big {
            for b in 0..=big {
                for c in 0..=big {
                    ok &= (w(a, b) <= w(c, 0)) == (exact(a, b) <= exact(c, 0));
                }
            }
        }
        let balls: Vec<_> =
            (1..=big).map(|m| wassknn::dimension::Ball { center: m, radius: w(m, 0) }).collect();
        let s = w(1, 0);
        let tails_ok = (2..=big).all(|m0| BallFamily::new(w, balls[m0 - 1..].to_vec(), s).unwrap().is_disconnected());
        let mult = BallFamily::new(w, balls.clone(), w(1, 2)).unwrap().multiplicity(&[0]).unwrap();
        ok &= tails_ok && mult == big;
        notes.push(format!("p={p}: tails disconnected {tails_ok}, multiplicity at mu_0 {mult}"));
    }
    (ok, format!("{strict}/{pairs} strict orderings (exact); {}", notes.join("; ")))
}

fn c3_binomial_tail() -> Outcome {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for n in [16u64, 64, 256, 1024, 4096] {
        let margin = exact_tail(n) - hoeffding_bound(n).unwrap();
        worst = worst.min(margin);
        ok &= margin >= 0.0;
    }
    let n = 1024;
    let trials = 10_000u64;
    let threshold = (n as f64).sqrt();
    let hits = (0..trials)
        .filter(|&t| {
            let mut rng = substream(1003, t);
            let x = (0..n).filter(|_| sample_index(&mut rng, 64) == 0).count();
            x as f64 > threshold
        })
        .count();
    let mc = hits as f64 / trials as f64;
    let diff = (mc - exact_tail(n)).abs();
    ok &= diff <= 0.02;
    (ok, format!("min(exact - hoeffding) = {worst:.3e}; n=1024 Monte Carlo {mc:.4} vs exact {:.4} (|diff| {diff:.1e} <= 0.02)", exact_tail(n)))
}

fn c4_simulation_integrity() -> Outcome {
    let grid: Vec<String> = (6..=14).map(|e| (1usize << e).to_string()).collect();
    let cfg = ExperimentConfig::from_pairs(&[
        ("suite", "counterexample"),
        ("seed", "1004"),
        ("n", grid.join(",").as_str()),
        ("trials", "100"),
        ("test", "1000"),
    ])
    .unwrap();
    let records = counterexample_records(&cfg).unwrap();
    let mismatches: usize = records.iter().map(|r| r.mismatches).sum();
    let ks_ok = records.iter().all(|r| r.k * r.k >= r.n && (r.k - 1) * (r.k - 1) < r.n);
    let path: Vec<String> = (6..=14)
        .map(|e| {
            let n = 1usize << e;
            let rs: Vec<_> = records.iter().filter(|r| r.n == n).collect();
            let mean = rs.iter().map(|r| r.emp_risk).sum::<f64>() / rs.len() as f64;
            format!("{n}:{mean:.4}/{:.4}", rs[0].claimed_bound())
        })
        .collect();
    (
        mismatches == 0 && ks_ok && records.len() == 900,
        format!("{mismatches} oracle mismatches in {} trials; n:E[R_n]/claimed {}", records.len(), path.join(" ")),
    )
}

fn c5_geodesics() -> Outcome {
    let cfg = ExperimentConfig::from_pairs(&[("suite", "geometry"), ("seed", "1005"), ("instances", "500")]).unwrap();
    let mix = geometry_gaps(&cfg, 0).unwrap();
    let disp = geometry_gaps(&cfg, 1).unwrap();
    let bures = geometry_gaps(&cfg, 2).unwrap();
    let mix_worst = mix.iter().map(|g| g.0.abs()).fold(0.0, f64::max);
    let min = |v: &[(f64, f64)], f: fn(&(f64, f64)) -> f64| v.iter().map(f).fold(f64::INFINITY, f64::min);
    let (dw, dp) = (min(&disp, |g| g.0), min(&disp, |g| g.1));
    let (bw, bp) = (min(&bures, |g| g.0), min(&bures, |g| g.1));
    let ok = mix_worst <= 1e-9 && dp >= -1e-9 && bp >= -1e-9 && dw >= -1e-8 && bw >= -1e-8;
    (
        ok,
        format!(
            "mixture max|gap| {mix_worst:.1e}; displacement min pc {dp:.1e} min wpc {dw:.1e}; bures min pc {bp:.1e} min wpc {bw:.1e} (500 triples each)"
        ),
    )
}

fn c6_gaussian() -> Outcome {
    let mut rng = substream(1006, 0);
    let mut trace_worst = f64::INFINITY;
    let mut eq_worst = 0.0f64;
    let mut speed_worst = 0.0f64;
    for i in 0..500 {
        let d = 1 + i % 6;
        let g1 = random::gaussian(&mut rng, d).unwrap();
        let g2 = random::gaussian(&mut rng, d).unwrap();
        let w = w2_gaussian(&g1, &g2).unwrap();
        let lower = (g1.mean() - g2.mean()).norm_squared() + (g1.cov().trace().sqrt() - g2.cov().trace().sqrt()).powi(2);
        trace_worst = trace_worst.min(w * w - lower);

        let c: f64 = rng.random_range(0.1..3.0);
        let scaled = GaussianMeasure::new(g1.mean().clone(), g1.cov() * (c * c)).unwrap();
        let expect = (c - 1.0).abs() * g1.cov().trace().sqrt();
        eq_worst = eq_worst.max((w2_gaussian(&g1, &scaled).unwrap() - expect).abs());

        let (s, t): (f64, f64) = (rng.random(), rng.random());
        let a = gaussian_geodesic(&g1, &g2, s).unwrap();
        let b = gaussian_geodesic(&g1, &g2, t).unwrap();
        speed_worst = speed_worst.max((w2_gaussian(&a, &b).unwrap() - (t - s).abs() * w).abs());
    }
    (
        trace_worst >= -1e-9 && eq_worst <= 1e-8 && speed_worst <= 1e-7,
        format!(
            "min(W2^2 - trace bound) {trace_worst:.1e} (>= -1e-9); equality case max err {eq_worst:.1e} (<= 1e-8); geodesic speed max err {speed_worst:.1e} (<= 1e-7)"
        ),
    )
}

/// Shortest-path metric over random positive edge weights.
fn random_metric(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.random_range(0.1..1.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d
}

fn c7_finite_support() -> Outcome {
    let mut rng = substream(1007, 0);
    let (mut lower_bad, mut upper_bad, mut corrected_bad) = (0, 0, 0);
    for _ in 0..500 {
        let n = rng.random_range(2..=10);
        let d = random_metric(&mut rng, n);
        let delta = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| d[i][j])
            .fold(f64::INFINITY, f64::min);
        let diam = d.iter().flatten().copied().fold(0.0, f64::max);
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        let a = random::simplex_weights(&mut rng, n);
        let b = random::simplex_weights(&mut rng, n);
        let mu = DiscreteMeasure::new(pts.clone(), a.clone()).unwrap();
        let nu = DiscreteMeasure::new(pts, b.clone()).unwrap();
        let l2 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let w1 = wp_discrete(&mu, &nu, 1.0, |x, y| d[x[0] as usize][y[0] as usize]).unwrap().distance;
        lower_bad += (delta * l2 > w1 + 1e-12) as usize;
        upper_bad += (w1 > (n as f64).sqrt() * diam * l2 + 1e-12) as usize;
        corrected_bad += (delta / 2f64.sqrt() * l2 > w1 + 1e-12) as usize;
    }
    (
        lower_bad == 0 && upper_bad == 0,
        format!(
            "lower bound delta*|v|_2 <= W1 violated on {lower_bad}/500, upper bound violated on {upper_bad}/500; \
             with delta/sqrt(2) the lower bound is violated on {corrected_bad}/500"
        ),
    )
}

fn c8_rational_grid() -> Outcome {
    let mut rng = substream(1008, 0);
    let mut pairs = 0;
    let mut bad = 0;
    let mut tightest: f64 = f64::INFINITY;
    for n in 1..=4u32 {
        for d in 1..=2usize {
            let pts = factorial_grid(n, d, &vec![(0.0, 1.0); d]).unwrap().numerators();
            let f = factorial(n).unwrap() as f64;
            let bound = 1.0 / f / f;
            for i in 0..25 {
                let p = if i % 2 == 0 { 1.0 } else { 2.0 };
                let mu = random::rational_measure(&mut rng, n, &pts, 4).unwrap();
                let nu = loop {
                    let nu = random::rational_measure(&mut rng, n, &pts, 4).unwrap();
                    if nu != mu {
                        break nu;
                    }
                };
                let w = wp_euclidean(&mu.to_discrete(), &nu.to_discrete(), p).unwrap();
                tightest = tightest.min(w / bound);
                bad += (w < bound * (1.0 - 1e-12)) as usize;
                pairs += 1;
            }
        }
    }
    (bad == 0 && pairs == 200, format!("{bad}/{pairs} pairs below 1/(n!)^2; smallest W_p / bound = {tightest:.3}"))
}

fn curve<T: Sync>(
    model: &GenerativeModel<T>,
    dist: impl Fn(&T, &T) -> wassknn::Result<f64> + Sync,
    seed: u64,
) -> (Vec<RiskEstimate>, f64) {
    let bayes = bayes_risk(model, &mut substream(seed, 0), 0).unwrap().mean;
    let risks = [100, 400, 1600, 6400]
        .iter()
        .map(|&n| estimate_risk(model, n, KSchedule::Sqrt, 50, 1000, &dist, seed + n as u64).unwrap())
        .collect();
    (risks, bayes)
}

fn trend_ok(risks: &[RiskEstimate], bayes: f64) -> bool {
    let monotone = risks.windows(2).all(|w| w[1].mean <= w[0].mean + 2.0 * w[0].std_error.hypot(w[1].std_error));
    monotone && (risks.last().unwrap().mean - bayes).abs() <= 0.05
}

fn c9_consistency() -> Outcome {
    let (fs, fb) = curve(&finite_support_model().unwrap(), finite_support_distance, 1009);
    let (gs, gb) = curve(&gaussian_model().unwrap(), gaussian_distance, 2009);
    let show = |r: &[RiskEstimate]| r.iter().map(|x| format!("{:.4}", x.mean)).collect::<Vec<_>>().join(" ");
    (
        trend_ok(&fs, fb) && trend_ok(&gs, gb),
        format!("finite-support {} (Bayes {fb:.4}); gaussian {} (Bayes {gb:.4})", show(&fs), show(&gs)),
    )
}

/// Exact `W_1` between cell-averaged discretizations of two rendered densities.
fn discretized_w1(f: &[f64], g: &[f64], cells: usize) -> f64 {
    let per = (f.len() - 1) / cells;
    let h = 1.0 / (f.len() - 1) as f64;
    let xs: Vec<f64> = (0..cells).map(|c| (c as f64 + 0.5) / cells as f64).collect();
    let measure = |v: &[f64]| {
        let ws: Vec<f64> = (0..cells)
            .map(|c| (0..per).map(|i| 0.5 * h * (v[c * per + i] + v[c * per + i + 1])).sum::<f64>())
            .collect();
        let s: f64 = ws.iter().sum();
        DiscreteMeasure::on_line(&xs, &ws.iter().map(|w| w / s).collect::<Vec<_>>()).unwrap()
    };
    wp_discrete(&measure(f), &measure(g), 1.0, euclidean).unwrap().distance
}

fn c10_wavelet() -> Outcome {
    let fine = WaveletBasis::new(DEFAULT_ORDER, 14).unwrap();
    let target = 0.5f64.sqrt();
    let mut ratio_err = 0.0f64;
    for j in DEFAULT_BASE_LEVEL..DEFAULT_BASE_LEVEL + 4 {
        let r = psi_l1(&fine, j + 1, 1).unwrap() / psi_l1(&fine, j, 1).unwrap();
        ratio_err = ratio_err.max((r / target - 1.0).abs());
    }
    let basis = WaveletBasis::new(DEFAULT_ORDER, 12).unwrap();
    let mut rng = substream(1010, 0);
    let mut ordered = 0;
    let mut w1_err = 0.0f64;
    for _ in 0..50 {
        let f = random_density(&basis, DEFAULT_BASE_LEVEL, DEFAULT_TOP_LEVEL, &mut rng).unwrap();
        let g = random_density(&basis, DEFAULT_BASE_LEVEL, DEFAULT_TOP_LEVEL, &mut rng).unwrap();
        let r = bound_ratios(&f, &g, &basis).unwrap();
        ordered += (r.lower_denominator <= r.upper_denominator && r.upper_ratio <= r.lower_ratio) as usize;
        let oracle = discretized_w1(&render(&f, &basis).unwrap(), &render(&g, &basis).unwrap(), 256);
        w1_err = w1_err.max((w1_density(&f, &g, &basis).unwrap() - oracle).abs());
    }
    (
        ratio_err <= 0.02 && ordered == 50 && w1_err <= 1e-3,
        format!(
            "psi L1 level ratio max rel err {ratio_err:.2e} (<= 2%); denominators ordered on {ordered}/50; \
             w1 vs discretized OT max err {w1_err:.1e} (<= 1e-3)"
        ),
    )
}

/// Exact depth of a disc arrangement: the deepest point can be taken at a
/// center or at an intersection of two boundary circles.
fn max_depth(discs: &[(f64, f64, f64)]) -> usize {
    let mut cands: Vec<(f64, f64)> = discs.iter().map(|&(x, y, _)| (x, y)).collect();
    for (i, &(x1, y1, r1)) in discs.iter().enumerate() {
        for &(x2, y2, r2) in &discs[i + 1..] {
            let (dx, dy) = (x2 - x1, y2 - y1);
            let d = dx.hypot(dy);
            if d == 0.0 || d > r1 + r2 || d < (r1 - r2).abs() {
                continue;
            }
            let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
            let h = (r1 * r1 - a * a).max(0.0).sqrt();
            let (mx, my) = (x1 + a * dx / d, y1 + a * dy / d);
            cands.push((mx - h * dy / d, my + h * dx / d));
            cands.push((mx + h * dy / d, my - h * dx / d));
        }
    }
    cands
        .iter()
        .map(|&(px, py)| discs.iter().filter(|&&(x, y, r)| (px - x).hypot(py - y) <= r * (1.0 + 1e-12)).count())
        .max()
        .unwrap_or(0)
}

fn c11_covering() -> Outcome {
    let mut uncovered = 0;
    let mut worst = 0;
    for i in 0..100 {
        let mut rng = substream(1011, i);
        let (centers, balls) = random_ball_family(&mut rng);
        let cs = centers.clone();
        let family = BallFamily::new(move |a, b| euclidean(&cs[a], &cs[b]), balls.clone(), COVER_SCALE).unwrap();
        let chosen = family.weak_cover().unwrap();
        let kept: Vec<(f64, f64, f64)> = chosen
            .iter()
            .map(|&b| (centers[balls[b].center][0], centers[balls[b].center][1], balls[b].radius))
            .collect();
        for c in &centers {
            if !kept.iter().any(|&(x, y, r)| (c[0] - x).hypot(c[1] - y) <= r) {
                uncovered += 1;
            }
        }
        worst = worst.max(max_depth(&kept));
    }
    (uncovered == 0 && worst <= 8, format!("{uncovered} uncovered centers; largest multiplicity {worst} (<= 8) over 100 families"))
}

fn c12_determinism() -> Outcome {
    let mut same = 0;
    for suite in Suite::ALL {
        let mut pairs = vec![("suite", suite.name()), ("seed", "1012"), ("trials", "4"), ("instances", "12"), ("test", "300")];
        match suite {
            Suite::Counterexample => pairs.push(("n", "64,512")),
            Suite::FiniteSupport | Suite::Gaussian | Suite::Wavelet => pairs.push(("n", "60,240")),
            Suite::RationalGrid => pairs.push(("n", "1,2,3,4")),
            _ => {}
        }
        let cfg = ExperimentConfig::from_pairs(&pairs).unwrap();
        let outs: Vec<Vec<u8>> = [1, 3, 8]
            .iter()
            .map(|&t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(|| run(&cfg).unwrap()))
            .collect();
        same += outs.windows(2).all(|w| w[0] == w[1]) as usize;
    }
    (same == Suite::ALL.len(), format!("{same}/{} suites byte-identical with 1, 3 and 8 workers", Suite::ALL.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 12] = [
        ("solver oracle equivalence", c1_solver_oracle, 5),
        ("staircase family geometry", c2_staircase_geometry, 1),
        ("binomial tail and Hoeffding bound", c3_binomial_tail, 10),
        ("staircase simulation integrity", c4_simulation_integrity, 300),
        ("geodesic comparison suites", c5_geodesics, 120),
        ("Gaussian closed form", c6_gaussian, 30),
        ("finite-support embedding bounds", c7_finite_support, 30),
        ("rational-grid separation", c8_rational_grid, 60),
        ("consistency trend", c9_consistency, 600),
        ("wavelet module", c10_wavelet, 120),
        ("covering algorithm", c11_covering, 10),
        ("determinism across worker counts", c12_determinism, 600),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = ok && in_time;
        failed += !pass as usize;
        println!(
            "{} {:>2} {name}: {detail} [{:.2} s, budget {budget} s{}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
