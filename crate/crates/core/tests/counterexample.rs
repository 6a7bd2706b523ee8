use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use wassknn::counterexample::{
    distance_table, exact_tail, hoeffding_bound, simulate_with_table, staircase, wp_closed, wp_pow_exact,
    StaircaseFamilyConfig,
};
use wassknn::dimension::{Ball, BallFamily};
use wassknn::knn::{bayes_risk, Atom, GenerativeModel};
use wassknn::rng::substream;
use wassknn::transport::wp_one_dim;

#[test]
fn closed_form_matches_quantile_integral() {
    for p in [1.0, 2.0] {
        let cfg = StaircaseFamilyConfig::dyadic(p, 20).unwrap();
        for j in 0..=20 {
            for m in 0..=20 {
                let closed = wp_closed(&cfg, j, m).unwrap();
                let numeric = wp_one_dim(&staircase(&cfg, j).unwrap(), &staircase(&cfg, m).unwrap(), p).unwrap();
                assert!((closed - numeric).abs() <= 1e-12, "p={p} j={j} m={m}: {closed} vs {numeric}");
            }
        }
    }
}

#[test]
fn custom_sequence_closed_form() {
    let values: Vec<f64> = (1..=12).map(|i| i as f64 / 13.0).collect();
    let cfg = StaircaseFamilyConfig::from_sequence(values, 1.5, 10).unwrap();
    for j in 0..=10 {
        for m in 0..=10 {
            let closed = wp_closed(&cfg, j, m).unwrap();
            let numeric = wp_one_dim(&staircase(&cfg, j).unwrap(), &staircase(&cfg, m).unwrap(), 1.5).unwrap();
            assert!((closed - numeric).abs() <= 1e-12);
        }
    }
    assert!(StaircaseFamilyConfig::from_sequence(vec![0.2, 0.2, 0.5], 1.0, 2).is_err());
}

#[test]
fn members_are_closer_to_the_base_than_to_each_other() {
    for p in [1.0, 2.0, 3.0] {
        let cfg = StaircaseFamilyConfig::dyadic(p, 30).unwrap();
        for j in 1..=30 {
            for m in j + 1..=30 {
                let d = wp_pow_exact(&cfg, j, m).unwrap();
                assert!(d > wp_pow_exact(&cfg, j, 0).unwrap());
                assert!(d > wp_pow_exact(&cfg, m, 0).unwrap());
            }
        }
    }
}

#[test]
fn ball_family_is_a_dimension_witness() {
    let big = 20;
    for p in [1.0, 2.0] {
        let cfg = StaircaseFamilyConfig::dyadic(p, big).unwrap();
        let metric = |a: usize, b: usize| wp_pow_exact(&cfg, a, b).unwrap();
        let all: Vec<Ball<_>> = (1..=big).map(|m| Ball { center: m, radius: metric(m, 0) }).collect();
        // distances are compared as exact W_p^p; every ball passes through mu_0
        let s = metric(1, 0);
        let family = BallFamily::new(metric, all.clone(), metric(1, 2)).unwrap();
        assert_eq!(family.multiplicity(&[0]).unwrap(), big);
        for m0 in 2..=big {
            let tail = BallFamily::new(metric, all[m0 - 1..].to_vec(), s).unwrap();
            assert!(tail.is_disconnected(), "p={p} from m={m0}");
            assert_eq!(tail.multiplicity(&[0]).unwrap(), big - m0 + 1);
        }
        // the first ball has radius exactly s, so it is excluded at scale s
        assert!(!BallFamily::new(metric, all, s).unwrap().is_disconnected());
    }
}

#[test]
fn bayes_risk_of_the_construction_is_zero() {
    let atoms: Vec<Atom<usize>> = (0..=64)
        .map(|m| Atom {
            item: m,
            prob: if m == 0 { 0.5 } else if m < 64 { 0.5f64.powi(m as i32 + 1) } else { 0.5f64.powi(64) },
            eta: if m == 0 { 1.0 } else { 0.0 },
        })
        .collect();
    let model = GenerativeModel::atomic(atoms).unwrap();
    assert_eq!(bayes_risk(&model, &mut substream(0, 0), 0).unwrap().mean, 0.0);
}

fn big_tail(n: u64) -> f64 {
    let t = n.isqrt();
    let mut c = BigUint::one();
    let mut lower = BigUint::zero();
    for x in 0..=t {
        if x > 0 {
            c = c * BigUint::from(n - x + 1) / BigUint::from(x);
        }
        lower += &c;
    }
    let total = BigUint::one() << n as usize;
    let upper = &total - &lower;
    // ratio in double precision through a scaled quotient
    let scale = BigUint::one() << 64usize;
    (upper * &scale / total).to_f64().unwrap() / 2f64.powi(64)
}

#[test]
fn exact_tail_matches_big_integer_sum_and_dominates_hoeffding() {
    let mut n = 16u64;
    while n <= 1 << 16 {
        let exact = big_tail(n);
        assert!((exact_tail(n) - exact).abs() <= 1e-12, "n={n}");
        assert!(exact >= hoeffding_bound(n).unwrap(), "n={n}");
        n *= 2;
    }
    for n in [17u64, 50, 99, 1000] {
        assert!((exact_tail(n) - big_tail(n)).abs() <= 1e-12);
    }
}

#[test]
fn simulation_matches_counting_oracle() {
    let cfg = StaircaseFamilyConfig::dyadic(1.0, 64).unwrap();
    let table = distance_table(&cfg);
    for (n, k) in [(64usize, 8usize), (1024, 32), (4096, 64)] {
        for t in 0..10 {
            let rec = simulate_with_table(&cfg, &table, n, k, 1000, t, &mut substream(77, t)).unwrap();
            assert_eq!(rec.mismatches, 0);
            assert!(rec.x_n <= n);
        }
    }
    // n = k = 1: a single copy of mu_0 labels every query 1
    let one = simulate_with_table(&cfg, &table, 1, 1, 10, 0, &mut substream(3, 0)).unwrap();
    assert_eq!(one.mismatches, 0);
}
