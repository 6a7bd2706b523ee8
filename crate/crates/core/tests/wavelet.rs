use rand::Rng;
use wassknn::measures::DiscreteMeasure;
use wassknn::rng::substream;
use wassknn::transport::{euclidean, wp_discrete};
use wassknn::wavelet::{
    bound_ratios, embed, psi_l1, random_density, render, w1_density, WaveletBasis, WaveletDensity, DEFAULT_BASE_LEVEL,
    DEFAULT_ORDER, DEFAULT_TOP_LEVEL,
};

const L: u32 = DEFAULT_BASE_LEVEL;
const N: u32 = DEFAULT_TOP_LEVEL;

#[test]
fn psi_norms_scale_by_root_two() {
    let basis = WaveletBasis::new(DEFAULT_ORDER, 14).unwrap();
    let target = 0.5f64.sqrt();
    for j in L..L + 4 {
        let a = psi_l1(&basis, j, 1).unwrap();
        let b = psi_l1(&basis, j + 1, 1).unwrap();
        assert!(((b / a) / target - 1.0).abs() < 0.02, "level {j}: {}", b / a);
    }
    let fine = WaveletBasis::new(DEFAULT_ORDER, 16).unwrap();
    assert!((psi_l1(&basis, L, 2).unwrap() - psi_l1(&fine, L, 2).unwrap()).abs() < 1e-4);
}

#[test]
fn render_and_embed_are_linear() {
    let basis = WaveletBasis::new(DEFAULT_ORDER, 12).unwrap();
    let mut rng = substream(61, 0);
    for _ in 0..10 {
        let f = random_density(&basis, L, N, &mut rng).unwrap();
        let g = random_density(&basis, L, N, &mut rng).unwrap();
        let (a, b): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let h = f.combine(a, &g, b).unwrap();
        let (rf, rg, rh) = (render(&f, &basis).unwrap(), render(&g, &basis).unwrap(), render(&h, &basis).unwrap());
        for i in 0..rh.len() {
            assert!((rh[i] - (a * rf[i] + b * rg[i])).abs() <= 1e-12);
        }
        let (ef, eg, eh) = (embed(&f), embed(&g), embed(&h));
        for i in 0..eh.len() {
            assert_eq!(eh[i], a * ef[i] + b * eg[i]);
        }
    }
}

/// Exact W_1 between cell-averaged discretizations of two rendered densities.
fn discretized_w1(f: &[f64], g: &[f64], cells: usize) -> f64 {
    let per = (f.len() - 1) / cells;
    let h = 1.0 / (f.len() - 1) as f64;
    let measure = |v: &[f64]| {
        let xs: Vec<f64> = (0..cells).map(|c| (c as f64 + 0.5) / cells as f64).collect();
        let ws: Vec<f64> = (0..cells)
            .map(|c| (0..per).map(|i| 0.5 * h * (v[c * per + i] + v[c * per + i + 1])).sum::<f64>())
            .collect();
        let s: f64 = ws.iter().sum();
        DiscreteMeasure::on_line(&xs, &ws.iter().map(|w| w / s).collect::<Vec<_>>()).unwrap()
    };
    wp_discrete(&measure(f), &measure(g), 1.0, euclidean).unwrap().distance
}

#[test]
fn w1_matches_discretized_transport() {
    let basis = WaveletBasis::new(DEFAULT_ORDER, 12).unwrap();
    let one = WaveletDensity::uniform(DEFAULT_ORDER, L, N).unwrap();
    let mut bump = one.clone();
    bump.set_beta(L + 1, 5, 0.2).unwrap();
    let d = w1_density(&one, &bump, &basis).unwrap();
    let oracle = discretized_w1(&render(&one, &basis).unwrap(), &render(&bump, &basis).unwrap(), 256);
    assert!((d - oracle).abs() < 1e-3, "{d} vs {oracle}");

    let mut rng = substream(62, 0);
    for _ in 0..5 {
        let f = random_density(&basis, L, N, &mut rng).unwrap();
        let g = random_density(&basis, L, N, &mut rng).unwrap();
        let d = w1_density(&f, &g, &basis).unwrap();
        let oracle = discretized_w1(&render(&f, &basis).unwrap(), &render(&g, &basis).unwrap(), 256);
        assert!((d - oracle).abs() < 1e-3, "{d} vs {oracle}");
        assert_eq!(d, w1_density(&g, &f, &basis).unwrap());
    }
}

#[test]
fn bound_ratio_structure() {
    let basis = WaveletBasis::new(DEFAULT_ORDER, 12).unwrap();
    let mut rng = substream(63, 0);
    let one = WaveletDensity::uniform(DEFAULT_ORDER, L, N).unwrap();
    let mut lowest = f64::INFINITY;
    for _ in 0..200 {
        let f = random_density(&basis, L, N, &mut rng).unwrap();
        let g = random_density(&basis, L, N, &mut rng).unwrap();
        let r = bound_ratios(&f, &g, &basis).unwrap();
        assert!(r.lower_denominator <= r.upper_denominator);
        assert!(r.upper_ratio.is_finite());
        lowest = lowest.min(r.lower_ratio);

        // W_1(f, f + t h) is linear in t on the segment of densities
        let half = f.combine(0.5, &g, 0.5).unwrap();
        let s = bound_ratios(&f, &half, &basis).unwrap();
        assert!((s.upper_ratio - r.upper_ratio).abs() <= 1e-9 * r.upper_ratio);
        assert!((s.lower_ratio - r.lower_ratio).abs() <= 1e-9 * r.lower_ratio);
    }
    assert!(lowest > 1e-3, "{lowest}");

    // only scaling coefficients differ: both denominators coincide
    let mut dipole = one.clone();
    dipole.set_alpha(1, one.alpha()[one.k0() + 1] + 0.1).unwrap();
    dipole.set_alpha(2, one.alpha()[one.k0() + 2] - 0.1).unwrap();
    let r = bound_ratios(&one, &dipole, &basis).unwrap();
    assert_eq!(r.upper_ratio, r.lower_ratio);
    assert!(r.upper_ratio > 0.0);
    assert!(bound_ratios(&one, &one, &basis).is_err());

    // a single interior wavelet at each level: the upper ratio does not drift with j
    let ratios: Vec<f64> = (L..=N)
        .map(|j| {
            let mut g = one.clone();
            g.set_beta(j, 1, 0.1).unwrap();
            bound_ratios(&one, &g, &basis).unwrap().upper_ratio
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo < 1.05, "{ratios:?}");
}
