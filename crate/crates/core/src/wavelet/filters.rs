use crate::error::{Error, Result};

/// Daubechies scaling filter with `order` vanishing moments (length `2 * order`),
/// normalized to `sum h = sqrt 2`.
///
/// Orders 2 and 3 come from their closed forms; order 4 is tabulated.
pub fn scaling_filter(order: usize) -> Result<Vec<f64>> {
    let s2 = std::f64::consts::SQRT_2;
    match order {
        2 => {
            let r3 = 3f64.sqrt();
            let d = 4.0 * s2;
            Ok(vec![(1.0 + r3) / d, (3.0 + r3) / d, (3.0 - r3) / d, (1.0 - r3) / d])
        }
        3 => {
            let a = 10f64.sqrt();
            let b = (5.0 + 2.0 * a).sqrt();
            let d = 16.0 * s2;
            Ok(vec![
                (1.0 + a + b) / d,
                (5.0 + a + 3.0 * b) / d,
                (10.0 - 2.0 * a + 2.0 * b) / d,
                (10.0 - 2.0 * a - 2.0 * b) / d,
                (5.0 + a - 3.0 * b) / d,
                (1.0 + a - b) / d,
            ])
        }
        4 => Ok(vec![
            0.230_377_813_308_896_5,
            0.714_846_570_552_915_4,
            0.630_880_767_929_858_7,
            -0.027_983_769_416_859_85,
            -0.187_034_811_719_093_1,
            0.030_841_381_835_560_76,
            0.032_883_011_666_885_2,
            -0.010_597_401_785_069_03,
        ]),
        _ => Err(Error::Parameter(format!("unsupported wavelet order {order}; expected 2, 3 or 4"))),
    }
}

/// Wavelet filter `g_k = (-1)^k h_{L-1-k}`.
pub fn wavelet_filter(h: &[f64]) -> Vec<f64> {
    let l = h.len();
    (0..l).map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] }).collect()
}
