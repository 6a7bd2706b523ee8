use nalgebra::{DMatrix, DVector};

use super::filters::{scaling_filter, wavelet_filter};
use crate::error::{Error, Result};

/// Largest table resolution accepted by [`WaveletBasis::new`].
pub const MAX_RESOLUTION: u32 = 20;

/// Values of `phi` and `psi` on the dyadic grid `2^-R Z` over their support
/// `[0, L - 1]`, where `L` is the filter length.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletBasis {
    order: usize,
    resolution: u32,
    filter: Vec<f64>,
    phi: Vec<f64>,
    psi: Vec<f64>,
}

impl WaveletBasis {
    /// Tables for the Daubechies family of the given order at resolution `2^-R`.
    ///
    /// `phi` at the integers is the eigenvector of the refinement operator
    /// normalized to sum one; each further dyadic level follows from
    /// `phi(x) = sqrt2 sum_k h_k phi(2x - k)`, and `psi` from the same
    /// relation with `g`.
    pub fn new(order: usize, resolution: u32) -> Result<Self> {
        if resolution > MAX_RESOLUTION {
            return Err(Error::Resource(format!("resolution 2^-{resolution} exceeds 2^-{MAX_RESOLUTION}")));
        }
        let h = scaling_filter(order)?;
        let l = h.len();
        let s2 = std::f64::consts::SQRT_2;
        let inner = l - 2;
        let mut a = DMatrix::<f64>::zeros(inner, inner);
        for n in 1..=inner {
            for m in 1..=inner {
                let idx = 2 * n as isize - m as isize;
                if (0..l as isize).contains(&idx) {
                    a[(n - 1, m - 1)] = s2 * h[idx as usize];
                }
            }
            a[(n - 1, n - 1)] -= 1.0;
        }
        for m in 0..inner {
            a[(inner - 1, m)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(inner);
        rhs[inner - 1] = 1.0;
        let ints = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("refinement system is singular".into()))?;

        let span = l - 1;
        let size = span * (1usize << resolution) + 1;
        let mut phi = vec![0.0; size];
        let full = 1usize << resolution;
        for n in 1..=inner {
            phi[n * full] = ints[n - 1];
        }
        // level r fills the odd multiples of 2^-r
        for r in 1..=resolution {
            let step = 1usize << (resolution - r);
            let mut i = step;
            while i < size {
                // x = i 2^-R, 2x - k = (2i - k 2^R) 2^-R
                let mut v = 0.0;
                for (k, hk) in h.iter().enumerate() {
                    let t = 2 * i as isize - (k * full) as isize;
                    if t > 0 && (t as usize) < size {
                        v += hk * phi[t as usize];
                    }
                }
                phi[i] = s2 * v;
                i += 2 * step;
            }
        }
        let g = wavelet_filter(&h);
        let psi = (0..size)
            .map(|i| {
                let v: f64 = g
                    .iter()
                    .enumerate()
                    .map(|(k, gk)| {
                        let t = 2 * i as isize - (k * full) as isize;
                        if t > 0 && (t as usize) < size {
                            gk * phi[t as usize]
                        } else {
                            0.0
                        }
                    })
                    .sum();
                s2 * v
            })
            .collect();
        Ok(Self { order, resolution, filter: h, phi, psi })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn filter(&self) -> &[f64] {
        &self.filter
    }

    /// Filter length `L`; both functions live on `[0, L - 1]`.
    pub fn filter_len(&self) -> usize {
        self.filter.len()
    }

    /// `phi(t 2^-R)`, zero outside the support.
    pub fn phi(&self, t: isize) -> f64 {
        if t < 0 {
            0.0
        } else {
            self.phi.get(t as usize).copied().unwrap_or(0.0)
        }
    }

    /// `psi(t 2^-R)`, zero outside the support.
    pub fn psi(&self, t: isize) -> f64 {
        if t < 0 {
            0.0
        } else {
            self.psi.get(t as usize).copied().unwrap_or(0.0)
        }
    }

    pub fn phi_table(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi_table(&self) -> &[f64] {
        &self.psi
    }
}
