//! Densities on `[0, 1]` given by finite Daubechies wavelet series
//!
//! ```text
//! f = sum_k alpha_k phi_{l,k} + sum_{j=l..=N} sum_k beta_{j,k} psi_{j,k},
//! phi_{l,k}(x) = 2^(l/2) phi(2^l x - k),   psi_{j,k}(x) = 2^(j/2) psi(2^j x - k),
//! ```
//!
//! with `k` running over `[-K_l, K_l]` and `[-K_j, K_j]`, where
//! `K_j = max(L - 2, 2^j - 1)` for a filter of length `L` covers every
//! translate whose support meets `[0, 1]`. Translates crossing the boundary are
//! kept and truncated to `[0, 1]`.
//!
//! Densities are evaluated on the grid `i 2^-R` from cascade tables
//! ([`WaveletBasis`]); [`w1_density`] integrates the difference of the CDFs.

mod cascade;
mod filters;

pub use cascade::{WaveletBasis, MAX_RESOLUTION};
pub use filters::{scaling_filter, wavelet_filter};

use rand::Rng;

use crate::error::{Error, Result};

/// Default family order (6-tap filter, continuously differentiable).
pub const DEFAULT_ORDER: usize = 3;
/// Default coarsest level `l`.
pub const DEFAULT_BASE_LEVEL: u32 = 3;
/// Default finest level `N`.
pub const DEFAULT_TOP_LEVEL: u32 = 5;
/// Tolerance on total mass and negativity of a rendered density.
pub const DENSITY_TOLERANCE: f64 = 1e-6;
/// Lower bound kept by [`random_density`].
pub const DENSITY_MARGIN: f64 = 0.01;

/// Coefficient range `K` at `level` for a filter of length `filter_len`.
pub fn k_range(filter_len: usize, level: u32) -> usize {
    (filter_len - 2).max((1usize << level) - 1)
}

/// Length of [`embed`]: `(2 K_l + 1) + sum_{j=l..=N} (2 K_j + 1)`.
pub fn embedding_dim(k0: usize, kj: &[usize]) -> usize {
    2 * k0 + 1 + kj.iter().map(|k| 2 * k + 1).sum::<usize>()
}

/// Coefficients of a finite wavelet series.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDensity {
    order: usize,
    base: u32,
    top: u32,
    /// `alpha[k + K_l]`
    alpha: Vec<f64>,
    /// `beta[j - l][k + K_j]`
    beta: Vec<Vec<f64>>,
}

impl WaveletDensity {
    /// All coefficients zero.
    pub fn zeros(order: usize, base: u32, top: u32) -> Result<Self> {
        let l = scaling_filter(order)?.len();
        if top < base {
            return Err(Error::Parameter(format!("top level {top} below base level {base}")));
        }
        if top > 16 {
            return Err(Error::Resource(format!("top level {top} exceeds 16")));
        }
        let alpha = vec![0.0; 2 * k_range(l, base) + 1];
        let beta = (base..=top).map(|j| vec![0.0; 2 * k_range(l, j) + 1]).collect();
        Ok(Self { order, base, top, alpha, beta })
    }

    /// The constant density `1`: `alpha_k = 2^(-l/2)` on every translate meeting `[0, 1]`.
    pub fn uniform(order: usize, base: u32, top: u32) -> Result<Self> {
        let mut w = Self::zeros(order, base, top)?;
        let l = w.filter_len() as i64;
        let c = 0.5f64.powf(base as f64 / 2.0);
        for k in -(l - 2)..(1i64 << base) {
            w.set_alpha(k, c)?;
        }
        Ok(w)
    }

    /// Builds from explicit coefficient vectors; lengths must match the `K` ranges.
    pub fn new(order: usize, base: u32, top: u32, alpha: Vec<f64>, beta: Vec<Vec<f64>>) -> Result<Self> {
        let z = Self::zeros(order, base, top)?;
        if alpha.len() != z.alpha.len()
            || beta.len() != z.beta.len()
            || beta.iter().zip(&z.beta).any(|(a, b)| a.len() != b.len())
        {
            return Err(Error::Parameter("coefficient lengths do not match the level ranges".into()));
        }
        if alpha.iter().chain(beta.iter().flatten()).any(|c| !c.is_finite()) {
            return Err(Error::Parameter("non-finite coefficient".into()));
        }
        Ok(Self { alpha, beta, ..z })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn filter_len(&self) -> usize {
        2 * self.order
    }

    pub fn k0(&self) -> usize {
        (self.alpha.len() - 1) / 2
    }

    pub fn kj(&self, j: u32) -> Option<usize> {
        j.checked_sub(self.base).and_then(|i| self.beta.get(i as usize)).map(|b| (b.len() - 1) / 2)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self, j: u32) -> Option<&[f64]> {
        j.checked_sub(self.base).and_then(|i| self.beta.get(i as usize)).map(|v| v.as_slice())
    }

    pub fn set_alpha(&mut self, k: i64, value: f64) -> Result<()> {
        let k0 = self.k0() as i64;
        if k.abs() > k0 {
            return Err(Error::Parameter(format!("alpha index {k} outside [-{k0}, {k0}]")));
        }
        self.alpha[(k + k0) as usize] = value;
        Ok(())
    }

    pub fn set_beta(&mut self, j: u32, k: i64, value: f64) -> Result<()> {
        let kj = self.kj(j).ok_or_else(|| Error::Parameter(format!("level {j} outside the series")))? as i64;
        if k.abs() > kj {
            return Err(Error::Parameter(format!("beta index {k} outside [-{kj}, {kj}]")));
        }
        self.beta[(j - self.base) as usize][(k + kj) as usize] = value;
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if (self.order, self.base, self.top) != (other.order, other.base, other.top) {
            return Err(Error::Parameter("series use different families or levels".into()));
        }
        Ok(())
    }

    /// `a * self + b * other`, coefficientwise.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let alpha = self.alpha.iter().zip(&other.alpha).map(|(x, y)| a * x + b * y).collect();
        let beta = self
            .beta
            .iter()
            .zip(&other.beta)
            .map(|(u, v)| u.iter().zip(v).map(|(x, y)| a * x + b * y).collect())
            .collect();
        Ok(Self { alpha, beta, ..self.clone() })
    }
}

/// Coefficient vector `(alpha, beta_l, ..., beta_N)`.
pub fn embed(w: &WaveletDensity) -> Vec<f64> {
    w.alpha.iter().chain(w.beta.iter().flatten()).copied().collect()
}

fn check_basis(w: &WaveletDensity, basis: &WaveletBasis) -> Result<()> {
    if basis.order() != w.order {
        return Err(Error::Parameter(format!("basis order {} but series order {}", basis.order(), w.order)));
    }
    if basis.resolution() < w.top + 4 {
        return Err(Error::Parameter(format!(
            "resolution 2^-{} too coarse for top level {} (need R >= N + 4)",
            basis.resolution(),
            w.top
        )));
    }
    Ok(())
}

/// Adds `c 2^(j/2) table(2^j x - k)` on the grid nodes of `[0, 1]`.
fn accumulate(out: &mut [f64], basis: &WaveletBasis, wavelet: bool, j: u32, k: i64, c: f64) {
    if c == 0.0 {
        return;
    }
    let r = basis.resolution();
    let full = 1i64 << r;
    let per = 1i64 << (r - j);
    let span = basis.filter_len() as i64 - 1;
    let lo = (k * per).max(0);
    let hi = ((k + span) * per).min(full);
    let amp = c * 2f64.powf(j as f64 / 2.0);
    let step = 1i64 << j;
    let mut t = lo * step - k * full;
    let mut i = lo;
    while i <= hi {
        let val = if wavelet { basis.psi(t as isize) } else { basis.phi(t as isize) };
        out[i as usize] += amp * val;
        i += 1;
        t += step;
    }
}

/// Values of the series at `x_i = i 2^-R`, `i = 0..=2^R`.
pub fn render(w: &WaveletDensity, basis: &WaveletBasis) -> Result<Vec<f64>> {
    check_basis(w, basis)?;
    let mut out = vec![0.0; (1usize << basis.resolution()) + 1];
    let k0 = w.k0() as i64;
    for (idx, &c) in w.alpha.iter().enumerate() {
        accumulate(&mut out, basis, false, w.base, idx as i64 - k0, c);
    }
    for (level, coeffs) in w.beta.iter().enumerate() {
        let j = w.base + level as u32;
        let kj = (coeffs.len() as i64 - 1) / 2;
        for (idx, &c) in coeffs.iter().enumerate() {
            accumulate(&mut out, basis, true, j, idx as i64 - kj, c);
        }
    }
    Ok(out)
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1]))
}

/// Checks that rendered values form a density up to [`DENSITY_TOLERANCE`].
pub fn check_density(values: &[f64]) -> Result<()> {
    let h = 1.0 / (values.len() - 1) as f64;
    let mass = trapezoid(values, h);
    if (mass - 1.0).abs() > DENSITY_TOLERANCE {
        return Err(Error::Validation(format!("rendered function integrates to {mass}")));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -DENSITY_TOLERANCE {
        return Err(Error::Validation(format!("rendered function reaches {min}")));
    }
    Ok(())
}

fn cdf(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// `W_1` between two series densities as `int_0^1 |F - G|` (trapezoid rule on
/// the render grid for both the CDFs and the outer integral).
pub fn w1_density(f: &WaveletDensity, g: &WaveletDensity, basis: &WaveletBasis) -> Result<f64> {
    f.check_compatible(g)?;
    let a = render(f, basis)?;
    let b = render(g, basis)?;
    check_density(&a)?;
    check_density(&b)?;
    let h = 1.0 / (a.len() - 1) as f64;
    let fa = cdf(&a, h);
    let fb = cdf(&b, h);
    let diff: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| (x - y).abs()).collect();
    Ok(trapezoid(&diff, h))
}

/// `||psi_{j,k}||_{L1[0,1]}` by the trapezoid rule on the grid of `basis`.
pub fn psi_l1(basis: &WaveletBasis, j: u32, k: i64) -> Result<f64> {
    if j >= basis.resolution() {
        return Err(Error::Parameter(format!("level {j} not below resolution {}", basis.resolution())));
    }
    let mut out = vec![0.0; (1usize << basis.resolution()) + 1];
    accumulate(&mut out, basis, true, j, k, 1.0);
    let h = 1.0 / (out.len() - 1) as f64;
    let abs: Vec<f64> = out.iter().map(|v| v.abs()).collect();
    Ok(trapezoid(&abs, h))
}

/// `W_1` against the two coefficient norms of the two-sided bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRatios {
    pub w1: f64,
    /// `sum_k |d alpha| + sum_j sum_k 2^(-3j/2) |d beta|`
    pub upper_denominator: f64,
    /// `sum_k |d alpha| + max_j sum_k 2^(-3j/2) |d beta|`
    pub lower_denominator: f64,
    pub upper_ratio: f64,
    pub lower_ratio: f64,
}

pub fn bound_ratios(f: &WaveletDensity, g: &WaveletDensity, basis: &WaveletBasis) -> Result<BoundRatios> {
    f.check_compatible(g)?;
    let da: f64 = f.alpha.iter().zip(&g.alpha).map(|(x, y)| (x - y).abs()).sum();
    let levels: Vec<f64> = f
        .beta
        .iter()
        .zip(&g.beta)
        .enumerate()
        .map(|(i, (u, v))| {
            let j = (f.base + i as u32) as f64;
            let s: f64 = u.iter().zip(v).map(|(x, y)| (x - y).abs()).sum();
            2f64.powf(-1.5 * j) * s
        })
        .collect();
    let upper_denominator = da + levels.iter().sum::<f64>();
    let lower_denominator = da + levels.iter().copied().fold(0.0, f64::max);
    if upper_denominator == 0.0 {
        return Err(Error::Parameter("identical coefficients: the ratios are undefined".into()));
    }
    let w1 = w1_density(f, g, basis)?;
    Ok(BoundRatios {
        w1,
        upper_denominator,
        lower_denominator,
        upper_ratio: w1 / upper_denominator,
        lower_ratio: w1 / lower_denominator,
    })
}

/// A random density: the constant `1` plus a mean-zero perturbation built from
/// interior wavelets and interior scaling dipoles `phi_{l,k} - phi_{l,k+1}`,
/// rescaled so the rendered minimum is at least [`DENSITY_MARGIN`].
pub fn random_density<R: Rng + ?Sized>(
    basis: &WaveletBasis,
    base: u32,
    top: u32,
    rng: &mut R,
) -> Result<WaveletDensity> {
    let order = basis.order();
    let mut pert = WaveletDensity::zeros(order, base, top)?;
    let span = pert.filter_len() as i64 - 1;
    let last_phi = (1i64 << base) - span;
    for k in 0..last_phi {
        let c = rng.random_range(-1.0..1.0) * 0.5f64.powf(base as f64 / 2.0);
        let i0 = (k + pert.k0() as i64) as usize;
        pert.alpha[i0] += c;
        pert.alpha[i0 + 1] -= c;
    }
    for j in base..=top {
        let last = (1i64 << j) - span;
        let kj = pert.kj(j).expect("level in range") as i64;
        for k in 0..=last {
            let c = rng.random_range(-1.0..1.0) * 0.5f64.powf(j as f64 / 2.0);
            pert.beta[(j - base) as usize][(k + kj) as usize] = c;
        }
    }
    let values = render(&pert, basis)?;
    let low = values.iter().copied().fold(0.0, f64::min);
    let amplitude = rng.random_range(0.05..1.0);
    let scale = if low < 0.0 { amplitude * (1.0 - DENSITY_MARGIN) / -low } else { amplitude };
    WaveletDensity::uniform(order, base, top)?.combine(1.0, &pert, scale)
}
