use crate::error::{check_p, Error, Result};
use crate::measures::{DiscreteMeasure, StaircaseQuantile};

/// A probability measure on the real line, given by its atoms or by a staircase
/// quantile function.
#[derive(Debug, Clone, Copy)]
pub enum LineMeasure<'a> {
    Discrete(&'a DiscreteMeasure),
    Staircase(&'a StaircaseQuantile),
}

impl<'a> From<&'a DiscreteMeasure> for LineMeasure<'a> {
    fn from(m: &'a DiscreteMeasure) -> Self {
        LineMeasure::Discrete(m)
    }
}

impl<'a> From<&'a StaircaseQuantile> for LineMeasure<'a> {
    fn from(m: &'a StaircaseQuantile) -> Self {
        LineMeasure::Staircase(m)
    }
}

impl LineMeasure<'_> {
    /// Steps `(value, mass)` of the quantile function, values non-decreasing.
    fn quantile_steps(&self) -> Result<Vec<(f64, f64)>> {
        match self {
            LineMeasure::Discrete(m) => {
                if m.dim() != 1 {
                    return Err(Error::Parameter(format!(
                        "one-dimensional measure expected, got dimension {}",
                        m.dim()
                    )));
                }
                let mut steps: Vec<(f64, f64)> = m.atoms().map(|(x, w)| (x[0], w)).collect();
                steps.sort_by(|a, b| a.0.total_cmp(&b.0));
                Ok(steps)
            }
            LineMeasure::Staircase(s) => Ok(s.steps().collect()),
        }
    }
}

pub(crate) fn pow_abs(d: f64, p: f64) -> f64 {
    let d = d.abs();
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        d.powf(p)
    }
}

pub(crate) fn root(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / p)
    }
}

/// `W_p` between two measures on the line as the `L^p` distance of their
/// quantile functions.
///
/// Both quantile functions are step functions, so the integral is the finite
/// sum over the common refinement of their steps. The refinement is walked by
/// remaining mass rather than cumulative mass, which keeps dyadic staircases
/// exact even where `1 - 2^-i` is no longer representable.
pub fn wp_one_dim<'a, 'b>(
    mu: impl Into<LineMeasure<'a>>,
    nu: impl Into<LineMeasure<'b>>,
    p: f64,
) -> Result<f64> {
    check_p(p)?;
    let a = mu.into().quantile_steps()?;
    let b = nu.into().quantile_steps()?;
    let (mut i, mut j) = (0usize, 0usize);
    let (mut ra, mut rb) = (a[0].1, b[0].1);
    let mut acc = 0.0;
    while i < a.len() && j < b.len() {
        let m = ra.min(rb);
        if m > 0.0 {
            acc += m * pow_abs(a[i].0 - b[j].0, p);
        }
        ra -= m;
        rb -= m;
        if ra <= 0.0 {
            i += 1;
            if i < a.len() {
                ra = a[i].1;
            }
        }
        if rb <= 0.0 {
            j += 1;
            if j < b.len() {
                rb = b[j].1;
            }
        }
    }
    Ok(root(acc, p))
}
