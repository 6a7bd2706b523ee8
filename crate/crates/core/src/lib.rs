//! Wasserstein distances, k-nearest-neighbour classification over spaces of
//! probability measures, and numerical checks of the metric geometry behind them.

pub mod counterexample;
pub mod dimension;
pub mod error;
pub mod geometry;
pub mod knn;
pub mod measures;
pub mod models;
pub mod random;
pub mod rng;
pub mod transport;
pub mod wavelet;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/transport.md")]
    pub struct Transport;
    #[doc = include_str!("../../../book/src/knn.md")]
    pub struct Knn;
    #[doc = include_str!("../../../book/src/staircase.md")]
    pub struct Staircase;
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub struct Geometry;
    #[doc = include_str!("../../../book/src/dimension.md")]
    pub struct Dimension;
    #[doc = include_str!("../../../book/src/wavelets.md")]
    pub struct Wavelets;
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
}
