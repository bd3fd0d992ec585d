//! Vertex-time uncertainty toolkit for signals on graphs sampled over a time axis.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix
//! `f64`.

pub mod atoms;
pub mod ecgl;
pub mod error;
pub mod gaussian;
pub mod graph;
pub mod harness;
pub mod jecd;
pub mod lasso;
pub mod operators;
pub mod scalar;
pub mod time_axis;
pub mod uncertainty;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Graph64 = graph::Graph<f64>;
pub type SpectralBasis64 = graph::SpectralBasis<f64>;
pub type TimeAxis64 = time_axis::TimeAxis<f64>;
pub type TimeInterval64 = time_axis::TimeInterval<f64>;
pub type FrequencyBand64 = time_axis::FrequencyBand<f64>;
pub type Projector64 = operators::Projector<f64>;
pub type Dictionary64 = atoms::Dictionary<f64>;
pub type SampleSet64 = jecd::SampleSet<f64>;
pub type SpectralPrior64 = jecd::SpectralPrior<f64>;
pub type JecdState64 = jecd::JecdState<f64>;
pub type FeasibleRegion64 = uncertainty::FeasibleRegion<f64>;
pub type EcglState64 = ecgl::EcglState<f64>;
