//! Finite-difference toolkit for option-price generators: one- and
//! two-dimensional Hamiltonians in log coordinates, local scaling
//! transformations, no-arbitrage checks, and implicit pricing schemes.
//!
//! Everything numeric is generic over the scalar through [`Real`]; the
//! `*64`/`*32` aliases at the crate root pick a concrete width.

pub mod config;
pub mod diff;
pub mod error;
pub mod gauge;
pub mod grid;
pub mod hamiltonian;
pub mod higgs;
pub mod linalg;
pub mod martingale;
pub mod params;
pub mod pricing;
pub mod real;
pub mod report;
pub mod smooth;

pub use error::{Error, Result};
pub use real::Real;

/// Concrete-width aliases for the common case.
pub type Grid1D64 = grid::Grid1D<f64>;
pub type Grid2D64 = grid::Grid2D<f64>;
pub type Field64 = grid::Field<f64>;
pub type BsParams64 = params::BsParams<f64>;
pub type MgParams64 = params::MgParams<f64>;
pub type ModelConfig64 = config::ModelConfig<f64>;

pub type Grid1D32 = grid::Grid1D<f32>;
pub type Field32 = grid::Field<f32>;
pub type BsParams32 = params::BsParams<f32>;
