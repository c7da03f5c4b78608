//! Structure-preserving finite-volume solver for cooperative
//! drift-diffusion-reaction systems
//!
//! ```text
//! ∂ₜuᵢ = div(σᵢ∇uᵢ + uᵢ∇ψᵢ) + αᵢ Σⱼ λᵢⱼ rⱼ(uⱼ)     with zero normal flux,
//! ```
//!
//! together with executable checks of the properties such systems enjoy:
//! conservation of `Σᵢ (1/αᵢ)∫uᵢ`, positivity, comparison, L¹ contraction and
//! convergence to a stationary state.

pub mod cli;
pub mod config;
pub mod discretize;
pub mod error;
pub mod linalg;
pub mod evolve;
pub mod model;
pub mod steady;
pub mod verify;

pub use error::{Error, Result};
