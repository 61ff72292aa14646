//! Linear stability analysis of the ring-plus-central-mass relative
//! equilibrium on Kepler ellipses.

pub mod atlas;
pub mod blocks;
pub mod coefficients;
pub mod error;
pub mod expm;
pub mod hermitian;
pub mod monodromy;
pub mod morse;
pub mod ode;
pub mod reduction;
pub mod scenario;
pub mod selftest;
pub mod smalleig;

pub use error::{Error, Result};
pub use scenario::Scenario;
