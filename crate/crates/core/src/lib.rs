//! Quantum-pathway amplitudes for open (Lindblad) systems.
//!
//! Pathways are extracted by Hamiltonian encoding / observable decoding
//! (HE-OD): every Liouville-space generator entry is multiplied by a phase
//! `exp(2πi γ s / N)`, the target matrix element is recorded for each `s`, and
//! an inverse transform over `s` separates the pathways by the sum of their
//! edge codes. A time-ordered Dyson quadrature in [`dyson`] serves as the
//! independent oracle.
//!
//! The [`transforms`] module provides the interaction picture, the
//! rotating-wave approximation and the diagonal-free transformed picture in
//! which no self-to-self transitions exist.

pub mod dyson;
pub mod encoding;
mod error;
pub mod generator;
pub mod liouville;
pub mod models;
pub mod propagation;
pub mod sweep;
pub mod transforms;

pub use error::{HeodError, Result};
pub use num_complex::Complex64 as C64;

/// Dense Liouville-space generator `H` with `i dρ/dt = H ρ`.
pub type Superoperator = nalgebra::DMatrix<C64>;

/// Vectorized density matrix in row-major `ρ_jk` order.
pub type StateVector = nalgebra::DVector<C64>;
