//! Construction and verification of mutually unbiased bases (MUBs).
//!
//! Complete sets are built exactly in prime dimension (Fourier–Gauss bases),
//! in prime-squared dimension (product bases plus powers of one control-phase
//! gate), for two and three qubits, and in the Wocjan–Beth form. Every set can
//! be checked for pairwise unbiasedness, for the 2-design property via the
//! frame potential, and for the fixed total of reduced purity that complete
//! sets carry under any bipartition.

pub mod composite;
pub mod entanglement;
pub mod error;
pub mod field;
pub mod io;
pub mod matrix;
pub mod methods;
pub mod prime;
pub mod product;
pub mod random;
pub mod verification;
pub mod weyl;
pub mod wocjan_beth;

pub use error::{MubError, Result};
pub use matrix::{Basis, CMatrix, DiagonalPhases, ExactBasis, ExactMatrix, MubSet, Provenance, Scale};
