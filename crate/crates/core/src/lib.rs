//! Bethe-root estimation for the spin-1/2 XXZ chain.
//!
//! The crate builds closed- and open-chain XXZ Hamiltonians as Pauli
//! sums, constructs exact Bethe trial states from complex momenta,
//! evaluates energies and variances either exactly or through a seeded
//! shot-based sampler, and estimates Bethe roots by derivative-free
//! minimization of those objectives — validated against Newton-solved
//! Bethe equations and sector exact diagonalization.

pub mod bethe;
pub mod betheq;
pub mod exact;
pub mod model;
pub mod sim;
pub mod streams;
pub mod vqe;

pub use bethe::{bethe_state, QuantumState, RootVector};
pub use betheq::{canonicalize, classify, newton_solve, NewtonOptions};
pub use model::{Boundary, ChainModel, PauliHamiltonian};
pub use sim::{Evaluator, EvaluatorKind, ShotConfig};
pub use vqe::{vqe_excited, vqe_ground, OptimizerConfig, RootTemplate, VqeResult};
