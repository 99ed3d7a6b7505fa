//! Spectra, accuracy measures, and population dynamics of the quantum
//! second-harmonic-generation model.
//!
//! The two-mode Hamiltonian
//!
//! ```text
//! H = ħ[ω₀ a₀⁺a₀ + ω₁ a₁⁺a₁ + g a₁⁺² a₀ + g* a₁² a₀⁺]
//! ```
//!
//! conserves R₁ = (N₁ + 2N₀)/3 and the harmonic parity K, so the Fock space
//! splits into invariant blocks L(k,s) of dimension s+1 on which H acts as a
//! real symmetric tridiagonal matrix (after gauging away the phase of g).
//! This crate provides:
//!
//! * [`model`] — block bookkeeping, the su_pd(2) structure polynomial, and
//!   per-block tridiagonal Hamiltonians;
//! * [`spectrum`] — an overflow-safe Sturm-sequence bisection eigensolver
//!   plus an independent implicit-shift QL oracle;
//! * [`quasiclassical`] — SU(2) cluster (Wigner d-function) approximate
//!   eigenvectors and the cluster mean-field eigenvalue estimates;
//! * [`measures`] — global and per-level accuracy measures comparing exact
//!   and approximate spectra and eigenvectors;
//! * [`dynamics`] — time evolution of ⟨Y₀⟩, ⟨N₀⟩, ⟨N₁⟩ for cluster, Fock and
//!   two-mode coherent initial states, and the closed-form quasiclassical
//!   envelope approximation.

pub mod dynamics;
pub mod error;
pub mod mat;
pub mod measures;
pub mod model;
pub mod quasiclassical;
pub mod spectrum;

pub use error::{Error, Result};
pub use mat::Mat;
pub use model::{Block, ModelParams, TridiagonalOperator};
pub use spectrum::{SolveMethod, SpectralSolution};
