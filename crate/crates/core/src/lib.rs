//! Vibronic model of the NV-center singlet shelving manifold.
//!
//! The electronic triple (|xx⟩, |xy⟩, |yy⟩) is coupled to one effective pair of
//! E-symmetry phonons through a pseudo Jahn-Teller term (¹E ↔ ¹A₁) and a dynamic
//! Jahn-Teller term inside the correlated ¹E′ admixture. The crate builds the
//! Hamiltonian in a truncated two-mode Fock space, diagonalizes it with C₃ᵥ
//! labels and derives lineshapes and intersystem-crossing rates from the
//! resulting wavefunctions.
//!
//! Energies are in meV throughout, spin-orbit strengths in GHz, rates in MHz.
#![no_std]

extern crate alloc;

pub mod coefficients;
pub mod constants;
mod error;
pub mod fock;
pub mod isc;
pub mod linalg;
pub mod params;
pub mod spectra;
pub mod spectral;
pub mod symmetry;
pub mod vibronic;

pub use coefficients::{extract_coefficients, CoefficientTable, StateCoefficients};
pub use error::{Error, Result};
pub use fock::{build_basis, BosonBasis, OperatorMatrix};
pub use isc::{isc_rates, thermal_rates, ChannelWeights, RateSet, ThermalModel};
pub use params::ModelParams;
pub use spectral::{SpectralFunction, SpectralSeries, SpectralShape};
pub use symmetry::Irrep;
pub use vibronic::{build_hamiltonian, diagonalize, solve, VibronicEigensystem};
