//! Physical constants in the unit system of the crate.

/// Planck constant in meV·s.
pub const PLANCK: f64 = 4.135667696e-12;

/// Reduced Planck constant in meV·s.
pub const HBAR: f64 = 6.582119569e-13;

/// Boltzmann constant in meV/K.
pub const BOLTZMANN: f64 = 0.086_173_33;

/// 2√(2 ln 2): ratio of full width at half maximum to standard deviation of a Gaussian.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Energy of a 1 GHz quantum in meV.
pub const MEV_PER_GHZ: f64 = PLANCK * 1.0e9;

/// Converts a frequency in GHz to an energy in meV.
#[inline]
pub fn ghz_to_mev(ghz: f64) -> f64 {
    ghz * MEV_PER_GHZ
}
