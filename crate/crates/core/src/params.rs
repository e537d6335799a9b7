//! Model parameters and their calibration from ab initio inputs.

#[allow(unused_imports)] // shadowed by the inherent std methods in test builds
use num_traits::Float;

use crate::error::{ensure, Error, Result};
use crate::vibronic;

/// Ab initio Jahn-Teller relaxation energy of the ¹E manifold, meV.
pub const JT_ENERGY: f64 = 316.0;
/// Effective E-phonon quantum from the adiabatic potential surface, meV.
pub const PHONON_ENERGY: f64 = 66.1;
/// Weight of |¹E⟩ inside the correlated singlet.
pub const CORRELATION_WEIGHT: f64 = 0.9;
/// Measured singlet zero-phonon line, meV.
pub const SINGLET_ZPL: f64 = 1190.0;
/// Electronic gap quoted alongside the default calibration, meV.
pub const ELECTRONIC_GAP: f64 = 1129.4;
/// Axial spin-orbit strength, GHz.
pub const AXIAL_SOC_GHZ: f64 = 15.78;
/// Singlet-triplet gap that reproduces the measured cryogenic lifetime, meV.
pub const SINGLET_TRIPLET_GAP: f64 = 386.0;

/// Bracket tolerance of the gap fit, meV.
pub const FIT_TOLERANCE: f64 = 0.05;

/// Calibrated scalars of the vibronic model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// ħω_E, meV.
    pub phonon_energy: f64,
    /// Linear dynamic Jahn-Teller coupling F, meV. The pseudo Jahn-Teller coupling is 2F.
    pub coupling: f64,
    /// Correlation weight C².
    pub c2: f64,
    /// Bare ¹E–¹A₁ electronic gap Λ_e, meV.
    pub electronic_gap: f64,
    pub axial_soc_ghz: f64,
    pub transverse_soc_ghz: f64,
    /// ¹Ẽ–³A₂ gap Σ, meV.
    pub singlet_triplet_gap: f64,
    /// Phonon truncation, `nx + ny ≤ n_max`.
    pub n_max: usize,
    /// Transition dipole unit d⊥.
    pub dipole: f64,
    /// Zero-phonon line the gap fit aims at, meV.
    pub target_zpl: f64,
    /// Include the (1 − C²)F term acting inside the ¹E′ admixture.
    pub dynamic_jt: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::nv_singlet()
    }
}

impl ModelParams {
    /// Defaults for the NV⁻ singlets; F follows from the Jahn-Teller energy.
    pub fn nv_singlet() -> Self {
        let coupling = derive_coupling(JT_ENERGY, PHONON_ENERGY, CORRELATION_WEIGHT)
            .expect("default inputs are valid");
        Self {
            phonon_energy: PHONON_ENERGY,
            coupling,
            c2: CORRELATION_WEIGHT,
            electronic_gap: ELECTRONIC_GAP,
            axial_soc_ghz: AXIAL_SOC_GHZ,
            transverse_soc_ghz: 1.2 * AXIAL_SOC_GHZ,
            singlet_triplet_gap: SINGLET_TRIPLET_GAP,
            n_max: 10,
            dipole: 1.0,
            target_zpl: SINGLET_ZPL,
            dynamic_jt: true,
        }
    }

    pub fn with_electronic_gap(mut self, gap: f64) -> Self {
        self.electronic_gap = gap;
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    /// Coupling of the ¹E ↔ ¹A₁ mixing term, C²·2F.
    pub fn pjt_coupling(&self) -> f64 {
        self.c2 * 2.0 * self.coupling
    }

    /// Coupling inside the ¹E′ admixture, (1 − C²)F, or zero when switched off.
    pub fn djt_coupling(&self) -> f64 {
        if self.dynamic_jt {
            (1.0 - self.c2) * self.coupling
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.phonon_energy.is_finite() && self.phonon_energy > 0.0,
            "phonon_energy",
            self.phonon_energy,
            "must be positive",
        )?;
        ensure(
            self.coupling.is_finite() && self.coupling >= 0.0,
            "coupling",
            self.coupling,
            "must be non-negative",
        )?;
        ensure(
            (0.0..=1.0).contains(&self.c2),
            "c2",
            self.c2,
            "must lie in [0, 1]",
        )?;
        ensure(
            self.electronic_gap.is_finite() && self.electronic_gap >= 0.0,
            "electronic_gap",
            self.electronic_gap,
            "must be non-negative",
        )?;
        ensure(
            self.axial_soc_ghz.is_finite() && self.axial_soc_ghz >= 0.0,
            "axial_soc_ghz",
            self.axial_soc_ghz,
            "must be non-negative",
        )?;
        ensure(
            self.transverse_soc_ghz.is_finite() && self.transverse_soc_ghz >= 0.0,
            "transverse_soc_ghz",
            self.transverse_soc_ghz,
            "must be non-negative",
        )?;
        ensure(
            self.singlet_triplet_gap.is_finite() && self.singlet_triplet_gap > 0.0,
            "singlet_triplet_gap",
            self.singlet_triplet_gap,
            "must be positive",
        )?;
        ensure(
            self.dipole.is_finite(),
            "dipole",
            self.dipole,
            "must be finite",
        )?;
        ensure(
            self.target_zpl.is_finite() && self.target_zpl > 0.0,
            "target_zpl",
            self.target_zpl,
            "must be positive",
        )
    }
}

/// Jahn-Teller energy implied by a coupling: `(C²·2F + (1 − C²)F)² / 2ħω`.
pub fn jt_energy(coupling: f64, phonon_energy: f64, c2: f64) -> f64 {
    let total = (1.0 + c2) * coupling;
    total * total / (2.0 * phonon_energy)
}

/// Inverts [`jt_energy`]: `F = √(2ħω·E_JT) / (1 + C²)`.
pub fn derive_coupling(jt_energy: f64, phonon_energy: f64, c2: f64) -> Result<f64> {
    ensure(
        jt_energy.is_finite() && jt_energy >= 0.0,
        "jt_energy",
        jt_energy,
        "must be non-negative",
    )?;
    ensure(
        phonon_energy.is_finite() && phonon_energy > 0.0,
        "phonon_energy",
        phonon_energy,
        "must be positive",
    )?;
    ensure((0.0..=1.0).contains(&c2), "c2", c2, "must lie in [0, 1]")?;
    Ok((2.0 * phonon_energy * jt_energy).sqrt() / (1.0 + c2))
}

/// Correlation weight from the orbital overlap amplitudes: `C² = 1 − 2p²s²`.
pub fn derive_c2(s: f64, p: f64) -> Result<f64> {
    let norm = s * s + p * p;
    ensure(
        s.is_finite() && p.is_finite() && norm <= 1.0 + 1e-9,
        "s^2 + p^2",
        norm,
        "must not exceed 1",
    )?;
    let c2 = 1.0 - 2.0 * p * p * s * s;
    ensure((0.0..=1.0).contains(&c2), "c2", c2, "must lie in [0, 1]")?;
    Ok(c2)
}

/// Huang-Rhys factor of a displacement in dimensionless coordinates, `S = R²/2`.
pub fn huang_rhys_factor(displacement: f64) -> Result<f64> {
    ensure(
        displacement.is_finite() && displacement >= 0.0,
        "displacement",
        displacement,
        "must be non-negative",
    )?;
    Ok(displacement * displacement / 2.0)
}

/// Electronic gap Λ_e that places the vibronic ZPL at `target_zpl`.
///
/// Bisection on `[0, 2·target]`; the returned value is the midpoint of the final
/// bracket, which is narrower than [`FIT_TOLERANCE`].
pub fn fit_electronic_gap(target_zpl: f64, params: &ModelParams) -> Result<f64> {
    ensure(
        target_zpl.is_finite() && target_zpl > 0.0,
        "target_zpl",
        target_zpl,
        "must be positive",
    )?;
    params.validate()?;
    let residual = |gap: f64| -> Result<f64> {
        let eig = vibronic::solve(&params.clone().with_electronic_gap(gap))?;
        Ok(eig.zpl_energy()? - target_zpl)
    };
    let (mut lo, mut hi) = (0.0, 2.0 * target_zpl);
    // With no gap the two manifolds need not separate; the ZPL is then below any
    // positive target, so a missing upper state counts as a negative residual.
    let mut r_lo = match residual(lo) {
        Err(Error::MissingState(_)) => -target_zpl,
        other => other?,
    };
    let r_hi = residual(hi)?;
    if r_lo.signum() == r_hi.signum() {
        return Err(Error::NoBracket { low: lo, high: hi });
    }
    while hi - lo > FIT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let r = residual(mid)?;
        if r == 0.0 {
            return Ok(mid);
        }
        if r.signum() == r_lo.signum() {
            lo = mid;
            r_lo = r;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
