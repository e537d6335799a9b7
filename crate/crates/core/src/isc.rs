//! Spin-orbit mediated intersystem crossing from the lower singlet into the triplet ground state.
//!
//! With the vibronic state written as Σ over phonon shells `n`, the axial
//! channel sees the ¹A₁ electronic weight of each shell and the two transverse
//! channels see the ¹E weight, each shell contributing the n-fold
//! autoconvolved one-phonon density at the energy gap.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by the inherent std methods in test builds
use num_traits::Float;

use crate::coefficients::{ElectronicPart, StateCoefficients};
use crate::constants::{ghz_to_mev, BOLTZMANN, HBAR};
use crate::error::{ensure, Error, Result};
use crate::params::ModelParams;
use crate::spectral::{Overlap, SpectralSeries};
use crate::symmetry::Irrep;
use crate::vibronic::{Manifold, VibronicEigensystem};

/// Largest Boltzmann weight left out of a thermal average.
pub const MAX_EXCLUDED_WEIGHT: f64 = 1e-4;

/// Rates in MHz.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RateSet {
    /// Axial channel into the m_s = 0 sublevel.
    pub gamma_z: f64,
    /// Transverse channel through the ¹E ⊗ A₁-phonon components.
    pub gamma_plus: f64,
    /// Transverse channel through the ¹E ⊗ E-phonon components.
    pub gamma_minus: f64,
}

impl RateSet {
    pub fn gamma_perp(&self) -> f64 {
        self.gamma_plus + self.gamma_minus
    }

    pub fn total(&self) -> f64 {
        self.gamma_z + self.gamma_perp()
    }

    /// Lifetime `1/(Γ_z + Γ_⊥)` in ns; `None` when every rate vanishes.
    pub fn lifetime_ns(&self) -> Option<f64> {
        let t = self.total();
        (t > 0.0).then(|| 1e3 / t)
    }

    pub fn axial_to_transverse(&self) -> Option<f64> {
        let p = self.gamma_perp();
        (p > 0.0).then(|| self.gamma_z / p)
    }

    fn scaled_add(&mut self, other: &RateSet, w: f64) {
        self.gamma_z += w * other.gamma_z;
        self.gamma_plus += w * other.gamma_plus;
        self.gamma_minus += w * other.gamma_minus;
    }
}

/// Shell-resolved weights feeding the three channels, indexed by phonon number.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChannelWeights {
    pub axial: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl ChannelWeights {
    /// Routing for a vibronic state.
    ///
    /// The axial channel takes the whole ¹A₁ weight. For an E state the
    /// transverse weight splits into ¹E ⊗ A₁ phonons (`plus`) and ¹E ⊗ E phonons
    /// (`minus`); the tiny ¹E ⊗ A₂ part has no channel. For A₁ and A₂ states the
    /// ¹E weight is shared equally between the two transverse channels.
    pub fn for_state(state: &StateCoefficients) -> Self {
        let mut out = Self::default();
        for shell in &state.shells {
            out.axial.push(shell.electronic(ElectronicPart::A1));
            match state.label.irrep {
                Irrep::E => {
                    out.plus.push(shell.get(ElectronicPart::E, Irrep::A1));
                    out.minus.push(shell.get(ElectronicPart::E, Irrep::E));
                }
                Irrep::A1 | Irrep::A2 => {
                    let half = 0.5 * shell.electronic(ElectronicPart::E);
                    out.plus.push(half);
                    out.minus.push(half);
                }
            }
        }
        out
    }

    pub fn uniform(axial: Vec<f64>, plus: Vec<f64>, minus: Vec<f64>) -> Self {
        Self { axial, plus, minus }
    }
}

/// `F(Σ) = Σ_n w_n S^(n)(Σ)` for the three channels, in 1/meV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapFunctions {
    pub axial: Overlap,
    pub plus: Overlap,
    pub minus: Overlap,
}

pub fn overlap_functions(
    gap: f64,
    channels: &ChannelWeights,
    series: &SpectralSeries,
) -> OverlapFunctions {
    OverlapFunctions {
        axial: series.evaluate(&channels.axial, gap),
        plus: series.evaluate(&channels.plus, gap),
        minus: series.evaluate(&channels.minus, gap),
    }
}

/// Golden-rule prefactors in s⁻¹·meV: `8πλ_z²C²/ħ` and `2π(1 − C²)λ⊥²/ħ`.
fn prefactors(params: &ModelParams) -> (f64, f64) {
    let lz = ghz_to_mev(params.axial_soc_ghz);
    let lp = ghz_to_mev(params.transverse_soc_ghz);
    (
        8.0 * PI * lz * lz * params.c2 / HBAR,
        2.0 * PI * (1.0 - params.c2) * lp * lp / HBAR,
    )
}

/// Rates out of a state with the given channel weights at singlet-triplet gap `gap` (meV).
pub fn isc_rates(
    gap: f64,
    params: &ModelParams,
    channels: &ChannelWeights,
    series: &SpectralSeries,
) -> Result<RateSet> {
    ensure(
        gap.is_finite() && gap > 0.0,
        "singlet_triplet_gap",
        gap,
        "must be positive",
    )?;
    let f = overlap_functions(gap, channels, series);
    let (axial, transverse) = prefactors(params);
    Ok(RateSet {
        gamma_z: axial * f.axial.value * 1e-6,
        gamma_plus: transverse * f.plus.value * 1e-6,
        gamma_minus: transverse * f.minus.value * 1e-6,
    })
}

/// [`isc_rates`] at each gap.
pub fn sigma_scan(
    gaps: &[f64],
    params: &ModelParams,
    channels: &ChannelWeights,
    series: &SpectralSeries,
) -> Result<Vec<(f64, RateSet)>> {
    gaps.iter()
        .map(|&g| isc_rates(g, params, channels, series).map(|r| (g, r)))
        .collect()
}

/// Gaps in `[lo, hi]` where the total rate equals `target` (MHz).
///
/// Sign changes are located on a grid of spacing `step` and refined by bisection to 1e-6 meV.
pub fn rate_crossings(
    target: f64,
    (lo, hi, step): (f64, f64, f64),
    params: &ModelParams,
    channels: &ChannelWeights,
    series: &SpectralSeries,
) -> Result<Vec<f64>> {
    ensure(
        step.is_finite() && step > 0.0,
        "scan step",
        step,
        "must be positive",
    )?;
    ensure(
        hi > lo && lo > 0.0,
        "scan range",
        hi,
        "must be an increasing positive range",
    )?;
    let residual = |g: f64| isc_rates(g, params, channels, series).map(|r| r.total() - target);
    let count = ((hi - lo) / step).round() as usize;
    let mut out = Vec::new();
    let mut a = lo;
    let mut ra = residual(a)?;
    for i in 1..=count {
        let b = (lo + i as f64 * step).min(hi);
        let rb = residual(b)?;
        if ra == 0.0 {
            out.push(a);
        } else if ra.signum() != rb.signum() && rb != 0.0 {
            let (mut x0, mut x1, mut r0) = (a, b, ra);
            while x1 - x0 > 1e-6 {
                let mid = 0.5 * (x0 + x1);
                let rm = residual(mid)?;
                if rm.signum() == r0.signum() {
                    x0 = mid;
                    r0 = rm;
                } else {
                    x1 = mid;
                }
            }
            out.push(0.5 * (x0 + x1));
        }
        a = b;
        ra = rb;
    }
    if ra == 0.0 {
        out.push(a);
    }
    Ok(out)
}

/// `Γ_z/Γ_⊥` for each transverse-to-axial coupling ratio at a fixed gap.
pub fn lambda_ratio_scan(
    ratios: &[f64],
    gap: f64,
    params: &ModelParams,
    channels: &ChannelWeights,
    series: &SpectralSeries,
) -> Result<Vec<(f64, f64)>> {
    ratios
        .iter()
        .map(|&ratio| {
            ensure(
                ratio.is_finite() && ratio > 0.0,
                "soc ratio",
                ratio,
                "must be positive",
            )?;
            let p = ModelParams {
                transverse_soc_ghz: ratio * params.axial_soc_ghz,
                ..params.clone()
            };
            let r = isc_rates(gap, &p, channels, series)?;
            Ok((ratio, r.axial_to_transverse().unwrap_or(f64::INFINITY)))
        })
        .collect()
}

/// One thermally accessible vibronic state of the lower manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalState {
    /// Energy above the ground doublet, meV.
    pub energy: f64,
    pub channels: ChannelWeights,
}

/// The lowest lower-manifold states plus the energies of all others, for the truncation check.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalModel {
    pub states: Vec<ThermalState>,
    pub excluded_energies: Vec<f64>,
}

impl ThermalModel {
    /// Takes the states of the lowest `levels` lower-manifold levels.
    pub fn new(eig: &VibronicEigensystem, levels: usize) -> Result<Self> {
        let ground = eig.energies()[eig.ground_e()?];
        let mut states = Vec::new();
        let mut excluded_energies = Vec::new();
        for (i, level) in eig
            .levels()
            .into_iter()
            .filter(|l| l.manifold == Manifold::Lower)
            .enumerate()
        {
            for k in level.states() {
                if i < levels {
                    let coeffs = crate::coefficients::state_coefficients(eig, k)?;
                    states.push(ThermalState {
                        energy: eig.energies()[k] - ground,
                        channels: ChannelWeights::for_state(&coeffs),
                    });
                } else {
                    excluded_energies.push(eig.energies()[k] - ground);
                }
            }
        }
        Ok(Self {
            states,
            excluded_energies,
        })
    }

    /// Boltzmann weights of the included states and the total weight left out.
    pub fn populations(&self, temperature: f64) -> (Vec<f64>, f64) {
        let boltz = |e: f64| {
            if temperature == 0.0 {
                if e < crate::vibronic::DEGENERACY_TOL {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-e / (BOLTZMANN * temperature)).exp()
            }
        };
        let included: Vec<f64> = self.states.iter().map(|s| boltz(s.energy)).collect();
        let excluded: f64 = self.excluded_energies.iter().map(|&e| boltz(e)).sum();
        let z = included.iter().sum::<f64>() + excluded;
        (included.iter().map(|w| w / z).collect(), excluded / z)
    }
}

/// Boltzmann average `Σ_k p_k Γ^(k)(Σ + E_k)` over the states of `model`.
pub fn thermal_rates(
    temperature: f64,
    gap: f64,
    params: &ModelParams,
    model: &ThermalModel,
    series: &SpectralSeries,
) -> Result<RateSet> {
    ensure(
        temperature.is_finite() && temperature >= 0.0,
        "temperature",
        temperature,
        "must be non-negative",
    )?;
    let (populations, excluded) = model.populations(temperature);
    if excluded > MAX_EXCLUDED_WEIGHT {
        return Err(Error::Truncation { excluded });
    }
    let mut out = RateSet::default();
    for (state, &p) in model.states.iter().zip(&populations) {
        if p == 0.0 {
            continue;
        }
        let r = isc_rates(gap + state.energy, params, &state.channels, series)?;
        out.scaled_add(&r, p);
    }
    Ok(out)
}
