//! Optical lineshapes: singlet photoluminescence from the vibronic states and a
//! Huang-Rhys absorption progression.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector, Matrix3};

#[allow(unused_imports)] // shadowed by the inherent std methods in test builds
use num_traits::Float;

use crate::coefficients::{CoefficientTable, ElectronicPart};
use crate::error::{ensure, Result};
use crate::fock::{OperatorMatrix, Structure};
use crate::params::ModelParams;
use crate::spectral::{gaussian, SpectralFunction, SpectralShape};
use crate::symmetry::Irrep;
use crate::vibronic::{electronic, Manifold, VibronicEigensystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarization {
    X,
    Y,
}

/// Electronic dipole: `d_x = 2d⊥σ_z`, `d_y = 2d⊥σ_x`.
pub fn dipole_operator(polarization: Polarization, dipole: f64) -> OperatorMatrix {
    let m = dipole_matrix(polarization, dipole);
    OperatorMatrix::new(
        DMatrix::from_fn(3, 3, |i, j| m[(i, j)]),
        Structure::Symmetric,
    )
}

fn dipole_matrix(polarization: Polarization, dipole: f64) -> Matrix3<f64> {
    match polarization {
        Polarization::X => electronic::sigma_z() * (2.0 * dipole),
        Polarization::Y => electronic::sigma_x() * (2.0 * dipole),
    }
}

/// Uniform energy grid, meV relative to the zero-phonon line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            min: -20.0,
            max: 400.0,
            step: 0.1,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        ensure(
            self.step.is_finite() && self.step > 0.0,
            "grid step",
            self.step,
            "must be positive",
        )?;
        ensure(
            self.min.is_finite() && self.max.is_finite() && self.max > self.min,
            "grid max",
            self.max,
            "must exceed grid min",
        )
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step).round() as usize + 1;
        (0..n).map(|i| self.min + i as f64 * self.step).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumGrid {
    pub energies: Vec<f64>,
    pub intensities: Vec<f64>,
}

impl SpectrumGrid {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Position of the largest intensity with energy in `[lo, hi]`.
    pub fn argmax_in(&self, lo: f64, hi: f64) -> Option<f64> {
        self.energies
            .iter()
            .zip(&self.intensities)
            .filter(|(e, _)| (lo..=hi).contains(*e))
            .fold(None, |best: Option<(f64, f64)>, (&e, &i)| match best {
                Some((_, bi)) if bi >= i => best,
                _ => Some((e, i)),
            })
            .map(|(e, _)| e)
    }

    /// First local maximum at energy ≥ `from`.
    pub fn first_peak_after(&self, from: f64) -> Option<f64> {
        let y = &self.intensities;
        (1..y.len().saturating_sub(1))
            .filter(|&i| self.energies[i] >= from)
            .find(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
            .map(|i| self.energies[i])
    }
}

/// One emission line; `shift` is the energy of the final level above the lower ground doublet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralLine {
    pub shift: f64,
    pub intensity: f64,
    pub state: usize,
    pub irrep: Irrep,
}

/// Emission lines from the upper-manifold ground state into every lower level.
///
/// Intensities are `Σ |⟨emitter| d ⊗ 1 |k⟩|²` summed over the partners of each
/// level, in units of `d⊥²`.
pub fn pl_lines(
    eig: &VibronicEigensystem,
    params: &ModelParams,
    polarization: Polarization,
) -> Result<Vec<SpectralLine>> {
    let emitter = eig.ground_a1()?;
    let ground = eig.energies()[eig.ground_e()?];
    let d = eig.basis().len();
    let dip = dipole_matrix(polarization, params.dipole);
    let source = eig.vector(emitter);
    let mut image = DVector::zeros(3 * d);
    for e in 0..3 {
        for f in 0..3 {
            let w = dip[(e, f)];
            if w != 0.0 {
                for p in 0..d {
                    image[e * d + p] += w * source[f * d + p];
                }
            }
        }
    }
    let lines = eig
        .levels()
        .into_iter()
        .filter(|l| l.manifold == Manifold::Lower && l.energy < eig.energies()[emitter])
        .map(|l| {
            let intensity = l
                .states()
                .map(|k| {
                    let amp = image.dot(&eig.vector(k));
                    amp * amp
                })
                .sum();
            SpectralLine {
                shift: l.energy - ground,
                intensity,
                state: l.first,
                irrep: l.irrep,
            }
        })
        .collect();
    Ok(lines)
}

/// Zero-phonon amplitude `⟨Ẽ_x| d_x |Ã₁⟩` from the coupled-basis coefficients:
/// `2d⊥ (Σ c_i c′_i + Σ d_i d′_i / √2)`, with `c′`, `d′` those of the emitter.
pub fn zpl_amplitude(table: &CoefficientTable, dipole: f64) -> f64 {
    let (g, a) = (&table.ground, &table.emitter);
    let mut sum = 0.0;
    for n in 0..=table.n_max {
        let c = g.amplitudes_of(ElectronicPart::E, Irrep::A1, n);
        let c_prime = a.amplitudes_of(ElectronicPart::A1, Irrep::A1, n);
        sum += c.iter().zip(&c_prime).map(|(x, y)| x * y).sum::<f64>();
        let d = g.amplitudes_of(ElectronicPart::A1, Irrep::E, n);
        let d_prime = a.amplitudes_of(ElectronicPart::E, Irrep::E, n);
        sum += FRAC_1_SQRT_2 * d.iter().zip(&d_prime).map(|(x, y)| x * y).sum::<f64>();
    }
    2.0 * dipole * sum
}

/// PL spectrum with the zero-phonon line at zero and its strength normalized to one.
///
/// A line `k` with shift `ε` is broadened with `widths[min(round(ε/ħω), len − 1)]`
/// (FWHM, meV): the zero-phonon, one-phonon and multi-phonon bands by default.
pub fn pl_spectrum(
    eig: &VibronicEigensystem,
    params: &ModelParams,
    widths: &[f64],
    grid: &GridSpec,
) -> Result<SpectrumGrid> {
    grid.validate()?;
    ensure(
        !widths.is_empty(),
        "smearing widths",
        0.0,
        "need at least one band",
    )?;
    for &w in widths {
        ensure(
            w.is_finite() && w > 0.0,
            "smearing width",
            w,
            "must be positive",
        )?;
    }
    let lines = pl_lines(eig, params, Polarization::X)?;
    let zpl = lines.first().map_or(0.0, |l| l.intensity);
    ensure(zpl > 0.0, "zero-phonon intensity", zpl, "must be positive")?;

    let energies = grid.points();
    let mut intensities = alloc::vec![0.0; energies.len()];
    for line in &lines {
        let band = ((line.shift / params.phonon_energy).round() as usize).min(widths.len() - 1);
        let weight = line.intensity / zpl;
        for (y, &x) in intensities.iter_mut().zip(&energies) {
            *y += weight * gaussian(x, line.shift, widths[band]);
        }
    }
    Ok(SpectrumGrid {
        energies,
        intensities,
    })
}

/// Poisson weights `e^{−S} Sⁿ/n!` up to the first order past the mean below 1e-10,
/// which keeps the dropped tail below 1e-8.
pub fn poisson_weights(huang_rhys: f64) -> Result<Vec<f64>> {
    ensure(
        huang_rhys.is_finite() && huang_rhys >= 0.0,
        "huang_rhys",
        huang_rhys,
        "must be non-negative",
    )?;
    let mut weights = Vec::new();
    let mut w = (-huang_rhys).exp();
    let mut n = 0usize;
    loop {
        weights.push(w);
        n += 1;
        w *= huang_rhys / n as f64;
        if w < 1e-10 && n as f64 > huang_rhys {
            break;
        }
    }
    Ok(weights)
}

/// Sideband model of [`hr_absorption`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sideband {
    /// Gaussian lines at `n·ħω` with the zero-phonon width.
    Discrete,
    /// `n`-phonon replicas replaced by the n-fold autoconvolution of a one-phonon
    /// density of the given shape centred on `ħω`, sampled with `step`.
    Broad { shape: SpectralShape, step: f64 },
}

/// Huang-Rhys absorption spectrum relative to the zero-phonon line.
pub fn hr_absorption(
    huang_rhys: f64,
    phonon_energy: f64,
    smearing: f64,
    sideband: Sideband,
    grid: &GridSpec,
) -> Result<SpectrumGrid> {
    grid.validate()?;
    ensure(
        phonon_energy.is_finite() && phonon_energy > 0.0,
        "phonon_energy",
        phonon_energy,
        "must be positive",
    )?;
    ensure(
        smearing.is_finite() && smearing > 0.0,
        "smearing",
        smearing,
        "must be positive",
    )?;
    let weights = poisson_weights(huang_rhys)?;
    let energies = grid.points();
    let mut intensities = alloc::vec![0.0; energies.len()];
    match sideband {
        Sideband::Discrete => {
            for (n, &w) in weights.iter().enumerate() {
                let center = n as f64 * phonon_energy;
                for (y, &x) in intensities.iter_mut().zip(&energies) {
                    *y += w * gaussian(x, center, smearing);
                }
            }
        }
        Sideband::Broad { shape, step } => {
            let shape = match shape {
                SpectralShape::Gaussian { fwhm, .. } => SpectralShape::Gaussian {
                    center: phonon_energy,
                    fwhm,
                },
                SpectralShape::Gamma { fwhm, .. } => SpectralShape::Gamma {
                    mean: phonon_energy,
                    fwhm,
                },
            };
            let base = SpectralFunction::from_shape(shape, step)?;
            for (y, &x) in intensities.iter_mut().zip(&energies) {
                *y += weights[0] * gaussian(x, 0.0, smearing);
            }
            let mut power = SpectralFunction::delta(step);
            for &w in &weights[1..] {
                power = power.convolve(&base);
                for (y, &x) in intensities.iter_mut().zip(&energies) {
                    *y += w * power.value_at(x).unwrap_or(0.0);
                }
            }
        }
    }
    Ok(SpectrumGrid {
        energies,
        intensities,
    })
}
