//! Run configuration: one JSON document, optionally patched with `key=value` overrides.

use std::path::{Path, PathBuf};

use nvsinglet_core::params::{self, ModelParams};
use nvsinglet_core::spectra::GridSpec;
use nvsinglet_core::vibronic::MAX_TRUNCATION;
use nvsinglet_core::SpectralShape;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub isc: IscSection,
    pub spectral: SpectralSection,
    pub pl: PlSection,
    pub absorption: AbsorptionSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// ħω_E, meV.
    pub phonon_energy: f64,
    /// Jahn-Teller energy used to derive `coupling` when that is unset, meV.
    pub jt_energy: f64,
    /// F, meV.
    pub coupling: Option<f64>,
    /// C²; ignored when `overlap` is given.
    pub c2: f64,
    /// Orbital overlap amplitudes (s, p) from which C² is derived.
    pub overlap: Option<Overlap>,
    /// Λ_e, meV; fitted to `target_zpl` when unset.
    pub electronic_gap: Option<f64>,
    pub target_zpl: f64,
    pub n_max: usize,
    pub dipole: f64,
    pub dynamic_jt: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overlap {
    pub s: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IscSection {
    pub axial_soc_ghz: f64,
    pub transverse_soc_ghz: f64,
    /// Σ, meV; fitted to `reference_rate_mhz` at zero temperature when unset.
    pub singlet_triplet_gap: Option<f64>,
    pub reference_rate_mhz: f64,
    pub scan: Range,
    /// Measured total rates (MHz) reported against the Σ scan.
    pub targets_mhz: Vec<f64>,
    /// λ⊥/λ_z values for the λ scan.
    pub ratios: Vec<f64>,
    pub temperatures: Range,
    pub thermal_levels: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.min + i as f64 * self.step).collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = self.min.is_finite()
            && self.max.is_finite()
            && self.step.is_finite()
            && self.step > 0.0
            && self.max >= self.min;
        if ok {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "{name}: need finite min ≤ max and step > 0"
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Gaussian,
    Gamma,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralSection {
    pub shape: ShapeKind,
    /// Gaussian-equivalent FWHM of the one-phonon density, meV.
    pub fwhm: f64,
    /// Sampling step of the density, meV.
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlSection {
    /// FWHM per band (zero-phonon, one-phonon, multi-phonon), meV.
    pub widths: Vec<f64>,
    pub grid: Range,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbsorptionSection {
    /// Dimensionless displacement R; S = R²/2 unless `huang_rhys` is set.
    pub displacement: f64,
    pub huang_rhys: Option<f64>,
    pub phonon_energy: f64,
    pub smearing: f64,
    /// Replace the discrete replicas by the autoconvolved one-phonon density.
    pub broad: bool,
    pub grid: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            phonon_energy: params::PHONON_ENERGY,
            jt_energy: params::JT_ENERGY,
            coupling: None,
            c2: params::CORRELATION_WEIGHT,
            overlap: None,
            electronic_gap: None,
            target_zpl: params::SINGLET_ZPL,
            n_max: 10,
            dipole: 1.0,
            dynamic_jt: true,
        }
    }
}

impl Default for IscSection {
    fn default() -> Self {
        Self {
            axial_soc_ghz: params::AXIAL_SOC_GHZ,
            transverse_soc_ghz: 1.2 * params::AXIAL_SOC_GHZ,
            singlet_triplet_gap: None,
            reference_rate_mhz: 2.70,
            scan: Range {
                min: 300.0,
                max: 500.0,
                step: 1.0,
            },
            targets_mhz: vec![2.70, 2.16],
            ratios: (10..=40).map(|i| i as f64 / 10.0).collect(),
            temperatures: Range {
                min: 0.0,
                max: 350.0,
                step: 10.0,
            },
            thermal_levels: 60,
        }
    }
}

impl Default for SpectralSection {
    fn default() -> Self {
        Self {
            shape: ShapeKind::Gamma,
            fwhm: 70.0,
            step: 0.5,
        }
    }
}

fn default_grid() -> Range {
    let g = GridSpec::default();
    Range {
        min: g.min,
        max: g.max,
        step: g.step,
    }
}

impl Default for PlSection {
    fn default() -> Self {
        Self {
            widths: vec![2.0, 5.0, 10.0],
            grid: default_grid(),
        }
    }
}

impl Default for AbsorptionSection {
    fn default() -> Self {
        Self {
            displacement: 1.3,
            huang_rhys: None,
            phonon_energy: params::PHONON_ENERGY,
            smearing: 1.5,
            broad: true,
            grid: default_grid(),
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    /// Reads `path` (or starts from defaults), applies `key=value` overrides and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(CliError::io(p))?;
                serde_json::from_str::<Value>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(Default::default()),
        };
        for item in overrides {
            apply_override(&mut doc, item)?;
        }
        let config: RunConfig =
            serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        let bad = |msg: &str| Err(CliError::Config(msg.to_owned()));
        if !(m.jt_energy.is_finite() && m.jt_energy >= 0.0) {
            return bad("model.jt_energy must be non-negative");
        }
        if m.n_max > MAX_TRUNCATION {
            return Err(CliError::Config(format!(
                "model.n_max must not exceed {MAX_TRUNCATION}"
            )));
        }
        if let Some(o) = m.overlap {
            params::derive_c2(o.s, o.p).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if let Some(g) = m.electronic_gap {
            if !(g.is_finite() && g >= 0.0) {
                return bad("model.electronic_gap must be non-negative");
            }
        }
        self.base_params()?
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        let i = &self.isc;
        if let Some(g) = i.singlet_triplet_gap {
            if !(g.is_finite() && g > 0.0) {
                return bad("isc.singlet_triplet_gap must be positive");
            }
        }
        if !(i.reference_rate_mhz.is_finite() && i.reference_rate_mhz > 0.0) {
            return bad("isc.reference_rate_mhz must be positive");
        }
        i.scan.validate("isc.scan")?;
        if i.scan.min <= 0.0 || i.scan.max <= i.scan.min {
            return bad("isc.scan needs 0 < min < max");
        }
        i.temperatures.validate("isc.temperatures")?;
        if i.temperatures.min < 0.0 {
            return bad("isc.temperatures.min must be non-negative");
        }
        if i.targets_mhz.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("isc.targets_mhz must be positive");
        }
        if i.ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad("isc.ratios must be positive");
        }
        if i.thermal_levels == 0 {
            return bad("isc.thermal_levels must be at least 1");
        }

        let s = &self.spectral;
        if !(s.fwhm.is_finite() && s.fwhm > 0.0 && s.step.is_finite() && s.step > 0.0) {
            return bad("spectral.fwhm and spectral.step must be positive");
        }
        if self.pl.widths.is_empty() || self.pl.widths.iter().any(|w| !(w.is_finite() && *w > 0.0))
        {
            return bad("pl.widths must be a non-empty list of positive widths");
        }
        self.pl.grid.validate("pl.grid")?;
        if self.pl.grid.max <= self.pl.grid.min {
            return bad("pl.grid.max must exceed pl.grid.min");
        }

        let a = &self.absorption;
        if !(a.displacement.is_finite() && a.displacement >= 0.0) {
            return bad("absorption.displacement must be non-negative");
        }
        if let Some(s) = a.huang_rhys {
            if !(s.is_finite() && s >= 0.0) {
                return bad("absorption.huang_rhys must be non-negative");
            }
        }
        if !(a.phonon_energy.is_finite() && a.phonon_energy > 0.0) {
            return bad("absorption.phonon_energy must be positive");
        }
        if !(a.smearing.is_finite() && a.smearing > 0.0) {
            return bad("absorption.smearing must be positive");
        }
        a.grid.validate("absorption.grid")?;
        if a.grid.max <= a.grid.min {
            return bad("absorption.grid.max must exceed absorption.grid.min");
        }
        Ok(())
    }

    /// Model parameters before any fit; the electronic gap falls back to the quoted default.
    pub fn base_params(&self) -> Result<ModelParams> {
        let m = &self.model;
        let c2 = match m.overlap {
            Some(o) => params::derive_c2(o.s, o.p).map_err(|e| CliError::Config(e.to_string()))?,
            None => m.c2,
        };
        let coupling = match m.coupling {
            Some(f) => f,
            None => params::derive_coupling(m.jt_energy, m.phonon_energy, c2)
                .map_err(|e| CliError::Config(e.to_string()))?,
        };
        Ok(ModelParams {
            phonon_energy: m.phonon_energy,
            coupling,
            c2,
            electronic_gap: m.electronic_gap.unwrap_or(params::ELECTRONIC_GAP),
            axial_soc_ghz: self.isc.axial_soc_ghz,
            transverse_soc_ghz: self.isc.transverse_soc_ghz,
            singlet_triplet_gap: self
                .isc
                .singlet_triplet_gap
                .unwrap_or(params::SINGLET_TRIPLET_GAP),
            n_max: m.n_max,
            dipole: m.dipole,
            target_zpl: m.target_zpl,
            dynamic_jt: m.dynamic_jt,
        })
    }

    pub fn shape(&self, mean: f64) -> SpectralShape {
        let fwhm = self.spectral.fwhm;
        match self.spectral.shape {
            ShapeKind::Gaussian => SpectralShape::Gaussian { center: mean, fwhm },
            ShapeKind::Gamma => SpectralShape::Gamma { mean, fwhm },
        }
    }

    pub fn grid(range: &Range) -> GridSpec {
        GridSpec {
            min: range.min,
            max: range.max,
            step: range.step,
        }
    }
}

/// Sets a dotted key; the value is parsed as JSON and kept as a string otherwise.
fn apply_override(doc: &mut Value, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(CliError::Config(format!(
                "override key `{key}` has an empty segment"
            )));
        }
        let map = node.as_object_mut().ok_or_else(|| {
            CliError::Config(format!("override `{key}` descends into a non-object"))
        })?;
        if i + 1 == parts.len() {
            map.insert((*part).to_owned(), value);
            return Ok(());
        }
        node = map
            .entry((*part).to_owned())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split always yields at least one segment")
}
