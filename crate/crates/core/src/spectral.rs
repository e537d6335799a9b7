//! One-phonon spectral densities on a uniform grid starting at zero energy.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by the inherent std methods in test builds
use num_traits::Float;

use crate::constants::FWHM_PER_SIGMA;
use crate::error::{ensure, Result};

/// Analytic shape of a one-phonon density.
///
/// Widths are Gaussian-equivalent: `fwhm = 2√(2 ln 2)·σ` with σ the standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralShape {
    Gaussian {
        center: f64,
        fwhm: f64,
    },
    /// Gamma distribution with the given mean and standard deviation; vanishes at zero energy.
    Gamma {
        mean: f64,
        fwhm: f64,
    },
}

impl SpectralShape {
    pub fn mean(&self) -> f64 {
        match *self {
            SpectralShape::Gaussian { center, .. } => center,
            SpectralShape::Gamma { mean, .. } => mean,
        }
    }

    pub fn sigma(&self) -> f64 {
        match *self {
            SpectralShape::Gaussian { fwhm, .. } | SpectralShape::Gamma { fwhm, .. } => {
                fwhm / FWHM_PER_SIGMA
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let (m, s) = (self.mean(), self.sigma());
        ensure(
            m.is_finite() && m > 0.0,
            "density mean",
            m,
            "must be positive",
        )?;
        ensure(
            s.is_finite() && s > 0.0,
            "density width",
            s,
            "must be positive",
        )
    }

    /// Unnormalized density at `x ≥ 0`.
    fn density(&self, x: f64) -> f64 {
        let s = self.sigma();
        match *self {
            SpectralShape::Gaussian { center, .. } => {
                let z = (x - center) / s;
                (-0.5 * z * z).exp()
            }
            SpectralShape::Gamma { mean, .. } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let shape = (mean / s).powi(2);
                let scale = s * s / mean;
                let log =
                    (shape - 1.0) * x.ln() - x / scale - libm::lgamma(shape) - shape * scale.ln();
                log.exp()
            }
        }
    }

    fn support_end(&self) -> f64 {
        self.mean() + 12.0 * self.sigma()
    }
}

/// Non-negative density sampled at `x_i = i·step`, normalized with the rectangle rule.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction {
    step: f64,
    values: Vec<f64>,
}

impl SpectralFunction {
    /// Samples `shape` on `[0, mean + 12σ]`, dropping the weight below zero energy.
    pub fn from_shape(shape: SpectralShape, step: f64) -> Result<Self> {
        shape.validate()?;
        ensure(
            step.is_finite() && step > 0.0,
            "grid step",
            step,
            "must be positive",
        )?;
        let points = (shape.support_end() / step).ceil() as usize + 1;
        let values = (0..points)
            .map(|i| shape.density(i as f64 * step))
            .collect();
        Self::from_samples(step, values)
    }

    /// Normalizes raw samples to unit area.
    pub fn from_samples(step: f64, mut values: Vec<f64>) -> Result<Self> {
        ensure(
            step.is_finite() && step > 0.0,
            "grid step",
            step,
            "must be positive",
        )?;
        let bad = values.iter().copied().find(|v| !v.is_finite() || *v < 0.0);
        ensure(
            bad.is_none(),
            "density sample",
            bad.unwrap_or(0.0),
            "must be finite and non-negative",
        )?;
        let area: f64 = values.iter().sum::<f64>() * step;
        ensure(area > 0.0, "density area", area, "must be positive")?;
        values.iter_mut().for_each(|v| *v /= area);
        Ok(Self { step, values })
    }

    /// Unit mass at the grid origin.
    pub fn delta(step: f64) -> Self {
        Self {
            step,
            values: vec![1.0 / step],
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_energy(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    pub fn energy(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step
    }

    pub fn mean(&self) -> f64 {
        self.moment(1) / self.integral()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(2) / self.integral() - m * m
    }

    fn moment(&self, k: i32) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.energy(i).powi(k))
            .sum::<f64>()
            * self.step
    }

    /// Linear interpolation; `None` outside `[0, max_energy]`.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        if !(0.0..=self.max_energy()).contains(&x) {
            return None;
        }
        let pos = x / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 1);
        if i + 1 == self.values.len() {
            return Some(self.values[i]);
        }
        let t = pos - i as f64;
        Some(self.values[i] * (1.0 - t) + self.values[i + 1] * t)
    }

    /// `(self ∗ other)(x)`; the result grid grows to hold the combined support.
    pub fn convolve(&self, other: &SpectralFunction) -> SpectralFunction {
        assert!(
            (self.step - other.step).abs() <= 1e-12 * self.step,
            "convolution needs a shared grid step"
        );
        let mut out = vec![0.0; self.values.len() + other.values.len() - 1];
        for (i, &a) in self.values.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (o, &b) in out[i..].iter_mut().zip(&other.values) {
                *o += a * b;
            }
        }
        out.iter_mut().for_each(|v| *v *= self.step);
        SpectralFunction {
            step: self.step,
            values: out,
        }
    }

    /// n-fold self convolution; `n = 0` gives [`SpectralFunction::delta`].
    pub fn autoconvolve(&self, n: usize) -> SpectralFunction {
        let mut acc = SpectralFunction::delta(self.step);
        for _ in 0..n {
            acc = acc.convolve(self);
        }
        acc
    }
}

/// Cached autoconvolution powers `S^(0) … S^(n_max)` of one density.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSeries {
    powers: Vec<SpectralFunction>,
}

/// Value of a weighted sum of powers and whether any term fell outside its tabulated support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlap {
    pub value: f64,
    pub outside_support: bool,
}

impl SpectralSeries {
    pub fn new(base: &SpectralFunction, n_max: usize) -> Self {
        let mut powers = Vec::with_capacity(n_max + 1);
        powers.push(SpectralFunction::delta(base.step()));
        for n in 1..=n_max {
            let next = powers[n - 1].convolve(base);
            powers.push(next);
        }
        Self { powers }
    }

    pub fn n_max(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn power(&self, n: usize) -> &SpectralFunction {
        &self.powers[n]
    }

    /// `Σ_n w_n S^(n)(x)`. Terms with `n` above the cached order count as outside support.
    pub fn evaluate(&self, weights: &[f64], x: f64) -> Overlap {
        let mut value = 0.0;
        let mut outside_support = false;
        for (n, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            match self.powers.get(n).and_then(|p| p.value_at(x)) {
                Some(s) => value += w * s,
                None => {
                    outside_support |=
                        x > 0.0 && self.powers.get(n).is_none_or(|p| x > p.max_energy())
                }
            }
        }
        Overlap {
            value,
            outside_support,
        }
    }
}

/// Unit-area Gaussian with the given full width at half maximum.
pub fn gaussian(x: f64, center: f64, fwhm: f64) -> f64 {
    let s = fwhm / FWHM_PER_SIGMA;
    let z = (x - center) / s;
    (-0.5 * z * z).exp() / (s * (2.0 * core::f64::consts::PI).sqrt())
}
