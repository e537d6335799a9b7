use std::f64::consts::PI;
use std::sync::OnceLock;

use nvsinglet_core::constants::{ghz_to_mev, HBAR};
use nvsinglet_core::isc::{
    lambda_ratio_scan, overlap_functions, rate_crossings, sigma_scan, ThermalModel,
};
use nvsinglet_core::spectral::gaussian;
use nvsinglet_core::{
    extract_coefficients, isc_rates, solve, thermal_rates, ChannelWeights, Error, ModelParams,
    SpectralFunction, SpectralSeries, SpectralShape, VibronicEigensystem,
};
use proptest::prelude::*;

const FITTED_GAP: f64 = 1129.152679;

struct Setup {
    params: ModelParams,
    eig: VibronicEigensystem,
    channels: ChannelWeights,
    series: SpectralSeries,
    sigma: f64,
}

fn setup() -> &'static Setup {
    static CELL: OnceLock<Setup> = OnceLock::new();
    CELL.get_or_init(|| {
        let params = ModelParams::default().with_electronic_gap(FITTED_GAP);
        let eig = solve(&params).unwrap();
        let t = extract_coefficients(&eig).unwrap();
        let channels = ChannelWeights::for_state(&t.ground);
        let base = SpectralFunction::from_shape(
            SpectralShape::Gamma {
                mean: 66.1,
                fwhm: 70.0,
            },
            0.5,
        )
        .unwrap();
        let series = SpectralSeries::new(&base, 10);
        let sigma = *rate_crossings(2.70, (300.0, 500.0, 1.0), &params, &channels, &series)
            .unwrap()
            .last()
            .unwrap();
        Setup {
            params,
            eig,
            channels,
            series,
            sigma,
        }
    })
}

fn gaussian_base(step: f64) -> SpectralFunction {
    SpectralFunction::from_shape(
        SpectralShape::Gaussian {
            center: 66.1,
            fwhm: 15.0,
        },
        step,
    )
    .unwrap()
}

#[test]
fn autoconvolution_follows_gaussian_law() {
    let base = gaussian_base(0.1);
    let sigma = 15.0 / (8.0 * 2f64.ln()).sqrt();
    for n in 1..=6 {
        let s = base.autoconvolve(n);
        assert!((s.integral() - 1.0).abs() < 1e-6);
        assert!((s.mean() - n as f64 * base.mean()).abs() < 1e-9);
        assert!((s.variance() - n as f64 * base.variance()).abs() < 1e-6);
        let width = sigma * (n as f64).sqrt();
        let peak = 1.0 / (width * (2.0 * PI).sqrt());
        let worst = (0..s.values().len())
            .map(|i| {
                (s.values()[i] - gaussian(s.energy(i), n as f64 * 66.1, 15.0 * (n as f64).sqrt()))
                    .abs()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-3 * peak, "n={n}: {worst} vs peak {peak}");
    }
}

#[test]
fn two_term_overlap_is_gaussian_mixture() {
    let series = SpectralSeries::new(&gaussian_base(0.1), 3);
    for x in [40.0, 66.1, 90.0, 110.0, 132.2, 160.0] {
        let ours = series.evaluate(&[0.0, 0.5, 0.5], x).value;
        let analytic = 0.5 * gaussian(x, 66.1, 15.0) + 0.5 * gaussian(x, 132.2, 15.0 * 2f64.sqrt());
        assert!(
            (ours - analytic).abs() < 1e-3 * analytic.max(1e-4),
            "{x}: {ours} vs {analytic}"
        );
    }
    let single = series.evaluate(&[0.0, 1.0], 70.0).value;
    assert!((single - gaussian_base(0.1).value_at(70.0).unwrap()).abs() < 1e-15);
    assert_eq!(series.evaluate(&[0.0; 4], 70.0).value, 0.0);
}

#[test]
fn overlap_functions_integrate_to_their_weight() {
    let s = setup();
    let step = 0.25;
    let grid: Vec<f64> = (1..(1500.0 / step) as usize)
        .map(|i| i as f64 * step)
        .collect();
    let (mut a, mut p, mut m) = (0.0, 0.0, 0.0);
    for &x in &grid {
        let f = overlap_functions(x, &s.channels, &s.series);
        assert!(f.axial.value >= 0.0 && f.plus.value >= 0.0 && f.minus.value >= 0.0);
        a += f.axial.value * step;
        p += f.plus.value * step;
        m += f.minus.value * step;
    }
    // The zero-phonon term is a unit mass at zero and never reached on a positive grid.
    let w = |v: &[f64]| v[1..].iter().sum::<f64>();
    assert!((a - w(&s.channels.axial)).abs() < 1e-4, "{a}");
    assert!((p - w(&s.channels.plus)).abs() < 1e-4, "{p}");
    assert!((m - w(&s.channels.minus)).abs() < 1e-4, "{m}");
}

#[test]
fn axial_overlap_magnitude() {
    let s = setup();
    let f = overlap_functions(s.sigma, &s.channels, &s.series)
        .axial
        .value;
    let lz = ghz_to_mev(15.78);
    assert!((lz - 0.06526).abs() < 1e-5);
    // Γ_z ≈ 2.3 MHz inverted through the golden-rule prefactor.
    let oracle = 2.3e6 * HBAR / (8.0 * PI * lz * lz * 0.9);
    assert!((oracle - 1.6e-5).abs() < 0.05e-5);
    assert!((f - oracle).abs() < 0.1 * oracle, "{f} vs {oracle}");
}

#[test]
fn scan_matches_pointwise_and_ignores_order() {
    let s = setup();
    let gaps: Vec<f64> = (0..=40).map(|i| 300.0 + 5.0 * i as f64).collect();
    let forward = sigma_scan(&gaps, &s.params, &s.channels, &s.series).unwrap();
    let mut reversed_gaps = gaps.clone();
    reversed_gaps.reverse();
    let mut backward = sigma_scan(&reversed_gaps, &s.params, &s.channels, &s.series).unwrap();
    backward.reverse();
    assert_eq!(forward, backward);
    for (g, r) in &forward {
        assert_eq!(
            *r,
            isc_rates(*g, &s.params, &s.channels, &s.series).unwrap()
        );
        assert!(r.gamma_z >= 0.0 && r.gamma_plus >= 0.0 && r.gamma_minus >= 0.0);
    }
}

#[test]
fn ratio_follows_inverse_square_of_coupling_ratio() {
    let s = setup();
    let ratios = [0.5, 1.0, 1.2, 2.0, 39.76 / 15.78, 4.0];
    let scan = lambda_ratio_scan(&ratios, s.sigma, &s.params, &s.channels, &s.series).unwrap();
    let base = scan[1].1;
    for (r, q) in scan {
        assert!((q * r * r - base).abs() < 1e-12 * base, "{r}");
    }
}

#[test]
fn cryogenic_limit_is_ground_state() {
    let s = setup();
    let model = ThermalModel::new(&s.eig, 60).unwrap();
    let ground = isc_rates(s.sigma, &s.params, &s.channels, &s.series).unwrap();
    let cold = thermal_rates(0.0, s.sigma, &s.params, &model, &s.series).unwrap();
    assert!((cold.total() - ground.total()).abs() < 1e-12 * ground.total());
    assert!((cold.gamma_z - ground.gamma_z).abs() < 1e-12 * ground.gamma_z);
    let near = thermal_rates(1.0, s.sigma, &s.params, &model, &s.series).unwrap();
    assert!((near.total() - ground.total()).abs() < 1e-9 * ground.total());
}

#[test]
fn total_rate_does_not_decrease_with_temperature() {
    let s = setup();
    let model = ThermalModel::new(&s.eig, 60).unwrap();
    let mut last = 0.0;
    for t in (0..=70).map(|i| 5.0 * i as f64) {
        let total = thermal_rates(t, s.sigma, &s.params, &model, &s.series)
            .unwrap()
            .total();
        assert!(total >= last * (1.0 - 1e-12), "{t} K: {total} < {last}");
        last = total;
    }
}

#[test]
fn too_few_levels_is_a_truncation_error() {
    let s = setup();
    let model = ThermalModel::new(&s.eig, 3).unwrap();
    let err = thermal_rates(300.0, s.sigma, &s.params, &model, &s.series).unwrap_err();
    assert!(matches!(err, Error::Truncation { excluded } if excluded > 1e-4));
    let (_, excluded) = ThermalModel::new(&s.eig, 60).unwrap().populations(350.0);
    assert!(excluded < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rates_scale_with_coupling_squared(
        lz in 0.1f64..60.0,
        lp in 0.1f64..60.0,
        k in 0.1f64..5.0,
        gap in 250.0f64..600.0,
    ) {
        let s = setup();
        let p = ModelParams { axial_soc_ghz: lz, transverse_soc_ghz: lp, ..s.params.clone() };
        let q = ModelParams { axial_soc_ghz: k * lz, transverse_soc_ghz: k * lp, ..s.params.clone() };
        let a = isc_rates(gap, &p, &s.channels, &s.series).unwrap();
        let b = isc_rates(gap, &q, &s.channels, &s.series).unwrap();
        let k2 = k * k;
        prop_assert!((b.gamma_z - k2 * a.gamma_z).abs() <= 1e-12 * b.gamma_z.abs().max(1e-300));
        prop_assert!((b.gamma_plus - k2 * a.gamma_plus).abs() <= 1e-12 * b.gamma_plus.abs().max(1e-300));
        prop_assert!((b.gamma_minus - k2 * a.gamma_minus).abs() <= 1e-12 * b.gamma_minus.abs().max(1e-300));
    }

    #[test]
    fn autoconvolution_conserves_mass(fwhm in 5.0f64..80.0, n in 0usize..=10, gamma: bool) {
        let shape = if gamma {
            SpectralShape::Gamma { mean: 66.1, fwhm }
        } else {
            SpectralShape::Gaussian { center: 66.1, fwhm }
        };
        let s = SpectralFunction::from_shape(shape, 0.5).unwrap().autoconvolve(n);
        prop_assert!((s.integral() - 1.0).abs() < 1e-6);
        prop_assert!(s.values().iter().all(|&v| v >= 0.0));
    }
}
