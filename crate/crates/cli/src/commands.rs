//! The CLI verbs.

use std::path::PathBuf;

use nvsinglet_core::coefficients::{CoefficientKind, StateCoefficients};
use nvsinglet_core::isc::{
    isc_rates, rate_crossings, thermal_rates, ChannelWeights, RateSet, ThermalModel,
};
use nvsinglet_core::params::{self, ModelParams};
use nvsinglet_core::spectra::{
    hr_absorption, pl_lines, pl_spectrum, zpl_amplitude, Polarization, Sideband, SpectrumGrid,
};
use nvsinglet_core::vibronic::Manifold;
use nvsinglet_core::{
    extract_coefficients, solve, Error, SpectralFunction, SpectralSeries, VibronicEigensystem,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{Cell, RunWriter, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    Pl,
    Abs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IscMode {
    Rates,
    Scan,
    Lambda,
    Temperature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    DeriveParams,
    Solve,
    Spectrum(SpectrumKind),
    Isc(IscMode),
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::DeriveParams => "derive-params",
            Command::Solve => "solve",
            Command::Spectrum(SpectrumKind::Pl) => "spectrum pl",
            Command::Spectrum(SpectrumKind::Abs) => "spectrum abs",
            Command::Isc(IscMode::Rates) => "isc rates",
            Command::Isc(IscMode::Scan) => "isc scan",
            Command::Isc(IscMode::Lambda) => "isc lambda",
            Command::Isc(IscMode::Temperature) => "isc temperature",
        }
    }
}

/// Runs `command` and returns the files written, `meta.json` last.
pub fn run(command: Command, config: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut w = RunWriter::new(config, command.name())?;
    match command {
        Command::DeriveParams => derive_params(config, &mut w)?,
        Command::Solve => solve_cmd(config, &mut w)?,
        Command::Spectrum(SpectrumKind::Pl) => spectrum_pl(config, &mut w)?,
        Command::Spectrum(SpectrumKind::Abs) => spectrum_abs(config, &mut w)?,
        Command::Isc(mode) => isc(config, mode, &mut w)?,
    }
    w.finish()
}

/// Config parameters with Λ_e fitted to the target ZPL when the config leaves it open.
pub fn resolved_params(config: &RunConfig) -> Result<ModelParams> {
    let mut p = config.base_params()?;
    if config.model.electronic_gap.is_none() {
        p.electronic_gap = params::fit_electronic_gap(p.target_zpl, &p)?;
    }
    Ok(p)
}

fn record_params(w: &mut RunWriter<'_>, p: &ModelParams) {
    w.resolve("coupling_meV", p.coupling);
    w.resolve("c2", p.c2);
    w.resolve("electronic_gap_meV", p.electronic_gap);
}

fn derive_params(config: &RunConfig, w: &mut RunWriter<'_>) -> Result<()> {
    let m = &config.model;
    let p = resolved_params(config)?;
    let eig = solve(&p)?;
    let zpl = eig.zpl_energy()?;
    record_params(w, &p);
    w.resolve("zpl_meV", zpl);

    let mut t = Table::new(&["quantity", "source", "formula", "value"]);
    let mut row = |q: &str, src: &str, f: &str, v: f64| {
        t.push(vec![q.into(), src.into(), f.into(), v.into()]);
    };
    row("phonon_energy_meV", "config", "", m.phonon_energy);
    row("jt_energy_meV", "config", "", m.jt_energy);
    match m.overlap {
        Some(o) => {
            row("overlap_s", "config", "", o.s);
            row("overlap_p", "config", "", o.p);
            row("c2", "derived", "1 - 2 p^2 s^2", p.c2);
        }
        None => row("c2", "config", "", p.c2),
    }
    match m.coupling {
        Some(_) => row("coupling_meV", "config", "", p.coupling),
        None => row(
            "coupling_meV",
            "derived",
            "sqrt(2 hw E_JT) / (1 + C2)",
            p.coupling,
        ),
    }
    row("pjt_coupling_meV", "derived", "2 C2 F", p.pjt_coupling());
    row(
        "djt_coupling_meV",
        "derived",
        "(1 - C2) F",
        p.djt_coupling(),
    );
    row("target_zpl_meV", "config", "", p.target_zpl);
    match m.electronic_gap {
        Some(_) => row("electronic_gap_meV", "config", "", p.electronic_gap),
        None => row(
            "electronic_gap_meV",
            "fitted",
            "ZPL(gap) = target_zpl",
            p.electronic_gap,
        ),
    }
    row("zpl_meV", "computed", "E(upper A1) - E(lower E)", zpl);
    row(
        "huang_rhys",
        "derived",
        "R^2 / 2",
        absorption_huang_rhys(config)?,
    );

    for r in &t.rows {
        let cells: Vec<String> = r
            .iter()
            .map(|c| match c {
                Cell::Num(x) => format!("{x:.6}"),
                Cell::Text(s) => s.clone(),
                _ => String::new(),
            })
            .collect();
        println!(
            "{:<22} {:<9} {:<28} {}",
            cells[0], cells[1], cells[2], cells[3]
        );
    }
    w.table("params", &t)?;
    Ok(())
}

fn manifold_name(m: Manifold) -> &'static str {
    match m {
        Manifold::Lower => "lower",
        Manifold::Upper => "upper",
    }
}

fn solve_cmd(config: &RunConfig, w: &mut RunWriter<'_>) -> Result<()> {
    let p = resolved_params(config)?;
    let eig = solve(&p)?;
    record_params(w, &p);
    w.resolve("states", eig.len());

    let ground = eig.energies()[0];
    let mut levels = Table::new(&[
        "level",
        "first_state",
        "energy_meV",
        "relative_meV",
        "irrep",
        "degeneracy",
        "manifold",
        "a1_weight",
    ]);
    for (i, l) in eig.levels().into_iter().enumerate() {
        levels.push(vec![
            i.into(),
            l.first.into(),
            l.energy.into(),
            (l.energy - ground).into(),
            l.irrep.name().into(),
            l.irrep.dim().into(),
            manifold_name(l.manifold).into(),
            eig.a1_weight(l.first).into(),
        ]);
    }
    w.table("levels", &levels)?;

    // Coefficient sums need both manifolds; a basis too small to hold them only gets the levels.
    match extract_coefficients(&eig) {
        Ok(table) => {
            w.resolve("zpl_meV", eig.zpl_energy()?);
            w.resolve("a1_spacing_meV", eig.a1_spacing().ok());
            w.resolve("pjt_relaxation_meV", eig.pjt_relaxation(&p)?);
            w.resolve("zpl_amplitude", zpl_amplitude(&table, p.dipole));
            let mut coeffs = Table::new(&[
                "state",
                "energy_meV",
                "irrep",
                "n",
                "c_sq",
                "d_sq",
                "f_sq",
                "g_sq",
                "c_prime_sq",
                "d_prime_sq",
            ]);
            let named = [
                ("ground", &table.ground),
                ("first_a1", &table.first_a1),
                ("emitter", &table.emitter),
            ];
            for (name, s) in named {
                push_coefficients(&mut coeffs, name.to_owned(), s, table.n_max);
            }
            for (i, s) in table.levels.iter().enumerate() {
                push_coefficients(&mut coeffs, format!("level_{i}"), s, table.n_max);
            }
            w.table("coefficients", &coeffs)?;
        }
        Err(Error::MissingState(_)) => {}
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn push_coefficients(t: &mut Table, name: String, s: &StateCoefficients, n_max: usize) {
    use CoefficientKind::*;
    for n in 0..=n_max {
        let mut row: Vec<Cell> = vec![
            name.clone().into(),
            s.energy.into(),
            s.label.irrep.name().into(),
            n.into(),
        ];
        row.extend([C, D, F, G, CPrime, DPrime].map(|k| Cell::from(s.sum(k, n))));
        t.push(row);
    }
}

fn spectrum_table(s: &SpectrumGrid) -> Table {
    let mut t = Table::new(&["energy_meV", "intensity"]);
    for (&x, &y) in s.energies.iter().zip(&s.intensities) {
        t.push(vec![x.into(), y.into()]);
    }
    t
}

fn spectrum_pl(config: &RunConfig, w: &mut RunWriter<'_>) -> Result<()> {
    let p = resolved_params(config)?;
    let eig = solve(&p)?;
    record_params(w, &p);
    let grid = RunConfig::grid(&config.pl.grid);
    let spectrum = pl_spectrum(&eig, &p, &config.pl.widths, &grid)?;
    // Sideband maximum, searched past five zero-phonon widths.
    let peak = spectrum.argmax_in(5.0 * config.pl.widths[0], grid.max);
    w.resolve("sideband_maximum_meV", peak);
    w.table("pl", &spectrum_table(&spectrum))?;

    let mut lines = Table::new(&["shift_meV", "intensity", "irrep", "first_state"]);
    for l in pl_lines(&eig, &p, Polarization::X)? {
        lines.push(vec![
            l.shift.into(),
            l.intensity.into(),
            l.irrep.name().into(),
            l.state.into(),
        ]);
    }
    w.table("pl_lines", &lines)?;
    Ok(())
}

fn absorption_huang_rhys(config: &RunConfig) -> Result<f64> {
    let a = &config.absorption;
    Ok(match a.huang_rhys {
        Some(s) => s,
        None => params::huang_rhys_factor(a.displacement)?,
    })
}

fn spectrum_abs(config: &RunConfig, w: &mut RunWriter<'_>) -> Result<()> {
    let a = &config.absorption;
    let s = absorption_huang_rhys(config)?;
    w.resolve("huang_rhys", s);
    let sideband = if a.broad {
        Sideband::Broad {
            shape: config.shape(a.phonon_energy),
            step: config.spectral.step,
        }
    } else {
        Sideband::Discrete
    };
    let grid = RunConfig::grid(&a.grid);
    let spectrum = hr_absorption(s, a.phonon_energy, a.smearing, sideband, &grid)?;
    w.resolve(
        "first_sideband_maximum_meV",
        spectrum.first_peak_after(3.0 * a.smearing),
    );
    w.table("absorption", &spectrum_table(&spectrum))?;
    Ok(())
}

/// Everything the rate verbs share: model, ground-state channels and the multi-phonon densities.
struct IscSetup {
    params: ModelParams,
    eig: VibronicEigensystem,
    channels: ChannelWeights,
    series: SpectralSeries,
}

fn isc_setup(config: &RunConfig) -> Result<IscSetup> {
    let params = resolved_params(config)?;
    let eig = solve(&params)?;
    let table = extract_coefficients(&eig)?;
    let base =
        SpectralFunction::from_shape(config.shape(params.phonon_energy), config.spectral.step)?;
    Ok(IscSetup {
        series: SpectralSeries::new(&base, params.n_max),
        channels: ChannelWeights::for_state(&table.ground),
        params,
        eig,
    })
}

/// Σ from the config, or the largest gap in the scan range where the cryogenic rate hits the reference.
fn singlet_triplet_gap(config: &RunConfig, s: &IscSetup) -> Result<f64> {
    if let Some(g) = config.isc.singlet_triplet_gap {
        return Ok(g);
    }
    let r = &config.isc.scan;
    let crossings = rate_crossings(
        config.isc.reference_rate_mhz,
        (r.min, r.max, r.step),
        &s.params,
        &s.channels,
        &s.series,
    )?;
    Ok(crossings.last().copied().ok_or(Error::NoBracket {
        low: r.min,
        high: r.max,
    })?)
}

const RATE_COLUMNS: [&str; 4] = ["Gamma_z_MHz", "Gamma_pm_MHz", "Gamma_mp_MHz", "lifetime_ns"];

fn rate_table(key: &'static str) -> Table {
    let mut columns = vec![key];
    columns.extend(RATE_COLUMNS);
    Table::new(&columns)
}

fn rate_row(x: f64, r: &RateSet) -> Vec<Cell> {
    vec![
        x.into(),
        r.gamma_z.into(),
        r.gamma_plus.into(),
        r.gamma_minus.into(),
        r.lifetime_ns().into(),
    ]
}

fn isc(config: &RunConfig, mode: IscMode, w: &mut RunWriter<'_>) -> Result<()> {
    let s = isc_setup(config)?;
    record_params(w, &s.params);
    let (p, ch, series) = (&s.params, &s.channels, &s.series);
    match mode {
        IscMode::Rates => {
            let gap = singlet_triplet_gap(config, &s)?;
            w.resolve("singlet_triplet_gap_meV", gap);
            let r = isc_rates(gap, p, ch, series)?;
            w.resolve("gamma_z_over_gamma_perp", r.axial_to_transverse());
            let mut t = rate_table("Sigma_meV");
            t.push(rate_row(gap, &r));
            w.table("rates", &t)?;
        }
        IscMode::Scan => {
            let r = &config.isc.scan;
            let rows = r
                .points()
                .into_par_iter()
                .map(|g| isc_rates(g, p, ch, series).map(|rates| rate_row(g, &rates)))
                .collect::<Result<Vec<_>, Error>>()?;
            let mut t = rate_table("Sigma_meV");
            rows.into_iter().for_each(|row| t.push(row));
            w.table("rates_vs_sigma", &t)?;

            let mut c = Table::new(&["target_MHz", "Sigma_meV"]);
            let found = config
                .isc
                .targets_mhz
                .par_iter()
                .map(|&target| {
                    rate_crossings(target, (r.min, r.max, r.step), p, ch, series)
                        .map(|x| (target, x))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            for (target, gaps) in found {
                if gaps.is_empty() {
                    println!("{target} MHz: no crossing in [{}, {}] meV", r.min, r.max);
                    c.push(vec![target.into(), Cell::Missing]);
                }
                for g in gaps {
                    println!("{target} MHz: Sigma = {g:.2} meV");
                    c.push(vec![target.into(), g.into()]);
                }
            }
            w.table("crossings", &c)?;
        }
        IscMode::Lambda => {
            let gap = singlet_triplet_gap(config, &s)?;
            w.resolve("singlet_triplet_gap_meV", gap);
            let rows = config
                .isc
                .ratios
                .par_iter()
                .map(|&ratio| {
                    let q = ModelParams {
                        transverse_soc_ghz: ratio * p.axial_soc_ghz,
                        ..p.clone()
                    };
                    isc_rates(gap, &q, ch, series).map(|r| {
                        vec![
                            ratio.into(),
                            q.transverse_soc_ghz.into(),
                            r.gamma_z.into(),
                            r.gamma_perp().into(),
                            r.axial_to_transverse().into(),
                        ]
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let mut t = Table::new(&[
                "lambda_ratio",
                "lambda_perp_GHz",
                "Gamma_z_MHz",
                "Gamma_perp_MHz",
                "Gamma_z_over_Gamma_perp",
            ]);
            rows.into_iter().for_each(|row| t.push(row));
            w.table("lambda_ratio", &t)?;
        }
        IscMode::Temperature => {
            let gap = singlet_triplet_gap(config, &s)?;
            w.resolve("singlet_triplet_gap_meV", gap);
            let model = ThermalModel::new(&s.eig, config.isc.thermal_levels)?;
            w.resolve("thermal_states", model.states.len());
            let rows = config
                .isc
                .temperatures
                .points()
                .into_par_iter()
                .map(|t| thermal_rates(t, gap, p, &model, series).map(|r| rate_row(t, &r)))
                .collect::<Result<Vec<_>, Error>>()?;
            let mut t = rate_table("T_K");
            rows.into_iter().for_each(|row| t.push(row));
            w.table("rates_vs_temperature", &t)?;
        }
    }
    Ok(())
}
