//! Decomposition of vibronic states into electronic ⊗ symmetry-adapted phonon products.
//!
//! For an E state the components are named
//! `c` (¹E ⊗ A₁ phonons), `d` (¹A₁ ⊗ E phonons), `f` (¹E ⊗ E phonons) and
//! `g` (¹E ⊗ A₂ phonons); for an A₁ state `c′` (¹A₁ ⊗ A₁ phonons) and
//! `d′` (¹E ⊗ E phonons).

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DVector, Vector3};

use crate::error::{Error, Result};
use crate::symmetry::{electronic_a1, electronic_e_pair, AdaptedShell, Irrep};
use crate::vibronic::{Manifold, Partner, StateLabel, VibronicEigensystem, PROJECTION_TOL};

/// Number of levels reported by [`extract_coefficients`].
pub const REPORTED_LEVELS: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElectronicPart {
    /// The ¹E pair.
    E,
    /// The ¹A₁ state.
    A1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientKind {
    C,
    D,
    F,
    G,
    CPrime,
    DPrime,
}

impl CoefficientKind {
    pub const fn parts(self) -> (ElectronicPart, Irrep) {
        match self {
            CoefficientKind::C => (ElectronicPart::E, Irrep::A1),
            CoefficientKind::D => (ElectronicPart::A1, Irrep::E),
            CoefficientKind::F => (ElectronicPart::E, Irrep::E),
            CoefficientKind::G => (ElectronicPart::E, Irrep::A2),
            CoefficientKind::CPrime => (ElectronicPart::A1, Irrep::A1),
            CoefficientKind::DPrime => (ElectronicPart::E, Irrep::E),
        }
    }
}

fn irrep_slot(irrep: Irrep) -> usize {
    match irrep {
        Irrep::A1 => 0,
        Irrep::A2 => 1,
        Irrep::E => 2,
    }
}

/// Weights of one phonon shell split by electronic part and phonon irrep.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ShellWeights {
    e: [f64; 3],
    a1: [f64; 3],
}

impl ShellWeights {
    pub fn get(&self, electronic: ElectronicPart, phonon: Irrep) -> f64 {
        match electronic {
            ElectronicPart::E => self.e[irrep_slot(phonon)],
            ElectronicPart::A1 => self.a1[irrep_slot(phonon)],
        }
    }

    pub fn electronic(&self, electronic: ElectronicPart) -> f64 {
        match electronic {
            ElectronicPart::E => self.e.iter().sum(),
            ElectronicPart::A1 => self.a1.iter().sum(),
        }
    }

    pub fn total(&self) -> f64 {
        self.electronic(ElectronicPart::E) + self.electronic(ElectronicPart::A1)
    }
}

/// Signed overlap with one coupled product function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitude {
    pub shell: usize,
    pub electronic: ElectronicPart,
    pub phonon: Irrep,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateCoefficients {
    pub state: usize,
    /// Energy above the lowest E doublet, meV.
    pub energy: f64,
    pub label: StateLabel,
    pub manifold: Manifold,
    /// Projector weights, indexed by phonon number.
    pub shells: Vec<ShellWeights>,
    /// Overlaps with the symmetry-adapted product functions of the same symmetry.
    pub amplitudes: Vec<Amplitude>,
}

impl StateCoefficients {
    pub fn weight(&self, electronic: ElectronicPart, phonon: Irrep, n: usize) -> f64 {
        self.shells
            .get(n)
            .map_or(0.0, |s| s.get(electronic, phonon))
    }

    /// Shell sum of a named coefficient, e.g. `Σ_{n_i = n} c_i²`.
    pub fn sum(&self, kind: CoefficientKind, n: usize) -> f64 {
        let (electronic, phonon) = kind.parts();
        self.weight(electronic, phonon, n)
    }

    pub fn electronic_weight(&self, electronic: ElectronicPart) -> f64 {
        self.shells.iter().map(|s| s.electronic(electronic)).sum()
    }

    pub fn total(&self) -> f64 {
        self.shells.iter().map(ShellWeights::total).sum()
    }

    /// Signed amplitudes of one kind in shell `n`, in adapted-basis order.
    pub fn amplitudes_of(&self, electronic: ElectronicPart, phonon: Irrep, n: usize) -> Vec<f64> {
        self.amplitudes
            .iter()
            .filter(|a| a.shell == n && a.electronic == electronic && a.phonon == phonon)
            .map(|a| a.value)
            .collect()
    }

    pub fn amplitude_norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.value * a.value).sum()
    }
}

/// Electronic components of a product-space vector, projected onto phonon space.
struct Components {
    a1: DVector<f64>,
    ex: DVector<f64>,
    ey: DVector<f64>,
}

fn components(
    eig: &VibronicEigensystem,
    k: usize,
    pair: &(Vector3<f64>, Vector3<f64>),
) -> Components {
    let d = eig.basis().len();
    let v = eig.vector(k);
    let project = |u: &Vector3<f64>| {
        DVector::from_fn(d, |p, _| {
            u[0] * v[p] + u[1] * v[d + p] + u[2] * v[2 * d + p]
        })
    };
    Components {
        a1: project(&electronic_a1()),
        ex: project(&pair.0),
        ey: project(&pair.1),
    }
}

/// Decomposes eigenstate `k` of `eig`.
pub fn state_coefficients(eig: &VibronicEigensystem, k: usize) -> Result<StateCoefficients> {
    let adapted: Vec<AdaptedShell> = (0..=eig.basis().n_max())
        .map(|n| eig.symmetry().adapted_shell(n))
        .collect();
    decompose(eig, k, &adapted)
}

fn decompose(
    eig: &VibronicEigensystem,
    k: usize,
    adapted: &[AdaptedShell],
) -> Result<StateCoefficients> {
    let sym = eig.symmetry();
    let pair = electronic_e_pair(sym);
    let comps = components(eig, k, &pair);
    let label = eig.label(k);
    let basis = eig.basis();

    let mut shells = Vec::with_capacity(adapted.len());
    let mut amplitudes = Vec::new();
    for (n, shell_basis) in adapted.iter().enumerate() {
        let range = basis.shell(n);
        let a1 = comps.a1.rows(range.start, range.len()).into_owned();
        let ex = comps.ex.rows(range.start, range.len()).into_owned();
        let ey = comps.ey.rows(range.start, range.len()).into_owned();

        let mut weights = ShellWeights::default();
        for irrep in Irrep::ALL {
            let slot = irrep_slot(irrep);
            weights.a1[slot] = sym.project_shell(irrep, n, &a1).norm_squared();
            weights.e[slot] = sym.project_shell(irrep, n, &ex).norm_squared()
                + sym.project_shell(irrep, n, &ey).norm_squared();
        }
        shells.push(weights);

        let mut push = |electronic, phonon, value| {
            amplitudes.push(Amplitude {
                shell: n,
                electronic,
                phonon,
                value,
            })
        };
        use ElectronicPart as El;
        match (label.irrep, label.partner) {
            (Irrep::A1, _) => {
                for chi in &shell_basis.a1 {
                    push(El::A1, Irrep::A1, a1.dot(chi));
                }
                for (cx, cy) in &shell_basis.e {
                    push(El::E, Irrep::E, (ex.dot(cx) + ey.dot(cy)) * FRAC_1_SQRT_2);
                }
            }
            (Irrep::A2, _) => {
                for chi in &shell_basis.a2 {
                    push(El::A1, Irrep::A2, a1.dot(chi));
                }
                for (cx, cy) in &shell_basis.e {
                    push(El::E, Irrep::E, (ex.dot(cy) - ey.dot(cx)) * FRAC_1_SQRT_2);
                }
            }
            (Irrep::E, partner) => {
                let is_x = partner != Some(Partner::Y);
                let (own, other) = if is_x { (&ex, &ey) } else { (&ey, &ex) };
                for chi in &shell_basis.a1 {
                    push(El::E, Irrep::A1, own.dot(chi));
                }
                for chi in &shell_basis.a2 {
                    push(El::E, Irrep::A2, other.dot(chi));
                }
                for (cx, cy) in &shell_basis.e {
                    let (d, f) = if is_x {
                        (a1.dot(cx), (ex.dot(cx) - ey.dot(cy)) * FRAC_1_SQRT_2)
                    } else {
                        (a1.dot(cy), -(ex.dot(cy) + ey.dot(cx)) * FRAC_1_SQRT_2)
                    };
                    push(El::A1, Irrep::E, d);
                    push(El::E, Irrep::E, f);
                }
            }
        }
    }

    let ground = eig.energies()[eig.ground_e()?];
    let out = StateCoefficients {
        state: k,
        energy: eig.energies()[k] - ground,
        label,
        manifold: eig.manifold(k),
        shells,
        amplitudes,
    };
    let residual = (out.total() - 1.0)
        .abs()
        .max((out.amplitude_norm() - 1.0).abs());
    if residual > PROJECTION_TOL {
        return Err(Error::Labeling { residual });
    }
    Ok(out)
}

/// Coefficients of the states that enter the lineshape and rate models.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    pub n_max: usize,
    /// Mirror-even partner of the lower-manifold ground doublet.
    pub ground: StateCoefficients,
    /// First A₁ level of the lower manifold.
    pub first_a1: StateCoefficients,
    /// Ground state of the upper manifold.
    pub emitter: StateCoefficients,
    /// Lowest [`REPORTED_LEVELS`] levels, one representative state each.
    pub levels: Vec<StateCoefficients>,
}

pub fn extract_coefficients(eig: &VibronicEigensystem) -> Result<CoefficientTable> {
    let adapted: Vec<AdaptedShell> = (0..=eig.basis().n_max())
        .map(|n| eig.symmetry().adapted_shell(n))
        .collect();
    let levels = eig
        .levels()
        .into_iter()
        .take(REPORTED_LEVELS)
        .map(|l| decompose(eig, l.first, &adapted))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientTable {
        n_max: eig.basis().n_max(),
        ground: decompose(eig, eig.ground_e()?, &adapted)?,
        first_a1: decompose(eig, eig.first_lower_a1()?, &adapted)?,
        emitter: decompose(eig, eig.ground_a1()?, &adapted)?,
        levels,
    })
}
