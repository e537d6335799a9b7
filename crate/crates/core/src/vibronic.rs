//! Vibronic Hamiltonian, its eigensystem and C₃ᵥ labels.
//!
//! Product-space vectors are stored electronic-index major: component
//! `e * d + p` pairs electronic state `e` of (|xx⟩, |xy⟩, |yy⟩) with phonon
//! basis state `p`, `d` being the phonon basis size.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector, DVectorView, Matrix3};
#[allow(unused_imports)] // shadowed by the inherent std methods in test builds
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{build_basis, position, BosonBasis, Mode, OperatorMatrix, Structure};
use crate::linalg::{fix_sign, symmetric_eigen};
use crate::params::ModelParams;
use crate::symmetry::{GroupElement, Irrep, SymmetryOps};

/// Largest phonon truncation accepted by [`build_hamiltonian`].
pub const MAX_TRUNCATION: usize = 40;
/// Eigenvalues closer than this (meV) are treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Allowed deviation of projector eigenvalues from their ideal integers.
pub const PROJECTION_TOL: f64 = 1e-6;

/// Electronic operators on (|xx⟩, |xy⟩, |yy⟩).
pub mod electronic {
    use super::*;

    /// Λ_e/2-scaled projector onto ¹A₁ (without the Λ_e factor).
    pub fn gap() -> Matrix3<f64> {
        Matrix3::new(0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.5)
    }

    /// Couples ¹E_x ↔ ¹A₁.
    pub fn sigma_z() -> Matrix3<f64> {
        Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 0.0, -1.0))
    }

    /// Couples ¹E_y ↔ ¹A₁.
    pub fn sigma_x() -> Matrix3<f64> {
        let h = FRAC_1_SQRT_2;
        Matrix3::new(0.0, h, 0.0, h, 0.0, h, 0.0, h, 0.0)
    }

    /// |E_x⟩⟨E_x| − |E_y⟩⟨E_y| inside the ¹E pair.
    pub fn djt_z() -> Matrix3<f64> {
        Matrix3::new(0.5, 0.0, -0.5, 0.0, -1.0, 0.0, -0.5, 0.0, 0.5)
    }

    /// |E_x⟩⟨E_y| + |E_y⟩⟨E_x| inside the ¹E pair.
    pub fn djt_x() -> Matrix3<f64> {
        let h = FRAC_1_SQRT_2;
        Matrix3::new(0.0, h, 0.0, h, 0.0, -h, 0.0, -h, 0.0)
    }
}

/// Electron-phonon Hamiltonian in meV.
///
/// `H = Λ_e P_A1 + ħω(n_x + n_y + 1) + C²·2F(σ_z X − σ_x Y) + (1 − C²)F(σ̄_z X + σ̄_x Y)`,
/// with `σ̄` acting inside the ¹E pair. The sign in front of `σ̄_x Y` is the one
/// that commutes with the C₃ᵥ action of [`SymmetryOps`].
pub fn build_hamiltonian(params: &ModelParams, basis: &BosonBasis) -> Result<OperatorMatrix> {
    params.validate()?;
    if basis.n_max() > MAX_TRUNCATION {
        return Err(Error::BasisTooLarge {
            n_max: basis.n_max(),
            limit: MAX_TRUNCATION,
        });
    }
    let d = basis.len();
    let x = position(basis, Mode::X).into_matrix();
    let y = position(basis, Mode::Y).into_matrix();
    let (pjt, djt) = (params.pjt_coupling(), params.djt_coupling());
    let along_x = electronic::sigma_z() * pjt + electronic::djt_z() * djt;
    let along_y = electronic::sigma_x() * -pjt + electronic::djt_x() * djt;
    let gap = electronic::gap() * params.electronic_gap;

    let mut h = DMatrix::zeros(3 * d, 3 * d);
    for e in 0..3 {
        for f in 0..3 {
            let mut block = h.view_mut((e * d, f * d), (d, d));
            if along_x[(e, f)] != 0.0 {
                block += &x * along_x[(e, f)];
            }
            if along_y[(e, f)] != 0.0 {
                block += &y * along_y[(e, f)];
            }
            if gap[(e, f)] != 0.0 {
                for p in 0..d {
                    block[(p, p)] += gap[(e, f)];
                }
            }
            if e == f {
                for (p, occ) in basis.states().iter().enumerate() {
                    block[(p, p)] += params.phonon_energy * (occ.total() + 1) as f64;
                }
            }
        }
    }
    Ok(OperatorMatrix::new(h, Structure::Symmetric))
}

/// Which of the two vibronic families a state belongs to, by its ¹A₁ electronic weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Manifold {
    /// ¹Ẽ family, dominated by the electronic ¹E pair.
    Lower,
    /// ¹Ã₁ family.
    Upper,
}

/// Partner of an E doublet: `X` is mirror-even, `Y` is generated from it by C₃.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Partner {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateLabel {
    pub irrep: Irrep,
    pub partner: Option<Partner>,
}

/// A degenerate level: one A state or both partners of an E doublet.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub first: usize,
    pub irrep: Irrep,
    pub energy: f64,
    pub manifold: Manifold,
}

impl Level {
    pub fn states(&self) -> core::ops::Range<usize> {
        self.first..self.first + self.irrep.dim()
    }
}

#[derive(Clone, Debug)]
pub struct VibronicEigensystem {
    basis: BosonBasis,
    symmetry: SymmetryOps,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
    labels: Vec<StateLabel>,
    a1_weights: Vec<f64>,
}

/// Diagonalizes `h` and attaches C₃ᵥ labels.
///
/// Degenerate clusters are re-diagonalized inside the span of the irrep
/// projectors; E doublets are rotated so that the first partner is mirror-even
/// and the second is its C₃ image in vector form.
pub fn diagonalize(h: &OperatorMatrix, basis: &BosonBasis) -> Result<VibronicEigensystem> {
    let dim = h.dim();
    assert_eq!(dim, 3 * basis.len(), "Hamiltonian does not match the basis");
    let eig = symmetric_eigen(h.matrix())?;
    let symmetry = SymmetryOps::new(basis);

    let mut energies = Vec::with_capacity(dim);
    let mut labels = Vec::with_capacity(dim);
    let mut vectors = DMatrix::zeros(dim, dim);
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && eig.values[end] - eig.values[end - 1] < DEGENERACY_TOL {
            end += 1;
        }
        let energy = eig.values[start..end].iter().sum::<f64>() / (end - start) as f64;
        let cluster: Vec<DVector<f64>> = (start..end)
            .map(|k| eig.vectors.column(k).into_owned())
            .collect();
        for (offset, (label, v)) in label_cluster(&symmetry, cluster)?.into_iter().enumerate() {
            vectors.set_column(start + offset, &v);
            labels.push(label);
            energies.push(energy);
        }
        start = end;
    }

    let d = basis.len();
    let a1_weights = (0..dim)
        .map(|k| {
            let v = vectors.column(k);
            (0..d)
                .map(|p| {
                    let a = (v[p] + v[2 * d + p]) * FRAC_1_SQRT_2;
                    a * a
                })
                .sum()
        })
        .collect();

    Ok(VibronicEigensystem {
        basis: basis.clone(),
        symmetry,
        energies,
        vectors,
        labels,
        a1_weights,
    })
}

fn label_cluster(
    symmetry: &SymmetryOps,
    cluster: Vec<DVector<f64>>,
) -> Result<Vec<(StateLabel, DVector<f64>)>> {
    let m = cluster.len();
    let q = DMatrix::from_columns(&cluster);
    let mut weighted = DMatrix::zeros(m, m);
    let mut completeness = DMatrix::zeros(m, m);
    for (code, irrep) in Irrep::ALL.iter().enumerate() {
        let projected = DMatrix::from_columns(
            &cluster
                .iter()
                .map(|v| symmetry.project(*irrep, v))
                .collect::<Vec<_>>(),
        );
        let overlap = q.transpose() * projected;
        weighted += &overlap * (code + 1) as f64;
        completeness += overlap;
    }
    let residual = (completeness - DMatrix::identity(m, m)).amax();
    if residual > PROJECTION_TOL {
        return Err(Error::Labeling { residual });
    }
    let sym = (&weighted + weighted.transpose()) * 0.5;
    let inner = symmetric_eigen(&sym)?;

    let mut groups: [Vec<DVector<f64>>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (k, &value) in inner.values.iter().enumerate() {
        let code = value.round();
        let residual = (value - code).abs();
        if residual > PROJECTION_TOL || !(1.0..=3.0).contains(&code) {
            return Err(Error::Labeling { residual });
        }
        let mut v = &q * inner.vectors.column(k);
        fix_sign(&mut v);
        groups[code as usize - 1].push(v);
    }

    let mut out = Vec::with_capacity(m);
    for (irrep, group) in [Irrep::A1, Irrep::A2].into_iter().zip(&groups[..2]) {
        out.extend(group.iter().map(|v| {
            (
                StateLabel {
                    irrep,
                    partner: None,
                },
                v.clone(),
            )
        }));
    }

    let doublets = &groups[2];
    if doublets.len() % 2 != 0 {
        return Err(Error::Labeling { residual: 1.0 });
    }
    if !doublets.is_empty() {
        let w = DMatrix::from_columns(doublets);
        let mirrored = DMatrix::from_columns(
            &doublets
                .iter()
                .map(|v| symmetry.apply(GroupElement::new(0, true), v))
                .collect::<Vec<_>>(),
        );
        let s = w.transpose() * mirrored;
        let s = (&s + s.transpose()) * 0.5;
        let split = symmetric_eigen(&s)?;
        let half = doublets.len() / 2;
        for k in half..doublets.len() {
            let residual = (split.values[k] - 1.0).abs();
            if residual > PROJECTION_TOL {
                return Err(Error::Labeling { residual });
            }
            let mut x = &w * split.vectors.column(k);
            fix_sign(&mut x);
            let rotated = symmetry.apply(GroupElement::new(1, false), &x);
            let y = (rotated + &x * 0.5) * (2.0 / 3f64.sqrt());
            let residual = (y.norm() - 1.0).abs().max(x.dot(&y).abs());
            if residual > PROJECTION_TOL {
                return Err(Error::Labeling { residual });
            }
            // Back into the cluster span, which is orthogonal to every other eigenvector.
            let mut y = &q * (q.transpose() * y);
            for (_, u) in &out {
                y -= u * u.dot(&y);
            }
            y -= &x * x.dot(&y);
            y /= y.norm();
            out.push((
                StateLabel {
                    irrep: Irrep::E,
                    partner: Some(Partner::X),
                },
                x,
            ));
            out.push((
                StateLabel {
                    irrep: Irrep::E,
                    partner: Some(Partner::Y),
                },
                y,
            ));
        }
    }
    Ok(out)
}

/// Builds the basis and Hamiltonian for `params` and diagonalizes it.
pub fn solve(params: &ModelParams) -> Result<VibronicEigensystem> {
    let basis = build_basis(params.n_max);
    let h = build_hamiltonian(params, &basis)?;
    diagonalize(&h, &basis)
}

impl VibronicEigensystem {
    pub fn basis(&self) -> &BosonBasis {
        &self.basis
    }

    pub fn symmetry(&self) -> &SymmetryOps {
        &self.symmetry
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Eigenvalues in meV, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> DVectorView<'_, f64> {
        self.vectors.column(k)
    }

    pub fn label(&self, k: usize) -> StateLabel {
        self.labels[k]
    }

    /// Weight of the electronic ¹A₁ component in state `k`.
    pub fn a1_weight(&self, k: usize) -> f64 {
        self.a1_weights[k]
    }

    pub fn manifold(&self, k: usize) -> Manifold {
        if self.a1_weights[k] > 0.5 {
            Manifold::Upper
        } else {
            Manifold::Lower
        }
    }

    /// Degenerate levels in ascending order.
    pub fn levels(&self) -> Vec<Level> {
        let mut out = Vec::new();
        let mut k = 0;
        while k < self.len() {
            let label = self.labels[k];
            out.push(Level {
                first: k,
                irrep: label.irrep,
                energy: self.energies[k],
                manifold: self.manifold(k),
            });
            k += label.irrep.dim();
        }
        out
    }

    /// Mirror-even partner of the lowest E doublet.
    pub fn ground_e(&self) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l.irrep == Irrep::E)
            .ok_or(Error::MissingState("E"))
    }

    /// Lowest A₁ state of the upper manifold, the emitter of the singlet PL.
    pub fn ground_a1(&self) -> Result<usize> {
        (0..self.len())
            .find(|&k| self.labels[k].irrep == Irrep::A1 && self.manifold(k) == Manifold::Upper)
            .ok_or(Error::MissingState("upper A1"))
    }

    /// Lowest A₁ level of the lower manifold above its ground doublet.
    pub fn first_lower_a1(&self) -> Result<usize> {
        let ground = self.ground_e()?;
        (ground..self.len())
            .find(|&k| self.labels[k].irrep == Irrep::A1 && self.manifold(k) == Manifold::Lower)
            .ok_or(Error::MissingState("lower A1"))
    }

    /// Energy between the vibronic ground states of the two singlets.
    pub fn zpl_energy(&self) -> Result<f64> {
        Ok(self.energies[self.ground_a1()?] - self.energies[self.ground_e()?])
    }

    /// Mean spacing of the three lowest levels of the upper manifold.
    pub fn a1_spacing(&self) -> Result<f64> {
        let upper: Vec<f64> = self
            .levels()
            .into_iter()
            .filter(|l| l.manifold == Manifold::Upper)
            .map(|l| l.energy)
            .take(3)
            .collect();
        if upper.len() < 3 {
            return Err(Error::MissingState("third upper level"));
        }
        Ok((upper[2] - upper[0]) / 2.0)
    }

    /// Lowering of the ground doublet below the uncoupled zero-point energy ħω.
    pub fn pjt_relaxation(&self, params: &ModelParams) -> Result<f64> {
        Ok(params.phonon_energy - self.energies[self.ground_e()?])
    }

    /// Largest `‖H v − λ v‖` over all eigenpairs.
    pub fn max_residual(&self, h: &OperatorMatrix) -> f64 {
        let hv = h.matrix() * &self.vectors;
        (0..self.len())
            .map(|k| (hv.column(k) - self.vectors.column(k) * self.energies[k]).norm())
            .fold(0.0, f64::max)
    }
}

/// First-order amplitude of the A₁⊗(one phonon) admixture into the ¹E ground state:
/// `(F̃/√2) / (Λ_e + ħω)`.
pub fn perturbative_pjt(pjt_coupling: f64, electronic_gap: f64, phonon_energy: f64) -> f64 {
    pjt_coupling * FRAC_1_SQRT_2 / (electronic_gap + phonon_energy)
}
