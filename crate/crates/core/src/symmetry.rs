//! C₃ᵥ action on the electronic ⊗ phonon product space.
//!
//! A rotation by θ maps `a_x† → cos θ a_x† + sin θ a_y†` and
//! `a_y† → −sin θ a_x† + cos θ a_y†`; the mirror is `y → −y`. The electronic
//! triple (|xx⟩, |xy⟩, |yy⟩) transforms exactly like the two-phonon shell.
//!
//! E partners are kept in "vector form": the pair (u_x, u_y) transforms like
//! the one-phonon pair (|10⟩, |01⟩), u_x is mirror-even and u_y mirror-odd.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
#[allow(unused_imports)] // shadowed by the inherent std methods in test builds
use num_traits::Float;

use crate::fock::{BosonBasis, OperatorMatrix, Structure};
use crate::linalg::orthonormalize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Irrep {
    A1,
    A2,
    E,
}

impl Irrep {
    pub const ALL: [Irrep; 3] = [Irrep::A1, Irrep::A2, Irrep::E];

    pub const fn dim(self) -> usize {
        match self {
            Irrep::A1 | Irrep::A2 => 1,
            Irrep::E => 2,
        }
    }

    pub fn character(self, g: GroupElement) -> f64 {
        match (self, g.mirrored, g.rotations) {
            (Irrep::A1, _, _) => 1.0,
            (Irrep::A2, false, _) => 1.0,
            (Irrep::A2, true, _) => -1.0,
            (Irrep::E, false, 0) => 2.0,
            (Irrep::E, false, _) => -1.0,
            (Irrep::E, true, _) => 0.0,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Irrep::A1 => "A1",
            Irrep::A2 => "A2",
            Irrep::E => "E",
        }
    }
}

impl core::fmt::Display for Irrep {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Group element `σᵐ C₃ᵏ` (rotation applied first).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub rotations: u8,
    pub mirrored: bool,
}

impl GroupElement {
    pub const ALL: [GroupElement; 6] = [
        GroupElement::new(0, false),
        GroupElement::new(1, false),
        GroupElement::new(2, false),
        GroupElement::new(0, true),
        GroupElement::new(1, true),
        GroupElement::new(2, true),
    ];

    pub const fn new(rotations: u8, mirrored: bool) -> Self {
        Self {
            rotations,
            mirrored,
        }
    }
}

const ROTATION_ANGLE: f64 = 2.0 * PI / 3.0;

/// Rotation acting on the `n`-phonon shell, columns indexed by `ny`.
///
/// Built by applying the rotated creation operators one quantum at a time,
/// which avoids the cancellation of the closed binomial form at large `n`.
pub fn shell_rotation(n: usize, angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    let mut prev = DMatrix::from_element(1, 1, 1.0);
    for shell in 1..=n {
        let mut next = DMatrix::zeros(shell + 1, shell + 1);
        for ny in 0..=shell {
            let nx = shell - ny;
            // R|nx,ny⟩ = (1/√k)(α a_x† + β a_y†) R|state with one quantum removed⟩
            let (src_ny, alpha, beta, k) = if nx > 0 {
                (ny, c, s, nx)
            } else {
                (ny - 1, -s, c, ny)
            };
            let norm = 1.0 / (k as f64).sqrt();
            for q in 0..shell {
                let amp = prev[(q, src_ny)];
                if amp == 0.0 {
                    continue;
                }
                let p = shell - 1 - q;
                next[(q, ny)] += norm * alpha * ((p + 1) as f64).sqrt() * amp;
                next[(q + 1, ny)] += norm * beta * ((q + 1) as f64).sqrt() * amp;
            }
        }
        prev = next;
    }
    prev
}

/// Symmetry-adapted functions of one phonon shell.
#[derive(Clone, Debug)]
pub struct AdaptedShell {
    pub a1: Vec<DVector<f64>>,
    pub a2: Vec<DVector<f64>>,
    /// (x, y) partners in vector form.
    pub e: Vec<(DVector<f64>, DVector<f64>)>,
}

impl AdaptedShell {
    pub fn dim(&self) -> usize {
        self.a1.len() + self.a2.len() + 2 * self.e.len()
    }
}

#[derive(Clone, Debug)]
pub struct SymmetryOps {
    n_max: usize,
    phonon_dim: usize,
    shells: Vec<DMatrix<f64>>,
    electronic: Matrix3<f64>,
}

const ELECTRONIC_MIRROR: [f64; 3] = [1.0, -1.0, 1.0];

impl SymmetryOps {
    pub fn new(basis: &BosonBasis) -> Self {
        let shells = (0..=basis.n_max())
            .map(|n| shell_rotation(n, ROTATION_ANGLE))
            .collect();
        let r2 = shell_rotation(2, ROTATION_ANGLE);
        let electronic = Matrix3::from_fn(|i, j| r2[(i, j)]);
        Self {
            n_max: basis.n_max(),
            phonon_dim: basis.len(),
            shells,
            electronic,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn phonon_dim(&self) -> usize {
        self.phonon_dim
    }

    pub fn electronic_rotation(&self) -> &Matrix3<f64> {
        &self.electronic
    }

    fn shell_offset(n: usize) -> usize {
        n * (n + 1) / 2
    }

    fn rotate_phonons(&self, v: &mut [f64], scratch: &mut Vec<f64>) {
        for (n, r) in self.shells.iter().enumerate() {
            let off = Self::shell_offset(n);
            let block = &mut v[off..off + n + 1];
            scratch.clear();
            scratch.extend_from_slice(block);
            for (i, out) in block.iter_mut().enumerate() {
                *out = (0..=n).map(|j| r[(i, j)] * scratch[j]).sum();
            }
        }
    }

    fn mirror_phonons(&self, v: &mut [f64]) {
        for n in 0..=self.n_max {
            let off = Self::shell_offset(n);
            for ny in (1..=n).step_by(2) {
                v[off + ny] = -v[off + ny];
            }
        }
    }

    /// Action of `g` on a product-space vector (electronic index major).
    pub fn apply(&self, g: GroupElement, v: &DVector<f64>) -> DVector<f64> {
        let d = self.phonon_dim;
        assert_eq!(v.len(), 3 * d, "vector is not on the product space");
        let mut out = v.clone();
        let mut scratch = Vec::new();
        for _ in 0..g.rotations {
            let rows = out.as_mut_slice();
            for e in 0..3 {
                self.rotate_phonons(&mut rows[e * d..(e + 1) * d], &mut scratch);
            }
            let mut mixed = DVector::zeros(3 * d);
            for e in 0..3 {
                for f in 0..3 {
                    let w = self.electronic[(e, f)];
                    if w != 0.0 {
                        for p in 0..d {
                            mixed[e * d + p] += w * rows[f * d + p];
                        }
                    }
                }
            }
            out = mixed;
        }
        if g.mirrored {
            let rows = out.as_mut_slice();
            for e in 0..3 {
                let block = &mut rows[e * d..(e + 1) * d];
                self.mirror_phonons(block);
                if ELECTRONIC_MIRROR[e] < 0.0 {
                    block.iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
        out
    }

    /// Character projector `P_Γ = (dim Γ / 6) Σ_g χ_Γ(g) g` applied to `v`.
    pub fn project(&self, irrep: Irrep, v: &DVector<f64>) -> DVector<f64> {
        let mut acc = DVector::zeros(v.len());
        for g in GroupElement::ALL {
            let chi = irrep.character(g);
            if chi != 0.0 {
                acc.axpy(chi, &self.apply(g, v), 1.0);
            }
        }
        acc * (irrep.dim() as f64 / 6.0)
    }

    /// Action of `g` on a vector living in the `n`-phonon shell alone.
    pub fn apply_shell(&self, g: GroupElement, n: usize, v: &DVector<f64>) -> DVector<f64> {
        let r = &self.shells[n];
        let mut out = v.clone();
        for _ in 0..g.rotations {
            out = r * out;
        }
        if g.mirrored {
            for ny in (1..=n).step_by(2) {
                out[ny] = -out[ny];
            }
        }
        out
    }

    pub fn project_shell(&self, irrep: Irrep, n: usize, v: &DVector<f64>) -> DVector<f64> {
        let mut acc = DVector::zeros(v.len());
        for g in GroupElement::ALL {
            let chi = irrep.character(g);
            if chi != 0.0 {
                acc.axpy(chi, &self.apply_shell(g, n, v), 1.0);
            }
        }
        acc * (irrep.dim() as f64 / 6.0)
    }

    /// Completes an E x-partner to its y-partner: `u_y = (R u_x − cos θ u_x) / sin θ`.
    pub fn shell_partner(&self, n: usize, x: &DVector<f64>) -> DVector<f64> {
        let rx = &self.shells[n] * x;
        (rx + x * 0.5) * (2.0 / 3f64.sqrt())
    }

    /// Orthonormal symmetry-adapted basis of the `n`-phonon shell.
    pub fn adapted_shell(&self, n: usize) -> AdaptedShell {
        let unit = |j: usize| {
            let mut v = DVector::zeros(n + 1);
            v[j] = 1.0;
            v
        };
        let span = |irrep: Irrep| {
            orthonormalize(
                (0..=n).map(|j| self.project_shell(irrep, n, &unit(j))),
                1e-8,
            )
        };
        let a1 = span(Irrep::A1);
        let a2 = span(Irrep::A2);
        let x_parts = orthonormalize(
            (0..=n).map(|j| {
                let p = self.project_shell(Irrep::E, n, &unit(j));
                let m = self.apply_shell(GroupElement::new(0, true), n, &p);
                (p + m) * 0.5
            }),
            1e-8,
        );
        let e = x_parts
            .into_iter()
            .map(|x| {
                let y = self.shell_partner(n, &x);
                (x, y)
            })
            .collect();
        AdaptedShell { a1, a2, e }
    }

    fn dense(&self, g: GroupElement) -> DMatrix<f64> {
        let dim = 3 * self.phonon_dim;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut unit = DVector::zeros(dim);
            unit[j] = 1.0;
            m.set_column(j, &self.apply(g, &unit));
        }
        m
    }

    pub fn c3_matrix(&self) -> OperatorMatrix {
        OperatorMatrix::new(
            self.dense(GroupElement::new(1, false)),
            Structure::Orthogonal,
        )
    }

    pub fn mirror_matrix(&self) -> OperatorMatrix {
        OperatorMatrix::new(
            self.dense(GroupElement::new(0, true)),
            Structure::Orthogonal,
        )
    }
}

/// Electronic ¹A₁ = (|xx⟩ + |yy⟩)/√2.
pub fn electronic_a1() -> Vector3<f64> {
    Vector3::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2)
}

/// Electronic ¹E pair in vector form: ((|xx⟩ − |yy⟩)/√2, ∓|xy⟩).
pub fn electronic_e_pair(ops: &SymmetryOps) -> (Vector3<f64>, Vector3<f64>) {
    let x = Vector3::new(FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2);
    let y = (ops.electronic_rotation() * x + x * 0.5) * (2.0 / 3f64.sqrt());
    (x, y)
}
