//! Truncated two-mode boson space and its operators.
//!
//! States are ordered shell by shell (`n = nx + ny` ascending); inside a shell
//! `nx` runs from `n` down to 0, so `|nx, ny⟩` sits at row `n(n+1)/2 + ny`.

use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::DMatrix;
#[allow(unused_imports)] // shadowed by the inherent std methods in test builds
use num_traits::Float;

use crate::symmetry::SymmetryOps;

/// Phonon occupation numbers of the two degenerate modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation {
    pub nx: usize,
    pub ny: usize,
}

impl Occupation {
    pub const fn new(nx: usize, ny: usize) -> Self {
        Self { nx, ny }
    }

    pub const fn total(self) -> usize {
        self.nx + self.ny
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BosonBasis {
    n_max: usize,
    states: Vec<Occupation>,
}

impl BosonBasis {
    pub fn new(n_max: usize) -> Self {
        let mut states = Vec::with_capacity(shell_start(n_max + 1));
        for n in 0..=n_max {
            for ny in 0..=n {
                states.push(Occupation::new(n - ny, ny));
            }
        }
        Self { n_max, states }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, index: usize) -> Occupation {
        self.states[index]
    }

    pub fn index_of(&self, occ: Occupation) -> Option<usize> {
        (occ.total() <= self.n_max).then(|| shell_start(occ.total()) + occ.ny)
    }

    /// Row range of the `n`-phonon shell.
    pub fn shell(&self, n: usize) -> Range<usize> {
        assert!(
            n <= self.n_max,
            "shell {n} beyond truncation {}",
            self.n_max
        );
        shell_start(n)..shell_start(n + 1)
    }
}

const fn shell_start(n: usize) -> usize {
    n * (n + 1) / 2
}

pub fn build_basis(n_max: usize) -> BosonBasis {
    BosonBasis::new(n_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Symmetric,
    Orthogonal,
    General,
}

/// Dense real operator together with the structure it is known to have.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    matrix: DMatrix<f64>,
    structure: Structure,
}

impl OperatorMatrix {
    pub fn new(matrix: DMatrix<f64>, structure: Structure) -> Self {
        assert!(matrix.is_square(), "operator matrices are square");
        Self { matrix, structure }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest absolute deviation from symmetry.
    pub fn asymmetry(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for j in 0..m.ncols() {
            for i in 0..j {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        worst
    }
}

/// Matrix of `a` or `a†` for one mode. Creation out of the top shell gives zero.
pub fn ladder(basis: &BosonBasis, mode: Mode, kind: Ladder) -> OperatorMatrix {
    let dim = basis.len();
    let mut m = DMatrix::zeros(dim, dim);
    for (col, &occ) in basis.states().iter().enumerate() {
        let (lowered, count) = match mode {
            Mode::X if occ.nx > 0 => (Occupation::new(occ.nx - 1, occ.ny), occ.nx),
            Mode::Y if occ.ny > 0 => (Occupation::new(occ.nx, occ.ny - 1), occ.ny),
            _ => continue,
        };
        let row = basis
            .index_of(lowered)
            .expect("lowered state is inside the basis");
        m[(row, col)] = (count as f64).sqrt();
    }
    if kind == Ladder::Create {
        m.transpose_mut();
    }
    OperatorMatrix::new(m, Structure::General)
}

/// Dimensionless coordinate `(a† + a)/√2`.
pub fn position(basis: &BosonBasis, mode: Mode) -> OperatorMatrix {
    let a = ladder(basis, mode, Ladder::Annihilate).into_matrix();
    let x = (&a + a.transpose()) * core::f64::consts::FRAC_1_SQRT_2;
    OperatorMatrix::new(x, Structure::Symmetric)
}

/// Total occupation `n_x + n_y`.
pub fn number(basis: &BosonBasis) -> OperatorMatrix {
    let diag = basis.states().iter().map(|o| o.total() as f64);
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(basis.len(), diag));
    OperatorMatrix::new(m, Structure::Symmetric)
}

/// Matrices of the 2π/3 rotation and the vertical mirror on the electronic ⊗ phonon space.
pub fn symmetry_ops(basis: &BosonBasis) -> (OperatorMatrix, OperatorMatrix) {
    let ops = SymmetryOps::new(basis);
    (ops.c3_matrix(), ops.mirror_matrix())
}
