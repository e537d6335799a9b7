//! Oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use nvsinglet_core::ModelParams;

/// H written out element by element on its own basis ordering (nx outer, ny inner).
pub fn hand_assembled(p: &ModelParams) -> DMatrix<f64> {
    let n = p.n_max;
    let mut states = Vec::new();
    for nx in 0..=n {
        for ny in 0..=n - nx {
            states.push((nx, ny));
        }
    }
    let d = states.len();
    let pos = |bra: (usize, usize), ket: (usize, usize), along_x: bool| -> f64 {
        let (keep_b, keep_k, qb, qk) = if along_x {
            (bra.1, ket.1, bra.0, ket.0)
        } else {
            (bra.0, ket.0, bra.1, ket.1)
        };
        if keep_b != keep_k {
            return 0.0;
        }
        if qb == qk + 1 {
            (qb as f64).sqrt() * FRAC_1_SQRT_2
        } else if qk == qb + 1 {
            (qk as f64).sqrt() * FRAC_1_SQRT_2
        } else {
            0.0
        }
    };
    let r = FRAC_1_SQRT_2;
    // Electronic order |xx⟩, |xy⟩, |yy⟩.
    let gap = [[0.5, 0.0, 0.5], [0.0, 0.0, 0.0], [0.5, 0.0, 0.5]];
    let sz = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]];
    let sx = [[0.0, r, 0.0], [r, 0.0, r], [0.0, r, 0.0]];
    let bz = [[0.5, 0.0, -0.5], [0.0, -1.0, 0.0], [-0.5, 0.0, 0.5]];
    let bx = [[0.0, r, 0.0], [r, 0.0, -r], [0.0, -r, 0.0]];
    let pjt = p.c2 * 2.0 * p.coupling;
    let djt = if p.dynamic_jt {
        (1.0 - p.c2) * p.coupling
    } else {
        0.0
    };

    let mut h = DMatrix::zeros(3 * d, 3 * d);
    for e in 0..3 {
        for f in 0..3 {
            for (i, &bra) in states.iter().enumerate() {
                for (j, &ket) in states.iter().enumerate() {
                    let mut v = (pjt * sz[e][f] + djt * bz[e][f]) * pos(bra, ket, true)
                        + (-pjt * sx[e][f] + djt * bx[e][f]) * pos(bra, ket, false);
                    if i == j {
                        v += p.electronic_gap * gap[e][f];
                        if e == f {
                            v += p.phonon_energy * (bra.0 + bra.1 + 1) as f64;
                        }
                    }
                    h[(3 * i + e, 3 * j + f)] = v;
                }
            }
        }
    }
    h
}

/// Sorted eigenvalues of [`hand_assembled`].
pub fn oracle_spectrum(p: &ModelParams) -> Vec<f64> {
    let mut e = hand_assembled(p)
        .symmetric_eigenvalues()
        .as_slice()
        .to_vec();
    e.sort_by(f64::total_cmp);
    e
}
