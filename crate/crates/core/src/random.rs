//! Random ensembles: Haar states, Wishart density matrices, GUE-style
//! Hermitian matrices and Haar-distributed bases.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{eigh, normalized, ComplexMatrix, Observable, OrthonormalBasis, QuantumState, C64};

pub fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..d).map(|_| gaussian_complex(rng)).collect()
}

/// Uniformly (Haar) distributed pure state.
pub fn haar_state(d: usize, rng: &mut impl Rng) -> QuantumState {
    loop {
        if let Some(v) = normalized(&gaussian_vector(d, rng)) {
            return QuantumState::Pure(v);
        }
    }
}

/// `GG† / Tr(GG†)` for a square complex Gaussian `G`.
pub fn wishart_state(d: usize, rng: &mut impl Rng) -> QuantumState {
    let g = ComplexMatrix::from_fn(d, |_, _| gaussian_complex(rng));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    QuantumState::Mixed(w.scale(C64::new(1.0 / tr, 0.0)).hermitian_part())
}

/// Hermitian part of a complex Gaussian matrix.
pub fn gue_matrix(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |_, _| gaussian_complex(rng)).hermitian_part()
}

pub fn gue_observable(d: usize, rng: &mut impl Rng) -> Observable {
    Observable::new(gue_matrix(d, rng)).expect("Hermitian part is Hermitian")
}

/// Eigenbasis of a GUE matrix, which is Haar distributed up to column phases.
pub fn haar_basis(d: usize, rng: &mut impl Rng) -> OrthonormalBasis {
    eigh(&gue_matrix(d, rng)).expect("Hermitian part is Hermitian").1
}
