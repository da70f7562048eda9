//! Lower bounds on `ΔA²ΔB²` and `ΔA² + ΔB²`.
//!
//! The fidelity-weighted bounds work from two real sequences built on the
//! eigenbases of `A` and `B`:
//!
//! ```text
//! u_i = (a_i − ⟨A⟩) · √F(Ψ, a_i)        v_i = (b_i − ⟨B⟩) · √F(Ψ, b_i)
//! ```
//!
//! with `Σ u_i² = ΔA²` and `Σ v_i² = ΔB²`. Both sequences are sorted
//! ascending; Cauchy–Schwarz and the parallelogram law then hold for any
//! pairing of their entries. The basis-dependent bounds use the components
//! `α_n = ⟨ψ_n|Ā|Ψ⟩`, `β_n = ⟨ψ_n|B̄|Ψ⟩` of the deviation vectors instead.

use crate::bound::{BoundId, BoundResult};
use crate::error::Result;
use crate::linalg::{check_dims, inner, ComplexMatrix, Observable, OrthonormalBasis, QuantumState, C64};
use crate::moments::{self, MomentSet};
use crate::optimizer::{self, OptimizerConfig};

/// Fidelity-weighted deviations of `A` and `B`, each sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedWeightSequences {
    pub u: Vec<f64>,
    /// Eigenvalue index of `A` that produced each entry of `u`.
    pub u_index: Vec<usize>,
    pub v: Vec<f64>,
    pub v_index: Vec<usize>,
}

impl SortedWeightSequences {
    /// `Σ u_i v_i` (ascending with ascending).
    pub fn aligned_dot(&self) -> f64 {
        self.u.iter().zip(&self.v).map(|(x, y)| x * y).sum()
    }

    /// `Σ u_i v_{d−1−i}` (ascending with descending).
    pub fn opposite_dot(&self) -> f64 {
        self.u.iter().zip(self.v.iter().rev()).map(|(x, y)| x * y).sum()
    }
}

/// `(a_i − ⟨A⟩)·√F_i` in eigen-index order.
pub(crate) fn fidelity_weights(s: &QuantumState, a: &Observable) -> Result<Vec<f64>> {
    check_dims(s.dim(), a.dim())?;
    let mean = moments::expectation(s, a)?;
    a.eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let f = s.fidelity(&a.eigenvectors().vector(i))?.max(0.0);
            Ok((lambda - mean) * f.sqrt())
        })
        .collect()
}

fn sorted_with_index(w: Vec<f64>) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&i, &j| w[i].total_cmp(&w[j]).then(i.cmp(&j)));
    (idx.iter().map(|&i| w[i]).collect(), idx)
}

pub fn sorted_weight_sequences(
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
) -> Result<SortedWeightSequences> {
    check_dims(a.dim(), b.dim())?;
    let (u, u_index) = sorted_with_index(fidelity_weights(s, a)?);
    let (v, v_index) = sorted_with_index(fidelity_weights(s, b)?);
    Ok(SortedWeightSequences { u, u_index, v, v_index })
}

/// `|½⟨[A,B]⟩|² + |½⟨{A,B}⟩ − ⟨A⟩⟨B⟩|²`
pub fn rs_product_bound(s: &QuantumState, a: &Observable, b: &Observable) -> Result<BoundResult> {
    let m = MomentSet::compute(s, a, b)?;
    let comm = (0.5 * m.comm_expect).norm_sqr();
    let cov = m.cov * m.cov;
    Ok(BoundResult::defined(BoundId::RsProduct, comm + cov)
        .with("commutator_term", comm)
        .with("covariance_term", cov))
}

/// Components `(α_n, β_n)` of `Ā|Ψ⟩` and `B̄|Ψ⟩` in `basis`.
pub(crate) fn basis_components(
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
    basis: &OrthonormalBasis,
) -> Result<(Vec<C64>, Vec<C64>)> {
    check_dims(s.dim(), basis.dim())?;
    let f = moments::deviation_vector(s, a)?;
    let g = moments::deviation_vector(s, b)?;
    Ok((basis.coefficients(f.entries()), basis.coefficients(g.entries())))
}

/// `(Σ_n |α_n||β_n|)²` for a fixed basis.
///
/// The commutator form `¼(Σ_n |⟨[Ā, B̄_n]⟩ + ⟨{Ā, B̄_n}⟩|)²` with
/// `B̄_n = |ψ_n⟩⟨ψ_n|B̄` is evaluated alongside and must agree.
pub fn basis_product_bound(
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
    basis: &OrthonormalBasis,
) -> Result<BoundResult> {
    let (alpha, beta) = basis_components(s, a, b, basis)?;
    let total: f64 = alpha.iter().zip(&beta).map(|(x, y)| x.norm() * y.norm()).sum();
    let value = total * total;

    let psi = s.require_pure()?;
    let abar = centered(a, s)?;
    let bbar = centered(b, s)?;
    let mut comm_sum = 0.0;
    for n in 0..basis.dim() {
        let proj = ComplexMatrix::outer(&basis.vector(n));
        let bn = &proj * &bbar;
        let z = expect_pure(psi, &abar.commutator(&bn)) + expect_pure(psi, &abar.anticommutator(&bn));
        comm_sum += z.norm();
    }
    let comm_form = 0.25 * comm_sum * comm_sum;
    let discrepancy = (comm_form - value).abs();
    debug_assert!(
        discrepancy <= 1e-10 * (1.0 + value),
        "basis product forms disagree by {discrepancy:e}"
    );

    let mut out = BoundResult::defined(BoundId::BasisProduct, value)
        .with("commutator_form", comm_form)
        .with("form_discrepancy", discrepancy);
    for (n, (x, y)) in alpha.iter().zip(&beta).enumerate() {
        out = out.with(&format!("abs_alpha_{n}"), x.norm()).with(&format!("abs_beta_{n}"), y.norm());
    }
    Ok(out)
}

fn centered(a: &Observable, s: &QuantumState) -> Result<ComplexMatrix> {
    let mean = moments::expectation(s, a)?;
    let mut m = a.matrix().clone();
    for i in 0..m.dim() {
        m[(i, i)] -= mean;
    }
    Ok(m)
}

fn expect_pure(psi: &[C64], m: &ComplexMatrix) -> C64 {
    inner(psi, &m.mul_vec(psi))
}

/// Larger of the two extremal-pairing squares `(Σ u_i v_{π(i)})²`.
///
/// Intermediate `pairing` is 0 for ascending–ascending, 1 for
/// ascending–descending.
pub fn fidelity_product_bound(s: &QuantumState, a: &Observable, b: &Observable) -> Result<BoundResult> {
    let seq = sorted_weight_sequences(s, a, b)?;
    let aligned = seq.aligned_dot().powi(2);
    let opposite = seq.opposite_dot().powi(2);
    let (value, pairing) = if aligned >= opposite { (aligned, 0.0) } else { (opposite, 1.0) };
    Ok(BoundResult::defined(BoundId::FidelityProduct, value)
        .with("aligned_pairing", aligned)
        .with("opposite_pairing", opposite)
        .with("pairing", pairing))
}

/// `½ Σ_i (u_i + v_i)²` with both sequences ascending.
pub fn parallelogram_sum_bound(s: &QuantumState, a: &Observable, b: &Observable) -> Result<BoundResult> {
    let seq = sorted_weight_sequences(s, a, b)?;
    let aligned: f64 = 0.5 * seq.u.iter().zip(&seq.v).map(|(x, y)| (x + y).powi(2)).sum::<f64>();
    let opposite: f64 =
        0.5 * seq.u.iter().zip(seq.v.iter().rev()).map(|(x, y)| (x + y).powi(2)).sum::<f64>();
    Ok(BoundResult::defined(BoundId::ParallelogramSum, aligned).with("opposite_pairing", opposite))
}

/// `½ Σ_n (|α_n| + |β_n|)²` for a fixed basis.
pub fn basis_sum_bound(
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
    basis: &OrthonormalBasis,
) -> Result<BoundResult> {
    let (alpha, beta) = basis_components(s, a, b, basis)?;
    let value = 0.5 * alpha.iter().zip(&beta).map(|(x, y)| (x.norm() + y.norm()).powi(2)).sum::<f64>();
    Ok(BoundResult::defined(BoundId::BasisSum, value))
}

/// Sum bound `max_± { ±i⟨[A,B]⟩ + |⟨Ψ|A ± iB|Ψ⊥⟩|² }`, with `|Ψ⊥⟩`
/// searched numerically over the orthogonal complement of `|Ψ⟩`.
pub fn mp_sum_bound_1(
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
    cfg: &OptimizerConfig,
) -> Result<BoundResult> {
    check_dims(s.dim(), a.dim())?;
    check_dims(s.dim(), b.dim())?;
    let psi = s.require_pure()?;
    let comm = moments::commutator_expectation(s, a, b)?;
    let i = C64::new(0.0, 1.0);

    let mut best = f64::NEG_INFINITY;
    let mut out = BoundResult::defined(BoundId::MpSum1, 0.0);
    let mut evaluations = 0usize;
    for (label, sign) in [("plus_sign", 1.0), ("minus_sign", -1.0)] {
        // ⟨Ψ|X|φ⟩ = ⟨X†Ψ|φ⟩ with X = A ± iB.
        let x = &a.matrix().clone() + &b.matrix().scale(i * sign);
        let w = x.adjoint().mul_vec(psi);
        let offset = (i * sign * comm).re;
        let perp = optimizer::optimize_perp_state(psi, |phi| inner(&w, phi).norm_sqr(), cfg);
        evaluations += perp.evaluations;
        let value = offset + perp.value;
        out = out.with(label, value);
        if value > best {
            best = value;
        }
    }
    out.value = best;
    Ok(out.with("evaluations", evaluations as f64))
}

/// `½|⟨Ψ⊥|(A+B)|Ψ⟩|²` with `|Ψ⊥⟩` the normalized component of `(A+B)|Ψ⟩`
/// orthogonal to `|Ψ⟩`; equals `½Δ(A+B)²`.
pub fn mp_sum_bound_2(s: &QuantumState, a: &Observable, b: &Observable) -> Result<BoundResult> {
    check_dims(s.dim(), a.dim())?;
    check_dims(s.dim(), b.dim())?;
    let psi = s.require_pure()?;
    let sum = a.matrix() + b.matrix();
    let image = sum.mul_vec(psi);
    let along = inner(psi, &image);
    let perp: Vec<C64> = image.iter().zip(psi).map(|(x, p)| x - along * p).collect();
    let perp_norm_sqr: f64 = perp.iter().map(|z| z.norm_sqr()).sum();
    let var_sum = moments::matrix_variance(s, &sum)?;
    Ok(BoundResult::defined(BoundId::MpSum2, 0.5 * perp_norm_sqr).with("variance_of_sum", var_sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, pauli_operators, spin1_operators};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket0() -> QuantumState {
        QuantumState::pure(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    fn spin1_up() -> QuantumState {
        QuantumState::pure(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn rs_spot_values() {
        let (sx, sy, sz) = pauli_operators();
        assert_abs_diff_eq!(rs_product_bound(&ket0(), &sx, &sy).unwrap().value, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rs_product_bound(&ket0(), &sx, &sz).unwrap().value, 0.0, epsilon = 1e-14);
        let (lx, ly, _) = spin1_operators();
        assert_abs_diff_eq!(rs_product_bound(&spin1_up(), &lx, &ly).unwrap().value, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn basis_product_spot_values() {
        let (sx, sy, _) = pauli_operators();
        let r = basis_product_bound(&ket0(), &sx, &sy, &OrthonormalBasis::standard(2)).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.intermediate("commutator_form").unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.intermediate("abs_alpha_1").unwrap(), 1.0);
        assert_abs_diff_eq!(r.intermediate("abs_beta_1").unwrap(), 1.0);
    }

    #[test]
    fn basis_product_with_equal_observables_is_variance_squared() {
        let (lx, _, _) = spin1_operators();
        let s = QuantumState::pure_normalized(vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.4, -0.6)]).unwrap();
        let var = moments::variance(&s, &lx).unwrap();
        for basis in [OrthonormalBasis::standard(3), lx.eigenvectors().clone()] {
            let r = basis_product_bound(&s, &lx, &lx, &basis).unwrap();
            assert_abs_diff_eq!(r.value, var * var, epsilon = 1e-12);
        }
    }

    #[test]
    fn weight_sequences() {
        let (sx, _, sz) = pauli_operators();
        let seq = sorted_weight_sequences(&ket0(), &sx, &sz).unwrap();
        assert_abs_diff_eq!(seq.u[0], -FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(seq.u[1], FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_eq!(seq.v, vec![0.0, 0.0]);

        let (lx, ly, _) = spin1_operators();
        let seq = sorted_weight_sequences(&spin1_up(), &lx, &ly).unwrap();
        for (got, want) in seq.u.iter().zip([-0.5, 0.0, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(seq.u.iter().map(|x| x * x).sum::<f64>(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn fidelity_product_spot_values() {
        let (sx, sy, sz) = pauli_operators();
        assert_abs_diff_eq!(fidelity_product_bound(&ket0(), &sx, &sy).unwrap().value, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fidelity_product_bound(&ket0(), &sz, &sx).unwrap().value, 0.0, epsilon = 1e-14);
        let (lx, ly, _) = spin1_operators();
        assert_abs_diff_eq!(
            fidelity_product_bound(&spin1_up(), &lx, &ly).unwrap().value,
            0.25,
            epsilon = 1e-14
        );
    }

    #[test]
    fn parallelogram_spot_values() {
        let (lx, ly, _) = spin1_operators();
        assert_abs_diff_eq!(
            parallelogram_sum_bound(&spin1_up(), &lx, &ly).unwrap().value,
            1.0,
            epsilon = 1e-14
        );
        let (sx, _, sz) = pauli_operators();
        assert_abs_diff_eq!(parallelogram_sum_bound(&ket0(), &sx, &sz).unwrap().value, 0.5, epsilon = 1e-14);
        let s = QuantumState::pure_normalized(vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.4, -0.6)]).unwrap();
        let var = moments::variance(&s, &lx).unwrap();
        assert_abs_diff_eq!(parallelogram_sum_bound(&s, &lx, &lx).unwrap().value, 2.0 * var, epsilon = 1e-12);
    }

    #[test]
    fn basis_sum_spot_values() {
        let (sx, sy, sz) = pauli_operators();
        let std2 = OrthonormalBasis::standard(2);
        assert_abs_diff_eq!(basis_sum_bound(&ket0(), &sx, &sy, &std2).unwrap().value, 2.0, epsilon = 1e-14);
        // Eigenstate of A: α = 0.
        assert_abs_diff_eq!(basis_sum_bound(&ket0(), &sz, &sx, &std2).unwrap().value, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn mp_baselines() {
        let (sx, sy, _) = pauli_operators();
        let cfg = OptimizerConfig::default();
        let r = mp_sum_bound_1(&ket0(), &sx, &sy, &cfg).unwrap();
        assert!(r.baseline);
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
        let r = mp_sum_bound_2(&ket0(), &sx, &sy).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);

        // Eigenstate of A + B gives zero.
        let plus = QuantumState::pure(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        assert_abs_diff_eq!(mp_sum_bound_2(&plus, &sx, &sx).unwrap().value, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn mp1_with_equal_observables_is_valid() {
        let (lx, _, _) = spin1_operators();
        let s = QuantumState::pure_normalized(vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.4, -0.6)]).unwrap();
        let var = moments::variance(&s, &lx).unwrap();
        let r = mp_sum_bound_1(&s, &lx, &lx, &OptimizerConfig::default()).unwrap();
        assert!(r.value <= 2.0 * var + 1e-10);
    }

    #[test]
    fn pure_only_bounds_reject_mixed_states() {
        let (sx, sy, _) = pauli_operators();
        let rho = crate::linalg::qubit_state_from_bloch([0.1, 0.2, 0.3]).unwrap();
        let std2 = OrthonormalBasis::standard(2);
        assert!(basis_product_bound(&rho, &sx, &sy, &std2).is_err());
        assert!(basis_sum_bound(&rho, &sx, &sy, &std2).is_err());
        assert!(mp_sum_bound_2(&rho, &sx, &sy).is_err());
        assert!(fidelity_product_bound(&rho, &sx, &sy).is_ok());
    }
}
