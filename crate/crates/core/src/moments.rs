//! First and second moments of observables in a state.
//!
//! Mixed states go through trace formulas; deviation vectors exist only for
//! pure states.

use crate::error::{Error, Result};
use crate::linalg::{check_dims, inner, ComplexMatrix, Observable, QuantumState, C64};

/// Variances down to this negative value are treated as round-off and clamped.
pub const NEGATIVE_VARIANCE_CLAMP: f64 = -1e-12;

/// `(A − ⟨A⟩)|Ψ⟩`
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationVector(Vec<C64>);

impl DeviationVector {
    pub fn entries(&self) -> &[C64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }
}

/// Means, variances and mixed moments of a pair of observables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSet {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub cov: f64,
    /// `⟨[A, B]⟩`, purely imaginary for Hermitian inputs.
    pub comm_expect: C64,
    /// `⟨{A, B}⟩`
    pub anticomm_expect: f64,
}

impl MomentSet {
    pub fn compute(s: &QuantumState, a: &Observable, b: &Observable) -> Result<Self> {
        check_dims(s.dim(), a.dim())?;
        check_dims(s.dim(), b.dim())?;
        Ok(Self {
            mean_a: expectation(s, a)?,
            mean_b: expectation(s, b)?,
            var_a: variance(s, a)?,
            var_b: variance(s, b)?,
            cov: covariance(s, a, b)?,
            comm_expect: commutator_expectation(s, a, b)?,
            anticomm_expect: anticommutator_expectation(s, a, b)?,
        })
    }

    pub fn std_a(&self) -> f64 {
        self.var_a.sqrt()
    }

    pub fn std_b(&self) -> f64 {
        self.var_b.sqrt()
    }

    pub fn product(&self) -> f64 {
        self.var_a * self.var_b
    }

    pub fn sum(&self) -> f64 {
        self.var_a + self.var_b
    }
}

/// `⟨A⟩`
pub fn expectation(s: &QuantumState, a: &Observable) -> Result<f64> {
    Ok(s.expect(a.matrix())?.re)
}

/// `⟨M²⟩ − ⟨M⟩²` for a Hermitian matrix, evaluated as `⟨(M − ⟨M⟩)²⟩`.
pub fn matrix_variance(s: &QuantumState, m: &ComplexMatrix) -> Result<f64> {
    check_dims(s.dim(), m.dim())?;
    let mean = s.expect(m)?.re;
    let centered = centered(m, mean);
    let raw = match s {
        QuantumState::Pure(v) => centered.mul_vec(v).iter().map(|z| z.norm_sqr()).sum(),
        QuantumState::Mixed(_) => s.expect(&(&centered * &centered))?.re,
    };
    clamp_variance(raw)
}

pub(crate) fn clamp_variance(raw: f64) -> Result<f64> {
    if raw >= 0.0 {
        Ok(raw)
    } else if raw >= NEGATIVE_VARIANCE_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance(raw))
    }
}

fn centered(m: &ComplexMatrix, mean: f64) -> ComplexMatrix {
    let mut out = m.clone();
    for i in 0..m.dim() {
        out[(i, i)] -= mean;
    }
    out
}

/// `ΔA² = ⟨A²⟩ − ⟨A⟩²`, clamped at zero.
pub fn variance(s: &QuantumState, a: &Observable) -> Result<f64> {
    matrix_variance(s, a.matrix())
}

/// `Cov(A, B) = ½⟨{A, B}⟩ − ⟨A⟩⟨B⟩`
pub fn covariance(s: &QuantumState, a: &Observable, b: &Observable) -> Result<f64> {
    check_dims(s.dim(), a.dim())?;
    check_dims(s.dim(), b.dim())?;
    let abar = centered(a.matrix(), expectation(s, a)?);
    let bbar = centered(b.matrix(), expectation(s, b)?);
    Ok(match s {
        QuantumState::Pure(v) => inner(&abar.mul_vec(v), &bbar.mul_vec(v)).re,
        QuantumState::Mixed(_) => 0.5 * s.expect(&abar.anticommutator(&bbar))?.re,
    })
}

/// `⟨[A, B]⟩`
pub fn commutator_expectation(s: &QuantumState, a: &Observable, b: &Observable) -> Result<C64> {
    check_dims(s.dim(), a.dim())?;
    s.expect(&a.matrix().commutator(b.matrix()))
}

/// `⟨{A, B}⟩`
pub fn anticommutator_expectation(s: &QuantumState, a: &Observable, b: &Observable) -> Result<f64> {
    check_dims(s.dim(), a.dim())?;
    Ok(s.expect(&a.matrix().anticommutator(b.matrix()))?.re)
}

/// `|f⟩ = (A − ⟨A⟩)|Ψ⟩`; pure states only.
pub fn deviation_vector(s: &QuantumState, a: &Observable) -> Result<DeviationVector> {
    check_dims(s.dim(), a.dim())?;
    let psi = s.require_pure()?;
    let mean = expectation(s, a)?;
    Ok(DeviationVector(centered(a.matrix(), mean).mul_vec(psi)))
}
