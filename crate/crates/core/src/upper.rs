//! Upper (reverse) bounds on products and sums of variances.
//!
//! The product bounds come from the reverse Cauchy–Schwarz (Pólya–Szegő)
//! inequality, which needs every entry of both sequences strictly positive.
//! Zero entries make the bound undefined; they are never dropped, since
//! removing an index changes the paired sum. The sum bounds come from the
//! Dunkl–Williams inequality applied to the deviation vectors.

use crate::bound::{BoundId, BoundResult};
use crate::error::Result;
use crate::linalg::{check_dims, Observable, OrthonormalBasis, QuantumState};
use crate::lower;
use crate::moments::{self, MomentSet};

/// Entries at or below `1e-12 · max(1, largest entry)` count as zero.
pub const POSITIVITY_TOL: f64 = 1e-12;
/// `1 − Cov/(ΔAΔB)` at or below this makes the Dunkl–Williams bounds vacuous.
pub const CORRELATION_GUARD: f64 = 1e-12;
/// Standard deviations at or below this are treated as zero.
pub const ZERO_STD_TOL: f64 = 1e-12;

const HYPOTHESIS_REASON: &str = "reverse Cauchy–Schwarz hypothesis 0<c≤cᵢ violated";

/// `Ω = (M_a M_b + m_a m_b)² / (4 M_a M_b m_a m_b)` from the extrema of two
/// strictly positive sequences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReverseFactor {
    pub max_a: f64,
    pub min_a: f64,
    pub max_b: f64,
    pub min_b: f64,
    pub factor: f64,
}

impl ReverseFactor {
    /// `None` when either sequence is empty or has an entry that is not
    /// strictly positive (see [`POSITIVITY_TOL`]).
    pub fn from_sequences(c: &[f64], d: &[f64]) -> Option<Self> {
        let (min_a, max_a) = positive_extrema(c)?;
        let (min_b, max_b) = positive_extrema(d)?;
        Some(Self::from_extrema(max_a, min_a, max_b, min_b))
    }

    pub fn from_extrema(max_a: f64, min_a: f64, max_b: f64, min_b: f64) -> Self {
        // (p + q)² / (4pq) written through r = p/q ≥ 1 to stay finite.
        let r = (max_a / min_a) * (max_b / min_b);
        let factor = ((r + 1.0) * (r + 1.0) / (4.0 * r)).max(1.0);
        Self { max_a, min_a, max_b, min_b, factor }
    }
}

fn positive_extrema(xs: &[f64]) -> Option<(f64, f64)> {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    if !max.is_finite() || min <= POSITIVITY_TOL * max.max(1.0) {
        return None;
    }
    Some((min, max))
}

/// `Ω · (Σ_i c_i d_{π(i)})²` with `c_i = √F^{a_i}|ã_i|`, `d_i = √F^{b_i}|b̃_i|`.
///
/// The reverse inequality holds for every pairing π; the reported value uses
/// `c` ascending against `d` descending, which gives the smallest sum. The
/// value for the sorted (ascending–ascending) pairing is kept in the
/// intermediates.
pub fn reverse_fidelity_product_bound(
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
) -> Result<BoundResult> {
    check_dims(a.dim(), b.dim())?;
    let mut c: Vec<f64> = lower::fidelity_weights(s, a)?.iter().map(|x| x.abs()).collect();
    let mut d: Vec<f64> = lower::fidelity_weights(s, b)?.iter().map(|x| x.abs()).collect();
    let id = BoundId::ReverseFidelityProduct;
    let Some(rf) = ReverseFactor::from_sequences(&c, &d) else {
        return Ok(BoundResult::undefined(id, HYPOTHESIS_REASON));
    };
    c.sort_by(f64::total_cmp);
    d.sort_by(f64::total_cmp);
    let opposite: f64 = c.iter().zip(d.iter().rev()).map(|(x, y)| x * y).sum();
    let aligned: f64 = c.iter().zip(&d).map(|(x, y)| x * y).sum();
    Ok(with_factor(BoundResult::defined(id, rf.factor * opposite * opposite), &rf)
        .with("paired_sum", opposite)
        .with("aligned_pairing_value", rf.factor * aligned * aligned))
}

fn with_factor(r: BoundResult, rf: &ReverseFactor) -> BoundResult {
    r.with("factor", rf.factor)
        .with("max_a", rf.max_a)
        .with("min_a", rf.min_a)
        .with("max_b", rf.max_b)
        .with("min_b", rf.min_b)
}

/// `Λ · (Σ_n |α_n||β_n|)²` for a fixed basis; pure states only.
pub fn reverse_basis_product_bound(
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
    basis: &OrthonormalBasis,
) -> Result<BoundResult> {
    let (alpha, beta) = lower::basis_components(s, a, b, basis)?;
    let c: Vec<f64> = alpha.iter().map(|z| z.norm()).collect();
    let d: Vec<f64> = beta.iter().map(|z| z.norm()).collect();
    Ok(reverse_basis_from_magnitudes(&c, &d))
}

pub(crate) fn reverse_basis_from_magnitudes(c: &[f64], d: &[f64]) -> BoundResult {
    let id = BoundId::ReverseBasisProduct;
    let Some(rf) = ReverseFactor::from_sequences(c, d) else {
        return BoundResult::undefined(id, HYPOTHESIS_REASON);
    };
    let total: f64 = c.iter().zip(d).map(|(x, y)| x * y).sum();
    let mut out = with_factor(BoundResult::defined(id, rf.factor * total * total), &rf)
        .with("paired_sum", total);
    for (n, (x, y)) in c.iter().zip(d).enumerate() {
        out = out.with(&format!("product_{n}"), x * y);
    }
    out
}

struct DunklWilliams {
    moments: MomentSet,
    std_diff: f64,
    correlation: f64,
}

fn dunkl_williams(
    id: BoundId,
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
) -> Result<std::result::Result<DunklWilliams, BoundResult>> {
    let m = MomentSet::compute(s, a, b)?;
    let (sa, sb) = (m.std_a(), m.std_b());
    if sa <= ZERO_STD_TOL || sb <= ZERO_STD_TOL {
        return Ok(Err(BoundResult::undefined(
            id,
            "deviation vectors must be non-null (ΔA > 0 and ΔB > 0)",
        )));
    }
    let correlation = m.cov / (sa * sb);
    if 1.0 - correlation <= CORRELATION_GUARD {
        return Ok(Err(BoundResult::undefined(id, "perfect correlation: 1 − Cov/(ΔAΔB) ≈ 0")
            .with("correlation", correlation)));
    }
    let std_diff = moments::matrix_variance(s, &(a.matrix() - b.matrix()))?.sqrt();
    Ok(Ok(DunklWilliams { moments: m, std_diff, correlation }))
}

/// Upper bound on `ΔA + ΔB`: `√2·Δ(A−B) / √(1 − Cov(A,B)/(ΔAΔB))`.
pub fn dw_deviation_sum_bound(s: &QuantumState, a: &Observable, b: &Observable) -> Result<BoundResult> {
    let id = BoundId::DwDeviationSum;
    let dw = match dunkl_williams(id, s, a, b)? {
        Ok(dw) => dw,
        Err(undefined) => return Ok(undefined),
    };
    let value = std::f64::consts::SQRT_2 * dw.std_diff / (1.0 - dw.correlation).sqrt();
    Ok(BoundResult::defined(id, value)
        .with("correlation", dw.correlation)
        .with("std_diff", dw.std_diff))
}

/// Upper bound on `ΔA² + ΔB²`: `2Δ(A−B)² / (1 − Cov/(ΔAΔB)) − 2ΔAΔB`.
pub fn dw_variance_sum_bound(s: &QuantumState, a: &Observable, b: &Observable) -> Result<BoundResult> {
    let id = BoundId::DwVarianceSum;
    let dw = match dunkl_williams(id, s, a, b)? {
        Ok(dw) => dw,
        Err(undefined) => return Ok(undefined),
    };
    let m = &dw.moments;
    let value = 2.0 * dw.std_diff * dw.std_diff / (1.0 - dw.correlation) - 2.0 * m.std_a() * m.std_b();
    Ok(BoundResult::defined(id, value)
        .with("correlation", dw.correlation)
        .with("std_diff", dw.std_diff))
}

/// `Δ(A−B)`, a weaker comparison value for `ΔA + ΔB`. It is not a
/// universal upper bound and is never checked as one.
pub fn dw_weak_deviation(s: &QuantumState, a: &Observable, b: &Observable) -> Result<BoundResult> {
    check_dims(s.dim(), a.dim())?;
    check_dims(s.dim(), b.dim())?;
    let std_diff = moments::matrix_variance(s, &(a.matrix() - b.matrix()))?.sqrt();
    Ok(BoundResult::defined(BoundId::DwWeakDeviation, std_diff))
}
