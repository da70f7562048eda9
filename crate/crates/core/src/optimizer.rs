//! Derivative-free search over orthonormal bases.
//!
//! A basis is `U₀ · G(x)` where `U₀` is a start basis and `G(x)` is a fixed
//! product of complex Givens rotations, one per index pair `(p, q)`, `p < q`,
//! in lexicographic order. Each rotation has an angle and a phase, so
//! `x ∈ ℝ^{d(d−1)}`; this covers every basis up to column phases, which none
//! of the objectives see.
//!
//! Each restart runs a coordinate compass search on `x` from zero. The first
//! restarts start from caller-provided seed bases, the rest from
//! Haar-random bases drawn from a per-restart ChaCha8 stream, so restart `k`
//! does the same work regardless of how many restarts follow it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{BoundId, BoundResult};
use crate::error::{Error, Result};
use crate::linalg::{c, normalized, ComplexMatrix, Observable, OrthonormalBasis, QuantumState, C64};
use crate::{moments, random, upper};

/// Default generator seed.
pub const DEFAULT_SEED: u64 = 0xDEBA515;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Random restarts, in addition to the seed starts.
    pub restarts: usize,
    pub seed: u64,
    /// Objective evaluations allowed per restart.
    pub max_evals: usize,
    pub step_init: f64,
    pub step_min: f64,
    /// Minimum improvement for a compass move to be accepted.
    pub tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: DEFAULT_SEED,
            max_evals: 20_000,
            step_init: std::f64::consts::FRAC_PI_4,
            step_min: 1e-7,
            tol: 1e-12,
        }
    }
}

/// Givens angles and phases, `d(d−1)` values interleaved as
/// `(θ₀, φ₀, θ₁, φ₁, …)` over the lexicographic pairs `(p, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryParams {
    dim: usize,
    angles: Vec<f64>,
}

impl UnitaryParams {
    pub fn new(dim: usize, angles: Vec<f64>) -> Result<Self> {
        let expected = Self::count(dim);
        if angles.len() != expected {
            return Err(Error::BadParameterCount { expected, found: angles.len() });
        }
        Ok(Self { dim, angles })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, angles: vec![0.0; Self::count(dim)] }
    }

    pub fn count(dim: usize) -> usize {
        dim * dim.saturating_sub(1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

pub fn synthesize_basis(p: &UnitaryParams) -> Result<OrthonormalBasis> {
    UnitaryParams::new(p.dim, p.angles.clone())?;
    let mut u = ComplexMatrix::identity(p.dim);
    apply_givens(&mut u, &p.angles);
    Ok(OrthonormalBasis::new_unchecked(u))
}

/// Right-multiplies `u` by the Givens product described by `angles`.
fn apply_givens(u: &mut ComplexMatrix, angles: &[f64]) {
    let d = u.dim();
    let mut k = 0;
    for p in 0..d {
        for q in p + 1..d {
            let (theta, phi) = (angles[2 * k], angles[2 * k + 1]);
            k += 1;
            if theta == 0.0 {
                continue;
            }
            let (sn, cs) = theta.sin_cos();
            let e = C64::from_polar(1.0, phi);
            let g_qp = e * sn;
            let g_pq = -e.conj() * sn;
            for i in 0..d {
                let up = u[(i, p)];
                let uq = u[(i, q)];
                u[(i, p)] = up * cs + uq * g_qp;
                u[(i, q)] = up * g_pq + uq * cs;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Goal {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationReport {
    pub best_value: f64,
    pub best_basis: OrthonormalBasis,
    pub restarts_used: usize,
    pub evaluations: usize,
    /// Whether the restart that produced `best_value` reached `step_min`.
    pub converged: bool,
    /// Final value of every restart, in restart order.
    pub trace: Vec<(usize, f64)>,
}

impl OptimizationReport {
    pub fn into_bound(self, id: BoundId) -> BoundResult {
        let r = if self.best_value.is_finite() {
            BoundResult::defined(id, self.best_value)
        } else {
            BoundResult::undefined(id, "no searched basis satisfied the bound's hypothesis")
        };
        r.with("restarts_used", self.restarts_used as f64)
            .with("evaluations", self.evaluations as f64)
            .with("converged", if self.converged { 1.0 } else { 0.0 })
    }
}

struct SearchOutcome {
    x: Vec<f64>,
    score: f64,
    evaluations: usize,
    converged: bool,
}

/// Coordinate compass search maximizing `score`.
fn compass_search(mut x: Vec<f64>, cfg: &OptimizerConfig, score: impl Fn(&[f64]) -> f64) -> SearchOutcome {
    let mut best = sanitize(score(&x));
    let mut evaluations = 1;
    let mut step = cfg.step_init;
    'outer: while step >= cfg.step_min {
        let mut improved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                if evaluations >= cfg.max_evals {
                    break 'outer;
                }
                let old = x[k];
                x[k] = old + dir * step;
                let value = sanitize(score(&x));
                evaluations += 1;
                if value > best + cfg.tol {
                    best = value;
                    improved = true;
                    break;
                }
                x[k] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    SearchOutcome { x, score: best, evaluations, converged: step < cfg.step_min }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn restart_rng(cfg: &OptimizerConfig, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    rng
}

/// Optimizes `objective` over orthonormal bases of dimension `dim`.
///
/// Restarts `0..seeds.len()` start at the seed bases; `cfg.restarts` further
/// restarts start at Haar-random bases. Ties keep the earliest restart.
pub fn optimize_over_bases<F>(
    dim: usize,
    seeds: &[OrthonormalBasis],
    objective: F,
    goal: Goal,
    cfg: &OptimizerConfig,
) -> OptimizationReport
where
    F: Fn(&OrthonormalBasis) -> f64 + Sync,
{
    let sign = match goal {
        Goal::Maximize => 1.0,
        Goal::Minimize => -1.0,
    };
    let total = seeds.len() + cfg.restarts;
    let outcomes: Vec<(SearchOutcome, ComplexMatrix)> = (0..total)
        .into_par_iter()
        .map(|restart| {
            let start = match seeds.get(restart) {
                Some(seed) => seed.as_matrix().clone(),
                None => {
                    let mut rng = restart_rng(cfg, restart - seeds.len());
                    random::haar_basis(dim, &mut rng).as_matrix().clone()
                }
            };
            let basis_at = |x: &[f64]| {
                let mut u = start.clone();
                apply_givens(&mut u, x);
                OrthonormalBasis::new_unchecked(u)
            };
            let out = compass_search(vec![0.0; UnitaryParams::count(dim)], cfg, |x| {
                sign * objective(&basis_at(x))
            });
            let mut u = start.clone();
            apply_givens(&mut u, &out.x);
            (out, u)
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    let mut trace = Vec::with_capacity(total);
    let mut evaluations = 0;
    for (restart, (out, _)) in outcomes.iter().enumerate() {
        evaluations += out.evaluations;
        trace.push((restart, sign * out.score));
        if best.map_or(true, |(_, b)| out.score > b) {
            best = Some((restart, out.score));
        }
    }
    let (best_index, _) = best.expect("at least one restart");
    let (out, u) = &outcomes[best_index];
    let best_basis = OrthonormalBasis::new_unchecked(u.clone());
    let best_value = if out.score.is_finite() { objective(&best_basis) } else { sign * out.score };
    OptimizationReport {
        best_value,
        best_basis,
        restarts_used: total,
        evaluations,
        converged: out.converged,
        trace,
    }
}

/// `|⟨ψ_n|v⟩|` for every basis vector.
fn component_magnitudes(basis: &OrthonormalBasis, v: &[C64]) -> Vec<f64> {
    let u = basis.as_matrix();
    let d = u.dim();
    (0..d)
        .map(|n| (0..d).map(|i| u[(i, n)].conj() * v[i]).sum::<C64>().norm())
        .collect()
}

struct Deviations {
    f: Vec<C64>,
    g: Vec<C64>,
    seeds: Vec<OrthonormalBasis>,
}

fn deviations(s: &QuantumState, a: &Observable, b: &Observable) -> Result<Deviations> {
    let f = moments::deviation_vector(s, a)?.into_inner();
    let g = moments::deviation_vector(s, b)?.into_inner();
    let seeds = vec![
        OrthonormalBasis::standard(s.dim()),
        a.eigenvectors().clone(),
        b.eigenvectors().clone(),
    ];
    Ok(Deviations { f, g, seeds })
}

/// Maximizes `(Σ_n |α_n||β_n|)²` over bases. The standard basis and the
/// eigenbases of `A` and `B` are always among the starts.
pub fn optimize_product_bound(
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    let dev = deviations(s, a, b)?;
    let objective = |basis: &OrthonormalBasis| {
        let x = component_magnitudes(basis, &dev.f);
        let y = component_magnitudes(basis, &dev.g);
        x.iter().zip(&y).map(|(p, q)| p * q).sum::<f64>().powi(2)
    };
    Ok(optimize_over_bases(s.dim(), &dev.seeds, objective, Goal::Maximize, cfg))
}

/// Maximizes `½ Σ_n (|α_n| + |β_n|)²` over bases.
pub fn optimize_sum_bound(
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    let dev = deviations(s, a, b)?;
    let objective = |basis: &OrthonormalBasis| {
        let x = component_magnitudes(basis, &dev.f);
        let y = component_magnitudes(basis, &dev.g);
        0.5 * x.iter().zip(&y).map(|(p, q)| (p + q).powi(2)).sum::<f64>()
    };
    Ok(optimize_over_bases(s.dim(), &dev.seeds, objective, Goal::Maximize, cfg))
}

/// Minimizes the reverse basis bound `Λ(Σ_n |α_n||β_n|)²` over bases where
/// it is defined. `best_value` is `+∞` if no searched basis qualifies.
pub fn optimize_reverse_basis_bound(
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    let dev = deviations(s, a, b)?;
    let objective = |basis: &OrthonormalBasis| {
        let x = component_magnitudes(basis, &dev.f);
        let y = component_magnitudes(basis, &dev.g);
        upper::reverse_basis_from_magnitudes(&x, &y).value
    };
    Ok(optimize_over_bases(s.dim(), &dev.seeds, objective, Goal::Minimize, cfg))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerpReport {
    /// Unit vector orthogonal to the state.
    pub vector: Vec<C64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Orthonormal basis of the complement of unit vector `psi`.
pub fn complement_basis(psi: &[C64]) -> Vec<Vec<C64>> {
    let d = psi.len();
    let mut kept: Vec<Vec<C64>> = vec![psi.to_vec()];
    for k in 0..d {
        if kept.len() == d {
            break;
        }
        let mut v = vec![C64::default(); d];
        v[k] = c(1.0, 0.0);
        // Two passes of Gram–Schmidt keep the result orthogonal to round-off.
        for _ in 0..2 {
            for w in &kept {
                let overlap = crate::linalg::inner(w, &v);
                for (x, y) in v.iter_mut().zip(w) {
                    *x -= overlap * y;
                }
            }
        }
        if crate::linalg::norm(&v) > 1e-6 {
            kept.push(normalized(&v).expect("nonzero"));
        }
    }
    kept.split_off(1)
}

/// Maximizes `objective` over unit vectors orthogonal to `psi`.
///
/// The vector is `Q z / ‖Q z‖` with `Q` an orthonormal basis of the
/// complement and `z ∈ ℂ^{d−1}` searched as `2(d−1)` reals. The complement
/// basis vectors are the seed starts.
///
/// # Panics
///
/// If `psi` has fewer than two components.
pub fn optimize_perp_state<F>(psi: &[C64], objective: F, cfg: &OptimizerConfig) -> PerpReport
where
    F: Fn(&[C64]) -> f64 + Sync,
{
    assert!(psi.len() >= 2, "orthogonal complement is empty");
    let q = complement_basis(psi);
    let k = q.len();
    let d = psi.len();
    let embed = |z: &[f64]| -> Option<Vec<C64>> {
        let mut v = vec![C64::default(); d];
        for (j, col) in q.iter().enumerate() {
            let w = C64::new(z[2 * j], z[2 * j + 1]);
            for (x, y) in v.iter_mut().zip(col) {
                *x += w * y;
            }
        }
        normalized(&v)
    };

    let total = k + cfg.restarts;
    let outcomes: Vec<SearchOutcome> = (0..total)
        .into_par_iter()
        .map(|restart| {
            let start = if restart < k {
                let mut z = vec![0.0; 2 * k];
                z[2 * restart] = 1.0;
                z
            } else {
                let mut rng = restart_rng(cfg, restart - k);
                random::gaussian_vector(k, &mut rng).iter().flat_map(|w| [w.re, w.im]).collect()
            };
            compass_search(start, cfg, |z| embed(z).map_or(f64::NEG_INFINITY, |v| objective(&v)))
        })
        .collect();

    let mut best = 0;
    for (i, out) in outcomes.iter().enumerate() {
        if out.score > outcomes[best].score {
            best = i;
        }
    }
    let vector = embed(&outcomes[best].x).unwrap_or_else(|| q[0].clone());
    let value = objective(&vector);
    PerpReport { vector, value, evaluations: outcomes.iter().map(|o| o.evaluations).sum() }
}
