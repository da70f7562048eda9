//! Bounds checked against independent closed forms and brute force.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use varbound::linalg::inner;
use varbound::{evaluate, random, BoundId, EvalContext, MomentSet, Observable, OptimizerConfig, QuantumState};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// `(a_i − ⟨A⟩)·√F_i` in eigen-index order, computed from the definition.
fn weights(s: &QuantumState, a: &Observable) -> Vec<f64> {
    let psi = s.vector().unwrap();
    let mean = inner(psi, &a.matrix().mul_vec(psi)).re;
    a.eigenvalues()
        .iter()
        .zip(a.eigenvectors().vectors())
        .map(|(&ai, v)| (ai - mean) * inner(&v, psi).norm())
        .collect()
}

fn value(id: BoundId, s: &QuantumState, a: &Observable, b: &Observable) -> f64 {
    evaluate(id, s, a, b, &EvalContext::default()).unwrap().value
}

#[test]
fn sorted_sequence_bounds_match_brute_force_over_pairings() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for d in [2, 3, 4, 5] {
        for _ in 0..20 {
            let s = random::haar_state(d, &mut rng);
            let a = random::gue_observable(d, &mut rng);
            let b = random::gue_observable(d, &mut rng);
            let (u, v) = (weights(&s, &a), weights(&s, &b));
            let dots: Vec<f64> = permutations(d)
                .iter()
                .map(|p| u.iter().zip(p).map(|(x, &j)| x * v[j]).sum())
                .collect();
            let max_sq = dots.iter().map(|x| x * x).fold(0.0, f64::max);
            let max_dot = dots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let product = value(BoundId::FidelityProduct, &s, &a, &b);
            assert!((product - max_sq).abs() < 1e-12, "d={d}: {product} vs {max_sq}");
            let norms = u.iter().map(|x| x * x).sum::<f64>() + v.iter().map(|x| x * x).sum::<f64>();
            let sum = value(BoundId::ParallelogramSum, &s, &a, &b);
            let oracle = 0.5 * (norms + 2.0 * max_dot);
            assert!((sum - oracle).abs() < 1e-12, "d={d}: {sum} vs {oracle}");
        }
    }
}

#[test]
fn qubit_basis_bounds_are_basis_independent() {
    // For a pure qubit both deviation vectors lie on the single direction
    // orthogonal to the state, so every basis gives ΔA²ΔB² and ½(ΔA+ΔB)².
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..25 {
        let s = random::haar_state(2, &mut rng);
        let a = random::gue_observable(2, &mut rng);
        let b = random::gue_observable(2, &mut rng);
        let m = MomentSet::compute(&s, &a, &b).unwrap();
        let half_sq = 0.5 * (m.std_a() + m.std_b()).powi(2);
        let ctx = EvalContext { basis: Some(random::haar_basis(2, &mut rng)), optimizer: OptimizerConfig::default() };
        let bp = evaluate(BoundId::BasisProduct, &s, &a, &b, &ctx).unwrap().value;
        let bs = evaluate(BoundId::BasisSum, &s, &a, &b, &ctx).unwrap().value;
        assert!((bp - m.product()).abs() < 1e-10);
        assert!((bs - half_sq).abs() < 1e-10);
        let opt = evaluate(BoundId::OptimizedSum, &s, &a, &b, &ctx).unwrap().value;
        assert!((opt - half_sq).abs() < 1e-10);
    }
}

#[test]
fn mp2_is_half_the_variance_of_the_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for d in [2, 3, 6] {
        let s = random::haar_state(d, &mut rng);
        let a = random::gue_observable(d, &mut rng);
        let b = random::gue_observable(d, &mut rng);
        let m = MomentSet::compute(&s, &a, &b).unwrap();
        // Δ(A+B)² = ΔA² + ΔB² + 2Cov.
        let oracle = 0.5 * (m.var_a + m.var_b + 2.0 * m.cov);
        assert!((value(BoundId::MpSum2, &s, &a, &b) - oracle).abs() < 1e-10);
    }
}

#[test]
fn dw_bounds_match_moment_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in [2, 3, 4] {
        let s = random::wishart_state(d, &mut rng);
        let a = random::gue_observable(d, &mut rng);
        let b = random::gue_observable(d, &mut rng);
        let m = MomentSet::compute(&s, &a, &b).unwrap();
        // Δ(A−B)² = ΔA² + ΔB² − 2Cov.
        let var_diff = m.var_a + m.var_b - 2.0 * m.cov;
        let r = m.cov / (m.std_a() * m.std_b());
        let dev = (2.0 * var_diff / (1.0 - r)).sqrt();
        let var = 2.0 * var_diff / (1.0 - r) - 2.0 * m.std_a() * m.std_b();
        assert!((value(BoundId::DwDeviationSum, &s, &a, &b) - dev).abs() < 1e-9);
        assert!((value(BoundId::DwVarianceSum, &s, &a, &b) - var).abs() < 1e-9);
        assert!((value(BoundId::DwWeakDeviation, &s, &a, &b) - var_diff.sqrt()).abs() < 1e-9);
    }
}
