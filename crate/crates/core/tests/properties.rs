//! Invariance properties of the bounds over random instances.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use varbound::linalg::ComplexMatrix;
use varbound::{evaluate, random, BoundId, EvalContext, MomentSet, Observable, QuantumState, C64};

/// Bounds that need no search.
const DIRECT: &[BoundId] = &[
    BoundId::RsProduct,
    BoundId::FidelityProduct,
    BoundId::ParallelogramSum,
    BoundId::MpSum2,
    BoundId::ReverseFidelityProduct,
    BoundId::DwDeviationSum,
    BoundId::DwVarianceSum,
    BoundId::DwWeakDeviation,
];

const MIXED_OK: &[BoundId] = &[
    BoundId::RsProduct,
    BoundId::FidelityProduct,
    BoundId::ParallelogramSum,
    BoundId::ReverseFidelityProduct,
    BoundId::DwDeviationSum,
    BoundId::DwVarianceSum,
    BoundId::DwWeakDeviation,
];

struct Case {
    psi: Vec<C64>,
    a: Observable,
    b: Observable,
}

fn case(seed: u64, d: usize) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = random::haar_state(d, &mut rng).vector().unwrap().to_vec();
    Case { psi, a: random::gue_observable(d, &mut rng), b: random::gue_observable(d, &mut rng) }
}

fn values(ids: &[BoundId], s: &QuantumState, a: &Observable, b: &Observable) -> Vec<(bool, f64)> {
    let ctx = EvalContext::default();
    ids.iter()
        .map(|&id| {
            let r = evaluate(id, s, a, b, &ctx).unwrap();
            (r.defined, r.value)
        })
        .collect()
}

fn assert_same(x: &[(bool, f64)], y: &[(bool, f64)], ids: &[BoundId], tol: f64) {
    for ((p, q), id) in x.iter().zip(y).zip(ids) {
        assert_eq!(p.0, q.0, "{id}: definedness differs");
        if p.0 {
            let scale = 1.0f64.max(p.1.abs());
            assert!((p.1 - q.1).abs() <= tol * scale, "{id}: {} vs {}", p.1, q.1);
        }
    }
}

fn conjugate(u: &ComplexMatrix, m: &Observable) -> Observable {
    Observable::new((&(u * m.matrix()) * &u.adjoint()).hermitian_part()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn global_phase_is_irrelevant(seed in any::<u64>(), d in 2usize..6, phase in 0.0..std::f64::consts::TAU) {
        let k = case(seed, d);
        let z = C64::from_polar(1.0, phase);
        let s = QuantumState::pure(k.psi.clone()).unwrap();
        let t = QuantumState::pure(k.psi.iter().map(|x| x * z).collect()).unwrap();
        assert_same(&values(DIRECT, &s, &k.a, &k.b), &values(DIRECT, &t, &k.a, &k.b), DIRECT, 1e-9);
    }

    #[test]
    fn shifts_leave_bounds_unchanged(seed in any::<u64>(), d in 2usize..6, ca in -5.0..5.0f64, cb in -5.0..5.0f64) {
        let k = case(seed, d);
        let s = QuantumState::pure(k.psi.clone()).unwrap();
        // The weak comparison value depends on A − B only, so it is shift
        // invariant only for equal shifts; leave it out.
        let ids = &DIRECT[..DIRECT.len() - 1];
        let shifted = values(ids, &s, &k.a.shifted(ca), &k.b.shifted(cb));
        assert_same(&values(ids, &s, &k.a, &k.b), &shifted, ids, 1e-8);
    }

    #[test]
    fn rank_one_density_matches_pure_state(seed in any::<u64>(), d in 2usize..6) {
        let k = case(seed, d);
        let s = QuantumState::pure(k.psi.clone()).unwrap();
        let rho = QuantumState::mixed(ComplexMatrix::outer(&k.psi)).unwrap();
        assert_same(&values(MIXED_OK, &s, &k.a, &k.b), &values(MIXED_OK, &rho, &k.a, &k.b), MIXED_OK, 1e-9);
    }

    #[test]
    fn joint_unitary_rotation_is_irrelevant(seed in any::<u64>(), d in 2usize..5) {
        let k = case(seed, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let u = random::haar_basis(d, &mut rng).as_matrix().clone();
        let s = QuantumState::pure(k.psi.clone()).unwrap();
        let t = QuantumState::pure_normalized(u.mul_vec(&k.psi)).unwrap();
        let (ua, ub) = (conjugate(&u, &k.a), conjugate(&u, &k.b));
        assert_same(&values(DIRECT, &s, &k.a, &k.b), &values(DIRECT, &t, &ua, &ub), DIRECT, 1e-8);
    }

    #[test]
    fn swapping_observables_keeps_symmetric_bounds(seed in any::<u64>(), d in 2usize..6) {
        let k = case(seed, d);
        let s = QuantumState::pure(k.psi.clone()).unwrap();
        let ids = [BoundId::RsProduct, BoundId::FidelityProduct, BoundId::ParallelogramSum, BoundId::DwVarianceSum];
        assert_same(&values(&ids, &s, &k.a, &k.b), &values(&ids, &s, &k.b, &k.a), &ids, 1e-9);
    }

    #[test]
    fn wishart_moments_obey_cauchy_schwarz(seed in any::<u64>(), d in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::wishart_state(d, &mut rng);
        let a = random::gue_observable(d, &mut rng);
        let b = random::gue_observable(d, &mut rng);
        let m = MomentSet::compute(&rho, &a, &b).unwrap();
        prop_assert!(m.cov * m.cov <= m.var_a * m.var_b + 1e-9);
        prop_assert!(m.comm_expect.re.abs() < 1e-10);
    }
}
