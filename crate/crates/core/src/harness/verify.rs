//! Random-ensemble checks of the bound inequalities.
//!
//! Instance `i` of dimension `d` draws from its own ChaCha8 stream, so the
//! report does not depend on thread count. Even instances are Haar-random
//! pure states, odd instances normalized Wishart density matrices; both
//! observables are GUE-style and basis-dependent bounds use a Haar basis.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bound::{BoundId, BoundResult, EvalContext, Quantity, Side};
use crate::linalg::{ComplexMatrix, Observable, OrthonormalBasis, QuantumState};
use crate::moments::MomentSet;
use crate::optimizer::{OptimizerConfig, DEFAULT_SEED};
use crate::random;

use super::config::Config;
use super::{evaluate_lenient, HarnessError};

/// Inequalities must hold to within this absolute slack.
pub const VERIFY_TOL: f64 = 1e-10;

/// Bounds evaluated on every instance. The optimized product and sum bounds
/// are left out: each is a basis bound at some basis, which the random-basis
/// checks already cover.
pub const CHECKED_BOUNDS: &[BoundId] = &[
    BoundId::RsProduct,
    BoundId::BasisProduct,
    BoundId::FidelityProduct,
    BoundId::ParallelogramSum,
    BoundId::BasisSum,
    BoundId::MpSum1,
    BoundId::MpSum2,
    BoundId::ReverseFidelityProduct,
    BoundId::ReverseBasisProduct,
    BoundId::DwDeviationSum,
    BoundId::DwVarianceSum,
    BoundId::DwWeakDeviation,
];

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySpec {
    /// Instances per dimension.
    pub n: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    /// Search settings for the perpendicular-state baseline.
    pub perp_optimizer: OptimizerConfig,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self { n: 1000, dims: vec![2, 3, 4, 6], seed: DEFAULT_SEED, perp_optimizer: light_perp_optimizer() }
    }
}

/// Seed starts only, short budget: the baseline is valid for any
/// perpendicular vector, so the search depth does not affect soundness.
pub fn light_perp_optimizer() -> OptimizerConfig {
    OptimizerConfig { restarts: 0, max_evals: 500, ..OptimizerConfig::default() }
}

impl VerifySpec {
    /// Reads the `[verify]` section: `n`, `dims`, `seed`.
    pub fn from_config(cfg: &Config) -> Result<Self, HarnessError> {
        let mut spec = Self::default();
        cfg.check_keys("verify", &["n", "dims", "seed"])?;
        if let Some(n) = cfg.parse("verify", "n")? {
            spec.n = n;
        }
        if let Some(seed) = cfg.parse("verify", "seed")? {
            spec.seed = seed;
        }
        if let Some(dims) = cfg.get("verify", "dims") {
            spec.dims = parse_dims(dims)?;
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n == 0 {
            return Err(HarnessError::InvalidSpec("instance count must be ≥ 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| !(2..=32).contains(&d)) {
            return Err(HarnessError::InvalidSpec(format!(
                "dimensions must be between 2 and 32, got {:?}",
                self.dims
            )));
        }
        Ok(())
    }
}

/// `2,3,4` → `[2, 3, 4]`.
pub fn parse_dims(text: &str) -> Result<Vec<usize>, HarnessError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| HarnessError::InvalidSpec(format!("bad dimension `{s}`"))))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// A bound id or a check name.
    pub check: String,
    pub dim: usize,
    pub index: usize,
    /// SHA-256 of the instance's matrices.
    pub instance: String,
    /// Amount by which the inequality fails.
    pub slack: f64,
}

/// Per-bound or per-check tallies. `max_slack` is the largest value of
/// `bound − exact` (lower bounds) or `exact − bound` (upper bounds) seen;
/// it is ≤ 0 when the inequality holds with room to spare.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CheckStats {
    pub evaluated: usize,
    pub undefined: usize,
    pub undefined_fraction: f64,
    pub max_slack: Option<f64>,
}

/// How often a comparison value happened to exceed its exact quantity.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ComparisonStats {
    pub evaluated: usize,
    pub holds: usize,
    pub holds_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub dims: Vec<usize>,
    /// Instances per dimension.
    pub n: usize,
    pub instances: usize,
    pub tolerance: f64,
    pub bounds: BTreeMap<String, CheckStats>,
    pub checks: BTreeMap<String, CheckStats>,
    pub comparisons: BTreeMap<String, ComparisonStats>,
    pub violations: Vec<Violation>,
    /// SHA-256 over every instance digest, in order.
    pub digest: String,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Instance {
    state: QuantumState,
    a: Observable,
    b: Observable,
    basis: OrthonormalBasis,
}

fn instance_rng(seed: u64, dim: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((dim as u64) << 40) | index as u64);
    rng
}

fn draw(seed: u64, dim: usize, index: usize) -> Instance {
    let mut rng = instance_rng(seed, dim, index);
    let state = if index % 2 == 0 {
        random::haar_state(dim, &mut rng)
    } else {
        random::wishart_state(dim, &mut rng)
    };
    let a = random::gue_observable(dim, &mut rng);
    let b = random::gue_observable(dim, &mut rng);
    let basis = random::haar_basis(dim, &mut rng);
    Instance { state, a, b, basis }
}

fn hash_matrix(h: &mut Sha256, m: &ComplexMatrix) {
    for z in m.as_slice() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
}

fn digest(inst: &Instance) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((inst.state.dim() as u64).to_le_bytes());
    h.update([inst.state.is_pure() as u8]);
    hash_matrix(&mut h, &inst.state.density_matrix());
    hash_matrix(&mut h, inst.a.matrix());
    hash_matrix(&mut h, inst.b.matrix());
    hash_matrix(&mut h, inst.basis.as_matrix());
    h.finalize().into()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// What one instance contributed: `(name, slack)` with `None` for undefined.
struct Outcome {
    dim: usize,
    index: usize,
    digest: [u8; 32],
    bounds: Vec<(BoundId, Option<f64>)>,
    checks: Vec<(&'static str, Option<f64>)>,
    comparisons: Vec<(BoundId, bool)>,
}

fn exact(m: &MomentSet, q: Quantity) -> f64 {
    match q {
        Quantity::Product => m.product(),
        Quantity::Sum => m.sum(),
        Quantity::StdSum => m.std_a() + m.std_b(),
    }
}

fn check_instance(spec: &VerifySpec, dim: usize, index: usize) -> crate::Result<Outcome> {
    let inst = draw(spec.seed, dim, index);
    let (s, a, b) = (&inst.state, &inst.a, &inst.b);
    let ctx = EvalContext { basis: Some(inst.basis.clone()), optimizer: spec.perp_optimizer.clone() };
    let m = MomentSet::compute(s, a, b)?;

    let mut results: BTreeMap<BoundId, BoundResult> = BTreeMap::new();
    for &id in CHECKED_BOUNDS {
        if id.requires_pure_state() && !s.is_pure() {
            continue;
        }
        results.insert(id, evaluate_lenient(id, s, a, b, &ctx)?);
    }

    let mut bounds = Vec::new();
    let mut comparisons = Vec::new();
    for (&id, r) in &results {
        let e = exact(&m, id.quantity());
        match (id.side(), r.finite()) {
            (Side::Comparison, Some(v)) => comparisons.push((id, v >= e)),
            (Side::Comparison, None) => {}
            (_, v) => bounds.push((id, v.and_then(|v| id.excess(v, e)))),
        }
    }

    let value = |id: BoundId| results.get(&id).and_then(BoundResult::finite);
    let mut checks = vec![("covariance_cauchy_schwarz", Some(m.cov.abs() - m.std_a() * m.std_b()))];
    if let (Some(basis), Some(rs)) = (value(BoundId::BasisProduct), value(BoundId::RsProduct)) {
        checks.push(("chain_basis_over_rs", Some(rs - basis)));
    }
    let sandwich = |lower: BoundId, upper: BoundId, q: Quantity| {
        let e = exact(&m, q);
        match (value(lower), value(upper)) {
            (Some(l), Some(u)) => Some((l - e).max(e - u)),
            _ => None,
        }
    };
    checks.push((
        "sandwich_product",
        sandwich(BoundId::FidelityProduct, BoundId::ReverseFidelityProduct, Quantity::Product),
    ));
    checks.push(("sandwich_sum", sandwich(BoundId::ParallelogramSum, BoundId::DwVarianceSum, Quantity::Sum)));
    for id in [BoundId::ReverseFidelityProduct, BoundId::ReverseBasisProduct] {
        if let Some(r) = results.get(&id) {
            let name = match id {
                BoundId::ReverseFidelityProduct => "reverse_fidelity_factor_at_least_one",
                _ => "reverse_basis_factor_at_least_one",
            };
            checks.push((name, r.intermediate("factor").map(|f| 1.0 - f)));
        }
    }

    Ok(Outcome { dim, index, digest: digest(&inst), bounds, checks, comparisons })
}

fn tally(stats: &mut CheckStats, slack: Option<f64>) {
    stats.evaluated += 1;
    match slack {
        Some(s) => stats.max_slack = Some(stats.max_slack.map_or(s, |m: f64| m.max(s))),
        None => stats.undefined += 1,
    }
}

/// Draws `n` instances for every dimension and checks every bound
/// inequality on each.
pub fn run_verification(spec: &VerifySpec) -> Result<VerificationReport, HarnessError> {
    spec.validate()?;
    let work: Vec<(usize, usize)> =
        spec.dims.iter().flat_map(|&d| (0..spec.n).map(move |i| (d, i))).collect();
    let outcomes = work
        .into_par_iter()
        .map(|(d, i)| check_instance(spec, d, i))
        .collect::<crate::Result<Vec<_>>>()?;

    let mut bounds: BTreeMap<String, CheckStats> = BTreeMap::new();
    let mut checks: BTreeMap<String, CheckStats> = BTreeMap::new();
    let mut comparisons: BTreeMap<String, ComparisonStats> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut overall = Sha256::new();
    for o in &outcomes {
        overall.update(o.digest);
        let mut record = |table: &mut BTreeMap<String, CheckStats>, name: &str, slack: Option<f64>| {
            tally(table.entry(name.to_owned()).or_default(), slack);
            if let Some(s) = slack.filter(|&s| s > VERIFY_TOL) {
                violations.push(Violation {
                    check: name.to_owned(),
                    dim: o.dim,
                    index: o.index,
                    instance: hex(&o.digest),
                    slack: s,
                });
            }
        };
        for &(id, slack) in &o.bounds {
            record(&mut bounds, id.as_str(), slack);
        }
        for &(name, slack) in &o.checks {
            record(&mut checks, name, slack);
        }
        for &(id, holds) in &o.comparisons {
            let c = comparisons.entry(id.as_str().to_owned()).or_default();
            c.evaluated += 1;
            c.holds += holds as usize;
        }
    }
    for stats in bounds.values_mut().chain(checks.values_mut()) {
        stats.undefined_fraction = stats.undefined as f64 / stats.evaluated.max(1) as f64;
    }
    for c in comparisons.values_mut() {
        c.holds_fraction = c.holds as f64 / c.evaluated.max(1) as f64;
    }

    Ok(VerificationReport {
        seed: spec.seed,
        dims: spec.dims.clone(),
        n: spec.n,
        instances: outcomes.len(),
        tolerance: VERIFY_TOL,
        bounds,
        checks,
        comparisons,
        violations,
        digest: hex(&overall.finalize()),
    })
}
