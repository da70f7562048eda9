//! Single-instance evaluation: every bound for one state and observable
//! pair, or one basis optimization with its restart trace.

use serde::Serialize;

use crate::bound::{BoundId, BoundResult, EvalContext, Quantity};
use crate::linalg::{qubit_state_from_bloch, OrthonormalBasis, QuantumState};
use crate::moments::MomentSet;
use crate::optimizer::{self, OptimizationReport, OptimizerConfig};

use super::config::{parse_matrix, parse_vector, Config};
use super::sweep::{optimizer_from_config, NamedObservable, ROW_TOL};
use super::{evaluate_lenient, parse_bound_list, HarnessError};

#[derive(Clone, Debug)]
pub struct Instance {
    pub state: QuantumState,
    pub a: NamedObservable,
    pub b: NamedObservable,
    /// Basis for the `basis_*` bounds; standard when absent.
    pub basis: Option<OrthonormalBasis>,
}

/// Where a state comes from on the command line or in a config file.
#[derive(Clone, Debug, PartialEq)]
pub enum StateInput {
    /// Vector literal, normalized on read.
    Vector(String),
    /// Density-matrix literal.
    Density(String),
    /// `x, y, z`
    Bloch(String),
}

impl StateInput {
    pub fn build(&self) -> Result<QuantumState, HarnessError> {
        let invalid = HarnessError::InvalidSpec;
        Ok(match self {
            StateInput::Vector(v) => QuantumState::pure_normalized(parse_vector(v).map_err(invalid)?)?,
            StateInput::Density(m) => QuantumState::mixed(parse_matrix(m).map_err(invalid)?)?,
            StateInput::Bloch(r) => {
                let parts = r
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| HarnessError::InvalidSpec(format!("Bloch vector `{r}`: {e}")))?;
                let r: [f64; 3] = parts
                    .try_into()
                    .map_err(|_| HarnessError::InvalidSpec("Bloch vector needs three components".into()))?;
                qubit_state_from_bloch(r)?
            }
        })
    }
}

impl Instance {
    pub fn new(
        state: &StateInput,
        a: &str,
        b: &str,
        basis: Option<&str>,
    ) -> Result<Self, HarnessError> {
        let state = state.build()?;
        let a = NamedObservable::parse(a)?;
        let b = NamedObservable::parse(b)?;
        let basis = basis
            .map(|m| -> Result<_, HarnessError> {
                let m = parse_matrix(m).map_err(HarnessError::InvalidSpec)?;
                Ok(OrthonormalBasis::new(m)?)
            })
            .transpose()?;
        let d = state.dim();
        for (label, dim) in [
            (&a.label, a.observable.dim()),
            (&b.label, b.observable.dim()),
        ] {
            if dim != d {
                return Err(HarnessError::InvalidSpec(format!(
                    "observable `{label}` has dimension {dim}, state has {d}"
                )));
            }
        }
        if let Some(basis) = &basis {
            if basis.dim() != d {
                return Err(HarnessError::InvalidSpec(format!(
                    "basis has dimension {}, state has {d}",
                    basis.dim()
                )));
            }
        }
        Ok(Self { state, a, b, basis })
    }

    /// Reads the `[instance]` section: `observable_a`, `observable_b`, one
    /// of `state` / `rho` / `bloch`, and optionally `basis` (columns are the
    /// basis vectors).
    pub fn from_config(cfg: &Config) -> Result<Self, HarnessError> {
        cfg.check_keys("instance", &["observable_a", "observable_b", "state", "rho", "bloch", "basis", "bounds"])?;
        let get = |k: &str| cfg.get("instance", k);
        let need = |k: &str| get(k).ok_or_else(|| HarnessError::InvalidSpec(format!("[instance] needs `{k}`")));
        let inputs: Vec<StateInput> = [
            get("state").map(|v| StateInput::Vector(v.into())),
            get("rho").map(|v| StateInput::Density(v.into())),
            get("bloch").map(|v| StateInput::Bloch(v.into())),
        ]
        .into_iter()
        .flatten()
        .collect();
        let [state] = inputs.as_slice() else {
            return Err(HarnessError::InvalidSpec(
                "[instance] needs exactly one of `state`, `rho`, `bloch`".into(),
            ));
        };
        Self::new(state, need("observable_a")?, need("observable_b")?, get("basis"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Exact {
    pub variance_product: f64,
    pub variance_sum: f64,
    pub std_sum: f64,
}

impl Exact {
    pub fn from_moments(m: &MomentSet) -> Self {
        Self { variance_product: m.product(), variance_sum: m.sum(), std_sum: m.std_a() + m.std_b() }
    }

    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Product => self.variance_product,
            Quantity::Sum => self.variance_sum,
            Quantity::StdSum => self.std_sum,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Moments {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub cov: f64,
    /// Imaginary part of `⟨[A, B]⟩`; the real part vanishes.
    pub comm_expect_im: f64,
    pub anticomm_expect: f64,
}

impl From<&MomentSet> for Moments {
    fn from(m: &MomentSet) -> Self {
        Self {
            mean_a: m.mean_a,
            mean_b: m.mean_b,
            var_a: m.var_a,
            var_b: m.var_b,
            cov: m.cov,
            comm_expect_im: m.comm_expect.im,
            anticomm_expect: m.anticomm_expect,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComputeReport {
    pub observable_a: String,
    pub observable_b: String,
    pub pure: bool,
    pub moments: Moments,
    pub exact: Exact,
    pub bounds: Vec<BoundResult>,
}

impl ComputeReport {
    pub fn violations(&self) -> Vec<(BoundId, f64)> {
        self.bounds
            .iter()
            .filter_map(|r| {
                let excess = r.id.excess(r.finite()?, self.exact.get(r.id.quantity()))?;
                (excess > ROW_TOL).then_some((r.id, excess))
            })
            .collect()
    }
}

/// Evaluates `bounds` (all registered bounds when empty) on one instance.
/// Pure-state bounds on a mixed state come back undefined.
pub fn run_compute(
    inst: &Instance,
    bounds: &[BoundId],
    optimizer: &OptimizerConfig,
) -> Result<ComputeReport, HarnessError> {
    let (a, b) = (&inst.a.observable, &inst.b.observable);
    let m = MomentSet::compute(&inst.state, a, b)?;
    let ctx = EvalContext { basis: inst.basis.clone(), optimizer: optimizer.clone() };
    let ids = if bounds.is_empty() { BoundId::ALL } else { bounds };
    let results = ids
        .iter()
        .map(|&id| evaluate_lenient(id, &inst.state, a, b, &ctx))
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(ComputeReport {
        observable_a: inst.a.label.clone(),
        observable_b: inst.b.label.clone(),
        pure: inst.state.is_pure(),
        moments: Moments::from(&m),
        exact: Exact::from_moments(&m),
        bounds: results,
    })
}

/// `bounds` list plus optimizer settings from a config file.
pub fn compute_options(cfg: &Config) -> Result<(Vec<BoundId>, OptimizerConfig), HarnessError> {
    let bounds = cfg.get("instance", "bounds").map(parse_bound_list).transpose()?.unwrap_or_default();
    Ok((bounds, optimizer_from_config(cfg)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeTarget {
    Product,
    Sum,
    ReverseProduct,
}

impl std::str::FromStr for OptimizeTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "product" => Ok(Self::Product),
            "sum" => Ok(Self::Sum),
            "reverse_product" => Ok(Self::ReverseProduct),
            other => Err(format!("unknown target `{other}` (expected product, sum or reverse_product)")),
        }
    }
}

impl OptimizeTarget {
    pub fn bound_id(self) -> BoundId {
        match self {
            Self::Product => BoundId::OptimizedProduct,
            Self::Sum => BoundId::OptimizedSum,
            Self::ReverseProduct => BoundId::OptimizedReverseBasisProduct,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizeOutput {
    pub target: OptimizeTarget,
    pub exact: Exact,
    pub config: OptimizerConfig,
    pub report: OptimizationReport,
}

impl OptimizeOutput {
    /// `best − exact` (or `exact − best` for the reverse target) when it
    /// exceeds the row tolerance.
    pub fn violation(&self) -> Option<f64> {
        let id = self.target.bound_id();
        if !self.report.best_value.is_finite() {
            return None;
        }
        let excess = id.excess(self.report.best_value, self.exact.get(id.quantity()))?;
        (excess > ROW_TOL).then_some(excess)
    }
}

pub fn run_optimize(
    inst: &Instance,
    target: OptimizeTarget,
    cfg: &OptimizerConfig,
) -> Result<OptimizeOutput, HarnessError> {
    let (s, a, b) = (&inst.state, &inst.a.observable, &inst.b.observable);
    let m = MomentSet::compute(s, a, b)?;
    let report = match target {
        OptimizeTarget::Product => optimizer::optimize_product_bound(s, a, b, cfg)?,
        OptimizeTarget::Sum => optimizer::optimize_sum_bound(s, a, b, cfg)?,
        OptimizeTarget::ReverseProduct => optimizer::optimize_reverse_basis_bound(s, a, b, cfg)?,
    };
    Ok(OptimizeOutput { target, exact: Exact::from_moments(&m), config: cfg.clone(), report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ket0(a: &str, b: &str) -> Instance {
        Instance::new(&StateInput::Vector("[1, 0]".into()), a, b, None).unwrap()
    }

    #[test]
    fn qubit_spot_values() {
        let r = run_compute(&ket0("sx", "sy"), &[], &OptimizerConfig::default()).unwrap();
        assert_eq!(r.bounds.len(), BoundId::ALL.len());
        let get = |id| r.bounds.iter().find(|b| b.id == id).unwrap().value;
        assert_abs_diff_eq!(get(BoundId::RsProduct), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(get(BoundId::DwDeviationSum), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.exact.std_sum, 2.0, epsilon = 1e-12);
        assert!(r.violations().is_empty());
    }

    #[test]
    fn mixed_states_mark_pure_only_bounds() {
        let inst = Instance::new(&StateInput::Bloch("0, 0, 0.5".into()), "sx", "sy", None).unwrap();
        let r = run_compute(&inst, &[BoundId::BasisSum, BoundId::RsProduct], &OptimizerConfig::default())
            .unwrap();
        assert!(!r.pure);
        assert!(!r.bounds[0].defined);
        assert!(r.bounds[1].defined);
    }

    #[test]
    fn instance_config() {
        let cfg: Config = "[instance]\nobservable_a = lx\nobservable_b = ly\nstate = [1, 0, 0]\nbounds = rs_product\n"
            .parse()
            .unwrap();
        let inst = Instance::from_config(&cfg).unwrap();
        let (bounds, _) = compute_options(&cfg).unwrap();
        let r = run_compute(&inst, &bounds, &OptimizerConfig::default()).unwrap();
        assert_abs_diff_eq!(r.bounds[0].value, 0.25, epsilon = 1e-12);

        let two: Config = "[instance]\nobservable_a = sx\nobservable_b = sy\nstate = [1, 0]\nbloch = 0,0,1\n"
            .parse()
            .unwrap();
        assert!(Instance::from_config(&two).is_err());
        assert!(Instance::new(&StateInput::Vector("[1, 0]".into()), "lx", "sy", None).is_err());
    }

    #[test]
    fn optimize_saturates_on_ket0() {
        let cfg = OptimizerConfig { restarts: 2, ..Default::default() };
        let out = run_optimize(&ket0("sx", "sy"), OptimizeTarget::Product, &cfg).unwrap();
        assert_abs_diff_eq!(out.report.best_value, 1.0, epsilon = 1e-9);
        assert_eq!(out.report.trace.len(), 5);
        assert!(out.violation().is_none());
    }
}
