//! One-parameter sweeps over a family of states.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bound::{BoundId, BoundResult, EvalContext, Quantity};
use crate::linalg::{
    c, pauli_operators, qubit_state_from_bloch, spin1_operators, Observable, QuantumState, C64,
};
use crate::moments::MomentSet;
use crate::optimizer::OptimizerConfig;

use super::config::{parse_matrix, parse_vector, Config};
use super::{evaluate_lenient, parse_bound_list, HarnessError};

/// Slack allowed when checking sweep rows against the exact quantities.
pub const ROW_TOL: f64 = 1e-10;

const SIGMA_Y_NOTE: &str = "the Bloch family's second Pauli component is read as sigma_y";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Custom,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Custom => "custom",
        }
    }
}

impl FromStr for Preset {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s.trim() {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "custom" => Ok(Preset::Custom),
            other => Err(HarnessError::UnknownPreset(other.to_owned())),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `count` equally spaced angles from `start` to `stop`, both included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Default for ThetaGrid {
    fn default() -> Self {
        Self { start: 0.0, stop: PI, count: 181 }
    }
}

impl ThetaGrid {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.count < 2 {
            return Err(HarnessError::InvalidSpec(format!("theta count must be ≥ 2, got {}", self.count)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(HarnessError::InvalidSpec("theta range must be finite".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        let step = (self.stop - self.start) / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { self.stop } else { self.start + step * i as f64 })
            .collect()
    }
}

/// An observable together with the text it was built from.
#[derive(Clone, Debug)]
pub struct NamedObservable {
    pub label: String,
    pub observable: Observable,
}

impl NamedObservable {
    /// `lx`, `ly`, `lz` (spin 1), `sx`, `sy`, `sz` (Pauli), or a matrix literal.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let label = text.trim().to_owned();
        let (lx, ly, lz) = spin1_operators();
        let (sx, sy, sz) = pauli_operators();
        let observable = match label.as_str() {
            "lx" => lx,
            "ly" => ly,
            "lz" => lz,
            "sx" => sx,
            "sy" => sy,
            "sz" => sz,
            literal => {
                let m = parse_matrix(literal).map_err(HarnessError::InvalidSpec)?;
                Observable::new(m)?
            }
        };
        Ok(Self { label, observable })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateFamily {
    /// `cosθ|1⟩ − sinθ|0⟩` for spin 1, basis order `(|1⟩, |0⟩, |−1⟩)`.
    Spin1Fig1,
    /// `ρ = ½(I + cos(θ/2)σx + (√3/2)sin(θ/2)σy + ½sin(θ/2)σz)`.
    BlochFig3,
    /// `(cosθ|u⟩ + sinθ|w⟩)/‖·‖`.
    Superposition { u: Vec<C64>, w: Vec<C64> },
}

impl StateFamily {
    pub fn name(&self) -> &'static str {
        match self {
            StateFamily::Spin1Fig1 => "spin1_fig1",
            StateFamily::BlochFig3 => "bloch_fig3",
            StateFamily::Superposition { .. } => "superposition",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            StateFamily::Spin1Fig1 => 3,
            StateFamily::BlochFig3 => 2,
            StateFamily::Superposition { u, .. } => u.len(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            StateFamily::Spin1Fig1 => "cos(t)|1> - sin(t)|0>, basis (|1>, |0>, |-1>)".into(),
            StateFamily::BlochFig3 => {
                "rho = (I + cos(t/2) sx + (sqrt(3)/2) sin(t/2) sy + (1/2) sin(t/2) sz)/2".into()
            }
            StateFamily::Superposition { u, w } => {
                format!("normalize(cos(t) u + sin(t) w), u = {u:?}, w = {w:?}")
            }
        }
    }

    pub fn state(&self, theta: f64) -> crate::Result<QuantumState> {
        match self {
            StateFamily::Spin1Fig1 => {
                QuantumState::pure(vec![c(theta.cos(), 0.0), c(-theta.sin(), 0.0), c(0.0, 0.0)])
            }
            StateFamily::BlochFig3 => {
                let h = theta / 2.0;
                qubit_state_from_bloch([h.cos(), 0.75f64.sqrt() * h.sin(), 0.5 * h.sin()])
            }
            StateFamily::Superposition { u, w } => {
                let (ct, st) = (theta.cos(), theta.sin());
                QuantumState::pure_normalized(u.iter().zip(w).map(|(x, y)| x * ct + y * st).collect())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub preset: Preset,
    pub grid: ThetaGrid,
    pub observable_a: NamedObservable,
    pub observable_b: NamedObservable,
    pub family: StateFamily,
    pub bounds: Vec<BoundId>,
    /// Used by optimized bounds; the default configuration when absent.
    pub optimizer: Option<OptimizerConfig>,
}

impl SweepSpec {
    /// The built-in figure setups. `Custom` has no defaults.
    pub fn preset(preset: Preset) -> Result<Self, HarnessError> {
        use BoundId::*;
        let named = |s: &str| NamedObservable::parse(s).expect("built-in observable");
        let (a, b, family, bounds) = match preset {
            Preset::Fig1 => ("lx", "ly", StateFamily::Spin1Fig1, vec![RsProduct, FidelityProduct, OptimizedProduct]),
            Preset::Fig2 => ("lx", "ly", StateFamily::Spin1Fig1, vec![ParallelogramSum, MpSum2, MpSum1]),
            Preset::Fig3 => ("sx", "sz", StateFamily::BlochFig3, vec![ReverseFidelityProduct]),
            Preset::Fig4 => (
                "sx",
                "sz",
                StateFamily::BlochFig3,
                vec![DwVarianceSum, DwDeviationSum, DwWeakDeviation],
            ),
            Preset::Custom => {
                return Err(HarnessError::InvalidSpec(
                    "the custom preset needs observables and a state family".into(),
                ))
            }
        };
        Ok(Self {
            preset,
            grid: ThetaGrid::default(),
            observable_a: named(a),
            observable_b: named(b),
            family,
            bounds,
            optimizer: None,
        })
    }

    /// Reads the `[sweep]` and `[optimizer]` sections.
    ///
    /// Figure presets fix the observables and the state family; the grid,
    /// bound list and optimizer settings may be overridden.
    pub fn from_config(cfg: &Config) -> Result<Self, HarnessError> {
        cfg.check_keys(
            "sweep",
            &[
                "preset", "theta_start", "theta_stop", "theta_count", "bounds", "observable_a", "observable_b",
                "state_family", "state_u", "state_w",
            ],
        )?;
        let preset: Preset = cfg.get("sweep", "preset").unwrap_or("custom").parse()?;
        let mut spec = if preset == Preset::Custom {
            let need = |key: &str| {
                cfg.get("sweep", key)
                    .ok_or_else(|| HarnessError::InvalidSpec(format!("custom sweep needs `{key}`")))
            };
            let family = match need("state_family")? {
                "spin1_fig1" => StateFamily::Spin1Fig1,
                "bloch_fig3" => StateFamily::BlochFig3,
                "superposition" => {
                    let vec_of = |key: &str| need(key).and_then(|v| parse_vector(v).map_err(HarnessError::InvalidSpec));
                    let (u, w) = (vec_of("state_u")?, vec_of("state_w")?);
                    if u.len() != w.len() {
                        return Err(HarnessError::InvalidSpec("state_u and state_w differ in length".into()));
                    }
                    StateFamily::Superposition { u, w }
                }
                other => return Err(HarnessError::InvalidSpec(format!("unknown state family `{other}`"))),
            };
            Self {
                preset,
                grid: ThetaGrid::default(),
                observable_a: NamedObservable::parse(need("observable_a")?)?,
                observable_b: NamedObservable::parse(need("observable_b")?)?,
                family,
                bounds: Vec::new(),
                optimizer: None,
            }
        } else {
            for key in ["observable_a", "observable_b", "state_family", "state_u", "state_w"] {
                if cfg.get("sweep", key).is_some() {
                    return Err(HarnessError::InvalidSpec(format!(
                        "preset {preset} fixes `{key}`; use preset = custom"
                    )));
                }
            }
            Self::preset(preset)?
        };

        if let Some(v) = cfg.parse("sweep", "theta_start")? {
            spec.grid.start = v;
        }
        if let Some(v) = cfg.parse("sweep", "theta_stop")? {
            spec.grid.stop = v;
        }
        if let Some(v) = cfg.parse("sweep", "theta_count")? {
            spec.grid.count = v;
        }
        if let Some(list) = cfg.get("sweep", "bounds") {
            spec.bounds = parse_bound_list(list)?;
        }
        if cfg.has_section("optimizer") {
            spec.optimizer = Some(optimizer_from_config(cfg)?);
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.grid.validate()?;
        let d = self.family.dim();
        for obs in [&self.observable_a, &self.observable_b] {
            if obs.observable.dim() != d {
                return Err(HarnessError::InvalidSpec(format!(
                    "observable `{}` has dimension {}, state family has {d}",
                    obs.label,
                    obs.observable.dim()
                )));
            }
        }
        Ok(())
    }

    pub fn metadata(&self) -> BTreeMap<String, Value> {
        let mut m = BTreeMap::new();
        m.insert("preset".into(), json!(self.preset.as_str()));
        m.insert("observable_a".into(), json!(self.observable_a.label));
        m.insert("observable_b".into(), json!(self.observable_b.label));
        m.insert("state_family".into(), json!(self.family.name()));
        m.insert("state_family_definition".into(), json!(self.family.describe()));
        m.insert(
            "theta_grid".into(),
            json!({ "start": self.grid.start, "stop": self.grid.stop, "count": self.grid.count }),
        );
        m.insert("bounds".into(), json!(self.bounds.iter().map(|b| b.as_str()).collect::<Vec<_>>()));
        m.insert(
            "optimizer".into(),
            serde_json::to_value(self.optimizer.clone().unwrap_or_default()).expect("plain struct"),
        );
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        if self.family == StateFamily::BlochFig3 {
            m.insert("note".into(), json!(SIGMA_Y_NOTE));
        }
        m
    }
}

/// Reads an `[optimizer]` section over the defaults.
pub fn optimizer_from_config(cfg: &Config) -> Result<OptimizerConfig, HarnessError> {
    let mut o = OptimizerConfig::default();
    cfg.check_keys("optimizer", &["restarts", "seed", "max_evals", "step_init", "step_min", "tol"])?;
    if let Some(v) = cfg.parse("optimizer", "restarts")? {
        o.restarts = v;
    }
    if let Some(v) = cfg.parse("optimizer", "seed")? {
        o.seed = v;
    }
    if let Some(v) = cfg.parse("optimizer", "max_evals")? {
        o.max_evals = v;
    }
    if let Some(v) = cfg.parse("optimizer", "step_init")? {
        o.step_init = v;
    }
    if let Some(v) = cfg.parse("optimizer", "step_min")? {
        o.step_min = v;
    }
    if let Some(v) = cfg.parse("optimizer", "tol")? {
        o.tol = v;
    }
    Ok(o)
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub theta: f64,
    /// `ΔA²ΔB²`
    pub variance_product: f64,
    /// `ΔA² + ΔB²`
    pub variance_sum: f64,
    /// `ΔA + ΔB`
    pub std_sum: f64,
    /// One result per requested bound, in request order.
    pub bounds: Vec<BoundResult>,
}

impl SweepRow {
    pub fn exact(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Product => self.variance_product,
            Quantity::Sum => self.variance_sum,
            Quantity::StdSum => self.std_sum,
        }
    }

    pub fn bound(&self, id: BoundId) -> Option<&BoundResult> {
        self.bounds.iter().find(|r| r.id == id)
    }

    /// Bounds on the wrong side of their exact quantity by more than
    /// [`ROW_TOL`], with the amount.
    pub fn violations(&self) -> Vec<(BoundId, f64)> {
        self.bounds
            .iter()
            .filter_map(|r| {
                let excess = r.id.excess(r.finite()?, self.exact(r.id.quantity()))?;
                (excess > ROW_TOL).then_some((r.id, excess))
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub bounds: Vec<BoundId>,
    pub metadata: BTreeMap<String, Value>,
    /// θ ascending for increasing grids.
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, id: BoundId) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.bound(id).and_then(BoundResult::finite)).collect()
    }
}

/// Evaluates every requested bound at every grid point. Rows are computed in
/// parallel and returned in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, HarnessError> {
    spec.validate()?;
    let ctx = EvalContext { basis: None, optimizer: spec.optimizer.clone().unwrap_or_default() };
    let (a, b) = (&spec.observable_a.observable, &spec.observable_b.observable);
    let rows = spec
        .grid
        .points()
        .into_par_iter()
        .map(|theta| -> Result<SweepRow, HarnessError> {
            let s = spec.family.state(theta)?;
            let m = MomentSet::compute(&s, a, b)?;
            let bounds = spec
                .bounds
                .iter()
                .map(|&id| evaluate_lenient(id, &s, a, b, &ctx))
                .collect::<crate::Result<Vec<_>>>()?;
            Ok(SweepRow {
                theta,
                variance_product: m.product(),
                variance_sum: m.sum(),
                std_sum: m.std_a() + m.std_b(),
                bounds,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepTable { bounds: spec.bounds.clone(), metadata: spec.metadata(), rows })
}
