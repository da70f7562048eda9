//! Bound identifiers, results and a single dispatch point.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{Observable, OrthonormalBasis, QuantumState};
use crate::optimizer::{self, OptimizerConfig};
use crate::{lower, upper};

/// Whether a bound sits below or above the exact quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
    /// Reported for comparison only; not a universal inequality.
    Comparison,
}

/// The exact quantity a bound is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// `ΔA²ΔB²`
    Product,
    /// `ΔA² + ΔB²`
    Sum,
    /// `ΔA + ΔB`
    StdSum,
}

macro_rules! bound_ids {
    ($($variant:ident => $name:literal, $side:ident, $quantity:ident;)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum BoundId {
            $($variant,)*
        }

        impl BoundId {
            pub const ALL: &'static [BoundId] = &[$(BoundId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(BoundId::$variant => $name,)*
                }
            }

            pub fn side(self) -> Side {
                match self {
                    $(BoundId::$variant => Side::$side,)*
                }
            }

            pub fn quantity(self) -> Quantity {
                match self {
                    $(BoundId::$variant => Quantity::$quantity,)*
                }
            }
        }

        impl FromStr for BoundId {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($name => Ok(BoundId::$variant),)*
                    other => Err(format!("unknown bound id `{other}`")),
                }
            }
        }
    };
}

bound_ids! {
    RsProduct => "rs_product", Lower, Product;
    BasisProduct => "basis_product", Lower, Product;
    FidelityProduct => "fidelity_product", Lower, Product;
    OptimizedProduct => "optimized_product", Lower, Product;
    ParallelogramSum => "parallelogram_sum", Lower, Sum;
    BasisSum => "basis_sum", Lower, Sum;
    OptimizedSum => "optimized_sum", Lower, Sum;
    MpSum1 => "mp_sum_1", Lower, Sum;
    MpSum2 => "mp_sum_2", Lower, Sum;
    ReverseFidelityProduct => "reverse_fidelity_product", Upper, Product;
    ReverseBasisProduct => "reverse_basis_product", Upper, Product;
    OptimizedReverseBasisProduct => "optimized_reverse_basis_product", Upper, Product;
    DwDeviationSum => "dw_deviation_sum", Upper, StdSum;
    DwVarianceSum => "dw_variance_sum", Upper, Sum;
    DwWeakDeviation => "dw_weak_deviation", Comparison, StdSum;
}

impl BoundId {
    /// Comparison curves from the literature rather than new bounds.
    pub fn is_baseline(self) -> bool {
        matches!(self, BoundId::MpSum1 | BoundId::MpSum2)
    }

    /// How far `value` sits on the wrong side of `exact`: positive means the
    /// inequality fails. `None` for comparison values.
    pub fn excess(self, value: f64, exact: f64) -> Option<f64> {
        match self.side() {
            Side::Lower => Some(value - exact),
            Side::Upper => Some(exact - value),
            Side::Comparison => None,
        }
    }

    pub fn requires_pure_state(self) -> bool {
        matches!(
            self,
            BoundId::BasisProduct
                | BoundId::BasisSum
                | BoundId::OptimizedProduct
                | BoundId::OptimizedSum
                | BoundId::MpSum1
                | BoundId::MpSum2
                | BoundId::ReverseBasisProduct
                | BoundId::OptimizedReverseBasisProduct
        )
    }
}

impl Serialize for BoundId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for BoundId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A bound value with its definedness and the intermediate quantities behind it.
///
/// An undefined bound carries `value = +∞` and a reason.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    pub id: BoundId,
    pub value: f64,
    pub defined: bool,
    pub reason: Option<String>,
    pub baseline: bool,
    pub intermediates: BTreeMap<String, f64>,
}

impl BoundResult {
    pub fn defined(id: BoundId, value: f64) -> Self {
        Self {
            id,
            value,
            defined: true,
            reason: None,
            baseline: id.is_baseline(),
            intermediates: BTreeMap::new(),
        }
    }

    pub fn undefined(id: BoundId, reason: impl Into<String>) -> Self {
        Self {
            id,
            value: f64::INFINITY,
            defined: false,
            reason: Some(reason.into()),
            baseline: id.is_baseline(),
            intermediates: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.intermediates.insert(name.to_owned(), value);
        self
    }

    pub fn intermediate(&self, name: &str) -> Option<f64> {
        self.intermediates.get(name).copied()
    }

    /// The defined value, if any.
    pub fn finite(&self) -> Option<f64> {
        self.defined.then_some(self.value)
    }
}

/// Inputs shared by the basis-dependent and optimized bounds.
#[derive(Clone, Debug, Default)]
pub struct EvalContext {
    /// Basis for `basis_*` bounds; the standard basis when absent.
    pub basis: Option<OrthonormalBasis>,
    pub optimizer: OptimizerConfig,
}

/// Evaluates any registered bound.
pub fn evaluate(
    id: BoundId,
    s: &QuantumState,
    a: &Observable,
    b: &Observable,
    ctx: &EvalContext,
) -> Result<BoundResult> {
    let standard;
    let basis = match &ctx.basis {
        Some(basis) => basis,
        None => {
            standard = OrthonormalBasis::standard(s.dim());
            &standard
        }
    };
    match id {
        BoundId::RsProduct => lower::rs_product_bound(s, a, b),
        BoundId::BasisProduct => lower::basis_product_bound(s, a, b, basis),
        BoundId::FidelityProduct => lower::fidelity_product_bound(s, a, b),
        BoundId::OptimizedProduct => {
            let report = optimizer::optimize_product_bound(s, a, b, &ctx.optimizer)?;
            Ok(report.into_bound(id))
        }
        BoundId::ParallelogramSum => lower::parallelogram_sum_bound(s, a, b),
        BoundId::BasisSum => lower::basis_sum_bound(s, a, b, basis),
        BoundId::OptimizedSum => {
            let report = optimizer::optimize_sum_bound(s, a, b, &ctx.optimizer)?;
            Ok(report.into_bound(id))
        }
        BoundId::MpSum1 => lower::mp_sum_bound_1(s, a, b, &ctx.optimizer),
        BoundId::MpSum2 => lower::mp_sum_bound_2(s, a, b),
        BoundId::ReverseFidelityProduct => upper::reverse_fidelity_product_bound(s, a, b),
        BoundId::ReverseBasisProduct => upper::reverse_basis_product_bound(s, a, b, basis),
        BoundId::OptimizedReverseBasisProduct => {
            let report = optimizer::optimize_reverse_basis_bound(s, a, b, &ctx.optimizer)?;
            Ok(report.into_bound(id))
        }
        BoundId::DwDeviationSum => upper::dw_deviation_sum_bound(s, a, b),
        BoundId::DwVarianceSum => upper::dw_variance_sum_bound(s, a, b),
        BoundId::DwWeakDeviation => upper::dw_weak_deviation(s, a, b),
    }
}
