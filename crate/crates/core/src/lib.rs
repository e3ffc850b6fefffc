//! Large-deviation rate functions for posterior distributions and maximum
//! likelihood estimators in natural and curved exponential families.
//!
//! Everything numeric is generic over [`numeric::Real`] (`f32` or `f64`);
//! the aliases at the crate root fix the scalar to `f64`.
//!
//! ```
//! use expldp_core::{rates, Family};
//!
//! let poisson = Family::builtin("poisson").unwrap();
//! let d = rates::kl_divergence(&poisson, &[2f64.ln()], &[0.0]).unwrap();
//! assert!((d - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
//! ```

// negated comparisons deliberately send NaN down the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod family;
pub mod legendre;
pub mod models;
pub mod numeric;
pub mod oracles;
pub mod rates;
pub mod scenarios;
pub mod verify;

pub use error::{Error, Result};
pub use family::{FamilyDescriptor, FamilyKind, GeneratingFamily, MeanPoint, NaturalPoint};
pub use legendre::{conjugate, conjugate_constrained, ConstraintSet, LegendreResult};
pub use models::{CurvedModel, Interval, ModelEvent, Prior};
pub use rates::{DualPair, RateKind, RateTable};
pub use scenarios::{run_scenario, Format, Scenario};

/// `f64` generating family.
pub type Family = GeneratingFamily<f64>;
/// `f64` curved model.
pub type Model = CurvedModel<f64>;
/// `f64` prior on model coordinates.
pub type ModelPrior = Prior<f64>;
/// `f64` interval-union event.
pub type Event = ModelEvent<f64>;
/// `f64` conjugate result.
pub type Legendre = LegendreResult<f64>;
/// `f64` rate table.
pub type Rates = RateTable<f64>;
