//! Reduced optical dynamics of an optomechanical cavity with linear and
//! quadratic position coupling, and Fisher-information tools for estimating
//! the quadratic coupling constant.
//!
//! Every numeric type is generic over [`Real`]; the `*F64` aliases below are
//! what most callers want.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimation;
pub mod model;
pub mod oracle;
pub mod propagator;
pub mod scalar;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
pub use estimation::{DerivativeStep, FisherRecord, Pvm};
pub use model::{BlockQuantities, ModelParams, UnitSystem};
pub use propagator::{evolve, evolve_series, QuadForm};
pub use scalar::Real;
pub use state::{CMatrix, InitialOpticalState, OpticalState, StateKind};

pub type C64 = num_complex::Complex<f64>;
pub type ModelParamsF64 = ModelParams<f64>;
pub type InitialOpticalStateF64 = InitialOpticalState<f64>;
pub type OpticalStateF64 = OpticalState<f64>;
pub type QuadFormF64 = QuadForm<f64>;
pub type FisherRecordF64 = FisherRecord<f64>;
