//! Accessible fidelity and quantumness of finite pure-state ensembles.
//!
//! An eavesdropper measures each system with a POVM and a partner
//! re-prepares a state from the classical outcome alone. The best average
//! fidelity over measurements is the *accessible fidelity* of the ensemble;
//! minimizing it over prior distributions gives the *quantumness* of the
//! state set.
//!
//! - [`linalg`]: small dense Hermitian kernel (Jacobi eigensolver).
//! - [`ensembles`]: states, ensembles, POVMs, canonical families, JSON.
//! - [`fidelity`]: formulas for a fixed measurement.
//! - [`bounds`]: closed forms and lower bounds.
//! - [`solvers`]: seesaw optimizers, oracles, and outer minimizations.

pub mod bounds;
pub mod ensembles;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod solvers;

pub use bounds::BoundsReport;
pub use ensembles::{Ensemble, Povm, PureState, ResponseMap};
pub use error::{Error, Result};
pub use fidelity::AchievabilityResult;
pub use linalg::{CMatrix, HermitianOperator, C64};
pub use solvers::{QuantumnessResult, SolverConfig};
