//! Reasoning over finite-domain nondeterministic structural causal models.
//!
//! A model assigns every endogenous variable a *set-valued* equation over its parents.
//! On top of solving and intervening, the crate evaluates causal formulas in full
//! settings, partial settings and whole models, decides (counterfactual) dependence,
//! recovers models from exhaustive interventional possibility data, enumerates structural
//! simplifications and decides actual causation with witnesses.

pub mod actual_cause;
pub mod dependence;
pub mod discovery;
mod error;
pub mod fixtures;
pub mod formula;
pub mod graph;
pub mod json;
pub mod model;
pub mod random;
pub mod signature;
pub mod simplification;
mod value_set;

pub use error::{Error, Result};
pub use graph::{Dag, Edge};
pub use json::{validate_model, ModelDoc};
pub use model::{Diagnostic, MultiFunction, Nscm, Severity};
pub use signature::{Context, Intervention, Signature, State, VarId, World};
pub use value_set::{ValueSet, MAX_RANGE};
