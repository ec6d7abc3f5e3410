//! Toolkit for generalized probabilistic theories: convex state spaces,
//! effects and measurements, linear-programming state discrimination,
//! Bloch and Hermitian representations, transformation-group machinery,
//! and an auditor that checks built-in theories against a set of
//! operational requirements.

pub mod audit;
pub mod bloch;
pub mod composite;
pub mod error;
pub mod groups;
pub mod hermitian;
pub mod lp;
pub mod instances;
pub mod polytope;
pub mod report;
pub mod spec_file;
pub mod space;
pub mod state;

pub use error::{Error, Result};
pub use space::{CompositeRule, EffectPolicy, SpaceRep, StateSpaceDescriptor, TheoryInstance};
pub use state::{evaluate_effect, mix, Effect, LinearMap, Measurement, StateVector};
