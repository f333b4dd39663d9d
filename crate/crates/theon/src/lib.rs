//! Universal relational theories, their finite models, flag algebras, open
//! interpretations and limit objects (theons) with exact and sampled density
//! evaluation.
//!
//! Vertices are 1-based at every text boundary (model files, printed tuples)
//! and 0-based inside the library.

pub mod combin;
pub mod densities;
pub mod error;
pub mod flag_algebra;
pub mod guard;
pub mod interpret;
pub mod lineons;
pub mod logic;
pub mod models;
pub mod rational;
pub mod syntax;
pub mod theons;

pub use error::{Error, Result};
pub use rational::Rational;
