//! Rating inference for review text.

pub mod app;
pub mod classifiers;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod linear;
pub mod metric_labeling;
pub mod pipeline;
pub mod psp;
pub mod synthetic;

pub use error::{Error, Result};
