//! Quantitative universal algebra over finite extended metric spaces.

pub mod algebra;
pub mod commands;
pub mod dist;
pub mod dsl;
pub mod equations;
pub mod error;
pub mod free;
pub mod metric;
pub mod monads;
mod par;
pub mod terms;

pub use dist::Dist;
pub use error::{Error, Result};
