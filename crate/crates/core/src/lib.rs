#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dyson;
pub mod error;
pub mod linalg;
pub mod models;
pub mod observables;
pub mod sampling;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
