//! Finite groupoid-graded rings, partial skew groupoid rings and groupoid
//! rings, with several independent primeness deciders.

pub mod error;
pub mod expr;
pub mod fuzz;
pub mod groupoid;
pub mod instance;
pub mod graded;
pub mod partial_action;
pub mod primeness;
pub mod report;
pub mod ring;

pub use error::{Error, Result};
