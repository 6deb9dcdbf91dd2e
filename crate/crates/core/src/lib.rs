//! Moment-curve subspace designs over finite fields, with exact verification
//! of their design parameters.

pub mod cli;
pub mod constructions;
pub mod designs;
pub mod error;
pub mod exterior;
pub mod field;
pub mod grassmann;
pub mod linalg;
pub mod polyalg;

pub use error::{Error, Result};
pub use field::{make_field, Elem, Field};
pub use linalg::{Matrix, Subspace};
