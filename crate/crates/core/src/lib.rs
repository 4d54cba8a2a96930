//! Invariants of plane algebroid branches over fields of any characteristic.

pub mod algebra;
pub mod branch;
pub mod cli;
pub mod error;
pub mod field;
pub mod invariants;
pub mod keytheorem;
pub mod localideal;
pub mod prep;
pub mod semigroup;

pub use error::{Error, Result};
pub use field::{Elem, Field};
