//! Minimal vectors in supercuspidal representations of `GL_2(Q_p)`.
//!
//! The local layers ([`residue`], [`gl2`], [`characters`],
//! [`minimal_vector`], [`que`]) are exact: character values are roots of
//! unity in `Q/Z` and finite groups are enumerated in full. The [`global`]
//! layer turns those local values into numerical evaluations of the global
//! form through its Whittaker expansion.

pub mod characters;
pub mod error;
pub mod gl2;
pub mod global;
pub mod minimal_vector;
pub mod que;
pub mod residue;

pub use error::{Error, Result};
