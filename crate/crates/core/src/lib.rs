//! Braids acting on free groups, bi-orderings of free groups, and
//! certificates deciding (or refuting) whether a braid preserves a
//! bi-ordering of `F_n`.

pub mod artin;
pub mod braid_core;
pub mod certify;
pub mod error;
pub mod explicit_orderings;
pub mod free_group;
pub mod magnus_order;
pub mod refute;
pub mod spectra;

pub use error::{Error, Result};
