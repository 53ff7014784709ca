//! Second-order permutation models over finite and orbit-finite domains.

pub mod error;
pub mod exec;
pub mod family;
pub mod harness;
pub mod logic;
pub mod perm;
pub mod structure;
pub mod symbolic;

pub use error::{Error, Result};
pub use exec::Exec;
