//! Clique numbers and maximum-clique counts of quadratic-form graphs over
//! finite rings, with a brute-force oracle and a local-global bound over `Q`.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod charzero;
pub mod cli;
pub mod cliques;
pub mod construct;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod qform;
pub mod testform;
pub mod verify;

pub use error::{Error, Result};
