//! Exact computational number theory for p-rational real quadratic fields:
//! special Dirichlet L-values, Cohen coefficient series and the operators
//! acting on their q-expansions, p-rationality verdicts, the 5-rational
//! discriminant production loop, and the Serre-prime scan.
//!
//! All series arithmetic is exact (BigRational) unless a function name says
//! residue; residue paths carry explicit moduli and are cross-checked
//! against the exact ones in the test suites.

pub mod arith;
pub mod cohen;
pub mod dirichlet;
pub mod error;
pub mod qexp_io;
pub mod qseries;
pub mod rationality;
pub mod search5;
pub mod serre;

pub use error::{Error, Result};
