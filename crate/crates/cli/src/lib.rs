//! Form-expression parser and verification suites behind the `sympq` binary.

pub mod parser;
pub mod suite;
