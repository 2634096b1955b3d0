//! Exact sexagesimal arithmetic and the Old Babylonian cubic-equation
//! procedures: pure cubics, the depressed cubic `12x³ + x = b`, the
//! factorization method for wells, and Wang Xiaotong's right-triangle cubic.

#![allow(clippy::result_large_err)]

pub mod cli;
pub mod factorize;
pub mod oracle;
pub mod problem;
pub mod procedure_dsl;
pub mod published;
pub mod sexagesimal;
pub mod solvers;
pub mod tables;

pub use sexagesimal::{parse_literal, parse_number, render_number, ExactNumber};
