// `!(x > 0.0)` style guards are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod geom;
pub mod linprog;
pub mod optim;
pub mod quad;
pub mod sim;

pub use error::{Error, Result};
