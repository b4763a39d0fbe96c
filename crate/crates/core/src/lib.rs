//! Solitary traveling waves of FPU-type chains with a singular interaction
//! potential, the high-energy limit ODE, and the asymptotic formulas that
//! connect them.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod grid;
pub mod limit_ode;
pub mod potential;
pub mod verify;
pub mod wave;

pub use error::{Error, Result};
