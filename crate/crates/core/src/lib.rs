// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod constitutive;
pub mod diagnostics;
pub mod grid;
pub mod presets;
pub mod rng;
pub mod snapshot;
pub mod solvers;
pub mod stepper;
pub mod tensor;
