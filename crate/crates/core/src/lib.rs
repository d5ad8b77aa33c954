//! Design and simulation toolkit for surface-acoustic-wave resonators read out
//! through an optical cavity: resonator layout, mode fields, optoelastic
//! phase maps, RF/optical spectra and the optomechanical coupling budget.

// negated comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustics;
pub mod bessel;
pub mod cavity;
pub mod cli;
pub mod constants;
pub mod error;
pub mod fit;
pub mod grid;
pub mod layout;
pub mod materials;
pub mod optoelastics;
pub mod render;
pub mod spectra;

pub use error::{Error, Result};
