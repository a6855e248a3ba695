//! Quantization of self-affine measures on Bedford-McMullen carpets.
//!
//! * [`carpet`]: validated digit sets, derived scalars, maps and sampling.
//! * [`symbolic`]: words, approximate squares and antichains.
//! * [`dims`]: dimension solvers, the temperature function and condition reports.
//! * [`quantizer`]: discretized measures, codebook optimization and error curves.
//! * [`cli`]: subcommands writing CSV results.

pub mod carpet;
pub mod cli;
pub mod dims;
pub mod error;
pub mod quantizer;
pub mod reference;
pub mod roots;
pub mod sum;
pub mod symbolic;

pub use carpet::{Carpet, CarpetSpec, DerivedQuantities, Digit, PlanePoint};
pub use error::{Error, Result};
