//! Exact combinatorial engine for tropical central-charge computations on
//! canonical bundles of smooth toric Fano varieties.
//!
//! The geometric and arithmetic core (`lattice`, `tropical`, `fano`,
//! `curve`, `series`, `charge`) is exact: every number is an
//! arbitrary-precision rational, every comparison is decidable.  The only
//! floating-point code lives in `amoeba`, a numerical laboratory that
//! cross-checks the exact skeleton against sampled amoebas of the mirror
//! superpotential.

pub mod amoeba;
pub mod charge;
pub mod config;
pub mod curve;
pub mod error;
pub mod fano;
pub mod lattice;
pub mod linalg;
pub mod render;
pub mod report;
pub mod series;
pub mod tropical;

pub use error::{Error, Result};
