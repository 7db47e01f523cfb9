//! Decoding linear codes over prime-power fields under the Manhattan metric.
//!
//! The crate is organised bottom-up: [`gf`] and [`linalg`] provide exact
//! arithmetic, [`metrics`] and [`codes`] the coding-theory layer, [`qsim`] a
//! dense qudit simulator, [`decoder`] the quantum decoder on two backends,
//! [`baselines`] the classical comparison and [`hardness`] the set-cover
//! gadget.

pub mod baselines;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod gf;
pub mod hardness;
pub mod linalg;
pub mod metrics;
pub mod qsim;
pub mod rng;

pub use error::{Error, Result};
pub use gf::{make_field, ExpandedMatrix, FieldElement, FieldParams, FqMatrix};
pub use linalg::{fp_gauss_invert, FpMatrix, SingularReport, Solution};
pub use codes::{DecodeInstance, LinearCode};
pub use metrics::MetricKind;
pub use decoder::{Backend, DecodeOptions, DecodeResult};
pub use qsim::{DenseState, SigmaParam};
pub use baselines::{direct_inversion_decode, DirectInversionReport, InversionStatus, RowPolicy};
pub use hardness::{build_gadget, Gadget, GapReport, SetCoverInstance};

/// Library version, reported by the command-line tool.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
