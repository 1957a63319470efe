//! Monte Carlo engine for single-spin magnetometry by generalized quantum
//! phase estimation.
//!
//! The crate is organised bottom-up:
//!
//! * [`dynamics`] models the two-level probe (pulses, Lindblad evolution and
//!   the Ramsey click probability).
//! * [`posterior`] keeps the Bayesian phase posterior as a Fourier series and
//!   ships a brute-force grid posterior used as an oracle.
//! * [`control`] picks control phases (adaptive or fixed quarter-turn
//!   increments), builds detection schedules and accounts for resource time.
//! * [`engine`] runs trials and ensembles and reduces them to Holevo
//!   variances.
//! * [`io`] parses JSON run configurations and writes CSV rows plus a run
//!   manifest.
//! * [`validation`] bundles the oracle-equivalence checks behind the
//!   `validate` subcommand.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod io;
pub mod posterior;
pub mod rng;
pub mod validation;

pub use error::{QpeError, Result};

/// Tool version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
